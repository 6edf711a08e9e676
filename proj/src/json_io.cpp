#include "hybridmbqc/json_io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <initializer_list>
#include <numbers>
#include <sstream>

#include "hybridmbqc/version.hpp"

namespace hmq::json_io {

namespace {

using njson = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::parse, path + ": " + what);
}

njson parse_document(const std::string& text) {
  njson j = njson::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::parse, "document is not well-formed JSON");
  return j;
}

const njson& require_object(const njson& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  return j;
}

const njson& require_array(const njson& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

void check_keys(const njson& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known) fail(path + "." + item.key(), "unknown key");
  }
}

const njson* find(const njson& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::string get_string(const njson& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

double get_number(const njson& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int get_int(const njson& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

std::uint64_t get_seed(const njson& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  fail(path, "expected a non-negative integer");
}

bool get_bool(const njson& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

graph::VertexKind kind_from(const std::string& s, const std::string& path) {
  if (s == "B") return graph::VertexKind::B;
  if (s == "C") return graph::VertexKind::C;
  fail(path, "kind must be \"B\" or \"C\"");
}

graph::HadamardPosition position_from(const std::string& s, const std::string& path) {
  if (s == "before_cz") return graph::HadamardPosition::before_cz;
  if (s == "after_cz") return graph::HadamardPosition::after_cz;
  fail(path, "position must be \"before_cz\" or \"after_cz\"");
}

ojson params_to_json(const spin::CoherentParams& p) {
  return ojson{{"alpha", {p.alpha.real(), p.alpha.imag()}},
               {"beta", {p.beta.real(), p.beta.imag()}},
               {"n_particles", p.n_particles}};
}

ojson config_json(const protocols::ProtocolConfig& cfg) {
  ojson env;
  env["center"] = cfg.envelope.center ? ojson(*cfg.envelope.center) : ojson(nullptr);
  env["sigma"] = cfg.envelope.sigma ? ojson(*cfg.envelope.sigma) : ojson(nullptr);
  ojson j{{"protocol", protocols::protocol_name(cfg.protocol)},
          {"theta", cfg.theta},
          {"theta2", cfg.theta2 ? ojson(*cfg.theta2) : ojson(nullptr)},
          {"n_particles", cfg.n_particles},
          {"big_l", cfg.big_l},
          {"envelope", env},
          {"n_points", cfg.n_points},
          {"bec_outcome_mode", protocols::mode_name(cfg.bec_outcome_mode)},
          {"homodyne_mode", protocols::mode_name(cfg.homodyne_mode)},
          {"order", cfg.order == protocols::MeasurementOrder::left_first ? "left_first"
                                                                         : "right_first"},
          {"seed", cfg.seed}};
  return j;
}

void append_cell(std::string& out, double v) { out += format_double(v); }

}  // namespace

graph::GraphSpec parse_graph(const std::string& text) {
  const njson doc = parse_document(text);
  require_object(doc, "graph");
  check_keys(doc, "graph", {"vertices", "edges", "hadamard", "magic_L"});

  std::optional<double> magic_l;
  if (const njson* m = find(doc, "magic_L")) {
    double v = get_number(*m, "graph.magic_L");
    if (!(v > 0.0)) fail("graph.magic_L", "must be positive");
    magic_l = v;
  }

  const njson* vs = find(doc, "vertices");
  if (!vs) fail("graph.vertices", "missing required key");
  require_array(*vs, "graph.vertices");
  if (vs->empty()) fail("graph.vertices", "must be nonempty");
  std::vector<graph::Vertex> vertices;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < vs->size(); ++i) {
    const std::string path = "graph.vertices[" + std::to_string(i) + "]";
    const njson& v = require_object((*vs)[i], path);
    check_keys(v, path, {"id", "kind"});
    const njson* id = find(v, "id");
    const njson* kind = find(v, "kind");
    if (!id) fail(path + ".id", "missing required key");
    if (!kind) fail(path + ".kind", "missing required key");
    std::string sid = get_string(*id, path + ".id");
    vertices.push_back({sid, kind_from(get_string(*kind, path + ".kind"), path + ".kind")});
    ids.insert(sid);
  }

  std::vector<graph::Edge> edges;
  if (const njson* es = find(doc, "edges")) {
    require_array(*es, "graph.edges");
    for (std::size_t i = 0; i < es->size(); ++i) {
      const std::string path = "graph.edges[" + std::to_string(i) + "]";
      const njson& e = require_object((*es)[i], path);
      check_keys(e, path, {"u", "v", "t"});
      const njson* u = find(e, "u");
      const njson* v = find(e, "v");
      const njson* t = find(e, "t");
      if (!u) fail(path + ".u", "missing required key");
      if (!v) fail(path + ".v", "missing required key");
      if (!t) fail(path + ".t", "missing required key");
      std::string su = get_string(*u, path + ".u");
      std::string sv = get_string(*v, path + ".v");
      if (!ids.count(su)) fail(path + ".u", "unknown vertex id \"" + su + "\"");
      if (!ids.count(sv)) fail(path + ".v", "unknown vertex id \"" + sv + "\"");
      double tv;
      if (t->is_string()) {
        if (t->get<std::string>() != "magic")
          fail(path + ".t", "expected a number or the string \"magic\"");
        if (!magic_l) fail(path + ".t", "\"magic\" requires graph.magic_L");
        tv = 2.0 * std::numbers::pi / *magic_l;
      } else {
        tv = get_number(*t, path + ".t");
      }
      if (!(tv > 0.0)) fail(path + ".t", "must be positive");
      edges.push_back({su, sv, tv});
    }
  }

  std::vector<graph::HadamardMark> marks;
  if (const njson* hs = find(doc, "hadamard")) {
    require_array(*hs, "graph.hadamard");
    for (std::size_t i = 0; i < hs->size(); ++i) {
      const std::string path = "graph.hadamard[" + std::to_string(i) + "]";
      const njson& h = require_object((*hs)[i], path);
      check_keys(h, path, {"vertex", "position"});
      const njson* vx = find(h, "vertex");
      const njson* pos = find(h, "position");
      if (!vx) fail(path + ".vertex", "missing required key");
      if (!pos) fail(path + ".position", "missing required key");
      std::string sv = get_string(*vx, path + ".vertex");
      if (!ids.count(sv)) fail(path + ".vertex", "unknown vertex id \"" + sv + "\"");
      marks.push_back({sv, position_from(get_string(*pos, path + ".position"), path + ".position")});
    }
  }

  try {
    return graph::make_graph(std::move(vertices), std::move(edges), std::move(marks), magic_l);
  } catch (const Error& e) {
    throw Error(ErrorCode::parse, std::string("graph: ") + e.what());
  }
}

protocols::ProtocolConfig parse_protocol_config(const std::string& text) {
  const njson doc = parse_document(text);
  require_object(doc, "config");
  check_keys(doc, "config",
             {"protocol", "theta", "theta2", "n_particles", "big_l", "envelope", "n_points",
              "bec_outcome_mode", "homodyne_mode", "order", "seed"});
  protocols::ProtocolConfig cfg;
  if (const njson* p = find(doc, "protocol"))
    cfg.protocol = protocols::protocol_from_name(get_string(*p, "config.protocol"));
  if (const njson* t = find(doc, "theta")) cfg.theta = get_number(*t, "config.theta");
  if (const njson* t2 = find(doc, "theta2"))
    if (!t2->is_null()) cfg.theta2 = get_number(*t2, "config.theta2");
  if (const njson* n = find(doc, "n_particles")) cfg.n_particles = get_int(*n, "config.n_particles");
  if (const njson* l = find(doc, "big_l")) cfg.big_l = get_number(*l, "config.big_l");
  if (const njson* env = find(doc, "envelope")) {
    require_object(*env, "config.envelope");
    check_keys(*env, "config.envelope", {"center", "sigma"});
    if (const njson* c = find(*env, "center"))
      if (!c->is_null()) cfg.envelope.center = get_number(*c, "config.envelope.center");
    if (const njson* s = find(*env, "sigma"))
      if (!s->is_null()) cfg.envelope.sigma = get_number(*s, "config.envelope.sigma");
  }
  if (const njson* np = find(doc, "n_points")) cfg.n_points = get_int(*np, "config.n_points");
  if (const njson* m = find(doc, "bec_outcome_mode"))
    cfg.bec_outcome_mode = protocols::mode_from_name(get_string(*m, "config.bec_outcome_mode"));
  if (const njson* m = find(doc, "homodyne_mode"))
    cfg.homodyne_mode = protocols::mode_from_name(get_string(*m, "config.homodyne_mode"));
  if (const njson* o = find(doc, "order")) {
    std::string s = get_string(*o, "config.order");
    if (s == "left_first")
      cfg.order = protocols::MeasurementOrder::left_first;
    else if (s == "right_first")
      cfg.order = protocols::MeasurementOrder::right_first;
    else
      fail("config.order", "must be \"left_first\" or \"right_first\"");
  }
  if (const njson* s = find(doc, "seed")) cfg.seed = get_seed(*s, "config.seed");
  return cfg;
}

protocols::SweepConfig parse_sweep_config(const std::string& text) {
  const njson doc = parse_document(text);
  require_object(doc, "sweep");
  check_keys(doc, "sweep",
             {"protocol", "n_list", "l_list", "theta_list", "theta2", "runs_per_point",
              "bec_outcome_mode", "homodyne_mode", "n_points", "sigma", "master_seed",
              "max_threads"});
  protocols::SweepConfig cfg;
  if (const njson* p = find(doc, "protocol"))
    cfg.protocol = protocols::protocol_from_name(get_string(*p, "sweep.protocol"));
  auto int_list = [](const njson& j, const std::string& path) {
    std::vector<int> out;
    require_array(j, path);
    for (std::size_t i = 0; i < j.size(); ++i)
      out.push_back(get_int(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
  };
  auto num_list = [](const njson& j, const std::string& path) {
    std::vector<double> out;
    require_array(j, path);
    for (std::size_t i = 0; i < j.size(); ++i)
      out.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
  };
  if (const njson* n = find(doc, "n_list")) cfg.n_list = int_list(*n, "sweep.n_list");
  if (const njson* l = find(doc, "l_list")) cfg.l_list = num_list(*l, "sweep.l_list");
  if (const njson* t = find(doc, "theta_list")) cfg.theta_list = num_list(*t, "sweep.theta_list");
  if (const njson* t2 = find(doc, "theta2"))
    if (!t2->is_null()) cfg.theta2 = get_number(*t2, "sweep.theta2");
  if (const njson* r = find(doc, "runs_per_point"))
    cfg.runs_per_point = get_int(*r, "sweep.runs_per_point");
  if (const njson* m = find(doc, "bec_outcome_mode"))
    cfg.bec_outcome_mode = protocols::mode_from_name(get_string(*m, "sweep.bec_outcome_mode"));
  if (const njson* m = find(doc, "homodyne_mode"))
    cfg.homodyne_mode = protocols::mode_from_name(get_string(*m, "sweep.homodyne_mode"));
  if (const njson* np = find(doc, "n_points")) cfg.n_points = get_int(*np, "sweep.n_points");
  if (const njson* s = find(doc, "sigma"))
    if (!s->is_null()) cfg.sigma = get_number(*s, "sweep.sigma");
  if (const njson* s = find(doc, "master_seed")) cfg.master_seed = get_seed(*s, "sweep.master_seed");
  if (const njson* t = find(doc, "max_threads")) cfg.max_threads = get_int(*t, "sweep.max_threads");
  return cfg;
}

std::string protocol_config_to_json(const protocols::ProtocolConfig& cfg) {
  return config_json(cfg).dump();
}

std::string sweep_config_to_json(const protocols::SweepConfig& cfg) {
  ojson j{{"protocol", protocols::protocol_name(cfg.protocol)},
          {"n_list", cfg.n_list},
          {"l_list", cfg.l_list},
          {"theta_list", cfg.theta_list},
          {"theta2", cfg.theta2 ? ojson(*cfg.theta2) : ojson(nullptr)},
          {"runs_per_point", cfg.runs_per_point},
          {"bec_outcome_mode", protocols::mode_name(cfg.bec_outcome_mode)},
          {"homodyne_mode", protocols::mode_name(cfg.homodyne_mode)},
          {"n_points", cfg.n_points},
          {"sigma", cfg.sigma ? ojson(*cfg.sigma) : ojson(nullptr)},
          {"master_seed", cfg.master_seed},
          {"max_threads", cfg.max_threads}};
  return j.dump();
}

std::string report_to_json(const protocols::ProtocolReport& rep) {
  ojson j;
  j["config"] = config_json(rep.config);
  j["effective_sigma"] = rep.effective_sigma;
  ojson centers = ojson::array();
  for (const auto& [axis, center] : rep.axis_centers)
    centers.push_back(ojson{{"axis", axis}, {"center", center}});
  j["axis_centers"] = centers;
  ojson becs = ojson::array();
  for (const auto& r : rep.bec_records)
    becs.push_back(ojson{{"vertex", r.vertex},
                         {"theta", r.theta},
                         {"q", r.q},
                         {"prob", r.prob},
                         {"distribution", r.distribution},
                         {"forced", r.forced}});
  j["bec_records"] = becs;
  ojson homs = ojson::array();
  for (const auto& h : rep.homodyne_records)
    homs.push_back(ojson{{"axis", h.axis},
                         {"x", h.x},
                         {"density", h.density},
                         {"mean", h.mean},
                         {"std_dev", h.std_dev}});
  j["homodyne_records"] = homs;
  j["output_raw"] = params_to_json(rep.output_raw);
  j["output_logical"] = params_to_json(rep.output_logical);
  j["target_raw"] = params_to_json(rep.target_raw);
  j["nominal_form"] = rep.nominal_form ? params_to_json(*rep.nominal_form) : ojson(nullptr);
  j["fidelity"] = rep.fidelity;
  j["many_body_fidelity"] = rep.many_body_fidelity;
  j["nominal_fidelity"] = rep.nominal_fidelity ? ojson(*rep.nominal_fidelity) : ojson(nullptr);
  j["avg_fidelity"] = rep.avg_fidelity ? ojson(*rep.avg_fidelity) : ojson(nullptr);
  j["marginal_std"] = rep.marginal_std;
  j["status"] = rep.status;
  j["version"] = kVersion;
  return j.dump(2) + "\n";
}

std::string rule_report_to_json(const graph::RuleReport& rep) {
  ojson j;
  j["ok"] = rep.ok;
  ojson vs = ojson::array();
  for (const auto& v : rep.violations)
    vs.push_back(ojson{{"rule_id", v.rule_id}, {"witness", v.witness}, {"message", v.message}});
  j["violations"] = vs;
  j["version"] = kVersion;
  return j.dump(2) + "\n";
}

std::string approx_report_to_json(const protocols::ApproxReport& rep) {
  ojson j;
  j["n_particles"] = rep.n_particles;
  j["big_l"] = rep.big_l;
  j["theta"] = rep.theta;
  ojson table = ojson::array();
  for (const auto& p : rep.table)
    table.push_back(ojson{{"x", p.x},
                          {"exact", p.exact},
                          {"surrogate", p.surrogate},
                          {"rel_error", p.rel_error}});
  j["table"] = table;
  j["fitted_width"] = rep.fitted_width;
  j["predicted_width"] = rep.predicted_width;
  j["max_rel_error_valid"] = rep.max_rel_error_valid;
  j["version"] = kVersion;
  return j.dump(2) + "\n";
}

void parse_validate_request(const std::string& text, std::vector<std::string>& outputs,
                            std::vector<std::string>& pre_homodyne) {
  const njson doc = parse_document(text);
  require_object(doc, "request");
  check_keys(doc, "request", {"outputs", "pre_homodyne"});
  auto str_list = [](const njson& j, const std::string& path) {
    std::vector<std::string> out;
    require_array(j, path);
    for (std::size_t i = 0; i < j.size(); ++i)
      out.push_back(get_string(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
  };
  if (const njson* o = find(doc, "outputs")) outputs = str_list(*o, "request.outputs");
  if (const njson* p = find(doc, "pre_homodyne"))
    pre_homodyne = str_list(*p, "request.pre_homodyne");
}

std::string graph_report_json(const graph::GraphSpec& g, std::vector<std::string> outputs,
                              const std::vector<std::string>& pre_homodyne, bool* admissible) {
  if (outputs.empty()) {
    for (const auto& v : g.vertices)
      if (v.kind == graph::VertexKind::B && (outputs.empty() || v.id < outputs.front()))
        outputs = {v.id};
  }

  ojson j;
  try {
    j["family"] = graph::family_name(graph::classify_family(g));
  } catch (const Error&) {
    j["family"] = "disconnected";
  }
  const auto topo = graph::validate_topology(g);
  ojson tv = ojson::array();
  for (const auto& v : topo.violations)
    tv.push_back(ojson{{"rule_id", v.rule_id}, {"witness", v.witness}, {"message", v.message}});
  j["topology"] = ojson{{"ok", topo.ok}, {"violations", tv}};
  j["outputs"] = outputs;
  j["pre_homodyne"] = pre_homodyne;

  bool plan_ok = false;
  ojson plan;
  ojson capability = ojson::array();
  try {
    auto p = graph::plan_flow(g, outputs, pre_homodyne);
    plan_ok = true;
    ojson steps = ojson::array();
    for (const auto& s : p.steps)
      steps.push_back(ojson{
          {"kind", s.kind == graph::PlanStep::Kind::measure_bec ? "measure_bec" : "homodyne"},
          {"vertex", s.vertex}});
    plan = ojson{{"ok", true}, {"steps", steps}, {"error", nullptr}};
    for (const auto& o : outputs)
      capability.push_back(ojson{
          {"output", o},
          {"capability", graph::capability_name(graph::rotation_capability(g, p, o))}});
  } catch (const Error& e) {
    if (e.code() != ErrorCode::rule) throw;
    plan = ojson{{"ok", false}, {"steps", ojson::array()}, {"error", e.what()}};
  }
  j["plan"] = plan;
  j["capability"] = capability;
  j["admissible"] = topo.ok && plan_ok;
  j["version"] = kVersion;
  if (admissible) *admissible = topo.ok && plan_ok;
  return j.dump(2) + "\n";
}

std::string oracle_check_to_json(const protocols::OracleCheck& chk) {
  ojson j;
  j["config"] = config_json(chk.config);
  j["q_symbolic"] = chk.q_symbolic;
  j["q_dense"] = chk.q_dense;
  j["x_symbolic"] = chk.x_symbolic;
  j["x_dense"] = chk.x_dense;
  j["max_distribution_diff"] = chk.max_distribution_diff;
  j["max_state_diff"] = chk.max_state_diff;
  j["outcomes_match"] = chk.outcomes_match;
  j["status"] = chk.status;
  j["version"] = kVersion;
  return j.dump(2) + "\n";
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string rows_to_csv(const std::vector<protocols::SweepRow>& rows,
                        const std::string& config_echo) {
  std::string out;
  out += "# hybrid-mbqc ";
  out += kVersion;
  out += " config=";
  out += config_echo;
  out += "\n";
  out += "protocol,N,L,theta,theta2,seed,q_outcome,x_outcome,prob_q,fidelity,marginal_std,status\n";
  for (const auto& r : rows) {
    out += r.protocol;
    out += ',';
    out += std::to_string(r.n_particles);
    out += ',';
    append_cell(out, r.big_l);
    out += ',';
    append_cell(out, r.theta);
    out += ',';
    if (r.theta2) append_cell(out, *r.theta2);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    for (std::size_t i = 0; i < r.q_outcomes.size(); ++i) {
      if (i) out += ';';
      out += std::to_string(r.q_outcomes[i]);
    }
    out += ',';
    for (std::size_t i = 0; i < r.x_outcomes.size(); ++i) {
      if (i) out += ';';
      append_cell(out, r.x_outcomes[i]);
    }
    out += ',';
    for (std::size_t i = 0; i < r.probs.size(); ++i) {
      if (i) out += ';';
      append_cell(out, r.probs[i]);
    }
    out += ',';
    if (r.fidelity) append_cell(out, *r.fidelity);
    out += ',';
    if (r.marginal_std) append_cell(out, *r.marginal_std);
    out += ',';
    out += r.status;
    out += '\n';
  }
  return out;
}

}  // namespace hmq::json_io
