#include "hybridmbqc/protocols.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <thread>

#include "hybridmbqc/cv.hpp"
#include "hybridmbqc/engine_dense.hpp"
#include "hybridmbqc/rng.hpp"

namespace hmq::protocols {

namespace {

constexpr double kPi = std::numbers::pi;

spin::CoherentParams plus_state(int n) {
  const double c = 1.0 / std::sqrt(2.0);
  return {c, c, n};
}

cplx mode_overlap(const spin::CoherentParams& a, const spin::CoherentParams& b) {
  return std::conj(a.alpha) * b.alpha + std::conj(a.beta) * b.beta;
}

double mode_fidelity(const spin::CoherentParams& a, const spin::CoherentParams& b) {
  return std::clamp(std::norm(mode_overlap(a, b)), 0.0, 1.0);
}

// Everything execute() needs to drive one protocol: the prepared graph, the
// measurement plan, the per-selector basis angles, and the per-axis centers
// (each axis concentrates around the angle of its magic-coupled selector).
struct Build {
  graph::GraphSpec g;
  graph::MeasurementPlan plan;
  std::string output;
  std::map<std::string, double> angles;
  std::map<std::string, double> centers;
  bool has_nominal = false;
};

Build build_wire(const ProtocolConfig& cfg, bool hadamard_frame) {
  const double magic = 2.0 * kPi / cfg.big_l;
  std::vector<graph::Vertex> vs{{"b1", graph::VertexKind::B},
                                {"c2", graph::VertexKind::C},
                                {"b3", graph::VertexKind::B}};
  std::vector<graph::Edge> es{{"b1", "c2", 1.0}, {"c2", "b3", magic}};
  std::vector<graph::HadamardMark> marks;
  if (hadamard_frame) marks.push_back({"b1", graph::HadamardPosition::after_cz});
  Build b;
  b.g = graph::make_graph(vs, es, marks, cfg.big_l);
  b.plan = graph::plan_flow(b.g, {"b1"});
  b.output = "b1";
  b.angles = {{"b3", cfg.theta}};
  b.centers = {{"c2", cfg.theta}};
  b.has_nominal = hadamard_frame;
  return b;
}

Build build_sandwich(const ProtocolConfig& cfg) {
  const double magic = 2.0 * kPi / cfg.big_l;
  std::vector<graph::Vertex> vs{{"b1", graph::VertexKind::B},
                                {"c1", graph::VertexKind::C},
                                {"b2", graph::VertexKind::B},
                                {"c2", graph::VertexKind::C},
                                {"b3", graph::VertexKind::B}};
  std::vector<graph::Edge> es{{"b1", "c1", magic},
                              {"c1", "b2", 1.0},
                              {"b2", "c2", 1.0},
                              {"c2", "b3", magic}};
  std::vector<graph::HadamardMark> marks{{"b2", graph::HadamardPosition::after_cz}};
  // The frame flip must sit between the output's two couplings, so the gate
  // order is explicit rather than derived from the edge list.
  std::vector<graph::PrepStep> prep{
      {graph::PrepStep::Kind::cz, "b1", "c1", magic, ""},
      {graph::PrepStep::Kind::cz, "c1", "b2", 1.0, ""},
      {graph::PrepStep::Kind::hadamard, "", "", 0.0, "b2"},
      {graph::PrepStep::Kind::cz, "b2", "c2", 1.0, ""},
      {graph::PrepStep::Kind::cz, "c2", "b3", magic, ""}};
  Build b;
  b.g = graph::make_graph(vs, es, marks, cfg.big_l, prep);
  if (cfg.order == MeasurementOrder::left_first) {
    b.plan = graph::plan_flow(b.g, {"b2"});
  } else {
    b.plan.steps = {{graph::PlanStep::Kind::measure_bec, "b3"},
                    {graph::PlanStep::Kind::homodyne, "c2"},
                    {graph::PlanStep::Kind::measure_bec, "b1"},
                    {graph::PlanStep::Kind::homodyne, "c1"}};
    b.plan.outputs = {"b2"};
    auto check = graph::validate_plan(b.g, b.plan);
    if (!check.ok)
      throw Error(ErrorCode::rule, "right-first plan rejected: " + check.violations[0].message);
  }
  b.output = "b2";
  b.angles = {{"b1", cfg.theta}, {"b3", *cfg.theta2}};
  b.centers = {{"c1", cfg.theta}, {"c2", *cfg.theta2}};
  return b;
}

// Same construction for the layered engine and the joint-tensor reference, so
// cross-checks start from identical states.
template <typename Engine>
void prepare_engine(Engine& eng, const Build& b, const ProtocolConfig& cfg, double sigma) {
  for (const auto& v : b.g.vertices) {
    if (v.kind == graph::VertexKind::B) {
      eng.add_bec(v.id, plus_state(cfg.n_particles));
    } else {
      const double center = cfg.envelope.center.value_or(b.centers.at(v.id));
      auto grid = cv::centered_grid(center, sigma, cfg.n_points);
      eng.add_cv_axis(v.id, cv::gaussian_wavefunction(grid, center, sigma));
    }
  }
  for (const auto& step : graph::prep_program(b.g)) {
    if (step.kind == graph::PrepStep::Kind::hadamard) {
      eng.apply_hadamard(step.vertex);
    } else {
      const std::string& bec = b.g.kind_of(step.u) == graph::VertexKind::B ? step.u : step.v;
      const std::string& axis = bec == step.u ? step.v : step.u;
      eng.apply_cz(bec, axis, step.t);
    }
  }
}

Build build_protocol(const ProtocolConfig& cfg) {
  switch (cfg.protocol) {
    case ProtocolKind::z_rotation: return build_wire(cfg, false);
    case ProtocolKind::x_rotation: return build_wire(cfg, true);
    case ProtocolKind::arbitrary: return build_sandwich(cfg);
  }
  throw Error(ErrorCode::config, "unknown protocol kind");
}

// The output the protocol converges to: the output register's own gate trace
// replayed with every axis pinned at its center. The composition of the exact
// pinned maps, by construction in the same order the engine applies them.
spin::CoherentParams ideal_output(const Build& b, int n) {
  const Eigen::Matrix2cd h2 = spin::hadamard_mode_rotation();
  spin::CoherentParams p = plus_state(n);
  for (const auto& step : graph::prep_program(b.g)) {
    if (step.kind == graph::PrepStep::Kind::hadamard) {
      if (step.vertex == b.output) p = spin::rotate_coherent(p, h2);
      continue;
    }
    const std::string& bec = b.g.kind_of(step.u) == graph::VertexKind::B ? step.u : step.v;
    const std::string& axis = bec == step.u ? step.v : step.u;
    if (bec != b.output) continue;
    p.beta *= std::polar(1.0, -b.centers.at(axis) * step.t);
  }
  return p;
}

ProtocolReport execute(const Build& b, const ProtocolConfig& cfg) {
  ProtocolReport rep;
  rep.config = cfg;
  rep.effective_sigma = cfg.envelope.sigma.value_or(cv::default_sigma(cfg.big_l));
  const int n = cfg.n_particles;

  engine::SymbolicEngine eng(cfg.seed);
  prepare_engine(eng, b, cfg, rep.effective_sigma);
  for (const auto& v : b.g.vertices)
    if (v.kind == graph::VertexKind::C)
      rep.axis_centers.emplace_back(v.id, cfg.envelope.center.value_or(b.centers.at(v.id)));

  rep.target_raw = ideal_output(b, n);

  std::size_t last_hom = 0;
  for (std::size_t i = 0; i < b.plan.steps.size(); ++i)
    if (b.plan.steps[i].kind == graph::PlanStep::Kind::homodyne) last_hom = i;

  for (std::size_t si = 0; si < b.plan.steps.size(); ++si) {
    const auto& st = b.plan.steps[si];
    if (st.kind == graph::PlanStep::Kind::measure_bec) {
      const double ang = b.angles.at(st.vertex);
      auto dist = eng.measurement_distribution(st.vertex, ang, cfg.big_l);
      std::optional<int> forced;
      if (cfg.bec_outcome_mode == engine::OutcomeMode::postselect) forced = n / 2;
      auto out = eng.measure_bec(st.vertex, ang, cfg.big_l, spin::BasisVariant::x_basis, forced);
      rep.bec_records.push_back(
          {st.vertex, ang, out.q, out.prob, std::move(dist), forced.has_value()});
    } else {
      if (cfg.homodyne_mode == engine::OutcomeMode::expectation && si == last_hom) {
        // Average the fidelity over the final marginal before it is pinned.
        auto density = eng.axis_density(st.vertex);
        const auto& grid = eng.axis_grid(st.vertex);
        const auto& reg = eng.registers().at(b.output);
        double acc = 0.0;
        for (int i = 0; i < grid.n_points; ++i) {
          auto p = eng.eval_params(reg, st.vertex, grid.point(i));
          acc += density[static_cast<std::size_t>(i)] * mode_fidelity(rep.target_raw, p);
        }
        rep.avg_fidelity = acc * grid.dx();
      }
      auto out = eng.homodyne(st.vertex, cfg.homodyne_mode, b.centers.at(st.vertex));
      rep.homodyne_records.push_back({st.vertex, out.x, out.density, out.mean, out.std_dev});
    }
  }

  rep.output_raw = eng.output_params(b.output);
  rep.output_logical = rep.output_raw;
  const Eigen::Matrix2cd h2_inv = spin::hadamard_mode_rotation().adjoint();
  for (const auto& mark : b.g.hadamard_marks)
    if (mark.vertex == b.output)
      rep.output_logical = spin::rotate_coherent(rep.output_logical, h2_inv);

  rep.fidelity = mode_fidelity(rep.target_raw, rep.output_raw);
  rep.many_body_fidelity = std::pow(rep.fidelity, n);
  if (b.has_nominal) {
    spin::CoherentParams nominal{std::cos(cfg.theta), cplx(0.0, 1.0) * std::sin(cfg.theta), n};
    rep.nominal_form = nominal;
    rep.nominal_fidelity = mode_fidelity(nominal, rep.output_raw);
  }
  rep.marginal_std = rep.homodyne_records.back().std_dev;
  rep.status = "ok";
  return rep;
}

int thread_cap(int requested, std::size_t jobs) {
  unsigned hw = std::thread::hardware_concurrency();
  long t = requested > 0 ? requested : static_cast<long>(hw ? hw : 1);
  if (const char* env = std::getenv("HYBRID_SIM_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) t = std::min(t, v);
  }
  t = std::min(t, static_cast<long>(jobs));
  return static_cast<int>(std::max(1L, t));
}

}  // namespace

std::string protocol_name(ProtocolKind k) {
  switch (k) {
    case ProtocolKind::z_rotation: return "z_rotation";
    case ProtocolKind::x_rotation: return "x_rotation";
    case ProtocolKind::arbitrary: return "arbitrary";
  }
  return "unknown";
}

ProtocolKind protocol_from_name(const std::string& name) {
  if (name == "z_rotation" || name == "z") return ProtocolKind::z_rotation;
  if (name == "x_rotation" || name == "x") return ProtocolKind::x_rotation;
  if (name == "arbitrary") return ProtocolKind::arbitrary;
  throw Error(ErrorCode::config, "unknown protocol: " + name);
}

std::string mode_name(engine::OutcomeMode m) {
  switch (m) {
    case engine::OutcomeMode::sample: return "sample";
    case engine::OutcomeMode::postselect: return "postselect";
    case engine::OutcomeMode::expectation: return "expectation";
  }
  return "unknown";
}

engine::OutcomeMode mode_from_name(const std::string& name) {
  if (name == "sample") return engine::OutcomeMode::sample;
  if (name == "postselect") return engine::OutcomeMode::postselect;
  if (name == "expectation") return engine::OutcomeMode::expectation;
  throw Error(ErrorCode::config, "unknown outcome mode: " + name);
}

void validate_config(const ProtocolConfig& cfg) {
  if (cfg.n_particles < 1)
    throw Error(ErrorCode::config, "n_particles must be at least 1");
  if (!(std::isfinite(cfg.big_l) && cfg.big_l >= 2.0))
    throw Error(ErrorCode::config, "big_l must be finite and at least 2");
  if (!std::isfinite(cfg.theta))
    throw Error(ErrorCode::config, "theta must be finite");
  if (cfg.protocol == ProtocolKind::arbitrary) {
    if (!cfg.theta2) throw Error(ErrorCode::config, "theta2 is required for the two-angle protocol");
    if (!std::isfinite(*cfg.theta2)) throw Error(ErrorCode::config, "theta2 must be finite");
  }
  if (cfg.n_points < 8)
    throw Error(ErrorCode::config, "n_points must be at least 8");
  if (cfg.envelope.sigma && !(std::isfinite(*cfg.envelope.sigma) && *cfg.envelope.sigma > 0.0))
    throw Error(ErrorCode::config, "envelope sigma must be finite and positive");
  if (cfg.envelope.center && !std::isfinite(*cfg.envelope.center))
    throw Error(ErrorCode::config, "envelope center must be finite");
  if (cfg.bec_outcome_mode == engine::OutcomeMode::expectation)
    throw Error(ErrorCode::config, "bec_outcome_mode must be sample or postselect");
}

ProtocolReport run_z_rotation(const ProtocolConfig& cfg) {
  ProtocolConfig c = cfg;
  c.protocol = ProtocolKind::z_rotation;
  validate_config(c);
  return execute(build_wire(c, false), c);
}

ProtocolReport run_x_rotation(const ProtocolConfig& cfg) {
  ProtocolConfig c = cfg;
  c.protocol = ProtocolKind::x_rotation;
  validate_config(c);
  return execute(build_wire(c, true), c);
}

ProtocolReport run_arbitrary_rotation(const ProtocolConfig& cfg) {
  ProtocolConfig c = cfg;
  c.protocol = ProtocolKind::arbitrary;
  validate_config(c);
  return execute(build_sandwich(c), c);
}

ProtocolReport run_protocol(const ProtocolConfig& cfg) {
  switch (cfg.protocol) {
    case ProtocolKind::z_rotation: return run_z_rotation(cfg);
    case ProtocolKind::x_rotation: return run_x_rotation(cfg);
    case ProtocolKind::arbitrary: return run_arbitrary_rotation(cfg);
  }
  throw Error(ErrorCode::config, "unknown protocol");
}

OracleCheck cross_check(const ProtocolConfig& cfg) {
  ProtocolConfig c = cfg;
  validate_config(c);
  const Build b = build_protocol(c);
  const double sigma = c.envelope.sigma.value_or(cv::default_sigma(c.big_l));

  OracleCheck chk;
  chk.config = c;

  engine::SymbolicEngine sym(c.seed);
  engine::DenseEngine den(c.seed);
  prepare_engine(sym, b, c, sigma);
  prepare_engine(den, b, c, sigma);

  auto track_state = [&] {
    double d = engine::max_diff_up_to_phase(den.state(), engine::dense_snapshot(sym, den.dim_ids()));
    chk.max_state_diff = std::max(chk.max_state_diff, d);
  };
  track_state();

  bool match = true;
  for (const auto& st : b.plan.steps) {
    if (st.kind == graph::PlanStep::Kind::measure_bec) {
      const double ang = b.angles.at(st.vertex);
      auto ds = sym.measurement_distribution(st.vertex, ang, c.big_l);
      auto dd = den.measurement_distribution(st.vertex, ang, c.big_l);
      for (std::size_t i = 0; i < ds.size(); ++i)
        chk.max_distribution_diff = std::max(chk.max_distribution_diff, std::abs(ds[i] - dd[i]));
      std::optional<int> forced;
      if (c.bec_outcome_mode == engine::OutcomeMode::postselect) forced = c.n_particles / 2;
      auto so = sym.measure_bec(st.vertex, ang, c.big_l, spin::BasisVariant::x_basis, forced);
      auto dn = den.measure_bec(st.vertex, ang, c.big_l, spin::BasisVariant::x_basis, forced);
      chk.q_symbolic.push_back(so.q);
      chk.q_dense.push_back(dn.q);
      match = match && so.q == dn.q;
    } else {
      auto so = sym.homodyne(st.vertex, c.homodyne_mode, b.centers.at(st.vertex));
      auto dn = den.homodyne(st.vertex, c.homodyne_mode, b.centers.at(st.vertex));
      chk.x_symbolic.push_back(so.x);
      chk.x_dense.push_back(dn.x);
      match = match && std::abs(so.x - dn.x) < 1e-9;
    }
    track_state();
  }
  chk.outcomes_match = match;
  chk.status = "ok";
  return chk;
}

ApproxReport approx_diagnostics(const ProtocolConfig& cfg) {
  if (cfg.n_particles < 1)
    throw Error(ErrorCode::config, "n_particles must be at least 1");
  if (!(std::isfinite(cfg.big_l) && cfg.big_l >= 2.0))
    throw Error(ErrorCode::config, "big_l must be finite and at least 2");
  const int n = cfg.n_particles;
  const double big_l = cfg.big_l;

  ApproxReport rep;
  rep.n_particles = n;
  rep.big_l = big_l;
  rep.theta = cfg.theta;
  rep.predicted_width = big_l / (kPi * std::sqrt(static_cast<double>(n)));

  // Symmetric offset grid u = pi(x-theta)/L with an exact center point; the
  // window stays well inside cos(u) - sin(u) > 0.
  const int n_pts = 201;
  const double u_max = 0.25;
  const double valid = 0.1;
  rep.table.reserve(n_pts);

  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  double max_valid = 0.0;
  for (int i = 0; i < n_pts; ++i) {
    const double u = -u_max + 2.0 * u_max * i / (n_pts - 1);
    const double log_exact = n * std::log(std::cos(u) - std::sin(u));
    const double log_surr = (-u - u * u / 2.0) * n;
    const double rel = std::abs(std::expm1(log_surr - log_exact));
    rep.table.push_back({cfg.theta + u * big_l / kPi, std::exp(log_exact), std::exp(log_surr), rel});
    if (std::abs(u) < valid) {
      if (rel > max_valid) max_valid = rel;
      Eigen::Vector3d row{1.0, u, u * u};
      ata += row * row.transpose();
      atb += row * log_exact;
    }
  }
  rep.max_rel_error_valid = max_valid;

  // Log-quadratic fit over the validity window; the curvature sets the width.
  Eigen::Vector3d coef = ata.ldlt().solve(atb);
  const double curvature = coef(2);
  rep.fitted_width =
      curvature < 0.0 ? big_l / kPi * std::sqrt(-1.0 / (2.0 * curvature)) : 0.0;
  return rep;
}

NominalFormReport nominal_form_comparison(int n_thetas) {
  if (n_thetas < 2)
    throw Error(ErrorCode::invalid_argument, "nominal form comparison needs at least 2 angles");
  const Eigen::Matrix2cd h2 = spin::hadamard_mode_rotation();
  auto exact_out = [&](double th) {
    spin::CoherentParams p = plus_state(1);
    p.beta *= std::polar(1.0, -th);
    return spin::rotate_coherent(p, h2);
  };
  auto nominal_out = [](double th) {
    return spin::CoherentParams{std::cos(th), cplx(0.0, 1.0) * std::sin(th), 1};
  };
  auto bloch_angle = [](const spin::CoherentParams& a, const spin::CoherentParams& b) {
    return 2.0 * std::acos(std::min(1.0, std::abs(mode_overlap(a, b))));
  };

  NominalFormReport rep;
  rep.table.reserve(static_cast<std::size_t>(n_thetas));
  const auto e0 = exact_out(0.0);
  const auto n0 = nominal_out(0.0);
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < n_thetas; ++i) {
    const double th = (kPi / 2.0) * i / (n_thetas - 1);
    const auto e = exact_out(th);
    const auto no = nominal_out(th);
    const double ea = bloch_angle(e0, e);
    const double na = bloch_angle(n0, no);
    rep.table.push_back({th, ea, na, mode_fidelity(no, e)});
    sxy += ea * na;
    sxx += na * na;
  }
  rep.argument_scale = sxx > 0.0 ? sxy / sxx : 0.0;
  return rep;
}

std::vector<SweepRow> sweep(const SweepConfig& cfg) {
  if (cfg.n_list.empty() || cfg.l_list.empty() || cfg.theta_list.empty())
    throw Error(ErrorCode::config, "sweep lists must be nonempty");
  if (cfg.runs_per_point < 1)
    throw Error(ErrorCode::config, "runs_per_point must be at least 1");
  if (cfg.protocol == ProtocolKind::arbitrary && !cfg.theta2)
    throw Error(ErrorCode::config, "theta2 is required for the two-angle protocol");

  struct Job {
    int n;
    double l;
    double th;
    std::uint64_t point_idx;
    std::uint64_t run_idx;
  };
  std::vector<Job> jobs;
  std::uint64_t point_idx = 0;
  for (int n : cfg.n_list)
    for (double l : cfg.l_list)
      for (double th : cfg.theta_list) {
        for (int r = 0; r < cfg.runs_per_point; ++r)
          jobs.push_back({n, l, th, point_idx, static_cast<std::uint64_t>(r)});
        ++point_idx;
      }

  std::vector<SweepRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& j = jobs[i];
      SweepRow& row = rows[i];
      row.protocol = protocol_name(cfg.protocol);
      row.n_particles = j.n;
      row.big_l = j.l;
      row.theta = j.th;
      row.theta2 = cfg.theta2;
      row.seed = rng::derive_seed(cfg.master_seed, j.point_idx, j.run_idx);
      try {
        ProtocolConfig pc;
        pc.protocol = cfg.protocol;
        pc.theta = j.th;
        pc.theta2 = cfg.theta2;
        pc.n_particles = j.n;
        pc.big_l = j.l;
        pc.envelope.sigma = cfg.sigma;
        pc.n_points = cfg.n_points;
        pc.bec_outcome_mode = cfg.bec_outcome_mode;
        pc.homodyne_mode = cfg.homodyne_mode;
        pc.seed = row.seed;
        ProtocolReport rep = run_protocol(pc);
        for (const auto& r : rep.bec_records) {
          row.q_outcomes.push_back(r.q);
          row.probs.push_back(r.prob);
        }
        for (const auto& h : rep.homodyne_records) row.x_outcomes.push_back(h.x);
        row.fidelity = rep.avg_fidelity.value_or(rep.fidelity);
        row.marginal_std = rep.marginal_std;
        row.status = "ok";
      } catch (const Error& e) {
        row.status = std::string("error:") + code_name(e.code());
      } catch (const std::exception&) {
        row.status = "error:run";
      }
    }
  };

  const int n_threads = thread_cap(cfg.max_threads, jobs.size());
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return rows;
}

}  // namespace hmq::protocols
