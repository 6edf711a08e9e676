// Command-line front end: graph validation, protocol runs, parameter sweeps
// and engine cross-checks. All domain work goes through the shared C API;
// this file only handles flags, files and exit codes.
//
// Exit codes: 0 success, 1 rule violation or run error, 2 usage error.
#include <CLI11.hpp>
#include <json.hpp>

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "hybridmbqc.h"

namespace {

using ojson = nlohmann::ordered_json;

// Engines must agree to this tolerance for an oracle check to count as a pass.
constexpr double kOracleTol = 1e-9;

int fail(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return 1;
}

int fail_status() { return fail(hmq_last_error()); }

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Writes via a temp file + rename so failures never leave partial artifacts.
void write_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  fs::path target = fs::absolute(path);
  fs::path tmp = target;
  tmp += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string());
    f << text;
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ec2;
    fs::remove(tmp, ec2);
    throw std::runtime_error("cannot replace " + target.string() + ": " + ec.message());
  }
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty())
    std::cout << text;
  else
    write_atomic(out_path, text);
}

// Library string, freed on scope exit.
struct CStr {
  char* p = nullptr;
  ~CStr() { hmq_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

// The flag set shared by run, oracle and sweep; flags override the --config
// document field by field.
struct RunFlags {
  std::string protocol, mode, config, out;
  double theta = 0.0, theta2 = 0.0, big_l = 0.0;
  int n = 0;
  std::uint64_t seed = 0;
  CLI::Option *protocol_o = nullptr, *theta_o = nullptr, *theta2_o = nullptr, *n_o = nullptr,
              *l_o = nullptr, *seed_o = nullptr, *mode_o = nullptr;

  void attach(CLI::App* cmd) {
    protocol_o = cmd->add_option("--protocol", protocol,
                                 "Protocol: z | x | arbitrary (two angles)");
    theta_o = cmd->add_option("--theta", theta, "Rotation angle");
    theta2_o = cmd->add_option("--theta2", theta2, "Second angle (arbitrary protocol)");
    n_o = cmd->add_option("--N", n, "Particles per register");
    l_o = cmd->add_option("--L", big_l, "Angle period of the selector basis");
    seed_o = cmd->add_option("--seed", seed, "Master RNG seed");
    mode_o = cmd->add_option("--mode", mode,
                             "Outcome handling; expectation applies to homodynes only")
                 ->check(CLI::IsMember({"sample", "postselect", "expectation"}));
    cmd->add_option("--config", config, "Base config document; flags override its fields")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", out, "Output path (stdout when absent)");
  }

  ojson base_document() const {
    if (config.empty()) return ojson::object();
    ojson doc = ojson::parse(read_file(config));
    if (!doc.is_object()) throw std::runtime_error(config + ": expected a JSON object");
    return doc;
  }

  void apply_mode(ojson& cfg) const {
    cfg["homodyne_mode"] = mode;
    // Register outcomes have no meaningful expectation; leave them sampled.
    cfg["bec_outcome_mode"] = mode == "expectation" ? "sample" : mode;
  }

  ojson run_config() const {
    ojson cfg = base_document();
    if (protocol_o->count()) cfg["protocol"] = protocol;
    if (theta_o->count()) cfg["theta"] = theta;
    if (theta2_o->count()) cfg["theta2"] = theta2;
    if (n_o->count()) cfg["n_particles"] = n;
    if (l_o->count()) cfg["big_l"] = big_l;
    if (seed_o->count()) cfg["seed"] = seed;
    if (mode_o->count()) apply_mode(cfg);
    return cfg;
  }

  ojson sweep_config() const {
    ojson cfg = base_document();
    if (protocol_o->count()) cfg["protocol"] = protocol;
    if (theta_o->count()) cfg["theta_list"] = {theta};
    if (theta2_o->count()) cfg["theta2"] = theta2;
    if (n_o->count()) cfg["n_list"] = {n};
    if (l_o->count()) cfg["l_list"] = {big_l};
    if (seed_o->count()) cfg["master_seed"] = seed;
    if (mode_o->count()) apply_mode(cfg);
    return cfg;
  }
};

int cmd_validate(const std::string& graph_path, const std::string& config,
                 const std::string& out) {
  const std::string text = read_file(graph_path);
  hmq_graph* g = nullptr;
  if (hmq_graph_parse(text.c_str(), &g) != HMQ_OK) return fail_status();

  std::string request;
  if (!config.empty()) request = read_file(config);
  CStr report;
  hmq_status st = hmq_graph_validate(g, request.empty() ? nullptr : request.c_str(), &report.p);
  hmq_graph_free(g);
  if (st != HMQ_OK) return fail_status();

  emit(out, report.str());
  auto doc = nlohmann::json::parse(report.str());
  if (doc["admissible"].get<bool>()) return 0;
  for (const auto& v : doc["topology"]["violations"])
    std::cerr << v["rule_id"].get<std::string>() << ": " << v["message"].get<std::string>()
              << "\n";
  if (!doc["plan"]["ok"].get<bool>())
    std::cerr << doc["plan"]["error"].get<std::string>() << "\n";
  return 1;
}

int cmd_run(const RunFlags& flags) {
  const std::string cfg = flags.run_config().dump();
  CStr report;
  if (hmq_run_protocol(cfg.c_str(), &report.p) != HMQ_OK) return fail_status();
  emit(flags.out, report.str());
  return 0;
}

int cmd_oracle(const RunFlags& flags) {
  ojson cfg = flags.run_config();
  // The reference engine holds the full joint tensor; keep the default grid
  // small enough for it.
  if (!cfg.contains("n_points")) cfg["n_points"] = 64;
  const std::string text = cfg.dump();
  CStr report;
  if (hmq_oracle_check(text.c_str(), &report.p) != HMQ_OK) return fail_status();
  emit(flags.out, report.str());

  auto doc = nlohmann::json::parse(report.str());
  const bool agree = doc["outcomes_match"].get<bool>() &&
                     doc["max_distribution_diff"].get<double>() <= kOracleTol &&
                     doc["max_state_diff"].get<double>() <= kOracleTol;
  if (!agree) return fail("engines disagree beyond tolerance; see the report");
  return 0;
}

int cmd_sweep(const RunFlags& flags) {
  const std::string cfg = flags.sweep_config().dump();
  CStr csv;
  if (hmq_sweep_csv(cfg.c_str(), &csv.p) != HMQ_OK) return fail_status();
  emit(flags.out, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measurement-induced rotations on hybrid BEC/CV graph states"};
  app.set_version_flag("--version", std::string("hybrid-mbqc ") + hmq_version());
  app.require_subcommand(1);

  auto* validate = app.add_subcommand(
      "validate", "Check a graph document against the admissibility rules");
  std::string graph_path, validate_config, validate_out;
  validate->add_option("--graph", graph_path, "Graph document")
      ->required()
      ->check(CLI::ExistingFile);
  validate->add_option("--config", validate_config,
                       "Optional request: {\"outputs\": [...], \"pre_homodyne\": [...]}")
      ->check(CLI::ExistingFile);
  validate->add_option("--out", validate_out, "Report path (stdout when absent)");

  auto* run = app.add_subcommand("run", "Run one rotation protocol and report the result");
  RunFlags run_flags;
  run_flags.attach(run);

  auto* oracle = app.add_subcommand(
      "oracle", "Cross-check the layered engine against the joint-tensor reference");
  RunFlags oracle_flags;
  oracle_flags.attach(oracle);

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep and render the CSV table");
  RunFlags sweep_flags;
  sweep_flags.attach(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) return cmd_validate(graph_path, validate_config, validate_out);
    if (run->parsed()) return cmd_run(run_flags);
    if (oracle->parsed()) return cmd_oracle(oracle_flags);
    if (sweep->parsed()) return cmd_sweep(sweep_flags);
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  return 2;
}
