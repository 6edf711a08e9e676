#pragma once

#include <string>
#include <vector>

#include "hybridmbqc/graph.hpp"
#include "hybridmbqc/protocols.hpp"

namespace hmq::json_io {

// Strict parser for graph documents:
//   {"vertices":[{"id":"b1","kind":"B"},...],
//    "edges":[{"u":"b1","v":"c1","t":1.0},...],
//    "hadamard":[{"vertex":"b2","position":"after_cz"}],
//    "magic_L": 200}
// "t" may be the string "magic", resolving to 2*pi/magic_L (magic_L must then
// be present). Unknown keys are rejected; every error names the JSON path of
// the offending element.
graph::GraphSpec parse_graph(const std::string& text);

// Strict parsers for run/sweep configuration documents. Field names mirror
// the config structs one-to-one; unknown keys are rejected and absent optional
// fields take their defaults.
protocols::ProtocolConfig parse_protocol_config(const std::string& text);
protocols::SweepConfig parse_sweep_config(const std::string& text);

// Effective configuration documents (defaults applied), embedded in artifacts
// so any output can be replayed exactly.
std::string protocol_config_to_json(const protocols::ProtocolConfig& cfg);
std::string sweep_config_to_json(const protocols::SweepConfig& cfg);

// Report serialization; field names mirror the structs one-to-one, complex
// numbers serialize as [re, im], and a version field is appended.
std::string report_to_json(const protocols::ProtocolReport& rep);
std::string rule_report_to_json(const graph::RuleReport& rep);
std::string approx_report_to_json(const protocols::ApproxReport& rep);
std::string oracle_check_to_json(const protocols::OracleCheck& chk);

// Optional request document for graph admissibility checks:
//   {"outputs": ["b1"], "pre_homodyne": ["c4"]}
// Unknown keys are rejected. Defaults: outputs empty (caller picks), no
// pre-homodyne steps.
void parse_validate_request(const std::string& text, std::vector<std::string>& outputs,
                            std::vector<std::string>& pre_homodyne);

// Full admissibility report: topology rules, family, the greedy measurement
// plan for the requested outputs (default: the lowest-id register vertex),
// and the induced rotation capability per output. A rule failure lands in the
// report; argument misuse (unknown output id, output not a register) throws.
// admissible, when given, receives the combined verdict.
std::string graph_report_json(const graph::GraphSpec& g, std::vector<std::string> outputs,
                              const std::vector<std::string>& pre_homodyne,
                              bool* admissible = nullptr);

// Shortest round-trip decimal form of v; locale-independent, so equal inputs
// give byte-equal artifacts.
std::string format_double(double v);

// CSV table with the pinned column order
//   protocol,N,L,theta,theta2,seed,q_outcome,x_outcome,prob_q,fidelity,marginal_std,status
// one row per run; multi-outcome cells join with ';'; absent values are empty
// cells. The first line is a '#' comment embedding the tool version and the
// effective config document passed by the caller.
std::string rows_to_csv(const std::vector<protocols::SweepRow>& rows,
                        const std::string& config_echo);

}  // namespace hmq::json_io
