#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hybridmbqc/errors.hpp"

namespace hmq::graph {

enum class VertexKind { B, C };

enum class HadamardPosition { before_cz, after_cz };

struct Vertex {
  std::string id;
  VertexKind kind;
};

struct Edge {
  std::string u;
  std::string v;
  double t;  // coupling time, already resolved (magic edges carry 2*pi/L)
};

struct HadamardMark {
  std::string vertex;
  HadamardPosition position;
};

// One step of the preparation program executed by the engine.
struct PrepStep {
  enum class Kind { cz, hadamard };
  Kind kind;
  std::string u, v;  // cz endpoints
  double t = 0.0;    // cz coupling time
  std::string vertex;  // hadamard target
};

struct GraphSpec {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<HadamardMark> hadamard_marks;
  std::optional<double> magic_l;
  // Explicit gate order; empty means the derived default (before_cz marks,
  // then edges in listed order, then after_cz marks). Orders interleaving a
  // Hadamard between two CZ couplings of the same vertex must be explicit.
  std::vector<PrepStep> prep_program;

  VertexKind kind_of(const std::string& id) const;
  bool has_hadamard(const std::string& id) const;
  std::vector<std::string> neighbors(const std::string& id) const;
};

// Validates structural invariants: unique ids, known endpoints, simple edges,
// t > 0, Hadamard marks on B vertices only. Throws on violation.
GraphSpec make_graph(std::vector<Vertex> vertices, std::vector<Edge> edges,
                     std::vector<HadamardMark> marks = {},
                     std::optional<double> magic_l = std::nullopt,
                     std::vector<PrepStep> prep = {});

// The effective gate order for a graph (explicit program or derived default).
std::vector<PrepStep> prep_program(const GraphSpec& g);

struct RuleViolation {
  std::string rule_id;  // R1, R2 or R3
  std::string witness;  // offending vertex or edge
  std::string message;
};

struct RuleReport {
  bool ok = true;
  std::vector<RuleViolation> violations;
};

// Admissibility of the graph itself: R1 (no same-kind edges), R3 (#C <= #B).
RuleReport validate_topology(const GraphSpec& g);

struct PlanStep {
  enum class Kind { measure_bec, homodyne };
  Kind kind;
  std::string vertex;
};

struct MeasurementPlan {
  std::vector<PlanStep> steps;
  std::vector<std::string> outputs;
};

// Stepwise simulation of the measurement flow (R2): every measured B must have
// exactly one live C neighbor, no live C may accumulate a second unresolved
// measured-B delta, every delta must be resolved by a homodyne, and homodynes
// that resolve no delta are only admitted as loop-opening steps before the
// first BEC measurement. Structural misuse of the plan throws; rule failures
// come back in the report.
RuleReport validate_plan(const GraphSpec& g, const MeasurementPlan& plan);

enum class GraphFamily { chain_1d, cluster_2d, ring, star, tree, complete, other };

std::string family_name(GraphFamily f);

// Topological family, checked in order: complete, ring, chain, star, tree,
// 2-D grid, other. Errors on a disconnected graph.
GraphFamily classify_family(const GraphSpec& g);

// Greedy measurement-flow search: measures every non-output B, homodyning the
// paired C right after each measurement; lowest vertex id first. Optional
// pre_homodyne steps consume C vertices up front (loop opening). Throws an
// ErrorCode::rule error naming the blocking rule when no plan exists.
MeasurementPlan plan_flow(const GraphSpec& g, const std::vector<std::string>& outputs,
                          const std::vector<std::string>& pre_homodyne = {});

enum class RotationCapability { none, single_axis, arbitrary };

std::string capability_name(RotationCapability c);

// What a valid plan can induce on one output vertex: arbitrary needs at least
// two homodyned C neighbors with a Hadamard mark on the output between the
// couplings; one homodyned neighbor gives single-axis rotations.
RotationCapability rotation_capability(const GraphSpec& g, const MeasurementPlan& plan,
                                       const std::string& output);

}  // namespace hmq::graph
