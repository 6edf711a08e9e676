#include "hybridmbqc/graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace hmq::graph {

namespace {

std::map<std::string, VertexKind> kind_map(const GraphSpec& g) {
  std::map<std::string, VertexKind> m;
  for (const auto& v : g.vertices) m[v.id] = v.kind;
  return m;
}

std::map<std::string, std::vector<std::string>> adjacency(const GraphSpec& g) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& v : g.vertices) adj[v.id];
  for (const auto& e : g.edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  for (auto& [id, nbrs] : adj) std::sort(nbrs.begin(), nbrs.end());
  return adj;
}

std::string edge_name(const std::string& u, const std::string& v) {
  return u + "-" + v;
}

}  // namespace

VertexKind GraphSpec::kind_of(const std::string& id) const {
  for (const auto& v : vertices)
    if (v.id == id) return v.kind;
  throw Error(ErrorCode::invalid_argument, "unknown vertex id: " + id);
}

bool GraphSpec::has_hadamard(const std::string& id) const {
  for (const auto& m : hadamard_marks)
    if (m.vertex == id) return true;
  return false;
}

std::vector<std::string> GraphSpec::neighbors(const std::string& id) const {
  std::vector<std::string> out;
  for (const auto& e : edges) {
    if (e.u == id) out.push_back(e.v);
    if (e.v == id) out.push_back(e.u);
  }
  std::sort(out.begin(), out.end());
  return out;
}

GraphSpec make_graph(std::vector<Vertex> vertices, std::vector<Edge> edges,
                     std::vector<HadamardMark> marks, std::optional<double> magic_l,
                     std::vector<PrepStep> prep) {
  if (vertices.empty())
    throw Error(ErrorCode::invalid_argument, "graph needs at least one vertex");
  std::map<std::string, VertexKind> kinds;
  for (const auto& v : vertices) {
    if (v.id.empty()) throw Error(ErrorCode::invalid_argument, "empty vertex id");
    if (!kinds.emplace(v.id, v.kind).second)
      throw Error(ErrorCode::invalid_argument, "duplicate vertex id: " + v.id);
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : edges) {
    if (!kinds.count(e.u))
      throw Error(ErrorCode::invalid_argument, "edge references unknown vertex: " + e.u);
    if (!kinds.count(e.v))
      throw Error(ErrorCode::invalid_argument, "edge references unknown vertex: " + e.v);
    if (e.u == e.v)
      throw Error(ErrorCode::invalid_argument, "self-loop on vertex: " + e.u);
    auto key = std::minmax(e.u, e.v);
    if (!seen.insert(key).second)
      throw Error(ErrorCode::invalid_argument, "duplicate edge: " + edge_name(e.u, e.v));
    if (!(e.t > 0.0))
      throw Error(ErrorCode::invalid_argument,
                  "edge " + edge_name(e.u, e.v) + " needs coupling time > 0");
  }
  std::set<std::string> marked;
  for (const auto& m : marks) {
    auto it = kinds.find(m.vertex);
    if (it == kinds.end())
      throw Error(ErrorCode::invalid_argument, "hadamard mark on unknown vertex: " + m.vertex);
    if (it->second != VertexKind::B)
      throw Error(ErrorCode::invalid_argument,
                  "hadamard mark must sit on a BEC vertex: " + m.vertex);
    if (!marked.insert(m.vertex).second)
      throw Error(ErrorCode::invalid_argument, "duplicate hadamard mark on: " + m.vertex);
  }
  if (magic_l && !(*magic_l >= 2.0))
    throw Error(ErrorCode::invalid_argument, "magic_L must be >= 2");
  for (const auto& s : prep) {
    if (s.kind == PrepStep::Kind::cz) {
      if (!kinds.count(s.u) || !kinds.count(s.v))
        throw Error(ErrorCode::invalid_argument, "prep cz references unknown vertex");
      if (!seen.count(std::minmax(s.u, s.v)))
        throw Error(ErrorCode::invalid_argument,
                    "prep cz " + edge_name(s.u, s.v) + " has no matching edge");
    } else {
      if (!marked.count(s.vertex))
        throw Error(ErrorCode::invalid_argument,
                    "prep hadamard on " + s.vertex + " has no matching mark");
    }
  }
  GraphSpec g;
  g.vertices = std::move(vertices);
  g.edges = std::move(edges);
  g.hadamard_marks = std::move(marks);
  g.magic_l = magic_l;
  g.prep_program = std::move(prep);
  return g;
}

std::vector<PrepStep> prep_program(const GraphSpec& g) {
  if (!g.prep_program.empty()) return g.prep_program;
  std::vector<PrepStep> steps;
  for (const auto& m : g.hadamard_marks)
    if (m.position == HadamardPosition::before_cz)
      steps.push_back({PrepStep::Kind::hadamard, "", "", 0.0, m.vertex});
  for (const auto& e : g.edges) steps.push_back({PrepStep::Kind::cz, e.u, e.v, e.t, ""});
  for (const auto& m : g.hadamard_marks)
    if (m.position == HadamardPosition::after_cz)
      steps.push_back({PrepStep::Kind::hadamard, "", "", 0.0, m.vertex});
  return steps;
}

RuleReport validate_topology(const GraphSpec& g) {
  RuleReport report;
  auto kinds = kind_map(g);
  for (const auto& e : g.edges) {
    if (kinds.at(e.u) == kinds.at(e.v)) {
      const char* k = kinds.at(e.u) == VertexKind::B ? "BEC" : "CV";
      report.violations.push_back(
          {"R1", edge_name(e.u, e.v),
           std::string("edge joins two ") + k + " vertices; couplings must pair a BEC with a CV mode"});
    }
  }
  std::size_t n_b = 0, n_c = 0;
  for (const auto& v : g.vertices) (v.kind == VertexKind::B ? n_b : n_c)++;
  if (n_c > n_b) {
    std::ostringstream msg;
    msg << "graph has " << n_c << " CV vertices but only " << n_b
        << " BEC vertices; every CV axis needs a BEC measurement to consume it";
    report.violations.push_back({"R3", "graph", msg.str()});
  }
  report.ok = report.violations.empty();
  return report;
}

RuleReport validate_plan(const GraphSpec& g, const MeasurementPlan& plan) {
  auto kinds = kind_map(g);
  auto adj = adjacency(g);
  std::set<std::string> used;
  std::set<std::string> outputs(plan.outputs.begin(), plan.outputs.end());
  for (const auto& o : plan.outputs) {
    if (!kinds.count(o))
      throw Error(ErrorCode::invalid_argument, "plan output references unknown vertex: " + o);
    if (kinds.at(o) != VertexKind::B)
      throw Error(ErrorCode::invalid_argument, "plan output must be a BEC vertex: " + o);
  }
  for (const auto& s : plan.steps) {
    if (!kinds.count(s.vertex))
      throw Error(ErrorCode::invalid_argument, "plan step references unknown vertex: " + s.vertex);
    if (s.kind == PlanStep::Kind::measure_bec && kinds.at(s.vertex) != VertexKind::B)
      throw Error(ErrorCode::invalid_argument, "measure_bec targets a CV vertex: " + s.vertex);
    if (s.kind == PlanStep::Kind::homodyne && kinds.at(s.vertex) != VertexKind::C)
      throw Error(ErrorCode::invalid_argument, "homodyne targets a BEC vertex: " + s.vertex);
    if (!used.insert(s.vertex).second)
      throw Error(ErrorCode::invalid_argument, "vertex appears in two plan steps: " + s.vertex);
    if (outputs.count(s.vertex))
      throw Error(ErrorCode::invalid_argument, "output vertex appears in a plan step: " + s.vertex);
  }

  RuleReport report;
  std::set<std::string> dead;           // homodyned C vertices
  std::map<std::string, int> pending;   // unresolved measured-B deltas per live C
  std::size_t measured = 0, resolving = 0;
  bool any_measured = false;
  for (const auto& s : plan.steps) {
    if (s.kind == PlanStep::Kind::measure_bec) {
      std::vector<std::string> live;
      for (const auto& nb : adj.at(s.vertex))
        if (kinds.at(nb) == VertexKind::C && !dead.count(nb)) live.push_back(nb);
      if (live.size() != 1) {
        std::ostringstream msg;
        msg << "measuring " << s.vertex << " requires exactly one live CV neighbor, found "
            << live.size();
        report.violations.push_back({"R2", s.vertex, msg.str()});
        any_measured = true;
        ++measured;
        continue;
      }
      int& p = pending[live.front()];
      if (p >= 1)
        report.violations.push_back(
            {"R2", live.front(),
             "CV vertex " + live.front() +
                 " accumulates a second measured-BEC delta before being homodyned"});
      ++p;
      ++measured;
      any_measured = true;
    } else {
      int p = pending.count(s.vertex) ? pending[s.vertex] : 0;
      if (p == 0 && any_measured)
        report.violations.push_back(
            {"R2", s.vertex,
             "homodyne of " + s.vertex +
                 " resolves no measured-BEC delta; loop-opening homodynes must precede the "
                 "first BEC measurement"});
      if (p >= 1) ++resolving;
      pending.erase(s.vertex);
      dead.insert(s.vertex);
    }
  }
  for (const auto& [c, p] : pending) {
    if (p >= 1)
      report.violations.push_back(
          {"R2", c, "CV vertex " + c + " holds an unresolved measured-BEC delta at plan end"});
  }
  if (measured != resolving) {
    std::ostringstream msg;
    msg << "plan measures " << measured << " BEC vertices but homodynes resolve " << resolving
        << " deltas; the counts must match at plan end";
    report.violations.push_back({"R2", "plan", msg.str()});
  }
  report.ok = report.violations.empty();
  return report;
}

std::string family_name(GraphFamily f) {
  switch (f) {
    case GraphFamily::chain_1d: return "chain_1d";
    case GraphFamily::cluster_2d: return "cluster_2d";
    case GraphFamily::ring: return "ring";
    case GraphFamily::star: return "star";
    case GraphFamily::tree: return "tree";
    case GraphFamily::complete: return "complete";
    case GraphFamily::other: return "other";
  }
  return "other";
}

namespace {

// Recognize a full m x n grid (m, n >= 2, at least one side >= 3; the 2 x 2
// case is a 4-cycle and classified as a ring before we get here). Coordinates
// are grown outward from a degree-2 corner; each vertex is placed either by
// the two-parent cross rule or by extending a boundary row/column.
bool is_grid_2d(const std::map<std::string, std::vector<std::string>>& adj) {
  const std::size_t n = adj.size();
  if (n < 6) return false;
  std::vector<std::string> corners;
  for (const auto& [id, nbrs] : adj) {
    if (nbrs.size() < 2 || nbrs.size() > 4) return false;
    if (nbrs.size() == 2) corners.push_back(id);
  }
  if (corners.size() != 4) return false;
  std::sort(corners.begin(), corners.end());
  const std::string& origin = corners.front();

  // BFS distance layers from the corner.
  std::map<std::string, int> dist;
  std::deque<std::string> queue{origin};
  dist[origin] = 0;
  std::vector<std::vector<std::string>> layers{{origin}};
  while (!queue.empty()) {
    auto cur = queue.front();
    queue.pop_front();
    for (const auto& nb : adj.at(cur)) {
      if (dist.count(nb)) continue;
      dist[nb] = dist[cur] + 1;
      if (static_cast<int>(layers.size()) <= dist[nb]) layers.emplace_back();
      layers[dist[nb]].push_back(nb);
      queue.push_back(nb);
    }
  }
  if (dist.size() != n) return false;

  using Coord = std::pair<int, int>;
  std::map<std::string, Coord> coord;
  std::map<Coord, std::string> at;
  auto place = [&](const std::string& id, Coord c) {
    coord[id] = c;
    at[c] = id;
  };
  place(origin, {0, 0});
  const auto& first = adj.at(origin);
  if (first.size() != 2) return false;
  place(first[0], {1, 0});
  place(first[1], {0, 1});
  for (std::size_t d = 2; d < layers.size(); ++d) {
    auto layer = layers[d];
    std::sort(layer.begin(), layer.end());
    for (const auto& id : layer) {
      std::vector<Coord> parents;
      for (const auto& nb : adj.at(id))
        if (dist.at(nb) == static_cast<int>(d) - 1) {
          if (!coord.count(nb)) return false;
          parents.push_back(coord.at(nb));
        }
      Coord c;
      if (parents.size() == 2) {
        auto [a, b] = std::minmax(parents[0], parents[1]);
        if (a.first + 1 != b.first || b.second + 1 != a.second) return false;
        c = {b.first, a.second};  // cross completion of an L-shaped parent pair
      } else if (parents.size() == 1) {
        Coord p = parents[0];
        if (p.second == 0 && p.first > 0)
          c = {p.first + 1, 0};
        else if (p.first == 0 && p.second > 0)
          c = {0, p.second + 1};
        else
          return false;
      } else {
        return false;
      }
      if (at.count(c)) return false;
      place(id, c);
    }
  }

  int max_x = 0, max_y = 0;
  for (const auto& [id, c] : coord) {
    if (c.first < 0 || c.second < 0) return false;
    max_x = std::max(max_x, c.first);
    max_y = std::max(max_y, c.second);
  }
  const std::size_t m_x = static_cast<std::size_t>(max_x) + 1;
  const std::size_t m_y = static_cast<std::size_t>(max_y) + 1;
  if (m_x < 2 || m_y < 2 || m_x * m_y != n) return false;
  // Every grid edge must be present and every present edge must be a grid edge.
  std::size_t edge_count = 0;
  for (const auto& [id, nbrs] : adj) {
    Coord c = coord.at(id);
    for (const auto& nb : nbrs) {
      Coord d2 = coord.at(nb);
      if (std::abs(c.first - d2.first) + std::abs(c.second - d2.second) != 1) return false;
    }
    edge_count += nbrs.size();
  }
  return edge_count / 2 == 2 * m_x * m_y - m_x - m_y;
}

}  // namespace

GraphFamily classify_family(const GraphSpec& g) {
  auto adj = adjacency(g);
  const std::size_t n = g.vertices.size();

  std::set<std::string> seen;
  std::deque<std::string> queue{g.vertices.front().id};
  seen.insert(g.vertices.front().id);
  while (!queue.empty()) {
    auto cur = queue.front();
    queue.pop_front();
    for (const auto& nb : adj.at(cur))
      if (seen.insert(nb).second) queue.push_back(nb);
  }
  if (seen.size() != n)
    throw Error(ErrorCode::invalid_argument, "cannot classify a disconnected graph");

  std::map<std::size_t, std::size_t> deg_hist;
  for (const auto& [id, nbrs] : adj) deg_hist[nbrs.size()]++;
  const std::size_t n_edges = g.edges.size();

  if (n >= 3 && n_edges == n * (n - 1) / 2) return GraphFamily::complete;
  if (n >= 3 && deg_hist.size() == 1 && deg_hist.count(2)) return GraphFamily::ring;
  if (n == 1 || (deg_hist[1] == 2 && deg_hist[1] + deg_hist[2] == n))
    return GraphFamily::chain_1d;
  if (n >= 4 && deg_hist[1] == n - 1 && deg_hist[n - 1] == 1) return GraphFamily::star;
  if (n_edges == n - 1) return GraphFamily::tree;
  if (is_grid_2d(adj)) return GraphFamily::cluster_2d;
  return GraphFamily::other;
}

MeasurementPlan plan_flow(const GraphSpec& g, const std::vector<std::string>& outputs,
                          const std::vector<std::string>& pre_homodyne) {
  auto topo = validate_topology(g);
  if (!topo.ok)
    throw Error(ErrorCode::rule, "graph fails " + topo.violations.front().rule_id + ": " +
                                     topo.violations.front().message);
  if (outputs.empty())
    throw Error(ErrorCode::invalid_argument, "plan_flow needs at least one output vertex");
  auto kinds = kind_map(g);
  auto adj = adjacency(g);
  std::set<std::string> output_set;
  for (const auto& o : outputs) {
    if (!kinds.count(o))
      throw Error(ErrorCode::invalid_argument, "unknown output vertex: " + o);
    if (kinds.at(o) != VertexKind::B)
      throw Error(ErrorCode::invalid_argument, "output must be a BEC vertex: " + o);
    if (!output_set.insert(o).second)
      throw Error(ErrorCode::invalid_argument, "duplicate output vertex: " + o);
  }

  MeasurementPlan plan;
  plan.outputs = outputs;
  std::set<std::string> dead;
  for (const auto& c : pre_homodyne) {
    if (!kinds.count(c)) throw Error(ErrorCode::invalid_argument, "unknown vertex: " + c);
    if (kinds.at(c) != VertexKind::C)
      throw Error(ErrorCode::invalid_argument, "pre-homodyne target must be a CV vertex: " + c);
    if (!dead.insert(c).second)
      throw Error(ErrorCode::invalid_argument, "duplicate pre-homodyne vertex: " + c);
    plan.steps.push_back({PlanStep::Kind::homodyne, c});
  }

  std::set<std::string> todo;
  for (const auto& v : g.vertices)
    if (v.kind == VertexKind::B && !output_set.count(v.id)) todo.insert(v.id);

  auto live_c = [&](const std::string& b) {
    std::vector<std::string> live;
    for (const auto& nb : adj.at(b))
      if (kinds.at(nb) == VertexKind::C && !dead.count(nb)) live.push_back(nb);
    return live;
  };

  while (!todo.empty()) {
    bool advanced = false;
    for (const auto& b : todo) {  // set iteration = lowest id first
      auto live = live_c(b);
      if (live.size() != 1) continue;
      plan.steps.push_back({PlanStep::Kind::measure_bec, b});
      plan.steps.push_back({PlanStep::Kind::homodyne, live.front()});
      dead.insert(live.front());
      todo.erase(b);
      advanced = true;
      break;
    }
    if (!advanced) {
      bool all_two_plus = true;
      for (const auto& b : todo)
        if (live_c(b).size() < 2) all_two_plus = false;
      std::ostringstream msg;
      msg << "no valid measurement order exists (rule R2): ";
      if (all_two_plus)
        msg << "every remaining BEC vertex touches two or more live CV axes";
      else
        msg << "some remaining BEC vertex has no live CV axis left";
      bool ring_like = false;
      try {
        ring_like = classify_family(g) == GraphFamily::ring;
      } catch (const Error&) {
      }
      if (ring_like)
        msg << "; a ring needs a prior CV homodyne to open the loop "
               "(pass it as a pre-homodyne step)";
      throw Error(ErrorCode::rule, msg.str());
    }
  }

  auto check = validate_plan(g, plan);
  if (!check.ok)
    throw Error(ErrorCode::rule,
                "plan_flow produced an invalid plan: " + check.violations.front().message);
  return plan;
}

std::string capability_name(RotationCapability c) {
  switch (c) {
    case RotationCapability::none: return "none";
    case RotationCapability::single_axis: return "single_axis";
    case RotationCapability::arbitrary: return "arbitrary";
  }
  return "none";
}

RotationCapability rotation_capability(const GraphSpec& g, const MeasurementPlan& plan,
                                       const std::string& output) {
  if (g.kind_of(output) != VertexKind::B)
    throw Error(ErrorCode::invalid_argument, "capability target must be a BEC vertex: " + output);
  std::set<std::string> homodyned;
  for (const auto& s : plan.steps)
    if (s.kind == PlanStep::Kind::homodyne) homodyned.insert(s.vertex);
  std::size_t rotating = 0;
  for (const auto& nb : g.neighbors(output))
    if (g.kind_of(nb) == VertexKind::C && homodyned.count(nb)) ++rotating;
  if (rotating >= 2 && g.has_hadamard(output)) return RotationCapability::arbitrary;
  if (rotating >= 1) return RotationCapability::single_axis;
  return RotationCapability::none;
}

}  // namespace hmq::graph
