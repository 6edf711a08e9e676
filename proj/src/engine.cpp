#include "hybridmbqc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hmq::engine {

SymbolicEngine::SymbolicEngine(std::uint64_t seed) : stream_(seed) {}

void SymbolicEngine::add_cv_axis(const std::string& id, const cv::Wavefunction& psi) {
  if (axes_.count(id) || registers_.count(id))
    throw Error(ErrorCode::invalid_argument, "duplicate engine id: " + id);
  if (static_cast<int>(psi.psi.size()) != psi.grid.n_points)
    throw Error(ErrorCode::invalid_argument, "wavefunction length does not match its grid");
  auto [unit, norm] = cv::normalize(psi);
  (void)norm;
  axes_[id] = Axis{unit.grid, std::move(unit.psi), std::nullopt};
}

void SymbolicEngine::add_bec(const std::string& id, const spin::CoherentParams& base) {
  if (axes_.count(id) || registers_.count(id))
    throw Error(ErrorCode::invalid_argument, "duplicate engine id: " + id);
  registers_[id] = Register{spin::normalized(base), {}};
}

const SymbolicEngine::Register& SymbolicEngine::reg_at(const std::string& bec) const {
  auto it = registers_.find(bec);
  if (it == registers_.end())
    throw Error(ErrorCode::invalid_argument, "unknown or already measured register: " + bec);
  return it->second;
}

const SymbolicEngine::Axis& SymbolicEngine::axis_at(const std::string& axis) const {
  auto it = axes_.find(axis);
  if (it == axes_.end()) throw Error(ErrorCode::invalid_argument, "unknown axis: " + axis);
  return it->second;
}

void SymbolicEngine::apply_cz(const std::string& bec, const std::string& axis, double t) {
  reg_at(bec);
  axis_at(axis);
  registers_[bec].trace.push_back({GateStep::Kind::cz, axis, t});
}

void SymbolicEngine::apply_hadamard(const std::string& bec) {
  reg_at(bec);
  registers_[bec].trace.push_back({GateStep::Kind::hadamard, "", 0.0});
}

spin::CoherentParams SymbolicEngine::eval_params(const Register& reg,
                                                 const std::string& live_axis,
                                                 double live_value) const {
  const Eigen::Matrix2cd h2 = spin::hadamard_mode_rotation();
  cplx a = reg.base.alpha, b = reg.base.beta;
  for (const auto& step : reg.trace) {
    if (step.kind == GateStep::Kind::hadamard) {
      cplx a2 = h2(0, 0) * a + h2(0, 1) * b, b2 = h2(1, 0) * a + h2(1, 1) * b;
      a = a2;
      b = b2;
      continue;
    }
    const Axis& ax = axis_at(step.axis);
    double x;
    if (ax.pinned) {
      x = *ax.pinned;
    } else if (step.axis == live_axis) {
      x = live_value;
    } else {
      throw Error(ErrorCode::invalid_argument,
                  "register trace references unresolved axis: " + step.axis);
    }
    b *= std::polar(1.0, -x * step.t);
  }
  return {a, b, reg.base.n_particles};
}

std::vector<std::string> SymbolicEngine::live_axes_of(const std::string& bec) const {
  std::set<std::string> live;
  for (const auto& step : reg_at(bec).trace)
    if (step.kind == GateStep::Kind::cz && !axis_at(step.axis).pinned) live.insert(step.axis);
  return {live.begin(), live.end()};
}

std::vector<double> SymbolicEngine::measurement_distribution(const std::string& bec, double theta,
                                                             double big_l,
                                                             spin::BasisVariant variant) const {
  const Register& reg = reg_at(bec);
  auto live = live_axes_of(bec);
  if (live.size() >= 2)
    throw Error(ErrorCode::rule, "register " + bec + " references " +
                                     std::to_string(live.size()) +
                                     " live CV axes; measuring it would break rule R2");
  const int n = reg.base.n_particles;
  spin::MeasurementBasisSpec spec{0, theta, big_l, n, variant};

  if (live.empty()) {
    auto fock = spin::coherent_to_fock(spin::basis_rotated_params(spec, eval_params(reg)));
    std::vector<double> probs(fock.size());
    for (std::size_t k = 0; k < fock.size(); ++k) probs[k] = std::norm(fock[k]);
    return probs;
  }

  // P(q) = sum_x |w(x)|^2 dx * Binom(n, r(x))(q), with r the rotated |alpha|^2.
  const Axis& ax = axis_at(live.front());
  const double dx = ax.grid.dx();
  std::vector<double> probs(static_cast<std::size_t>(n) + 1, 0.0);
  for (int i = 0; i < ax.grid.n_points; ++i) {
    double wx = std::norm(ax.weight[static_cast<std::size_t>(i)]) * dx;
    if (wx == 0.0) continue;
    auto rot = spin::basis_rotated_params(spec, eval_params(reg, live.front(), ax.grid.point(i)));
    auto row = spin::binomial_pmf_row(n, std::norm(rot.alpha));
    for (std::size_t k = 0; k < probs.size(); ++k) probs[k] += wx * row[k];
  }
  return probs;
}

BecOutcome SymbolicEngine::measure_bec(const std::string& bec, double theta, double big_l,
                                       spin::BasisVariant variant,
                                       std::optional<int> forced_q) {
  const Register reg = reg_at(bec);
  auto live = live_axes_of(bec);
  if (live.size() >= 2)
    throw Error(ErrorCode::rule, "register " + bec + " references " +
                                     std::to_string(live.size()) +
                                     " live CV axes; measuring it would break rule R2");
  const int n = reg.base.n_particles;
  if (forced_q && (*forced_q < 0 || *forced_q > n))
    throw Error(ErrorCode::invalid_argument, "forced outcome out of range");
  spin::MeasurementBasisSpec spec{0, theta, big_l, n, variant};

  if (live.empty()) {
    spin::CoherentParams rotated = spin::basis_rotated_params(spec, eval_params(reg));
    auto fock = spin::coherent_to_fock(rotated);
    std::vector<double> probs(fock.size());
    for (std::size_t k = 0; k < fock.size(); ++k) probs[k] = std::norm(fock[k]);
    int q = forced_q ? *forced_q : stream_.sample_discrete(probs);
    double p = probs[static_cast<std::size_t>(q)];
    if (!(p > 0.0))
      throw Error(ErrorCode::numerical, "measurement branch of " + bec + " has zero weight");
    // The branch amplitude is a scalar: track its phase, drop the register.
    global_scale_ *= fock[static_cast<std::size_t>(q)] / std::sqrt(p);
    registers_.erase(bec);
    return {q, p};
  }

  const std::string& axis_id = live.front();
  Axis& ax = axes_[axis_id];
  const double dx = ax.grid.dx();
  const int n_pts = ax.grid.n_points;

  std::vector<spin::CoherentParams> rotated;
  rotated.reserve(static_cast<std::size_t>(n_pts));
  for (int i = 0; i < n_pts; ++i)
    rotated.push_back(
        spin::basis_rotated_params(spec, eval_params(reg, axis_id, ax.grid.point(i))));

  int q;
  if (forced_q) {
    q = *forced_q;
  } else {
    std::vector<double> probs(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = 0; i < n_pts; ++i) {
      double wx = std::norm(ax.weight[static_cast<std::size_t>(i)]) * dx;
      if (wx == 0.0) continue;
      auto row = spin::binomial_pmf_row(n, std::norm(rotated[static_cast<std::size_t>(i)].alpha));
      for (std::size_t k = 0; k < probs.size(); ++k) probs[k] += wx * row[k];
    }
    q = stream_.sample_discrete(probs);
  }
  spec.q = q;

  // Collapse: w(x) <- w(x) A_q(x), renormalized; exact branch probability is
  // the norm that gets divided out.
  double norm2 = 0.0;
  for (int i = 0; i < n_pts; ++i) {
    cplx amp = spin::fock_coefficient(rotated[static_cast<std::size_t>(i)], q);
    ax.weight[static_cast<std::size_t>(i)] *= amp;
    norm2 += std::norm(ax.weight[static_cast<std::size_t>(i)]) * dx;
  }
  if (!(norm2 > 0.0))
    throw Error(ErrorCode::numerical, "measurement branch of " + bec + " has zero weight");
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& w : ax.weight) w *= inv;
  registers_.erase(bec);
  return {q, norm2};
}

HomodyneOutcome SymbolicEngine::homodyne(const std::string& axis, OutcomeMode mode,
                                         std::optional<double> target) {
  const Axis& ax = axis_at(axis);
  if (ax.pinned) throw Error(ErrorCode::invalid_argument, "axis already homodyned: " + axis);
  const double dx = ax.grid.dx();

  std::vector<double> density(ax.weight.size());
  std::vector<double> mass(ax.weight.size());
  for (std::size_t i = 0; i < ax.weight.size(); ++i) {
    density[i] = std::norm(ax.weight[i]);
    mass[i] = density[i] * dx;
  }
  double mean = cv::density_mean(ax.grid, density);
  double stdev = cv::density_std(ax.grid, density);

  int idx;
  switch (mode) {
    case OutcomeMode::sample:
      idx = stream_.sample_discrete(mass);
      break;
    case OutcomeMode::postselect:
      if (!target)
        throw Error(ErrorCode::invalid_argument, "postselect homodyne needs a target value");
      idx = cv::nearest_index(ax.grid, *target);
      break;
    case OutcomeMode::expectation:
      idx = cv::nearest_index(ax.grid, mean);
      break;
    default:
      throw Error(ErrorCode::invalid_argument, "unknown homodyne mode");
  }

  HomodyneOutcome out{ax.grid.point(idx), density[static_cast<std::size_t>(idx)], mean, stdev};
  if (!(out.density > 0.0))
    throw Error(ErrorCode::numerical, "homodyne of " + axis + " pinned a zero-density point");
  // Collapse the 1-D field to the pinned point; its phase is a physical factor.
  cplx w = ax.weight[static_cast<std::size_t>(idx)];
  global_scale_ *= w / std::abs(w);
  axes_[axis].weight.clear();
  axes_[axis].pinned = out.x;
  return out;
}

spin::CoherentParams SymbolicEngine::output_params(const std::string& bec) const {
  auto live = live_axes_of(bec);
  if (!live.empty())
    throw Error(ErrorCode::invalid_argument,
                "register " + bec + " still references a live axis: " + live.front());
  return eval_params(reg_at(bec));
}

std::vector<double> SymbolicEngine::axis_density(const std::string& axis) const {
  const Axis& ax = axis_at(axis);
  if (ax.pinned) throw Error(ErrorCode::invalid_argument, "axis already homodyned: " + axis);
  std::vector<double> density(ax.weight.size());
  for (std::size_t i = 0; i < ax.weight.size(); ++i) density[i] = std::norm(ax.weight[i]);
  return density;
}

const cv::GridSpec& SymbolicEngine::axis_grid(const std::string& axis) const {
  return axis_at(axis).grid;
}

bool SymbolicEngine::axis_live(const std::string& axis) const {
  return !axis_at(axis).pinned.has_value();
}

}  // namespace hmq::engine
