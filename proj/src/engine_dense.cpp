#include "hybridmbqc/engine_dense.hpp"

#include <algorithm>
#include <cmath>

namespace hmq::engine {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Basis kets are the columns of U = P H (or H P H), P = diag e^{-i phi n_b}.
Eigen::MatrixXcd measurement_basis(int n, double theta, double big_l,
                                   spin::BasisVariant variant) {
  const Eigen::MatrixXcd h = spin::hadamard_unitary(n);
  const double phi = 2.0 * kPi * theta / big_l - kPi / 2.0;
  Eigen::VectorXcd pdiag(n + 1);
  for (int k = 0; k <= n; ++k) pdiag(k) = std::polar(1.0, -phi * double(n - k));
  Eigen::MatrixXcd u = pdiag.asDiagonal() * h;
  if (variant == spin::BasisVariant::hadamard_basis) u = h * u;
  return u;
}

}  // namespace

DenseEngine::DenseEngine(std::uint64_t seed, std::size_t max_entries)
    : state_{cplx{1.0, 0.0}}, max_entries_(max_entries), stream_(seed) {}

int DenseEngine::dim_index(const std::string& id) const {
  for (std::size_t d = 0; d < dims_.size(); ++d)
    if (dims_[d].id == id) return static_cast<int>(d);
  throw Error(ErrorCode::invalid_argument, "unknown or already consumed id: " + id);
}

std::size_t DenseEngine::stride_after(int d) const {
  std::size_t s = 1;
  for (std::size_t k = static_cast<std::size_t>(d) + 1; k < dims_.size(); ++k)
    s *= static_cast<std::size_t>(dims_[k].size);
  return s;
}

double DenseEngine::cv_measure_except(int d) const {
  double m = 1.0;
  for (std::size_t k = 0; k < dims_.size(); ++k)
    if (!dims_[k].is_bec && static_cast<int>(k) != d) m *= dims_[k].grid.dx();
  return m;
}

void DenseEngine::add_cv_axis(const std::string& id, const cv::Wavefunction& psi) {
  for (const auto& d : dims_)
    if (d.id == id) throw Error(ErrorCode::invalid_argument, "duplicate engine id: " + id);
  if (static_cast<int>(psi.psi.size()) != psi.grid.n_points)
    throw Error(ErrorCode::invalid_argument, "wavefunction length does not match its grid");
  auto [unit, norm] = cv::normalize(psi);
  (void)norm;
  const std::size_t s = unit.psi.size();
  if (state_.size() * s > max_entries_)
    throw Error(ErrorCode::capacity, "dense state exceeds the entry budget");
  std::vector<cplx> next(state_.size() * s);
  for (std::size_t i = 0; i < state_.size(); ++i)
    for (std::size_t j = 0; j < s; ++j) next[i * s + j] = state_[i] * unit.psi[j];
  state_ = std::move(next);
  dims_.push_back({id, false, unit.grid.n_points, unit.grid, 0});
}

void DenseEngine::add_bec(const std::string& id, const spin::CoherentParams& base) {
  for (const auto& d : dims_)
    if (d.id == id) throw Error(ErrorCode::invalid_argument, "duplicate engine id: " + id);
  auto fock = spin::coherent_to_fock(spin::normalized(base));
  const std::size_t s = fock.size();
  if (state_.size() * s > max_entries_)
    throw Error(ErrorCode::capacity, "dense state exceeds the entry budget");
  std::vector<cplx> next(state_.size() * s);
  for (std::size_t i = 0; i < state_.size(); ++i)
    for (std::size_t j = 0; j < s; ++j) next[i * s + j] = state_[i] * fock[j];
  state_ = std::move(next);
  dims_.push_back({id, true, static_cast<int>(s), cv::GridSpec{}, base.n_particles});
}

void DenseEngine::apply_cz(const std::string& bec, const std::string& axis, double t) {
  int db = dim_index(bec), dc = dim_index(axis);
  if (!dims_[db].is_bec || dims_[dc].is_bec)
    throw Error(ErrorCode::invalid_argument, "cz needs a register and an axis");
  const std::size_t sb = stride_after(db), sc = stride_after(dc);
  const int nb = dims_[db].size, nc = dims_[dc].size;
  const int n = dims_[db].n_particles;
  // Phase e^{-i n_b x t} with n_b = N - k for Fock index k (the a-mode count).
  std::vector<cplx> phase(static_cast<std::size_t>(nb) * nc);
  for (int k = 0; k < nb; ++k)
    for (int j = 0; j < nc; ++j)
      phase[static_cast<std::size_t>(k) * nc + j] =
          std::polar(1.0, -(double(n - k)) * dims_[dc].grid.point(j) * t);
  for (std::size_t idx = 0; idx < state_.size(); ++idx) {
    int k = static_cast<int>((idx / sb) % static_cast<std::size_t>(nb));
    int j = static_cast<int>((idx / sc) % static_cast<std::size_t>(nc));
    state_[idx] *= phase[static_cast<std::size_t>(k) * nc + j];
  }
}

void DenseEngine::apply_hadamard(const std::string& bec) {
  int db = dim_index(bec);
  if (!dims_[db].is_bec)
    throw Error(ErrorCode::invalid_argument, "hadamard targets a register");
  const Eigen::MatrixXcd h = spin::hadamard_unitary(dims_[db].n_particles);
  const std::size_t st = stride_after(db);
  const int s = dims_[db].size;
  std::vector<cplx> buf(static_cast<std::size_t>(s));
  const std::size_t blocks = state_.size() / (static_cast<std::size_t>(s) * st);
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    const std::size_t base = blk * static_cast<std::size_t>(s) * st;
    for (std::size_t inner = 0; inner < st; ++inner) {
      for (int k = 0; k < s; ++k) buf[k] = state_[base + static_cast<std::size_t>(k) * st + inner];
      for (int k = 0; k < s; ++k) {
        cplx acc = 0.0;
        for (int k2 = 0; k2 < s; ++k2) acc += h(k, k2) * buf[k2];
        state_[base + static_cast<std::size_t>(k) * st + inner] = acc;
      }
    }
  }
}

BecOutcome DenseEngine::measure_bec(const std::string& bec, double theta, double big_l,
                                    spin::BasisVariant variant,
                                    std::optional<int> forced_q) {
  int db = dim_index(bec);
  if (!dims_[db].is_bec)
    throw Error(ErrorCode::invalid_argument, "measure_bec targets a register");
  const int n = dims_[db].n_particles;
  const int s = dims_[db].size;
  if (big_l < 2.0) throw Error(ErrorCode::invalid_argument, "L must be >= 2");
  if (forced_q && (*forced_q < 0 || *forced_q > n))
    throw Error(ErrorCode::invalid_argument, "forced outcome out of range");

  const Eigen::MatrixXcd u = measurement_basis(n, theta, big_l, variant);
  const std::size_t st = stride_after(db);
  const std::size_t rest = state_.size() / static_cast<std::size_t>(s);
  const double measure = cv_measure_except(-1);
  std::vector<std::vector<cplx>> branches(static_cast<std::size_t>(s),
                                          std::vector<cplx>(rest));
  std::vector<double> probs(static_cast<std::size_t>(s), 0.0);
  const std::size_t blocks = state_.size() / (static_cast<std::size_t>(s) * st);
  for (int q = 0; q < s; ++q) {
    auto& out = branches[static_cast<std::size_t>(q)];
    for (std::size_t blk = 0; blk < blocks; ++blk) {
      const std::size_t base = blk * static_cast<std::size_t>(s) * st;
      for (std::size_t inner = 0; inner < st; ++inner) {
        cplx acc = 0.0;
        for (int k = 0; k < s; ++k)
          acc += std::conj(u(k, q)) * state_[base + static_cast<std::size_t>(k) * st + inner];
        out[blk * st + inner] = acc;
        probs[static_cast<std::size_t>(q)] += std::norm(acc) * measure;
      }
    }
  }
  int q = forced_q ? *forced_q : stream_.sample_discrete(probs);
  double p = probs[static_cast<std::size_t>(q)];
  if (!(p > 0.0))
    throw Error(ErrorCode::numerical, "measurement branch of " + bec + " has zero weight");
  const double inv = 1.0 / std::sqrt(p);
  state_ = std::move(branches[static_cast<std::size_t>(q)]);
  for (auto& z : state_) z *= inv;
  dims_.erase(dims_.begin() + db);
  return {q, p};
}

std::vector<double> DenseEngine::measurement_distribution(const std::string& bec, double theta,
                                                          double big_l,
                                                          spin::BasisVariant variant) const {
  int db = dim_index(bec);
  if (!dims_[db].is_bec)
    throw Error(ErrorCode::invalid_argument, "measure_bec targets a register");
  const int n = dims_[db].n_particles;
  const int s = dims_[db].size;
  if (big_l < 2.0) throw Error(ErrorCode::invalid_argument, "L must be >= 2");

  const Eigen::MatrixXcd u = measurement_basis(n, theta, big_l, variant);
  const std::size_t st = stride_after(db);
  const double measure = cv_measure_except(-1);
  std::vector<double> probs(static_cast<std::size_t>(s), 0.0);
  const std::size_t blocks = state_.size() / (static_cast<std::size_t>(s) * st);
  for (int q = 0; q < s; ++q) {
    for (std::size_t blk = 0; blk < blocks; ++blk) {
      const std::size_t base = blk * static_cast<std::size_t>(s) * st;
      for (std::size_t inner = 0; inner < st; ++inner) {
        cplx acc = 0.0;
        for (int k = 0; k < s; ++k)
          acc += std::conj(u(k, q)) * state_[base + static_cast<std::size_t>(k) * st + inner];
        probs[static_cast<std::size_t>(q)] += std::norm(acc) * measure;
      }
    }
  }
  return probs;
}

HomodyneOutcome DenseEngine::homodyne(const std::string& axis, OutcomeMode mode,
                                      std::optional<double> target) {
  int dc = dim_index(axis);
  if (dims_[dc].is_bec) throw Error(ErrorCode::invalid_argument, "homodyne targets an axis");
  const cv::GridSpec grid = dims_[dc].grid;
  const int s = dims_[dc].size;
  const std::size_t st = stride_after(dc);
  const double other = cv_measure_except(dc);
  const double dx = grid.dx();

  std::vector<double> density(static_cast<std::size_t>(s), 0.0);
  const std::size_t blocks = state_.size() / (static_cast<std::size_t>(s) * st);
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    const std::size_t base = blk * static_cast<std::size_t>(s) * st;
    for (int j = 0; j < s; ++j)
      for (std::size_t inner = 0; inner < st; ++inner)
        density[static_cast<std::size_t>(j)] +=
            std::norm(state_[base + static_cast<std::size_t>(j) * st + inner]) * other;
  }
  double mean = cv::density_mean(grid, density);
  double stdev = cv::density_std(grid, density);

  int idx;
  switch (mode) {
    case OutcomeMode::sample: {
      std::vector<double> mass(density.size());
      for (std::size_t j = 0; j < mass.size(); ++j) mass[j] = density[j] * dx;
      idx = stream_.sample_discrete(mass);
      break;
    }
    case OutcomeMode::postselect:
      if (!target)
        throw Error(ErrorCode::invalid_argument, "postselect homodyne needs a target value");
      idx = cv::nearest_index(grid, *target);
      break;
    case OutcomeMode::expectation:
      idx = cv::nearest_index(grid, mean);
      break;
    default:
      throw Error(ErrorCode::invalid_argument, "unknown homodyne mode");
  }
  double dens = density[static_cast<std::size_t>(idx)];
  if (!(dens > 0.0))
    throw Error(ErrorCode::numerical, "homodyne of " + axis + " pinned a zero-density point");

  std::vector<cplx> next(state_.size() / static_cast<std::size_t>(s));
  const double inv = 1.0 / std::sqrt(dens);
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    const std::size_t base = blk * static_cast<std::size_t>(s) * st;
    for (std::size_t inner = 0; inner < st; ++inner)
      next[blk * st + inner] =
          state_[base + static_cast<std::size_t>(idx) * st + inner] * inv;
  }
  state_ = std::move(next);
  dims_.erase(dims_.begin() + dc);
  return {grid.point(idx), dens, mean, stdev};
}

std::vector<cplx> DenseEngine::output_fock(const std::string& bec) const {
  int db = dim_index(bec);
  if (dims_.size() != 1 || !dims_[db].is_bec)
    throw Error(ErrorCode::invalid_argument,
                "output_fock needs the register to be the only remaining dimension");
  return state_;
}

std::vector<double> DenseEngine::axis_density(const std::string& axis) const {
  int dc = dim_index(axis);
  if (dims_[dc].is_bec) throw Error(ErrorCode::invalid_argument, "axis_density targets an axis");
  const int s = dims_[dc].size;
  const std::size_t st = stride_after(dc);
  const double other = cv_measure_except(dc);
  std::vector<double> density(static_cast<std::size_t>(s), 0.0);
  const std::size_t blocks = state_.size() / (static_cast<std::size_t>(s) * st);
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    const std::size_t base = blk * static_cast<std::size_t>(s) * st;
    for (int j = 0; j < s; ++j)
      for (std::size_t inner = 0; inner < st; ++inner)
        density[static_cast<std::size_t>(j)] +=
            std::norm(state_[base + static_cast<std::size_t>(j) * st + inner]) * other;
  }
  return density;
}

const cv::GridSpec& DenseEngine::axis_grid(const std::string& axis) const {
  int dc = dim_index(axis);
  if (dims_[dc].is_bec) throw Error(ErrorCode::invalid_argument, "axis_grid targets an axis");
  return dims_[dc].grid;
}

std::vector<std::string> DenseEngine::dim_ids() const {
  std::vector<std::string> ids;
  for (const auto& d : dims_) ids.push_back(d.id);
  return ids;
}

std::vector<cplx> dense_snapshot(const SymbolicEngine& sym,
                                 const std::vector<std::string>& order) {
  struct Slot {
    bool is_bec;
    int size;
    const SymbolicEngine::Register* reg;
    const SymbolicEngine::Axis* axis;
    std::string id;
  };
  std::vector<Slot> slots;
  std::size_t total = 1;
  std::size_t live_axes = 0, live_regs = 0;
  for (const auto& id : order) {
    auto rit = sym.registers().find(id);
    if (rit != sym.registers().end()) {
      slots.push_back({true, rit->second.base.n_particles + 1, &rit->second, nullptr, id});
      ++live_regs;
    } else {
      auto ait = sym.axes().find(id);
      if (ait == sym.axes().end() || ait->second.pinned)
        throw Error(ErrorCode::invalid_argument, "snapshot order names unknown or pinned id: " + id);
      slots.push_back({false, ait->second.grid.n_points, nullptr, &ait->second, id});
      ++live_axes;
    }
    total *= static_cast<std::size_t>(slots.back().size);
  }
  if (live_regs != sym.registers().size())
    throw Error(ErrorCode::invalid_argument, "snapshot order must name every live register");
  std::size_t actual_live = 0;
  for (const auto& [id, ax] : sym.axes())
    if (!ax.pinned) ++actual_live;
  if (live_axes != actual_live)
    throw Error(ErrorCode::invalid_argument, "snapshot order must name every live axis");
  if (total > (1u << 24))
    throw Error(ErrorCode::capacity, "snapshot exceeds the entry budget");

  std::vector<cplx> out(total);
  std::vector<int> index(slots.size(), 0);
  std::vector<std::pair<std::string, double>> live_values;
  for (std::size_t flat = 0; flat < total; ++flat) {
    // Decode the multi-index (last slot fastest).
    std::size_t rem = flat;
    for (std::size_t d = slots.size(); d-- > 0;) {
      index[d] = static_cast<int>(rem % static_cast<std::size_t>(slots[d].size));
      rem /= static_cast<std::size_t>(slots[d].size);
    }
    cplx value = sym.global_scale();
    // Axis weights first; register coefficients need the axis values.
    for (std::size_t d = 0; d < slots.size(); ++d)
      if (!slots[d].is_bec) value *= slots[d].axis->weight[static_cast<std::size_t>(index[d])];
    for (std::size_t d = 0; d < slots.size() && value != cplx{0.0, 0.0}; ++d) {
      if (!slots[d].is_bec) continue;
      // Resolve the register against the current axis assignment.
      const auto& reg = *slots[d].reg;
      const Eigen::Matrix2cd h2 = spin::hadamard_mode_rotation();
      cplx a = reg.base.alpha, b = reg.base.beta;
      for (const auto& step : reg.trace) {
        if (step.kind == GateStep::Kind::hadamard) {
          cplx a2 = h2(0, 0) * a + h2(0, 1) * b, b2 = h2(1, 0) * a + h2(1, 1) * b;
          a = a2;
          b = b2;
          continue;
        }
        const auto& ax = sym.axes().at(step.axis);
        double x;
        if (ax.pinned) {
          x = *ax.pinned;
        } else {
          x = 0.0;
          bool found = false;
          for (std::size_t d2 = 0; d2 < slots.size(); ++d2)
            if (!slots[d2].is_bec && slots[d2].id == step.axis) {
              x = slots[d2].axis->grid.point(index[d2]);
              found = true;
              break;
            }
          if (!found)
            throw Error(ErrorCode::invalid_argument,
                        "register trace references an axis missing from the order");
        }
        b *= std::polar(1.0, -x * step.t);
      }
      value *= spin::fock_coefficient({a, b, reg.base.n_particles}, index[d]);
    }
    out[flat] = value;
  }
  return out;
}

double max_diff_up_to_phase(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::invalid_argument, "state sizes differ");
  std::size_t imax = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i]) > best) {
      best = std::abs(a[i]);
      imax = i;
    }
  cplx factor{1.0, 0.0};
  if (std::abs(b[imax]) > 0.0 && std::abs(a[imax]) > 0.0)
    factor = (a[imax] / std::abs(a[imax])) * (std::abs(b[imax]) / b[imax]);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - factor * b[i]));
  return worst;
}

}  // namespace hmq::engine
