#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hybridmbqc/cv.hpp"
#include "hybridmbqc/errors.hpp"
#include "hybridmbqc/rng.hpp"
#include "hybridmbqc/spin.hpp"

namespace hmq::engine {

using cplx = std::complex<double>;

enum class OutcomeMode { sample, postselect, expectation };

struct BecOutcome {
  int q;             // Fock outcome of the rotated measurement
  double prob;       // probability of that outcome branch
};

struct HomodyneOutcome {
  double x;          // pinned quadrature value (a grid point)
  double density;    // marginal probability density at x
  double mean;       // mean of the pre-measurement marginal
  double std_dev;    // std of the pre-measurement marginal
};

// State of one BEC register: base parameters plus the ordered gate trace.
// CZ couplings to a quadrature axis multiply beta by e^{-i x t}, so the
// parameters stay exactly evaluable once the referenced axes carry values.
struct GateStep {
  enum class Kind { cz, hadamard };
  Kind kind;
  std::string axis;  // cz target axis
  double t = 0.0;    // cz coupling time
};

// Lazy simulator for hybrid graph states. Because BEC-BEC and CV-CV couplings
// are inadmissible and a measured register may reference at most one live
// axis, the CV weight stays a product of per-axis 1-D fields; registers hold
// symbolic gate traces evaluated against pinned or live axis values.
class SymbolicEngine {
 public:
  explicit SymbolicEngine(std::uint64_t seed);

  void add_cv_axis(const std::string& id, const cv::Wavefunction& psi);
  void add_bec(const std::string& id, const spin::CoherentParams& base);
  void apply_cz(const std::string& bec, const std::string& axis, double t);
  void apply_hadamard(const std::string& bec);

  // Measures a register in the rotated basis; the outcome q is sampled from
  // its exact distribution unless forced_q pins it (no randomness consumed
  // then). Errors if the register still references two or more live axes
  // (rule R2 territory).
  BecOutcome measure_bec(const std::string& bec, double theta, double big_l,
                         spin::BasisVariant variant = spin::BasisVariant::x_basis,
                         std::optional<int> forced_q = std::nullopt);

  // Exact outcome distribution P(q) the next measure_bec call would sample
  // from; consumes no randomness and leaves the state untouched.
  std::vector<double> measurement_distribution(
      const std::string& bec, double theta, double big_l,
      spin::BasisVariant variant = spin::BasisVariant::x_basis) const;

  // Pins a quadrature axis. sample draws from the marginal, postselect pins
  // the grid point nearest to *target (required), expectation pins the point
  // nearest the marginal mean.
  HomodyneOutcome homodyne(const std::string& axis, OutcomeMode mode,
                           std::optional<double> target = std::nullopt);

  // Coherent parameters of a register whose trace is fully resolved
  // (references no live axis). Errors otherwise.
  spin::CoherentParams output_params(const std::string& bec) const;

  // Marginal position density of a live axis, normalized so sum * dx = 1.
  std::vector<double> axis_density(const std::string& axis) const;
  const cv::GridSpec& axis_grid(const std::string& axis) const;
  bool axis_live(const std::string& axis) const;

  // Names of live axes the register's trace references.
  std::vector<std::string> live_axes_of(const std::string& bec) const;

  // Accumulated scalar factor (phases of scalar amplitude updates and pinned
  // weight values); physical up to the usual global-phase freedom.
  cplx global_scale() const { return global_scale_; }

  struct Register {
    spin::CoherentParams base;
    std::vector<GateStep> trace;
  };
  struct Axis {
    cv::GridSpec grid;
    std::vector<cplx> weight;      // live: 1-D field, kept unit norm
    std::optional<double> pinned;  // set once homodyned
  };

  const std::map<std::string, Register>& registers() const { return registers_; }
  const std::map<std::string, Axis>& axes() const { return axes_; }

  // Evaluates a register's parameters with every referenced axis resolved:
  // pinned axes use their value, the axis named by live_axis uses live_value.
  spin::CoherentParams eval_params(const Register& reg,
                                   const std::string& live_axis = "",
                                   double live_value = 0.0) const;

 private:
  const Register& reg_at(const std::string& bec) const;
  const Axis& axis_at(const std::string& axis) const;

  std::map<std::string, Register> registers_;
  std::map<std::string, Axis> axes_;
  cplx global_scale_{1.0, 0.0};
  rng::Stream stream_;
};

}  // namespace hmq::engine
