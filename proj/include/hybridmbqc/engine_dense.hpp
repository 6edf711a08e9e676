#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hybridmbqc/cv.hpp"
#include "hybridmbqc/engine.hpp"
#include "hybridmbqc/errors.hpp"
#include "hybridmbqc/rng.hpp"
#include "hybridmbqc/spin.hpp"

namespace hmq::engine {

// Brute-force reference simulator holding the full joint tensor over every
// register's Fock space and every axis grid. Same operation set and sampling
// sequence as SymbolicEngine, so equal seeds give equal outcome streams.
class DenseEngine {
 public:
  explicit DenseEngine(std::uint64_t seed, std::size_t max_entries = (1u << 24));

  void add_cv_axis(const std::string& id, const cv::Wavefunction& psi);
  void add_bec(const std::string& id, const spin::CoherentParams& base);
  void apply_cz(const std::string& bec, const std::string& axis, double t);
  void apply_hadamard(const std::string& bec);

  BecOutcome measure_bec(const std::string& bec, double theta, double big_l,
                         spin::BasisVariant variant = spin::BasisVariant::x_basis,
                         std::optional<int> forced_q = std::nullopt);

  // Exact outcome distribution P(q) the next measure_bec call would sample
  // from; consumes no randomness and leaves the state untouched.
  std::vector<double> measurement_distribution(const std::string& bec, double theta, double big_l,
                                               spin::BasisVariant variant =
                                                   spin::BasisVariant::x_basis) const;
  HomodyneOutcome homodyne(const std::string& axis, OutcomeMode mode,
                           std::optional<double> target = std::nullopt);

  // Fock coefficients once a single register remains.
  std::vector<cplx> output_fock(const std::string& bec) const;

  std::vector<double> axis_density(const std::string& axis) const;
  const cv::GridSpec& axis_grid(const std::string& axis) const;

  struct Dim {
    std::string id;
    bool is_bec;
    int size;
    cv::GridSpec grid;   // valid when !is_bec
    int n_particles;     // valid when is_bec
  };

  const std::vector<Dim>& dims() const { return dims_; }
  const std::vector<cplx>& state() const { return state_; }
  std::vector<std::string> dim_ids() const;

 private:
  int dim_index(const std::string& id) const;
  std::size_t stride_after(int d) const;
  double cv_measure_except(int d) const;  // product of dx over CV dims, skipping d

  std::vector<Dim> dims_;
  std::vector<cplx> state_;
  std::size_t max_entries_;
  rng::Stream stream_;
};

// Joint tensor equivalent to the symbolic engine's current state, laid out in
// the given order (which must name exactly the live axes and registers).
std::vector<cplx> dense_snapshot(const SymbolicEngine& sym,
                                 const std::vector<std::string>& order);

// Largest componentwise deviation after aligning b's global phase to a's.
double max_diff_up_to_phase(const std::vector<cplx>& a, const std::vector<cplx>& b);

}  // namespace hmq::engine
