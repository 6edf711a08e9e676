#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hybridmbqc/engine.hpp"
#include "hybridmbqc/graph.hpp"
#include "hybridmbqc/spin.hpp"

namespace hmq::protocols {

using cplx = std::complex<double>;

enum class ProtocolKind { z_rotation, x_rotation, arbitrary };

std::string protocol_name(ProtocolKind k);
ProtocolKind protocol_from_name(const std::string& name);  // config error on unknown

std::string mode_name(engine::OutcomeMode m);
engine::OutcomeMode mode_from_name(const std::string& name);  // config error on unknown

// Measurement order for the two-angle protocol (left selector = theta side).
enum class MeasurementOrder { left_first, right_first };

struct EnvelopeSpec {
  std::optional<double> center;  // applies to every axis; default is per-axis angle
  std::optional<double> sigma;   // default L / (4*pi)
};

struct ProtocolConfig {
  ProtocolKind protocol = ProtocolKind::z_rotation;
  double theta = 0.0;
  std::optional<double> theta2;  // required by the two-angle protocol
  int n_particles = 1;
  double big_l = 500.0;
  EnvelopeSpec envelope;
  int n_points = 2048;  // grid resolution per axis
  // sample draws each outcome; postselect pins q = N/2 (central outcome).
  engine::OutcomeMode bec_outcome_mode = engine::OutcomeMode::sample;
  // sample | postselect (pins x = angle) | expectation (pins the marginal mean
  // and reports the fidelity averaged over the final marginal).
  engine::OutcomeMode homodyne_mode = engine::OutcomeMode::sample;
  MeasurementOrder order = MeasurementOrder::left_first;
  std::uint64_t seed = 0;
};

// Throws a config error naming the offending field.
void validate_config(const ProtocolConfig& cfg);

struct BecRecord {
  std::string vertex;
  double theta;                      // basis angle used
  int q;                             // recorded outcome
  double prob;                       // exact branch probability of that outcome
  std::vector<double> distribution;  // full outcome distribution, indices 0..N
  bool forced;                       // outcome pinned rather than sampled
};

struct HomodyneRecord {
  std::string axis;
  double x;        // pinned quadrature value
  double density;  // marginal density at x
  double mean;     // pre-measurement marginal mean
  double std_dev;  // pre-measurement marginal std (width statistic)
};

struct ProtocolReport {
  ProtocolConfig config;    // as passed
  double effective_sigma;   // envelope sigma after defaults
  std::vector<std::pair<std::string, double>> axis_centers;  // grid centers used
  std::vector<BecRecord> bec_records;
  std::vector<HomodyneRecord> homodyne_records;
  spin::CoherentParams output_raw;      // engine output, Hadamard frame included
  spin::CoherentParams output_logical;  // frame inverse applied to output_raw
  spin::CoherentParams target_raw;      // composition of the exact pinned maps
  std::optional<spin::CoherentParams> nominal_form;  // small-angle textbook form
  double fidelity;                       // |<target|output>|^2 on the mode pair
  double many_body_fidelity;             // fidelity^N: full-state overlap squared
  std::optional<double> nominal_fidelity;
  std::optional<double> avg_fidelity;    // expectation mode: integral p(x) F(x) dx
  double marginal_std;                   // last homodyne record's std_dev
  std::string status;                    // "ok" on success
};

// Three-vertex wire: output register, one axis, one selector measured at theta
// through the 2*pi/L coupling; the homodyne then pins the axis near theta and
// the output picks up the phase e^{-i x} on its b mode.
ProtocolReport run_z_rotation(const ProtocolConfig& cfg);

// Same wire with a Hadamard on the output after its coupling, so the pinned
// rotation acts in the Hadamard frame.
ProtocolReport run_x_rotation(const ProtocolConfig& cfg);

// Five-vertex sandwich: two selectors (theta, theta2), two axes, output in the
// middle with a Hadamard between its couplings; composes both pinned maps.
ProtocolReport run_arbitrary_rotation(const ProtocolConfig& cfg);

// Dispatches on cfg.protocol.
ProtocolReport run_protocol(const ProtocolConfig& cfg);

struct ApproxPoint {
  double x;          // probed axis value
  double exact;      // peak-normalized exact envelope (cos u - sin u)^N
  double surrogate;  // peak-normalized surrogate exp((-u - u^2/2) N)
  double rel_error;  // |surrogate/exact - 1|, computed in log space
};

struct ApproxReport {
  int n_particles;
  double big_l;
  double theta;
  std::vector<ApproxPoint> table;
  double fitted_width;         // Gaussian width of the exact envelope, x units
  double predicted_width;      // L / (pi sqrt(N)) reference scale
  double max_rel_error_valid;  // max rel_error where pi|x-theta|/L < 0.1
};

// Tabulates the exact selector-measurement envelope against its small-offset
// exponential surrogate, u = pi(x-theta)/L, and fits a log-quadratic to the
// exact envelope over the validity window |u| < 0.1. The fitted width shrinks
// as 1/sqrt(N): the envelope sharpens toward a delta pinning x to theta.
ApproxReport approx_diagnostics(const ProtocolConfig& cfg);

struct NominalFormPoint {
  double theta;
  double exact_angle;    // Bloch rotation of the exact output relative to theta=0
  double nominal_angle;  // same for the small-angle textbook form
  double fidelity;       // |<nominal|exact>|^2 on the mode pair
};

struct NominalFormReport {
  std::vector<NominalFormPoint> table;
  double argument_scale;  // least-squares slope exact_angle ~ scale*nominal_angle
};

// The exact Hadamard-frame output advances the Bloch angle at half the rate
// the textbook (cos theta, i sin theta) form suggests; reported, not asserted.
NominalFormReport nominal_form_comparison(int n_thetas = 41);

struct OracleCheck {
  ProtocolConfig config;
  std::vector<int> q_symbolic;     // selector outcomes, plan order
  std::vector<int> q_dense;
  std::vector<double> x_symbolic;  // homodyne outcomes, plan order
  std::vector<double> x_dense;
  double max_distribution_diff = 0.0;  // max |P_sym(q) - P_dense(q)| over selectors
  double max_state_diff = 0.0;  // max joint-state deviation up to global phase
  bool outcomes_match = false;  // equal q sequences and homodyne points
  std::string status;           // "ok" when both engines completed
};

// Runs the configured protocol on the layered engine and on the brute-force
// joint-tensor reference with identical seeds, comparing every measurement
// distribution and the joint state after each step up to global phase. The
// reference holds the full tensor, so keep n_particles and n_points small.
OracleCheck cross_check(const ProtocolConfig& cfg);

struct SweepConfig {
  ProtocolKind protocol = ProtocolKind::z_rotation;
  std::vector<int> n_list;
  std::vector<double> l_list;
  std::vector<double> theta_list;
  std::optional<double> theta2;  // fixed second angle for the two-angle protocol
  int runs_per_point = 1;
  engine::OutcomeMode bec_outcome_mode = engine::OutcomeMode::sample;
  engine::OutcomeMode homodyne_mode = engine::OutcomeMode::sample;
  int n_points = 2048;
  std::optional<double> sigma;
  std::uint64_t master_seed = 0;
  int max_threads = 0;  // 0 = hardware default; HYBRID_SIM_THREADS caps either way
};

struct SweepRow {
  std::string protocol;
  int n_particles = 0;
  double big_l = 0.0;
  double theta = 0.0;
  std::optional<double> theta2;
  std::uint64_t seed = 0;  // the row's own engine seed, derived from the master
  std::vector<int> q_outcomes;     // one per selector measurement, plan order
  std::vector<double> x_outcomes;  // one per homodyne, plan order
  std::vector<double> probs;       // branch probability per selector measurement
  std::optional<double> fidelity;
  std::optional<double> marginal_std;
  std::string status;  // "ok" or "error:<code>"
};

// Cartesian product over n_list x l_list x theta_list, runs_per_point rows per
// point. Row seeds derive from (master_seed, point index, run index), so equal
// configs produce identical tables regardless of thread schedule. A failing
// point tags its row's status and the sweep continues.
std::vector<SweepRow> sweep(const SweepConfig& cfg);

}  // namespace hmq::protocols
