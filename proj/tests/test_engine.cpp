#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "hybridmbqc/cv.hpp"
#include "hybridmbqc/engine.hpp"
#include "hybridmbqc/engine_dense.hpp"
#include "hybridmbqc/errors.hpp"
#include "hybridmbqc/spin.hpp"

using namespace hmq;
using engine::cplx;
using engine::DenseEngine;
using engine::OutcomeMode;
using engine::SymbolicEngine;

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

spin::CoherentParams equator(int n) { return {{kInvSqrt2, 0.0}, {kInvSqrt2, 0.0}, n}; }

cv::Wavefunction theta_gaussian(double theta, double sigma, int n_points) {
  auto grid = cv::centered_grid(theta, sigma, n_points);
  return cv::gaussian_wavefunction(grid, theta, sigma);
}

// Sets up the single-rotation wire b1 - c2 - b3 on either engine: the output
// register couples at t = 1, the measured selector at the magic time 2*pi/L.
template <class Engine>
void prepare_wire(Engine& eng, int n, double big_l, double theta, double sigma, int n_points) {
  eng.add_bec("b1", equator(n));
  eng.add_cv_axis("c2", theta_gaussian(theta, sigma, n_points));
  eng.add_bec("b3", equator(n));
  eng.apply_cz("b1", "c2", 1.0);
  eng.apply_cz("b3", "c2", 2.0 * kPi / big_l);
}

// Two-rotation sandwich: output b2 sits between the two axes with a Hadamard
// between its couplings; b1 and b3 are the magic-coupled selectors.
template <class Engine>
void prepare_sandwich(Engine& eng, int n, double big_l, double theta1, double theta2,
                      double sigma, int n_points) {
  eng.add_bec("b1", equator(n));
  eng.add_cv_axis("c1", theta_gaussian(theta1, sigma, n_points));
  eng.add_bec("b2", equator(n));
  eng.add_cv_axis("c2", theta_gaussian(theta2, sigma, n_points));
  eng.add_bec("b3", equator(n));
  eng.apply_cz("b1", "c1", 2.0 * kPi / big_l);
  eng.apply_cz("b2", "c1", 1.0);
  eng.apply_hadamard("b2");
  eng.apply_cz("b2", "c2", 1.0);
  eng.apply_cz("b3", "c2", 2.0 * kPi / big_l);
}

std::vector<cplx> scaled_fock(const SymbolicEngine& eng, const std::string& id) {
  auto f = spin::coherent_to_fock(eng.output_params(id));
  for (auto& z : f) z *= eng.global_scale();
  return f;
}

template <class T>
double max_diff(const std::vector<T>& a, const std::vector<T>& b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace

TEST_CASE("isolated register measurement has binomial statistics") {
  const int n = 4;
  SymbolicEngine sym(11);
  DenseEngine den(11);
  sym.add_bec("b", equator(n));
  den.add_bec("b", equator(n));
  auto so = sym.measure_bec("b", 0.0, 100.0);
  auto dq = den.measure_bec("b", 0.0, 100.0);
  CHECK(so.q == dq.q);
  CHECK(so.prob == doctest::Approx(dq.prob).epsilon(1e-12));
  double expect = std::exp(spin::log_binom(n, so.q)) / std::pow(2.0, n);
  CHECK(so.prob == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("postselected wire applies an exact diagonal rotation") {
  const int n = 10;
  const double big_l = 200.0, theta = 17.0;
  const double sigma = cv::default_sigma(big_l);
  SymbolicEngine eng(5);
  prepare_wire(eng, n, big_l, theta, sigma, 513);

  auto bec = eng.measure_bec("b3", theta, big_l);
  CHECK(bec.prob > 0.0);
  auto hom = eng.homodyne("c2", OutcomeMode::postselect, theta);
  CHECK(hom.x == doctest::Approx(theta).epsilon(1e-15));  // theta sits on the grid

  auto out = eng.output_params("b1");
  CHECK(std::abs(out.alpha) == doctest::Approx(kInvSqrt2).epsilon(1e-12));
  CHECK(std::abs(out.beta) == doctest::Approx(kInvSqrt2).epsilon(1e-12));
  double angle = std::arg(out.beta / out.alpha);
  CHECK(std::abs(std::polar(1.0, angle) - std::polar(1.0, -theta)) < 1e-9);
}

TEST_CASE("selector measurement narrows the axis marginal") {
  const double big_l = 200.0, theta = 3.0;
  const double sigma = cv::default_sigma(big_l);
  double prev = 1e300;
  for (int n : {10, 50, 200}) {
    SymbolicEngine eng(7);
    prepare_wire(eng, n, big_l, theta, sigma, 1025);
    double before = 0.0;
    {
      auto d = eng.axis_density("c2");
      before = cv::density_std(eng.axis_grid("c2"), d);
    }
    eng.measure_bec("b3", theta, big_l);
    auto d = eng.axis_density("c2");
    double after = cv::density_std(eng.axis_grid("c2"), d);
    CHECK(after < before);
    CHECK(after < prev);
    prev = after;
  }
}

TEST_CASE("expectation homodyne pins the marginal mean") {
  const int n = 20;
  const double big_l = 200.0, theta = 5.0;
  SymbolicEngine eng(3);
  prepare_wire(eng, n, big_l, theta, cv::default_sigma(big_l), 1025);
  auto bec = eng.measure_bec("b3", theta, big_l);

  auto density = eng.axis_density("c2");
  const auto& grid = eng.axis_grid("c2");
  double mean = cv::density_mean(grid, density);
  auto hom = eng.homodyne("c2", OutcomeMode::expectation);
  CHECK(hom.mean == doctest::Approx(mean).epsilon(1e-12));
  CHECK(hom.x == doctest::Approx(grid.point(cv::nearest_index(grid, mean))).epsilon(1e-12));
  CHECK(hom.std_dev > 0.0);
  // The outcome q biases the inferred quadrature away from theta: larger q
  // pulls it down, smaller q up (and q = n/2 leaves it centered).
  if (bec.q > n / 2) CHECK(hom.mean < theta);
  if (bec.q < n / 2) CHECK(hom.mean > theta);
}

TEST_CASE("forcing the central outcome keeps the posterior centered") {
  const int n = 20;
  const double big_l = 200.0, theta = 5.0;
  SymbolicEngine eng(3);
  prepare_wire(eng, n, big_l, theta, cv::default_sigma(big_l), 1025);
  auto bec = eng.measure_bec("b3", theta, big_l, spin::BasisVariant::x_basis, n / 2);
  CHECK(bec.q == n / 2);
  auto hom = eng.homodyne("c2", OutcomeMode::expectation);
  CHECK(hom.x == doctest::Approx(theta).epsilon(1e-12));
  CHECK(hom.mean == doctest::Approx(theta).epsilon(1e-9));
}

TEST_CASE("symbolic and dense wires agree outcome for outcome") {
  const int n = 4;
  const double big_l = 200.0, theta = 11.0;
  const double sigma = cv::default_sigma(big_l);
  for (std::uint64_t seed : {1ULL, 2ULL, 9ULL}) {
    SymbolicEngine sym(seed);
    DenseEngine den(seed);
    prepare_wire(sym, n, big_l, theta, sigma, 64);
    prepare_wire(den, n, big_l, theta, sigma, 64);

    // Identical joint state before any measurement.
    CHECK(engine::max_diff_up_to_phase(den.state(), engine::dense_snapshot(sym, den.dim_ids())) <
          1e-9);

    auto sq = sym.measure_bec("b3", theta, big_l);
    auto dq = den.measure_bec("b3", theta, big_l);
    CHECK(sq.q == dq.q);
    CHECK(sq.prob == doctest::Approx(dq.prob).epsilon(1e-9));
    CHECK(engine::max_diff_up_to_phase(den.state(), engine::dense_snapshot(sym, den.dim_ids())) <
          1e-9);
    CHECK(max_diff(den.axis_density("c2"), sym.axis_density("c2")) < 1e-9);

    auto sh = sym.homodyne("c2", OutcomeMode::sample);
    auto dh = den.homodyne("c2", OutcomeMode::sample);
    CHECK(sh.x == doctest::Approx(dh.x).epsilon(1e-12));
    CHECK(sh.density == doctest::Approx(dh.density).epsilon(1e-9));
    CHECK(sh.mean == doctest::Approx(dh.mean).epsilon(1e-9));
    CHECK(sh.std_dev == doctest::Approx(dh.std_dev).epsilon(1e-9));

    // Full amplitude agreement, including the global phase.
    CHECK(max_diff(den.output_fock("b1"), scaled_fock(sym, "b1")) < 1e-9);
  }
}

TEST_CASE("symbolic and dense sandwiches agree through both rotations") {
  const int n = 3;
  const double big_l = 100.0, theta1 = 7.0, theta2 = -4.0;
  const double sigma = cv::default_sigma(big_l);
  SymbolicEngine sym(21);
  DenseEngine den(21);
  prepare_sandwich(sym, n, big_l, theta1, theta2, sigma, 32);
  prepare_sandwich(den, n, big_l, theta1, theta2, sigma, 32);

  CHECK(engine::max_diff_up_to_phase(den.state(), engine::dense_snapshot(sym, den.dim_ids())) <
        1e-9);

  auto s1 = sym.measure_bec("b1", theta1, big_l);
  auto d1 = den.measure_bec("b1", theta1, big_l);
  CHECK(s1.q == d1.q);
  CHECK(s1.prob == doctest::Approx(d1.prob).epsilon(1e-9));

  auto s3 = sym.measure_bec("b3", theta2, big_l);
  auto d3 = den.measure_bec("b3", theta2, big_l);
  CHECK(s3.q == d3.q);
  CHECK(s3.prob == doctest::Approx(d3.prob).epsilon(1e-9));
  CHECK(engine::max_diff_up_to_phase(den.state(), engine::dense_snapshot(sym, den.dim_ids())) <
        1e-9);

  auto sh1 = sym.homodyne("c1", OutcomeMode::sample);
  auto dh1 = den.homodyne("c1", OutcomeMode::sample);
  CHECK(sh1.x == doctest::Approx(dh1.x).epsilon(1e-12));
  auto sh2 = sym.homodyne("c2", OutcomeMode::sample);
  auto dh2 = den.homodyne("c2", OutcomeMode::sample);
  CHECK(sh2.x == doctest::Approx(dh2.x).epsilon(1e-12));

  CHECK(max_diff(den.output_fock("b2"), scaled_fock(sym, "b2")) < 1e-9);
}

TEST_CASE("postselected sandwich composes the two rotations exactly") {
  const int n = 8;
  const double big_l = 300.0, theta1 = 23.0, theta2 = 41.5;
  SymbolicEngine eng(17);
  prepare_sandwich(eng, n, big_l, theta1, theta2, cv::default_sigma(big_l), 257);
  eng.measure_bec("b1", theta1, big_l);
  eng.measure_bec("b3", theta2, big_l);
  eng.homodyne("c1", OutcomeMode::postselect, theta1);
  eng.homodyne("c2", OutcomeMode::postselect, theta2);

  auto out = eng.output_params("b2");
  // Target: beta *= e^{-i theta1}, Hadamard mode rotation, beta *= e^{-i theta2}.
  spin::CoherentParams t = equator(n);
  t.beta *= std::polar(1.0, -theta1);
  t = spin::rotate_coherent(t, spin::hadamard_mode_rotation());
  t.beta *= std::polar(1.0, -theta2);
  CHECK(std::abs(out.alpha - t.alpha) < 1e-9);
  CHECK(std::abs(out.beta - t.beta) < 1e-9);
}

TEST_CASE("engine guards") {
  SymbolicEngine eng(1);
  eng.add_bec("b", equator(2));
  CHECK_THROWS_AS(eng.add_bec("b", equator(2)), Error);
  eng.add_cv_axis("c1", theta_gaussian(0.0, 1.0, 64));
  eng.add_cv_axis("c2", theta_gaussian(0.0, 1.0, 64));
  CHECK_THROWS_AS(eng.add_cv_axis("c1", theta_gaussian(0.0, 1.0, 64)), Error);
  eng.apply_cz("b", "c1", 1.0);
  eng.apply_cz("b", "c2", 1.0);

  // Two live axes: measuring or reading the register is inadmissible.
  CHECK_THROWS_AS(eng.measure_bec("b", 0.0, 100.0), Error);
  CHECK_THROWS_AS(eng.output_params("b"), Error);
  CHECK(eng.live_axes_of("b").size() == 2);

  eng.homodyne("c1", OutcomeMode::postselect, 0.0);
  CHECK_THROWS_AS(eng.homodyne("c1", OutcomeMode::sample), Error);
  CHECK_THROWS_AS(eng.homodyne("c2", OutcomeMode::postselect), Error);  // missing target
  CHECK_THROWS_AS(eng.homodyne("ghost", OutcomeMode::sample), Error);

  auto out = eng.measure_bec("b", 0.0, 100.0);  // one live axis left: fine
  CHECK(out.prob > 0.0);
  CHECK_THROWS_AS(eng.measure_bec("b", 0.0, 100.0), Error);  // already measured

  DenseEngine den(1, 128);
  den.add_bec("b", equator(2));
  CHECK_THROWS_AS(den.add_cv_axis("c", theta_gaussian(0.0, 1.0, 64)), Error);  // budget
}
