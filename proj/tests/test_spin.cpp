#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "hybridmbqc/errors.hpp"
#include "hybridmbqc/spin.hpp"

using namespace hmq;
using spin::cplx;

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::VectorXcd fock_vec(const spin::CoherentParams& p) {
  auto c = spin::coherent_to_fock(p);
  Eigen::VectorXcd v(static_cast<int>(c.size()));
  for (int i = 0; i < v.size(); ++i) v(i) = c[static_cast<std::size_t>(i)];
  return v;
}

double binom(int n, int k) { return std::exp(spin::log_binom(n, k)); }

// Fock coefficients of (a†+b†)^k (a†-b†)^(N-k) |vac>, normalized. Index m is
// the a-mode count, so c_m = sqrt(m!(N-m)!) * sum_{p+q=m} C(k,p) C(N-k,q) (-1)^(N-k-q).
Eigen::VectorXcd plus_minus_expansion(int n, int k) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n + 1);
  for (int p = 0; p <= k; ++p) {
    for (int q = 0; q <= n - k; ++q) {
      int m = p + q;
      double sign = ((n - k - q) % 2 == 0) ? 1.0 : -1.0;
      double amp = binom(k, p) * binom(n - k, q) * sign *
                   std::sqrt(std::tgamma(m + 1.0) * std::tgamma(n - m + 1.0));
      v(m) += amp;
    }
  }
  return v / v.norm();
}

}  // namespace

TEST_CASE("log_binom and cpow_int") {
  CHECK(spin::log_binom(0, 0) == doctest::Approx(0.0));
  CHECK(spin::log_binom(4, 2) == doctest::Approx(std::log(6.0)).epsilon(1e-13));
  CHECK(spin::log_binom(52, 5) == doctest::Approx(std::log(2598960.0)).epsilon(1e-13));
  CHECK_THROWS_AS(spin::log_binom(3, 4), Error);
  CHECK_THROWS_AS(spin::log_binom(3, -1), Error);

  cplx z = spin::cpow_int({2.0, 1.0}, 5);
  CHECK(z.real() == doctest::Approx(-38.0).epsilon(1e-13));
  CHECK(z.imag() == doctest::Approx(41.0).epsilon(1e-13));
  CHECK(spin::cpow_int({0.3, -0.7}, 0) == cplx{1.0, 0.0});
  CHECK_THROWS_AS(spin::cpow_int({1.0, 0.0}, -2), Error);
}

TEST_CASE("normalized rescales and rejects zero") {
  auto p = spin::normalized({{3.0, 0.0}, {4.0, 0.0}, 2});
  CHECK(p.alpha.real() == doctest::Approx(0.6));
  CHECK(p.beta.real() == doctest::Approx(0.8));
  CHECK_THROWS_AS(spin::normalized({{0.0, 0.0}, {0.0, 0.0}, 2}), Error);
}

TEST_CASE("coherent_to_fock matches hand values") {
  auto pole = spin::coherent_to_fock({{1.0, 0.0}, {0.0, 0.0}, 3});
  REQUIRE(pole.size() == 4);
  CHECK(std::abs(pole[3] - cplx{1.0, 0.0}) < 1e-15);
  CHECK(std::abs(pole[0]) + std::abs(pole[1]) + std::abs(pole[2]) < 1e-15);

  auto opposite = spin::coherent_to_fock({{0.0, 0.0}, {1.0, 0.0}, 3});
  CHECK(std::abs(opposite[0] - cplx{1.0, 0.0}) < 1e-15);

  const double r = 1.0 / std::sqrt(2.0);
  auto eq = spin::coherent_to_fock({{r, 0.0}, {r, 0.0}, 2});
  CHECK(std::abs(eq[0] - cplx{0.5, 0.0}) < 1e-14);
  CHECK(std::abs(eq[1] - cplx{r, 0.0}) < 1e-14);
  CHECK(std::abs(eq[2] - cplx{0.5, 0.0}) < 1e-14);

  spin::CoherentParams p = spin::normalized({{0.31, -0.4}, {0.52, 0.67}, 17});
  double norm2 = 0.0;
  for (auto& c : spin::coherent_to_fock(p)) norm2 += std::norm(c);
  CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(spin::coherent_to_fock({{1.0, 0.0}, {0.0, 0.0}, 0}), Error);
  CHECK_THROWS_AS(spin::coherent_to_fock({{1.0, 0.0}, {1.0, 0.0}, 3}), Error);
}

TEST_CASE("coherent_to_fock survives large particle numbers") {
  spin::CoherentParams p = spin::normalized({{0.6, 0.1}, {-0.3, 0.74}, 501});
  auto c = spin::coherent_to_fock(p);
  double norm2 = 0.0;
  for (auto& z : c) norm2 += std::norm(z);
  CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-9));
  // Spot-check against the direct formula where it is still representable.
  for (int k : {0, 120, 250, 377, 501}) {
    cplx direct = std::exp(0.5 * spin::log_binom(501, k)) * spin::cpow_int(p.alpha, k) *
                  spin::cpow_int(p.beta, 501 - k);
    CHECK(std::abs(c[static_cast<std::size_t>(k)] - direct) <=
          1e-12 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("coherent_overlap") {
  const double r = 1.0 / std::sqrt(2.0);
  cplx z = spin::coherent_overlap({{r, 0.0}, {r, 0.0}, 2}, {{r, 0.0}, {-r, 0.0}, 2});
  CHECK(std::abs(z) < 1e-15);
  CHECK(std::abs(spin::coherent_overlap({{1.0, 0.0}, {0.0, 0.0}, 9},
                                        {{1.0, 0.0}, {0.0, 0.0}, 9}) -
                 cplx{1.0, 0.0}) < 1e-15);

  spin::CoherentParams p = spin::normalized({{0.2, 0.5}, {-0.4, 0.3}, 6});
  spin::CoherentParams q = spin::normalized({{0.9, -0.1}, {0.2, 0.2}, 6});
  cplx dot = 0.0;
  auto cp = spin::coherent_to_fock(p);
  auto cq = spin::coherent_to_fock(q);
  for (std::size_t k = 0; k < cp.size(); ++k) dot += std::conj(cp[k]) * cq[k];
  CHECK(std::abs(spin::coherent_overlap(p, q) - dot) < 1e-12);

  CHECK_THROWS_AS(spin::coherent_overlap({{1.0, 0.0}, {0.0, 0.0}, 2},
                                         {{1.0, 0.0}, {0.0, 0.0}, 3}),
                  Error);
}

TEST_CASE("spin_matrix entries") {
  auto z1 = spin::spin_matrix(spin::SpinAxis::z, 1);
  CHECK(std::abs(z1(0, 0) - cplx{-1.0, 0.0}) < 1e-15);
  CHECK(std::abs(z1(1, 1) - cplx{1.0, 0.0}) < 1e-15);
  CHECK(std::abs(z1(0, 1)) + std::abs(z1(1, 0)) < 1e-15);

  auto z4 = spin::spin_matrix(spin::SpinAxis::z, 4);
  for (int k = 0; k <= 4; ++k) CHECK(z4(k, k).real() == doctest::Approx(2.0 * k - 4.0));

  auto x1 = spin::spin_matrix(spin::SpinAxis::x, 1);
  CHECK(std::abs(x1(0, 1) - cplx{1.0, 0.0}) < 1e-15);
  CHECK(std::abs(x1(1, 0) - cplx{1.0, 0.0}) < 1e-15);

  auto y1 = spin::spin_matrix(spin::SpinAxis::y, 1);
  CHECK(std::abs(y1(0, 1) - cplx{0.0, 1.0}) < 1e-15);
  CHECK(std::abs(y1(1, 0) - cplx{0.0, -1.0}) < 1e-15);

  auto n3 = spin::spin_matrix(spin::SpinAxis::number, 3);
  CHECK((n3 - 3.0 * Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);

  for (auto axis : {spin::SpinAxis::x, spin::SpinAxis::y, spin::SpinAxis::z}) {
    auto m = spin::spin_matrix(axis, 7);
    CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("spin commutator algebra") {
  for (int n : {1, 5, 20}) {
    auto x = spin::spin_matrix(spin::SpinAxis::x, n);
    auto y = spin::spin_matrix(spin::SpinAxis::y, n);
    auto z = spin::spin_matrix(spin::SpinAxis::z, n);
    const cplx two_i{0.0, 2.0};
    CHECK((x * y - y * x - two_i * z).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((y * z - z * y - two_i * x).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((z * x - x * z - two_i * y).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("spin expectation values on coherent states") {
  spin::CoherentParams p{{0.6, 0.0}, {0.8, 0.0}, 10};
  Eigen::VectorXcd v = fock_vec(p);
  auto expect = [&](spin::SpinAxis ax) {
    return (v.adjoint() * spin::spin_matrix(ax, 10) * v)(0, 0).real();
  };
  CHECK(expect(spin::SpinAxis::z) == doctest::Approx(10.0 * (0.36 - 0.64)).epsilon(1e-12));
  CHECK(expect(spin::SpinAxis::x) == doctest::Approx(10.0 * 2.0 * 0.48).epsilon(1e-12));
  CHECK(std::abs(expect(spin::SpinAxis::y)) < 1e-12);
}

TEST_CASE("expi_hermitian") {
  auto x1 = spin::spin_matrix(spin::SpinAxis::x, 1);
  auto u = spin::expi_hermitian(x1, 0.3);
  CHECK(std::abs(u(0, 0) - cplx{std::cos(0.3), 0.0}) < 1e-12);
  CHECK(std::abs(u(0, 1) - cplx{0.0, std::sin(0.3)}) < 1e-12);

  Eigen::MatrixXcd bad(2, 2);
  bad << cplx{0, 0}, cplx{1, 0}, cplx{0, 0}, cplx{0, 0};
  CHECK_THROWS_AS(spin::expi_hermitian(bad, 1.0), Error);
}

TEST_CASE("hadamard_unitary basic structure") {
  const double c = 1.0 / std::sqrt(2.0);
  auto h1 = spin::hadamard_unitary(1);
  CHECK(std::abs(h1(0, 0) - cplx{-c, 0.0}) < 1e-12);
  CHECK(std::abs(h1(0, 1) - cplx{-c, 0.0}) < 1e-12);
  CHECK(std::abs(h1(1, 0) - cplx{c, 0.0}) < 1e-12);
  CHECK(std::abs(h1(1, 1) - cplx{-c, 0.0}) < 1e-12);

  auto h = spin::hadamard_unitary(30);
  CHECK((h.adjoint() * h - Eigen::MatrixXcd::Identity(31, 31)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("hadamard conjugates z into +x") {
  for (int n : {1, 4, 9}) {
    auto h = spin::hadamard_unitary(n);
    auto z = spin::spin_matrix(spin::SpinAxis::z, n);
    auto x = spin::spin_matrix(spin::SpinAxis::x, n);
    CHECK((h * z * h.adjoint() - x).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("hadamard columns match the (a†±b†) expansion with phase (-1)^k") {
  for (int n : {1, 2, 3, 5, 8}) {
    auto h = spin::hadamard_unitary(n);
    for (int k = 0; k <= n; ++k) {
      Eigen::VectorXcd expect = plus_minus_expansion(n, k);
      cplx s = expect.dot(h.col(k));  // conjugates the expansion side
      double phase = (k % 2 == 0) ? 1.0 : -1.0;
      CHECK(std::abs(s - cplx{phase, 0.0}) < 1e-9);
    }
  }
}

TEST_CASE("mode rotation agrees with the many-body unitary") {
  auto u2 = spin::hadamard_mode_rotation();
  const double c = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(u2(0, 0) - cplx{-c, 0.0}) < 1e-15);
  CHECK(std::abs(u2(0, 1) - cplx{c, 0.0}) < 1e-15);
  CHECK(std::abs(u2(1, 0) - cplx{-c, 0.0}) < 1e-15);
  CHECK(std::abs(u2(1, 1) - cplx{-c, 0.0}) < 1e-15);
  CHECK((u2.adjoint() * u2 - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-14);

  for (int n : {1, 3, 8}) {
    spin::CoherentParams p = spin::normalized({{0.23, 0.51}, {-0.62, 0.3}, n});
    Eigen::VectorXcd direct = spin::hadamard_unitary(n) * fock_vec(p);
    Eigen::VectorXcd via_params = fock_vec(spin::rotate_coherent(p, u2));
    CHECK((direct - via_params).cwiseAbs().maxCoeff() < 1e-10);
  }

  Eigen::Matrix2cd not_unitary = Eigen::Matrix2cd::Identity() * 2.0;
  CHECK_THROWS_AS(spin::rotate_coherent({{1.0, 0.0}, {0.0, 0.0}, 2}, not_unitary), Error);
}

TEST_CASE("basis_amplitude peak value at x = theta") {
  const double r = 1.0 / std::sqrt(2.0);
  const int n = 6;
  const double big_l = 100.0, theta = 12.5;
  spin::CoherentParams p{{r, 0.0}, std::polar(r, -2.0 * kPi * theta / big_l), n};
  for (int q = 0; q <= n; ++q) {
    cplx amp = spin::basis_amplitude({q, theta, big_l, n}, p);
    double expect = std::sqrt(binom(n, q) / std::pow(2.0, n));
    CHECK(std::abs(amp) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("basis_amplitude closed-form modulus on a grid") {
  const double r = 1.0 / std::sqrt(2.0);
  const double big_l = 200.0;
  for (int n : {4, 16, 64}) {
    for (int ix = 0; ix < 10; ++ix) {
      for (int it = 0; it < 10; ++it) {
        double x = big_l * ix / 10.0;
        double theta = big_l * (it + 0.5) / 10.0;
        spin::CoherentParams p{{r, 0.0}, std::polar(r, -2.0 * kPi * x / big_l), n};
        double xi = kPi * (x - theta) / big_l;
        double prob_sum = 0.0;
        for (int q = 0; q <= n; ++q) {
          cplx amp = spin::basis_amplitude({q, theta, big_l, n}, p);
          double expect = std::sqrt(binom(n, q)) *
                          std::pow(std::abs(std::cos(xi + kPi / 4.0)), q) *
                          std::pow(std::abs(std::sin(xi + kPi / 4.0)), n - q);
          CHECK(std::abs(std::abs(amp) - expect) < 1e-9);
          prob_sum += std::norm(amp);
        }
        CHECK(prob_sum == doctest::Approx(1.0).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("basis_amplitude agrees with the dense matrix route") {
  const int n = 7;
  const double theta = 0.37, big_l = 11.0;
  spin::CoherentParams p = spin::normalized({{0.44, -0.21}, {0.13, 0.85}, n});
  Eigen::VectorXcd state = fock_vec(p);
  auto h = spin::hadamard_unitary(n);
  double phi = 2.0 * kPi * theta / big_l - kPi / 2.0;
  Eigen::VectorXcd pdag = Eigen::VectorXcd::Zero(n + 1);
  for (int k = 0; k <= n; ++k) pdag(k) = std::polar(1.0, phi * (n - k));  // e^{+i phi n_b}

  Eigen::VectorXcd amps_x = h.adjoint() * pdag.asDiagonal() * state;
  Eigen::VectorXcd amps_h = h.adjoint() * pdag.asDiagonal() * h.adjoint() * state;
  for (int q = 0; q <= n; ++q) {
    cplx ax = spin::basis_amplitude({q, theta, big_l, n}, p);
    cplx ah = spin::basis_amplitude({q, theta, big_l, n, spin::BasisVariant::hadamard_basis}, p);
    CHECK(std::abs(ax - amps_x(q)) < 1e-10);
    CHECK(std::abs(ah - amps_h(q)) < 1e-10);
  }
}

TEST_CASE("hadamard basis variant equals pre-rotating the state") {
  const int n = 5;
  spin::CoherentParams p = spin::normalized({{0.7, 0.1}, {-0.2, 0.67}, n});
  auto pre = spin::rotate_coherent(p, spin::hadamard_mode_rotation().adjoint());
  for (int q = 0; q <= n; ++q) {
    cplx lhs = spin::basis_amplitude({q, 3.0, 40.0, n, spin::BasisVariant::hadamard_basis}, p);
    cplx rhs = spin::basis_amplitude({q, 3.0, 40.0, n}, pre);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("basis_amplitude rejects bad arguments") {
  spin::CoherentParams p{{1.0, 0.0}, {0.0, 0.0}, 3};
  CHECK_THROWS_AS(spin::basis_amplitude({4, 0.0, 10.0, 3}, p), Error);
  CHECK_THROWS_AS(spin::basis_amplitude({-1, 0.0, 10.0, 3}, p), Error);
  CHECK_THROWS_AS(spin::basis_amplitude({1, 0.0, 1.0, 3}, p), Error);
  CHECK_THROWS_AS(spin::basis_amplitude({1, 0.0, 10.0, 4}, p), Error);
  spin::CoherentParams bad{{1.0, 0.0}, {1.0, 0.0}, 3};
  CHECK_THROWS_AS(spin::basis_amplitude({1, 0.0, 10.0, 3}, bad), Error);
}
