#include <doctest.h>

#include <cmath>
#include <vector>

#include "hybridmbqc/cv.hpp"
#include "hybridmbqc/errors.hpp"

using namespace hmq;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("make_grid spacing and points") {
  auto g = cv::make_grid(0.0, 10.0, 9);
  CHECK(g.dx() == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(g.point(0) == doctest::Approx(0.0));
  CHECK(g.point(3) == doctest::Approx(3.75));
  CHECK(g.point(8) == doctest::Approx(10.0));
  CHECK_THROWS_AS(cv::make_grid(1.0, 1.0, 16), Error);
  CHECK_THROWS_AS(cv::make_grid(2.0, 1.0, 16), Error);
  CHECK_THROWS_AS(cv::make_grid(0.0, 1.0, 4), Error);
}

TEST_CASE("centered_grid keeps the center on a grid point") {
  for (int n : {9, 64, 2048}) {
    auto g = cv::centered_grid(3.0, 1.25, n);
    CHECK(g.dx() == doctest::Approx(16.0 * 1.25 / (n - 1)).epsilon(1e-15));
    int i0 = (n - 1) / 2;
    CHECK(g.point(i0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(cv::nearest_index(g, 3.0) == i0);
  }
}

TEST_CASE("nearest_index rounds and rejects outside points") {
  auto g = cv::make_grid(0.0, 10.0, 11);
  CHECK(cv::nearest_index(g, 4.0) == 4);
  CHECK(cv::nearest_index(g, 4.4) == 4);
  CHECK(cv::nearest_index(g, 4.6) == 5);
  CHECK(cv::nearest_index(g, 0.0) == 0);
  CHECK(cv::nearest_index(g, 10.3) == 10);  // within half a step of the edge
  CHECK_THROWS_AS(cv::nearest_index(g, 10.6), Error);
  CHECK_THROWS_AS(cv::nearest_index(g, -1.0), Error);
}

TEST_CASE("default_sigma") {
  CHECK(cv::default_sigma(500.0) == doctest::Approx(500.0 / (4.0 * kPi)).epsilon(1e-15));
  CHECK_THROWS_AS(cv::default_sigma(1.0), Error);
}

TEST_CASE("gaussian wavefunction moments") {
  const double center = 2.0, sigma = 1.5;
  auto g = cv::centered_grid(center, sigma, 1025);
  auto wf = cv::gaussian_wavefunction(g, center, sigma);
  CHECK(cv::grid_norm(wf) == doctest::Approx(1.0).epsilon(1e-12));

  // Symmetry around the center.
  int i0 = (g.n_points - 1) / 2;
  for (int d : {1, 10, 100}) {
    CHECK(std::abs(wf.psi[i0 + d] - wf.psi[i0 - d]) < 1e-14);
  }

  std::vector<double> density(wf.psi.size());
  for (std::size_t i = 0; i < density.size(); ++i) density[i] = std::norm(wf.psi[i]);
  CHECK(cv::density_mean(g, density) == doctest::Approx(center).epsilon(1e-10));
  CHECK(cv::density_std(g, density) == doctest::Approx(sigma).epsilon(1e-9));
}

TEST_CASE("gaussian moments converge under grid refinement") {
  const double center = -1.0, sigma = 2.0;
  auto coarse = cv::gaussian_wavefunction(cv::centered_grid(center, sigma, 513), center, sigma);
  auto fine = cv::gaussian_wavefunction(cv::centered_grid(center, sigma, 4097), center, sigma);
  auto stdev = [](const cv::Wavefunction& wf) {
    std::vector<double> d(wf.psi.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::norm(wf.psi[i]);
    return cv::density_std(wf.grid, d);
  };
  CHECK(std::abs(stdev(coarse) - stdev(fine)) < 1e-9);
}

TEST_CASE("normalize returns the divided-out norm and rejects zero") {
  auto g = cv::make_grid(-1.0, 1.0, 9);
  cv::Wavefunction wf{g, std::vector<cv::cplx>(9, {2.0, 0.0})};
  auto [unit, norm] = cv::normalize(wf);
  CHECK(cv::grid_norm(unit) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(norm == doctest::Approx(cv::grid_norm(wf)).epsilon(1e-13));

  cv::Wavefunction zero{g, std::vector<cv::cplx>(9, {0.0, 0.0})};
  CHECK_THROWS_AS(cv::normalize(zero), Error);
}

TEST_CASE("density moments reject zero mass") {
  auto g = cv::make_grid(0.0, 1.0, 9);
  std::vector<double> zero(9, 0.0);
  CHECK_THROWS_AS(cv::density_mean(g, zero), Error);
  CHECK_THROWS_AS(cv::density_std(g, zero), Error);
}
