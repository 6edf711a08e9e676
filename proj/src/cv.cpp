#include "hybridmbqc/cv.hpp"

#include <cmath>
#include <cstdio>

namespace hmq::cv {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

GridSpec make_grid(double x_min, double x_max, int n_points) {
  if (!(x_min < x_max)) throw Error(ErrorCode::invalid_argument, "grid needs x_min < x_max");
  if (n_points < 8) throw Error(ErrorCode::invalid_argument, "grid needs at least 8 points");
  return {x_min, x_max, n_points};
}

GridSpec centered_grid(double center, double sigma, int n_points) {
  if (sigma <= 0.0) throw Error(ErrorCode::invalid_argument, "sigma must be positive");
  if (n_points < 8) throw Error(ErrorCode::invalid_argument, "grid needs at least 8 points");
  double dx = 16.0 * sigma / (n_points - 1);
  int i0 = (n_points - 1) / 2;
  double x_min = center - i0 * dx;
  return {x_min, x_min + (n_points - 1) * dx, n_points};
}

int nearest_index(const GridSpec& g, double x) {
  if (x < g.x_min - 0.5 * g.dx() || x > g.x_max + 0.5 * g.dx())
    throw Error(ErrorCode::invalid_argument, "point lies outside the grid");
  int i = int(std::lround((x - g.x_min) / g.dx()));
  if (i < 0) i = 0;
  if (i >= g.n_points) i = g.n_points - 1;
  return i;
}

double default_sigma(double big_l) {
  if (big_l < 2.0) throw Error(ErrorCode::invalid_argument, "L must be >= 2");
  return big_l / (4.0 * kPi);
}

double grid_norm(const Wavefunction& wf) {
  double s = 0.0;
  for (const cplx& v : wf.psi) s += std::norm(v);
  return std::sqrt(s * wf.grid.dx());
}

Wavefunction gaussian_wavefunction(const GridSpec& g, double center, double sigma) {
  if (sigma <= 0.0) throw Error(ErrorCode::invalid_argument, "sigma must be positive");
  if (center - 6.0 * sigma < g.x_min || center + 6.0 * sigma > g.x_max)
    std::fprintf(stderr, "warning: gaussian support [%g, %g] clipped by grid [%g, %g]\n",
                 center - 6.0 * sigma, center + 6.0 * sigma, g.x_min, g.x_max);
  Wavefunction wf{g, std::vector<cplx>(g.n_points)};
  for (int i = 0; i < g.n_points; ++i) {
    double d = g.point(i) - center;
    wf.psi[i] = std::exp(-d * d / (4.0 * sigma * sigma));
  }
  return normalize(wf).first;
}

std::pair<Wavefunction, double> normalize(const Wavefunction& wf) {
  double n = grid_norm(wf);
  if (n == 0.0)
    throw Error(ErrorCode::numerical, "zero-norm wavefunction: branch has probability 0");
  Wavefunction out = wf;
  for (cplx& v : out.psi) v /= n;
  return {out, n};
}

double density_mean(const GridSpec& g, const std::vector<double>& density) {
  double w = 0.0, s = 0.0;
  for (int i = 0; i < g.n_points; ++i) {
    w += density[i];
    s += density[i] * g.point(i);
  }
  if (w <= 0.0) throw Error(ErrorCode::numerical, "density has zero mass");
  return s / w;
}

double density_std(const GridSpec& g, const std::vector<double>& density) {
  double mu = density_mean(g, density);
  double w = 0.0, s = 0.0;
  for (int i = 0; i < g.n_points; ++i) {
    double d = g.point(i) - mu;
    w += density[i];
    s += density[i] * d * d;
  }
  return std::sqrt(s / w);
}

}  // namespace hmq::cv
