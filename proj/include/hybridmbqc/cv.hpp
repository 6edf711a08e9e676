#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "hybridmbqc/errors.hpp"

namespace hmq::cv {

using cplx = std::complex<double>;

// Uniform grid with inclusive endpoints; dx = (x_max - x_min) / (n_points - 1).
struct GridSpec {
  double x_min;
  double x_max;
  int n_points;
  double dx() const { return (x_max - x_min) / (n_points - 1); }
  double point(int i) const { return x_min + i * dx(); }
};

GridSpec make_grid(double x_min, double x_max, int n_points);

// Grid of n points with spacing 16*sigma/(n-1), arranged so that center is exactly
// a grid point (the window is one step asymmetric for even n).
GridSpec centered_grid(double center, double sigma, int n_points);

// Index of the grid point nearest to x. Errors if x lies outside the grid.
int nearest_index(const GridSpec& g, double x);

struct Wavefunction {
  GridSpec grid;
  std::vector<cplx> psi;
};

double default_sigma(double big_l);  // L / (4*pi)

// sqrt of the grid inner product Sum |psi|^2 dx.
double grid_norm(const Wavefunction& wf);

// Normalized Gaussian psi(x) ~ exp(-(x-center)^2 / (4 sigma^2)); |psi|^2 has std sigma.
// Warns on stderr when [center-6s, center+6s] is not contained in the grid.
Wavefunction gaussian_wavefunction(const GridSpec& g, double center, double sigma);

// Returns the unit-norm wavefunction and the norm that was divided out.
// Errors on zero norm (a measurement branch with probability 0).
std::pair<Wavefunction, double> normalize(const Wavefunction& wf);

// Moments of a density vector over the grid (density need not be normalized).
double density_mean(const GridSpec& g, const std::vector<double>& density);
double density_std(const GridSpec& g, const std::vector<double>& density);

}  // namespace hmq::cv
