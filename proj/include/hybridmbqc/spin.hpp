#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "hybridmbqc/errors.hpp"

namespace hmq::spin {

using cplx = std::complex<double>;

// Two-mode spin coherent state (alpha a† + beta b†)^N / sqrt(N!) |vac>.
// alpha multiplies the a mode, beta the b mode; |alpha|^2 + |beta|^2 = 1.
struct CoherentParams {
  cplx alpha;
  cplx beta;
  int n_particles;
};

enum class SpinAxis { x, y, z, number };

enum class BasisVariant { x_basis, hadamard_basis };

// Rotated Fock measurement basis |theta_q> = e^{-i(2*pi*theta/L - pi/2) n_b} H |q>,
// optionally with one extra Hadamard in front (hadamard_basis).
struct MeasurementBasisSpec {
  int q;
  double theta;
  double big_l;
  int n_particles;
  BasisVariant variant = BasisVariant::x_basis;
};

// log C(n, k) via lgamma; exact to ~1e-15 relative for any n.
double log_binom(int n, int k);

// Integer power by squaring; more accurate than exp(log) for moderate exponents.
cplx cpow_int(cplx base, int e);

// Rescale (alpha, beta) to unit norm. Errors on the zero vector.
CoherentParams normalized(const CoherentParams& p);

// Fock coefficients c_k = sqrt(C(N,k)) alpha^k beta^(N-k), k = a-mode count, length N+1.
std::vector<cplx> coherent_to_fock(const CoherentParams& p);

// One Fock coefficient without building the whole vector.
cplx fock_coefficient(const CoherentParams& p, int k);

// <<p|q>> = (conj(alpha_p) alpha_q + conj(beta_p) beta_q)^N. Errors on particle-number mismatch.
cplx coherent_overlap(const CoherentParams& p, const CoherentParams& q);

// Collective spin operator in the Fock basis |k>, k = a-mode count:
//   x: a†b + b†a, y: -i a†b + i b†a, z: a†a - b†b, number: a†a + b†b.
Eigen::MatrixXcd spin_matrix(SpinAxis axis, int n_particles);

// exp(i t M) for Hermitian M, by spectral decomposition.
Eigen::MatrixXcd expi_hermitian(const Eigen::MatrixXcd& m, double t);

// Collective Hadamard exp(3i*pi/4 * S^y) on the (N+1)-dim Fock space. Satisfies
// H S^z H† = +S^x and maps |k> onto the expansion of (a†+b†)^k (a†-b†)^(N-k) |vac>
// up to a per-state phase.
Eigen::MatrixXcd hadamard_unitary(int n_particles);

// Mode-space 2x2 block of the Hadamard: H (alpha a† + beta b†) H† rotates
// (alpha, beta) by this matrix.
Eigen::Matrix2cd hadamard_mode_rotation();

// Apply a 2x2 mode rotation to coherent parameters. Errors if u is not unitary (1e-12).
CoherentParams rotate_coherent(const CoherentParams& p, const Eigen::Matrix2cd& u);

// <theta_q | p>: overlap of a coherent state with one rotated measurement basis state.
// For the x basis at params (1/sqrt2, e^{-2*pi*i*x/L}/sqrt2) the modulus equals
// sqrt(C(N,q)) |cos(pi(x-theta)/L + pi/4)|^q |sin(pi(x-theta)/L + pi/4)|^(N-q).
cplx basis_amplitude(const MeasurementBasisSpec& spec, const CoherentParams& p);

// Coherent parameters after the basis change is pushed onto the state side;
// basis_amplitude(spec, p) == coherent_to_fock(basis_rotated_params(spec, p))[spec.q],
// so outcome probabilities form the binomial row with success rate |alpha'|^2.
CoherentParams basis_rotated_params(const MeasurementBasisSpec& spec, const CoherentParams& p);

// Binomial pmf {C(n,k) r^k (1-r)^(n-k)}, built by recursion outward from the mode
// so large n neither overflows nor underflows.
std::vector<double> binomial_pmf_row(int n, double r);

}  // namespace hmq::spin
