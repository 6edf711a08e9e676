#include "hybridmbqc/spin.hpp"

#include <algorithm>
#include <cmath>

namespace hmq::spin {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_particles(int n) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "particle number must be >= 1");
}

void check_normalized(const CoherentParams& p) {
  check_particles(p.n_particles);
  double n2 = std::norm(p.alpha) + std::norm(p.beta);
  if (std::abs(n2 - 1.0) > 1e-9)
    throw Error(ErrorCode::invalid_argument, "coherent parameters are not normalized");
}

// sqrt(C(N,k)) alpha^k beta^(N-k), assembled in log magnitude/phase form for large N.
cplx weighted_monomial(int n, int k, cplx alpha, cplx beta) {
  double lb = 0.5 * log_binom(n, k);
  if (n <= 500) return std::exp(lb) * cpow_int(alpha, k) * cpow_int(beta, n - k);
  double ma = std::abs(alpha), mb = std::abs(beta);
  if ((k > 0 && ma == 0.0) || (n - k > 0 && mb == 0.0)) return {0.0, 0.0};
  double logmag = lb + (k > 0 ? k * std::log(ma) : 0.0) + (n - k > 0 ? (n - k) * std::log(mb) : 0.0);
  double phase = k * std::arg(alpha) + (n - k) * std::arg(beta);
  return std::polar(std::exp(logmag), phase);
}

}  // namespace

double log_binom(int n, int k) {
  if (k < 0 || k > n) throw Error(ErrorCode::invalid_argument, "binomial index out of range");
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

cplx cpow_int(cplx base, int e) {
  if (e < 0) throw Error(ErrorCode::invalid_argument, "negative exponent");
  cplx acc{1.0, 0.0};
  while (e > 0) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

CoherentParams normalized(const CoherentParams& p) {
  double n = std::sqrt(std::norm(p.alpha) + std::norm(p.beta));
  if (n == 0.0) throw Error(ErrorCode::invalid_argument, "cannot normalize zero coherent parameters");
  return {p.alpha / n, p.beta / n, p.n_particles};
}

std::vector<cplx> coherent_to_fock(const CoherentParams& p) {
  check_normalized(p);
  int n = p.n_particles;
  std::vector<cplx> c(n + 1);
  for (int k = 0; k <= n; ++k) c[k] = weighted_monomial(n, k, p.alpha, p.beta);
  return c;
}

cplx fock_coefficient(const CoherentParams& p, int k) {
  check_normalized(p);
  if (k < 0 || k > p.n_particles)
    throw Error(ErrorCode::invalid_argument, "fock index out of range");
  return weighted_monomial(p.n_particles, k, p.alpha, p.beta);
}

cplx coherent_overlap(const CoherentParams& p, const CoherentParams& q) {
  if (p.n_particles != q.n_particles)
    throw Error(ErrorCode::invalid_argument, "coherent overlap needs equal particle numbers");
  check_particles(p.n_particles);
  cplx ip = std::conj(p.alpha) * q.alpha + std::conj(p.beta) * q.beta;
  return cpow_int(ip, p.n_particles);
}

Eigen::MatrixXcd spin_matrix(SpinAxis axis, int n_particles) {
  check_particles(n_particles);
  int n = n_particles;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  const cplx i{0.0, 1.0};
  switch (axis) {
    case SpinAxis::z:
      for (int k = 0; k <= n; ++k) m(k, k) = 2.0 * k - n;
      break;
    case SpinAxis::number:
      for (int k = 0; k <= n; ++k) m(k, k) = n;
      break;
    case SpinAxis::x:
      for (int k = 0; k < n; ++k) {
        double up = std::sqrt(double(n - k) * (k + 1));  // a†b |k> -> |k+1>
        m(k + 1, k) += up;
        m(k, k + 1) += std::sqrt(double(k + 1) * (n - k));  // b†a |k+1> -> |k>
      }
      break;
    case SpinAxis::y:
      for (int k = 0; k < n; ++k) {
        m(k + 1, k) += -i * std::sqrt(double(n - k) * (k + 1));
        m(k, k + 1) += i * std::sqrt(double(k + 1) * (n - k));
      }
      break;
  }
  return m;
}

Eigen::MatrixXcd expi_hermitian(const Eigen::MatrixXcd& m, double t) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::invalid_argument, "matrix must be square");
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(ErrorCode::numerical, "matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::numerical, "eigendecomposition failed");
  Eigen::VectorXcd phases(m.rows());
  for (int j = 0; j < m.rows(); ++j) phases(j) = std::polar(1.0, t * es.eigenvalues()(j));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXcd hadamard_unitary(int n_particles) {
  return expi_hermitian(spin_matrix(SpinAxis::y, n_particles), 3.0 * kPi / 4.0);
}

Eigen::Matrix2cd hadamard_mode_rotation() {
  // exp(3i*pi/4 sigma_y) in mode order (a, b).
  const double c = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd u;
  u << -c, c, -c, -c;
  return u;
}

CoherentParams rotate_coherent(const CoherentParams& p, const Eigen::Matrix2cd& u) {
  check_normalized(p);
  if ((u.adjoint() * u - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(ErrorCode::invalid_argument, "mode rotation is not unitary");
  return {u(0, 0) * p.alpha + u(0, 1) * p.beta, u(1, 0) * p.alpha + u(1, 1) * p.beta,
          p.n_particles};
}

CoherentParams basis_rotated_params(const MeasurementBasisSpec& spec, const CoherentParams& p) {
  check_normalized(p);
  if (spec.n_particles != p.n_particles)
    throw Error(ErrorCode::invalid_argument, "basis and state particle numbers differ");
  if (spec.big_l < 2.0) throw Error(ErrorCode::invalid_argument, "L must be >= 2");

  // Amplitude <q| H† P_theta† |p>; both adjoints act on the parameter side.
  const Eigen::Matrix2cd hd = hadamard_mode_rotation().adjoint();
  cplx a = p.alpha, b = p.beta;
  if (spec.variant == BasisVariant::hadamard_basis) {
    cplx a0 = hd(0, 0) * a + hd(0, 1) * b, b0 = hd(1, 0) * a + hd(1, 1) * b;
    a = a0;
    b = b0;
  }
  double phi = 2.0 * kPi * spec.theta / spec.big_l - kPi / 2.0;
  b *= std::polar(1.0, phi);
  cplx a2 = hd(0, 0) * a + hd(0, 1) * b, b2 = hd(1, 0) * a + hd(1, 1) * b;
  return {a2, b2, spec.n_particles};
}

cplx basis_amplitude(const MeasurementBasisSpec& spec, const CoherentParams& p) {
  if (spec.q < 0 || spec.q > spec.n_particles)
    throw Error(ErrorCode::invalid_argument, "basis index q out of range");
  CoherentParams r = basis_rotated_params(spec, p);
  return weighted_monomial(spec.n_particles, spec.q, r.alpha, r.beta);
}

std::vector<double> binomial_pmf_row(int n, double r) {
  if (n < 0) throw Error(ErrorCode::invalid_argument, "binomial row needs n >= 0");
  if (r < -1e-12 || r > 1.0 + 1e-12)
    throw Error(ErrorCode::invalid_argument, "binomial rate must lie in [0, 1]");
  r = std::min(1.0, std::max(0.0, r));
  std::vector<double> row(static_cast<std::size_t>(n) + 1, 0.0);
  if (r == 0.0) {
    row[0] = 1.0;
    return row;
  }
  if (r == 1.0) {
    row[static_cast<std::size_t>(n)] = 1.0;
    return row;
  }
  int mode = std::min(n, std::max(0, static_cast<int>(std::lround(n * r))));
  row[mode] = std::exp(log_binom(n, mode) + mode * std::log(r) + (n - mode) * std::log1p(-r));
  const double odds = r / (1.0 - r);
  for (int k = mode; k < n; ++k)
    row[k + 1] = row[k] * (double(n - k) / double(k + 1)) * odds;
  for (int k = mode; k > 0; --k)
    row[k - 1] = row[k] * (double(k) / double(n - k + 1)) / odds;
  double total = 0.0;
  for (double v : row) total += v;
  for (double& v : row) v /= total;
  return row;
}

}  // namespace hmq::spin
