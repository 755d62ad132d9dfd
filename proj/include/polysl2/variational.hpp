#pragma once

// SL(2) coherent-state machinery: displacement operators and their
// disentangled form, the energy functional <v| S H S^+ |v> (matrix route),
// its closed hypergeometric form (formula route), the stationarity polynomial
// and the resulting variational and quasi-equidistant spectra.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "polysl2/algebra.hpp"
#include "polysl2/error.hpp"
#include "polysl2/exact.hpp"
#include "polysl2/models.hpp"
#include "polysl2/special.hpp"

namespace polysl2 {

/// xi = r e^{i theta}.
struct GcsParameters {
  double r = 0.0;
  double theta = 0.0;
  AlgebraKind kind = AlgebraKind::SU2;

  double t() const noexcept { return kind == AlgebraKind::SU2 ? std::tan(r) : std::tanh(r); }
  double c() const noexcept { return kind == AlgebraKind::SU2 ? std::cos(r) : std::cosh(r); }
  double s() const noexcept { return kind == AlgebraKind::SU2 ? std::sin(r) : std::sinh(r); }
  cplx xi() const noexcept { return std::polar(r, theta); }
};

/// exp(xi Y+ - xi* Y-) in the |v> basis, through the Hermitian generator
/// i(xi Y+ - xi* Y-).
inline Eigen::MatrixXcd displacement_matrix(const SubspaceSpec& spec, const GcsParameters& xi) {
  const auto g = generator_matrices(spec);
  const cplx z = xi.xi();
  const Eigen::MatrixXcd gen = z * g.yplus.cast<cplx>() - std::conj(z) * g.yminus.cast<cplx>();
  const Eigen::MatrixXcd herm = cplx(0.0, 1.0) * gen;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::non_convergence, "displacement_matrix: eigensolver failed");
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::polar(1.0, -es.eigenvalues()(i));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

namespace detail {
using cplx_l = std::complex<long double>;
using MatrixXcl = Eigen::Matrix<cplx_l, Eigen::Dynamic, Eigen::Dynamic>;

/// exp(z Y+) for the sl(2) raising matrix, entry by entry:
/// (v+m, v) -> z^m / m! * prod_{i<m} ladder(v+i).
inline MatrixXcl raising_exp(const SubspaceSpec& spec, cplx_l z) {
  const int n = spec.dim;
  const auto sign = spec.kind == AlgebraKind::SU2 ? -1 : 1;
  MatrixXcl out = MatrixXcl::Zero(n, n);
  for (int v = 0; v < n; ++v) {
    cplx_l term = 1.0L;
    out(v, v) = term;
    for (int w = v + 1; w < n; ++w) {
      const long double ladder = std::sqrt(static_cast<long double>(w) * (spec.twice_j + sign * (w - 1)));
      term *= z * ladder / static_cast<long double>(w - v);
      out(w, v) = term;
    }
  }
  return out;
}
}  // namespace detail

/// exp(t e^{i theta} Y+) exp(-2 ln c(r) Y0) exp(-t e^{-i theta} Y-), with
/// t = tan r, c = cos r (su2) or tanh r, cosh r (su11).
/// The factors grow like t^{2j} and cancel, so everything runs in long double.
inline Eigen::MatrixXcd disentangled_displacement(const SubspaceSpec& spec, const GcsParameters& xi) {
  using detail::cplx_l;
  using detail::MatrixXcl;
  const long double r = xi.r;
  const bool su2 = xi.kind == AlgebraKind::SU2;
  const long double t = su2 ? std::tan(r) : std::tanh(r);
  const long double lnc = std::log(std::abs(su2 ? std::cos(r) : std::cosh(r)));
  const cplx_l e = std::polar(1.0L, static_cast<long double>(xi.theta));
  const long double y00 = su2 ? -spec.twice_j / 2.0L : spec.twice_j / 2.0L;
  Eigen::Matrix<cplx_l, Eigen::Dynamic, 1> mid(spec.dim);
  for (int v = 0; v < spec.dim; ++v) mid(v) = std::exp(-2.0L * lnc * (y00 + v));
  // exp(-z* Y-) = exp(-z Y+)^T for real ladder entries.
  const MatrixXcl lower = detail::raising_exp(spec, t * e);
  const MatrixXcl upper = detail::raising_exp(spec, -t * std::conj(e)).transpose();
  const MatrixXcl out = lower * mid.asDiagonal() * upper;
  Eigen::MatrixXcd res(spec.dim, spec.dim);
  for (Eigen::Index i = 0; i < res.rows(); ++i)
    for (Eigen::Index k = 0; k < res.cols(); ++k)
      res(i, k) = cplx(static_cast<double>(out(i, k).real()), static_cast<double>(out(i, k).imag()));
  return res;
}

/// <v| S H S^+ |v>: brute-force matrix route.
inline double energy_functional(const ModelOnSubspace& m, int v, const GcsParameters& xi) {
  if (v < 0 || v >= m.spec.dim) throw Error(ErrorCode::invalid_argument, "energy_functional: level out of range");
  const Eigen::MatrixXcd h = dense_hamiltonian(build_tridiagonal(m));
  const Eigen::MatrixXcd s = displacement_matrix(m.spec, xi);
  const Eigen::RowVectorXcd row = s.row(v);
  return (row * h * row.adjoint())(0, 0).real();
}

namespace detail {

using real_t = long double;

inline real_t ipow(real_t x, int n) {
  if (n < 0) return real_t(1) / ipow(x, -n);
  real_t out = 1;
  while (n) {
    if (n & 1) out *= x;
    x *= x;
    n >>= 1;
  }
  return out;
}

/// sin^{c-1} F(-v, 2j-v+1; c; sin^2) / Gamma(c), finite for every integer c.
inline real_t weighted_gauss(int v, int twice_j, int c, real_t sn) {
  const real_t x = sn * sn;
  const real_t b = real_t(twice_j - v + 1);
  if (c >= 1) return ipow(sn, c - 1) * hypergeometric_terminating_regularized<real_t>(-v, b, c, x);
  // the x^{1-c} carried by the regularized function supplies sin^{2(1-c)}
  const int k = 1 - c;
  if (k > v) return 0;
  real_t pre = 1;
  for (int i = 0; i < k; ++i) pre *= (real_t(-v) + i) * (b + i);
  for (int i = 1; i <= k; ++i) pre /= real_t(i);
  return pre * ipow(sn, k) * hypergeometric_terminating<real_t>(-v + k, b + k, real_t(k + 1), x);
}

/// sum_f E^phi_f(r; j; v) evaluated directly at (v, r).
inline real_t coupling_sum_direct(const std::vector<double>& sqrt_phi, int twice_j, int v, real_t r) {
  const real_t sn = std::sin(r), cs = std::cos(r);
  real_t sum = 0;
  for (int f = 0; f < twice_j; ++f) {
    const real_t w = std::exp(static_cast<real_t>(log_factorial(twice_j - v) + log_factorial(f + 1) - log_factorial(v) -
                                                  log_factorial(twice_j - f - 1)));
    sum += real_t(sqrt_phi[static_cast<std::size_t>(f)]) * w * ipow(cs, 2 * twice_j - 2 * f - 2 * v - 1) *
           weighted_gauss(v, twice_j, f - v + 1, sn) * weighted_gauss(v, twice_j, f - v + 2, sn);
  }
  return sum;
}

}  // namespace detail

/// sum_f E^phi_f(r; j; v). Past |r| = pi/4 the identity
/// sum(v, r) = -sum(2j - v, ±pi/2 - r) keeps the Gauss argument <= 1/2.
inline double coupling_sum(const std::vector<double>& sqrt_phi, int twice_j, int v, double r) {
  using detail::real_t;
  const real_t rr = r;
  const real_t quarter = std::numbers::pi_v<real_t> / 4;
  bool reflect = std::abs(rr) > quarter;
  if (v == 0) reflect = false;
  if (v == twice_j && v > 0) reflect = true;
  if (!reflect) return static_cast<double>(detail::coupling_sum_direct(sqrt_phi, twice_j, v, rr));
  const real_t half_pi = std::numbers::pi_v<real_t> / 2;
  const real_t reflected = rr >= 0 ? half_pi - rr : -half_pi - rr;
  return -static_cast<double>(detail::coupling_sum_direct(sqrt_phi, twice_j, twice_j - v, reflected));
}

/// sqrt(phi(-j + f)) for f = 0..2j-1.
inline std::vector<double> sqrt_phi_table(const ModelOnSubspace& m) {
  const auto phi = m.phi();
  std::vector<double> out;
  for (int f = 0; f < m.spec.twice_j; ++f) {
    const double p = phi(m.spec.y0_of(f));
    if (p < -1e-12) throw Error(ErrorCode::non_unitarizable, "phi(-j+f) < 0");
    out.push_back(std::sqrt(std::max(p, 0.0)));
  }
  return out;
}

/// Closed hypergeometric form of the energy functional at xi = r e^{i arg g}:
/// E_v = C + a(l0+j) + a(-j+v) cos 2r - 2|g| sum_f E^phi_f(r; j; v).
inline double spectral_formula_energy(const ModelOnSubspace& m, int v, double r) {
  if (m.spec.kind != AlgebraKind::SU2) throw Error(ErrorCode::invalid_argument, "spectral_formula_energy: su2 blocks only");
  if (v < 0 || v > m.spec.twice_j) throw Error(ErrorCode::invalid_argument, "spectral_formula_energy: level out of range");
  const double j = m.spec.j();
  const double base = m.tilde_C() + m.a * (-j + v) * std::cos(2.0 * r);
  if (m.spec.twice_j == 0 || std::abs(m.g) == 0.0) return base;
  return base - 2.0 * std::abs(m.g) * coupling_sum(sqrt_phi_table(m), m.spec.twice_j, v, r);
}

/// Real polynomial in alpha = -tan r whose zeros are the stationary points of
/// the v = 0 functional.
struct StationarityPolynomial {
  std::vector<double> coefficients;  // ascending powers of alpha

  int degree() const noexcept {
    for (int d = static_cast<int>(coefficients.size()) - 1; d >= 0; --d)
      if (coefficients[static_cast<std::size_t>(d)] != 0.0) return d;
    return -1;
  }

  double operator()(double alpha) const noexcept {
    double p = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) p = p * alpha + *it;
    return p;
  }

  double derivative(double alpha) const noexcept {
    double p = 0.0;
    for (std::size_t k = coefficients.size(); k-- > 1;) p = p * alpha + double(k) * coefficients[k];
    return p;
  }

  /// |P(alpha)| / sum_k |c_k alpha^k|.
  double relative_residual(double alpha) const noexcept {
    double scale = 0.0, pw = 1.0;
    for (double c : coefficients) {
      scale += std::abs(c) * pw;
      pw *= std::abs(alpha);
    }
    return scale > 0.0 ? std::abs((*this)(alpha)) / scale : 0.0;
  }
};

inline StationarityPolynomial stationarity_polynomial(const ModelOnSubspace& m) {
  const double gabs = std::abs(m.g);
  if (gabs == 0.0) throw Error(ErrorCode::invalid_argument, "stationarity polynomial undefined at g = 0");
  const int tj = m.spec.twice_j;
  const double j = m.spec.j();
  const auto sphi = sqrt_phi_table(m);
  StationarityPolynomial p;
  p.coefficients.assign(static_cast<std::size_t>(std::max(2 * tj + 1, 1)), 0.0);
  for (int f = 0; f < tj; ++f) {
    const double w = std::exp(-log_factorial(tj - 1 - f) - log_factorial(f));
    const double sp = sphi[static_cast<std::size_t>(f)];
    const auto k = static_cast<std::size_t>(2 * f);
    // alpha^{2f} { a alpha/|g| - [4 j alpha^2 - (1 + alpha^2)(2f + 1)] sqrt(phi) }
    p.coefficients[k] += w * (2.0 * f + 1.0) * sp;
    p.coefficients[k + 1] += w * m.a / gabs;
    p.coefficients[k + 2] += -w * (4.0 * j - (2.0 * f + 1.0)) * sp;
  }
  return p;
}

namespace detail {

inline double polish_root(const StationarityPolynomial& p, double x) {
  for (int it = 0; it < 100; ++it) {
    const double d = p.derivative(x);
    if (d == 0.0) break;
    const double step = p(x) / d;
    x -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

inline double bisect_r(const StationarityPolynomial& p, double lo, double hi, int twice_j) {
  auto q = [&](double r) { return p(-std::tan(r)) * std::pow(std::cos(r), 2 * twice_j); };
  double flo = q(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = q(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Real zeros of a StationarityPolynomial: companion-matrix eigenvalues,
/// Newton-polished, then cross-checked against sign changes of
/// P(-tan r) cos^{4j} r on a grid over (-pi/2, pi/2).
inline std::vector<double> real_roots(const StationarityPolynomial& p, int twice_j) {
  std::vector<double> roots;
  const int deg = p.degree();
  if (deg < 1) return roots;
  const double lead = p.coefficients[static_cast<std::size_t>(deg)];
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -p.coefficients[static_cast<std::size_t>(i)] / lead;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::non_convergence, "companion eigenvalues did not converge");
  auto add = [&](double x) {
    for (double r : roots)
      if (std::abs(r - x) <= 1e-9 * std::max(1.0, std::abs(x))) return;
    roots.push_back(x);
  };
  for (Eigen::Index i = 0; i < deg; ++i) {
    const cplx z = es.eigenvalues()(i);
    if (std::abs(z.imag()) > 1e-6 * std::max(1.0, std::abs(z))) continue;
    const double x = detail::polish_root(p, z.real());
    if (p.relative_residual(x) < 1e-9) add(x);
  }
  constexpr int grid = 4096;
  const double half_pi = std::numbers::pi / 2;
  auto q = [&](double r) { return p(-std::tan(r)) * std::pow(std::cos(r), 2 * twice_j); };
  double prev_r = -half_pi + 1e-9, prev_q = q(prev_r);
  for (int i = 1; i <= grid; ++i) {
    const double r = -half_pi + 1e-9 + (std::numbers::pi - 2e-9) * i / grid;
    const double qr = q(r);
    if ((qr < 0) != (prev_q < 0)) {
      const double lo_a = -std::tan(r), hi_a = -std::tan(prev_r);
      const bool covered = std::any_of(roots.begin(), roots.end(), [&](double a) { return a >= lo_a && a <= hi_a; });
      if (!covered) add(detail::polish_root(p, -std::tan(detail::bisect_r(p, prev_r, r, twice_j))));
    }
    prev_r = r;
    prev_q = qr;
  }
  return roots;
}

struct StationaryPoint {
  double alpha = 0.0;  // -tan r
  double r = 0.0;      // principal branch (-pi/2, pi/2)
  double e0 = 0.0;     // v = 0 functional value
  double residual = 0.0;
};

/// All real stationary points of the v = 0 functional, sorted by e0.
inline std::vector<StationaryPoint> stationarity_roots(const ModelOnSubspace& m) {
  if (m.spec.kind != AlgebraKind::SU2) throw Error(ErrorCode::invalid_argument, "stationarity_roots: su2 blocks only");
  if (std::abs(m.g) == 0.0)
    throw Error(ErrorCode::invalid_argument, "stationarity_roots: |g| = 0, use the exact diagonal spectrum");
  if (m.spec.twice_j == 0) return {{0.0, 0.0, m.tilde_C(), 0.0}};
  const auto poly = stationarity_polynomial(m);
  std::vector<StationaryPoint> out;
  for (double alpha : real_roots(poly, m.spec.twice_j)) {
    const double r = -std::atan(alpha);
    out.push_back({alpha, r, spectral_formula_energy(m, 0, r), poly.relative_residual(alpha)});
  }
  if (out.empty()) throw Error(ErrorCode::no_root, "stationarity_roots: no real root of the stationarity polynomial");
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return x.e0 != y.e0 ? x.e0 < y.e0 : x.alpha < y.alpha;
  });
  return out;
}

/// Index into the e0-sorted root list; 0 selects the global minimum.
struct RootPolicy {
  std::size_t index = 0;
};

struct VariationalSpectrum {
  double alpha = 0.0;
  double r = 0.0;
  double residual = 0.0;
  std::vector<double> energies;  // E_v, v = 0..2j
  std::vector<StationaryPoint> all_roots;

  Spectrum spectrum() const { return {Method::Variational, energies}; }
  GcsParameters gcs(const ModelOnSubspace& m) const { return {r, std::arg(m.g), AlgebraKind::SU2}; }
};

inline VariationalSpectrum variational_spectrum(const ModelOnSubspace& m, RootPolicy policy = {}) {
  if (m.spec.kind != AlgebraKind::SU2) throw Error(ErrorCode::invalid_argument, "variational_spectrum: su2 blocks only");
  VariationalSpectrum out;
  if (std::abs(m.g) == 0.0) {
    for (int v = 0; v < m.spec.dim; ++v) out.energies.push_back(m.C + m.a * (m.spec.l0 + v));
    out.all_roots = {{0.0, 0.0, out.energies.front(), 0.0}};
    return out;
  }
  out.all_roots = stationarity_roots(m);
  if (policy.index >= out.all_roots.size())
    throw Error(ErrorCode::invalid_argument, "variational_spectrum: root index " + std::to_string(policy.index) +
                                                 " out of range (" + std::to_string(out.all_roots.size()) + " roots)");
  const auto& root = out.all_roots[policy.index];
  out.alpha = root.alpha;
  out.r = root.r;
  out.residual = root.residual;
  for (int v = 0; v < m.spec.dim; ++v) out.energies.push_back(spectral_formula_energy(m, v, out.r));
  return out;
}

enum class PhiAverage { Midpoint, Mean };

struct QuasiEquidistantSpectrum {
  Spectrum spectrum{Method::QuasiEquidistant, {}};
  double phi_bar = 1.0;
  double spacing = 0.0;
  double r = 0.0;  // displacement diagonalizing the effective linear model
};

/// Linear-model spectrum with g sqrt(phi(Y0)) frozen to g sqrt(phi_bar).
inline QuasiEquidistantSpectrum quasi_equidistant_spectrum(const ModelOnSubspace& m, PhiAverage policy = PhiAverage::Midpoint,
                                                           int n_levels = 0) {
  const auto phi = m.phi();
  QuasiEquidistantSpectrum out;
  if (policy == PhiAverage::Midpoint) {
    out.phi_bar = phi(m.spec.y0_of(0) + (m.spec.dim - 1) / 2.0);
  } else {
    double sum = 0.0;
    for (int v = 0; v < m.spec.dim; ++v) sum += phi(m.spec.y0_of(v));
    out.phi_bar = sum / m.spec.dim;
  }
  if (out.phi_bar < 0.0) throw Error(ErrorCode::invalid_argument, "quasi-equidistant: averaged phi is negative");
  const double geff = std::abs(m.g) * std::sqrt(out.phi_bar);
  const int levels = n_levels > 0 ? std::min(n_levels, m.spec.dim) : m.spec.dim;
  if (m.spec.kind == AlgebraKind::SU2) {
    out.spacing = std::sqrt(m.a * m.a + 4.0 * geff * geff);
    out.r = 0.5 * std::atan2(2.0 * geff, m.a);
    for (int v = 0; v < levels; ++v) out.spectrum.values.push_back(m.tilde_C() + (-m.spec.j() + v) * out.spacing);
  } else {
    if (m.a <= 0.0 || m.a * m.a <= 4.0 * geff * geff)
      throw Error(ErrorCode::invalid_argument, "quasi-equidistant su11: need a > 2|g_eff| for a discrete spectrum");
    out.spacing = std::sqrt(m.a * m.a - 4.0 * geff * geff);
    out.r = 0.5 * std::atanh(2.0 * geff / m.a);
    for (int v = 0; v < levels; ++v) out.spectrum.values.push_back(m.tilde_C() + (m.spec.j() + v) * out.spacing);
  }
  return out;
}

}  // namespace polysl2
