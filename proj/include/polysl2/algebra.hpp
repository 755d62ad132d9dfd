#pragma once

// Polynomial sl(2) core: structure polynomials, invariant-subspace labels,
// ladder matrix elements and the sl(2) generators obtained from them through
// the generalized Holstein-Primakoff map.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "polysl2/error.hpp"

namespace polysl2 {

enum class AlgebraKind { SU2, SU11 };

inline std::string to_string(AlgebraKind k) { return k == AlgebraKind::SU2 ? "su2" : "su11"; }

/// +1 for su(2) (finite blocks), -1 for su(1,1). Selects the upper/lower sign
/// in every "±" / "∓" of the mapping formulas.
constexpr double sign_of(AlgebraKind k) noexcept { return k == AlgebraKind::SU2 ? 1.0 : -1.0; }

/// psi(x) = A * prod_i (x - z_i).  Stored by its zeros z_i = -lambda_i so that
/// evaluation is a product and lowest-weight checks are proximity tests.
class StructurePolynomial {
 public:
  StructurePolynomial(double leading, std::vector<double> zeros)
      : leading_(leading), zeros_(std::move(zeros)) {
    if (leading_ == 0.0 || !std::isfinite(leading_))
      throw Error(ErrorCode::invalid_argument, "structure polynomial: leading coefficient must be finite and nonzero");
    for (double z : zeros_)
      if (!std::isfinite(z)) throw Error(ErrorCode::invalid_argument, "structure polynomial: non-finite zero");
  }

  /// Build from the lambda_i of psi = A prod (x + lambda_i).
  static StructurePolynomial from_lambdas(double leading, const std::vector<double>& lambdas) {
    std::vector<double> zeros(lambdas.size());
    std::transform(lambdas.begin(), lambdas.end(), zeros.begin(), [](double l) { return -l; });
    return {leading, std::move(zeros)};
  }

  /// Quadratic structure function of sl(2) itself on the spin-j block:
  /// su(2): (j + x)(j + 1 - x),  su(1,1): (x - j)(x + j - 1).
  static StructurePolynomial sl2(AlgebraKind kind, int twice_j) {
    const double j = twice_j / 2.0;
    if (kind == AlgebraKind::SU2) return {-1.0, {-j, j + 1.0}};
    return {1.0, {j, 1.0 - j}};
  }

  int degree() const noexcept { return static_cast<int>(zeros_.size()); }
  double leading_coefficient() const noexcept { return leading_; }
  std::span<const double> zeros() const noexcept { return zeros_; }

  std::vector<double> lambdas() const {
    std::vector<double> out(zeros_.size());
    std::transform(zeros_.begin(), zeros_.end(), out.begin(), [](double z) { return -z; });
    return out;
  }

  double operator()(double x) const noexcept {
    double p = leading_;
    for (double z : zeros_) p *= (x - z);
    return p;
  }

  double derivative(double x) const noexcept {
    double sum = 0.0;
    for (std::size_t i = 0; i < zeros_.size(); ++i) {
      double p = leading_;
      for (std::size_t k = 0; k < zeros_.size(); ++k)
        if (k != i) p *= (x - zeros_[k]);
      sum += p;
    }
    return sum;
  }

  std::optional<std::size_t> find_zero(double x, double tol = 1e-10) const noexcept {
    for (std::size_t i = 0; i < zeros_.size(); ++i)
      if (std::abs(zeros_[i] - x) <= tol * std::max(1.0, std::abs(x))) return i;
    return std::nullopt;
  }

  /// Divide out the factor (x - zero); nullopt if zero is not a stored zero.
  std::optional<StructurePolynomial> deflate(double zero, double tol = 1e-10) const {
    auto idx = find_zero(zero, tol);
    if (!idx) return std::nullopt;
    std::vector<double> rest;
    rest.reserve(zeros_.size() - 1);
    for (std::size_t i = 0; i < zeros_.size(); ++i)
      if (i != *idx) rest.push_back(zeros_[i]);
    return StructurePolynomial(leading_, std::move(rest));
  }

 private:
  double leading_;
  std::vector<double> zeros_;
};

/// One irreducible block L([l_i]).  j is carried as the integer 2j.
struct SubspaceSpec {
  AlgebraKind kind = AlgebraKind::SU2;
  double l0 = 0.0;
  int twice_j = 0;
  int dim = 1;                 // su(2): 2j+1; su(1,1): truncation size
  std::vector<double> labels;  // eigenvalues of the integrals R_i

  static SubspaceSpec su2(double l0, int twice_j, std::vector<double> labels = {}) {
    if (twice_j < 0) throw Error(ErrorCode::invalid_argument, "su2 subspace: 2j must be nonnegative");
    return {AlgebraKind::SU2, l0, twice_j, twice_j + 1, std::move(labels)};
  }

  static SubspaceSpec su11(double l0, int twice_j, int truncation, std::vector<double> labels = {}) {
    if (twice_j <= 0) throw Error(ErrorCode::invalid_argument, "su11 subspace: Bargmann index must be positive");
    if (truncation < 1) throw Error(ErrorCode::invalid_argument, "su11 subspace: truncation must be positive");
    return {AlgebraKind::SU11, l0, twice_j, truncation, std::move(labels)};
  }

  double j() const noexcept { return twice_j / 2.0; }
  double sign() const noexcept { return sign_of(kind); }
  bool finite() const noexcept { return kind == AlgebraKind::SU2; }

  /// Y0 eigenvalue of basis vector |v>: -j+v (su2) or j+v (su11).
  double y0_of(int v) const noexcept { return -sign() * j() + v; }
  /// V0 = Y0 + l0 ± j.
  double v0_shift() const noexcept { return l0 + sign() * j(); }

  /// The zero of psi sitting at the far edge of the Holstein-Primakoff
  /// denominator: l0 + 2j + 1 (su2, top of the block) or l0 - 2j + 1 (su11).
  double partner_zero() const noexcept {
    return kind == AlgebraKind::SU2 ? l0 + twice_j + 1.0 : l0 - twice_j + 1.0;
  }

  SubspaceSpec with_truncation(int n) const {
    if (kind != AlgebraKind::SU11) throw Error(ErrorCode::invalid_argument, "only su11 subspaces are truncated");
    auto out = *this;
    out.dim = n;
    return out;
  }
};

inline double eval_psi(const StructurePolynomial& sp, double x) noexcept { return sp(x); }

/// Structural validity of (psi, block): lowest weight is a zero, su(2) blocks
/// also close at the top.
inline void validate(const StructurePolynomial& sp, const SubspaceSpec& spec) {
  if (spec.kind == AlgebraKind::SU2 && spec.dim != spec.twice_j + 1)
    throw Error(ErrorCode::invalid_argument, "su2 subspace: dim must equal 2j+1");
  if (spec.dim < 1) throw Error(ErrorCode::invalid_argument, "subspace dimension must be positive");
  if (std::abs(sp(spec.l0)) > 1e-12 && !sp.find_zero(spec.l0))
    throw Error(ErrorCode::invalid_argument, "lowest weight l0 is not a zero of psi");
  if (spec.kind == AlgebraKind::SU2 && std::abs(sp(spec.l0 + spec.dim)) > 1e-10 && !sp.find_zero(spec.l0 + spec.dim))
    throw Error(ErrorCode::invalid_argument, "su2 subspace: psi(l0 + dim) must vanish");
}

/// phi_{n-2}(Y0) of the Holstein-Primakoff map, evaluated through the psi
/// polynomial deflated by its two edge zeros whenever both are present; the
/// plain ratio is the fallback and refuses 0/0.
class PhiFunction {
 public:
  PhiFunction(const StructurePolynomial& sp, const SubspaceSpec& spec)
      : psi_(sp), spec_(spec), shift_(spec.l0 + spec.sign() * spec.j() + 1.0) {
    if (auto once = sp.deflate(spec.l0))
      if (auto twice = once->deflate(spec.partner_zero())) {
        // su2 denominator (j - y0)(j + 1 + y0) = -(x - l0)(x - l0 - 2j - 1),
        // su11 denominator (j + y0)(1 - j + y0) = (x - l0)(x - l0 + 2j - 1).
        const double s = spec.kind == AlgebraKind::SU2 ? -1.0 : 1.0;
        deflated_.emplace(s * twice->leading_coefficient(), std::vector<double>(twice->zeros().begin(), twice->zeros().end()));
      }
  }

  bool deflated() const noexcept { return deflated_.has_value(); }

  double operator()(double y0) const {
    const double x = y0 + shift_;
    if (deflated_) return (*deflated_)(x);
    const double den = denominator(y0);
    if (std::abs(den) < 1e-12)
      throw Error(ErrorCode::removable_singularity,
                  "phi: Holstein-Primakoff denominator vanishes at y0 = " + std::to_string(y0) +
                      " and psi has no matching edge zeros to deflate");
    return psi_(x) / den;
  }

  double derivative(double y0) const {
    const double x = y0 + shift_;
    if (deflated_) return deflated_->derivative(x);
    const double h = 1e-6 * std::max(1.0, std::abs(y0));
    return ((*this)(y0 + h) - (*this)(y0 - h)) / (2 * h);
  }

 private:
  double denominator(double y0) const noexcept {
    const double j = spec_.j();
    if (spec_.kind == AlgebraKind::SU2) return (j - y0) * (j + 1.0 + y0);
    return (j + y0) * (1.0 - j + y0);
  }

  StructurePolynomial psi_;
  SubspaceSpec spec_;
  double shift_;
  std::optional<StructurePolynomial> deflated_;
};

inline double phi_from_psi(const StructurePolynomial& sp, const SubspaceSpec& spec, double y0) {
  return PhiFunction(sp, spec)(y0);
}

/// sqrt(psi(l0 + v)) for v = 1..dim-1: the V_± matrix elements in |[l_i]; v>.
inline std::vector<double> ladder_elements(const StructurePolynomial& sp, const SubspaceSpec& spec) {
  std::vector<double> out;
  out.reserve(spec.dim > 0 ? spec.dim - 1 : 0);
  for (int v = 1; v < spec.dim; ++v) {
    const double p = sp(spec.l0 + v);
    if (p < -1e-12)
      throw Error(ErrorCode::non_unitarizable,
                  "psi(l0 + " + std::to_string(v) + ") = " + std::to_string(p) + " < 0: representation not unitarizable");
    out.push_back(std::sqrt(std::max(p, 0.0)));
  }
  return out;
}

struct GeneratorMatrices {
  Eigen::MatrixXd y0, yplus, yminus;
};

/// Lowest-weight representation of Y0, Y± in the basis |v>, v = 0..dim-1.
inline GeneratorMatrices generator_matrices(const SubspaceSpec& spec) {
  const int n = spec.dim;
  GeneratorMatrices g{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
  for (int v = 0; v < n; ++v) g.y0(v, v) = spec.y0_of(v);
  for (int v = 0; v + 1 < n; ++v) {
    const double w = spec.kind == AlgebraKind::SU2 ? (v + 1.0) * (spec.twice_j - v) : (v + 1.0) * (spec.twice_j + v);
    g.yplus(v + 1, v) = std::sqrt(std::max(w, 0.0));
  }
  g.yminus = g.yplus.transpose();
  return g;
}

struct CommutatorResiduals {
  double polynomial = 0.0;  // [V-, V+] - (psi(V0+1) - psi(V0))
  double mapped = 0.0;      // [Y-, Y+] ± 2 Y0 for Y+ = V+ phi(Y0)^{-1/2}
  double max() const noexcept { return std::max(polynomial, mapped); }
};

inline CommutatorResiduals verify_pd_commutator(const StructurePolynomial& sp, const SubspaceSpec& spec) {
  const auto ladder = ladder_elements(sp, spec);
  const int n = spec.dim;
  Eigen::MatrixXd vp = Eigen::MatrixXd::Zero(n, n);
  for (int v = 0; v + 1 < n; ++v) vp(v + 1, v) = ladder[v];
  const Eigen::MatrixXd vm = vp.transpose();
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, n);
  for (int v = 0; v < n; ++v) {
    const double x = spec.l0 + v;
    rhs(v, v) = sp(x + 1.0) - sp(x);
  }
  // Truncated su(1,1) blocks lose the last row of the algebra.
  const int keep = spec.finite() ? n : n - 1;
  CommutatorResiduals res;
  if (keep > 0) res.polynomial = (vm * vp - vp * vm - rhs).topLeftCorner(keep, keep).cwiseAbs().maxCoeff();

  const PhiFunction phi(sp, spec);
  Eigen::MatrixXd yp = Eigen::MatrixXd::Zero(n, n);
  for (int v = 0; v + 1 < n; ++v) {
    const double f = phi(spec.y0_of(v));
    if (f <= 0.0)
      throw Error(ErrorCode::non_unitarizable, "phi vanishes inside the block; mapped generators undefined");
    yp(v + 1, v) = ladder[v] / std::sqrt(f);
  }
  const Eigen::MatrixXd ym = yp.transpose();
  Eigen::MatrixXd y0 = Eigen::MatrixXd::Zero(n, n);
  for (int v = 0; v < n; ++v) y0(v, v) = spec.y0_of(v);
  if (keep > 0)
    res.mapped = (ym * yp - yp * ym + spec.sign() * 2.0 * y0).topLeftCorner(keep, keep).cwiseAbs().maxCoeff();
  return res;
}

}  // namespace polysl2
