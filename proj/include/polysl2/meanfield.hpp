#pragma once

// Mean-field (Ehrenfest) approximation: the factorized functional
// a<Y0> + 2 Re[<Y+> g sqrt(phi(<Y0>))] + C~ and, for three-boson blocks, its
// closed-form spectrum and stationarity condition.

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "polysl2/error.hpp"
#include "polysl2/exact.hpp"
#include "polysl2/models.hpp"
#include "polysl2/variational.hpp"

namespace polysl2 {

struct GcsExpectations {
  double y0 = 0.0;
  cplx yplus{0.0, 0.0};
};

/// <v| S Y0 S^+ |v> and <v| S Y+ S^+ |v>.
inline GcsExpectations gcs_expectations(const SubspaceSpec& spec, int v, const GcsParameters& xi) {
  if (v < 0 || v >= spec.dim) throw Error(ErrorCode::invalid_argument, "gcs_expectations: level out of range");
  const auto g = generator_matrices(spec);
  const Eigen::MatrixXcd s = displacement_matrix(spec, xi);
  const Eigen::RowVectorXcd row = s.row(v);
  return {(row * g.y0.cast<cplx>() * row.adjoint())(0, 0).real(),
          (row * g.yplus.cast<cplx>() * row.adjoint())(0, 0)};
}

inline double mfa_functional(const ModelOnSubspace& m, int v, const GcsParameters& xi) {
  if (m.spec.kind != AlgebraKind::SU2) throw Error(ErrorCode::invalid_argument, "mfa_functional: su2 blocks only");
  const auto ev = gcs_expectations(m.spec, v, xi);
  const double phi = m.phi()(ev.y0);
  if (phi < 0.0)
    throw Error(ErrorCode::invalid_argument, "mfa_functional: phi(<Y0>) = " + std::to_string(phi) + " < 0");
  return m.a * ev.y0 + 2.0 * (ev.yplus * m.g).real() * std::sqrt(phi) + m.tilde_C();
}

struct MeanFieldRoot {
  double r = 0.0;
  double e0 = 0.0;
  double residual = 0.0;
};

struct MeanFieldResult {
  double r = 0.0;
  std::vector<double> energies;  // E_v, v = 0..2j
  double residual = 0.0;
  std::vector<MeanFieldRoot> all_roots;  // sorted by e0

  Spectrum spectrum() const { return {Method::MeanField, energies}; }
};

namespace detail {

inline const ThreeBosonLabels& require_tb(const ModelOnSubspace& m, const char* who) {
  if (!m.three_boson || m.spec.kind != AlgebraKind::SU2)
    throw Error(ErrorCode::invalid_argument, std::string(who) + ": needs a three-boson block");
  return *m.three_boson;
}

}  // namespace detail

/// Closed-form mean-field level v of a three-boson block at displacement r.
inline double mfa_energy_tb(const ModelOnSubspace& m, int v, double r) {
  const auto& tb = detail::require_tb(m, "mfa_energy_tb");
  if (v < 0 || v >= m.spec.dim) throw Error(ErrorCode::invalid_argument, "mfa_energy_tb: level out of range");
  const double j = m.spec.j();
  const double c2 = std::cos(2.0 * r);
  const double radicand = (-j + v) * c2 + j + tb.abs_k() + 1.0;
  if (radicand < 0.0) throw Error(ErrorCode::invalid_argument, "mfa_energy_tb: negative radicand");
  return m.tilde_C() + m.a * (-j + v) * c2 - 2.0 * std::abs(m.g) * (j - v) * std::sin(2.0 * r) * std::sqrt(radicand);
}

/// (a/2|g|) sin 2r - cos 2r sqrt(Q) - j sin^2 2r / (2 sqrt(Q)), Q = 2j sin^2 r + |k| + 1.
/// Proportional to dE_0/dr with the positive factor 4|g|j.
inline double mfa_stationarity_residual(const ModelOnSubspace& m, double r) {
  const auto& tb = detail::require_tb(m, "mfa_stationarity_residual");
  const double j = m.spec.j();
  const double sn = std::sin(r), s2 = std::sin(2.0 * r);
  const double q = 2.0 * j * sn * sn + tb.abs_k() + 1.0;
  const double sq = std::sqrt(q);
  return m.a / (2.0 * std::abs(m.g)) * s2 - std::cos(2.0 * r) * sq - j * s2 * s2 / (2.0 * sq);
}

inline MeanFieldResult mfa_spectrum_tb(const ModelOnSubspace& m) {
  detail::require_tb(m, "mfa_spectrum_tb");
  MeanFieldResult out;
  auto fill = [&](double r) {
    out.energies.clear();
    for (int v = 0; v < m.spec.dim; ++v) out.energies.push_back(mfa_energy_tb(m, v, r));
  };
  if (m.spec.twice_j == 0 || std::abs(m.g) == 0.0) {
    // No coupling term to balance: the displacement stays at zero.
    fill(0.0);
    out.all_roots = {{0.0, out.energies.front(), 0.0}};
    return out;
  }

  constexpr int grid = 256;
  const double h = std::numbers::pi / 2.0 / grid;
  auto f = [&](double r) { return mfa_stationarity_residual(m, r); };
  double r_lo = 0.0, f_lo = f(r_lo);
  for (int i = 1; i <= grid; ++i) {
    const double r_hi = i * h, f_hi = f(r_hi);
    double root = r_hi;
    bool found = f_hi == 0.0;
    if (!found && (f_lo < 0.0) != (f_hi < 0.0)) {
      boost::uintmax_t iters = 200;
      const auto br = boost::math::tools::toms748_solve(f, r_lo, r_hi, f_lo, f_hi,
                                                         boost::math::tools::eps_tolerance<double>(52), iters);
      const double a = br.first, b = br.second;
      root = std::abs(f(a)) <= std::abs(f(b)) ? a : b;
      found = true;
    }
    if (found && root > 0.0) out.all_roots.push_back({root, mfa_energy_tb(m, 0, root), std::abs(f(root))});
    r_lo = r_hi;
    f_lo = f_hi;
  }
  if (out.all_roots.empty()) {
    throw Error(ErrorCode::no_root, "mfa_spectrum_tb: no sign change of the stationarity residual on (0, pi/2]; "
                                    "residual at 0 = " + std::to_string(f(0.0)) +
                                        ", at pi/2 = " + std::to_string(f(std::numbers::pi / 2.0)));
  }
  std::sort(out.all_roots.begin(), out.all_roots.end(),
            [](const auto& x, const auto& y) { return x.e0 != y.e0 ? x.e0 < y.e0 : x.r < y.r; });
  out.r = out.all_roots.front().r;
  out.residual = out.all_roots.front().residual;
  fill(out.r);
  return out;
}

}  // namespace polysl2
