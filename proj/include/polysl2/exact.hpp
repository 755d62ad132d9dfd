#pragma once

// Exact spectra on one block: the real symmetric tridiagonal form of
// H = a V0 + g V+ + g* V- + C in the orthonormal |[l_i]; v> basis.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "polysl2/algebra.hpp"
#include "polysl2/error.hpp"
#include "polysl2/models.hpp"

namespace polysl2 {

enum class Method { Exact, Variational, MeanField, QuasiEquidistant };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::Exact: return "exact";
    case Method::Variational: return "variational";
    case Method::MeanField: return "meanfield";
    case Method::QuasiEquidistant: return "quasi";
  }
  return "unknown";
}

/// Energies indexed by the level label v of the producing method.
struct Spectrum {
  Method method = Method::Exact;
  std::vector<double> values;
};

struct TridiagonalHamiltonian {
  std::vector<double> diag;
  std::vector<double> offdiag;  // |g| sqrt(psi(l0 + v + 1)), all >= 0
  cplx phase{1.0, 0.0};         // g/|g|, gauged away by diag(e^{i v arg g})
};

inline TridiagonalHamiltonian build_tridiagonal(const ModelOnSubspace& m) {
  const auto ladder = ladder_elements(m.psi, m.spec);
  TridiagonalHamiltonian t;
  t.diag.resize(static_cast<std::size_t>(m.spec.dim));
  for (int v = 0; v < m.spec.dim; ++v) t.diag[static_cast<std::size_t>(v)] = m.C + m.a * (m.spec.l0 + v);
  const double gabs = std::abs(m.g);
  t.offdiag.reserve(ladder.size());
  for (double l : ladder) t.offdiag.push_back(gabs * l);
  if (gabs > 0.0) t.phase = m.g / gabs;
  return t;
}

/// Dense Hermitian matrix in the original gauge (phase restored).
inline Eigen::MatrixXcd dense_hamiltonian(const TridiagonalHamiltonian& t) {
  const auto n = static_cast<Eigen::Index>(t.diag.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index v = 0; v < n; ++v) h(v, v) = t.diag[static_cast<std::size_t>(v)];
  for (Eigen::Index v = 0; v + 1 < n; ++v) {
    h(v + 1, v) = t.phase * t.offdiag[static_cast<std::size_t>(v)];
    h(v, v + 1) = std::conj(h(v + 1, v));
  }
  return h;
}

struct EigenSolution {
  std::vector<double> values;  // ascending
  Eigen::MatrixXd vectors;     // columns, real gauge
  Method method = Method::Exact;

  /// Eigenvectors re-phased to the gauge of a complex coupling g = |g| phase.
  Eigen::MatrixXcd in_gauge(cplx phase) const {
    Eigen::MatrixXcd out = vectors.cast<cplx>();
    const double theta = std::arg(phase);
    for (Eigen::Index v = 0; v < out.rows(); ++v) out.row(v) *= std::polar(1.0, theta * double(v));
    return out;
  }
};

inline EigenSolution eig_tridiagonal(const TridiagonalHamiltonian& t, bool with_vectors = true) {
  const auto n = static_cast<Eigen::Index>(t.diag.size());
  if (n == 0) throw Error(ErrorCode::invalid_argument, "eig_tridiagonal: empty matrix");
  if (static_cast<Eigen::Index>(t.offdiag.size()) != n - 1)
    throw Error(ErrorCode::invalid_argument, "eig_tridiagonal: offdiag must have dim-1 entries");
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(t.diag.data(), n);
  Eigen::VectorXd e(std::max<Eigen::Index>(n - 1, 0));
  for (Eigen::Index i = 0; i + 1 < n; ++i) e(i) = t.offdiag[static_cast<std::size_t>(i)];
  EigenSolution sol;
  if (n == 1) {
    sol.values = {d(0)};
    sol.vectors = Eigen::MatrixXd::Identity(1, 1);
    return sol;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::non_convergence, "eig_tridiagonal: implicit QR iteration did not converge");
  sol.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  if (with_vectors) {
    sol.vectors = es.eigenvectors();
    for (Eigen::Index c = 0; c < n; ++c) {
      for (Eigen::Index r = 0; r < n; ++r) {
        if (std::abs(sol.vectors(r, c)) > 1e-14) {
          if (sol.vectors(r, c) < 0) sol.vectors.col(c) *= -1.0;
          break;
        }
      }
    }
  }
  return sol;
}

/// max_k ||H x_k - E_k x_k|| in the real gauge.
inline double max_residual(const TridiagonalHamiltonian& t, const EigenSolution& sol) {
  const auto n = static_cast<Eigen::Index>(t.diag.size());
  double worst = 0.0;
  for (Eigen::Index k = 0; k < sol.vectors.cols(); ++k) {
    const auto x = sol.vectors.col(k);
    Eigen::VectorXd hx(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double s = t.diag[static_cast<std::size_t>(i)] * x(i);
      if (i > 0) s += t.offdiag[static_cast<std::size_t>(i - 1)] * x(i - 1);
      if (i + 1 < n) s += t.offdiag[static_cast<std::size_t>(i)] * x(i + 1);
      hx(i) = s;
    }
    worst = std::max(worst, (hx - sol.values[static_cast<std::size_t>(k)] * x).norm());
  }
  return worst;
}

struct ConvergedSpectrum {
  Spectrum spectrum;
  int truncation = 0;
  double drift = 0.0;
  bool converged = false;
};

/// Lowest n_levels of a truncated su(1,1) block, doubling the truncation until
/// the levels move by less than 1e-8 relative.
inline ConvergedSpectrum su11_converged_spectrum(const ModelOnSubspace& m, int n_levels, int max_truncation = 1 << 14) {
  if (m.spec.kind != AlgebraKind::SU11) throw Error(ErrorCode::invalid_argument, "su11_converged_spectrum: su11 block required");
  if (n_levels < 1) throw Error(ErrorCode::invalid_argument, "su11_converged_spectrum: n_levels must be positive");
  const double gabs = std::abs(m.g);
  if (m.linear() && (m.a * m.a <= 4.0 * gabs * gabs || m.a <= 0.0))
    throw Error(ErrorCode::non_convergence,
                "su11 linear model outside the discrete-spectrum regime (need a > 2|g|); spectrum is continuous or unbounded");
  const double scale = std::max({std::abs(m.a), gabs, 1e-300});
  auto lowest = [&](int n) {
    auto model = m;
    model.spec = m.spec.with_truncation(n);
    auto sol = eig_tridiagonal(build_tridiagonal(model), false);
    sol.values.resize(static_cast<std::size_t>(n_levels));
    return sol.values;
  };
  int n = std::max(64, 4 * n_levels);
  auto prev = lowest(n);
  ConvergedSpectrum out;
  while (2 * n <= max_truncation) {
    n *= 2;
    auto next = lowest(n);
    double drift = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i)
      drift = std::max(drift, std::abs(next[i] - prev[i]) / std::max(std::abs(next[i]), scale));
    prev = std::move(next);
    out.drift = drift;
    if (drift < 1e-8) {
      out.converged = true;
      out.truncation = n;
      out.spectrum = {Method::Exact, prev};
      return out;
    }
  }
  throw Error(ErrorCode::non_convergence, "su11_converged_spectrum: relative drift " + std::to_string(out.drift) +
                                              " at truncation " + std::to_string(n));
}

/// Exact levels of a block: all of them for su(2), the lowest n_levels for su(1,1).
inline Spectrum exact_spectrum(const ModelOnSubspace& m, int n_levels = 0) {
  if (m.spec.kind == AlgebraKind::SU11)
    return su11_converged_spectrum(m, n_levels > 0 ? n_levels : std::min(m.spec.dim, 16)).spectrum;
  return {Method::Exact, eig_tridiagonal(build_tridiagonal(m), false).values};
}

}  // namespace polysl2
