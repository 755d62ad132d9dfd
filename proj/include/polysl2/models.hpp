#pragma once

// Model catalogue: the three-boson frequency-conversion model with its block
// decomposition and Fock-space oracle, the linear sl(2) model, and custom
// structure polynomials.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <optional>
#include <vector>

#include "polysl2/algebra.hpp"
#include "polysl2/error.hpp"

namespace polysl2 {

using cplx = std::complex<double>;

struct ThreeBosonParams {
  double omega1 = 1.0;
  double omega2 = 1.0;
  double omega3 = 2.0;
  cplx g{1.0, 0.0};
};

/// Block labels of the three-boson model. k enters l0 and R2 through |k| but
/// the shift C through the signed value, so both are kept.
struct ThreeBosonLabels {
  int k = 0;
  int s = 0;
  int abs_k() const noexcept { return std::abs(k); }
};

/// H = a V0 + g V+ + g* V- + C restricted to one block.
struct ModelOnSubspace {
  double a = 0.0;
  cplx g{0.0, 0.0};
  double C = 0.0;
  StructurePolynomial psi{-1.0, {0.0, 1.0}};
  SubspaceSpec spec;
  std::optional<ThreeBosonLabels> three_boson;

  /// Constant of the Y-form Hamiltonian: C + a(l0 ± j).
  double tilde_C() const noexcept { return C + a * spec.v0_shift(); }
  PhiFunction phi() const { return PhiFunction(psi, spec); }
  bool linear() const noexcept { return psi.degree() == 2; }
};

inline ModelOnSubspace tb_subspace(const ThreeBosonParams& p, int k, int s) {
  if (s < 0) throw Error(ErrorCode::invalid_argument, "three-boson block: s must be nonnegative");
  const double ak = std::abs(k);
  const double R1 = k;
  const double R2 = (ak + 2.0 * s) / 3.0;
  const double l0 = (ak - s) / 3.0;
  // psi3 = 1/4 (2x + R2 - R1)(2x + R1 + R2)(-x + R2 + 1)
  StructurePolynomial psi(-1.0, {-(R2 - R1) / 2.0, -(R1 + R2) / 2.0, R2 + 1.0});
  ModelOnSubspace m;
  m.a = p.omega1 + p.omega2 - p.omega3;
  m.g = p.g;
  m.C = 0.5 * (R1 * (p.omega1 - p.omega2) + R2 * (p.omega1 + p.omega2 + 2.0 * p.omega3));
  m.psi = std::move(psi);
  m.spec = SubspaceSpec::su2(l0, s, {R1, R2});
  m.three_boson = ThreeBosonLabels{k, s};
  return m;
}

/// n = 2 model on a spin-j (su2) or Bargmann-index-j (su11, truncated) block.
inline ModelOnSubspace linear_model(double a, cplx g, int twice_j, AlgebraKind kind, double C, int truncation = 64) {
  ModelOnSubspace m;
  m.a = a;
  m.g = g;
  m.C = C;
  m.psi = StructurePolynomial::sl2(kind, twice_j);
  const double j = twice_j / 2.0;
  m.spec = kind == AlgebraKind::SU2 ? SubspaceSpec::su2(-j, twice_j) : SubspaceSpec::su11(j, twice_j, truncation);
  return m;
}

/// User-supplied structure polynomial (zeros + leading coefficient).
inline ModelOnSubspace custom_model(std::vector<double> psi_zeros, double psi_A, double l0, int twice_j, AlgebraKind kind,
                                    double a, cplx g, double C, int truncation = 64) {
  ModelOnSubspace m;
  m.a = a;
  m.g = g;
  m.C = C;
  m.psi = StructurePolynomial(psi_A, std::move(psi_zeros));
  m.spec = kind == AlgebraKind::SU2 ? SubspaceSpec::su2(l0, twice_j) : SubspaceSpec::su11(l0, twice_j, truncation);
  validate(m.psi, m.spec);
  return m;
}

using Occupation = std::array<int, 3>;

struct FockBasis3 {
  int cutoff = 0;
  std::vector<Occupation> states;  // lexicographic in (n1, n2, n3)

  explicit FockBasis3(int n) : cutoff(n) {
    if (n < 0) throw Error(ErrorCode::invalid_argument, "Fock cutoff must be nonnegative");
    for (int n1 = 0; n1 <= n; ++n1)
      for (int n2 = 0; n1 + n2 <= n; ++n2)
        for (int n3 = 0; n1 + n2 + n3 <= n; ++n3) states.push_back({n1, n2, n3});
  }

  std::optional<std::size_t> index_of(const Occupation& s) const {
    if (s[0] < 0 || s[1] < 0 || s[2] < 0 || s[0] + s[1] + s[2] > cutoff) return std::nullopt;
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i] == s) return i;
    return std::nullopt;
  }
};

/// Dense H_tb in the truncated Fock basis; couplings leaving the cutoff are dropped.
inline Eigen::MatrixXcd tb_fock_hamiltonian(const ThreeBosonParams& p, const FockBasis3& basis) {
  const auto n = static_cast<Eigen::Index>(basis.states.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& [n1, n2, n3] = basis.states[static_cast<std::size_t>(i)];
    h(i, i) = p.omega1 * n1 + p.omega2 * n2 + p.omega3 * n3;
    if (n3 == 0) continue;
    if (auto target = basis.index_of({n1 + 1, n2 + 1, n3 - 1})) {
      const auto t = static_cast<Eigen::Index>(*target);
      const double amp = std::sqrt(double(n1 + 1) * double(n2 + 1) * double(n3));
      h(t, i) += p.g * amp;
      h(i, t) += std::conj(p.g) * amp;
    }
  }
  return h;
}

struct BlockLabels {
  int k = 0;
  int s = 0;
  int v = 0;
  bool operator==(const BlockLabels&) const = default;
};

/// (k, s, v) of an occupation triple from R1, 3R2 and 3V0.
inline BlockLabels tb_block_labels(const Occupation& n) {
  const int k = n[0] - n[1];
  const int ak = std::abs(k);
  const int three_r2 = n[0] + n[1] + 2 * n[2];
  const int three_v0 = n[0] + n[1] - n[2];
  if ((three_r2 - ak) % 2 != 0) throw Error(ErrorCode::invalid_argument, "tb_block_labels: inconsistent R2 parity");
  const int s = (three_r2 - ak) / 2;
  const int three_v = three_v0 - (ak - s);  // 3 (V0 - l0)
  if (three_v % 3 != 0 || three_v < 0 || three_v / 3 > s)
    throw Error(ErrorCode::invalid_argument, "tb_block_labels: v is not an integer in [0, s]");
  return {k, s, three_v / 3};
}

/// Occupation triple of basis vector v in block (k, s).
inline Occupation tb_block_state(int k, int s, int v) {
  const int ak = std::abs(k);
  return {(ak + k) / 2 + v, (ak - k) / 2 + v, s - v};
}

/// A block lies wholly inside the Fock cutoff iff its top state does.
inline bool tb_block_complete(int k, int s, int cutoff) { return std::abs(k) + 2 * s <= cutoff; }

}  // namespace polysl2
