#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "polysl2/exact.hpp"
#include "polysl2/variational.hpp"

using namespace polysl2;
using std::numbers::pi;

namespace {

double max_abs(const Eigen::MatrixXcd& x) { return x.cwiseAbs().maxCoeff(); }

// Central difference of the v = 0 functional along r.
double d_energy_dr(const ModelOnSubspace& m, double r) {
  const double h = 1e-5;
  return (spectral_formula_energy(m, 0, r + h) - spectral_formula_energy(m, 0, r - h)) / (2 * h);
}

}  // namespace

TEST(Displacement, IdentityAtZero) {
  const auto s = displacement_matrix(SubspaceSpec::su2(-1.5, 3), {0.0, 0.7, AlgebraKind::SU2});
  EXPECT_LE(max_abs(s - Eigen::MatrixXcd::Identity(4, 4)), 1e-15);
}

TEST(Displacement, HalfSpinRotation) {
  const auto s = displacement_matrix(SubspaceSpec::su2(-0.5, 1), {pi / 4, 0.0, AlgebraKind::SU2});
  const double c = std::cos(pi / 4);
  EXPECT_NEAR(s(0, 0).real(), c, 1e-15);
  EXPECT_NEAR(s(1, 1).real(), c, 1e-15);
  EXPECT_NEAR(s(1, 0).real(), c, 1e-15);
  EXPECT_NEAR(s(0, 1).real(), -c, 1e-15);
  EXPECT_LE(std::abs(s(0, 1).imag()) + std::abs(s(1, 0).imag()), 1e-15);
}

TEST(Displacement, UnitaryAndDisentangledSu2) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> ur(0.0, 1.2), ut(0.0, 2 * pi);
  for (int tj = 0; tj <= 16; ++tj)
    for (int trial = 0; trial < 4; ++trial) {
      const auto spec = SubspaceSpec::su2(-tj / 2.0, tj);
      const GcsParameters xi{ur(rng), ut(rng), AlgebraKind::SU2};
      const auto s = displacement_matrix(spec, xi);
      const int n = spec.dim;
      EXPECT_LE(max_abs(s * s.adjoint() - Eigen::MatrixXcd::Identity(n, n)), 1e-12);
      EXPECT_LE(max_abs(s - disentangled_displacement(spec, xi)), 1e-10) << "2j=" << tj << " r=" << xi.r;
    }
}

TEST(Displacement, DisentangledSu11Truncated) {
  // Truncation corrupts the top rows; compare the block the low states see.
  const int n = 120, keep = 10;
  for (int tj : {1, 2, 5}) {
    const auto spec = SubspaceSpec::su11(tj / 2.0, tj, n);
    for (double r : {0.2, 0.6}) {
      const GcsParameters xi{r, 0.9, AlgebraKind::SU11};
      const auto s = displacement_matrix(spec, xi);
      const auto d = disentangled_displacement(spec, xi);
      EXPECT_LE(max_abs((s - d).topLeftCorner(keep, keep)), 1e-10) << "2j=" << tj << " r=" << r;
    }
  }
}

TEST(Displacement, TransformationLawOfY0AndYplus) {
  for (int tj : {1, 2, 4, 7}) {
    const auto spec = SubspaceSpec::su2(-tj / 2.0, tj);
    const auto g = generator_matrices(spec);
    const Eigen::MatrixXcd y0 = g.y0.cast<cplx>(), yp = g.yplus.cast<cplx>(), ym = g.yminus.cast<cplx>();
    for (double r : {0.3, 1.1})
      for (double th : {0.0, 2.2}) {
        const auto s = displacement_matrix(spec, {r, th, AlgebraKind::SU2});
        const cplx e = std::polar(1.0, th);
        const Eigen::MatrixXcd law0 = std::cos(2 * r) * y0 - std::sin(2 * r) / 2 * (e * yp + std::conj(e) * ym);
        EXPECT_LE(max_abs(s * y0 * s.adjoint() - law0), 1e-10);
        const double sn = std::sin(r), cs = std::cos(r);
        const Eigen::MatrixXcd lawp =
            cs * cs * yp + std::conj(e) * (std::sin(2 * r) * y0 - std::conj(e) * sn * sn * ym);
        EXPECT_LE(max_abs(s * yp * s.adjoint() - lawp), 1e-10);
      }
  }
}

TEST(EnergyFunctional, NoDisplacement) {
  const auto m = tb_subspace({1.2, 0.7, 2.5, {0.4, 0.3}}, 1, 4);
  for (int v = 0; v < m.spec.dim; ++v)
    EXPECT_NEAR(energy_functional(m, v, {0.0, 0.0, AlgebraKind::SU2}), m.C + m.a * (m.spec.l0 + v), 1e-12);
}

TEST(EnergyFunctional, LinearModelDiagonalizingDisplacement) {
  const double a = 1.3, C = -0.4;
  const cplx g = std::polar(0.8, 0.6);
  for (int tj : {1, 2, 3, 6}) {
    const auto m = linear_model(a, g, tj, AlgebraKind::SU2, C);
    const double r = 0.5 * std::atan2(2 * std::abs(g), a);
    for (int v = 0; v <= tj; ++v)
      EXPECT_NEAR(energy_functional(m, v, {r, std::arg(g), AlgebraKind::SU2}),
                  m.tilde_C() + (-tj / 2.0 + v) * std::sqrt(a * a + 4 * std::norm(g)), 1e-10);
  }
}

TEST(SpectralFormula, ZeroDisplacement) {
  const auto m = tb_subspace({1.2, 0.7, 2.5, {0.4, 0.3}}, -2, 5);
  for (int v = 0; v < m.spec.dim; ++v)
    EXPECT_NEAR(spectral_formula_energy(m, v, 0.0), m.tilde_C() + m.a * (-m.spec.j() + v), 1e-12);
}

TEST(SpectralFormula, AgreesWithMatrixOracleOnLinearModels) {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> ur(-1.5, 1.5), ua(-2.0, 2.0), ug(0.1, 1.5), ut(0.0, 2 * pi);
  for (int tj = 1; tj <= 10; ++tj)
    for (int trial = 0; trial < 5; ++trial) {
      const cplx g = std::polar(ug(rng), ut(rng));
      const auto m = linear_model(ua(rng), g, tj, AlgebraKind::SU2, ua(rng));
      const double r = ur(rng);
      for (int v = 0; v <= tj; ++v)
        EXPECT_NEAR(spectral_formula_energy(m, v, r), energy_functional(m, v, {r, std::arg(g), AlgebraKind::SU2}),
                    1e-10 * std::max(1.0, std::abs(m.a) + std::abs(g) * tj))
            << "2j=" << tj << " v=" << v << " r=" << r;
    }
}

TEST(SpectralFormula, AgreesWithMatrixOracleOnThreeBosonBlocks) {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> ur(-1.5, 1.5), uw(0.3, 2.0), ug(0.1, 1.5), ut(0.0, 2 * pi);
  for (int s = 0; s <= 16; ++s)
    for (int k : {-2, 0, 3}) {
      const ThreeBosonParams p{uw(rng), uw(rng), uw(rng), std::polar(ug(rng), ut(rng))};
      const auto m = tb_subspace(p, k, s);
      for (int trial = 0; trial < 3; ++trial) {
        const double r = ur(rng);
        const GcsParameters xi{r, std::arg(p.g), AlgebraKind::SU2};
        for (int v = 0; v <= s; ++v) {
          const double oracle = energy_functional(m, v, xi);
          EXPECT_NEAR(spectral_formula_energy(m, v, r), oracle, 1e-8 * std::max(1.0, std::abs(oracle)))
              << "k=" << k << " s=" << s << " v=" << v << " r=" << r;
        }
      }
    }
}

TEST(SpectralFormula, ReflectionIdentity) {
  const auto m = tb_subspace({1.0, 1.0, 2.0, {0.7, 0.0}}, 1, 6);
  const auto sp = sqrt_phi_table(m);
  for (int v = 0; v <= 6; ++v)
    for (double r : {0.2, 0.5, 0.7}) {
      const double direct = static_cast<double>(detail::coupling_sum_direct(sp, 6, v, r));
      const double reflected = -static_cast<double>(detail::coupling_sum_direct(sp, 6, 6 - v, pi / 2 - r));
      EXPECT_NEAR(direct, reflected, 1e-12);
    }
}

TEST(SpectralFormula, RejectsSu11AndBadLevel) {
  EXPECT_THROW(spectral_formula_energy(linear_model(3.0, {1.0, 0.0}, 2, AlgebraKind::SU11, 0.0), 0, 0.1), Error);
  EXPECT_THROW(spectral_formula_energy(tb_subspace({}, 0, 2), 3, 0.1), Error);
}

TEST(Stationarity, DegreeBoundAndSign) {
  for (int s = 1; s <= 12; ++s) {
    const auto m = tb_subspace({1.3, 0.9, 2.0, {0.6, 0.2}}, 1, s);
    const auto p = stationarity_polynomial(m);
    EXPECT_LE(p.degree(), 2 * (m.spec.dim - 1));
    // P(-tan r) is proportional to -dE0/dr with a positive factor.
    for (double r : {-1.0, -0.3, 0.4, 1.2}) {
      const double d = d_energy_dr(m, r);
      if (std::abs(d) < 1e-6) continue;
      EXPECT_EQ(std::signbit(p(-std::tan(r))), !std::signbit(d)) << "s=" << s << " r=" << r;
    }
  }
}

TEST(Stationarity, LinearModelClosedForm) {
  for (int tj = 1; tj <= 9; ++tj)
    for (double a : {0.5, 2.0}) {
      const cplx g = std::polar(0.9, 0.4);
      const auto m = linear_model(a, g, tj, AlgebraKind::SU2, 0.0);
      const auto roots = stationarity_roots(m);
      const double rstar = 0.5 * std::atan2(2 * std::abs(g), a);
      EXPECT_NEAR(roots.front().r, rstar, 1e-9) << "2j=" << tj;
      EXPECT_LE(roots.front().residual, 1e-10);
      int central = 0;
      for (const auto& x : roots) central += x.r > -pi / 4 && x.r <= pi / 4;
      EXPECT_EQ(central, 1);
      EXPECT_LE(static_cast<int>(roots.size()), 2 * tj);
    }
}

TEST(Stationarity, HalfSpinAtResonance) {
  const auto roots = stationarity_roots(linear_model(0.0, {0.8, 0.0}, 1, AlgebraKind::SU2, 0.0));
  ASSERT_EQ(roots.size(), 2u);
  EXPECT_NEAR(roots[0].e0, -0.8, 1e-12);
  EXPECT_NEAR(std::abs(roots[0].r), pi / 4, 1e-10);
  EXPECT_NEAR(std::abs(roots[1].r), pi / 4, 1e-10);
}

TEST(Stationarity, EveryRootIsStationary) {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> ua(-2.0, 2.0), ug(0.2, 1.5), ut(0.0, 2 * pi);
  for (int s = 1; s <= 10; ++s)
    for (int trial = 0; trial < 6; ++trial) {
      const double w = 1.0 + ua(rng) / 4;
      const ThreeBosonParams p{w, w, 2 * w + ua(rng) / 2, std::polar(ug(rng), ut(rng))};
      const auto m = tb_subspace(p, s % 3 - 1, s);
      for (const auto& root : stationarity_roots(m)) {
        EXPECT_LE(std::abs(d_energy_dr(m, root.r)), 1e-6 * std::max(1.0, std::abs(root.e0)))
            << "s=" << s << " r=" << root.r;
        EXPECT_LE(root.residual, 1e-10);
      }
    }
}

TEST(Stationarity, ZeroCouplingIsAnError) {
  EXPECT_THROW(stationarity_roots(tb_subspace({1.0, 1.0, 2.0, {0.0, 0.0}}, 0, 2)), Error);
}

TEST(Variational, ExactForTwoLevelBlocks) {
  for (double a : {-1.0, 0.0, 0.7})
    for (int k : {-3, 0, 2}) {
      const double w = 1.0;
      const auto m = tb_subspace({w, w, 2 * w - a, std::polar(0.8, 1.3)}, k, 1);
      const auto var = variational_spectrum(m);
      const auto ex = exact_spectrum(m);
      for (int v = 0; v < 2; ++v) EXPECT_NEAR(var.energies[v], ex.values[v], 1e-10);
    }
}

TEST(Variational, LinearModelMatchesClosedFormAndExact) {
  for (int tj = 1; tj <= 12; ++tj) {
    const double a = 0.8;
    const cplx g = std::polar(0.6, -0.9);
    const auto m = linear_model(a, g, tj, AlgebraKind::SU2, 0.3);
    const auto var = variational_spectrum(m);
    const auto ex = exact_spectrum(m);
    for (int v = 0; v <= tj; ++v) {
      EXPECT_NEAR(var.energies[v], m.tilde_C() + (-tj / 2.0 + v) * std::sqrt(a * a + 4 * std::norm(g)), 1e-10);
      EXPECT_NEAR(var.energies[v], ex.values[v], 1e-10);
      if (v > 0) {
        EXPECT_GE(var.energies[v], var.energies[v - 1]);
      }
    }
  }
}

TEST(Variational, GroundBoundFromEveryRoot) {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> ua(-1.5, 1.5), ug(0.2, 1.5);
  for (int s = 1; s <= 12; ++s) {
    const auto m = tb_subspace({1.0, 1.0, 2.0 + ua(rng), {ug(rng), ua(rng)}}, s % 2, s);
    const double e_min = exact_spectrum(m).values.front();
    const auto var = variational_spectrum(m);
    for (const auto& root : var.all_roots) EXPECT_GE(root.e0, e_min - 1e-10);
    bool used = false;
    for (const auto& root : var.all_roots) used |= root.alpha == var.alpha;
    EXPECT_TRUE(used);
    for (double e : var.energies) EXPECT_TRUE(std::isfinite(e));
  }
}

TEST(Variational, DecoupledShortCircuit) {
  const auto m = tb_subspace({1.0, 1.2, 2.5, {0.0, 0.0}}, 1, 3);
  const auto var = variational_spectrum(m);
  const auto ex = exact_spectrum(m);
  auto sorted = var.energies;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t v = 0; v < sorted.size(); ++v) EXPECT_NEAR(sorted[v], ex.values[v], 1e-12);
}

TEST(Variational, RootIndexOutOfRange) {
  const auto m = linear_model(1.0, {0.5, 0.0}, 2, AlgebraKind::SU2, 0.0);
  EXPECT_THROW(variational_spectrum(m, {99}), Error);
}

TEST(QuasiEquidistant, LinearIsExact) {
  const auto m = linear_model(1.1, {0.4, 0.2}, 5, AlgebraKind::SU2, 0.0);
  const auto q = quasi_equidistant_spectrum(m);
  const auto ex = exact_spectrum(m);
  for (int v = 0; v < m.spec.dim; ++v) EXPECT_NEAR(q.spectrum.values[v], ex.values[v], 1e-12);
  const auto m11 = linear_model(3.0, {1.0, 0.0}, 2, AlgebraKind::SU11, 0.0);
  const auto q11 = quasi_equidistant_spectrum(m11, PhiAverage::Mean, 4);
  for (int v = 0; v < 4; ++v) EXPECT_NEAR(q11.spectrum.values[v], (1.0 + v) * std::sqrt(5.0), 1e-12);
}

TEST(QuasiEquidistant, ThreeBosonMidpoint) {
  const double a = 0.5;
  const auto m = tb_subspace({1.0, 1.0, 2.0 - a, {0.7, 0.0}}, 0, 2);
  const auto q = quasi_equidistant_spectrum(m, PhiAverage::Midpoint);
  EXPECT_NEAR(q.phi_bar, 2.0, 1e-13);
  EXPECT_NEAR(q.spacing, std::sqrt(a * a + 8 * 0.49), 1e-13);
  const auto mean = quasi_equidistant_spectrum(m, PhiAverage::Mean);
  EXPECT_NEAR(mean.phi_bar, 2.0, 1e-13);  // phi linear on the block
}

TEST(QuasiEquidistant, ZeroCouplingSpacingIsA) {
  const auto q = quasi_equidistant_spectrum(tb_subspace({1.0, 1.0, 2.7, {0.0, 0.0}}, 2, 4));
  EXPECT_NEAR(q.spacing, 0.7, 1e-13);
}

TEST(QuasiEquidistant, Su11DiagonalizingDisplacement) {
  const double a = 3.0;
  const cplx g = std::polar(1.0, 0.5);
  const auto m = linear_model(a, g, 2, AlgebraKind::SU11, 0.0, 160);
  const auto q = quasi_equidistant_spectrum(m);
  for (int v = 0; v < 4; ++v)
    EXPECT_NEAR(energy_functional(m, v, {q.r, std::arg(g), AlgebraKind::SU11}), q.spectrum.values[v], 1e-9) << v;
}
