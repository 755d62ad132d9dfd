#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "polysl2/algebra.hpp"
#include "polysl2/models.hpp"

using namespace polysl2;

namespace {

// Three-boson psi3 written out from its printed product form, independent of
// StructurePolynomial's zero bookkeeping.
double psi3_direct(double x, double R1, double R2) {
  return 0.25 * (2 * x + R2 - R1) * (2 * x + R1 + R2) * (-x + R2 + 1);
}

}  // namespace

TEST(StructurePolynomial, ThreeBosonValues) {
  const auto m = tb_subspace({}, 0, 2);
  EXPECT_NEAR(m.spec.l0, -2.0 / 3.0, 1e-15);
  EXPECT_NEAR(eval_psi(m.psi, -2.0 / 3.0), 0.0, 1e-15);
  EXPECT_NEAR(eval_psi(m.psi, 1.0 / 3.0), 2.0, 1e-14);
  for (double x : {-1.3, 0.0, 0.7, 2.2}) EXPECT_NEAR(m.psi(x), psi3_direct(x, 0.0, 4.0 / 3.0), 1e-13);
}

TEST(StructurePolynomial, QuadraticSl2) {
  const auto sp = StructurePolynomial::sl2(AlgebraKind::SU2, 1);
  EXPECT_NEAR(sp(0.5), 1.0, 1e-15);
  const auto su11 = StructurePolynomial::sl2(AlgebraKind::SU11, 2);
  EXPECT_NEAR(su11(1.0), 0.0, 1e-15);
  EXPECT_NEAR(su11(3.0), 2.0 * 3.0, 1e-14);  // v(2j+v-1) at v=2, j=1
}

TEST(StructurePolynomial, RejectsZeroLeading) {
  EXPECT_THROW(StructurePolynomial(0.0, {1.0}), Error);
}

TEST(StructurePolynomial, DerivativeMatchesFiniteDifference) {
  StructurePolynomial sp(-0.7, {-1.0, 0.5, 2.0, 3.5});
  for (double x : {-2.0, 0.1, 1.7}) {
    const double h = 1e-5;
    EXPECT_NEAR(sp.derivative(x), (sp(x + h) - sp(x - h)) / (2 * h), 1e-7);
  }
}

TEST(Phi, ThreeBosonExamples) {
  const auto m = tb_subspace({}, 0, 2);
  EXPECT_NEAR(phi_from_psi(m.psi, m.spec, -1.0), 1.0, 1e-13);
  EXPECT_NEAR(phi_from_psi(m.psi, m.spec, 0.0), 2.0, 1e-13);
}

TEST(Phi, LinearCaseIsOne) {
  for (int tj : {1, 2, 5}) {
    for (auto kind : {AlgebraKind::SU2, AlgebraKind::SU11}) {
      const auto m = linear_model(1.0, {1.0, 0.0}, tj, kind, 0.0, 12);
      for (int v = 0; v < m.spec.dim; ++v) EXPECT_NEAR(m.phi()(m.spec.y0_of(v)), 1.0, 1e-14);
    }
  }
}

TEST(Phi, ClosedFormAtEveryBasisPoint) {
  for (int k = -4; k <= 4; ++k) {
    for (int s = 0; s <= 12; ++s) {
      const auto m = tb_subspace({}, k, s);
      const auto phi = m.phi();
      ASSERT_TRUE(phi.deflated());
      const double j = m.spec.j();
      for (int v = 0; v <= s; ++v) {
        const double y0 = -j + v;
        EXPECT_NEAR(phi(y0), y0 + j + std::abs(k) + 1.0, 1e-10) << "k=" << k << " s=" << s << " v=" << v;
      }
    }
  }
}

TEST(Phi, RatioFallbackRefusesZeroOverZero) {
  // psi with the lowest weight zero but no zero at the top edge.
  StructurePolynomial sp(-1.0, {0.0, 7.0, -2.0});
  const auto spec = SubspaceSpec::su2(0.0, 2);
  const PhiFunction phi(sp, spec);
  EXPECT_FALSE(phi.deflated());
  EXPECT_NO_THROW(phi(0.0));
  try {
    phi(1.0);
    FAIL() << "expected removable_singularity";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::removable_singularity);
  }
}

TEST(Ladder, Examples) {
  const auto lin = linear_model(0.0, {1.0, 0.0}, 1, AlgebraKind::SU2, 0.0);
  const auto l1 = ladder_elements(lin.psi, lin.spec);
  ASSERT_EQ(l1.size(), 1u);
  EXPECT_NEAR(l1[0], 1.0, 1e-15);

  const auto tb = tb_subspace({}, 0, 2);
  const auto l2 = ladder_elements(tb.psi, tb.spec);
  ASSERT_EQ(l2.size(), 2u);
  EXPECT_NEAR(l2[0], std::sqrt(psi3_direct(1.0 / 3.0, 0.0, 4.0 / 3.0)), 1e-14);
  EXPECT_NEAR(l2[1], std::sqrt(psi3_direct(4.0 / 3.0, 0.0, 4.0 / 3.0)), 1e-14);
  EXPECT_NEAR(l2[0], std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(l2[1], 2.0, 1e-14);
}

TEST(Ladder, DegenerateBlockLeadingZero) {
  StructurePolynomial sp(-1.0, {0.0, 1.0, 3.0});
  const auto l = ladder_elements(sp, SubspaceSpec::su2(0.0, 2));
  EXPECT_EQ(l[0], 0.0);
  EXPECT_NEAR(l[1], std::sqrt(2.0), 1e-15);
}

TEST(Ladder, NonUnitarizable) {
  StructurePolynomial sp(1.0, {0.0, 3.0});
  try {
    ladder_elements(sp, SubspaceSpec::su2(0.0, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::non_unitarizable);
  }
}

TEST(Generators, Examples) {
  const auto half = generator_matrices(SubspaceSpec::su2(-0.5, 1));
  EXPECT_DOUBLE_EQ(half.y0(0, 0), -0.5);
  EXPECT_DOUBLE_EQ(half.y0(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(half.yplus(1, 0), 1.0);

  const auto one = generator_matrices(SubspaceSpec::su2(-1.0, 2));
  EXPECT_NEAR(one.yplus(1, 0), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(one.yplus(2, 1), std::sqrt(2.0), 1e-15);

  const auto su11 = generator_matrices(SubspaceSpec::su11(1.0, 2, 8));
  EXPECT_NEAR(su11.yplus(1, 0), std::sqrt(2.0), 1e-15);
  EXPECT_TRUE(su11.yminus.isApprox(su11.yplus.transpose()));
}

TEST(Generators, Sl2CommutatorsUpToJ20) {
  for (int tj = 0; tj <= 40; ++tj) {
    const auto g = generator_matrices(SubspaceSpec::su2(-tj / 2.0, tj));
    const Eigen::MatrixXd c0p = g.y0 * g.yplus - g.yplus * g.y0;
    const Eigen::MatrixXd c0m = g.y0 * g.yminus - g.yminus * g.y0;
    const Eigen::MatrixXd cmp = g.yminus * g.yplus - g.yplus * g.yminus;
    EXPECT_LE((c0p - g.yplus).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((c0m + g.yminus).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((cmp + 2.0 * g.y0).cwiseAbs().maxCoeff(), 1e-12);
  }
  for (int tj = 1; tj <= 8; ++tj) {
    const int n = 30;
    const auto g = generator_matrices(SubspaceSpec::su11(tj / 2.0, tj, n));
    const Eigen::MatrixXd cmp = g.yminus * g.yplus - g.yplus * g.yminus;
    EXPECT_LE((cmp - 2.0 * g.y0).topLeftCorner(n - 1, n - 1).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Commutator, ThreeBosonAndLinear) {
  const auto tb = tb_subspace({}, 0, 2);
  EXPECT_LE(verify_pd_commutator(tb.psi, tb.spec).max(), 1e-12);
  const auto lin = linear_model(1.0, {1.0, 0.0}, 6, AlgebraKind::SU2, 0.0);
  EXPECT_LE(verify_pd_commutator(lin.psi, lin.spec).max(), 1e-12);
  const auto lin11 = linear_model(3.0, {1.0, 0.0}, 2, AlgebraKind::SU11, 0.0, 20);
  EXPECT_LE(verify_pd_commutator(lin11.psi, lin11.spec).max(), 1e-12);
}

TEST(Commutator, RandomCubicBlocksProperty) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int tj = static_cast<int>(u(rng) * 20);  // dim <= 20
    const double l0 = -5.0 + 10.0 * u(rng);
    const double below = l0 - 5.0 * u(rng);  // third zero at or below l0 keeps psi >= 0 on the block
    const double A = -(0.1 + 1.9 * u(rng));
    StructurePolynomial sp(A, {l0, l0 + tj + 1.0, below});
    const auto spec = SubspaceSpec::su2(l0, tj);
    ASSERT_NO_THROW(validate(sp, spec));
    const auto res = verify_pd_commutator(sp, spec);
    EXPECT_LE(res.polynomial, 1e-10) << "trial " << trial;
    EXPECT_LE(res.mapped, 1e-10) << "trial " << trial;
  }
}

TEST(Subspace, BothEdgesAreZerosForThreeBoson) {
  for (int k = -5; k <= 5; ++k)
    for (int s = 0; s <= 15; ++s) {
      const auto m = tb_subspace({}, k, s);
      EXPECT_NEAR(m.psi(m.spec.l0), 0.0, 1e-10);
      EXPECT_NEAR(m.psi(m.spec.l0 + m.spec.dim), 0.0, 1e-10);
      EXPECT_NO_THROW(validate(m.psi, m.spec));
    }
}

TEST(Subspace, HolsteinPrimakoffMapReproducesSl2Generators) {
  for (int k = 0; k <= 3; ++k)
    for (int s = 0; s <= 20; ++s) {
      const auto m = tb_subspace({}, k, s);
      const auto ladder = ladder_elements(m.psi, m.spec);
      const auto g = generator_matrices(m.spec);
      const auto phi = m.phi();
      for (int v = 0; v + 1 < m.spec.dim; ++v)
        EXPECT_NEAR(ladder[v] / std::sqrt(phi(m.spec.y0_of(v))), g.yplus(v + 1, v), 1e-10);
    }
}

TEST(Subspace, Su2DimensionMustMatchSpin) {
  auto spec = SubspaceSpec::su2(-1.0, 2);
  spec.dim = 4;
  EXPECT_THROW(validate(StructurePolynomial::sl2(AlgebraKind::SU2, 2), spec), Error);
}
