#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

#include "fixtures.hpp"
#include "lpsub/grassmann.hpp"
#include "oracles.hpp"

using namespace lpsub;
using fixtures::axis_span;

namespace {

constexpr double kPi = std::numbers::pi;

Subspace line(std::initializer_list<double> v) {
  Vector x(static_cast<Index>(v.size()));
  Index i = 0;
  for (double c : v) x(i++) = c;
  return orthonormalize(x);
}

}  // namespace

TEST(Orthonormalize, KeepsOrthonormalInput) {
  const Subspace L = orthonormalize(Matrix::Identity(3, 3).leftCols(2));
  EXPECT_TRUE(L.same_span(axis_span(3, {0, 1})));
  EXPECT_LT((L.basis().transpose() * L.basis() - Matrix::Identity(2, 2)).norm(), 1e-12);
}

TEST(Orthonormalize, RemovesColumnScaling) {
  Matrix raw(3, 2);
  raw << 2, 0, 0, 3, 0, 0;
  EXPECT_TRUE(orthonormalize(raw).same_span(axis_span(3, {0, 1})));
}

TEST(Orthonormalize, SpanMatchesGramSchmidt) {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const Matrix raw = gaussian_matrix(5, 2, rng);
    const Subspace L = orthonormalize(raw);
    EXPECT_LT((L.projector() - oracle::projector(raw)).norm(), 1e-12);
  }
}

TEST(Orthonormalize, RankDeficientNamesRank) {
  Matrix raw(3, 2);
  raw << 1, 2, 1, 2, 0, 0;
  try {
    orthonormalize(raw);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRankDeficient);
    EXPECT_NE(std::string(e.what()).find("rank 1"), std::string::npos) << e.what();
  }
}

TEST(Subspace, RejectsBadShapesAndBases) {
  EXPECT_THROW(Subspace::from_orthonormal(Matrix::Identity(3, 3)), Error);
  Matrix skew(3, 1);
  skew << 1, 1, 0;
  EXPECT_THROW(Subspace::from_orthonormal(skew), Error);
}

TEST(Project, SplitsPoints) {
  const Subspace L = axis_span(3, {0});
  Vector e1 = Vector::Unit(3, 0), e2 = Vector::Unit(3, 1);
  EXPECT_LT((project(e1, L) - e1).norm(), 1e-15);
  EXPECT_LT(project_perp(e1, L).norm(), 1e-15);
  EXPECT_LT(project(e2, L).norm(), 1e-15);
  EXPECT_LT((project_perp(e2, L) - e2).norm(), 1e-15);

  const Subspace diag = line({1, 1, 0});
  Vector x(3);
  x << 1, 1, 0;
  EXPECT_LT((project(x, diag) - x).norm(), 1e-15);
  EXPECT_LT(std::abs(x.dot(diag.basis().col(0))) - std::sqrt(2.0), 1e-15);

  EXPECT_THROW(project(Vector::Zero(2), L), Error);
}

TEST(Project, SumsToPointAndMatchesLeastSquares) {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const Matrix raw = gaussian_matrix(6, 3, rng);
    const Subspace L = orthonormalize(raw);
    const Vector x = gaussian_matrix(6, 1, rng);
    EXPECT_LT((project(x, L) + project_perp(x, L) - x).norm(), 1e-13);
    EXPECT_NEAR(dist_point_subspace(x, L), oracle::distance_ls(x, raw), 1e-12);
  }
}

TEST(Distance, SimpleCases) {
  const Subspace L = axis_span(2, {0});
  EXPECT_DOUBLE_EQ(dist_point_subspace(Vector::Unit(2, 1), L), 1.0);
  EXPECT_DOUBLE_EQ(dist_point_subspace(Vector::Unit(2, 0) * 0.3, L), 0.0);
  Vector x(2);
  x << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  EXPECT_NEAR(dist_point_subspace(x, L), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_THROW(dist_point_subspace(Vector::Zero(3), L), Error);
}

TEST(PrincipalDecomposition, EqualSubspaces) {
  Rng rng(1);
  const Subspace F = random_subspace(5, 2, rng);
  const auto pd = principal_decomposition(F, F);
  EXPECT_LT(pd.angles.maxCoeff(), 1e-7);
  EXPECT_EQ(pd.interaction_dim, 0);
}

TEST(PrincipalDecomposition, OrthogonalLines) {
  const auto pd = principal_decomposition(axis_span(2, {0}), axis_span(2, {1}));
  EXPECT_NEAR(pd.angles(0), kPi / 2, 1e-15);
  EXPECT_EQ(pd.interaction_dim, 1);
}

TEST(PrincipalDecomposition, QuarterTurnInR3) {
  const auto pd = principal_decomposition(axis_span(3, {0}), line({1, 1, 0}));
  EXPECT_NEAR(pd.angles(0), kPi / 4, 1e-15);
  EXPECT_NEAR(std::abs(pd.complementary(1, 0)), 1.0, 1e-14);
}

TEST(PrincipalDecomposition, InvariantsOnRandomPairs) {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const Index D = 3 + t % 5;
    const Index d = 1 + t % (D - 1);
    const Subspace F = random_subspace(D, d, rng);
    const Subspace G = random_subspace(D, d, rng);
    const auto pd = principal_decomposition(F, G);
    for (Index i = 0; i + 1 < d; ++i) EXPECT_GE(pd.angles(i) + 1e-12, pd.angles(i + 1));
    EXPECT_GE(pd.angles.minCoeff(), 0.0);
    EXPECT_LE(pd.angles.maxCoeff(), kPi / 2);
    const Index k = pd.interaction_dim;
    for (Index i = 0; i < d; ++i) {
      EXPECT_NEAR(pd.vectors_f.col(i).dot(pd.vectors_g.col(i)), std::cos(pd.angles(i)), 1e-10);
      const Vector rebuilt = std::cos(pd.angles(i)) * pd.vectors_f.col(i) + std::sin(pd.angles(i)) * pd.complementary.col(i);
      if (i < k) EXPECT_LT((rebuilt - pd.vectors_g.col(i)).norm(), 1e-10);
      else EXPECT_LT((pd.complementary.col(i) - pd.vectors_f.col(i)).norm(), 1e-10);
    }
    for (Index i = 0; i < k; ++i)
      for (Index j = 0; j < k; ++j) EXPECT_NEAR(pd.complementary.col(i).dot(pd.vectors_f.col(j)), 0.0, 1e-10);
    // Angle spectrum from projectors, an independent route.
    const Vector ref = oracle::angles_from_projectors(F.basis(), G.basis());
    for (Index i = 0; i < d; ++i) EXPECT_NEAR(pd.angles(i), ref(i), 1e-7);
    const auto back = principal_decomposition(G, F);
    EXPECT_LT((back.angles - pd.angles).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(PrincipalDecomposition, SharedDirectionGivesPartialInteraction) {
  Matrix g(4, 2);
  g << 1, 0, 0, 0.6, 0, 0.8, 0, 0;
  const auto pd = principal_decomposition(axis_span(4, {0, 1}), orthonormalize(g));
  EXPECT_EQ(pd.interaction_dim, 1);
  EXPECT_NEAR(pd.angles(0), std::acos(0.6), 1e-14);
  EXPECT_NEAR(pd.angles(1), 0.0, 1e-15);
}

TEST(GrassmannDistance, KnownValues) {
  Rng rng(2);
  const Subspace F = random_subspace(4, 2, rng);
  EXPECT_LT(grassmann_distance(F, F), 1e-7);
  EXPECT_NEAR(grassmann_distance(axis_span(2, {0}), line({1, 1})), kPi / 4, 1e-15);
}

TEST(GrassmannDistance, MatchesProjectorSpectrumAndMetricAxioms) {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    const Subspace A = random_subspace(4, 2, rng);
    const Subspace B = random_subspace(4, 2, rng);
    const Subspace C = random_subspace(4, 2, rng);
    const double ab = grassmann_distance(A, B);
    EXPECT_NEAR(ab, oracle::grassmann_distance(A.basis(), B.basis()), 1e-7);
    EXPECT_NEAR(ab, grassmann_distance(B, A), 1e-12);
    EXPECT_LE(grassmann_distance(A, C), ab + grassmann_distance(B, C) + 1e-9);
    EXPECT_LE(ab, kPi * std::sqrt(2.0) / 2 + 1e-12);
  }
}

TEST(GrassmannDistance, SmallAnglesStayAccurate) {
  for (double a : {1e-4, 1e-7, 1e-10}) {
    EXPECT_NEAR(grassmann_distance(axis_span(3, {0}), line({std::cos(a), std::sin(a), 0})), a, a * 1e-6);
  }
}

TEST(Geodesic, Endpoints) {
  Rng rng(6);
  const Subspace F = random_subspace(5, 2, rng);
  const Subspace G = random_subspace(5, 2, rng);
  EXPECT_TRUE(geodesic(F, G, 0.0).same_span(F));
  EXPECT_TRUE(geodesic(F, G, 1.0).same_span(G, 1e-8));
}

TEST(Geodesic, LineMidpoint) {
  const Subspace mid = geodesic(axis_span(3, {0}), line({1, 1, 0}), 0.5);
  EXPECT_TRUE(mid.same_span(line({std::cos(kPi / 8), std::sin(kPi / 8), 0})));
}

TEST(Geodesic, DistanceScalesWithT) {
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    const Subspace F = random_subspace(5, 2, rng);
    const Subspace G = random_subspace(5, 2, rng);
    const double full = grassmann_distance(F, G);
    for (double s : {0.3, 0.7}) EXPECT_NEAR(grassmann_distance(F, geodesic(F, G, s)), s * full, 1e-8);
    const Subspace M = geodesic(F, G, 0.5);
    EXPECT_LT(std::abs(grassmann_distance(F, M) - grassmann_distance(G, M)), 1e-8);
  }
}

TEST(Geodesic, RightAngleIsRejected) {
  try {
    geodesic(axis_span(2, {0}), axis_span(2, {1}), 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGeodesicNotUnique);
  }
}

TEST(ExpMap, FollowsGeodesicToTarget) {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    const Subspace F = random_subspace(6, 2, rng);
    const Subspace G = random_subspace(6, 2, rng);
    const auto pd = principal_decomposition(F, G);
    // Tangent U diag(theta) V^T in the F-basis reaches G at t = 1.
    Matrix tangent = Matrix::Zero(6, 2);
    for (Index i = 0; i < 2; ++i) {
      const Vector coeff = F.basis().transpose() * pd.vectors_f.col(i);
      tangent += pd.angles(i) * pd.complementary.col(i) * coeff.transpose();
    }
    EXPECT_TRUE(exp_map(F, tangent, 1.0).same_span(G, 1e-8));
    EXPECT_TRUE(exp_map(F, tangent, 0.4).same_span(geodesic(F, G, 0.4), 1e-8));
  }
}

TEST(RandomSubspace, LineAngleIsUniform) {
  Rng rng(9);
  constexpr int kDraws = 10000, kBins = 20;
  std::vector<int> counts(kBins, 0);
  for (int i = 0; i < kDraws; ++i) {
    const Vector v = random_subspace(2, 1, rng).basis().col(0);
    double a = std::atan2(v(1), v(0));
    if (a < 0) a += kPi;
    if (a >= kPi) a -= kPi;
    ++counts[std::min(kBins - 1, static_cast<int>(a / kPi * kBins))];
  }
  const double expected = static_cast<double>(kDraws) / kBins;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, oracle::kChiSquare19Critical001);
}

TEST(RandomSubspace, MeanProjectorIsIsotropic) {
  Rng rng(10);
  Matrix mean = Matrix::Zero(3, 3);
  for (int i = 0; i < 10000; ++i) mean += random_subspace(3, 2, rng).projector();
  mean /= 10000.0;
  EXPECT_LT((mean - Matrix::Identity(3, 3) * (2.0 / 3.0)).norm(), 0.02);
}

TEST(RandomSubspace, EdgeShapes) {
  Rng rng(12);
  EXPECT_EQ(random_subspace(7, 6, rng).dim(), 6);
  EXPECT_THROW(random_subspace(3, 3, rng), Error);
  EXPECT_THROW(random_subspace(3, 0, rng), Error);
}

TEST(RandomOrthogonal, IsOrthogonal) {
  Rng rng(13);
  const Matrix Q = random_orthogonal(5, rng);
  EXPECT_LT((Q.transpose() * Q - Matrix::Identity(5, 5)).norm(), 1e-13);
}

TEST(SubspaceIo, RoundTripsSeveralBlocks) {
  Rng rng(14);
  const Subspace A = random_subspace(4, 2, rng);
  const Subspace B = random_subspace(4, 2, rng);
  std::stringstream ss;
  write_subspace(ss, A);
  write_subspace(ss, B);
  const auto back = read_subspaces(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].basis(), A.basis());
  EXPECT_TRUE(back[1].same_span(B, 1e-15));
}

TEST(SubspaceIo, RejectsTruncatedInput) {
  std::stringstream ss("3 1\n1\n0\n");
  EXPECT_THROW(read_subspaces(ss), Error);
}
