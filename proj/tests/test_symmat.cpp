#include <gtest/gtest.h>

#include <cmath>

#include "testutil.hpp"
#include "tiltcert/symmat.hpp"

using namespace tiltcert;
using tiltcert::testing::max_abs;

namespace {

double reconstruction_error(const SymMatrix& M, const SpectralDecomposition& sd) {
  return max_abs(sd.frame * sd.eigvals.asDiagonal() * sd.frame.transpose() - M.mat());
}

double orthogonality_error(const Mat& P) {
  return max_abs(P.transpose() * P - Mat::Identity(P.rows(), P.cols()));
}

}  // namespace

TEST(SymMatrix, StorageIsSymmetric) {
  Mat m(2, 2);
  m << 1, 2, 5, 3;
  SymMatrix s(m);
  EXPECT_EQ(s(0, 1), s(1, 0));
  EXPECT_EQ(s(1, 0), 2.0);
}

TEST(SymEigen, Identity) {
  const SpectralDecomposition sd = sym_eigen(SymMatrix::identity(3));
  EXPECT_NEAR(max_abs(sd.eigvals - Vec::Ones(3)), 0.0, 1e-15);
  EXPECT_LE(orthogonality_error(sd.frame), 1e-12);
}

TEST(SymEigen, Diagonal) {
  const SpectralDecomposition sd = sym_eigen(SymMatrix::diag({2, 0, -1}));
  EXPECT_DOUBLE_EQ(sd.eigvals(0), 2.0);
  EXPECT_DOUBLE_EQ(sd.eigvals(1), 0.0);
  EXPECT_DOUBLE_EQ(sd.eigvals(2), -1.0);
  EXPECT_NEAR(max_abs(sd.frame.cwiseAbs() - Mat::Identity(3, 3)), 0.0, 1e-15);
}

TEST(SymEigen, RecoversPlantedSpectrum) {
  Rng rng(11);
  const Mat P = random_orthogonal(rng, 3);
  const Vec lam = (Vec(3) << 3, 1, -2).finished();
  const SymMatrix M(Mat(P * lam.asDiagonal() * P.transpose()));
  const SpectralDecomposition sd = sym_eigen(M);
  EXPECT_LE(max_abs(sd.eigvals - lam), 1e-12);
  EXPECT_LE(reconstruction_error(M, sd), 1e-10);
}

TEST(SymEigen, RandomReconstruction500) {
  Rng rng(1);
  for (int t = 0; t < 500; ++t) {
    const int n = 1 + t % 12;
    const SymMatrix M = random_symmetric(rng, n) * uniform(rng, 0.1, 10.0);
    const SpectralDecomposition sd = sym_eigen(M);
    ASSERT_LE(reconstruction_error(M, sd), 1e-10 * (1.0 + M.max_abs()));
    ASSERT_LE(orthogonality_error(sd.frame), 1e-12);
    for (int i = 0; i + 1 < n; ++i) ASSERT_GE(sd.eigvals(i), sd.eigvals(i + 1));
  }
}

TEST(SimultaneousEigen, DiagonalPair) {
  const auto sd = simultaneous_eigen(SymMatrix::diag({1, 0}), SymMatrix::diag({0, -2}));
  EXPECT_DOUBLE_EQ(sd.x_eigvals(0), 1.0);
  EXPECT_DOUBLE_EQ(sd.x_eigvals(1), 0.0);
  EXPECT_DOUBLE_EQ(sd.s_eigvals(0), 0.0);
  EXPECT_DOUBLE_EQ(sd.s_eigvals(1), -2.0);
  EXPECT_NEAR(max_abs(sd.frame.cwiseAbs() - Mat::Identity(2, 2)), 0.0, 1e-15);
}

TEST(SimultaneousEigen, IdentityAndZero) {
  const auto sd = simultaneous_eigen(SymMatrix::identity(3), SymMatrix::zero(3));
  EXPECT_LE(max_abs(sd.s_eigvals), 1e-15);
  EXPECT_LE(orthogonality_error(sd.frame), 1e-12);
}

TEST(SimultaneousEigen, RotatedPair) {
  Rng rng(5);
  const Mat R = random_orthogonal(rng, 3);
  const SymMatrix X(Mat(R * SymMatrix::diag({2, 0, 0}).mat() * R.transpose()));
  const SymMatrix S(Mat(R * SymMatrix::diag({0, 0, -1}).mat() * R.transpose()));
  const auto sd = simultaneous_eigen(X, S);
  EXPECT_NEAR(sd.x_eigvals(0), 2.0, 1e-12);
  EXPECT_NEAR(sd.x_eigvals(1), 0.0, 1e-12);
  EXPECT_NEAR(sd.x_eigvals(2), 0.0, 1e-12);
  EXPECT_NEAR(sd.s_eigvals(0), 0.0, 1e-12);
  EXPECT_NEAR(sd.s_eigvals(1), 0.0, 1e-12);
  EXPECT_NEAR(sd.s_eigvals(2), -1.0, 1e-12);
  // First and last columns are fixed up to sign.
  EXPECT_NEAR(std::abs(sd.frame.col(0).dot(R.col(0))), 1.0, 1e-10);
  EXPECT_NEAR(std::abs(sd.frame.col(2).dot(R.col(2))), 1.0, 1e-10);
}

TEST(SimultaneousEigen, RejectsNonCommuting) {
  Mat s(2, 2);
  s << 0, 1, 1, 0;
  try {
    simultaneous_eigen(SymMatrix::diag({1, 0}), SymMatrix(s));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonCommuting);
  }
}

TEST(SimultaneousEigen, RandomComplementaryPairs) {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + t % 8;
    const auto ps = tiltcert::testing::random_pair(rng, n, t % 2 == 0);
    const auto sd = simultaneous_eigen(ps.X, ps.S);
    const Mat dx = sd.frame.transpose() * ps.X.mat() * sd.frame;
    const Mat ds = sd.frame.transpose() * ps.S.mat() * sd.frame;
    ASSERT_LE(max_abs(dx - Mat(dx.diagonal().asDiagonal())), 1e-9);
    ASSERT_LE(max_abs(ds - Mat(ds.diagonal().asDiagonal())), 1e-9);
    for (int i = 0; i + 1 < n; ++i) ASSERT_GE(sd.x_eigvals(i), sd.x_eigvals(i + 1) - 1e-12);
  }
}

TEST(PseudoInverse, Diagonal) {
  const SymMatrix p = pseudo_inverse(SymMatrix::diag({2, 0}));
  EXPECT_NEAR(max_abs(p.mat() - SymMatrix::diag({0.5, 0}).mat()), 0.0, 1e-15);
}

TEST(PseudoInverse, Zero) { EXPECT_EQ(pseudo_inverse(SymMatrix::zero(3)).max_abs(), 0.0); }

TEST(PseudoInverse, PenroseIdentities) {
  Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 5;
    const int r = 1 + t % (n - 1);
    Mat V(n, r);
    for (int j = 0; j < r; ++j) V.col(j) = random_normal(rng, n);
    const SymMatrix M(Mat(V * V.transpose()));
    const Mat Md = pseudo_inverse(M).mat();
    const Mat& m = M.mat();
    ASSERT_LE(max_abs(m * Md * m - m), 1e-8 * (1 + max_abs(m)));
    ASSERT_LE(max_abs(Md * m * Md - Md), 1e-8 * (1 + max_abs(Md)));
    ASSERT_LE(max_abs((m * Md).transpose() - m * Md), 1e-8);
    ASSERT_LE(max_abs((Md * m).transpose() - Md * m), 1e-8);
  }
}

TEST(Svec, InnerProductPreserved) {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + t % 6;
    const SymMatrix A = random_symmetric(rng, n), B = random_symmetric(rng, n);
    EXPECT_NEAR(svec(A).dot(svec(B)), frob_inner(A, B), 1e-12);
    EXPECT_LE(max_abs(smat(svec(A)).mat() - A.mat()), 1e-14);
  }
  const Vec v = svec(SymMatrix::identity(2));
  EXPECT_EQ(v.size(), 3);
  EXPECT_DOUBLE_EQ(v(0), 1.0);
  EXPECT_DOUBLE_EQ(v(1), 0.0);
  EXPECT_DOUBLE_EQ(v(2), 1.0);
}

TEST(Subspace, Intersection) {
  const auto U = subspace::span((Mat(3, 2) << 1, 0, 0, 1, 0, 0).finished());
  const auto V = subspace::span((Mat(3, 2) << 0, 0, 1, 0, 0, 1).finished());
  const auto W = subspace::intersection(U, V);
  ASSERT_EQ(W.dim(), 1);
  EXPECT_NEAR(std::abs(W.basis(1, 0)), 1.0, 1e-12);
}

TEST(Subspace, TraceKernel) {
  const Mat tr = svec(SymMatrix::identity(2)).transpose();
  const auto K = subspace::kernel(tr);
  ASSERT_EQ(K.dim(), 2);
  EXPECT_LE(max_abs(tr * K.basis), 1e-12);
}

TEST(Subspace, Inclusion) {
  const auto u = subspace::span((Mat(3, 1) << 1, 1, 0).finished());
  const auto v12 = subspace::span((Mat(3, 2) << 1, 0, 0, 1, 0, 0).finished());
  const auto v13 = subspace::span((Mat(3, 2) << 1, 0, 0, 0, 0, 1).finished());
  EXPECT_TRUE(subspace::includes(u, v12));
  EXPECT_FALSE(subspace::includes(u, v13));
}

TEST(Subspace, InclusionReflexiveTransitive) {
  Rng rng(21);
  for (int t = 0; t < 50; ++t) {
    const int n = 3 + t % 6;
    Mat B(n, n);
    for (int j = 0; j < n; ++j) B.col(j) = random_normal(rng, n);
    const auto a = subspace::span(B.leftCols(1));
    const auto b = subspace::span(B.leftCols(2));
    const auto c = subspace::span(B.leftCols(3));
    EXPECT_TRUE(subspace::includes(a, a));
    EXPECT_TRUE(subspace::includes(a, b));
    EXPECT_TRUE(subspace::includes(b, c));
    EXPECT_TRUE(subspace::includes(a, c));
    EXPECT_FALSE(subspace::includes(c, a));
  }
}

TEST(Subspace, SumAndComplement) {
  const auto U = subspace::span((Mat(3, 1) << 1, 0, 0).finished());
  const auto V = subspace::span((Mat(3, 1) << 1, 1, 0).finished());
  EXPECT_EQ(subspace::sum(U, V).dim(), 2);
  EXPECT_EQ(subspace::complement(U).dim(), 2);
  EXPECT_TRUE(std::isinf(subspace::min_singular_on(Mat::Identity(3, 3), subspace::zero(3))));
}
