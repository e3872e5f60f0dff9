#include <gtest/gtest.h>

#include <cmath>

#include "testutil.hpp"
#include "tiltcert/errors.hpp"
#include "tiltcert/tiltsim.hpp"

using namespace tiltcert;
using namespace tiltcert::testing;

namespace {

// Tilted E1 with the ball inactive: the minimizer is uuᵀ for the bottom eigenvector u of C − V.
Vec e1_tilted_solution(const Vec& v) {
  const Mat M = diag_mat({1, 2}).mat() - smat(v).mat();
  Eigen::SelfAdjointEigenSolver<Mat> es(M);
  const Vec u = es.eigenvectors().col(0);
  return svec(SymMatrix(Mat(u * u.transpose())));
}

NsdpInstance psd_quadratic(Rng& rng, int n) {
  const PairSample ps = random_pair(rng, n);
  NsdpInstance inst = make_primal(SymMatrix(Mat::Zero(n, n)), {}, Vec(0));
  const int d = inst.d;
  const Mat B = Mat::NullaryExpr(d, 2, [&]() { return uniform(rng, -1.0, 1.0); });
  inst.objective.Q = B * B.transpose();
  inst.objective.c = -inst.objective.Q * svec(ps.X) - svec(ps.S);
  inst.point = svec(ps.X);
  return inst;
}

}  // namespace

TEST(SolveTilted, E1ZeroTiltSingleCluster) {
  const TiltSolution s = solve_tilted(instance_e1(), point_e1(), Vec::Zero(3), 0.5);
  EXPECT_EQ(s.status, SimStatus::Converged);
  ASSERT_EQ(s.clusters.size(), 1u);
  EXPECT_LE((s.best - point_e1()).norm(), 1e-8);
  EXPECT_LE(s.diameter, 1e-8);
}

TEST(SolveTilted, E1MatchesEigenvectorOracle) {
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const Vec v = 0.05 * random_unit(rng, 3);
    const TiltSolution s = solve_tilted(instance_e1(), point_e1(), v, 1.0);
    EXPECT_LE((s.best - e1_tilted_solution(v)).norm(), 1e-7);
  }
}

TEST(SolveTilted, E2WholeFaceIsOptimal) {
  TiltSolveOptions opt;
  opt.starts = 12;
  const TiltSolution s = solve_tilted(instance_e2(), point_e2(), Vec::Zero(3), std::sqrt(2.0) + 0.1, opt);
  EXPECT_GT(s.clusters.size(), 1u);
  EXPECT_GT(s.diameter, 0.3);
  for (double val : s.values) EXPECT_NEAR(val, 0.0, 1e-8);
}

TEST(SolveTilted, TinyBallKeepsPointsClose) {
  Rng rng(8);
  for (int t = 0; t < 10; ++t) {
    const Vec v = random_unit(rng, 6);
    const TiltSolution s = solve_tilted(instance_e3(), point_e3(), v, 1e-3);
    for (const Vec& x : s.clusters) EXPECT_LE((x - point_e3()).norm(), 1e-3 + 1e-9);
  }
}

TEST(SolveTilted, RecordedSolutionsAreFeasibleAndNoWorseThanReference) {
  Rng rng(10);
  const std::vector<std::pair<NsdpInstance, Vec>> cases{
      {instance_e1(), point_e1()}, {instance_e2(), point_e2()}, {instance_e3(), point_e3()}};
  for (const auto& [inst, x] : cases) {
    for (int t = 0; t < 5; ++t) {
      const Vec v = 1e-2 * random_normal(rng, inst.d);
      const TiltSolution s = solve_tilted(inst, x, v, default_delta(x));
      EXPECT_LE(s.feas_residual, 1e-8);
      for (size_t i = 0; i < s.clusters.size(); ++i) {
        EXPECT_LE(ball_feasibility_residual(inst, x, default_delta(x), s.clusters[i]), 1e-8);
        EXPECT_LE(s.values[i], 1e-10);
      }
    }
  }
}

TEST(SolveTilted, Errors) {
  NsdpInstance quad = instance_e1();
  quad.g.H.assign(3, std::vector<SymMatrix>(3, SymMatrix(Mat::Zero(2, 2))));
  EXPECT_THROW(solve_tilted(quad, point_e1(), Vec::Zero(3), 0.5), Error);
  try {
    solve_tilted(instance_e1(), point_e1(), Vec::Zero(3), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
  try {
    solve_tilted(instance_e1(), svec(diag_mat({2, 0})), Vec::Zero(3), 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasiblePoint);
  }
}

TEST(Profile, E1StableShape) {
  const TiltProfile p = empirical_profile(instance_e1(), point_e1());
  EXPECT_EQ(p.samples.size(), 63u);
  EXPECT_DOUBLE_EQ(p.delta, 1.0);
  EXPECT_LE(p.multiplicity_gap_max, 1e-6);
  ASSERT_TRUE(p.lip_ratio_max);
  EXPECT_LE(*p.lip_ratio_max, 10.0);
  EXPECT_EQ(p.flagged, 0);
  ASSERT_TRUE(p.lip_ratio_refined);
  EXPECT_LE(*p.lip_ratio_refined, 10.0);
  EXPECT_EQ(oracle_verdict(p), OracleVerdict::StableLikely);
}

// X* = 0 with an indefinite direction in Ker Q: the minimizer jumps across a hyperplane of tilts,
// and the jump scales with ‖v‖, so only bisection reveals it.
TEST(Profile, RefinementExposesHomogeneousJump) {
  NsdpInstance inst = make_primal(SymMatrix(Mat::Zero(2, 2)), {}, Vec(0));
  const Vec w = svec(diag_mat({1, -1})) / std::sqrt(2.0);
  inst.objective.Q = Mat::Identity(3, 3) - w * w.transpose();
  inst.objective.c = Vec::Zero(3);
  const TiltProfile p = empirical_profile(inst, Vec::Zero(3));
  ASSERT_TRUE(p.lip_ratio_max && p.lip_ratio_refined);
  EXPECT_LE(*p.lip_ratio_max, 1e3);
  EXPECT_GT(*p.lip_ratio_refined, 1e3);
  EXPECT_GT(p.refine_solves, 0);
  EXPECT_EQ(oracle_verdict(p), OracleVerdict::UnstableLikely);
}

TEST(Profile, E3Jumps) {
  const TiltProfile p = empirical_profile(instance_e3(), point_e3());
  EXPECT_GE(p.multiplicity_gap_max, 0.5);
  EXPECT_EQ(oracle_verdict(p), OracleVerdict::UnstableLikely);
}

TEST(Profile, TiltsComeInAntipodalPairs) {
  ProfileOptions opt;
  opt.decade = false;
  opt.num_tilts = 7;
  const TiltProfile p = empirical_profile(instance_e1(), point_e1(), opt);
  ASSERT_EQ(p.samples.size(), 7u);
  EXPECT_EQ(p.samples[0].v.norm(), 0.0);
  for (int i = 1; i < 7; i += 2) {
    EXPECT_EQ(p.samples[i].v, Vec(-p.samples[i + 1].v));
    EXPECT_LE(p.samples[i].v.norm(), opt.tilt_radius);
  }
}

TEST(Profile, SingleTiltHasNoRatio) {
  ProfileOptions opt;
  opt.num_tilts = 1;
  const TiltProfile p = empirical_profile(instance_e1(), point_e1(), opt);
  EXPECT_EQ(p.samples.size(), 1u);
  EXPECT_FALSE(p.lip_ratio_max);
  EXPECT_EQ(oracle_verdict(p), OracleVerdict::Inconclusive);
}

TEST(Profile, EmptyIsInconclusive) { EXPECT_EQ(oracle_verdict(TiltProfile{}), OracleVerdict::Inconclusive); }

TEST(Profile, ReproducibleForFixedSeed) {
  ProfileOptions opt;
  opt.num_tilts = 9;
  const std::string a = profile_csv(empirical_profile(instance_e3(), point_e3(), opt));
  const std::string b = profile_csv(empirical_profile(instance_e3(), point_e3(), opt));
  EXPECT_EQ(a, b);
  opt.seed = 8;
  EXPECT_NE(a, profile_csv(empirical_profile(instance_e3(), point_e3(), opt)));
}

TEST(Profile, CsvHasOneRowPerSample) {
  ProfileOptions opt;
  opt.num_tilts = 5;
  const TiltProfile p = empirical_profile(instance_e1(), point_e1(), opt);
  const std::string csv = profile_csv(p);
  EXPECT_EQ(static_cast<size_t>(std::count(csv.begin(), csv.end(), '\n')), p.samples.size() + 1);
  EXPECT_EQ(csv.rfind("index,scale,norm_v", 0), 0u);
}

TEST(Oracle, Thresholds) {
  TiltProfile p;
  p.samples.resize(2);
  p.lip_ratio_max = 2.0;
  p.lip_ratio_max_decade = 2.0;
  EXPECT_EQ(oracle_verdict(p), OracleVerdict::StableLikely);
  p.multiplicity_gap_max = 0.2;
  EXPECT_EQ(oracle_verdict(p), OracleVerdict::UnstableLikely);
  p.multiplicity_gap_max = 1e-3;
  EXPECT_EQ(oracle_verdict(p), OracleVerdict::Inconclusive);
  p.multiplicity_gap_max = 0.0;
  p.lip_ratio_max_decade = 10.0;
  EXPECT_EQ(oracle_verdict(p), OracleVerdict::Inconclusive);  // stable and diverging at once
  p.lip_ratio_max = 2e3;
  EXPECT_EQ(oracle_verdict(p), OracleVerdict::Inconclusive);
  p.lip_ratio_max_decade = 2e4;
  EXPECT_EQ(oracle_verdict(p), OracleVerdict::UnstableLikely);
  p.lip_ratio_max = 2.0;
  p.lip_ratio_max_decade = 2.0;
  p.lip_ratio_refined = 5e3;
  EXPECT_EQ(oracle_verdict(p), OracleVerdict::UnstableLikely);
}

// The optimal value of the tilted problem is a minimum of affine functions of v.
TEST(Property, TiltedValueIsConcaveOnSegments) {
  Rng rng(12);
  std::vector<std::pair<NsdpInstance, Vec>> cases{{instance_e1(), point_e1()}, {instance_e3(), point_e3()}};
  NsdpInstance q = psd_quadratic(rng, 2);
  cases.push_back({q, *q.point});
  TiltSolveOptions opt;
  opt.starts = 2;
  for (const auto& [inst, x] : cases) {
    const double delta = default_delta(x);
    for (int t = 0; t < 20; ++t) {
      const Vec a = 0.05 * random_normal(rng, inst.d);
      const Vec b = 0.05 * random_normal(rng, inst.d);
      const double fa = solve_tilted(inst, x, a, delta, opt).best_value;
      const double fb = solve_tilted(inst, x, b, delta, opt).best_value;
      const double fm = solve_tilted(inst, x, Vec(0.5 * (a + b)), delta, opt).best_value;
      EXPECT_GE(fm, 0.5 * (fa + fb) - 1e-8);
    }
  }
}

TEST(MinimizeObjective, RecoversBatteryOptima) {
  EXPECT_LE((minimize_objective(instance_e1()) - point_e1()).norm(), 1e-7);
  EXPECT_LE((minimize_objective(instance_e4()) - point_e4()).norm(), 1e-6);
  // E2: every feasible point is optimal; the result must at least be feasible.
  const Vec x2 = minimize_objective(instance_e2());
  EXPECT_LE(ball_feasibility_residual(instance_e2(), x2, 1e9, x2), 1e-8);
}

TEST(MinimizeObjective, QuadraticOracle) {
  Rng rng(31);
  for (int t = 0; t < 5; ++t) {
    NsdpInstance q = psd_quadratic(rng, 2);
    q.objective.Q += Mat::Identity(q.d, q.d);  // strictly convex; the planted point stays stationary
    q.objective.c -= *q.point;
    EXPECT_LE((minimize_objective(q) - *q.point).norm(), 1e-6);
  }
}

TEST(MinimizeObjective, UnboundedAndEmpty) {
  const NsdpInstance free = make_primal(diag_mat({-1, 0}), {}, Vec(0));
  EXPECT_THROW(minimize_objective(free), Error);
  const NsdpInstance empty = make_primal(diag_mat({1, 1}), {SymMatrix::identity(2)}, -Vec::Ones(1));
  try {
    minimize_objective(empty);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasiblePoint);
  }
}
