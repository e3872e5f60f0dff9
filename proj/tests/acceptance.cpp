#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "testutil.hpp"
#include "tiltcert/report.hpp"
#include "tiltcert/varanalysis.hpp"

using namespace tiltcert;
using namespace tiltcert::testing;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Check {
  int id;
  double limit_s;
  std::function<Outcome()> body;
};

Mat kernel_cols(const SymMatrix& X) {
  Eigen::SelfAdjointEigenSolver<Mat> es(X.mat());
  const double tol = 1e-9 * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff());
  std::vector<int> idx;
  for (int i = 0; i < X.dim(); ++i)
    if (es.eigenvalues()(i) <= tol) idx.push_back(i);
  Mat out(X.dim(), idx.size());
  for (size_t j = 0; j < idx.size(); ++j) out.col(j) = es.eigenvectors().col(idx[j]);
  return out;
}

Mat positive_cols(const SymMatrix& X) {
  Eigen::SelfAdjointEigenSolver<Mat> es(X.mat());
  const double tol = 1e-9 * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff());
  std::vector<int> idx;
  for (int i = 0; i < X.dim(); ++i)
    if (es.eigenvalues()(i) > tol) idx.push_back(i);
  Mat out(X.dim(), idx.size());
  for (size_t j = 0; j < idx.size(); ++j) out.col(j) = es.eigenvectors().col(idx[j]);
  return out;
}

int svd_rank(const Mat& M, double rel = 1e-9) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(M);
  const Vec s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) r += s(i) > rel * s(0);
  return r;
}

// Rotates the frame independently inside each α cluster, β and each γ cluster.
SpectralPair reframed(Rng& rng, const SpectralPair& pr) {
  SpectralPair out = pr;
  Mat Q = Mat::Identity(pr.n(), pr.n());
  std::vector<std::vector<int>> groups = pr.partition.alpha_blocks;
  groups.push_back(pr.partition.beta);
  for (const auto& g : pr.partition.gamma_blocks) groups.push_back(g);
  for (const auto& g : groups) {
    if (g.size() < 2) continue;
    const Mat R = random_orthogonal(rng, static_cast<int>(g.size()));
    for (size_t i = 0; i < g.size(); ++i)
      for (size_t j = 0; j < g.size(); ++j) Q(g[i], g[j]) = R(i, j);
  }
  out.frame = pr.frame * Q;
  return out;
}

Outcome cone_suite() {
  Rng rng(20240101);
  int worst_polar = 0, crit_mismatch = 0, frame_mismatch = 0, members = 0, nontrivial_frames = 0;
  double polar_max = -1e300, frame_dev = 0.0;
  for (int t = 0; t < 500; ++t) {
    const int n = 1 + t % 8;
    const PairSample ps = random_pair(rng, n, t % 2 == 0);
    const SpectralPair pt = classify_point(ps.X);
    const SymMatrix W = random_direction(rng, pt, {.kk_psd = true});
    const auto K = pt.partition.kernel();
    Mat Nt = Mat::Zero(n, n);
    Mat G(K.size(), K.size());
    for (int j = 0; j < G.cols(); ++j) G.col(j) = random_normal(rng, static_cast<int>(K.size()));
    const Mat nsd = -(G * G.transpose());
    for (size_t i = 0; i < K.size(); ++i)
      for (size_t j = 0; j < K.size(); ++j) Nt(K[i], K[j]) = nsd(i, j);
    const SymMatrix N(Mat(pt.frame * Nt * pt.frame.transpose()));
    if (cone_residual(ConeKind::Tangent, pt, W) > 1e-9 || cone_residual(ConeKind::Normal, pt, N) > 1e-9) ++worst_polar;
    const double ip = frob_inner(W, N);
    polar_max = std::max(polar_max, ip);
    if (ip > 1e-8) ++worst_polar;

    const SpectralPair pr = classify(ps.X, ps.S);
    BlockMask mask;
    mask.zero_kgamma = t % 3 != 0;
    mask.beta_psd = t % 2 == 0;
    mask.kk_psd = t % 5 == 0;
    const SymMatrix D = random_direction(rng, pr, mask);
    const bool crit = cone_residual(ConeKind::Critical, pr, D) <= 1e-8;
    const bool tan_perp =
        cone_residual(ConeKind::Tangent, pr, D) <= 1e-8 && std::abs(frob_inner(D, ps.S)) <= 1e-8;
    crit_mismatch += crit != tan_perp;
    members += crit;

    const SpectralPair pr2 = reframed(rng, pr);
    nontrivial_frames += (pr2.frame - pr.frame).norm() > 1e-6;
    for (ConeKind k : {ConeKind::Tangent, ConeKind::Normal, ConeKind::Critical}) {
      const double dev = std::abs(cone_residual(k, pr, D) - cone_residual(k, pr2, D));
      frame_dev = std::max(frame_dev, dev);
      frame_mismatch += dev > 1e-8;
    }
    if (crit) {
      const double dev = std::abs(second_tangent_support(pr, D) - second_tangent_support(pr2, D));
      frame_dev = std::max(frame_dev, dev);
      frame_mismatch += dev > 1e-8;
    }
  }
  std::ostringstream os;
  os << "polarity violations " << worst_polar << " (max <W,S> " << polar_max << "), critical mismatches "
     << crit_mismatch << " (" << members << " members), frame deviations " << frame_mismatch << " (max "
     << frame_dev << ", " << nontrivial_frames << " rotated frames)";
  return {worst_polar == 0 && crit_mismatch == 0 && frame_mismatch == 0 && members > 50 && nontrivial_frames > 50,
          os.str()};
}

Outcome support_check() {
  Rng rng(20240102);
  double worst = 0.0, sigma_max = -1e300;
  int bad = 0;
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 8;
    const PairSample ps = random_pair(rng, n, t % 2 == 1);
    const SpectralPair pr = classify(ps.X, ps.S);
    const SymMatrix W = random_direction(rng, pr, {.zero_kgamma = true, .beta_psd = true});
    const double a = second_tangent_support(pr, W), b = second_tangent_support_eigen_form(pr, W);
    const double dev = std::abs(a - b) / (1.0 + std::abs(a));
    worst = std::max(worst, dev);
    sigma_max = std::max(sigma_max, a);
    bad += dev > 1e-8 || a > 0.0;
  }
  std::ostringstream os;
  os << "max relative deviation " << worst << ", max sigma " << sigma_max;
  return {bad == 0, os.str()};
}

Outcome affine_indicator() {
  Rng rng(20240103);
  int zero = 0, inf = 0;
  for (int t = 0; t < 100; ++t) {
    const Planted pl = planted_unique(rng, 2 + t % 3, 1);
    const SubspaceBasis ker = subspace::kernel(pl.inst.A);
    const Vec v = Vec::Zero(pl.inst.d);
    const Vec w_in = ker.basis * random_normal(rng, ker.dim());
    const ExtendedReal a = d2_indicator_affine(pl.inst, pl.x, v, w_in);
    zero += !a.infinite && a.value == 0.0;
    const Vec w_out = w_in + pl.inst.A.transpose() * random_normal(rng, pl.inst.m());
    inf += d2_indicator_affine(pl.inst, pl.x, v, w_out).infinite;
  }
  std::ostringstream os;
  os << zero << "/100 kernel directions gave exactly 0, " << inf << "/100 others gave +inf";
  return {zero == 100 && inf == 100, os.str()};
}

Outcome second_subderivative() {
  Rng rng(20240104);
  std::vector<Planted> cases;
  Planted e1;
  e1.inst = instance_e1();
  e1.x = point_e1();
  e1.X = smat(e1.x);
  e1.S = diag_mat({0, -1});
  const SubspaceBasis crit = subspace::intersection(lin_tangent_basis(e1.X), subspace::kernel(e1.inst.A));
  for (int t = 0; t < 10; ++t) e1.critical.push_back(crit.basis * random_normal(rng, crit.dim()));
  cases.push_back(e1);
  for (int t = 0; t < 20; ++t) cases.push_back(planted_unique(rng, 2 + t % 3, 10));
  double worst = 0.0;
  int checked = 0, bad = 0;
  for (const Planted& pl : cases) {
    const Vec vstar = -grad_phi(pl.inst, pl.x);
    for (const Vec& w : pl.critical) {
      const D2Result r = d2_indicator_Gamma(pl.inst, pl.x, vstar, w);
      const double ref = curvature_term(pl.inst, pl.x, pl.S, w);
      ++checked;
      if (r.value.infinite) {
        ++bad;
        continue;
      }
      worst = std::max(worst, std::abs(r.value.value - ref));
      bad += std::abs(r.value.value - ref) > 1e-6;
    }
  }
  std::ostringstream os;
  os << checked << " directions, max deviation " << worst;
  return {bad == 0 && checked == 210, os.str()};
}

Outcome min_rank() {
  Rng rng(20240105);
  int exact_ok = 0, trace_ok = 0, trace_below = 0;
  for (int t = 0; t < 20; ++t) {
    const int r = t % 3;
    const int n = std::min(4, std::max(r + 2, 2 + t % 3));
    const Planted pl = planted_min_rank(rng, n, r);
    const MultiplierSystem sys = multiplier_system(pl.inst, pl.x);
    exact_ok += min_rank_multiplier(sys, RankMode::Exact).mult.rank == r;
    const int tr = min_rank_multiplier(sys, RankMode::TraceHeuristic).mult.rank;
    trace_ok += tr == r;
    trace_below += tr < r;
  }
  std::ostringstream os;
  os << "exact " << exact_ok << "/20, trace heuristic " << trace_ok << "/20, below r " << trace_below;
  return {exact_ok == 20 && trace_ok >= 15 && trace_below == 0, os.str()};
}

struct AffineCase {
  NsdpInstance inst;
  SymMatrix X, S;
};

// g(x) = X + Σ xᵢGᵢ at x = 0, with several degenerate constructions mixed in.
AffineCase random_affine_case(Rng& rng, int t) {
  const int n = 2 + t % 2;
  const int N = svec_dim(n);
  PairSample ps = random_pair(rng, n);
  AffineCase c;
  c.X = ps.X;
  c.S = ps.S;
  const int kind = t % 5;
  int d = 1 + static_cast<int>(rng() % static_cast<unsigned>(N + 1));
  if (kind == 3) d = N + 1;
  Mat J(N, d);
  for (int j = 0; j < d; ++j) J.col(j) = random_normal(rng, N);
  const SubspaceBasis lin = lin_tangent_basis(c.X);
  if (kind == 1 && !lin.is_zero())
    for (int j = 0; j < d; ++j) J.col(j) = lin.basis * random_normal(rng, lin.dim());
  if (kind == 4 && d >= 2) J.col(d - 1) = J.col(0);
  int m = static_cast<int>(rng() % static_cast<unsigned>(std::min(d, 3)));
  Mat A(m, d);
  for (int i = 0; i < m; ++i) A.row(i) = random_normal(rng, d).transpose();
  const SubspaceBasis spn = span_normal_basis(c.X);
  if (kind == 2 && !spn.is_zero() && spn.dim() < d) {
    const Mat rows = (J.transpose() * spn.basis).transpose();
    A = rows;
  }
  NsdpInstance& inst = c.inst;
  inst.name = "affine";
  inst.form = InstanceForm::Lmi;
  inst.d = d;
  inst.objective.Q = Mat::Zero(d, d);
  inst.objective.c = Vec::Zero(d);
  inst.A = A;
  inst.b = Vec::Zero(A.rows());
  inst.g.n = n;
  inst.g.G0 = c.X;
  for (int j = 0; j < d; ++j) inst.g.G.push_back(smat(Vec(J.col(j)), n));
  return c;
}

Outcome conditions() {
  Rng rng(20240106);
  int disagreements = 0, counted = 0;
  int holds[4] = {0, 0, 0, 0}, fails[4] = {0, 0, 0, 0};
  std::string first_issue;
  for (int t = 0; t < 50; ++t) {
    const AffineCase c = random_affine_case(rng, t);
    const NsdpInstance& inst = c.inst;
    const int d = inst.d, n = inst.n();
    const Vec x0 = Vec::Zero(d);
    const Mat J = g_jacobian(inst, x0);
    const Mat& A = inst.A;
    const Mat PK = kernel_cols(c.X);
    const int k = static_cast<int>(PK.cols());

    auto perp_rowspace = [&](const Vec& v) -> Vec {
      if (A.rows() == 0) return v;
      const Mat AAt = A * A.transpose();
      return v - A.transpose() * AAt.ldlt().solve(A * v);
    };
    // (A): Sp(N) → (Im A*)⊥ component of Jᵀ svec(·) is injective.
    bool brute_A = true;
    if (k > 0) {
      Mat cols(d, 1000);
      for (int s = 0; s < 1000; ++s) {
        const Mat Z = random_symmetric(rng, k).mat();
        cols.col(s) = perp_rowspace(J.transpose() * svec(SymMatrix(Mat(PK * Z * PK.transpose()))));
      }
      brute_A = svd_rank(cols) == k * (k + 1) / 2;
    }
    // (B): J Ker A ⊂ lin T(X), i.e. P_Kᵀ (g′w) P_K = 0.
    bool brute_B = true;
    for (int s = 0; s < 1000 && k > 0; ++s) {
      const Vec w = perp_rowspace(random_normal(rng, d));
      const Vec Jw = J * w;
      const Mat blk = PK.transpose() * smat(Jw, n).mat() * PK;
      if (blk.norm() > 1e-9 * (1.0 + Jw.norm())) brute_B = false;
    }
    // K*: samples with zero γ rows and a PSD ββ block must lie in Im J.
    const Mat Pa = positive_cols(c.X);
    Mat Pb, Pg;
    {
      Pb.resize(n, 0);
      Pg.resize(n, 0);
      if (k > 0) {
        const Mat SK = PK.transpose() * c.S.mat() * PK;
        Eigen::SelfAdjointEigenSolver<Mat> es(SK);
        std::vector<int> bi, gi;
        for (int i = 0; i < k; ++i) (es.eigenvalues()(i) < -1e-9 ? gi : bi).push_back(i);
        Pb.resize(n, bi.size());
        Pg.resize(n, gi.size());
        for (size_t j = 0; j < bi.size(); ++j) Pb.col(j) = PK * es.eigenvectors().col(bi[j]);
        for (size_t j = 0; j < gi.size(); ++j) Pg.col(j) = PK * es.eigenvectors().col(gi[j]);
      }
    }
    bool brute_K = true;
    {
      Mat Pab(n, Pa.cols() + Pb.cols());
      Pab << Pa, Pb;
      const int a = static_cast<int>(Pa.cols()), b = static_cast<int>(Pb.cols());
      const Eigen::CompleteOrthogonalDecomposition<Mat> cod(J);
      for (int s = 0; s < 1000 && a + b > 0; ++s) {
        Mat M = random_symmetric(rng, a + b).mat();
        if (b > 0) {
          Mat G(b, b);
          for (int j = 0; j < b; ++j) G.col(j) = random_normal(rng, b);
          M.bottomRightCorner(b, b) = G * G.transpose();
        }
        const Vec wv = svec(SymMatrix(Mat(Pab * M * Pab.transpose())));
        const Vec res = J * cod.solve(wv) - wv;
        if (res.norm() > 1e-8 * (1.0 + wv.norm())) brute_K = false;
      }
    }
    const bool brute_inj = svd_rank(J) == d;

    const RegularityReport rep = regularity_report(inst, x0, c.S);
    const bool lib[4] = {condition_A_holds(J, A, c.X) && rep.condition_A == Tri::Holds,
                         condition_B_holds(J, A, c.X) && rep.condition_B == Tri::Holds,
                         rep.Kstar_in_range == Tri::Holds, rep.B_injective == Tri::Holds};
    const bool brute[4] = {brute_A, brute_B, brute_K, brute_inj};
    const char* names[4] = {"A", "B", "K*", "injective"};
    for (int q = 0; q < 4; ++q) {
      ++counted;
      (brute[q] ? holds : fails)[q]++;
      if (lib[q] != brute[q]) {
        ++disagreements;
        if (first_issue.empty()) first_issue = " first: instance " + std::to_string(t) + " condition " + names[q];
      }
    }
  }
  std::ostringstream os;
  os << disagreements << " disagreements over " << counted << " checks; holds/fails A " << holds[0] << "/" << fails[0]
     << ", B " << holds[1] << "/" << fails[1] << ", K* " << holds[2] << "/" << fails[2] << ", injective "
     << holds[3] << "/" << fails[3] << first_issue;
  bool both = true;
  for (int q = 0; q < 4; ++q) both = both && holds[q] > 0 && fails[q] > 0;
  return {disagreements == 0 && both, os.str()};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome end_to_end() {
  std::ostringstream os;
  bool ok = true;
  double slowest = 0.0;
  auto timed = [&](const NsdpInstance& inst, const Vec& x) {
    const auto t0 = std::chrono::steady_clock::now();
    StabilityReport r = certify(inst, x);
    slowest = std::max(slowest, seconds_since(t0));
    return r;
  };
  const StabilityReport e1 = timed(instance_e1(), point_e1());
  ok = ok && e1.final_class == FinalClass::TiltStableCertified;
  os << "E1 " << final_name(e1.final_class);

  const StabilityReport e2 = timed(instance_e2(), point_e2());
  bool nec_fail = false;
  for (const Verdict& v : e2.verdicts)
    if (v.condition_id.rfind("Ncond", 0) == 0 && v.status == Tri::Fails && v.witness) nec_fail = true;
  ok = ok && e2.final_class != FinalClass::TiltStableCertified && nec_fail;
  os << "; E2 " << final_name(e2.final_class) << (nec_fail ? " with necessary-condition witness" : " without witness");

  const StabilityReport e3 = timed(instance_e3(), point_e3());
  const bool e3_ok = e3.final_class == FinalClass::NotTiltStableCertified && e3.witness &&
                     e3.witness_revalidation <= 1e-6;
  ok = ok && e3_ok;
  os << "; E3 " << final_name(e3.final_class) << " revalidation " << e3.witness_revalidation;

  const StabilityReport e4 = timed(instance_e4(), point_e4());
  ok = ok && e4.final_class == FinalClass::Undetermined && e4.blocking.find("metric regularity") != std::string::npos;
  os << "; E4 " << final_name(e4.final_class) << " blocked by '" << e4.blocking << "'";
  os << "; slowest " << slowest << " s";
  return {ok && slowest <= 10.0, os.str()};
}

Outcome oracle_battery() {
  std::ostringstream os;
  bool ok = true;
  double slowest = 0.0;
  const std::vector<std::pair<NsdpInstance, Vec>> cases{
      {instance_e1(), point_e1()}, {instance_e2(), point_e2()}, {instance_e3(), point_e3()}};
  const OracleVerdict want[3] = {OracleVerdict::StableLikely, OracleVerdict::UnstableLikely,
                                 OracleVerdict::UnstableLikely};
  for (int i = 0; i < 3; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    const OracleVerdict v = oracle_verdict(empirical_profile(cases[i].first, cases[i].second));
    slowest = std::max(slowest, seconds_since(t0));
    ok = ok && v == want[i];
    os << (i ? ", " : "") << "E" << i + 1 << " " << oracle_name(v);
  }
  os << "; slowest " << slowest << " s";
  return {ok && slowest <= 120.0, os.str()};
}

// Smallest singular value of w ↦ (Qw, smat(w)P_γ), relative to max(1, ‖Q‖).
double structured_sigma(const Planted& pl) {
  const NsdpInstance& inst = pl.inst;
  const int d = inst.d, n = inst.n();
  Eigen::SelfAdjointEigenSolver<Mat> es(pl.S.mat());
  std::vector<int> gi;
  for (int i = 0; i < n; ++i)
    if (es.eigenvalues()(i) < -1e-9) gi.push_back(i);
  Mat Pg(n, gi.size());
  for (size_t j = 0; j < gi.size(); ++j) Pg.col(j) = es.eigenvectors().col(gi[j]);
  const double scale = std::max(1.0, inst.objective.Q.norm());
  Mat T(d + n * Pg.cols(), d);
  for (int k = 0; k < d; ++k) {
    Vec e = Vec::Zero(d);
    e(k) = 1.0;
    const Mat WP = smat(e, n).mat() * Pg;
    T.col(k) << inst.objective.Q.col(k) / scale, Eigen::Map<const Vec>(WP.data(), WP.size());
  }
  return Eigen::JacobiSVD<Mat>(T).singularValues().minCoeff();
}

Outcome psdp1_iff() {
  Rng rng(2024);
  int compared = 0, agree = 0, inconclusive = 0, borderline = 0, no_iff = 0;
  std::string mismatches;
  for (int t = 0; t < 20; ++t) {
    const Planted pl = planted_psdp1(rng, 2 + t % 2);
    const double sigma = structured_sigma(pl);
    if (sigma > 1e-9 && sigma < 1e-4) {
      ++borderline;
      continue;
    }
    const StabilityReport r = certify(pl.inst, pl.x);
    if (!r.iff || r.final_class == FinalClass::Undetermined) {
      ++no_iff;
      continue;
    }
    const OracleVerdict v = oracle_verdict(empirical_profile(pl.inst, pl.x));
    if (v == OracleVerdict::Inconclusive) {
      ++inconclusive;
      continue;
    }
    ++compared;
    const bool stable = r.final_class == FinalClass::TiltStableCertified;
    if (stable == (v == OracleVerdict::StableLikely)) {
      ++agree;
    } else {
      std::ostringstream m;
      m << " #" << t << "(" << final_name(r.final_class) << " vs " << oracle_name(v) << ")";
      mismatches += m.str();
    }
  }
  std::ostringstream os;
  os << agree << "/" << compared << " agree, " << inconclusive << " oracle-inconclusive, " << borderline
     << " borderline, " << no_iff << " without an iff verdict";
  if (!mismatches.empty()) os << "; mismatches" << mismatches;
  return {compared > 0 && agree == compared, os.str()};
}

void strip_timestamps(json& j) {
  if (j.is_object()) {
    j.erase("generated_at");
    for (auto& [k, v] : j.items()) strip_timestamps(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_timestamps(v);
  }
}

Outcome determinism() {
  auto run_all = [] {
    std::string out;
    const std::vector<std::pair<NsdpInstance, Vec>> cases{{instance_e1(), point_e1()},
                                                          {instance_e2(), point_e2()},
                                                          {instance_e3(), point_e3()},
                                                          {instance_e4(), point_e4()}};
    for (const auto& [inst, x] : cases) {
      json j = to_json(certify(inst, x));
      strip_timestamps(j);
      out += j.dump();
    }
    ProfileOptions opt;
    opt.num_tilts = 6;
    const TiltProfile p = empirical_profile(instance_e1(), point_e1(), opt);
    json j = to_json(p, oracle_verdict(p));
    strip_timestamps(j);
    return out + j.dump();
  };
  const size_t a = std::hash<std::string>{}(run_all());
  const size_t b = std::hash<std::string>{}(run_all());
  std::ostringstream os;
  os << "hashes " << std::hex << a << " and " << b;
  return {a == b, os.str()};
}

}  // namespace

int main() {
  const std::vector<Check> checks{
      {1, 30, cone_suite},          {2, 5, support_check},   {3, 1, affine_indicator},
      {4, 60, second_subderivative}, {5, 120, min_rank},     {6, 30, conditions},
      {7, 40, end_to_end},          {8, 360, oracle_battery}, {9, 600, psdp1_iff},
      {10, 10, determinism}};
  int failed = 0;
  for (const Check& c : checks) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    const bool pass = o.pass && secs <= c.limit_s;
    failed += !pass;
    std::printf("criterion %d: %s (%.2f s, limit %.0f s) %s\n", c.id, pass ? "PASS" : "FAIL", secs, c.limit_s,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(checks.size()) - failed, checks.size());
  return failed == 0 ? 0 : 1;
}
