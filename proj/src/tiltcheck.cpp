#include "tiltcert/tiltcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tiltcert/errors.hpp"
#include "tiltcert/random.hpp"

namespace tiltcert {

const char* upsilon_name(UpsilonKind k) {
  switch (k) {
    case UpsilonKind::Star: return "Star";
    case UpsilonKind::HatStar: return "HatStar";
    case UpsilonKind::TildeStar: return "TildeStar";
  }
  return "?";
}

const char* provenance_name(FrameProvenance p) {
  switch (p) {
    case FrameProvenance::Canonical: return "canonical";
    case FrameProvenance::SignFlip: return "sign_flip";
    case FrameProvenance::Sampled: return "sampled";
    case FrameProvenance::Refined: return "refined";
  }
  return "?";
}

const char* membership_name(Membership m) {
  switch (m) {
    case Membership::InSet: return "InSet";
    case Membership::NotInSet: return "NotInSet";
    case Membership::Inconclusive: return "Inconclusive";
  }
  return "?";
}

const char* final_name(FinalClass f) {
  switch (f) {
    case FinalClass::TiltStableCertified: return "TILT_STABLE_CERTIFIED";
    case FinalClass::NotTiltStableCertified: return "NOT_TILT_STABLE_CERTIFIED";
    case FinalClass::Undetermined: return "UNDETERMINED";
  }
  return "?";
}

namespace {

Mat cols_of(const Mat& R, const std::vector<int>& idx) {
  Mat out(R.rows(), static_cast<Eigen::Index>(idx.size()));
  for (size_t i = 0; i < idx.size(); ++i) out.col(i) = R.col(idx[i]);
  return out;
}

double off_diagonal(const Mat& M) {
  Mat o = M;
  o.diagonal().setZero();
  return o.norm();
}

// Column i is vec(∂ᵢg(x) U): the linear map w ↦ vec((g′w)U).
Mat times_map(const NsdpInstance& inst, const Vec& x, const Mat& U) {
  const int n = inst.n();
  const int r = static_cast<int>(U.cols());
  Mat out(n * r, inst.d);
  for (int i = 0; i < inst.d; ++i) {
    const Mat P = g_partial(inst, x, i).mat() * U;
    out.col(i) = Eigen::Map<const Vec>(P.data(), n * r);
  }
  return out;
}

SubspaceBasis base_space(const NsdpInstance& inst, const Vec& x, KernelExtra extra) {
  const int d = inst.d;
  SubspaceBasis L = subspace::full(d);
  const Mat& Q = inst.objective.Q;
  if (Q.size() && Q.cwiseAbs().maxCoeff() > 0.0) L = subspace::kernel(Q);
  if (inst.m() > 0) L = subspace::intersection(L, subspace::kernel(inst.A));
  if (extra == KernelExtra::WithVperp) {
    const Vec v = -grad_phi(inst, x);
    if (v.norm() > 0.0) L = subspace::intersection(L, subspace::kernel(Mat(v.transpose())));
  }
  return L;
}

// {w ∈ L : (g′w)U = 0}.
SubspaceBasis annihilated_within(const NsdpInstance& inst, const Vec& x, const SubspaceBasis& L, const Mat& U) {
  if (L.is_zero() || U.cols() == 0) return L;
  const Mat T = times_map(inst, x, U) * L.basis;
  const double sc = std::max(1.0, T.norm());
  const SubspaceBasis c = subspace::kernel(T / sc);
  SubspaceBasis out;
  out.ambient_dim = L.ambient_dim;
  out.basis = L.basis * c.basis;
  return out;
}

// Smallest achievable ‖(g′w) P_K V‖ over orthonormal V with g columns, and the minimizing V.
double star_residual(const Mat& B, int g, Mat* V) {
  Eigen::JacobiSVD<Mat> svd(B, Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  const int k = static_cast<int>(B.cols());
  double r2 = 0.0;
  for (int i = k - g; i < k; ++i) r2 += i < s.size() ? s(i) * s(i) : 0.0;
  if (V) *V = svd.matrixV().rightCols(g);
  return std::sqrt(r2);
}

}  // namespace

double frame_membership_residual(const FrameCandidate& f, const SpectralPair& pair) {
  double r = off_diagonal(f.R.transpose() * pair.X.mat() * f.R);
  if (f.kind == FrameConstraint::OXS) r = std::max(r, off_diagonal(f.R.transpose() * pair.S.mat() * f.R));
  return r;
}

double gamma_block_residual(const FrameCandidate& f, const SymMatrix& M, const IndexPartition& part) {
  if (M.dim() != f.R.rows()) throw Error(ErrorCode::DimensionMismatch, "gamma_block_residual: sizes differ");
  if (part.gamma.empty()) return 0.0;
  const Mat Rg = cols_of(f.R, part.gamma);
  return (f.R.transpose() * M.mat() * Rg).norm();
}

double split_form_residual(const FrameCandidate& f, const SymMatrix& M, const IndexPartition& part) {
  if (part.gamma.empty()) return 0.0;
  std::vector<int> ab = part.alpha;
  ab.insert(ab.end(), part.beta.begin(), part.beta.end());
  const Mat Wt = f.R.transpose() * M.mat() * f.R;
  double r2 = 0.0;
  for (int i : ab)
    for (int j : part.gamma) r2 += Wt(i, j) * Wt(i, j);
  for (int i : part.gamma)
    for (int j : part.gamma) r2 += Wt(i, j) * Wt(i, j);
  return std::sqrt(r2);
}

MembershipResult upsilon_membership(const NsdpInstance& inst, const Vec& x, const SpectralPair& pair,
                                    const Vec& w, UpsilonKind kind) {
  MembershipResult out;
  const SymMatrix M = g_jac_apply(inst, x, w);
  const IndexPartition& part = pair.partition;
  out.best.R = pair.frame;
  out.frames_searched = 1;
  const double tol = kMembershipTol * std::max(1.0, w.norm());
  if (kind == UpsilonKind::Star && !part.gamma.empty()) {
    const std::vector<int> ker = part.kernel();
    const Mat PK = cols_of(pair.frame, ker);
    const int g = static_cast<int>(part.gamma.size());
    const int k = static_cast<int>(ker.size());
    Eigen::JacobiSVD<Mat> svd(Mat(M.mat() * PK), Eigen::ComputeFullV);
    const Mat& V = svd.matrixV();
    // β positions take the leading right singular vectors, γ positions the trailing ones.
    for (int j = 0; j < k; ++j) out.best.R.col(ker[j]) = PK * V.col(j);
    out.best.kind = FrameConstraint::OX;
    out.best.provenance = g == k ? FrameProvenance::Canonical : FrameProvenance::Refined;
  } else {
    out.best.kind = kind == UpsilonKind::Star ? FrameConstraint::OX : FrameConstraint::OXS;
  }
  out.residual = gamma_block_residual(out.best, M, part);
  out.status = out.residual <= tol ? Membership::InSet : Membership::NotInSet;
  return out;
}

Verdict kernel_intersection(const NsdpInstance& inst, const Vec& x, const SpectralPair& pair, UpsilonKind kind,
                            KernelExtra extra, int budget, std::uint64_t seed) {
  Verdict v;
  v.condition_id = upsilon_name(kind);
  const SubspaceBasis L = base_space(inst, x, extra);
  const IndexPartition& part = pair.partition;
  const Mat Ug = pair.cols(part.gamma);
  const Mat PK = pair.cols(part.kernel());
  const int g = static_cast<int>(part.gamma.size());
  const int k = static_cast<int>(PK.cols());
  auto conclude = [&](const SubspaceBasis& S, const std::string& how) {
    v.frames_searched = std::max(v.frames_searched, 1);
    v.exact = true;
    if (S.is_zero()) {
      v.status = Tri::Holds;
    } else {
      v.status = Tri::Fails;
      v.witness = Vec(S.basis.col(0).normalized());
    }
    v.notes = how;
    return v;
  };
  if (L.is_zero()) return conclude(L, "base subspace is {0}");
  if (kind != UpsilonKind::Star) return conclude(annihilated_within(inst, x, L, Ug), "exact subspace (γ block fixed by the pair frame)");
  if (g == 0) return conclude(L, "γ is empty: every direction qualifies");
  if (g == k) return conclude(annihilated_within(inst, x, L, PK), "γ fills the kernel: single admissible subspace");
  if (L.dim() == 1) {
    const MembershipResult m = upsilon_membership(inst, x, pair, L.basis.col(0), kind);
    v.residual = m.residual;
    return conclude(m.status == Membership::InSet ? L : subspace::zero(inst.d), "one-dimensional base subspace");
  }
  // Canonical frame first: a nonzero per-frame subspace is already a witness.
  const SubspaceBasis canon = annihilated_within(inst, x, L, Ug);
  v.frames_searched = 1;
  if (!canon.is_zero()) {
    v.status = Tri::Fails;
    v.witness = Vec(canon.basis.col(0).normalized());
    v.notes = "canonical frame";
    return v;
  }
  // Alternating minimization over (w, V): V spans a γ-sized subspace of Ker g(x*).
  const double jscale = 1.0 + g_jacobian(inst, x).norm();
  Rng rng(seed);
  double best = std::numeric_limits<double>::infinity();
  for (int start = 0; start < budget; ++start) {
    Mat V = start == 0 ? Mat(PK.transpose() * Ug) : Mat(random_orthogonal(rng, k).leftCols(g));
    Vec w;
    double r = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200; ++it) {
      const Mat T = times_map(inst, x, Mat(PK * V)) * L.basis;
      Eigen::JacobiSVD<Mat> svd(T, Eigen::ComputeFullV);
      w = L.basis * svd.matrixV().col(L.dim() - 1);
      const SymMatrix M = g_jac_apply(inst, x, w);
      const double rn = star_residual(Mat(M.mat() * PK), g, &V);
      if (rn > r - 1e-14 * jscale) {
        r = std::min(r, rn);
        break;
      }
      r = rn;
    }
    ++v.frames_searched;
    best = std::min(best, r);
    if (r <= 1e-10 * jscale) {
      const MembershipResult m = upsilon_membership(inst, x, pair, w, kind);
      if (m.status == Membership::InSet) {
        v.status = Tri::Fails;
        v.witness = Vec(w.normalized());
        v.residual = m.residual;
        v.notes = "alternating frame search";
        return v;
      }
    }
  }
  v.residual = best;
  v.status = Tri::Inconclusive;
  std::ostringstream os;
  os << "no witness after " << v.frames_searched << " frame starts; best residual " << best;
  v.notes = os.str();
  return v;
}

double revalidate_witness(const NsdpInstance& inst, const Vec& x, const SymMatrix& S_star, const Vec& w,
                          UpsilonKind kind, KernelExtra extra) {
  const Vec u = w.normalized();
  const SpectralPair pair = classify(g_value(inst, x), S_star);
  double r = 0.0;
  if (inst.objective.Q.size()) r = std::max(r, (inst.objective.Q * u).norm());
  if (inst.m() > 0) r = std::max(r, (inst.A * u).norm());
  if (extra == KernelExtra::WithVperp) r = std::max(r, std::abs(grad_phi(inst, x).dot(u)));
  r = std::max(r, upsilon_membership(inst, x, pair, u, kind).residual);
  return r;
}

// ---------------------------------------------------------------------------
// Certification

namespace {

Hypothesis hyp(const std::string& id, Tri t, const std::string& detail = "") { return {id, t, detail}; }

Tri tri_of(bool b) { return b ? Tri::Holds : Tri::Fails; }

}  // namespace

StabilityReport certify(const NsdpInstance& inst, const Vec& x, const CertifyPolicy& policy) {
  StabilityReport rep;
  rep.instance = inst.name;
  rep.policy = policy;
  rep.x = x;
  rep.point = evaluate(inst, x);
  rep.vstar = rep.point.vstar;

  const Mat& Q = inst.objective.Q;
  double qmin = 0.0;
  if (Q.size()) {
    Eigen::SelfAdjointEigenSolver<Mat> es(Q, Eigen::EigenvaluesOnly);
    qmin = es.eigenvalues()(0);
  }
  if (qmin < -1e-9 * (1.0 + (Q.size() ? Q.norm() : 0.0)))
    throw Error(ErrorCode::HessianNotPsd, "objective Hessian has a negative eigenvalue");
  rep.hypotheses.push_back(hyp("hessian_psd", Tri::Holds));

  const MultiplierSystem ms = multiplier_system(inst, x, std::nullopt, policy.feas_tol);
  const MultiplierSet mset = multiplier_set(ms, policy.feas_tol);
  if (!mset.nonempty) throw Error(ErrorCode::NotStationary, "−∇φ(x) is not a normal vector at x: " + mset.outcome.note);

  const UniquenessResult uq = multiplier_S_unique(ms, policy.probes, policy.seed);
  rep.uniqueness = uq.status;
  rep.hypotheses.push_back(hyp("S_uniqueness", uq.status == Uniqueness::UniqueS      ? Tri::Holds
                                               : uq.status == Uniqueness::NotUnique ? Tri::Fails
                                                                                    : Tri::Inconclusive,
                               uniqueness_name(uq.status)));
  if (uq.status == Uniqueness::UniqueS) {
    rep.min_rank.mult = *uq.S_star;
    rep.min_rank.proven_minimal = true;
    rep.min_rank.report = "unique multiplier";
  } else {
    rep.min_rank = min_rank_multiplier(ms, ms.k() <= 6 ? RankMode::Exact : RankMode::TraceHeuristic);
  }
  rep.hypotheses.push_back(hyp("min_rank_multiplier", rep.min_rank.proven_minimal ? Tri::Holds : Tri::Inconclusive,
                               rep.min_rank.report));
  const Multiplier& chosen = uq.status == Uniqueness::UniqueS ? *uq.S_star : rep.min_rank.mult;
  rep.S_star = chosen.S;
  rep.y_star = chosen.y;
  const SpectralPair pair = classify(rep.point.Xval, rep.S_star);
  rep.partition = pair.partition;

  RegularityOptions ro;
  ro.witness_tol = policy.witness_tol;
  ro.restarts = policy.restarts;
  ro.seed = policy.seed;
  rep.regularity = regularity_report(inst, x, rep.S_star, ro);
  const RegularityReport& rg = rep.regularity;
  const bool regular = rg.metrically_regular == Tri::Holds;
  rep.hypotheses.push_back(hyp("metric_regularity", rg.metrically_regular, rg.slater ? "Slater point found" : ""));
  rep.hypotheses.push_back(hyp("g_affine", tri_of(inst.g.affine())));
  rep.hypotheses.push_back(hyp("condition_A", rg.condition_A));
  rep.hypotheses.push_back(hyp("condition_B", rg.condition_B));
  rep.hypotheses.push_back(hyp("Kstar_in_range", rg.Kstar_in_range));
  rep.hypotheses.push_back(hyp("B_injective", rg.B_injective));
  const bool unique = uq.status == Uniqueness::UniqueS;
  const bool necessary_ok = regular && inst.g.affine() &&
                            (rg.condition_A == Tri::Holds || rg.condition_B == Tri::Holds) &&
                            rg.Kstar_in_range == Tri::Holds && rg.B_injective == Tri::Holds;

  auto not_applicable = [](const std::string& id, const std::string& why) {
    Verdict v;
    v.condition_id = id;
    v.status = Tri::NotApplicable;
    v.notes = why;
    return v;
  };
  auto run = [&](const std::string& id, UpsilonKind kind, KernelExtra extra) {
    Verdict v = kernel_intersection(inst, x, pair, kind, extra, policy.frames, policy.seed);
    v.condition_id = id;
    return v;
  };

  // Sufficient conditions.
  if (!regular) {
    rep.verdicts.push_back(not_applicable("Scond1", "metric regularity not established"));
    rep.verdicts.push_back(not_applicable("Scond2", "metric regularity not established"));
  } else {
    if (rep.min_rank.proven_minimal) {
      const Multiplier& mr = rep.min_rank.mult;
      const SpectralPair pmin = classify(rep.point.Xval, mr.S);
      Verdict v = kernel_intersection(inst, x, pmin, UpsilonKind::Star, KernelExtra::WithVperp, policy.frames, policy.seed);
      v.condition_id = "Scond1";
      rep.verdicts.push_back(v);
    } else {
      rep.verdicts.push_back(not_applicable("Scond1", "minimum-rank multiplier not proven"));
    }
    if (unique) rep.verdicts.push_back(run("Scond2", UpsilonKind::HatStar, KernelExtra::None));
    else rep.verdicts.push_back(not_applicable("Scond2", "S-component of the multiplier set is not a singleton"));
  }
  // Necessary conditions hold for any multiplier.
  if (necessary_ok) {
    rep.verdicts.push_back(run("Ncond1", UpsilonKind::TildeStar, KernelExtra::None));
    rep.verdicts.push_back(run("Ncond2", UpsilonKind::HatStar, KernelExtra::None));
  } else {
    rep.verdicts.push_back(not_applicable("Ncond1", "hypotheses of the necessary condition not met"));
    rep.verdicts.push_back(not_applicable("Ncond2", "hypotheses of the necessary condition not met"));
  }
  rep.iff = necessary_ok && unique;

  const Verdict* sufficient = nullptr;
  const Verdict* necessary = nullptr;
  for (const Verdict& v : rep.verdicts) {
    if ((v.condition_id == "Scond1" || v.condition_id == "Scond2") && v.status == Tri::Holds && !sufficient) sufficient = &v;
    if ((v.condition_id == "Ncond1" || v.condition_id == "Ncond2") && v.status == Tri::Fails && !necessary) necessary = &v;
  }
  if (sufficient && necessary) {
    rep.final_class = FinalClass::Undetermined;
    rep.blocking = "conflicting verdicts";
    rep.iff = false;
  } else if (sufficient) {
    rep.final_class = FinalClass::TiltStableCertified;
    rep.deciding_condition = sufficient->condition_id;
  } else if (necessary) {
    rep.final_class = FinalClass::NotTiltStableCertified;
    rep.deciding_condition = necessary->condition_id;
    rep.witness = necessary->witness;
    const UpsilonKind kind = necessary->condition_id == "Ncond1" ? UpsilonKind::TildeStar : UpsilonKind::HatStar;
    rep.witness_revalidation = revalidate_witness(inst, x, rep.S_star, *rep.witness, kind, KernelExtra::None);
    if (rep.witness_revalidation > 1e-6) {
      rep.final_class = FinalClass::Undetermined;
      rep.blocking = "witness failed revalidation";
      rep.witness.reset();
    }
  } else {
    rep.final_class = FinalClass::Undetermined;
    rep.iff = false;
    if (!regular) rep.blocking = "metric regularity";
    else if (!unique && !rep.min_rank.proven_minimal) rep.blocking = "minimum-rank multiplier";
    else if (!necessary_ok) rep.blocking = "necessary-condition hypotheses";
    else rep.blocking = "inconclusive frame search";
  }
  if (rep.final_class == FinalClass::Undetermined) rep.iff = false;
  return rep;
}

}  // namespace tiltcert
