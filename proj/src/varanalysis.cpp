#include "tiltcert/varanalysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "tiltcert/errors.hpp"
#include "tiltcert/lmi.hpp"
#include "tiltcert/random.hpp"

namespace tiltcert {

const char* tri_name(Tri t) {
  switch (t) {
    case Tri::Holds: return "Holds";
    case Tri::Fails: return "Fails";
    case Tri::Inconclusive: return "Inconclusive";
    case Tri::NotApplicable: return "NotApplicable";
  }
  return "?";
}

const char* uniqueness_name(Uniqueness u) {
  switch (u) {
    case Uniqueness::UniqueS: return "UniqueS";
    case Uniqueness::NotUnique: return "NotUnique";
    case Uniqueness::Inconclusive: return "Inconclusive";
  }
  return "?";
}

std::string ExtendedReal::str() const {
  if (infinite) return "+inf";
  std::ostringstream os;
  os << std::setprecision(12) << value;
  return os.str();
}

int numeric_rank(const SymMatrix& M, double rank_tol) {
  if (M.dim() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Mat> es(M.mat(), Eigen::EigenvaluesOnly);
  const Vec ev = es.eigenvalues().cwiseAbs();
  const double cut = rank_tol * std::max(1.0, ev.maxCoeff());
  int r = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > cut) ++r;
  return r;
}

namespace {

// Columns svec(V E_j Vᵀ) for the svec basis E_j of S^r.
Mat lift_map(const Mat& V) {
  const int r = static_cast<int>(V.cols());
  const int n = static_cast<int>(V.rows());
  Mat T(svec_dim(n), svec_dim(r));
  for (int j = 0; j < svec_dim(r); ++j) T.col(j) = svec(congruence(V.transpose(), svec_basis(r, j)));
  return T;
}

Mat a_transpose(const Mat& A, int d) { return A.rows() ? Mat(A.transpose()) : Mat(d, 0); }

}  // namespace

SymMatrix MultiplierSystem::Z_of(const Vec& z) const {
  const int k = this->k();
  if (k == 0) return SymMatrix(0);
  return smat(z.segment(m(), svec_dim(k)), k);
}

Multiplier MultiplierSystem::decode(const Vec& z, double rank_tol) const {
  Multiplier out;
  out.y = z.head(m());
  const int n = frame.n();
  if (k() == 0) {
    out.S = SymMatrix(n);
  } else {
    out.S = congruence(P_K.transpose(), Z_of(z));
    out.S = SymMatrix(Mat(-out.S.mat()));
  }
  out.rank = numeric_rank(out.S, rank_tol);
  return out;
}

AffinePsdProblem MultiplierSystem::restricted(const Mat& V) const {
  const int d = static_cast<int>(x.size());
  const int r = static_cast<int>(V.cols());
  AffinePsdProblem p;
  p.free_dim = m();
  if (r > 0) p.psd_blocks = {r};
  const Mat T = r > 0 ? Mat(-J.transpose() * lift_map(Mat(P_K * V))) : Mat(d, 0);
  p.E.resize(d, m() + T.cols());
  p.E << a_transpose(A, d), T;
  p.e = vstar;
  return p;
}

double MultiplierSystem::eq_residual(const Vec& y, const SymMatrix& S) const {
  Vec r = J.transpose() * svec(S) - vstar;
  if (m() > 0) r += A.transpose() * y;
  return r.norm();
}

double MultiplierSystem::normal_residual(const SymMatrix& S) const {
  return cone_residual(ConeKind::Normal, frame, S);
}

MultiplierSystem multiplier_system(const NsdpInstance& inst, const Vec& x, const std::optional<Vec>& vstar,
                                   double tol) {
  const PointReport rep = evaluate(inst, x);
  if (rep.eq_residual > tol * (1.0 + inst.b.norm()) || rep.psd_residual > tol * (1.0 + rep.Xval.norm())) {
    std::ostringstream os;
    os << "point is infeasible: equality residual " << rep.eq_residual << ", psd residual " << rep.psd_residual;
    throw Error(ErrorCode::InfeasiblePoint, os.str());
  }
  MultiplierSystem sys;
  sys.x = x;
  sys.vstar = vstar ? *vstar : rep.vstar;
  if (sys.vstar.size() != inst.d) throw Error(ErrorCode::DimensionMismatch, "multiplier_system: v has wrong length");
  sys.frame = classify_point(rep.Xval);
  sys.P_K = sys.frame.cols(sys.frame.partition.kernel());
  sys.A = inst.A;
  sys.J = g_jacobian(inst, x);
  sys.eq = sys.restricted(Mat::Identity(sys.k(), sys.k()));
  return sys;
}

MultiplierSet multiplier_set(const MultiplierSystem& sys, double tol) {
  MultiplierSet out;
  out.outcome = solve_feasibility(sys.eq, tol);
  out.nonempty = out.outcome.status == SolveStatus::Feasible;
  if (out.nonempty) out.sample = sys.decode(out.outcome.point);
  return out;
}

// ---------------------------------------------------------------------------
// Minimum rank

namespace {

Vec lift_restricted(const MultiplierSystem& sys, const Mat& V, const Vec& zr) {
  Vec z(sys.eq.dim());
  z.head(sys.m()) = zr.head(sys.m());
  if (sys.k() > 0) {
    const int r = static_cast<int>(V.cols());
    const SymMatrix Zr = r > 0 ? smat(zr.tail(svec_dim(r)), r) : SymMatrix(0);
    const SymMatrix Z = r > 0 ? congruence(V.transpose(), Zr) : SymMatrix(sys.k());
    z.tail(svec_dim(sys.k())) = svec(Z);
  }
  return z;
}

std::vector<std::vector<int>> subsets_of_size(int k, int r) {
  std::vector<std::vector<int>> out;
  std::vector<bool> pick(k, false);
  std::fill(pick.begin(), pick.begin() + r, true);
  do {
    std::vector<int> s;
    for (int i = 0; i < k; ++i)
      if (pick[i]) s.push_back(i);
    out.push_back(s);
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return out;
}

Mat eigenframe(const SymMatrix& Z) {
  // Columns ordered by decreasing eigenvalue so that small supports pick the dominant directions.
  Eigen::SelfAdjointEigenSolver<Mat> es(Z.mat());
  return es.eigenvectors().rowwise().reverse();
}

}  // namespace

MinRankResult min_rank_multiplier(const MultiplierSystem& sys, RankMode mode, double rank_tol) {
  MinRankResult out;
  out.mode = mode;
  const int k = sys.k();
  const MultiplierSet base = multiplier_set(sys);
  if (!base.nonempty)
    throw Error(ErrorCode::NotStationary, std::string("multiplier set is empty: ") + base.outcome.note);

  if (mode == RankMode::TraceHeuristic) {
    if (k == 0) {
      out.mult = base.sample;
      out.proven_minimal = true;
      out.report = "trace: no kernel block";
      return out;
    }
    AffinePsdProblem p = sys.eq;
    Vec ell = Vec::Zero(p.dim());
    ell.tail(svec_dim(k)) = -svec(SymMatrix::identity(k));
    p.objective = ell;
    const SolveOutcome o = maximize_linear(p);
    if (o.status != SolveStatus::Optimal)
      throw Error(ErrorCode::NumericalFailure, std::string("trace minimization failed: ") + o.note);
    out.mult = sys.decode(o.point, rank_tol);
    out.proven_minimal = out.mult.rank == 0;
    out.report = "trace: min tr Z = " + ExtendedReal::finite(-o.value).str();
    return out;
  }

  if (k > 6) throw Error(ErrorCode::BudgetExceeded, "exact minimum-rank search supports kernel order ≤ 6");
  if (k == 0) {
    out.mult = base.sample;
    out.proven_minimal = true;
    out.report = "exact: no kernel block";
    return out;
  }
  // Candidate frames: the kernel frame itself and eigenframes of a few multipliers
  // (a generic one, the trace minimizer and a boundary point).
  std::vector<Mat> frames{Mat::Identity(k, k)};
  frames.push_back(eigenframe(sys.Z_of(base.outcome.point)));
  {
    AffinePsdProblem p = sys.eq;
    Vec ell = Vec::Zero(p.dim());
    ell.tail(svec_dim(k)) = -svec(SymMatrix::identity(k));
    p.objective = ell;
    const SolveOutcome o = maximize_linear(p);
    if (o.status == SolveStatus::Optimal) frames.push_back(eigenframe(sys.Z_of(o.point)));
    Rng rng(derive_seed(11, static_cast<std::uint64_t>(k)));
    ell.tail(svec_dim(k)) = svec(random_symmetric(rng, k));
    p.objective = ell;
    const SolveOutcome b = maximize_linear(p);
    if (b.status == SolveStatus::Optimal) frames.push_back(eigenframe(sys.Z_of(b.point)));
  }
  const bool singleton = reduce(sys.eq).N.cols() == 0;
  for (int r = 0; r <= k; ++r) {
    const int frames_here = r == 0 || r == k ? 1 : static_cast<int>(frames.size());
    for (int f = 0; f < frames_here; ++f) {
      for (const auto& I : subsets_of_size(k, r)) {
        Mat V(k, r);
        for (int j = 0; j < r; ++j) V.col(j) = frames[f].col(I[j]);
        const SolveOutcome o = solve_feasibility(sys.restricted(V), 1e-9, 600);
        ++out.patterns_tested;
        if (o.status != SolveStatus::Feasible) continue;
        out.mult = sys.decode(lift_restricted(sys, V, o.point), rank_tol);
        // r ≤ 1 is exact (rank 0 is a linear test); r = k − 1 is exact for k ≤ 2 by the boundary argument.
        out.proven_minimal = out.mult.rank <= 1 || singleton || (out.mult.rank == k - 1 && k <= 2);
        std::ostringstream os;
        os << "exact: support of size " << r << " in frame " << f << " after " << out.patterns_tested
           << " patterns";
        out.report = os.str();
        return out;
      }
    }
  }
  throw Error(ErrorCode::NumericalFailure, "exact minimum-rank search found no feasible support");
}

// ---------------------------------------------------------------------------
// Uniqueness of the S-component

UniquenessResult multiplier_S_unique(const MultiplierSystem& sys, int probes, std::uint64_t seed) {
  UniquenessResult out;
  const int k = sys.k();
  const ReducedProblem rp = reduce(sys.eq);
  if (!rp.consistent) throw Error(ErrorCode::NotStationary, "multiplier equations are inconsistent");
  const MultiplierSet base = multiplier_set(sys);
  if (!base.nonempty) throw Error(ErrorCode::NotStationary, std::string("multiplier set is empty: ") + base.outcome.note);
  // Z is pinned by the equations alone.
  const double z_freedom = k == 0 ? 0.0 : (rp.N.bottomRows(svec_dim(k))).norm();
  if (k == 0 || rp.N.cols() == 0 || z_freedom < 1e-12) {
    out.status = Uniqueness::UniqueS;
    out.S_star = base.sample;
    return out;
  }
  Rng rng(seed);
  for (int t = 0; t < probes; ++t) {
    const SymMatrix R = random_symmetric(rng, k);
    Vec ell = Vec::Zero(sys.eq.dim());
    ell.tail(svec_dim(k)) = svec(R) / R.norm();
    AffinePsdProblem hi = sys.eq, lo = sys.eq;
    hi.objective = ell;
    lo.objective = Vec(-ell);
    const SolveOutcome a = maximize_linear(hi);
    const SolveOutcome b = maximize_linear(lo);
    if (a.status == SolveStatus::UnboundedCertificate || b.status == SolveStatus::UnboundedCertificate) {
      const SolveOutcome& u = a.status == SolveStatus::UnboundedCertificate ? a : b;
      out.status = Uniqueness::NotUnique;
      out.max_spread = std::numeric_limits<double>::infinity();
      out.witnesses = {sys.decode(u.point), sys.decode(Vec(u.point + *u.certificate))};
      return out;
    }
    if (a.status != SolveStatus::Optimal || b.status != SolveStatus::Optimal) continue;
    const double spread = a.value + b.value;
    out.max_spread = std::max(out.max_spread, spread);
    if (spread >= 1e-5) {
      out.status = Uniqueness::NotUnique;
      out.witnesses = {sys.decode(a.point), sys.decode(b.point)};
      return out;
    }
  }
  if (out.max_spread <= 1e-7) {
    out.status = Uniqueness::UniqueS;
    out.S_star = base.sample;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Second subderivatives

ExtendedReal d2_indicator_affine(const NsdpInstance& inst, const Vec& /*x*/, const Vec& /*v*/, const Vec& w,
                                 double tol) {
  if (inst.m() == 0) return ExtendedReal::finite(0.0);
  return (inst.A * w).norm() <= tol * (1.0 + w.norm()) ? ExtendedReal::finite(0.0) : ExtendedReal::inf();
}

double curvature_term(const NsdpInstance& inst, const Vec& x, const SymMatrix& S, const Vec& w) {
  const SymMatrix W = g_jac_apply(inst, x, w);
  const SymMatrix Xd = pseudo_inverse(g_value(inst, x));
  const Mat M = g_hess_quad(inst, x, w).mat() - 2.0 * W.mat() * Xd.mat() * W.mat();
  return frob_inner(S.mat(), M);
}

D2Result d2_indicator_Gamma(const NsdpInstance& inst, const Vec& x, const Vec& v, const Vec& w, double tol) {
  D2Result out;
  const MultiplierSystem sys = multiplier_system(inst, x, v);
  const SymMatrix W = g_jac_apply(inst, x, w);
  double res = cone_residual(ConeKind::Tangent, sys.frame, W);
  if (inst.m() > 0) res += (inst.A * w).norm();
  res += std::abs(v.dot(w));
  out.domain_residual = res;
  const double scale = 1.0 + w.norm() * (1.0 + v.norm() + sys.J.norm() + inst.A.norm());
  // Membership in N_Γ(x) is a precondition in every case.
  const MultiplierSet ms = multiplier_set(sys);
  if (!ms.nonempty) throw Error(ErrorCode::NotStationary, "v is not a normal vector of the feasible set at x");
  if (res > tol * scale) {
    out.value = ExtendedReal::inf();
    out.note = "direction outside the critical cone";
    return out;
  }
  if (w.norm() == 0.0) {
    out.value = ExtendedReal::finite(0.0);
    out.attaining = ms.sample;
    return out;
  }
  const int k = sys.k();
  if (k == 0) {
    out.value = ExtendedReal::finite(0.0);
    out.attaining = ms.sample;
    out.note = "g(x) is positive definite";
    return out;
  }
  const SymMatrix Xd = pseudo_inverse(g_value(inst, x));
  const SymMatrix M(Mat(g_hess_quad(inst, x, w).mat() - 2.0 * W.mat() * Xd.mat() * W.mat()));
  AffinePsdProblem p = sys.eq;
  Vec ell = Vec::Zero(p.dim());
  ell.tail(svec_dim(k)) = -svec(congruence(sys.P_K, M));
  p.objective = ell;
  const SolveOutcome o = maximize_linear(p);
  switch (o.status) {
    case SolveStatus::Optimal:
      out.value = ExtendedReal::finite(o.value);
      out.attaining = sys.decode(o.point);
      return out;
    case SolveStatus::UnboundedCertificate:
      out.value = ExtendedReal::inf();
      out.note = "multiplier supremum is unbounded";
      return out;
    case SolveStatus::Infeasible:
      throw Error(ErrorCode::NotStationary, "v is not a normal vector of the feasible set at x");
    default:
      throw Error(ErrorCode::NumericalFailure, "second subderivative: " + o.note);
  }
}

D2Result d2_total(const NsdpInstance& inst, const Vec& x, const Vec& v, const Vec& w, double tol) {
  D2Result r = d2_indicator_Gamma(inst, x, Vec(v - grad_phi(inst, x)), w, tol);
  if (!r.value.infinite) r.value.value += w.dot(inst.objective.Q * w);
  return r;
}

// ---------------------------------------------------------------------------
// Regularity

bool condition_A_holds(const Mat& J, const Mat& A, const SymMatrix& X) {
  const SubspaceBasis Nsp = span_normal_basis(X);
  if (Nsp.is_zero()) return true;
  Mat M = J.transpose() * Nsp.basis;
  if (A.rows() > 0) {
    const SubspaceBasis imA = subspace::image(Mat(A.transpose()));
    M -= imA.basis * (imA.basis.transpose() * M);
  }
  // Rank relative to ‖J‖, not ‖M‖: M can be pure roundoff when Jᵀ kills Sp(N).
  if (M.cols() > M.rows()) return false;
  const double smin = Eigen::JacobiSVD<Mat>(M).singularValues().minCoeff();
  return smin > subspace::kRankTol * std::max(1.0, J.norm());
}

bool condition_B_holds(const Mat& J, const Mat& A, const SymMatrix& X) {
  const int d = static_cast<int>(J.cols());
  const SubspaceBasis kerA = A.rows() > 0 ? subspace::kernel(A) : subspace::full(d);
  if (kerA.is_zero()) return true;
  const SubspaceBasis lin = lin_tangent_basis(X);
  const Mat img = J * kerA.basis;
  const Mat off = img - lin.basis * (lin.basis.transpose() * img);
  return off.norm() <= 1e-9 * (1.0 + img.norm());
}

SubspaceBasis kstar_span(const SpectralPair& pair) {
  return annihilator_basis(pair.cols(pair.partition.gamma), pair.n());
}

namespace {

// g restricted to the affine set {Ax = b}, as an LMI in the null-space parameters.
bool constraint_lmi(const NsdpInstance& inst, Vec& x0, Mat& N, lmi::System& sys) {
  const int d = inst.d;
  if (inst.m() > 0) {
    if (!lmi::solve_affine(inst.A, inst.b, x0, N)) return false;
  } else {
    x0 = Vec::Zero(d);
    N = Mat::Identity(d, d);
  }
  const int p = static_cast<int>(N.cols());
  lmi::Block blk;
  blk.F0 = g_value(inst, x0).mat();
  for (int i = 0; i < p; ++i) blk.F.push_back(g_jac_apply(inst, x0, Vec(N.col(i))).mat());
  if (!inst.g.affine()) {
    blk.H.resize(static_cast<size_t>(p) * p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) {
        Mat h = Mat::Zero(inst.n(), inst.n());
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) {
            const double c = N(a, i) * N(b, j);
            if (c != 0.0) h += c * inst.g.H[a][b].mat();
          }
        blk.H[static_cast<size_t>(i) * p + j] = h;
      }
  }
  sys.p = p;
  sys.blocks = {blk};
  return true;
}

}  // namespace

RegularityReport regularity_report(const NsdpInstance& inst, const Vec& x, const SymMatrix& S_star,
                                   const RegularityOptions& opt) {
  RegularityReport rep;
  const SymMatrix X = g_value(inst, x);
  const MultiplierSystem ms = multiplier_system(inst, x, Vec(Vec::Zero(inst.d)));
  const int k = ms.k();
  const double scale = 1.0 + X.norm();

  // Slater: maximize the smallest eigenvalue of g over the affine set.
  Vec x0;
  Mat N;
  lmi::System cs;
  if (constraint_lmi(inst, x0, N, cs)) {
    const Vec hint = N.transpose() * (x - x0);
    Vec u;
    rep.slater_margin = N.cols() == 0 ? min_eig(g_value(inst, x0))
                                      : lmi::max_min_eig(cs, hint, 1e4 * (1.0 + x.norm()), &u);
    if (N.cols() == 0) u = Vec(0);
    if (rep.slater_margin > 1e-7 * scale) {
      rep.slater = true;
      rep.slater_point = Vec(x0 + N * u);
    }
  }

  // Nonzero H = P_K Z P_Kᵀ ⪰ 0 with ∇g(x)H ∈ Im A* obstructs regularity.
  if (k == 0) {
    rep.imply1_max = 0.0;
    rep.metrically_regular = Tri::Holds;
  } else {
    AffinePsdProblem sec;
    sec.free_dim = ms.m();
    sec.psd_blocks = {k};
    sec.E.resize(inst.d, ms.m() + svec_dim(k));
    sec.E << a_transpose(inst.A, inst.d), ms.J.transpose() * lift_map(ms.P_K);
    sec.e = Vec::Zero(inst.d);
    sec.ball_radius = 1.0;
    const SectionSearch s = max_norm_on_section(sec, 1e-8, opt.restarts, opt.seed, opt.witness_tol);
    rep.imply1_max = s.max_value;
    if (s.witness_found && s.max_value >= opt.witness_tol) {
      const SymMatrix Z = smat(s.argmax.tail(svec_dim(k)), k);
      rep.imply1_witness = svec(congruence(ms.P_K.transpose(), Z));
      rep.metrically_regular = Tri::Fails;
    } else if (s.proven_zero || rep.slater) {
      rep.metrically_regular = Tri::Holds;
    } else {
      rep.metrically_regular = Tri::Inconclusive;
    }
  }
  if (rep.slater) rep.metrically_regular = Tri::Holds;
  rep.m_locally_bounded = rep.metrically_regular;

  if (inst.g.affine()) {
    const Mat J = g_jacobian(inst, x);
    rep.condition_A = condition_A_holds(J, inst.A, X) ? Tri::Holds : Tri::Fails;
    rep.condition_B = condition_B_holds(J, inst.A, X) ? Tri::Holds : Tri::Fails;
    const SpectralPair pair = classify(X, S_star);
    rep.Kstar_in_range =
        subspace::includes(kstar_span(pair), subspace::image(J)) ? Tri::Holds : Tri::Fails;
    rep.B_injective = subspace::kernel(J).is_zero() ? Tri::Holds : Tri::Fails;
  }
  return rep;
}

}  // namespace tiltcert
