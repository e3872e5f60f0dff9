#include "tiltcert/conicsolve.hpp"

#include <cmath>
#include <sstream>

#include "tiltcert/random.hpp"

namespace tiltcert {

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Feasible: return "Feasible";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::UnboundedCertificate: return "UnboundedCertificate";
    case SolveStatus::IterationLimit: return "IterationLimit";
  }
  return "?";
}

int AffinePsdProblem::dim() const {
  int d = free_dim;
  for (int k : psd_blocks) d += svec_dim(k);
  return d;
}

int AffinePsdProblem::block_offset(int t) const {
  int o = free_dim;
  for (int i = 0; i < t; ++i) o += svec_dim(psd_blocks[i]);
  return o;
}

SymMatrix AffinePsdProblem::block(const Vec& z, int t) const {
  return smat(z.segment(block_offset(t), svec_dim(psd_blocks[t])), psd_blocks[t]);
}

void AffinePsdProblem::check() const {
  const int d = dim();
  if (E.size() == 0 && e.size() == 0) return;
  if (E.cols() != d || E.rows() != e.size()) throw Error(ErrorCode::DimensionMismatch, "AffinePsdProblem: E/e shape");
  if (objective && objective->size() != d) throw Error(ErrorCode::DimensionMismatch, "AffinePsdProblem: objective length");
  if (ball_radius && !(*ball_radius > 0)) throw Error(ErrorCode::InvalidArgument, "AffinePsdProblem: ball radius must be positive");
}

namespace {

Mat rows_of(const AffinePsdProblem& p) { return p.E.size() ? p.E : Mat(0, p.dim()); }
Vec rhs_of(const AffinePsdProblem& p) { return p.e.size() ? p.e : Vec(0); }

Vec project_cone(const AffinePsdProblem& p, const Vec& z) {
  Vec out = z;
  for (int t = 0; t < static_cast<int>(p.psd_blocks.size()); ++t) {
    const int k = p.psd_blocks[t];
    Eigen::SelfAdjointEigenSolver<Mat> es(p.block(z, t).mat());
    const Vec lam = es.eigenvalues().cwiseMax(0.0);
    const Mat Z = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    out.segment(p.block_offset(t), svec_dim(k)) = svec(SymMatrix(Z));
  }
  return out;
}

Vec project_ball(double r, const Vec& z) {
  const double n = z.norm();
  return n > r ? Vec(z * (r / n)) : z;
}

}  // namespace

double eq_residual(const AffinePsdProblem& p, const Vec& z) {
  const Mat E = rows_of(p);
  return E.rows() ? (E * z - rhs_of(p)).norm() : 0.0;
}

double psd_residual(const AffinePsdProblem& p, const Vec& z) {
  double r = 0.0;
  for (int t = 0; t < static_cast<int>(p.psd_blocks.size()); ++t)
    if (p.psd_blocks[t] > 0) r = std::max(r, -min_eig(p.block(z, t)));
  if (p.ball_radius) r = std::max(r, z.norm() - *p.ball_radius);
  return std::max(r, 0.0);
}

ReducedProblem reduce(const AffinePsdProblem& p) {
  p.check();
  ReducedProblem rp;
  const Mat E = rows_of(p);
  const Vec e = rhs_of(p);
  if (!lmi::solve_affine(E, e, rp.z0, rp.N)) {
    rp.consistent = false;
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(E);
    const Vec r = e - E * cod.solve(e);
    rp.inconsistency = -r;
    return rp;
  }
  const int q = static_cast<int>(rp.N.cols());
  rp.sys.p = q;
  for (int t = 0; t < static_cast<int>(p.psd_blocks.size()); ++t) {
    const int k = p.psd_blocks[t];
    if (k == 0) continue;
    const int o = p.block_offset(t), sd = svec_dim(k);
    lmi::Block b;
    b.F0 = smat(rp.z0.segment(o, sd), k).mat();
    for (int i = 0; i < q; ++i) b.F.push_back(smat(Vec(rp.N.col(i).segment(o, sd)), k).mat());
    rp.sys.add_block(std::move(b));
  }
  if (p.ball_radius) {
    const double r = *p.ball_radius;
    lmi::Block b;
    b.F0 = Mat::Constant(1, 1, r * r - rp.z0.squaredNorm());
    const Vec lin = -2.0 * rp.N.transpose() * rp.z0;
    const Mat quad = -2.0 * rp.N.transpose() * rp.N;
    for (int i = 0; i < q; ++i) b.F.push_back(Mat::Constant(1, 1, lin(i)));
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) b.H.push_back(Mat::Constant(1, 1, quad(i, j)));
    if (q == 0) b.H.clear();
    rp.sys.add_block(std::move(b));
  }
  return rp;
}

bool verify_farkas(const AffinePsdProblem& p, const Vec& y) {
  const Mat E = rows_of(p);
  if (y.size() != E.rows() || E.rows() == 0) return false;
  const Vec q = E.transpose() * y;
  const double ey = rhs_of(p).dot(y);
  const double scale = std::max(q.cwiseAbs().maxCoeff(), 1e-300);
  if (!(ey < -1e-12 * (1.0 + y.norm() * rhs_of(p).norm()))) return false;
  for (int i = 0; i < p.free_dim; ++i)
    if (std::abs(q(i)) > 1e-10 * std::max(scale, 1.0)) return false;
  for (int t = 0; t < static_cast<int>(p.psd_blocks.size()); ++t) {
    if (p.psd_blocks[t] == 0) continue;
    if (min_eig(p.block(q, t)) < -1e-10 * std::max(scale, 1.0)) return false;
  }
  return true;
}

DykstraResult dykstra_project(const AffinePsdProblem& p, const Vec& start, double feas_tol, int max_sweeps) {
  DykstraResult out;
  const ReducedProblem rp = reduce(p);
  const int d = p.dim();
  Vec x = start.size() == d ? start : Vec(Vec::Zero(d));
  if (!rp.consistent) {
    out.point = x;
    if (verify_farkas(p, rp.inconsistency)) out.farkas = rp.inconsistency;
    return out;
  }
  auto proj_affine = [&](const Vec& z) { return Vec(rp.z0 + rp.N * (rp.N.transpose() * (z - rp.z0))); };
  const bool ball = p.ball_radius.has_value();
  Vec pa = Vec::Zero(d), pk = Vec::Zero(d), pb = Vec::Zero(d);
  for (int s = 0; s < max_sweeps; ++s) {
    Vec y = x + pa;
    x = proj_affine(y);
    pa = y - x;
    const Vec a = x;
    y = x + pk;
    x = project_cone(p, y);
    pk = y - x;
    if (ball) {
      y = x + pb;
      x = project_ball(*p.ball_radius, y);
      pb = y - x;
    }
    ++out.sweeps;
    out.dist_affine.push_back((x - proj_affine(x)).norm());
    const Vec ka = project_cone(p, a);
    out.dist_cone.push_back((a - ka).norm());
    const double ea = eq_residual(p, x);
    if (ea <= feas_tol && psd_residual(p, x) <= feas_tol) {
      out.point = x;
      out.converged = true;
      return out;
    }
    if (psd_residual(p, a) <= feas_tol && (!ball || a.norm() <= *p.ball_radius + feas_tol)) {
      out.point = a;
      out.converged = true;
      return out;
    }
    if ((s + 1) % 50 == 0 && p.E.rows() > 0) {
      // Separation candidate q = P_K(a) − a lies in the row space of E at a best-approximation pair.
      const Vec q = ka - a;
      if (q.norm() > feas_tol) {
        Eigen::CompleteOrthogonalDecomposition<Mat> cod(p.E.transpose());
        const Vec yf = cod.solve(q);
        if (verify_farkas(p, yf)) {
          out.point = x;
          out.farkas = yf;
          return out;
        }
      }
    }
  }
  out.point = x;
  return out;
}

namespace {

SolveOutcome finish(const AffinePsdProblem& p, SolveStatus st, const Vec& z) {
  SolveOutcome o;
  o.status = st;
  o.point = z;
  o.eq_residual = eq_residual(p, z);
  o.psd_residual = psd_residual(p, z);
  if (p.objective) o.value = p.objective->dot(z);
  return o;
}

}  // namespace

SolveOutcome solve_feasibility(const AffinePsdProblem& p, double feas_tol, int max_iter) {
  const ReducedProblem rp = reduce(p);
  SolveOutcome out;
  if (!rp.consistent) {
    out.status = SolveStatus::Infeasible;
    out.certificate = rp.inconsistency;
    out.note = "equality constraints are inconsistent";
    return out;
  }
  if (rp.sys.blocks.empty()) return finish(p, SolveStatus::Feasible, rp.z0);
  const DykstraResult dk = dykstra_project(p, Vec::Zero(p.dim()), feas_tol, std::min(max_iter, 2000));
  if (dk.converged) {
    SolveOutcome o = finish(p, SolveStatus::Feasible, dk.point);
    o.iterations = dk.sweeps;
    o.note = "alternating projections";
    return o;
  }
  if (dk.farkas) {
    out.status = SolveStatus::Infeasible;
    out.certificate = dk.farkas;
    out.iterations = dk.sweeps;
    out.note = "separating certificate from alternating projections";
    return out;
  }
  const lmi::Region reg = lmi::find_region(rp.sys, Vec::Zero(rp.sys.p));
  if (reg.kind == lmi::Region::Kind::Feasible) {
    SolveOutcome o = finish(p, SolveStatus::Feasible, rp.z0 + rp.N * reg.point());
    o.iterations = dk.sweeps;
    o.note = "barrier with facial reduction";
    if (o.eq_residual <= feas_tol * (1.0 + rhs_of(p).norm()) && o.psd_residual <= feas_tol) return o;
    // Clean a boundary point by a few more projections started from it.
    const DykstraResult d2 = dykstra_project(p, o.point, feas_tol, 500);
    if (d2.converged) {
      SolveOutcome c = finish(p, SolveStatus::Feasible, d2.point);
      c.note = o.note;
      return c;
    }
    o.status = SolveStatus::IterationLimit;
    o.note = "feasible region found but residuals exceed tolerance";
    return o;
  }
  if (reg.kind == lmi::Region::Kind::Infeasible && reg.certified) {
    out.status = SolveStatus::Infeasible;
    out.note = reg.note;
    if (!reg.certificate.empty()) {
      Vec c(0);
      for (const Mat& W : reg.certificate) {
        const Vec s = svec(SymMatrix(W));
        Vec nc(c.size() + s.size());
        nc << c, s;
        c = nc;
      }
      out.certificate = c;
    }
    return out;
  }
  out.status = SolveStatus::IterationLimit;
  out.iterations = dk.sweeps;
  out.note = reg.note.empty() ? "undecided" : reg.note;
  return out;
}

SolveOutcome maximize_linear(const AffinePsdProblem& p, double tol) {
  const ReducedProblem rp = reduce(p);
  SolveOutcome out;
  if (!rp.consistent) {
    out.status = SolveStatus::Infeasible;
    out.certificate = rp.inconsistency;
    out.note = "equality constraints are inconsistent";
    return out;
  }
  const Vec ell = p.objective ? *p.objective : Vec(Vec::Zero(p.dim()));
  const Vec cu = rp.N.transpose() * ell;
  const lmi::MaxResult mr = lmi::maximize(rp.sys, cu, 0.1 * tol);
  switch (mr.status) {
    case lmi::MaxResult::Status::Optimal: {
      SolveOutcome o = finish(p, SolveStatus::Optimal, rp.z0 + rp.N * mr.u);
      o.value = ell.dot(o.point);
      o.polished = mr.polished;
      o.note = mr.note;
      return o;
    }
    case lmi::MaxResult::Status::Unbounded: {
      SolveOutcome o = finish(p, SolveStatus::UnboundedCertificate, rp.z0 + rp.N * mr.u);
      Vec dir = rp.N * mr.direction;
      dir /= dir.norm();
      o.certificate = dir;
      o.value = std::numeric_limits<double>::infinity();
      return o;
    }
    case lmi::MaxResult::Status::Infeasible:
      out.status = SolveStatus::Infeasible;
      out.note = mr.note;
      return out;
    case lmi::MaxResult::Status::Failed:
      break;
  }
  out.status = SolveStatus::IterationLimit;
  out.note = mr.note;
  return out;
}

SectionSearch max_norm_on_section(const AffinePsdProblem& p, double tol, int restarts, std::uint64_t seed,
                                  double witness_tol) {
  p.check();
  if (!p.ball_radius) throw Error(ErrorCode::InvalidArgument, "max_norm_on_section: ball radius required");
  const Vec e = rhs_of(p);
  if (e.size() && e.cwiseAbs().maxCoeff() > tol) throw Error(ErrorCode::InvalidArgument, "max_norm_on_section: constraints must be homogeneous");
  const double rho = *p.ball_radius;
  const int d = p.dim();
  const Mat E = rows_of(p);
  SectionSearch out;
  out.argmax = Vec::Zero(d);
  // 1. Witness supported on the free coordinates only.
  Mat sel = Mat::Zero(d - p.free_dim, d);
  sel.rightCols(d - p.free_dim) = Mat::Identity(d - p.free_dim, d - p.free_dim);
  Mat stacked(E.rows() + sel.rows(), d);
  stacked << E, sel;
  const SubspaceBasis free_ker = subspace::kernel(stacked);
  if (!free_ker.is_zero()) {
    out.argmax = rho * free_ker.basis.col(0);
    out.max_value = rho * rho;
    out.witness_found = true;
    out.lower_bound_only = false;
    out.method = "linear kernel";
    return out;
  }
  if (p.psd_blocks.empty() || d == p.free_dim) {
    out.proven_zero = true;
    out.lower_bound_only = false;
    out.method = "linear kernel";
    return out;
  }
  // 2. Any other nonzero element has a nonzero PSD part, normalized by its trace.
  AffinePsdProblem tr = p;
  tr.ball_radius.reset();
  tr.objective.reset();
  Vec trow = Vec::Zero(d);
  for (int t = 0; t < static_cast<int>(p.psd_blocks.size()); ++t)
    trow.segment(p.block_offset(t), svec_dim(p.psd_blocks[t])) = svec(SymMatrix::identity(p.psd_blocks[t]));
  tr.E = Mat(E.rows() + 1, d);
  tr.E << E, trow.transpose();
  tr.e = Vec::Zero(E.rows() + 1);
  tr.e(E.rows()) = 1.0;
  const ReducedProblem rp = reduce(tr);
  if (!rp.consistent) {
    out.proven_zero = true;
    out.lower_bound_only = false;
    out.method = "trace normalization (inconsistent)";
    return out;
  }
  const lmi::Region reg = lmi::find_region(rp.sys, Vec::Zero(rp.sys.p));
  if (reg.kind == lmi::Region::Kind::Feasible) {
    Vec z = rp.z0 + rp.N * reg.point();
    if (psd_residual(tr, z) <= 1e-7 && eq_residual(tr, z) <= 1e-7) {
      out.argmax = z * (rho / z.norm());
      out.max_value = rho * rho;
      out.witness_found = true;
      out.lower_bound_only = false;
      out.method = "trace-normalized feasibility";
      return out;
    }
  }
  if (reg.kind == lmi::Region::Kind::Infeasible && reg.certified) {
    out.proven_zero = true;
    out.lower_bound_only = false;
    out.method = "trace-normalized infeasibility certificate";
    return out;
  }
  // 3. Multi-start projected ascent; a lower bound only.
  out.method = "multi-start projected ascent";
  AffinePsdProblem sec = p;
  sec.objective.reset();
  for (int r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    Vec x = random_unit(rng, d) * rho;
    for (int it = 0; it < 40; ++it) {
      const DykstraResult dk = dykstra_project(sec, Vec(x * 2.0), tol, 400);
      x = dk.point;
      if (x.norm() < 1e-14) break;
      if (x.norm() >= rho * (1.0 - 1e-9)) break;
    }
    out.restarts_used = r + 1;
    if (eq_residual(sec, x) <= 1e-6 && psd_residual(sec, x) <= 1e-6 && x.squaredNorm() > out.max_value) {
      out.max_value = x.squaredNorm();
      out.argmax = x;
    }
    if (out.max_value >= witness_tol) break;
  }
  out.witness_found = out.max_value >= witness_tol;
  return out;
}

}  // namespace tiltcert
