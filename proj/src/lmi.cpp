#include "tiltcert/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tiltcert::lmi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double smallest_eig(const Mat& M) {
  if (M.rows() == 0) return kInf;
  Eigen::SelfAdjointEigenSolver<Mat> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

Vec svec_of(const Mat& M) { return svec(SymMatrix(M)); }

}  // namespace

Mat System::partial(int b, const Vec& u, int i) const {
  const Block& B = blocks[b];
  Mat out = B.F[i];
  if (B.quadratic())
    for (int j = 0; j < p; ++j)
      if (u(j) != 0.0) out += u(j) * B.H[i * p + j];
  return out;
}

Mat System::eval(int b, const Vec& u) const {
  const Block& B = blocks[b];
  Mat out = B.F0;
  for (int i = 0; i < p; ++i)
    if (u(i) != 0.0) out += u(i) * B.F[i];
  if (B.quadratic())
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        if (u(i) != 0.0 && u(j) != 0.0) out += 0.5 * u(i) * u(j) * B.H[i * p + j];
  return 0.5 * (out + out.transpose());
}

double System::min_eig(const Vec& u) const {
  double m = kInf;
  for (int b = 0; b < static_cast<int>(blocks.size()); ++b) m = std::min(m, smallest_eig(eval(b, u)));
  return m;
}

double System::scale() const {
  double s = 0.0;
  for (const Block& B : blocks) {
    if (B.F0.size()) s = std::max(s, B.F0.cwiseAbs().maxCoeff());
    for (const Mat& F : B.F)
      if (F.size()) s = std::max(s, F.cwiseAbs().maxCoeff());
  }
  return 1.0 + s;
}

int System::barrier_parameter() const {
  int nu = 0;
  for (const Block& B : blocks) nu += B.order();
  return nu;
}

bool System::has_quadratic() const {
  for (const Block& B : blocks)
    if (B.quadratic()) return true;
  return false;
}

System System::substitute(const Vec& u0, const Mat& N) const {
  System out;
  out.p = static_cast<int>(N.cols());
  for (int b = 0; b < static_cast<int>(blocks.size()); ++b) {
    const Block& B = blocks[b];
    Block nb;
    nb.F0 = eval(b, u0);
    std::vector<Mat> dF(p);
    for (int i = 0; i < p; ++i) dF[i] = partial(b, u0, i);
    nb.F.assign(out.p, Mat::Zero(B.order(), B.order()));
    for (int j = 0; j < out.p; ++j)
      for (int i = 0; i < p; ++i)
        if (N(i, j) != 0.0) nb.F[j] += N(i, j) * dF[i];
    if (B.quadratic()) {
      nb.H.assign(out.p * out.p, Mat::Zero(B.order(), B.order()));
      // H' = Nᵀ H N blockwise: first contract the right index, then the left.
      std::vector<Mat> HN(p * out.p, Mat::Zero(B.order(), B.order()));
      for (int i = 0; i < p; ++i)
        for (int k = 0; k < out.p; ++k)
          for (int l = 0; l < p; ++l)
            if (N(l, k) != 0.0) HN[i * out.p + k] += N(l, k) * B.H[i * p + l];
      for (int j = 0; j < out.p; ++j)
        for (int k = 0; k < out.p; ++k)
          for (int i = 0; i < p; ++i)
            if (N(i, j) != 0.0) nb.H[j * out.p + k] += N(i, j) * HN[i * out.p + k];
    }
    out.blocks.push_back(std::move(nb));
  }
  return out;
}

System System::compress(const std::vector<Mat>& V) const {
  System out;
  out.p = p;
  for (int b = 0; b < static_cast<int>(blocks.size()); ++b) {
    const Block& B = blocks[b];
    if (b >= static_cast<int>(V.size()) || V[b].rows() == 0) {
      out.blocks.push_back(B);
      continue;
    }
    const Mat& Vb = V[b];
    if (Vb.cols() == 0) continue;
    Block nb;
    auto c = [&](const Mat& M) { return Mat(Vb.transpose() * M * Vb); };
    nb.F0 = c(B.F0);
    for (const Mat& F : B.F) nb.F.push_back(c(F));
    for (const Mat& H : B.H) nb.H.push_back(c(H));
    out.blocks.push_back(std::move(nb));
  }
  return out;
}

Block ball_block(const Vec& center, double radius) {
  const int p = static_cast<int>(center.size());
  Block b;
  b.F0 = Mat::Constant(1, 1, radius * radius - center.squaredNorm());
  for (int i = 0; i < p; ++i) b.F.push_back(Mat::Constant(1, 1, 2.0 * center(i)));
  b.H.assign(p * p, Mat::Zero(1, 1));
  for (int i = 0; i < p; ++i) b.H[i * p + i](0, 0) = -2.0;
  return b;
}

// ---------------------------------------------------------------------------
// Barrier path following

namespace {

struct BarrierEval {
  bool ok = false;
  double f = 0.0;
  Vec g;
  Mat H;
};

BarrierEval barrier_eval(const System& sys, const Vec& c, double tau, const Vec& x, bool derivs) {
  BarrierEval e;
  const int p = sys.p;
  e.f = -tau * c.dot(x);
  if (derivs) {
    e.g = -tau * c;
    e.H = Mat::Zero(p, p);
  }
  for (int b = 0; b < static_cast<int>(sys.blocks.size()); ++b) {
    const Mat M = sys.eval(b, x);
    Eigen::LLT<Mat> llt(M);
    if (llt.info() != Eigen::Success) return e;
    const Mat L = llt.matrixL();
    double logdet = 0.0;
    for (int i = 0; i < L.rows(); ++i) {
      if (!(L(i, i) > 0.0) || !std::isfinite(L(i, i))) return e;
      logdet += 2.0 * std::log(L(i, i));
    }
    e.f -= logdet;
    if (!derivs) continue;
    const int k = static_cast<int>(M.rows());
    const Mat Linv = L.triangularView<Eigen::Lower>().solve(Mat::Identity(k, k));
    std::vector<Mat> A(p);
    for (int i = 0; i < p; ++i) {
      A[i] = Linv * sys.partial(b, x, i) * Linv.transpose();
      e.g(i) -= A[i].trace();
    }
    for (int i = 0; i < p; ++i)
      for (int j = 0; j <= i; ++j) {
        const double v = (A[i].array() * A[j].array()).sum();
        e.H(i, j) += v;
        if (i != j) e.H(j, i) += v;
      }
    if (sys.blocks[b].quadratic()) {
      const Mat Minv = Linv.transpose() * Linv;
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) e.H(i, j) -= (Minv.array() * sys.blocks[b].H[i * p + j].array()).sum();
    }
  }
  e.ok = std::isfinite(e.f);
  return e;
}

}  // namespace

BarrierResult barrier_maximize(const System& sys, const Vec& c, const Vec& x0, const BarrierOptions& opt) {
  BarrierResult r;
  r.x = x0;
  r.value = c.dot(x0);
  const double nu = std::max(1, sys.barrier_parameter());
  if (!barrier_eval(sys, c, 0.0, x0, false).ok) return r;
  Vec x = x0;
  double tau = opt.tau0;
  while (true) {
    for (int it = 0; it < opt.max_newton; ++it) {
      BarrierEval e = barrier_eval(sys, c, tau, x, true);
      if (!e.ok) break;
      const double reg = 1e-14 * (1.0 + e.H.diagonal().cwiseAbs().maxCoeff());
      e.H.diagonal().array() += reg;
      const Vec dx = -e.H.ldlt().solve(e.g);
      const double slope = e.g.dot(dx);
      if (!std::isfinite(slope) || -slope <= 2e-12) break;
      double t = 1.0;
      bool accepted = false;
      Vec xn;
      while (t > 1e-14) {
        xn = x + t * dx;
        const BarrierEval en = barrier_eval(sys, c, tau, xn, false);
        if (en.ok && en.f <= e.f + 0.25 * t * slope) {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) break;
      x = xn;
      ++r.newton_steps;
      if (opt.stop && opt.stop(x)) {
        r.x = x;
        r.value = c.dot(x);
        r.tau = tau;
        r.gap = nu / tau;
        r.stopped = true;
        return r;
      }
    }
    if (nu / tau <= opt.gap_tol) {
      r.converged = true;
      break;
    }
    if (tau >= opt.tau_max) break;
    tau *= opt.tau_growth;
  }
  r.x = x;
  r.value = c.dot(x);
  r.tau = tau;
  r.gap = nu / tau;
  return r;
}

bool solve_affine(const Mat& C, const Vec& d, Vec& u0, Mat& N, double rel_tol, double ref_scale) {
  const int p = static_cast<int>(C.cols());
  if (C.rows() == 0 || p == 0) {
    u0 = Vec::Zero(p);
    N = Mat::Identity(p, p);
    return C.rows() == 0 || d.norm() <= 1e-8 * (1.0 + ref_scale);
  }
  Eigen::JacobiSVD<Mat> svd(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  const double cut = rel_tol * std::max(sv.size() ? sv(0) : 0.0, ref_scale);
  int rank = 0;
  while (rank < sv.size() && sv(rank) > cut) ++rank;
  const Mat& Uu = svd.matrixU();
  const Mat& V = svd.matrixV();
  u0 = V.leftCols(rank) * (sv.head(rank).cwiseInverse().asDiagonal() * (Uu.leftCols(rank).transpose() * d));
  const double res = (C * u0 - d).norm();
  if (!(res <= 1e-8 * (1.0 + d.norm() + C.norm() * u0.norm()))) return false;
  N = V.rightCols(p - rank);
  return true;
}

// ---------------------------------------------------------------------------
// Phase 1 and facial reduction

namespace {

// Adds a trailing variable s entering every block as −sI.
System with_margin_variable(const System& sys) {
  System out;
  out.p = sys.p + 1;
  const int p = sys.p;
  for (const Block& B : sys.blocks) {
    Block nb;
    nb.F0 = B.F0;
    nb.F = B.F;
    nb.F.push_back(-Mat::Identity(B.order(), B.order()));
    if (B.quadratic()) {
      nb.H.assign(out.p * out.p, Mat::Zero(B.order(), B.order()));
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) nb.H[i * out.p + j] = B.H[i * p + j];
    }
    out.blocks.push_back(std::move(nb));
  }
  return out;
}

Block lift(const Block& B, int p_old, int p_new) {
  Block nb;
  nb.F0 = B.F0;
  nb.F = B.F;
  while (static_cast<int>(nb.F.size()) < p_new) nb.F.push_back(Mat::Zero(B.order(), B.order()));
  if (B.quadratic()) {
    nb.H.assign(p_new * p_new, Mat::Zero(B.order(), B.order()));
    for (int i = 0; i < p_old; ++i)
      for (int j = 0; j < p_old; ++j) nb.H[i * p_new + j] = B.H[i * p_old + j];
  }
  return nb;
}

struct Phase1 {
  BarrierResult br;
  Vec u;
  double s = 0.0;
  double upper = 0.0;  // s + duality gap
  bool ball_active = false;
};

Phase1 run_phase1(const System& sys, const Vec& hint, double radius, double stop_margin) {
  Phase1 out;
  System aug = with_margin_variable(sys);
  Block ball = ball_block(hint, radius);
  aug.add_block(lift(ball, sys.p, aug.p));
  Vec x0(aug.p);
  x0 << hint, sys.min_eig(hint) - 1.0;
  Vec c = Vec::Zero(aug.p);
  c(sys.p) = 1.0;
  BarrierOptions opt;
  opt.gap_tol = 1e-11 * sys.scale();
  if (std::isfinite(stop_margin)) opt.stop = [&](const Vec& x) { return x(sys.p) > stop_margin; };
  out.br = barrier_maximize(aug, c, x0, opt);
  out.u = out.br.x.head(sys.p);
  out.s = out.br.x(sys.p);
  out.upper = out.s + out.br.gap;
  out.ball_active = (out.u - hint).norm() >= 0.99 * radius;
  return out;
}

// Range of a PSD matrix above rel·max eigenvalue.
Mat psd_range(const Mat& Y, double rel) {
  if (Y.rows() == 0) return Mat(0, 0);
  Eigen::SelfAdjointEigenSolver<Mat> es(Y);
  const double mx = es.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<int> keep;
  for (int i = 0; i < Y.rows(); ++i)
    if (es.eigenvalues()(i) > rel * mx) keep.push_back(i);
  Mat out(Y.rows(), static_cast<int>(keep.size()));
  for (size_t k = 0; k < keep.size(); ++k) out.col(k) = es.eigenvectors().col(keep[k]);
  return out;
}

// Given candidate subspaces U_b and weights Y_b, look for an exposing matrix
// W = ⊕ U_b Y_b U_bᵀ ⪰ 0 with ⟨W, F_bi⟩ summing to zero for i = 0..p.
bool certify_exposing(const System& sys, std::vector<Mat>& U, const std::vector<Mat>& Y0) {
  const int nb = static_cast<int>(sys.blocks.size());
  std::vector<int> off(nb + 1, 0);
  for (int b = 0; b < nb; ++b) off[b + 1] = off[b] + (U[b].cols() > 0 ? svec_dim(static_cast<int>(U[b].cols())) : 0);
  const int dim = off[nb];
  if (dim == 0) return false;
  Mat L(sys.p + 1, dim);
  L.setZero();
  Vec y(dim);
  for (int b = 0; b < nb; ++b) {
    if (U[b].cols() == 0) continue;
    const int r = static_cast<int>(U[b].cols());
    const int sd = svec_dim(r);
    y.segment(off[b], sd) = svec_of(Y0[b]);
    for (int i = 0; i < sys.p; ++i)
      L.row(i).segment(off[b], sd) = svec_of(U[b].transpose() * sys.blocks[b].F[i] * U[b]).transpose();
    L.row(sys.p).segment(off[b], sd) = svec_of(U[b].transpose() * sys.blocks[b].F0 * U[b]).transpose();
  }
  // Normalize rows so the projection is scale free.
  for (int i = 0; i < L.rows(); ++i) {
    const double nr = L.row(i).norm();
    if (nr > 0) L.row(i) /= nr;
  }
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(L);
  cod.setThreshold(1e-10);
  const Vec yp = y - cod.solve(L * y);
  if (yp.norm() < 0.5 * y.norm()) return false;
  double ymax = 0.0;
  std::vector<Mat> Yp(nb);
  for (int b = 0; b < nb; ++b) {
    if (U[b].cols() == 0) continue;
    Yp[b] = smat(yp.segment(off[b], svec_dim(static_cast<int>(U[b].cols())))).mat();
    ymax = std::max(ymax, Yp[b].cwiseAbs().maxCoeff());
  }
  bool any = false;
  for (int b = 0; b < nb; ++b) {
    if (U[b].cols() == 0) continue;
    if (smallest_eig(Yp[b]) < -1e-9 * ymax) return false;
  }
  for (int b = 0; b < nb; ++b) {
    if (U[b].cols() == 0) continue;
    const double mx = Yp[b].cwiseAbs().maxCoeff();
    if (mx <= 1e-9 * ymax) {
      U[b] = Mat(U[b].rows(), 0);
      continue;
    }
    const Mat R = psd_range(Yp[b], 1e-9 * ymax / mx);
    U[b] = U[b] * R;
    any = any || R.cols() > 0;
  }
  return any;
}

// Attempts one facial reduction step at a phase-1 iterate; fills U with the
// exposed kernel directions per block.
bool exposing_directions(const System& sys, const Phase1& ph, std::vector<Mat>& U) {
  const int nb = static_cast<int>(sys.blocks.size());
  U.assign(nb, Mat());
  struct Dir {
    double w;
    int b;
    Vec v;
  };
  std::vector<Dir> dirs;
  std::vector<Mat> W(nb);
  std::vector<Mat> Mt(nb);
  for (int b = 0; b < nb; ++b) {
    const int k = sys.blocks[b].order();
    U[b] = Mat(k, 0);
    if (sys.blocks[b].quadratic()) continue;
    Mt[b] = sys.eval(b, ph.u) - ph.s * Mat::Identity(k, k);
    W[b] = Mt[b].inverse();
    W[b] = 0.5 * (W[b] + W[b].transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(W[b]);
    for (int i = 0; i < k; ++i) dirs.push_back({es.eigenvalues()(i), b, es.eigenvectors().col(i)});
  }
  if (dirs.empty()) return false;
  std::sort(dirs.begin(), dirs.end(), [](const Dir& a, const Dir& b) { return a.w > b.w; });
  // Try cuts at the largest spectral gaps first.
  std::vector<std::pair<double, int>> cuts;
  for (size_t k = 0; k + 1 < dirs.size(); ++k) {
    const double lo = std::max(dirs[k + 1].w, 1e-300);
    cuts.push_back({dirs[k].w / lo, static_cast<int>(k)});
  }
  std::sort(cuts.begin(), cuts.end(), std::greater<>());
  std::vector<int> tries;
  for (size_t i = 0; i < cuts.size() && i < 3; ++i)
    if (cuts[i].first >= 10.0) tries.push_back(cuts[i].second);
  tries.push_back(static_cast<int>(dirs.size()) - 1);
  for (int cut : tries) {
    std::vector<std::vector<Vec>> cols(nb);
    for (int k = 0; k <= cut; ++k) cols[dirs[k].b].push_back(dirs[k].v);
    std::vector<Mat> Uc(nb), Y(nb);
    for (int b = 0; b < nb; ++b) {
      const int k = sys.blocks[b].order();
      Uc[b] = Mat(k, static_cast<int>(cols[b].size()));
      for (size_t j = 0; j < cols[b].size(); ++j) Uc[b].col(j) = cols[b][j];
      Y[b] = cols[b].empty() ? Mat(0, 0) : Mat(Uc[b].transpose() * W[b] * Uc[b]);
    }
    if (certify_exposing(sys, Uc, Y)) {
      U = Uc;
      return true;
    }
    // Same subspace with uniform weights.
    for (int b = 0; b < nb; ++b) {
      Uc[b] = Mat(sys.blocks[b].order(), static_cast<int>(cols[b].size()));
      for (size_t j = 0; j < cols[b].size(); ++j) Uc[b].col(j) = cols[b][j];
      Y[b] = Mat::Identity(Uc[b].cols(), Uc[b].cols());
    }
    if (certify_exposing(sys, Uc, Y)) {
      U = Uc;
      return true;
    }
  }
  return false;
}

// Imposes M_b(u)U_b = 0 and restricts the blocks to U_b^⊥.
bool reduce_by(const System& sys, const std::vector<Mat>& U, Vec& u0, Mat& N, System& out) {
  std::vector<Vec> rows_F;
  int rows = 0;
  for (int b = 0; b < static_cast<int>(sys.blocks.size()); ++b) rows += sys.blocks[b].order() * static_cast<int>(U[b].cols());
  Mat C(rows, sys.p);
  Vec d(rows);
  int r = 0;
  for (int b = 0; b < static_cast<int>(sys.blocks.size()); ++b) {
    if (U[b].cols() == 0) continue;
    const int len = sys.blocks[b].order() * static_cast<int>(U[b].cols());
    const Mat m0 = sys.blocks[b].F0 * U[b];
    d.segment(r, len) = -Eigen::Map<const Vec>(m0.data(), len);
    for (int i = 0; i < sys.p; ++i) {
      const Mat mi = sys.blocks[b].F[i] * U[b];
      C.col(i).segment(r, len) = Eigen::Map<const Vec>(mi.data(), len);
    }
    r += len;
  }
  if (!solve_affine(C, d, u0, N, 1e-10, sys.scale())) return false;
  std::vector<Mat> V(sys.blocks.size());
  for (int b = 0; b < static_cast<int>(sys.blocks.size()); ++b) {
    if (U[b].cols() == 0) continue;
    V[b] = subspace::complement(subspace::span(U[b], sys.blocks[b].order())).basis;
  }
  out = sys.substitute(u0, N).compress(V);
  return true;
}

}  // namespace

double max_min_eig(const System& sys, const Vec& hint, double radius, Vec* argmax) {
  if (sys.blocks.empty()) return kInf;
  if (sys.p == 0) {
    if (argmax) *argmax = Vec(0);
    return sys.min_eig(Vec(0));
  }
  const Phase1 ph = run_phase1(sys, hint, radius, kInf);
  if (argmax) *argmax = ph.u;
  return ph.s;
}

Region find_region(const System& sys, const Vec& hint) {
  Region reg;
  reg.u0 = Vec::Zero(sys.p);
  reg.N = Mat::Identity(sys.p, sys.p);
  System cur = sys;
  Vec t_hint = hint.size() == sys.p ? hint : Vec(Vec::Zero(sys.p));
  const double scale = sys.scale();
  const double delta = 1e-8 * scale;
  const int max_rounds = sys.barrier_parameter() + 2;
  for (int round = 0; round <= max_rounds; ++round) {
    reg.reduced = cur;
    if (cur.blocks.empty()) {
      reg.kind = Region::Kind::Feasible;
      reg.t_interior = t_hint;
      reg.margin = kInf;
      return reg;
    }
    if (cur.p == 0) {
      const double m = cur.min_eig(Vec(0));
      reg.t_interior = Vec(0);
      reg.margin = m;
      if (m >= -1e-9 * scale) {
        reg.kind = Region::Kind::Feasible;
      } else {
        reg.kind = Region::Kind::Infeasible;
        reg.certified = true;
        reg.note = "the affine set is a single point outside the cone";
      }
      return reg;
    }
    double radius = 1e4 * (1.0 + t_hint.norm());
    Phase1 ph;
    std::vector<Mat> U;
    bool exposed = false;
    for (int grow = 0; grow < 4; ++grow) {
      ph = run_phase1(cur, t_hint, radius, 1e3 * delta);
      if (ph.s > delta || !ph.ball_active) break;
      // Weakly infeasible or asymptotically thin sets expose a face before the radius blows up.
      if ((exposed = exposing_directions(cur, ph, U))) break;
      radius *= 1e3;
    }
    reg.margin = ph.s;
    if (ph.s > delta) {
      reg.kind = Region::Kind::Feasible;
      reg.t_interior = ph.u;
      return reg;
    }
    if (ph.upper < -delta && !exposed) {
      if (ph.ball_active) {
        reg.kind = Region::Kind::Infeasible;
        reg.note = "no feasible point within the search radius";
        return reg;
      }
      if (!cur.has_quadratic()) {
        // Farkas: W ⪰ 0, ⟨W,F_i⟩ = 0, ⟨W,F_0⟩ < 0.
        std::vector<Mat> U(cur.blocks.size()), Y(cur.blocks.size());
        for (size_t b = 0; b < cur.blocks.size(); ++b) {
          const int k = cur.blocks[b].order();
          const Mat Mt = cur.eval(static_cast<int>(b), ph.u) - ph.s * Mat::Identity(k, k);
          U[b] = Mat::Identity(k, k);
          Y[b] = Mt.inverse() / ph.br.tau;
        }
        // Project Y onto {⟨W,F_i⟩ = 0} (not F_0), then test the sign.
        int dim = 0;
        for (auto& y : Y) dim += svec_dim(static_cast<int>(y.rows()));
        Mat L(cur.p, dim);
        Vec yv(dim), f0(dim);
        int o = 0;
        for (size_t b = 0; b < cur.blocks.size(); ++b) {
          const int sd = svec_dim(cur.blocks[b].order());
          yv.segment(o, sd) = svec_of(Y[b]);
          f0.segment(o, sd) = svec_of(cur.blocks[b].F0);
          for (int i = 0; i < cur.p; ++i) L.row(i).segment(o, sd) = svec_of(cur.blocks[b].F[i]).transpose();
          o += sd;
        }
        Eigen::CompleteOrthogonalDecomposition<Mat> cod(L);
        const Vec yp = yv - cod.solve(L * yv);
        o = 0;
        bool psd = true;
        std::vector<Mat> cert;
        for (size_t b = 0; b < cur.blocks.size(); ++b) {
          const int sd = svec_dim(cur.blocks[b].order());
          cert.push_back(smat(yp.segment(o, sd)).mat());
          psd = psd && smallest_eig(cert.back()) >= -1e-10 * yp.cwiseAbs().maxCoeff();
          o += sd;
        }
        if (psd && yp.dot(f0) < 0.0) {
          reg.certified = true;
          if (reg.reductions == 0) reg.certificate = cert;
        }
      }
      if (reg.certified) {
        reg.kind = Region::Kind::Infeasible;
        reg.note = "dual certificate verified";
        return reg;
      }
    }
    // |s*| ≈ 0, or a negative optimum without a strong certificate (weak infeasibility):
    // look for a face exposed by the phase-1 dual.
    if (!exposed && !exposing_directions(cur, ph, U)) {
      if (ph.upper < -delta) {
        reg.kind = Region::Kind::Infeasible;
        reg.note = "phase-1 optimum is negative";
        return reg;
      }
      if (ph.s > 0.0) {
        reg.kind = Region::Kind::Feasible;
        reg.t_interior = ph.u;
        reg.note = "thin interior";
      } else {
        reg.kind = Region::Kind::Undecided;
        reg.note = "degenerate phase-1 optimum without an exposing face";
      }
      return reg;
    }
    Vec v0;
    Mat Nn;
    System next;
    if (!reduce_by(cur, U, v0, Nn, next)) {
      reg.kind = Region::Kind::Infeasible;
      reg.certified = true;
      reg.note = "exposed face is empty";
      return reg;
    }
    reg.u0 = reg.u0 + reg.N * v0;
    reg.N = reg.N * Nn;
    t_hint = Nn.transpose() * (t_hint - v0);
    cur = next;
    ++reg.reductions;
  }
  reg.kind = Region::Kind::Undecided;
  reg.note = "facial reduction did not terminate";
  return reg;
}

// ---------------------------------------------------------------------------
// Linear maximization

namespace {

// Kernel directions of blocks at an approximate optimum, used to polish onto the optimal face.
std::vector<Mat> active_kernels(const System& sys, const Vec& x, bool& any) {
  any = false;
  std::vector<Mat> U(sys.blocks.size());
  const double sc = sys.scale();
  for (int b = 0; b < static_cast<int>(sys.blocks.size()); ++b) {
    const int k = sys.blocks[b].order();
    U[b] = Mat(k, 0);
    if (sys.blocks[b].quadratic()) continue;
    Eigen::SelfAdjointEigenSolver<Mat> es(sys.eval(b, x));
    const Vec& ev = es.eigenvalues();
    int j = -1;
    for (int i = 0; i < k; ++i) {
      if (ev(i) > 1e-5 * sc) break;
      const double next = i + 1 < k ? ev(i + 1) : kInf;
      if (next >= 1e3 * std::max(ev(i), 1e-300)) j = i;
    }
    if (j >= 0) {
      U[b] = es.eigenvectors().leftCols(j + 1);
      any = true;
    }
  }
  return U;
}

MaxResult maximize_impl(const System& sys, const Vec& c, double tol, bool check_recession, int depth) {
  MaxResult out;
  const Region reg = find_region(sys, Vec::Zero(sys.p));
  if (reg.kind == Region::Kind::Infeasible) {
    out.status = MaxResult::Status::Infeasible;
    out.note = reg.note;
    return out;
  }
  if (reg.kind == Region::Kind::Undecided) {
    out.status = MaxResult::Status::Failed;
    out.note = reg.note;
    return out;
  }
  const System& red = reg.reduced;
  const Vec ct = reg.N.transpose() * c;
  const double c0 = c.dot(reg.u0);
  const double cn = ct.norm();
  if (red.p == 0 || cn <= 1e-14 * (1.0 + c.norm())) {
    out.status = MaxResult::Status::Optimal;
    out.u = reg.point();
    out.value = c.dot(out.u);
    return out;
  }
  if (red.blocks.empty()) {
    out.status = MaxResult::Status::Unbounded;
    out.direction = reg.N * ct / cn;
    out.u = reg.point();
    out.value = c.dot(out.u);
    return out;
  }
  if (check_recession && !red.has_quadratic()) {
    System rec = red;
    for (Block& B : rec.blocks) B.F0.setZero();
    rec.add_block(ball_block(Vec::Zero(rec.p), 1.0));
    const MaxResult rr = maximize_impl(rec, ct / cn, 1e-11, false, 2);
    if (rr.status == MaxResult::Status::Optimal && rr.value > 1e-7) {
      System lin = red;
      for (Block& B : lin.blocks) B.F0.setZero();
      const double me = lin.min_eig(rr.u);
      if (me >= -1e-8 * rr.u.norm() * lin.scale()) {
        out.status = MaxResult::Status::Unbounded;
        out.direction = reg.N * rr.u;
        out.direction /= out.direction.norm();
        out.u = reg.point();
        out.value = c.dot(out.u);
        return out;
      }
    }
  }
  const Vec t0 = reg.t_interior;
  const double radius = 1e6 * (1.0 + t0.norm());
  System boxed = red;
  boxed.add_block(ball_block(t0, radius));
  BarrierOptions opt;
  opt.gap_tol = tol * (1.0 + std::abs(c0) + cn * (1.0 + t0.norm()));
  const BarrierResult br = barrier_maximize(boxed, ct, t0, opt);
  if ((br.x - t0).norm() >= 0.9 * radius) {
    out.status = MaxResult::Status::Failed;
    out.note = "supremum not attained within the search radius";
    return out;
  }
  out.status = MaxResult::Status::Optimal;
  out.u = reg.u0 + reg.N * br.x;
  out.value = c0 + ct.dot(br.x);
  out.gap = br.gap;
  if (!br.converged) out.note = "barrier stopped before the target gap";
  if (depth >= 2 || red.has_quadratic()) return out;
  bool any = false;
  const std::vector<Mat> U = active_kernels(red, br.x, any);
  if (!any) return out;
  Vec v0;
  Mat Nn;
  System face;
  if (!reduce_by(red, U, v0, Nn, face)) return out;
  const MaxResult sub = maximize_impl(face, Nn.transpose() * ct, tol, false, depth + 1);
  if (sub.status != MaxResult::Status::Optimal) return out;
  const Vec t_sub = v0 + Nn * sub.u;
  const double v_sub = c0 + ct.dot(t_sub);
  if (v_sub >= out.value - std::max(100.0 * br.gap, 1e-9 * (1.0 + std::abs(out.value)))) {
    out.u = reg.u0 + reg.N * t_sub;
    out.value = v_sub;
    out.gap = sub.gap;
    out.polished = true;
  }
  return out;
}

}  // namespace

MaxResult maximize(const System& sys, const Vec& c, double tol, bool check_recession) {
  return maximize_impl(sys, c, tol, check_recession, 0);
}

}  // namespace tiltcert::lmi
