#include "tiltcert/psdcone.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tiltcert {

std::vector<int> IndexPartition::kernel() const {
  std::vector<int> k = beta;
  k.insert(k.end(), gamma.begin(), gamma.end());
  return k;
}

Mat SpectralPair::cols(const std::vector<int>& idx) const {
  Mat out(n(), static_cast<Eigen::Index>(idx.size()));
  for (size_t i = 0; i < idx.size(); ++i) out.col(i) = frame.col(idx[i]);
  return out;
}

namespace {

Mat sub(const Mat& m, const std::vector<int>& r, const std::vector<int>& c) {
  Mat out(r.size(), c.size());
  for (size_t i = 0; i < r.size(); ++i)
    for (size_t j = 0; j < c.size(); ++j) out(i, j) = m(r[i], c[j]);
  return out;
}

double psd_violation(const Mat& block) {
  if (block.rows() == 0) return 0.0;
  return std::max(0.0, -min_eig(SymMatrix(block)));
}

double nsd_violation(const Mat& block) {
  if (block.rows() == 0) return 0.0;
  return std::max(0.0, max_eig(SymMatrix(block)));
}

}  // namespace

SpectralPair classify(const SymMatrix& X, const SymMatrix& S, const ConeTolerances& tol) {
  if (X.dim() != S.dim()) throw Error(ErrorCode::DimensionMismatch, "classify: order mismatch");
  const int n = X.dim();
  const double xs = X.max_abs(), ss = S.max_abs();
  const double inner = frob_inner(X, S);
  if (std::abs(inner) > tol.complementarity * (1.0 + X.norm() * S.norm())) {
    std::ostringstream os;
    os << "<X,S> = " << inner << " violates complementarity";
    throw Error(ErrorCode::NotComplementary, os.str());
  }
  SimultaneousDecomposition sd;
  try {
    sd = simultaneous_eigen(X, S, 1e-6);
  } catch (const Error& e) {
    throw Error(ErrorCode::NotComplementary, e.what());
  }
  const double xsnap = tol.snap * (1.0 + xs);
  const double ssnap = tol.snap * (1.0 + ss);
  Vec lx = sd.x_eigvals, ls = sd.s_eigvals;
  for (int i = 0; i < n; ++i) {
    if (lx(i) < -tol.sign * (1.0 + xs)) throw Error(ErrorCode::NotComplementary, "X is not PSD");
    if (ls(i) > tol.sign * (1.0 + ss)) throw Error(ErrorCode::NotComplementary, "S is not NSD");
    if (std::abs(lx(i)) <= xsnap) lx(i) = 0.0;
    if (std::abs(ls(i)) <= ssnap) ls(i) = 0.0;
    if (lx(i) != 0.0 && ls(i) != 0.0) {
      throw Error(ErrorCode::NotComplementary, "X and S share an eigenvector with nonzero values");
    }
  }
  // Order: α (X desc), then zero block of X with S non-increasing.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const bool pa = lx(a) > 0, pb = lx(b) > 0;
    if (pa != pb) return pa;
    if (pa) return lx(a) > lx(b);
    return ls(a) > ls(b);
  });
  SpectralPair out;
  out.X = X;
  out.S = S;
  out.frame.resize(n, n);
  out.x_eigvals.resize(n);
  out.s_eigvals.resize(n);
  for (int k = 0; k < n; ++k) {
    out.frame.col(k) = sd.frame.col(order[k]);
    out.x_eigvals(k) = lx(order[k]);
    out.s_eigvals(k) = ls(order[k]);
  }
  IndexPartition& part = out.partition;
  for (int k = 0; k < n; ++k) {
    if (out.x_eigvals(k) > 0) part.alpha.push_back(k);
    else if (out.s_eigvals(k) < 0) part.gamma.push_back(k);
    else part.beta.push_back(k);
  }
  const double gx = group_tolerance(out.x_eigvals);
  for (int k : part.alpha) {
    if (part.alpha_blocks.empty() ||
        std::abs(out.x_eigvals(part.alpha_blocks.back().back()) - out.x_eigvals(k)) > gx) {
      part.alpha_blocks.push_back({});
      part.mu.push_back(out.x_eigvals(k));
    }
    part.alpha_blocks.back().push_back(k);
  }
  part.mu.push_back(0.0);
  const double gs = group_tolerance(out.s_eigvals);
  part.nu.push_back(0.0);
  for (int k : part.gamma) {
    if (part.gamma_blocks.empty() ||
        std::abs(out.s_eigvals(part.gamma_blocks.back().back()) - out.s_eigvals(k)) > gs) {
      part.gamma_blocks.push_back({});
      part.nu.push_back(out.s_eigvals(k));
    }
    part.gamma_blocks.back().push_back(k);
  }
  return out;
}

SpectralPair classify_point(const SymMatrix& X, const ConeTolerances& tol) {
  return classify(X, SymMatrix::zero(X.dim()), tol);
}

double cone_residual(ConeKind kind, const SpectralPair& pair, const SymMatrix& W) {
  if (W.dim() != pair.n()) throw Error(ErrorCode::DimensionMismatch, "cone_residual: order mismatch");
  const Mat Wt = pair.frame.transpose() * W.mat() * pair.frame;
  const IndexPartition& p = pair.partition;
  const std::vector<int> K = p.kernel();
  std::vector<int> all(pair.n());
  for (int i = 0; i < pair.n(); ++i) all[i] = i;
  switch (kind) {
    case ConeKind::Tangent:
      return psd_violation(sub(Wt, K, K));
    case ConeKind::Normal:
      return nsd_violation(sub(Wt, K, K)) + sub(Wt, p.alpha, all).norm();
    case ConeKind::Critical:
      return psd_violation(sub(Wt, p.beta, p.beta)) + sub(Wt, K, p.gamma).norm();
  }
  return 0.0;
}

double second_tangent_support_eigen_form(const SpectralPair& pair, const SymMatrix& W) {
  const Mat Wt = pair.frame.transpose() * W.mat() * pair.frame;
  const IndexPartition& p = pair.partition;
  double s = 0.0;
  for (int i : p.alpha)
    for (int j : p.gamma) s += pair.s_eigvals(j) / pair.x_eigvals(i) * Wt(i, j) * Wt(i, j);
  return 2.0 * s;
}

double second_tangent_support(const SpectralPair& pair, const SymMatrix& W, double critical_tol) {
  const double res = cone_residual(ConeKind::Critical, pair, W);
  if (res > critical_tol * (1.0 + W.norm())) {
    std::ostringstream os;
    os << "direction is not critical, residual " << res;
    throw Error(ErrorCode::NotCritical, os.str());
  }
  if (pair.partition.alpha.empty()) return 0.0;
  const SymMatrix Xd = pseudo_inverse(pair.X);
  const double closed = 2.0 * frob_inner(pair.S, W.mat() * Xd.mat() * W.mat());
  const double eig = second_tangent_support_eigen_form(pair, W);
  if (std::abs(closed - eig) > 1e-8 * (1.0 + std::abs(closed))) {
    std::ostringstream os;
    os << "support forms disagree: " << closed << " vs " << eig;
    throw Error(ErrorCode::NumericalFailure, os.str());
  }
  return closed;
}

namespace {

void require_psd(const SymMatrix& X) {
  if (min_eig(X) < -1e-9 * (1.0 + X.max_abs())) {
    throw Error(ErrorCode::NotPsd, "matrix is not positive semidefinite");
  }
}

// Orthonormal svec images of P E P' over symmetric unit pairs (i,j) selected by keep.
template <class Keep>
SubspaceBasis frame_pairs(const Mat& P, Keep keep) {
  const int n = static_cast<int>(P.rows());
  std::vector<Vec> cols;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) {
      if (!keep(i, j)) continue;
      Mat E = Mat::Zero(n, n);
      if (i == j) E(i, i) = 1.0;
      else E(i, j) = E(j, i) = 1.0 / std::sqrt(2.0);
      cols.push_back(svec(SymMatrix(Mat(P * E * P.transpose()))));
    }
  Mat B(svec_dim(n), static_cast<Eigen::Index>(cols.size()));
  for (size_t k = 0; k < cols.size(); ++k) B.col(k) = cols[k];
  return {svec_dim(n), B};
}

}  // namespace

SubspaceBasis span_normal_basis(const SymMatrix& X) {
  require_psd(X);
  const SpectralPair pr = classify_point(X);
  const int na = static_cast<int>(pr.partition.alpha.size());
  return frame_pairs(pr.frame, [&](int i, int j) { return i >= na && j >= na; });
}

SubspaceBasis lin_tangent_basis(const SymMatrix& X) {
  require_psd(X);
  const SpectralPair pr = classify_point(X);
  const int na = static_cast<int>(pr.partition.alpha.size());
  return frame_pairs(pr.frame, [&](int i, int j) { return i < na || j < na; });
}

SubspaceBasis annihilator_basis(const Mat& U, int n) {
  // Complete U to an orthonormal frame [V U]; {W : WU = 0} = V S V'.
  const SubspaceBasis Ub = subspace::span(U, n);
  const SubspaceBasis Vb = subspace::complement(Ub);
  const int nv = Vb.dim();
  Mat P(n, n);
  P << Vb.basis, Ub.basis;
  return frame_pairs(P, [&](int i, int j) { return i < nv && j < nv; });
}

}  // namespace tiltcert
