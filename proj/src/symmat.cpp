#include "tiltcert/symmat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace tiltcert {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::NonCommuting: return "NonCommuting";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotComplementary: return "NotComplementary";
    case ErrorCode::NotCritical: return "NotCritical";
    case ErrorCode::NotPsd: return "NotPsd";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnsupportedFeature: return "UnsupportedFeature";
    case ErrorCode::InfeasiblePoint: return "InfeasiblePoint";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NotStationary: return "NotStationary";
    case ErrorCode::HessianNotPsd: return "HessianNotPsd";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

SymMatrix::SymMatrix(const Mat& m) : m_(m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "symmetric matrix must be square");
  }
  const Eigen::Index n = m.rows();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j + 1; i < n; ++i) m_(i, j) = m_(j, i);
}

SymMatrix SymMatrix::diag(const Vec& d) { return SymMatrix(Mat(d.asDiagonal())); }

SymMatrix SymMatrix::diag(std::initializer_list<double> d) {
  Vec v(static_cast<Eigen::Index>(d.size()));
  int i = 0;
  for (double x : d) v(i++) = x;
  return diag(v);
}

SymMatrix congruence(const Mat& R, const SymMatrix& M) {
  return SymMatrix(Mat(R.transpose() * M.mat() * R));
}

double frob_inner(const Mat& a, const Mat& b) { return (a.array() * b.array()).sum(); }

SpectralDecomposition sym_eigen(const SymMatrix& M, double tol) {
  const int n = M.dim();
  Mat a = M.mat();
  Mat v = Mat::Identity(n, n);
  const double scale = a.norm();
  auto off_norm = [&]() {
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < j; ++i) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
  };
  const double target = std::max(scale * 1e-16, std::numeric_limits<double>::min());
  int sweep = 0;
  const int max_sweeps = 100;
  double off = off_norm();
  while (off > target && sweep < max_sweeps) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= std::numeric_limits<double>::min()) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int r = 0; r < n; ++r) {
          const double arp = a(r, p), arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (int r = 0; r < n; ++r) {
          const double apr = a(p, r), aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          const double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
    ++sweep;
    off = off_norm();
  }
  if (off > tol * (1.0 + scale)) {
    std::ostringstream os;
    os << "Jacobi eigensolver did not converge, off-diagonal residual " << off;
    throw Error(ErrorCode::NumericalFailure, os.str());
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a(i, i) > a(j, j); });
  SpectralDecomposition out;
  out.eigvals.resize(n);
  out.frame.resize(n, n);
  for (int k = 0; k < n; ++k) {
    out.eigvals(k) = a(order[k], order[k]);
    out.frame.col(k) = v.col(order[k]);
  }
  return out;
}

double group_tolerance(const Vec& eigvals) {
  const double m = eigvals.size() ? eigvals.cwiseAbs().maxCoeff() : 0.0;
  return 1e-7 * (1.0 + m);
}

std::vector<std::vector<int>> cluster_sorted(const Vec& sorted, double gtol) {
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < sorted.size(); ++i) {
    if (groups.empty() || std::abs(sorted(i - 1) - sorted(i)) > gtol) groups.emplace_back();
    groups.back().push_back(i);
  }
  return groups;
}

SimultaneousDecomposition simultaneous_eigen(const SymMatrix& X, const SymMatrix& S,
                                             double tol) {
  if (X.dim() != S.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "simultaneous_eigen: order mismatch");
  }
  const Mat comm = X.mat() * S.mat() - S.mat() * X.mat();
  const double res = comm.size() ? comm.cwiseAbs().maxCoeff() : 0.0;
  if (res > tol * (1.0 + X.max_abs() * S.max_abs())) {
    std::ostringstream os;
    os << "matrices do not commute, residual " << res;
    throw Error(ErrorCode::NonCommuting, os.str());
  }
  const int n = X.dim();
  SpectralDecomposition ex = sym_eigen(X);
  Mat P = ex.frame;
  for (const auto& g : cluster_sorted(ex.eigvals, group_tolerance(ex.eigvals))) {
    const int start = g.front();
    const int len = static_cast<int>(g.size());
    if (len == 1) continue;
    const Mat block = P.middleCols(start, len);
    SpectralDecomposition es = sym_eigen(congruence(block, S));
    P.middleCols(start, len) = block * es.frame;
  }
  SimultaneousDecomposition out;
  out.frame = P;
  out.x_eigvals = (P.transpose() * X.mat() * P).diagonal();
  out.s_eigvals = (P.transpose() * S.mat() * P).diagonal();
  (void)n;
  return out;
}

SymMatrix pseudo_inverse(const SymMatrix& M, double rank_tol) {
  const SpectralDecomposition e = sym_eigen(M);
  const int n = M.dim();
  const double m = n ? e.eigvals.cwiseAbs().maxCoeff() : 0.0;
  Vec inv = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (m > 0 && std::abs(e.eigvals(i)) > rank_tol * m) inv(i) = 1.0 / e.eigvals(i);
  }
  return SymMatrix(Mat(e.frame * inv.asDiagonal() * e.frame.transpose()));
}

double min_eig(const SymMatrix& M) {
  if (M.dim() == 0) return std::numeric_limits<double>::infinity();
  return sym_eigen(M).eigvals(M.dim() - 1);
}

double max_eig(const SymMatrix& M) {
  if (M.dim() == 0) return -std::numeric_limits<double>::infinity();
  return sym_eigen(M).eigvals(0);
}

int svec_dim(int n) { return n * (n + 1) / 2; }

int svec_order(int d) {
  int n = 0;
  while (svec_dim(n) < d) ++n;
  if (svec_dim(n) != d) {
    throw Error(ErrorCode::DimensionMismatch, "vector length is not a triangular number");
  }
  return n;
}

std::pair<int, int> svec_index(int k) {
  int j = 0;
  while (svec_dim(j + 1) <= k) ++j;
  return {k - svec_dim(j), j};
}

Vec svec(const SymMatrix& W) {
  const int n = W.dim();
  Vec v(svec_dim(n));
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) v(k++) = (i == j) ? W(i, j) : std::sqrt(2.0) * W(i, j);
  return v;
}

SymMatrix smat(const Vec& v, int n) {
  if (svec_dim(n) != v.size()) {
    throw Error(ErrorCode::DimensionMismatch, "smat: length does not match order");
  }
  Mat m(n, n);
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) {
      const double x = (i == j) ? v(k) : v(k) / std::sqrt(2.0);
      m(i, j) = x;
      m(j, i) = x;
      ++k;
    }
  return SymMatrix(m);
}

SymMatrix smat(const Vec& v) { return smat(v, svec_order(static_cast<int>(v.size()))); }

SymMatrix svec_basis(int n, int k) {
  Vec e = Vec::Zero(svec_dim(n));
  e(k) = 1.0;
  return smat(e, n);
}

namespace subspace {

SubspaceBasis zero(int ambient) { return {ambient, Mat(ambient, 0)}; }
SubspaceBasis full(int ambient) { return {ambient, Mat::Identity(ambient, ambient)}; }

SubspaceBasis span(const Mat& cols, int ambient, double rank_tol) {
  if (cols.rows() != ambient) {
    throw Error(ErrorCode::DimensionMismatch, "span: ambient dimension mismatch");
  }
  if (cols.cols() == 0 || ambient == 0) return zero(ambient);
  Eigen::JacobiSVD<Mat> svd(cols, Eigen::ComputeThinU);
  const Vec& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  int r = 0;
  while (r < sv.size() && smax > 0 && sv(r) > rank_tol * smax) ++r;
  return {ambient, svd.matrixU().leftCols(r)};
}

SubspaceBasis span(const Mat& cols, double rank_tol) {
  return span(cols, static_cast<int>(cols.rows()), rank_tol);
}

SubspaceBasis image(const Mat& A, double rank_tol) { return span(A, rank_tol); }

SubspaceBasis kernel(const Mat& A, double rank_tol) {
  const int n = static_cast<int>(A.cols());
  if (A.rows() == 0 || n == 0) return full(n);
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  int r = 0;
  while (r < sv.size() && smax > 0 && sv(r) > rank_tol * smax) ++r;
  return {n, svd.matrixV().rightCols(n - r)};
}

SubspaceBasis intersection(const SubspaceBasis& U, const SubspaceBasis& V, double tol) {
  if (U.ambient_dim != V.ambient_dim) {
    throw Error(ErrorCode::DimensionMismatch, "intersection: ambient mismatch");
  }
  if (U.is_zero() || V.is_zero()) return zero(U.ambient_dim);
  // Directions of U whose distance to V is below tol (singular values of (I-P_V)U).
  const Mat R = U.basis - V.basis * (V.basis.transpose() * U.basis);
  Eigen::JacobiSVD<Mat> svd(R, Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  const int k = U.dim();
  std::vector<int> keep;
  for (int i = 0; i < k; ++i) {
    const double s = i < sv.size() ? sv(i) : 0.0;
    if (s <= tol) keep.push_back(i);
  }
  Mat B(U.ambient_dim, static_cast<Eigen::Index>(keep.size()));
  for (size_t i = 0; i < keep.size(); ++i) B.col(i) = U.basis * svd.matrixV().col(keep[i]);
  return span(B, U.ambient_dim);
}

SubspaceBasis sum(const SubspaceBasis& U, const SubspaceBasis& V) {
  if (U.ambient_dim != V.ambient_dim) {
    throw Error(ErrorCode::DimensionMismatch, "sum: ambient mismatch");
  }
  Mat C(U.ambient_dim, U.dim() + V.dim());
  C << U.basis, V.basis;
  return span(C, U.ambient_dim);
}

SubspaceBasis complement(const SubspaceBasis& U) {
  if (U.is_zero()) return full(U.ambient_dim);
  return kernel(U.basis.transpose());
}

double inclusion_residual(const SubspaceBasis& U, const SubspaceBasis& V) {
  if (U.ambient_dim != V.ambient_dim) {
    throw Error(ErrorCode::DimensionMismatch, "inclusion: ambient mismatch");
  }
  if (U.is_zero()) return 0.0;
  const Mat R = U.basis - V.basis * (V.basis.transpose() * U.basis);
  return R.colwise().norm().maxCoeff();
}

bool includes(const SubspaceBasis& U, const SubspaceBasis& V, double tol) {
  return inclusion_residual(U, V) <= tol;
}

double min_singular_on(const Mat& A, const SubspaceBasis& U) {
  if (U.is_zero()) return std::numeric_limits<double>::infinity();
  const Mat AU = A * U.basis;
  if (AU.rows() < AU.cols()) return 0.0;
  Eigen::JacobiSVD<Mat> svd(AU);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace subspace

}  // namespace tiltcert
