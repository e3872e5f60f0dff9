#pragma once

#include <Eigen/Dense>
#include <vector>

#include "tiltcert/errors.hpp"

namespace tiltcert {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Dense real symmetric matrix. Construction mirrors the upper triangle, so
/// the stored entries are exactly symmetric.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int n) : m_(Mat::Zero(n, n)) {}
  SymMatrix(const Mat& m);  // NOLINT(google-explicit-constructor)

  static SymMatrix zero(int n) { return SymMatrix(n); }
  static SymMatrix identity(int n) { return SymMatrix(Mat::Identity(n, n)); }
  static SymMatrix diag(const Vec& d);
  static SymMatrix diag(std::initializer_list<double> d);

  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  void set(int i, int j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }
  const Mat& mat() const { return m_; }
  operator const Mat&() const { return m_; }  // NOLINT
  bool all_finite() const { return m_.allFinite(); }
  double max_abs() const { return m_.size() ? m_.cwiseAbs().maxCoeff() : 0.0; }
  double norm() const { return m_.norm(); }

  SymMatrix operator+(const SymMatrix& o) const { return SymMatrix(Mat(m_ + o.m_)); }
  SymMatrix operator-(const SymMatrix& o) const { return SymMatrix(Mat(m_ - o.m_)); }
  SymMatrix operator-() const { return SymMatrix(Mat(-m_)); }
  SymMatrix operator*(double s) const { return SymMatrix(Mat(m_ * s)); }

 private:
  Mat m_;
};

inline SymMatrix operator*(double s, const SymMatrix& m) { return m * s; }

/// Congruence Rᵀ M R.
SymMatrix congruence(const Mat& R, const SymMatrix& M);
double frob_inner(const Mat& a, const Mat& b);

struct SpectralDecomposition {
  Vec eigvals;  // non-increasing
  Mat frame;    // orthogonal, columns match eigvals
};

/// Cyclic Jacobi eigensolver.
SpectralDecomposition sym_eigen(const SymMatrix& M, double tol = 1e-12);

struct SimultaneousDecomposition {
  Mat frame;
  Vec x_eigvals;
  Vec s_eigvals;
};

/// One orthogonal frame diagonalizing a commuting pair. λ(X) is non-increasing
/// and λ(S) is non-increasing inside every eigenvalue cluster of X.
SimultaneousDecomposition simultaneous_eigen(const SymMatrix& X, const SymMatrix& S,
                                             double tol = 1e-8);

SymMatrix pseudo_inverse(const SymMatrix& M, double rank_tol = 1e-9);

double group_tolerance(const Vec& eigvals);
/// Groups a sorted eigenvalue list into runs whose consecutive gaps are within gtol.
std::vector<std::vector<int>> cluster_sorted(const Vec& sorted, double gtol);

double min_eig(const SymMatrix& M);
double max_eig(const SymMatrix& M);

// Scaled upper-triangle coordinates: (W11, √2 W12, W22, √2 W13, √2 W23, W33, ...).
int svec_dim(int n);
int svec_order(int d);  // inverse of svec_dim, throws if d is not triangular
Vec svec(const SymMatrix& W);
SymMatrix smat(const Vec& v);
SymMatrix smat(const Vec& v, int n);
/// The k-th orthonormal basis matrix of Sⁿ in the svec ordering.
SymMatrix svec_basis(int n, int k);
/// Row/column of each svec coordinate.
std::pair<int, int> svec_index(int k);

struct SubspaceBasis {
  int ambient_dim = 0;
  Mat basis;  // ambient_dim × dim, orthonormal columns

  int dim() const { return static_cast<int>(basis.cols()); }
  bool is_zero() const { return basis.cols() == 0; }
  Mat projector() const { return basis * basis.transpose(); }
  Vec project(const Vec& v) const { return basis * (basis.transpose() * v); }
};

namespace subspace {

inline constexpr double kRankTol = 1e-9;
inline constexpr double kInclusionTol = 1e-9;

SubspaceBasis zero(int ambient);
SubspaceBasis full(int ambient);
/// Orthonormal basis of the column span (rank relative to the largest singular value).
SubspaceBasis span(const Mat& cols, double rank_tol = kRankTol);
SubspaceBasis span(const Mat& cols, int ambient, double rank_tol = kRankTol);
SubspaceBasis image(const Mat& A, double rank_tol = kRankTol);
SubspaceBasis kernel(const Mat& A, double rank_tol = kRankTol);
SubspaceBasis intersection(const SubspaceBasis& U, const SubspaceBasis& V,
                           double tol = 1e-8);
SubspaceBasis sum(const SubspaceBasis& U, const SubspaceBasis& V);
SubspaceBasis complement(const SubspaceBasis& U);
/// Largest distance from a basis vector of U to V.
double inclusion_residual(const SubspaceBasis& U, const SubspaceBasis& V);
bool includes(const SubspaceBasis& U, const SubspaceBasis& V,
              double tol = kInclusionTol);  // U ⊆ V
/// Smallest singular value of the restriction of A to U (infinity for the zero subspace).
double min_singular_on(const Mat& A, const SubspaceBasis& U);

}  // namespace subspace

}  // namespace tiltcert
