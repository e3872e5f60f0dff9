#pragma once

#include <vector>

#include "tiltcert/symmat.hpp"

namespace tiltcert {

/// Eigen-index partition of a complementary pair (X, S). Indices refer to the
/// columns of the shared frame, which is ordered α, β, γ.
struct IndexPartition {
  std::vector<int> alpha, beta, gamma;
  std::vector<std::vector<int>> alpha_blocks;  // positive eigenvalue clusters of X
  std::vector<std::vector<int>> gamma_blocks;  // negative eigenvalue clusters of S
  std::vector<double> mu;                      // μ₁ > … > μ_p = 0
  std::vector<double> nu;                      // 0 = ν₁ > … > ν_s
  int p() const { return static_cast<int>(mu.size()); }
  int s() const { return static_cast<int>(nu.size()); }
  /// Indices of the zero eigenspace of X (β ∪ γ).
  std::vector<int> kernel() const;
};

struct SpectralPair {
  SymMatrix X, S;
  Mat frame;    // P ∈ O(X) ∩ O(S)
  Vec x_eigvals;  // snapped
  Vec s_eigvals;  // snapped
  IndexPartition partition;

  int n() const { return X.dim(); }
  Mat cols(const std::vector<int>& idx) const;
};

struct ConeTolerances {
  double sign = 1e-9;             // X ⪰ −sign·scale, S ⪯ sign·scale
  double complementarity = 1e-8;  // |⟨X,S⟩| ≤ tol·(1+‖X‖‖S‖)
  double snap = 1e-9;             // eigenvalues within snap·(1+max|λ|) become zero
};

SpectralPair classify(const SymMatrix& X, const SymMatrix& S, const ConeTolerances& tol = {});
/// Pair with S = 0, enough for tangent-cone and subspace queries at X.
SpectralPair classify_point(const SymMatrix& X, const ConeTolerances& tol = {});

enum class ConeKind { Tangent, Normal, Critical };

double cone_residual(ConeKind kind, const SpectralPair& pair, const SymMatrix& W);

/// σ = 2⟨S, W X† W⟩ for W in the critical cone; 0 when X = 0.
double second_tangent_support(const SpectralPair& pair, const SymMatrix& W,
                              double critical_tol = 1e-8);
/// The eigenvalue double-sum form, exposed for cross-checks.
double second_tangent_support_eigen_form(const SpectralPair& pair, const SymMatrix& W);

/// Sp(N(X)) = {W : P_αᵀ W = 0}, orthonormal in svec coordinates.
SubspaceBasis span_normal_basis(const SymMatrix& X);
/// lin(T(X)) = {W : P_Kᵀ W P_K = 0}.
SubspaceBasis lin_tangent_basis(const SymMatrix& X);
/// {W : W U = 0}, for an orthonormal set of columns U (used for span(K*)).
SubspaceBasis annihilator_basis(const Mat& U, int n);

}  // namespace tiltcert
