#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tiltcert/conicsolve.hpp"
#include "tiltcert/problem.hpp"
#include "tiltcert/psdcone.hpp"

namespace tiltcert {

enum class Tri { Holds, Fails, Inconclusive, NotApplicable };
const char* tri_name(Tri t);

/// Extended real with an exact +∞ tag.
struct ExtendedReal {
  bool infinite = false;
  double value = 0.0;

  static ExtendedReal inf() { return {true, 0.0}; }
  static ExtendedReal finite(double v) { return {false, v}; }
  std::string str() const;
};

struct Multiplier {
  Vec y;
  SymMatrix S;
  int rank = 0;  // rank of S
};

/// M(x*, v*) parametrized as S = −P_K Z P_Kᵀ with Z ⪰ 0, unknowns z = (y, svec Z).
struct MultiplierSystem {
  Vec x;
  Vec vstar;
  SpectralPair frame;  // classify_point(g(x*))
  Mat P_K;             // orthonormal basis of Ker g(x*)
  Mat A;
  Mat J;               // columns svec ∂ᵢg(x*)
  AffinePsdProblem eq;

  int m() const { return static_cast<int>(A.rows()); }
  int k() const { return static_cast<int>(P_K.cols()); }
  SymMatrix Z_of(const Vec& z) const;
  Multiplier decode(const Vec& z, double rank_tol = 1e-6) const;
  /// The same system with Z restricted to V Zr Vᵀ for a k×r matrix V.
  AffinePsdProblem restricted(const Mat& V) const;
  /// Residuals of A*y + ∇g(x*)S = v* and of S ∈ N(g(x*)).
  double eq_residual(const Vec& y, const SymMatrix& S) const;
  double normal_residual(const SymMatrix& S) const;
};

/// v* = −∇φ(x*) when vstar is not given. Throws InfeasiblePoint.
MultiplierSystem multiplier_system(const NsdpInstance& inst, const Vec& x,
                                   const std::optional<Vec>& vstar = std::nullopt, double tol = 1e-8);

struct MultiplierSet {
  bool nonempty = false;
  Multiplier sample;
  SolveOutcome outcome;
};
MultiplierSet multiplier_set(const MultiplierSystem& sys, double tol = 1e-8);

int numeric_rank(const SymMatrix& M, double rank_tol = 1e-6);

enum class RankMode { Exact, TraceHeuristic };

struct MinRankResult {
  Multiplier mult;
  RankMode mode = RankMode::Exact;
  bool proven_minimal = false;
  int patterns_tested = 0;
  std::string report;
};

/// Exact mode enumerates principal supports of Z in a few canonical frames (order ≤ 6);
/// trace mode minimizes tr Z.
MinRankResult min_rank_multiplier(const MultiplierSystem& sys, RankMode mode, double rank_tol = 1e-6);

enum class Uniqueness { UniqueS, NotUnique, Inconclusive };
const char* uniqueness_name(Uniqueness u);

struct UniquenessResult {
  Uniqueness status = Uniqueness::Inconclusive;
  std::optional<Multiplier> S_star;
  std::vector<Multiplier> witnesses;
  double max_spread = 0.0;
};
UniquenessResult multiplier_S_unique(const MultiplierSystem& sys, int probes = 8,
                                     std::uint64_t seed = 7);

ExtendedReal d2_indicator_affine(const NsdpInstance& inst, const Vec& x, const Vec& v, const Vec& w,
                                 double tol = 1e-9);

struct D2Result {
  ExtendedReal value;
  std::optional<Multiplier> attaining;
  double domain_residual = 0.0;
  std::string note;
};

/// Second subderivative of δ_Γ at x for v in direction w. Throws NotStationary when
/// v ∉ N_Γ(x).
D2Result d2_indicator_Gamma(const NsdpInstance& inst, const Vec& x, const Vec& v, const Vec& w,
                            double tol = 1e-8);
/// wᵀQw + d²δ_Γ(x | v − ∇φ(x))(w).
D2Result d2_total(const NsdpInstance& inst, const Vec& x, const Vec& v, const Vec& w,
                  double tol = 1e-8);

/// ⟨S, D²g(w,w) − 2(g′w)(g(x))†(g′w)⟩.
double curvature_term(const NsdpInstance& inst, const Vec& x, const SymMatrix& S, const Vec& w);

struct RegularityOptions {
  double witness_tol = 1e-5;
  int restarts = 64;
  std::uint64_t seed = 7;
};

struct RegularityReport {
  bool slater = false;
  std::optional<Vec> slater_point;
  double slater_margin = 0.0;
  double imply1_max = 0.0;
  std::optional<Vec> imply1_witness;  // svec of H ⪰ 0 with ∇g(x)H ∈ Im A*
  Tri metrically_regular = Tri::Inconclusive;
  Tri m_locally_bounded = Tri::Inconclusive;
  Tri condition_A = Tri::NotApplicable;
  Tri condition_B = Tri::NotApplicable;
  Tri Kstar_in_range = Tri::NotApplicable;
  Tri B_injective = Tri::NotApplicable;
};

RegularityReport regularity_report(const NsdpInstance& inst, const Vec& x, const SymMatrix& S_star,
                                   const RegularityOptions& opt = {});

/// Rank-based pieces of the report, exposed for cross-checks. All work in svec coordinates.
bool condition_A_holds(const Mat& J, const Mat& A, const SymMatrix& X);
bool condition_B_holds(const Mat& J, const Mat& A, const SymMatrix& X);
/// span(K*) = {W : W P_γ = 0} in the (X*, S*) frame.
SubspaceBasis kstar_span(const SpectralPair& pair);

}  // namespace tiltcert
