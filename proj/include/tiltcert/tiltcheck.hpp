#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tiltcert/problem.hpp"
#include "tiltcert/psdcone.hpp"
#include "tiltcert/varanalysis.hpp"

namespace tiltcert {

enum class UpsilonKind { Star, HatStar, TildeStar };
const char* upsilon_name(UpsilonKind k);

enum class FrameConstraint { OX, OXS };
enum class FrameProvenance { Canonical, SignFlip, Sampled, Refined };
const char* provenance_name(FrameProvenance p);

struct FrameCandidate {
  Mat R;
  FrameConstraint kind = FrameConstraint::OXS;
  FrameProvenance provenance = FrameProvenance::Canonical;
};

/// Off-diagonal mass of RᵀXR (and RᵀSR for OXS frames).
double frame_membership_residual(const FrameCandidate& f, const SpectralPair& pair);

/// ‖[R_α R_β R_γ]ᵀ M R_γ‖_F with the partition indices read as columns of R.
double gamma_block_residual(const FrameCandidate& f, const SymMatrix& M, const IndexPartition& part);

/// Residuals of the index-split form with β₊ = β, β₋ = β₀ = ∅ and γ̃ = γ.
double split_form_residual(const FrameCandidate& f, const SymMatrix& M, const IndexPartition& part);

enum class Membership { InSet, NotInSet, Inconclusive };
const char* membership_name(Membership m);

struct MembershipResult {
  Membership status = Membership::Inconclusive;
  FrameCandidate best;
  double residual = 0.0;
  int frames_searched = 0;
};

inline constexpr double kMembershipTol = 1e-7;

/// pair = classify(g(x), S*). For Star the frame may rotate freely inside Ker g(x); the best
/// rotation comes from an SVD of (g′w)P_K, so the answer is exact up to the tolerance.
MembershipResult upsilon_membership(const NsdpInstance& inst, const Vec& x, const SpectralPair& pair,
                                    const Vec& w, UpsilonKind kind);

struct Verdict {
  std::string condition_id;
  Tri status = Tri::Inconclusive;  // Holds: the intersection is {0}
  std::optional<Vec> witness;
  int frames_searched = 0;
  double residual = 0.0;  // best membership residual reached by the search
  bool exact = false;
  std::string notes;
};

enum class KernelExtra { None, WithVperp };

Verdict kernel_intersection(const NsdpInstance& inst, const Vec& x, const SpectralPair& pair,
                            UpsilonKind kind, KernelExtra extra, int budget = 64,
                            std::uint64_t seed = 7);

/// Re-checks a witness from scratch (fresh eigendecompositions); returns the largest residual.
double revalidate_witness(const NsdpInstance& inst, const Vec& x, const SymMatrix& S_star, const Vec& w,
                          UpsilonKind kind, KernelExtra extra);

enum class FinalClass { TiltStableCertified, NotTiltStableCertified, Undetermined };
const char* final_name(FinalClass f);

struct Hypothesis {
  std::string id;
  Tri status = Tri::Inconclusive;
  std::string detail;
};

struct CertifyPolicy {
  int frames = 64;
  int restarts = 64;
  int probes = 8;
  std::uint64_t seed = 7;
  double feas_tol = 1e-8;
  double witness_tol = 1e-5;
};

struct StabilityReport {
  std::string instance;
  Vec x;
  Vec vstar;
  PointReport point;
  SymMatrix S_star;  // multiplier used for the index partition
  Vec y_star;
  IndexPartition partition;
  Uniqueness uniqueness = Uniqueness::Inconclusive;
  MinRankResult min_rank;
  RegularityReport regularity;
  std::vector<Hypothesis> hypotheses;
  std::vector<Verdict> verdicts;
  FinalClass final_class = FinalClass::Undetermined;
  bool iff = false;
  std::string deciding_condition;
  std::string blocking;
  std::optional<Vec> witness;
  double witness_revalidation = 0.0;
  CertifyPolicy policy;
};

/// Throws NotStationary, HessianNotPsd, InfeasiblePoint.
StabilityReport certify(const NsdpInstance& inst, const Vec& x, const CertifyPolicy& policy = {});

}  // namespace tiltcert
