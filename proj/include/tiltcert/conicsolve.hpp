#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tiltcert/lmi.hpp"
#include "tiltcert/symmat.hpp"

namespace tiltcert {

/// Variables z = (y, svec Z₁, …, svec Z_r) with E z = e, Z_t ⪰ 0 and optionally ‖z‖ ≤ ρ.
struct AffinePsdProblem {
  int free_dim = 0;
  std::vector<int> psd_blocks;
  Mat E;
  Vec e;
  std::optional<Vec> objective;  // maximize ℓᵀz
  std::optional<double> ball_radius;

  int dim() const;
  int block_offset(int t) const;
  SymMatrix block(const Vec& z, int t) const;
  /// Checks shapes; throws DimensionMismatch.
  void check() const;
};

enum class SolveStatus { Feasible, Infeasible, Optimal, UnboundedCertificate, IterationLimit };
const char* status_name(SolveStatus s);

struct SolveOutcome {
  SolveStatus status = SolveStatus::IterationLimit;
  Vec point;
  double value = 0.0;
  double eq_residual = 0.0;
  double psd_residual = 0.0;
  std::optional<Vec> certificate;  // recession direction, or Farkas multiplier y with Eᵀy ⪰ 0, eᵀy < 0
  bool polished = false;
  int iterations = 0;
  std::string note;
};

double eq_residual(const AffinePsdProblem& p, const Vec& z);
/// Largest negative-eigenvalue magnitude over the PSD blocks (and ball excess).
double psd_residual(const AffinePsdProblem& p, const Vec& z);

struct DykstraResult {
  Vec point;
  bool converged = false;
  int sweeps = 0;
  std::vector<double> dist_affine;  // after each sweep
  std::vector<double> dist_cone;
  std::optional<Vec> farkas;
};

DykstraResult dykstra_project(const AffinePsdProblem& p, const Vec& start, double feas_tol,
                              int max_sweeps);
/// Verifies y as an infeasibility certificate: Eᵀy vanishes on free coordinates and is PSD
/// on every block while eᵀy < 0.
bool verify_farkas(const AffinePsdProblem& p, const Vec& y);

SolveOutcome solve_feasibility(const AffinePsdProblem& p, double feas_tol = 1e-8, int max_iter = 2000);
SolveOutcome maximize_linear(const AffinePsdProblem& p, double tol = 1e-8);

struct SectionSearch {
  double max_value = 0.0;
  Vec argmax;
  bool lower_bound_only = true;  // false when the value is exact (witness or certified zero)
  bool witness_found = false;
  bool proven_zero = false;
  int restarts_used = 0;
  std::string method;
};

/// max ‖z‖² over {E z = 0, Z_t ⪰ 0, ‖z‖ ≤ ρ}. The section is a truncated cone, so the
/// value is 0 or ρ²; exact decisions are attempted before the multi-start ascent.
SectionSearch max_norm_on_section(const AffinePsdProblem& p, double tol = 1e-8, int restarts = 64,
                                  std::uint64_t seed = 7, double witness_tol = 1e-5);

/// The problem as an LMI in the null-space parameters u, with z = z0 + N u.
struct ReducedProblem {
  bool consistent = true;
  Vec z0;
  Mat N;
  lmi::System sys;
  Vec inconsistency;  // Farkas y when inconsistent
};
ReducedProblem reduce(const AffinePsdProblem& p);

}  // namespace tiltcert
