#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tiltcert/problem.hpp"

namespace tiltcert {

enum class SimStatus { Converged, IterationLimit };
const char* sim_status_name(SimStatus s);

struct TiltSolveOptions {
  int starts = 8;
  int max_iter = 40000;
  double tol = 1e-10;           // ADMM primal and dual residuals, relative to 1 + ‖x̄‖
  double opt_gap_tol = 1e-9;    // values within this of the best count as optimal
  double cluster_tol = 1e-6;    // representatives closer than this are merged
  double feas_tol = 1e-8;
  std::uint64_t seed = 7;
};

struct TiltSolution {
  std::vector<Vec> clusters;  // representatives, best value first
  std::vector<double> values;
  Vec best;
  double best_value = 0.0;
  double diameter = 0.0;       // largest distance among near-optimal solutions
  double feas_residual = 0.0;  // worst over recorded solutions
  SimStatus status = SimStatus::Converged;
  int iterations = 0;          // summed over starts
};

/// Tilted objective f(x) − f(x̄) − ⟨v, x − x̄⟩.
double tilted_value(const NsdpInstance& inst, const Vec& xbar, const Vec& v, const Vec& x);

/// Feasibility residual for Γ ∩ B(x̄, δ): max of ‖Ax − b‖, λ₋(g(x)) and the ball excess.
double ball_feasibility_residual(const NsdpInstance& inst, const Vec& xbar, double delta, const Vec& x);

/// Minimizes the tilted objective over B(x̄, δ) ∩ Γ from several starts. Requires affine g.
TiltSolution solve_tilted(const NsdpInstance& inst, const Vec& xbar, const Vec& v, double delta,
                          const TiltSolveOptions& opt = {});

/// Minimizes φ over Γ: a feasible point from the Dykstra solver, then the same lifted ADMM with a
/// large ball around it. Throws InfeasiblePoint or NumericalFailure (unbounded, no convergence).
Vec minimize_objective(const NsdpInstance& inst, int max_iter = 200000);

struct TiltSample {
  Vec v;
  double scale = 1.0;  // 1 for the main radius, 0.1 for the decade check
  TiltSolution sol;
};

struct TiltProfile {
  double delta = 0.0;
  double tilt_radius = 0.0;
  std::uint64_t seed = 0;
  std::vector<TiltSample> samples;
  std::optional<double> lip_ratio_max;         // pairs at the main radius
  std::optional<double> lip_ratio_max_decade;  // same directions scaled by 1/10
  std::optional<double> lip_ratio_refined;     // bisected sub-segments of sampled pairs
  int refine_solves = 0;
  double multiplicity_gap_max = 0.0;
  int flagged = 0;  // samples that hit the iteration limit
};

struct ProfileOptions {
  std::optional<double> delta;  // default 0.5(1 + ‖x̄‖)
  double tilt_radius = 1e-3;
  int num_tilts = 32;
  std::uint64_t seed = 7;
  bool decade = true;
  int refine_pairs = 48;  // random main-radius pairs to bisect
  int refine_steps = 12;  // halvings per pair; a jump doubles the ratio at each one
  int refine_patience = 3;  // stop a pair after this many halvings without 25% growth
  double refine_skip_gap = 0.1;  // no refinement once the sampled solution sets are this wide
  TiltSolveOptions solve;
};

double default_delta(const Vec& xbar);

/// The first tilt is 0, the rest come in antipodal pairs. Deterministic given the seed.
TiltProfile empirical_profile(const NsdpInstance& inst, const Vec& xbar, const ProfileOptions& opt = {});

enum class OracleVerdict { StableLikely, UnstableLikely, Inconclusive };
const char* oracle_name(OracleVerdict v);

struct OracleThresholds {
  double gap_tol = 1e-5;
  double jump_tol = 0.1;
  double lip_cap = 1e3;
  double decade_factor = 5.0;
};

OracleVerdict oracle_verdict(const TiltProfile& profile, const OracleThresholds& th = {});

/// One row per sample: index, scale, ‖v‖, v, best x, best value, diameter, clusters, status.
std::string profile_csv(const TiltProfile& p);

}  // namespace tiltcert
