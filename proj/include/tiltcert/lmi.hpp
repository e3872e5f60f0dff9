#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tiltcert/symmat.hpp"

namespace tiltcert::lmi {

/// M(u) = F0 + Σ uᵢFᵢ + ½ΣΣ uᵢuⱼHᵢⱼ with H (when present) matrix-concave, so that
/// −log det M is convex on {M ≻ 0}.
struct Block {
  Mat F0;
  std::vector<Mat> F;
  std::vector<Mat> H;  // empty, or p·p entries indexed i·p + j

  int order() const { return static_cast<int>(F0.rows()); }
  bool quadratic() const { return !H.empty(); }
};

struct System {
  int p = 0;
  std::vector<Block> blocks;

  Mat eval(int b, const Vec& u) const;
  Mat partial(int b, const Vec& u, int i) const;
  /// Smallest eigenvalue over all blocks (+inf without blocks).
  double min_eig(const Vec& u) const;
  double scale() const;
  int barrier_parameter() const;
  bool has_quadratic() const;

  /// Substitutes u = u0 + N t.
  System substitute(const Vec& u0, const Mat& N) const;
  /// Replaces block b by VᵀM_bV (dropped when V has no columns).
  System compress(const std::vector<Mat>& V) const;
  void add_block(Block b) { blocks.push_back(std::move(b)); }
};

/// Quadratic block r² − ‖u − center‖² ≥ 0 in a p-dimensional parameter space.
Block ball_block(const Vec& center, double radius);

struct BarrierOptions {
  double gap_tol = 1e-10;
  double tau0 = 1.0;
  double tau_growth = 10.0;
  double tau_max = 1e14;
  int max_newton = 80;
  std::function<bool(const Vec&)> stop;
};

struct BarrierResult {
  Vec x;
  double value = 0.0;
  double tau = 0.0;
  double gap = 0.0;
  bool converged = false;
  bool stopped = false;
  int newton_steps = 0;
};

/// Path-following for max cᵀx over {x : all blocks ≻ 0}, started at a strictly feasible x0.
BarrierResult barrier_maximize(const System& sys, const Vec& c, const Vec& x0,
                               const BarrierOptions& opt = {});

/// Feasible region after facial reduction: u = u0 + N t with `reduced` the system in t.
struct Region {
  enum class Kind { Feasible, Infeasible, Undecided };
  Kind kind = Kind::Undecided;
  Vec u0;
  Mat N;
  System reduced;
  Vec t_interior;          // strictly feasible for `reduced` (any t when it has no blocks)
  bool certified = false;  // Infeasible backed by a verified dual certificate
  std::vector<Mat> certificate;  // per original block, when certified
  int reductions = 0;
  double margin = 0.0;     // max-min eigenvalue found by the last phase-1 solve
  std::string note;

  Vec point() const { return u0 + N * t_interior; }
};

Region find_region(const System& sys, const Vec& hint);

/// Largest s with all blocks ⪰ sI over u within `radius` of hint (phase-1 value).
double max_min_eig(const System& sys, const Vec& hint, double radius, Vec* argmax = nullptr);

struct MaxResult {
  enum class Status { Optimal, Unbounded, Infeasible, Failed };
  Status status = Status::Failed;
  Vec u;
  double value = 0.0;
  double gap = 0.0;
  Vec direction;  // recession direction with cᵀd > 0 when Unbounded
  bool polished = false;
  std::string note;
};

MaxResult maximize(const System& sys, const Vec& c, double tol = 1e-9, bool check_recession = true);

/// Solves the linear system C u = d, returning u = u0 + N t or nothing when inconsistent.
/// Singular values below rel_tol·max(σ₁, ref_scale) count as zero.
bool solve_affine(const Mat& C, const Vec& d, Vec& u0, Mat& N, double rel_tol = 1e-10,
                  double ref_scale = 0.0);

}  // namespace tiltcert::lmi
