#include "tiltcert/tiltsim.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "tiltcert/conicsolve.hpp"
#include "tiltcert/errors.hpp"
#include "tiltcert/random.hpp"

namespace tiltcert {

const char* sim_status_name(SimStatus s) {
  return s == SimStatus::Converged ? "Converged" : "IterationLimit";
}

const char* oracle_name(OracleVerdict v) {
  switch (v) {
    case OracleVerdict::StableLikely: return "StableLikely";
    case OracleVerdict::UnstableLikely: return "UnstableLikely";
    case OracleVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

double default_delta(const Vec& xbar) { return 0.5 * (1.0 + xbar.norm()); }

double tilted_value(const NsdpInstance& inst, const Vec& xbar, const Vec& v, const Vec& x) {
  return phi(inst, x) - phi(inst, xbar) - v.dot(x - xbar);
}

double ball_feasibility_residual(const NsdpInstance& inst, const Vec& xbar, double delta, const Vec& x) {
  double r = std::max(0.0, (x - xbar).norm() - delta);
  if (inst.m() > 0) r = std::max(r, (inst.A * x - inst.b).norm());
  return std::max(r, std::max(0.0, -min_eig(g_value(inst, x))));
}

namespace {

Vec project_ball(const Vec& p, const Vec& c, double r) {
  const Vec d = p - c;
  const double nd = d.norm();
  return nd <= r ? p : Vec(c + d * (r / nd));
}

Vec project_psd_svec(const Vec& y, int n) {
  Eigen::SelfAdjointEigenSolver<Mat> es(smat(y, n).mat());
  const Vec lam = es.eigenvalues().cwiseMax(0.0);
  return svec(SymMatrix(Mat(es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose())));
}

// ADMM on the lifted problem: z = (x, y) on {Ax = b, y = svec g(x)}, u = (ux, uy) on
// B(x̄, δ) × S₊, with z = u.
class LiftedAdmm {
 public:
  LiftedAdmm(const NsdpInstance& inst, const Vec& xbar, double delta)
      : inst_(inst), xbar_(xbar), delta_(delta), n_(inst.n()), d_(inst.d) {
    J_ = g_jacobian(inst, xbar);
    g0_ = svec(g_value(inst, xbar)) - J_ * xbar;
    N_ = static_cast<int>(J_.rows());
    Q_ = inst.objective.Q.size() ? inst.objective.Q : Mat::Zero(d_, d_);
  }

  struct Run {
    Vec x;
    int iterations = 0;
    bool converged = false;
  };

  Run solve(const Vec& q, const Vec& start, double tol, int max_iter) {
    double rho = 1.0;
    factor(rho);
    Vec ux = project_ball(start, xbar_, delta_);
    Vec uy = project_psd_svec(g0_ + J_ * start, n_);
    Vec lx = Vec::Zero(d_), ly = Vec::Zero(N_);
    Vec x = ux, y = uy;
    Run run;
    for (int it = 1; it <= max_iter; ++it) {
      x = zstep(q, ux - lx, uy - ly, rho);
      y = g0_ + J_ * x;
      const Vec ux_old = ux, uy_old = uy;
      ux = project_ball(x + lx, xbar_, delta_);
      uy = project_psd_svec(y + ly, n_);
      lx += x - ux;
      ly += y - uy;
      const double r = std::sqrt((x - ux).squaredNorm() + (y - uy).squaredNorm());
      const double s = rho * std::sqrt((ux - ux_old).squaredNorm() + (uy - uy_old).squaredNorm());
      run.iterations = it;
      if (r <= tol && s <= tol) {
        run.converged = true;
        break;
      }
      if (it % 25 == 0) {
        double f = 1.0;
        if (r > 10.0 * s) f = 2.0;
        else if (s > 10.0 * r) f = 0.5;
        if (f != 1.0 && rho * f >= 1e-4 && rho * f <= 1e4) {
          rho *= f;
          lx /= f;
          ly /= f;
          factor(rho);
        }
      }
    }
    run.x = x;
    return run;
  }

 private:
  void factor(double rho) {
    const int m = inst_.m();
    Mat K = Mat::Zero(d_ + m, d_ + m);
    K.topLeftCorner(d_, d_) = Q_ + rho * (Mat::Identity(d_, d_) + J_.transpose() * J_);
    if (m > 0) {
      K.topRightCorner(d_, m) = inst_.A.transpose();
      K.bottomLeftCorner(m, d_) = inst_.A;
    }
    lu_ = Eigen::PartialPivLU<Mat>(K);
  }

  Vec zstep(const Vec& q, const Vec& ax, const Vec& ay, double rho) const {
    const int m = inst_.m();
    Vec rhs(d_ + m);
    rhs.head(d_) = -q + rho * ax + rho * J_.transpose() * (ay - g0_);
    if (m > 0) rhs.tail(m) = inst_.b;
    return lu_.solve(rhs).head(d_);
  }

  const NsdpInstance& inst_;
  Vec xbar_;
  double delta_;
  int n_, d_, N_ = 0;
  Mat J_, Q_;
  Vec g0_;
  Eigen::PartialPivLU<Mat> lu_;
};

}  // namespace

TiltSolution solve_tilted(const NsdpInstance& inst, const Vec& xbar, const Vec& v, double delta,
                          const TiltSolveOptions& opt) {
  if (!inst.g.affine()) throw Error(ErrorCode::UnsupportedFeature, "tilt simulation needs an affine constraint map");
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "ball radius must be positive");
  if (v.size() != inst.d || xbar.size() != inst.d) throw Error(ErrorCode::DimensionMismatch, "tilt or point has wrong size");
  const double feas0 = ball_feasibility_residual(inst, xbar, delta, xbar);
  if (feas0 > opt.feas_tol) throw Error(ErrorCode::InfeasiblePoint, "reference point is not feasible");

  const double scale = 1.0 + xbar.norm();
  Vec q = -v;
  if (inst.objective.c.size()) q += inst.objective.c;
  LiftedAdmm admm(inst, xbar, delta);
  Rng rng(opt.seed);

  struct Cand {
    Vec x;
    double value;
  };
  std::vector<Cand> cands;
  TiltSolution out;
  for (int s = 0; s < std::max(1, opt.starts); ++s) {
    Vec start = xbar;
    if (s > 0) start += delta * uniform(rng, 0.3, 1.0) * random_unit(rng, inst.d);
    const auto run = admm.solve(q, start, opt.tol * scale, opt.max_iter);
    out.iterations += run.iterations;
    if (!run.converged) out.status = SimStatus::IterationLimit;
    cands.push_back({run.x, tilted_value(inst, xbar, v, run.x)});
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.value < b.value; });
  if (cands.front().value > 1e-10) cands.insert(cands.begin(), {xbar, 0.0});

  const double best = cands.front().value;
  std::vector<const Cand*> near;
  for (const Cand& c : cands)
    if (c.value <= best + opt.opt_gap_tol) near.push_back(&c);
  for (size_t i = 0; i < near.size(); ++i) {
    out.feas_residual = std::max(out.feas_residual, ball_feasibility_residual(inst, xbar, delta, near[i]->x));
    for (size_t j = i + 1; j < near.size(); ++j)
      out.diameter = std::max(out.diameter, (near[i]->x - near[j]->x).norm());
    const bool fresh = std::none_of(out.clusters.begin(), out.clusters.end(),
                                    [&](const Vec& r) { return (r - near[i]->x).norm() <= opt.cluster_tol; });
    if (fresh) {
      out.clusters.push_back(near[i]->x);
      out.values.push_back(near[i]->value);
    }
  }
  out.best = cands.front().x;
  out.best_value = best;
  return out;
}

Vec minimize_objective(const NsdpInstance& inst, int max_iter) {
  if (!inst.g.affine()) throw Error(ErrorCode::UnsupportedFeature, "point solving needs an affine constraint map");
  const int d = inst.d, m = inst.m();
  const Vec zero = Vec::Zero(d);
  const Mat J = g_jacobian(inst, zero);
  const Vec g0 = svec(g_value(inst, zero));
  const int N = static_cast<int>(J.rows());
  AffinePsdProblem p;
  p.free_dim = d;
  p.psd_blocks = {inst.n()};
  p.E = Mat::Zero(m + N, d + N);
  p.e = Vec::Zero(m + N);
  if (m > 0) {
    p.E.topLeftCorner(m, d) = inst.A;
    p.e.head(m) = inst.b;
  }
  p.E.bottomLeftCorner(N, d) = -J;
  p.E.bottomRightCorner(N, N) = Mat::Identity(N, N);
  p.e.tail(N) = g0;
  const SolveOutcome feas = solve_feasibility(p, 1e-10);
  if (feas.status == SolveStatus::Infeasible) throw Error(ErrorCode::InfeasiblePoint, "the feasible set is empty: " + feas.note);
  if (feas.status != SolveStatus::Feasible) throw Error(ErrorCode::NumericalFailure, "no feasible point found: " + feas.note);
  const Vec x0 = feas.point.head(d);
  const double radius = 1e3 * (1.0 + x0.norm());
  Vec q = inst.objective.c.size() ? inst.objective.c : Vec::Zero(d);
  LiftedAdmm admm(inst, x0, radius);
  const auto run = admm.solve(q, x0, 1e-11 * (1.0 + x0.norm()), max_iter);
  if (!run.converged) throw Error(ErrorCode::NumericalFailure, "point solve hit the iteration limit");
  if ((run.x - x0).norm() >= 0.99 * radius)
    throw Error(ErrorCode::NumericalFailure, "objective appears unbounded below on the feasible set");
  return run.x;
}

namespace {

std::optional<double> lip_over(const std::vector<const TiltSample*>& s, double min_sep) {
  std::optional<double> out;
  for (size_t i = 0; i < s.size(); ++i)
    for (size_t j = i + 1; j < s.size(); ++j) {
      const double dv = (s[i]->v - s[j]->v).norm();
      if (dv < min_sep) continue;
      const double r = (s[i]->sol.best - s[j]->sol.best).norm() / dv;
      out = std::max(out.value_or(0.0), r);
    }
  return out;
}

}  // namespace

TiltProfile empirical_profile(const NsdpInstance& inst, const Vec& xbar, const ProfileOptions& opt) {
  TiltProfile p;
  p.delta = opt.delta.value_or(default_delta(xbar));
  p.tilt_radius = opt.tilt_radius;
  p.seed = opt.seed;
  if (opt.num_tilts <= 0) return p;
  Rng rng(opt.seed);
  std::vector<Vec> tilts{Vec::Zero(inst.d)};
  while (static_cast<int>(tilts.size()) < opt.num_tilts) {
    const Vec u = opt.tilt_radius * uniform(rng, 0.5, 1.0) * random_unit(rng, inst.d);
    tilts.push_back(u);
    if (static_cast<int>(tilts.size()) < opt.num_tilts) tilts.push_back(-u);
  }
  auto run = [&](const Vec& v, double scale, std::uint64_t index) {
    TiltSolveOptions so = opt.solve;
    so.seed = derive_seed(opt.seed, index);
    TiltSample s{v, scale, solve_tilted(inst, xbar, v, p.delta, so)};
    if (s.sol.status == SimStatus::IterationLimit) ++p.flagged;
    p.multiplicity_gap_max = std::max(p.multiplicity_gap_max, s.sol.diameter);
    p.samples.push_back(std::move(s));
  };
  for (size_t i = 0; i < tilts.size(); ++i) run(tilts[i], 1.0, i);
  if (opt.decade && tilts.size() > 1)
    for (size_t i = 1; i < tilts.size(); ++i) run(Vec(0.1 * tilts[i]), 0.1, 1000 + i);

  std::vector<const TiltSample*> main, dec{&p.samples.front()};
  for (const TiltSample& s : p.samples) (s.scale == 1.0 ? main : dec).push_back(&s);
  p.lip_ratio_max = lip_over(main, 0.1 * opt.tilt_radius);
  if (dec.size() > 1) p.lip_ratio_max_decade = lip_over(dec, 0.01 * opt.tilt_radius);

  std::vector<std::pair<const TiltSample*, const TiltSample*>> pairs;
  for (size_t i = 0; i < main.size(); ++i)
    for (size_t j = i + 1; j < main.size(); ++j)
      if ((main[i]->v - main[j]->v).norm() >= 0.1 * opt.tilt_radius) pairs.push_back({main[i], main[j]});
  Rng pick(derive_seed(opt.seed, 2000));
  size_t npairs = std::min(pairs.size(), static_cast<size_t>(std::max(opt.refine_pairs, 0)));
  if (p.multiplicity_gap_max >= opt.refine_skip_gap) npairs = 0;
  for (size_t k = 0; k < npairs; ++k) {
    std::swap(pairs[k], pairs[k + std::uniform_int_distribution<size_t>(0, pairs.size() - k - 1)(pick)]);
    Vec va = pairs[k].first->v, vb = pairs[k].second->v;
    Vec xa = pairs[k].first->sol.best, xb = pairs[k].second->sol.best;
    double ratio = (xa - xb).norm() / (va - vb).norm();
    double best = ratio;
    int stalled = 0;
    for (int step = 0; step < opt.refine_steps && stalled < opt.refine_patience; ++step) {
      TiltSolveOptions so = opt.solve;
      so.seed = derive_seed(opt.seed, 3000 + 100 * k + step);
      const Vec vm = 0.5 * (va + vb);
      const TiltSolution sm = solve_tilted(inst, xbar, vm, p.delta, so);
      ++p.refine_solves;
      if (sm.status == SimStatus::IterationLimit) ++p.flagged;
      p.multiplicity_gap_max = std::max(p.multiplicity_gap_max, sm.diameter);
      const double half = 0.5 * (va - vb).norm();
      const double ra = (xa - sm.best).norm() / half, rb = (xb - sm.best).norm() / half;
      if (ra >= rb) {
        vb = vm;
        xb = sm.best;
      } else {
        va = vm;
        xa = sm.best;
      }
      const double next = std::max(ra, rb);
      stalled = next < 1.25 * ratio ? stalled + 1 : 0;
      ratio = next;
      best = std::max(best, ratio);
    }
    p.lip_ratio_refined = std::max(p.lip_ratio_refined.value_or(0.0), best);
  }
  return p;
}

OracleVerdict oracle_verdict(const TiltProfile& p, const OracleThresholds& th) {
  if (p.samples.empty()) return OracleVerdict::Inconclusive;
  const double gap = p.multiplicity_gap_max;
  const bool refined_jump = p.lip_ratio_refined && *p.lip_ratio_refined > th.lip_cap;
  const bool stable = gap <= th.gap_tol && p.lip_ratio_max && *p.lip_ratio_max <= th.lip_cap && !refined_jump;
  const bool diverging = refined_jump || (p.lip_ratio_max && p.lip_ratio_max_decade &&
                                          *p.lip_ratio_max_decade >= th.decade_factor * *p.lip_ratio_max);
  const bool unstable = gap >= th.jump_tol || diverging;
  if (stable && !unstable) return OracleVerdict::StableLikely;
  if (unstable && !stable) return OracleVerdict::UnstableLikely;
  return OracleVerdict::Inconclusive;
}

std::string profile_csv(const TiltProfile& p) {
  auto join = [](const Vec& v) {
    std::ostringstream os;
    os << std::setprecision(17);
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? " " : "") << v(i);
    return os.str();
  };
  std::ostringstream os;
  os << std::setprecision(17);
  os << "index,scale,norm_v,v,best_x,best_value,diameter,clusters,feas_residual,status\n";
  for (size_t i = 0; i < p.samples.size(); ++i) {
    const TiltSample& s = p.samples[i];
    os << i << ',' << s.scale << ',' << s.v.norm() << ",\"" << join(s.v) << "\",\"" << join(s.sol.best) << "\","
       << s.sol.best_value << ',' << s.sol.diameter << ',' << s.sol.clusters.size() << ','
       << s.sol.feas_residual << ',' << sim_status_name(s.sol.status) << '\n';
  }
  return os.str();
}

}  // namespace tiltcert
