#include "tiltcert/report.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace tiltcert {

using nlohmann::json;

const char* agreement_name(Agreement a) {
  switch (a) {
    case Agreement::Agree: return "agree";
    case Agreement::Disagree: return "disagree";
    case Agreement::NotComparable: return "not_comparable";
  }
  return "?";
}

Agreement agreement(FinalClass certificate, OracleVerdict oracle) {
  if (certificate == FinalClass::Undetermined || oracle == OracleVerdict::Inconclusive) return Agreement::NotComparable;
  const bool stable = certificate == FinalClass::TiltStableCertified;
  return stable == (oracle == OracleVerdict::StableLikely) ? Agreement::Agree : Agreement::Disagree;
}

AnalysisReport analyze_point(const NsdpInstance& inst, const Vec& x, const CertifyPolicy& policy) {
  AnalysisReport r;
  r.instance = inst.name;
  r.policy = policy;
  r.point = evaluate(inst, x);
  const MultiplierSystem sys = multiplier_system(inst, x, std::nullopt, policy.feas_tol);
  const MultiplierSet ms = multiplier_set(sys, policy.feas_tol);
  r.stationary = ms.nonempty;
  r.stationarity_note = ms.outcome.note;
  if (!r.stationary) {
    r.pair = classify_point(r.point.Xval);
    return r;
  }
  r.sample = ms.sample;
  const UniquenessResult u = multiplier_S_unique(sys, policy.probes, policy.seed);
  r.uniqueness = u.status;
  if (u.status == Uniqueness::UniqueS) {
    r.sample = *u.S_star;
  } else {
    r.min_rank = min_rank_multiplier(sys, sys.k() <= 6 ? RankMode::Exact : RankMode::TraceHeuristic);
  }
  r.pair = classify(r.point.Xval, r.min_rank ? r.min_rank->mult.S : r.sample->S);
  return r;
}

namespace {

json number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "+inf" : (v < 0 ? "-inf" : "nan");
}

json vec(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

json mat(const Mat& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vec(Vec(m.row(i).transpose())));
  return out;
}

json opt_vec(const std::optional<Vec>& v) { return v ? vec(*v) : json(nullptr); }

json opt_num(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

json ints(const std::vector<int>& v) { return json(v); }

json partition_json(const IndexPartition& p) {
  return {{"alpha", ints(p.alpha)}, {"beta", ints(p.beta)}, {"gamma", ints(p.gamma)}};
}

json point_json(const PointReport& p) {
  return {{"x", vec(p.x)},
          {"g_value", mat(p.Xval.mat())},
          {"eq_residual", number(p.eq_residual)},
          {"psd_residual", number(p.psd_residual)},
          {"objective", number(p.objective)},
          {"grad", vec(p.grad)},
          {"vstar", vec(p.vstar)}};
}

json multiplier_json(const Multiplier& m) { return {{"y", vec(m.y)}, {"S", mat(m.S.mat())}, {"rank", m.rank}}; }

json min_rank_json(const MinRankResult& m) {
  return {{"rank", m.mult.rank},
          {"mode", m.mode == RankMode::Exact ? "exact" : "trace_heuristic"},
          {"proven_minimal", m.proven_minimal},
          {"patterns_tested", m.patterns_tested},
          {"detail", m.report},
          {"multiplier", multiplier_json(m.mult)}};
}

json policy_json(const CertifyPolicy& p) {
  return {{"seed", p.seed},          {"frames", p.frames},           {"restarts", p.restarts},
          {"probes", p.probes},      {"feas_tol", number(p.feas_tol)}, {"witness_tol", number(p.witness_tol)}};
}

json regularity_json(const RegularityReport& r) {
  return {{"slater", r.slater},
          {"slater_point", opt_vec(r.slater_point)},
          {"slater_margin", number(r.slater_margin)},
          {"imply1_max", number(r.imply1_max)},
          {"imply1_witness", opt_vec(r.imply1_witness)},
          {"metrically_regular", tri_name(r.metrically_regular)},
          {"m_locally_bounded", tri_name(r.m_locally_bounded)},
          {"condition_A", tri_name(r.condition_A)},
          {"condition_B", tri_name(r.condition_B)},
          {"Kstar_in_range", tri_name(r.Kstar_in_range)},
          {"B_injective", tri_name(r.B_injective)}};
}

void stamp(json& j) {
  j["tool_version"] = kToolVersion;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::ostringstream os;
  os << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
  j["generated_at"] = os.str();
}

std::string fmt_vec(const Vec& v) {
  std::ostringstream os;
  os << std::setprecision(6) << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << ']';
  return os.str();
}

std::string fmt_idx(const std::vector<int>& v) {
  std::ostringstream os;
  os << '{';
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << '}';
  return os.str();
}

}  // namespace

json to_json(const AnalysisReport& r) {
  json j;
  j["kind"] = "analyze";
  stamp(j);
  j["instance"] = r.instance;
  j["point"] = point_json(r.point);
  j["stationary"] = r.stationary;
  j["stationarity_note"] = r.stationarity_note;
  j["partition"] = partition_json(r.pair.partition);
  j["x_eigenvalues"] = vec(r.pair.x_eigvals);
  j["multiplier"] = r.sample ? multiplier_json(*r.sample) : json(nullptr);
  j["uniqueness"] = r.stationary ? uniqueness_name(r.uniqueness) : json(nullptr);
  j["min_rank"] = r.min_rank ? min_rank_json(*r.min_rank) : json(nullptr);
  j["policy"] = policy_json(r.policy);
  return j;
}

json to_json(const StabilityReport& r) {
  json j;
  j["kind"] = "certify";
  stamp(j);
  j["instance"] = r.instance;
  j["point"] = point_json(r.point);
  j["multiplier"] = {{"y", vec(r.y_star)}, {"S", mat(r.S_star.mat())}};
  j["partition"] = partition_json(r.partition);
  j["uniqueness"] = uniqueness_name(r.uniqueness);
  j["min_rank"] = min_rank_json(r.min_rank);
  j["regularity"] = regularity_json(r.regularity);
  json hyps = json::array();
  for (const Hypothesis& h : r.hypotheses) hyps.push_back({{"id", h.id}, {"status", tri_name(h.status)}, {"detail", h.detail}});
  j["hypotheses"] = hyps;
  json vs = json::array();
  for (const Verdict& v : r.verdicts)
    vs.push_back({{"condition", v.condition_id},
                  {"status", tri_name(v.status)},
                  {"exact", v.exact},
                  {"frames_searched", v.frames_searched},
                  {"residual", number(v.residual)},
                  {"witness", opt_vec(v.witness)},
                  {"notes", v.notes}});
  j["verdicts"] = vs;
  j["final"] = final_name(r.final_class);
  j["iff"] = r.iff;
  j["deciding_condition"] = r.deciding_condition;
  j["blocking"] = r.blocking;
  j["witness"] = opt_vec(r.witness);
  j["witness_revalidation"] = r.witness ? number(r.witness_revalidation) : json(nullptr);
  j["policy"] = policy_json(r.policy);
  return j;
}

json to_json(const TiltProfile& p, OracleVerdict verdict) {
  json j;
  j["kind"] = "simulate";
  stamp(j);
  j["delta"] = number(p.delta);
  j["tilt_radius"] = number(p.tilt_radius);
  j["seed"] = p.seed;
  j["lip_ratio_max"] = opt_num(p.lip_ratio_max);
  j["lip_ratio_max_decade"] = opt_num(p.lip_ratio_max_decade);
  j["lip_ratio_refined"] = opt_num(p.lip_ratio_refined);
  j["refine_solves"] = p.refine_solves;
  j["multiplicity_gap_max"] = number(p.multiplicity_gap_max);
  j["flagged"] = p.flagged;
  j["oracle"] = oracle_name(verdict);
  json ss = json::array();
  for (const TiltSample& s : p.samples)
    ss.push_back({{"scale", number(s.scale)},
                  {"v", vec(s.v)},
                  {"best_x", vec(s.sol.best)},
                  {"best_value", number(s.sol.best_value)},
                  {"diameter", number(s.sol.diameter)},
                  {"clusters", s.sol.clusters.size()},
                  {"feas_residual", number(s.sol.feas_residual)},
                  {"status", sim_status_name(s.sol.status)}});
  j["samples"] = ss;
  return j;
}

json merged_json(const StabilityReport& r, const TiltProfile& p, OracleVerdict verdict) {
  json j;
  j["kind"] = "report";
  stamp(j);
  j["certify"] = to_json(r);
  j["simulate"] = to_json(p, verdict);
  j["agreement"] = agreement_name(agreement(r.final_class, verdict));
  return j;
}

json error_json(ErrorCode code, const std::string& message) {
  json j;
  j["kind"] = "error";
  stamp(j);
  j["error"] = {{"code", error_code_name(code)}, {"message", message}};
  return j;
}

std::string to_text(const AnalysisReport& r) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "instance: " << r.instance << '\n';
  os << "x: " << fmt_vec(r.point.x) << '\n';
  os << "objective: " << r.point.objective << '\n';
  os << "eq_residual: " << r.point.eq_residual << "  psd_residual: " << r.point.psd_residual << '\n';
  os << "g(x) eigenvalues: " << fmt_vec(r.pair.x_eigvals) << '\n';
  os << "stationary: " << (r.stationary ? "yes" : "no");
  if (!r.stationarity_note.empty()) os << " (" << r.stationarity_note << ')';
  os << '\n';
  os << "partition: alpha=" << fmt_idx(r.pair.partition.alpha) << " beta=" << fmt_idx(r.pair.partition.beta)
     << " gamma=" << fmt_idx(r.pair.partition.gamma) << '\n';
  if (r.sample) {
    os << "multiplier y: " << fmt_vec(r.sample->y) << '\n';
    os << "multiplier S: " << fmt_vec(svec(r.sample->S)) << " (svec), rank " << r.sample->rank << '\n';
    os << "uniqueness: " << uniqueness_name(r.uniqueness) << '\n';
  }
  if (r.min_rank)
    os << "min_rank: " << r.min_rank->mult.rank << (r.min_rank->proven_minimal ? " (proven)" : " (not proven)") << '\n';
  return os.str();
}

std::string to_text(const StabilityReport& r) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "instance: " << r.instance << '\n';
  os << "x: " << fmt_vec(r.x) << '\n';
  os << "multiplier y: " << fmt_vec(r.y_star) << "  S (svec): " << fmt_vec(svec(r.S_star)) << '\n';
  os << "partition: alpha=" << fmt_idx(r.partition.alpha) << " beta=" << fmt_idx(r.partition.beta)
     << " gamma=" << fmt_idx(r.partition.gamma) << '\n';
  os << "uniqueness: " << uniqueness_name(r.uniqueness) << '\n';
  os << "hypotheses:\n";
  for (const Hypothesis& h : r.hypotheses) {
    os << "  " << h.id << ": " << tri_name(h.status);
    if (!h.detail.empty()) os << " (" << h.detail << ')';
    os << '\n';
  }
  os << "verdicts:\n";
  for (const Verdict& v : r.verdicts) {
    os << "  " << v.condition_id << ": " << tri_name(v.status);
    if (v.exact) os << " [exact]";
    if (v.witness) os << " witness " << fmt_vec(*v.witness);
    if (!v.notes.empty()) os << " (" << v.notes << ')';
    os << '\n';
  }
  os << "final: " << final_name(r.final_class) << '\n';
  os << "iff: " << (r.iff ? "true" : "false") << '\n';
  if (!r.deciding_condition.empty()) os << "deciding_condition: " << r.deciding_condition << '\n';
  if (!r.blocking.empty()) os << "blocking: " << r.blocking << '\n';
  if (r.witness) os << "witness: " << fmt_vec(*r.witness) << "  revalidation residual: " << r.witness_revalidation << '\n';
  os << "seed: " << r.policy.seed << '\n';
  return os.str();
}

std::string to_text(const TiltProfile& p, OracleVerdict verdict) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "delta: " << p.delta << "  tilt_radius: " << p.tilt_radius << "  seed: " << p.seed << '\n';
  os << "samples: " << p.samples.size() << "  flagged: " << p.flagged << '\n';
  os << "multiplicity_gap_max: " << p.multiplicity_gap_max << '\n';
  os << "lip_ratio_max: " << (p.lip_ratio_max ? std::to_string(*p.lip_ratio_max) : "NotApplicable") << '\n';
  os << "lip_ratio_max_decade: "
     << (p.lip_ratio_max_decade ? std::to_string(*p.lip_ratio_max_decade) : "NotApplicable") << '\n';
  os << "lip_ratio_refined: "
     << (p.lip_ratio_refined ? std::to_string(*p.lip_ratio_refined) : "NotApplicable") << '\n';
  os << "oracle: " << oracle_name(verdict) << '\n';
  return os.str();
}

}  // namespace tiltcert
