#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tiltcert/report.hpp"

using namespace tiltcert;
using nlohmann::json;

namespace {

struct RunConfig {
  std::string command;
  std::string input;
  std::string point = "auto";  // auto, solve, or a JSON file
  std::uint64_t seed = 7;
  double tol_feas = 1e-8;
  double tol_witness = 1e-5;
  int frames = 64;
  int restarts = 64;
  int tilts = 32;
  double delta = 0.0;  // 0: default radius
  double tilt_radius = 1e-3;
  std::string format = "text";
  std::string csv;
  bool strict = false;
  bool deterministic = false;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void strip_timestamps(json& j) {
  if (j.is_object()) {
    j.erase("generated_at");
    for (auto& [k, v] : j.items()) strip_timestamps(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_timestamps(v);
  }
}

void emit(const RunConfig& cfg, json j) {
  if (cfg.deterministic) strip_timestamps(j);
  std::cout << j.dump(2) << '\n';
}

Vec choose_point(const RunConfig& cfg, const NsdpInstance& inst) {
  if (cfg.point == "solve" || (cfg.point == "auto" && !inst.point)) return minimize_objective(inst);
  if (cfg.point == "auto") return *inst.point;
  return parse_point(inst, slurp(cfg.point));
}

CertifyPolicy policy_of(const RunConfig& cfg) {
  CertifyPolicy p;
  p.seed = cfg.seed;
  p.frames = cfg.frames;
  p.restarts = cfg.restarts;
  p.feas_tol = cfg.tol_feas;
  p.witness_tol = cfg.tol_witness;
  return p;
}

ProfileOptions profile_options(const RunConfig& cfg) {
  ProfileOptions o;
  if (cfg.delta > 0.0) o.delta = cfg.delta;
  o.tilt_radius = cfg.tilt_radius;
  o.num_tilts = cfg.tilts;
  o.seed = cfg.seed;
  o.solve.feas_tol = cfg.tol_feas;
  return o;
}

void require_stationary(const NsdpInstance& inst, const Vec& x, double tol) {
  const MultiplierSet ms = multiplier_set(multiplier_system(inst, x, std::nullopt, tol), tol);
  if (!ms.nonempty) throw Error(ErrorCode::NotStationary, "the point is not stationary: " + ms.outcome.note);
}

void write_csv(const RunConfig& cfg, const TiltProfile& p) {
  if (cfg.csv.empty()) return;
  std::ofstream out(cfg.csv);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + cfg.csv);
  out << profile_csv(p);
}

int run(const RunConfig& cfg) {
  const NsdpInstance inst = load_instance(cfg.input);
  const Vec x = choose_point(cfg, inst);
  const bool as_json = cfg.format == "json";
  int code = 0;
  if (cfg.command == "analyze") {
    const AnalysisReport r = analyze_point(inst, x, policy_of(cfg));
    if (as_json) emit(cfg, to_json(r));
    else std::cout << to_text(r);
  } else if (cfg.command == "certify") {
    const StabilityReport r = certify(inst, x, policy_of(cfg));
    if (as_json) emit(cfg, to_json(r));
    else std::cout << to_text(r);
    if (cfg.strict && r.final_class == FinalClass::Undetermined) code = 2;
  } else if (cfg.command == "simulate") {
    require_stationary(inst, x, cfg.tol_feas);
    const TiltProfile p = empirical_profile(inst, x, profile_options(cfg));
    const OracleVerdict v = oracle_verdict(p);
    write_csv(cfg, p);
    if (as_json) {
      emit(cfg, to_json(p, v));
    } else {
      std::cout << profile_csv(p);
      std::istringstream summary(to_text(p, v));
      for (std::string line; std::getline(summary, line);) std::cout << "# " << line << '\n';
    }
  } else {
    const StabilityReport r = certify(inst, x, policy_of(cfg));
    const TiltProfile p = empirical_profile(inst, x, profile_options(cfg));
    const OracleVerdict v = oracle_verdict(p);
    write_csv(cfg, p);
    if (as_json) {
      emit(cfg, merged_json(r, p, v));
    } else {
      std::cout << to_text(r) << to_text(p, v) << "agreement: " << agreement_name(agreement(r.final_class, v)) << '\n';
    }
    if (cfg.strict && r.final_class == FinalClass::Undetermined) code = 2;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  if (const char* env = std::getenv("TILTCERT_SEED")) {
    try {
      cfg.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "error: InvalidArgument: TILTCERT_SEED is not an unsigned integer\n";
      return 1;
    }
  }
  CLI::App app{"Tilt-stability certificates for nonlinear semidefinite programs"};
  app.add_option("command", cfg.command, "analyze, certify, simulate or report")
      ->required()
      ->check(CLI::IsMember({"analyze", "certify", "simulate", "report"}));
  app.add_option("--input,input", cfg.input, "instance file (.json or SDPA .dat-s)")->required();
  app.add_option("--point", cfg.point, "point file, 'solve', or 'auto' (embedded point, else solve)");
  app.add_option("--seed", cfg.seed, "seed for every randomized search (env TILTCERT_SEED)");
  app.add_option("--tol-feas", cfg.tol_feas)->check(CLI::PositiveNumber);
  app.add_option("--tol-witness", cfg.tol_witness)->check(CLI::PositiveNumber);
  app.add_option("--frames", cfg.frames)->check(CLI::PositiveNumber);
  app.add_option("--restarts", cfg.restarts)->check(CLI::PositiveNumber);
  app.add_option("--tilts", cfg.tilts)->check(CLI::PositiveNumber);
  app.add_option("--delta", cfg.delta, "ball radius (default 0.5(1 + |x|))")->check(CLI::PositiveNumber);
  app.add_option("--tilt-radius", cfg.tilt_radius)->check(CLI::PositiveNumber);
  app.add_option("--format", cfg.format)->check(CLI::IsMember({"text", "json"}));
  app.add_option("--csv", cfg.csv, "also write the tilt profile as CSV");
  app.add_flag("--strict", cfg.strict, "exit with 2 on UNDETERMINED");
  app.add_flag("--deterministic", cfg.deterministic, "omit timestamps");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  try {
    return run(cfg);
  } catch (const Error& e) {
    if (cfg.format == "json") emit(cfg, error_json(e.code(), e.what()));
    else std::cerr << "error: " << error_code_name(e.code()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    if (cfg.format == "json") emit(cfg, error_json(ErrorCode::NumericalFailure, e.what()));
    else std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
