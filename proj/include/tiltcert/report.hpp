#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "tiltcert/errors.hpp"
#include "tiltcert/tiltcheck.hpp"
#include "tiltcert/tiltsim.hpp"

namespace tiltcert {

inline constexpr const char* kToolVersion = "0.1.0";

/// Point diagnostics plus what can be said about the multipliers without deciding stability.
struct AnalysisReport {
  std::string instance;
  PointReport point;
  bool stationary = false;
  std::string stationarity_note;
  SpectralPair pair;  // classify(g(x), S*) when stationary, classify_point otherwise
  std::optional<Multiplier> sample;
  Uniqueness uniqueness = Uniqueness::Inconclusive;
  std::optional<MinRankResult> min_rank;
  CertifyPolicy policy;
};

AnalysisReport analyze_point(const NsdpInstance& inst, const Vec& x, const CertifyPolicy& policy = {});

enum class Agreement { Agree, Disagree, NotComparable };
const char* agreement_name(Agreement a);
Agreement agreement(FinalClass certificate, OracleVerdict oracle);

nlohmann::json to_json(const AnalysisReport& r);
nlohmann::json to_json(const StabilityReport& r);
nlohmann::json to_json(const TiltProfile& p, OracleVerdict verdict);
nlohmann::json merged_json(const StabilityReport& r, const TiltProfile& p, OracleVerdict verdict);
nlohmann::json error_json(ErrorCode code, const std::string& message);

std::string to_text(const AnalysisReport& r);
std::string to_text(const StabilityReport& r);
std::string to_text(const TiltProfile& p, OracleVerdict verdict);

}  // namespace tiltcert
