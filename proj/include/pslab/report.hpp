#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace pslab {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct SuiteResult {
  std::string name;
  bool passed = false;
  double max_defect = 0.0;
  double mean_defect = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  nlohmann::json tolerances = nlohmann::json::object();
  nlohmann::json witness;                   // failure witness, null when passing
  nlohmann::json series = nlohmann::json::object();  // plot data
  std::vector<std::string> notes;
  double wall_ms = 0.0;  // volatile, excluded from the stable payload
};

struct VerificationReport {
  nlohmann::json scenario_echo;
  std::vector<SuiteResult> suites;
  std::string generated_at_utc;  // volatile

  bool all_passed() const;
  // Full report including the volatile header.
  nlohmann::json to_json() const;
  // Deterministic payload: the report with the volatile header removed.
  // Byte-identical across runs with the same scenario and seed.
  std::string stable_payload() const;

  // Writes report.json (and SVG plots when with_plots) under out_dir; returns
  // the list of written file paths.
  std::vector<std::string> write_files(const std::string& out_dir, bool with_plots) const;
};

}  // namespace pslab
