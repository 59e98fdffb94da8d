#include "pslab/report.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include "pslab/errors.hpp"
#include "pslab/svg.hpp"

namespace pslab {

using nlohmann::json;

bool VerificationReport::all_passed() const {
  for (const auto& s : suites)
    if (!s.passed) return false;
  return true;
}

json VerificationReport::to_json() const {
  json j;
  j["schema_version"] = 1;
  j["artifact_version"] = kArtifactVersion;
  j["scenario"] = scenario_echo;
  json arr = json::array();
  json wall = json::object();
  std::size_t passed = 0;
  for (const auto& s : suites) {
    json e;
    e["name"] = s.name;
    e["status"] = s.passed ? "pass" : "fail";
    e["defects"] = {{"max", s.max_defect}, {"mean", s.mean_defect}};
    e["samples"] = s.samples;
    e["seed"] = s.seed;
    e["tolerances"] = s.tolerances;
    if (!s.witness.is_null()) e["witness"] = s.witness;
    if (!s.series.empty()) e["series"] = s.series;
    if (!s.notes.empty()) e["notes"] = s.notes;
    arr.push_back(e);
    wall[s.name] = s.wall_ms;
    if (s.passed) ++passed;
  }
  j["suites"] = arr;
  j["summary"] = {{"suites_total", suites.size()},
                  {"suites_passed", passed},
                  {"suites_failed", suites.size() - passed},
                  {"all_passed", all_passed()}};
  j["volatile"] = {{"generated_at_utc", generated_at_utc}, {"wall_time_ms", wall}};
  return j;
}

std::string VerificationReport::stable_payload() const {
  json j = to_json();
  j.erase("volatile");
  return j.dump(2);
}

std::vector<std::string> VerificationReport::write_files(const std::string& out_dir,
                                                         bool with_plots) const {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> written;

  const std::string name = scenario_echo.value("name", "scenario");
  const fs::path report_path = fs::path(out_dir) / (name + "-report.json");
  {
    std::ofstream out(report_path);
    if (!out) throw InvalidArgument("cannot write report to " + report_path.string());
    out << to_json().dump(2) << "\n";
  }
  written.push_back(report_path.string());

  if (!with_plots) return written;
  for (const auto& s : suites) {
    if (s.series.empty()) continue;
    std::string svg;
    std::string kind;
    if (s.series.contains("stabilization")) {
      svg = render_stabilization_svg(s.series.at("stabilization"));
      kind = "stabilization";
    } else if (s.series.contains("essentiality")) {
      svg = render_essentiality_svg(s.series.at("essentiality"));
      kind = "essentiality";
    } else if (s.series.contains("partition")) {
      svg = render_partition_svg(s.series.at("partition"));
      kind = "partition";
    } else {
      continue;
    }
    const fs::path p = fs::path(out_dir) / (name + "-" + kind + ".svg");
    std::ofstream out(p);
    if (!out) throw InvalidArgument("cannot write plot to " + p.string());
    out << svg;
    written.push_back(p.string());
  }
  return written;
}

}  // namespace pslab
