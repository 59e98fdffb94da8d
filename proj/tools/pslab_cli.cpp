// Command-line front end. Deliberately a pure consumer of the C API so the
// shared library surface stays exercised end to end.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pslab.h"

namespace {

int run_command(const std::string& scenario_path, const std::string& out_dir, bool plots,
                bool have_seed, unsigned long long seed,
                const std::vector<std::string>& suites) {
  pslab_scenario* sc = nullptr;
  if (pslab_scenario_load_file(scenario_path.c_str(), &sc) != PSLAB_OK) {
    std::fprintf(stderr, "error: %s\n", pslab_last_error());
    return 2;
  }
  if (have_seed && pslab_scenario_set_seed(sc, seed) != PSLAB_OK) {
    std::fprintf(stderr, "error: %s\n", pslab_last_error());
    pslab_scenario_free(sc);
    return 2;
  }
  if (!suites.empty()) {
    std::vector<const char*> names;
    names.reserve(suites.size());
    for (const auto& s : suites) names.push_back(s.c_str());
    if (pslab_scenario_select_suites(sc, names.data(), names.size()) != PSLAB_OK) {
      std::fprintf(stderr, "error: %s\n", pslab_last_error());
      pslab_scenario_free(sc);
      return 2;
    }
  }

  pslab_report* rep = nullptr;
  if (pslab_run(sc, &rep) != PSLAB_OK) {
    std::fprintf(stderr, "error: %s\n", pslab_last_error());
    pslab_scenario_free(sc);
    return 2;
  }

  const size_t n = pslab_report_suite_count(rep);
  for (size_t i = 0; i < n; ++i) {
    std::printf("[%s] %-22s max defect %.3e\n",
                pslab_report_suite_passed(rep, i) ? "PASS" : "FAIL",
                pslab_report_suite_name(rep, i), pslab_report_suite_max_defect(rep, i));
  }
  const int passed = pslab_report_passed(rep);
  std::printf("%s: %s\n", pslab_scenario_name(sc), passed ? "all suites passed" : "FAILURES");

  if (pslab_report_write(rep, out_dir.c_str(), plots ? 1 : 0) != PSLAB_OK) {
    std::fprintf(stderr, "error: %s\n", pslab_last_error());
    pslab_report_free(rep);
    pslab_scenario_free(sc);
    return 2;
  }

  pslab_report_free(rep);
  pslab_scenario_free(sc);
  return passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scenario-driven verification harness for product systems over convex cones"};
  app.set_version_flag("--version", std::string(pslab_version()));

  std::string scenario_path;
  std::string out_dir;
  bool plots = false;
  unsigned long long seed = 0;
  bool have_seed = false;
  std::vector<std::string> suites;

  const char* env_out = std::getenv("PSLAB_OUT_DIR");
  out_dir = env_out ? env_out : ".";

  auto* run = app.add_subcommand("run", "Run a scenario file and write its report");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--out", out_dir, "Output directory (default $PSLAB_OUT_DIR or .)");
  run->add_flag("--plots", plots, "Also render SVG plots");
  run->add_option("--seed", seed, "Override the scenario seed")
      ->check(CLI::NonNegativeNumber)
      ->each([&](const std::string&) { have_seed = true; });
  run->add_option("--suite", suites, "Run only the named suites (repeatable)");

  app.require_subcommand(1);
  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return run_command(scenario_path, out_dir, plots, have_seed, seed, suites);
  return 2;
}
