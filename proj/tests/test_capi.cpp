// Exercises the shared-library surface exactly as an external consumer
// would: only pslab.h, opaque handles and status codes.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "pslab.h"

namespace {

const char* kMiniScenario = R"json({
  "schema_version": 1,
  "name": "capi-mini",
  "seed": 7,
  "cone": { "variant": "orthant", "dimension": 2 },
  "a": [1.0, 1.0],
  "grid": { "spacing": 0.5, "box_lo": [0.0, 0.0], "box_hi": [6.0, 6.0],
            "k_max": 3, "margin_levels": 1 },
  "model": { "variant": "trivial", "multiplier": [[0.0, 1.0], [0.0, 0.0]] },
  "samples": { "measure": 20000, "sections": 6, "shift_bs": 5, "chi_bs": 3,
               "representation": 8 }
})json";

}  // namespace

TEST_CASE("version and error slots") {
  CHECK(std::strlen(pslab_version()) >= 5);
  CHECK(std::string(pslab_last_error()).empty());
}

TEST_CASE("argument and file errors") {
  pslab_scenario* sc = nullptr;
  CHECK(pslab_scenario_load_file(nullptr, &sc) == PSLAB_ERR_ARGUMENT);
  CHECK(pslab_scenario_load_file("/no/such/file.json", &sc) == PSLAB_ERR_IO);
  CHECK(std::string(pslab_last_error()).find("cannot open") != std::string::npos);
  CHECK(sc == nullptr);

  CHECK(pslab_scenario_load_string("{ not json", &sc) == PSLAB_ERR_PARSE);
  CHECK(sc == nullptr);

  // Well-formed JSON, invalid content: a misaligned a.
  const char* bad = R"({"cone":{"variant":"orthant","dimension":2},
                        "a":[1.0,0.3],
                        "grid":{"spacing":0.5,"box_lo":[0,0],"box_hi":[6,6]}})";
  CHECK(pslab_scenario_load_string(bad, &sc) == PSLAB_ERR_VALIDATION);
  CHECK(std::string(pslab_last_error()).find("coordinate 1") != std::string::npos);
}

TEST_CASE("run a scenario through the shared library") {
  pslab_scenario* sc = nullptr;
  REQUIRE(pslab_scenario_load_string(kMiniScenario, &sc) == PSLAB_OK);
  REQUIRE(sc != nullptr);
  CHECK(std::string(pslab_scenario_name(sc)) == "capi-mini");
  CHECK(pslab_scenario_set_seed(sc, 42) == PSLAB_OK);

  const char* subset[] = {"validate-cone", "partition", "chi-check", "measure-check",
                          "sections-check"};
  REQUIRE(pslab_scenario_select_suites(sc, subset, 5) == PSLAB_OK);
  const char* nope[] = {"not-a-suite"};
  CHECK(pslab_scenario_select_suites(sc, nope, 1) == PSLAB_ERR_VALIDATION);

  pslab_report* rep = nullptr;
  REQUIRE(pslab_run(sc, &rep) == PSLAB_OK);
  REQUIRE(rep != nullptr);
  CHECK(pslab_report_suite_count(rep) == 5);
  CHECK(std::string(pslab_report_suite_name(rep, 0)) == "validate-cone");
  for (size_t i = 0; i < 5; ++i) {
    CHECK(pslab_report_suite_passed(rep, i) == 1);
    CHECK(pslab_report_suite_max_defect(rep, i) >= 0.0);
  }
  CHECK(pslab_report_passed(rep) == 1);
  CHECK(std::string(pslab_report_json(rep)).find("\"suites\"") != std::string::npos);

  // Determinism: a second run yields a byte-identical stable payload.
  pslab_report* rep2 = nullptr;
  REQUIRE(pslab_run(sc, &rep2) == PSLAB_OK);
  CHECK(std::string(pslab_report_stable_payload(rep)) ==
        std::string(pslab_report_stable_payload(rep2)));

  // Reports can be persisted.
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "pslab-capi-out";
  fs::remove_all(dir);
  REQUIRE(pslab_report_write(rep, dir.string().c_str(), 1) == PSLAB_OK);
  CHECK(fs::exists(dir / "capi-mini-report.json"));

  pslab_report_free(rep);
  pslab_report_free(rep2);
  pslab_scenario_free(sc);
  fs::remove_all(dir);
}

TEST_CASE("loading from a file") {
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "pslab-capi-scenario.json";
  {
    std::ofstream out(path);
    out << kMiniScenario;
  }
  pslab_scenario* sc = nullptr;
  REQUIRE(pslab_scenario_load_file(path.string().c_str(), &sc) == PSLAB_OK);
  CHECK(std::string(pslab_scenario_name(sc)) == "capi-mini");
  pslab_scenario_free(sc);
  fs::remove(path);
}
