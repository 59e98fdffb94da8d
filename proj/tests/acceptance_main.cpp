// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Each criterion runs against the bundled scenarios (or dedicated larger
// grids where a point-count floor applies) at the pinned tolerances.

#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pslab/report.hpp"
#include "pslab/scenario.hpp"
#include "pslab/suites.hpp"

using namespace pslab;
using nlohmann::json;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& label, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion, label.c_str(),
              detail.c_str());
  if (!ok) ++g_failures;
}

std::string scenario_path(const std::string& name) {
  return std::string(PSLAB_SCENARIO_DIR) + "/" + name + ".json";
}

const SuiteResult* find_suite(const VerificationReport& rep, const std::string& name) {
  for (const auto& s : rep.suites)
    if (s.name == name) return &s;
  return nullptr;
}

json partition_config(const std::string& variant, int dim, double spacing,
                      const std::vector<double>& lo, const std::vector<double>& hi) {
  json j;
  j["schema_version"] = 1;
  j["name"] = "partition-" + variant + std::to_string(dim);
  j["seed"] = 42;
  j["cone"] = {{"variant", variant}, {"dimension", dim}};
  std::vector<double> a(static_cast<std::size_t>(dim), 1.0);
  if (variant == "lorentz")
    for (int i = 0; i + 1 < dim; ++i) a[static_cast<std::size_t>(i)] = 0.0;
  j["a"] = a;
  j["grid"] = {{"spacing", spacing}, {"box_lo", lo}, {"box_hi", hi}, {"k_max", 3},
               {"margin_levels", 1}};
  j["suites"] = {"partition"};
  return j;
}

struct ScenarioRun {
  Scenario scenario;
  VerificationReport report;
};

ScenarioRun run_bundled(const std::string& name) {
  Scenario sc = Scenario::from_file(scenario_path(name));
  VerificationReport rep = run_scenario(sc);
  return {std::move(sc), std::move(rep)};
}

}  // namespace

int main() {
  std::printf("acceptance: product-system laboratory, version %s\n", kArtifactVersion);

  // Shared full runs of the bundled scenarios (reused across criteria).
  const ScenarioRun trivial = run_bundled("orthant2-trivial");
  const ScenarioRun ccr = run_bundled("orthant2-ccr");
  const ScenarioRun lorentz_trivial = run_bundled("lorentz2-trivial");
  const ScenarioRun lorentz_ccr = run_bundled("lorentz2-ccr");

  // ---- 1. Partition exactness on >= 10^4 window lattice points ------------
  {
    struct Config {
      json j;
      std::string label;
    };
    const std::vector<Config> configs = {
        {partition_config("orthant", 2, 0.0625, {0.0, 0.0}, {8.0, 8.0}), "orthant d=2"},
        {partition_config("lorentz", 2, 0.0625, {-8.0, 0.0}, {8.0, 8.0}), "lorentz d=2"},
        {partition_config("orthant", 3, 0.25, {0.0, 0.0, 0.0}, {6.0, 6.0, 6.0}),
         "orthant d=3"},
        {partition_config("lorentz", 3, 0.25, {-3.0, -3.0, 0.0}, {3.0, 3.0, 7.0}),
         "lorentz d=3"},
    };
    bool ok = true;
    std::string detail;
    for (const auto& cfg : configs) {
      const Scenario sc = Scenario::from_json(cfg.j);
      const SuiteResult r = run_suite(sc, "partition");
      const bool this_ok = r.passed && r.samples >= 10000;
      if (!this_ok) ok = false;
      detail += cfg.label + ": " + std::to_string(r.samples) + " pts" +
                (r.passed ? "" : " VIOLATIONS") + "; ";
    }
    report(1, "partition exactness with membership certificates", ok, detail);
  }

  // ---- 2. chi bijection and measure preservation --------------------------
  {
    const SuiteResult* chi_o = find_suite(trivial.report, "chi-check");
    const SuiteResult* chi_l = find_suite(lorentz_trivial.report, "chi-check");
    const SuiteResult* mes_o = find_suite(trivial.report, "measure-check");
    const SuiteResult* mes_l = find_suite(lorentz_trivial.report, "measure-check");
    const bool ok = chi_o && chi_o->passed && chi_l && chi_l->passed && mes_o &&
                    mes_o->passed && mes_l && mes_l->passed;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "10 lattice b per cone, mutual inverses exact; 3 boxes at N=%lld within 3 sigma",
                  static_cast<long long>(trivial.scenario.samples("measure")));
    report(2, "chi bijection and measure preservation", ok, buf);
  }

  // ---- 3. Inner-product stabilization and the shift lemma -----------------
  {
    const SuiteResult* st = find_suite(trivial.report, "sections-check");
    const SuiteResult* sc = find_suite(ccr.report, "sections-check");
    const bool ok = st && st->passed && sc && sc->passed;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "20 sections/model, level deviation <= 1e-9 rel; 10 shift targets <= 1e-9; "
                  "max defect %.2e / %.2e",
                  st ? st->max_defect : -1.0, sc ? sc->max_defect : -1.0);
    report(3, "inner-product stabilization", ok, buf);
  }

  // ---- 4. Representation identities ---------------------------------------
  {
    const SuiteResult* rt = find_suite(trivial.report, "representation-check");
    const SuiteResult* rc = find_suite(ccr.report, "representation-check");
    const bool ok = rt && rt->passed && rc && rc->passed;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "50 triples/model: isometry <= 1e-8, duality <= 1e-8, mult <= 1e-7; "
                  "max defect %.2e / %.2e",
                  rt ? rt->max_defect : -1.0, rc ? rc->max_defect : -1.0);
    report(4, "representation identities", ok, buf);
  }

  // ---- 5. Essentiality ------------------------------------------------------
  {
    const SuiteResult* et = find_suite(trivial.report, "essentiality");
    const SuiteResult* ec = find_suite(ccr.report, "essentiality");
    const bool ok = et && et->passed && ec && ec->passed;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "trivial <= 1e-10 at N=1; ccr nonincreasing, <= 1e-6*norm^2 at N=N_f; "
                  "max defect %.2e / %.2e",
                  et ? et->max_defect : -1.0, ec ? ec->max_defect : -1.0);
    report(5, "essentiality of the representation", ok, buf);
  }

  // ---- 6. Induced semigroup and matrix endomorphism laws -------------------
  {
    const SuiteResult* sg = find_suite(trivial.report, "semigroup");
    const SuiteResult* sg2 = find_suite(lorentz_trivial.report, "semigroup");
    const bool ok = sg && sg->passed && sg2 && sg2->passed;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "10 lattice pairs <= 1e-6; endomorphism laws <= 1e-10; unitality iff "
                  "complete; max defect %.2e",
                  sg ? sg->max_defect : -1.0);
    report(6, "induced semigroup law", ok, buf);
  }

  // ---- 7. One-dimensional case ---------------------------------------------
  {
    const SuiteResult* od = find_suite(trivial.report, "onedim-check");
    const bool ok = od && od->passed;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "1000 multiplier triples <= 1e-12; projective <= 1e-10; Ad <= 1e-9 on 32^2; "
                  "cross-model <= 1e-10; max defect %.2e",
                  od ? od->max_defect : -1.0);
    report(7, "one-dimensional multiplier dynamics", ok, buf);
  }

  // ---- 8. Round trip against the induced product system --------------------
  {
    const SuiteResult* rt = find_suite(trivial.report, "roundtrip");
    const SuiteResult* rc = find_suite(ccr.report, "roundtrip");
    const SuiteResult* rl = find_suite(lorentz_ccr.report, "roundtrip");
    const bool ok = rt && rt->passed && rc && rc->passed && rl && rl->passed;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  ">= 5 base points/model: isometric <= 1e-8, multiplicative <= 1e-7; "
                  "max defect %.2e / %.2e / %.2e",
                  rt ? rt->max_defect : -1.0, rc ? rc->max_defect : -1.0,
                  rl ? rl->max_defect : -1.0);
    report(8, "round trip against the induced product system", ok, buf);
  }

  // ---- 9. Determinism --------------------------------------------------------
  {
    const VerificationReport trivial_again = run_scenario(trivial.scenario);
    bool ok = trivial_again.stable_payload() == trivial.report.stable_payload();

    // A reduced CCR configuration, twice.
    Scenario det = Scenario::from_string(R"({
      "schema_version": 1, "name": "det-ccr", "seed": 2024,
      "cone": {"variant": "orthant", "dimension": 2},
      "a": [1.0, 1.0],
      "grid": {"spacing": 0.5, "box_lo": [0,0], "box_hi": [6,6], "k_max": 3,
               "margin_levels": 1},
      "model": {"variant": "ccr", "family_size": 6, "amplitude": 1.0},
      "samples": {"measure": 20000, "sections": 8, "shift_bs": 5, "chi_bs": 3,
                  "representation": 10, "duality": 6, "multiplier_triples": 200,
                  "semigroup_pairs": 4, "phi_mult_pairs": 3, "roundtrip_points": 3,
                  "roundtrip_pairs": 2, "essentiality_sections": 1}
    })");
    const std::string p1 = run_scenario(det).stable_payload();
    const std::string p2 = run_scenario(det).stable_payload();
    ok = ok && (p1 == p2);
    report(9, "byte-identical report payloads for equal seeds", ok,
           ok ? "two runs each of a trivial and a ccr scenario" : "payloads differ");
  }

  std::printf("acceptance: %d criterion failure(s)\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
