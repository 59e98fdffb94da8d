#include "pslab.h"

#include <cstring>
#include <string>
#include <vector>

#include "pslab/errors.hpp"
#include "pslab/report.hpp"
#include "pslab/scenario.hpp"
#include "pslab/suites.hpp"

namespace {

thread_local std::string g_last_error;

void clear_error() { g_last_error.clear(); }

pslab_status set_error(pslab_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

}  // namespace

struct pslab_scenario {
  pslab::Scenario sc;
};

struct pslab_report {
  pslab::VerificationReport rep;
  std::string json_cache;
  std::string payload_cache;
  std::vector<std::string> suite_names;
};

extern "C" {

const char* pslab_version(void) { return pslab::kArtifactVersion; }

const char* pslab_last_error(void) { return g_last_error.c_str(); }

pslab_status pslab_scenario_load_file(const char* path, pslab_scenario** out) {
  clear_error();
  if (!path || !out) return set_error(PSLAB_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  try {
    auto sc = pslab::Scenario::from_file(path);
    *out = new pslab_scenario{std::move(sc)};
    return PSLAB_OK;
  } catch (const pslab::InvalidArgument& e) {
    const std::string what = e.what();
    if (what.find("cannot open") != std::string::npos)
      return set_error(PSLAB_ERR_IO, what);
    if (what.find("parse error") != std::string::npos)
      return set_error(PSLAB_ERR_PARSE, what);
    return set_error(PSLAB_ERR_VALIDATION, what);
  } catch (const std::exception& e) {
    return set_error(PSLAB_ERR_RUNTIME, e.what());
  }
}

pslab_status pslab_scenario_load_string(const char* json_text, pslab_scenario** out) {
  clear_error();
  if (!json_text || !out) return set_error(PSLAB_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  try {
    auto sc = pslab::Scenario::from_string(json_text);
    *out = new pslab_scenario{std::move(sc)};
    return PSLAB_OK;
  } catch (const pslab::InvalidArgument& e) {
    const std::string what = e.what();
    if (what.find("parse error") != std::string::npos)
      return set_error(PSLAB_ERR_PARSE, what);
    return set_error(PSLAB_ERR_VALIDATION, what);
  } catch (const std::exception& e) {
    return set_error(PSLAB_ERR_RUNTIME, e.what());
  }
}

void pslab_scenario_free(pslab_scenario* sc) { delete sc; }

const char* pslab_scenario_name(const pslab_scenario* sc) {
  return sc ? sc->sc.name().c_str() : "";
}

pslab_status pslab_scenario_set_seed(pslab_scenario* sc, unsigned long long seed) {
  clear_error();
  if (!sc) return set_error(PSLAB_ERR_ARGUMENT, "null scenario");
  sc->sc.set_seed(seed);
  return PSLAB_OK;
}

pslab_status pslab_scenario_select_suites(pslab_scenario* sc, const char* const* names,
                                          size_t count) {
  clear_error();
  if (!sc || (!names && count > 0)) return set_error(PSLAB_ERR_ARGUMENT, "null argument");
  std::vector<std::string> list;
  for (size_t i = 0; i < count; ++i) {
    if (!names[i]) return set_error(PSLAB_ERR_ARGUMENT, "null suite name");
    list.emplace_back(names[i]);
  }
  try {
    sc->sc.select_suites(std::move(list));
    return PSLAB_OK;
  } catch (const std::exception& e) {
    return set_error(PSLAB_ERR_VALIDATION, e.what());
  }
}

pslab_status pslab_run(const pslab_scenario* sc, pslab_report** out) {
  clear_error();
  if (!sc || !out) return set_error(PSLAB_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  try {
    auto rep = new pslab_report;
    rep->rep = pslab::run_scenario(sc->sc);
    rep->json_cache = rep->rep.to_json().dump(2);
    rep->payload_cache = rep->rep.stable_payload();
    for (const auto& s : rep->rep.suites) rep->suite_names.push_back(s.name);
    *out = rep;
    return PSLAB_OK;
  } catch (const std::exception& e) {
    return set_error(PSLAB_ERR_RUNTIME, e.what());
  }
}

void pslab_report_free(pslab_report* rep) { delete rep; }

const char* pslab_report_json(const pslab_report* rep) {
  return rep ? rep->json_cache.c_str() : "";
}

const char* pslab_report_stable_payload(const pslab_report* rep) {
  return rep ? rep->payload_cache.c_str() : "";
}

int pslab_report_passed(const pslab_report* rep) {
  return rep && rep->rep.all_passed() ? 1 : 0;
}

size_t pslab_report_suite_count(const pslab_report* rep) {
  return rep ? rep->rep.suites.size() : 0;
}

const char* pslab_report_suite_name(const pslab_report* rep, size_t i) {
  if (!rep || i >= rep->suite_names.size()) return "";
  return rep->suite_names[i].c_str();
}

int pslab_report_suite_passed(const pslab_report* rep, size_t i) {
  if (!rep || i >= rep->rep.suites.size()) return 0;
  return rep->rep.suites[i].passed ? 1 : 0;
}

double pslab_report_suite_max_defect(const pslab_report* rep, size_t i) {
  if (!rep || i >= rep->rep.suites.size()) return -1.0;
  return rep->rep.suites[i].max_defect;
}

pslab_status pslab_report_write(const pslab_report* rep, const char* out_dir, int with_plots) {
  clear_error();
  if (!rep || !out_dir) return set_error(PSLAB_ERR_ARGUMENT, "null argument");
  try {
    rep->rep.write_files(out_dir, with_plots != 0);
    return PSLAB_OK;
  } catch (const std::exception& e) {
    return set_error(PSLAB_ERR_IO, e.what());
  }
}

}  // extern "C"
