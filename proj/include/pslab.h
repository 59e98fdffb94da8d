/*
 * C API for the product-system verification laboratory.
 *
 * The library runs scenario-driven verification suites over concrete product
 * systems on convex cones and returns machine-readable reports. All state is
 * held behind opaque handles; every function that can fail returns a status
 * code and leaves a human-readable message in a thread-local slot readable
 * via pslab_last_error().
 *
 * Typical use:
 *
 *   pslab_scenario* sc = NULL;
 *   pslab_report* rep = NULL;
 *   if (pslab_scenario_load_file("scenario.json", &sc) != PSLAB_OK) { ... }
 *   pslab_scenario_set_seed(sc, 42);
 *   if (pslab_run(sc, &rep) != PSLAB_OK) { ... }
 *   printf("%s\n", pslab_report_json(rep));
 *   pslab_report_free(rep);
 *   pslab_scenario_free(sc);
 */

#ifndef PSLAB_H
#define PSLAB_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct pslab_scenario pslab_scenario;
typedef struct pslab_report pslab_report;

typedef enum pslab_status {
  PSLAB_OK = 0,
  PSLAB_ERR_ARGUMENT = 1,   /* bad handle or argument */
  PSLAB_ERR_IO = 2,         /* file could not be read or written */
  PSLAB_ERR_PARSE = 3,      /* scenario JSON malformed */
  PSLAB_ERR_VALIDATION = 4, /* scenario well-formed but invalid */
  PSLAB_ERR_RUNTIME = 5     /* unexpected failure while running */
} pslab_status;

/* Library semantic version, e.g. "0.1.0". */
const char* pslab_version(void);

/* Message describing the most recent failure on this thread; empty string
 * when the last call succeeded. The pointer stays valid until the next
 * library call on the same thread. */
const char* pslab_last_error(void);

/* --- scenarios ---------------------------------------------------------- */

pslab_status pslab_scenario_load_file(const char* path, pslab_scenario** out);
pslab_status pslab_scenario_load_string(const char* json_text, pslab_scenario** out);
void pslab_scenario_free(pslab_scenario* sc);

const char* pslab_scenario_name(const pslab_scenario* sc);
pslab_status pslab_scenario_set_seed(pslab_scenario* sc, unsigned long long seed);
/* Restrict the run to the named suites, keeping the declared order. */
pslab_status pslab_scenario_select_suites(pslab_scenario* sc, const char* const* names,
                                          size_t count);

/* --- running and reports ------------------------------------------------ */

pslab_status pslab_run(const pslab_scenario* sc, pslab_report** out);
void pslab_report_free(pslab_report* rep);

/* Full report as JSON (owned by the report handle). */
const char* pslab_report_json(const pslab_report* rep);
/* Deterministic payload: the report without its volatile header. Byte
 * identical across runs with equal scenario and seed. */
const char* pslab_report_stable_payload(const pslab_report* rep);

int pslab_report_passed(const pslab_report* rep); /* 1 iff every suite passed */
size_t pslab_report_suite_count(const pslab_report* rep);
const char* pslab_report_suite_name(const pslab_report* rep, size_t i);
int pslab_report_suite_passed(const pslab_report* rep, size_t i);
double pslab_report_suite_max_defect(const pslab_report* rep, size_t i);

/* Write <name>-report.json (and SVG plots when with_plots != 0) under
 * out_dir, creating it if needed. */
pslab_status pslab_report_write(const pslab_report* rep, const char* out_dir, int with_plots);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PSLAB_H */
