#pragma once

#include "pslab/report.hpp"
#include "pslab/scenario.hpp"

namespace pslab {

// Runs one named suite against the scenario. Throws only on programming
// errors; check failures are reported in the result.
SuiteResult run_suite(const Scenario& sc, const std::string& name);

// Runs the scenario's suites in declared order. A suite failure (or an
// exception escaping a suite) is recorded and does not abort later suites.
VerificationReport run_scenario(const Scenario& sc);

}  // namespace pslab
