#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "pslab/cone.hpp"
#include "pslab/prodsys.hpp"
#include "pslab/sections.hpp"

namespace pslab {

// Names of the runnable suites, in canonical execution order.
const std::vector<std::string>& suite_registry();

struct ScenarioGridSpec {
  double spacing = 0.25;
  Point box_lo;
  Point box_hi;
  int k_max = 4;
  int margin_levels = 2;
};

struct ScenarioModelSpec {
  std::string variant = "trivial";  // "trivial" | "ccr"
  MultiplierForm multiplier;        // trivial model phase form
  std::size_t family_size = 8;      // ccr truncation family size
  double amplitude = 1.0;           // ccr single-cell amplitude
};

struct ScenarioOnedimSpec {
  MultiplierForm multiplier;
  int grid_points = 32;  // per dimension
  double spacing = 0.25;
  Point box_lo;  // defaults to a centred box
};

// Parsed and validated scenario. Carries the cone, lattice, window, model
// parameters, suite selection, seeds, sample counts and tolerances.
class Scenario {
 public:
  static Scenario from_json(const nlohmann::json& j);
  static Scenario from_file(const std::string& path);
  static Scenario from_string(const std::string& text);

  const std::string& name() const { return name_; }
  const ConeModel& cone() const { return cone_; }
  const Point& a() const { return a_; }
  const ScenarioGridSpec& grid_spec() const { return grid_; }
  const ScenarioModelSpec& model_spec() const { return model_; }
  const ScenarioOnedimSpec& onedim_spec() const { return onedim_; }
  const std::vector<std::string>& suites() const { return suites_; }
  std::uint64_t seed() const { return seed_; }
  void set_seed(std::uint64_t s);
  void select_suites(std::vector<std::string> names);
  bool inject_corrupt_section() const { return inject_corrupt_section_; }

  double tolerance(const std::string& key) const;
  std::int64_t samples(const std::string& key) const;
  const std::map<std::string, double>& tolerances() const { return tolerances_; }
  const std::map<std::string, std::int64_t>& sample_counts() const { return samples_; }

  // Scenario echo for the report (post-defaults, fully explicit).
  nlohmann::json echo() const;

  // Shared fixtures.
  LatticeGrid make_lattice() const;
  GridIndex a_index(const LatticeGrid& lattice) const;
  std::shared_ptr<const SectionGrid> make_section_grid() const;
  std::shared_ptr<const ProductSystemModel> make_model() const;
  std::shared_ptr<const ProductSystemModel> make_trivial_model() const;

 private:
  explicit Scenario(ConeModel cone) : cone_(std::move(cone)) {}
  void validate() const;

  std::string name_ = "unnamed";
  ConeModel cone_;
  Point a_;
  ScenarioGridSpec grid_;
  ScenarioModelSpec model_;
  ScenarioOnedimSpec onedim_;
  std::vector<std::string> suites_;
  std::uint64_t seed_ = 42;
  bool inject_corrupt_section_ = false;
  std::map<std::string, double> tolerances_;
  std::map<std::string, std::int64_t> samples_;
};

}  // namespace pslab
