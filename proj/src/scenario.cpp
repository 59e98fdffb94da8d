#include "pslab/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "pslab/errors.hpp"

namespace pslab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw InvalidArgument("scenario: " + path + ": " + message);
}

double get_number(const json& j, const std::string& path, const std::string& key,
                  double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) fail(path + "." + key, "expected a number");
  return j.at(key).get<double>();
}

std::int64_t get_int(const json& j, const std::string& path, const std::string& key,
                     std::int64_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) fail(path + "." + key, "expected an integer");
  return j.at(key).get<std::int64_t>();
}

Point get_point(const json& j, const std::string& path, std::size_t dim) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  Point p;
  for (const auto& e : j) {
    if (!e.is_number()) fail(path, "expected an array of numbers");
    p.push_back(e.get<double>());
  }
  if (dim != 0 && p.size() != dim) {
    std::ostringstream os;
    os << "expected " << dim << " coordinates, got " << p.size();
    fail(path, os.str());
  }
  return p;
}

std::vector<std::vector<double>> get_matrix(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) rows.push_back(get_point(r, path + "[row]", 0));
  return rows;
}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> defaults = {
      {"stabilization_rel", 1e-9},   {"shift_lemma_rel", 1e-9},
      {"stability_defect", 1e-10},   {"onb_orthonormality", 1e-10},
      {"associativity", 1e-12},      {"unitarity_rel", 1e-10},
      {"partial_adjoint", 1e-8},     {"mixed_associativity", 1e-8},
      {"bessel_rel", 1e-6},          {"phi_isometry_rel", 1e-8},
      {"duality", 1e-8},             {"phi_mult", 1e-7},
      {"essentiality_trivial", 1e-10}, {"essentiality_ccr_rel", 1e-6},
      {"semigroup", 1e-6},           {"endo", 1e-10},
      {"multiplier", 1e-12},         {"projective", 1e-10},
      {"ad_semigroup", 1e-9},        {"cross_model", 1e-10},
      {"roundtrip_isometry_rel", 1e-8}, {"roundtrip_mult_rel", 1e-7},
      {"measure_sigma", 3.0},        {"trivialize_residual", 1e-9},
      {"hermitian_symmetry", 1e-12}, {"norm_preservation", 1e-12},
  };
  return defaults;
}

const std::map<std::string, std::int64_t>& default_samples() {
  static const std::map<std::string, std::int64_t> defaults = {
      {"measure", 100000}, {"sections", 20},      {"shift_bs", 10},
      {"chi_bs", 5},       {"representation", 50}, {"duality", 20},
      {"multiplier_triples", 1000}, {"semigroup_pairs", 10}, {"phi_mult_pairs", 6},
      {"roundtrip_points", 5}, {"roundtrip_pairs", 3}, {"essentiality_sections", 3},
  };
  return defaults;
}

}  // namespace

const std::vector<std::string>& suite_registry() {
  static const std::vector<std::string> names = {
      "validate-cone",  "partition",   "chi-check",       "measure-check",
      "sections-check", "representation-check", "essentiality", "semigroup",
      "onedim-check",   "roundtrip"};
  return names;
}

Scenario Scenario::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("scenario: cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("scenario: JSON parse error in ") + path + ": " + e.what());
  }
  return from_json(j);
}

Scenario Scenario::from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("scenario: JSON parse error: ") + e.what());
  }
  return from_json(j);
}

Scenario Scenario::from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("scenario: top level must be an object");
  const std::int64_t schema = get_int(j, "$", "schema_version", 1);
  if (schema != 1) fail("$.schema_version", "unsupported schema version");

  if (!j.contains("cone") || !j.at("cone").is_object()) fail("$.cone", "missing cone object");
  const json& jc = j.at("cone");
  const std::int64_t dim = get_int(jc, "$.cone", "dimension", 0);
  if (dim < 1) fail("$.cone.dimension", "must be a positive integer");
  std::string variant = jc.value("variant", "orthant");

  ConeModel cone = [&]() {
    if (variant == "orthant") return ConeModel::orthant(static_cast<std::size_t>(dim));
    if (variant == "lorentz") return ConeModel::lorentz(static_cast<std::size_t>(dim));
    if (variant == "halfspace") {
      if (!jc.contains("normals")) fail("$.cone.normals", "halfspace cone needs normals");
      return ConeModel::halfspace(static_cast<std::size_t>(dim),
                                  get_matrix(jc.at("normals"), "$.cone.normals"));
    }
    fail("$.cone.variant", "unknown variant '" + variant + "'");
  }();

  Scenario sc(std::move(cone));
  sc.name_ = j.value("name", std::string("unnamed"));
  sc.seed_ = static_cast<std::uint64_t>(get_int(j, "$", "seed", 42));

  if (!j.contains("a")) fail("$.a", "missing distinguished interior point a");
  sc.a_ = get_point(j.at("a"), "$.a", static_cast<std::size_t>(dim));

  {
    if (!j.contains("grid") || !j.at("grid").is_object()) fail("$.grid", "missing grid object");
    const json& jg = j.at("grid");
    sc.grid_.spacing = get_number(jg, "$.grid", "spacing", 0.25);
    if (!jg.contains("box_lo") || !jg.contains("box_hi"))
      fail("$.grid", "missing box_lo/box_hi");
    sc.grid_.box_lo = get_point(jg.at("box_lo"), "$.grid.box_lo", static_cast<std::size_t>(dim));
    sc.grid_.box_hi = get_point(jg.at("box_hi"), "$.grid.box_hi", static_cast<std::size_t>(dim));
    sc.grid_.k_max = static_cast<int>(get_int(jg, "$.grid", "k_max", 4));
    sc.grid_.margin_levels = static_cast<int>(get_int(jg, "$.grid", "margin_levels", 2));
  }

  {
    const json jm = j.value("model", json::object());
    sc.model_.variant = jm.value("variant", "trivial");
    if (sc.model_.variant != "trivial" && sc.model_.variant != "ccr")
      fail("$.model.variant", "unknown variant '" + sc.model_.variant + "'");
    if (jm.contains("multiplier")) {
      try {
        sc.model_.multiplier =
            MultiplierForm::from_rows(get_matrix(jm.at("multiplier"), "$.model.multiplier"));
      } catch (const InvalidArgument& e) {
        fail("$.model.multiplier", e.what());
      }
    } else {
      sc.model_.multiplier = MultiplierForm::zeros(static_cast<std::size_t>(dim));
    }
    if (sc.model_.multiplier.dimension() != static_cast<std::size_t>(dim))
      fail("$.model.multiplier", "dimension does not match the cone");
    sc.model_.family_size =
        static_cast<std::size_t>(get_int(jm, "$.model", "family_size", 8));
    if (sc.model_.family_size < 1) fail("$.model.family_size", "must be >= 1");
    sc.model_.amplitude = get_number(jm, "$.model", "amplitude", 1.0);
    if (!(sc.model_.amplitude > 0.0)) fail("$.model.amplitude", "must be positive");
  }

  {
    const json jo = j.value("onedim", json::object());
    if (jo.contains("multiplier")) {
      try {
        sc.onedim_.multiplier =
            MultiplierForm::from_rows(get_matrix(jo.at("multiplier"), "$.onedim.multiplier"));
      } catch (const InvalidArgument& e) {
        fail("$.onedim.multiplier", e.what());
      }
    } else {
      sc.onedim_.multiplier = sc.model_.multiplier;
    }
    if (sc.onedim_.multiplier.dimension() != static_cast<std::size_t>(dim))
      fail("$.onedim.multiplier", "dimension does not match the cone");
    sc.onedim_.grid_points = static_cast<int>(get_int(jo, "$.onedim", "grid_points", 32));
    if (sc.onedim_.grid_points < 4) fail("$.onedim.grid_points", "must be >= 4");
    sc.onedim_.spacing = get_number(jo, "$.onedim", "spacing", 0.25);
    if (!(sc.onedim_.spacing > 0.0)) fail("$.onedim.spacing", "must be positive");
    if (jo.contains("box_lo")) {
      sc.onedim_.box_lo = get_point(jo.at("box_lo"), "$.onedim.box_lo",
                                    static_cast<std::size_t>(dim));
    } else {
      const double half = sc.onedim_.spacing * sc.onedim_.grid_points / 2.0;
      sc.onedim_.box_lo = Point(static_cast<std::size_t>(dim), -half);
    }
  }

  if (j.contains("suites")) {
    if (!j.at("suites").is_array()) fail("$.suites", "expected an array of suite names");
    for (const auto& s : j.at("suites")) {
      if (!s.is_string()) fail("$.suites", "expected strings");
      sc.suites_.push_back(s.get<std::string>());
    }
  } else {
    sc.suites_ = suite_registry();
  }

  sc.tolerances_ = default_tolerances();
  if (j.contains("tolerances")) {
    if (!j.at("tolerances").is_object()) fail("$.tolerances", "expected an object");
    for (const auto& [key, val] : j.at("tolerances").items()) {
      if (!val.is_number()) fail("$.tolerances." + key, "expected a number");
      if (sc.tolerances_.find(key) == sc.tolerances_.end())
        fail("$.tolerances." + key, "unknown tolerance name");
      sc.tolerances_[key] = val.get<double>();
    }
  }

  sc.samples_ = default_samples();
  if (j.contains("samples")) {
    if (!j.at("samples").is_object()) fail("$.samples", "expected an object");
    for (const auto& [key, val] : j.at("samples").items()) {
      if (!val.is_number_integer()) fail("$.samples." + key, "expected an integer");
      if (sc.samples_.find(key) == sc.samples_.end())
        fail("$.samples." + key, "unknown sample count name");
      sc.samples_[key] = val.get<std::int64_t>();
    }
  }

  if (j.contains("inject")) {
    const json& ji = j.at("inject");
    if (!ji.is_object()) fail("$.inject", "expected an object");
    sc.inject_corrupt_section_ = ji.value("corrupt_stable_section", false);
  }

  sc.validate();
  return sc;
}

void Scenario::validate() const {
  // Lattice alignment of a, naming the offending coordinate.
  const LatticeGrid lattice = make_lattice();
  try {
    lattice.index_of(a_);
  } catch (const InvalidArgument& e) {
    fail("$.a", std::string("a is not lattice-aligned: ") + e.what());
  }
  if (!cone_.interior_contains(a_)) fail("$.a", "a must lie in the interior of the cone");
  if (grid_.k_max < 1) fail("$.grid.k_max", "must be >= 1");
  if (grid_.margin_levels < 0) fail("$.grid.margin_levels", "must be >= 0");
  for (const auto& [key, val] : tolerances_)
    if (!(val > 0.0)) fail("$.tolerances." + key, "tolerances must be positive");
  for (const auto& [key, val] : samples_)
    if (val < 1) fail("$.samples." + key, "sample counts must be >= 1");
  for (const auto& s : suites_) {
    const auto& reg = suite_registry();
    if (std::find(reg.begin(), reg.end(), s) == reg.end())
      fail("$.suites", "unknown suite '" + s + "'");
  }
}

void Scenario::set_seed(std::uint64_t s) { seed_ = s; }

void Scenario::select_suites(std::vector<std::string> names) {
  const auto& reg = suite_registry();
  for (const auto& s : names)
    if (std::find(reg.begin(), reg.end(), s) == reg.end())
      throw InvalidArgument("unknown suite '" + s + "'");
  suites_ = std::move(names);
}

double Scenario::tolerance(const std::string& key) const {
  auto it = tolerances_.find(key);
  if (it == tolerances_.end()) throw InvalidArgument("unknown tolerance '" + key + "'");
  return it->second;
}

std::int64_t Scenario::samples(const std::string& key) const {
  auto it = samples_.find(key);
  if (it == samples_.end()) throw InvalidArgument("unknown sample count '" + key + "'");
  return it->second;
}

nlohmann::json Scenario::echo() const {
  json j;
  j["schema_version"] = 1;
  j["name"] = name_;
  j["seed"] = seed_;
  json jc;
  jc["variant"] = cone_.variant_name();
  jc["dimension"] = cone_.dimension();
  if (cone_.variant() == ConeVariant::Halfspace) jc["normals"] = cone_.normals();
  j["cone"] = jc;
  j["a"] = a_;
  j["grid"] = {{"spacing", grid_.spacing}, {"box_lo", grid_.box_lo},
               {"box_hi", grid_.box_hi},   {"k_max", grid_.k_max},
               {"margin_levels", grid_.margin_levels}};
  j["model"] = {{"variant", model_.variant},
                {"multiplier", model_.multiplier.a},
                {"family_size", model_.family_size},
                {"amplitude", model_.amplitude}};
  j["onedim"] = {{"multiplier", onedim_.multiplier.a},
                 {"grid_points", onedim_.grid_points},
                 {"spacing", onedim_.spacing},
                 {"box_lo", onedim_.box_lo}};
  j["suites"] = suites_;
  j["tolerances"] = tolerances_;
  j["samples"] = samples_;
  j["inject"] = {{"corrupt_stable_section", inject_corrupt_section_}};
  return j;
}

LatticeGrid Scenario::make_lattice() const {
  return LatticeGrid(grid_.spacing, grid_.box_lo, grid_.box_hi);
}

GridIndex Scenario::a_index(const LatticeGrid& lattice) const { return lattice.index_of(a_); }

std::shared_ptr<const SectionGrid> Scenario::make_section_grid() const {
  const LatticeGrid lattice = make_lattice();
  return std::make_shared<SectionGrid>(cone_, lattice, lattice.index_of(a_), grid_.k_max,
                                       grid_.margin_levels);
}

std::shared_ptr<const ProductSystemModel> Scenario::make_model() const {
  const LatticeGrid lattice = make_lattice();
  const GridIndex ai = lattice.index_of(a_);
  if (model_.variant == "ccr")
    return std::make_shared<CcrModel>(cone_, lattice, ai, model_.family_size, model_.amplitude);
  return std::make_shared<TrivialModel>(cone_, lattice, ai, model_.multiplier);
}

std::shared_ptr<const ProductSystemModel> Scenario::make_trivial_model() const {
  const LatticeGrid lattice = make_lattice();
  const GridIndex ai = lattice.index_of(a_);
  const MultiplierForm& form =
      model_.variant == "trivial" ? model_.multiplier : onedim_.multiplier;
  return std::make_shared<TrivialModel>(cone_, lattice, ai, form);
}

}  // namespace pslab
