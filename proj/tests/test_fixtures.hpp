#pragma once

// Shared small fixtures for the unit tests: a modest orthant window plus
// trivial and CCR models over it.

#include <memory>

#include "pslab/cone.hpp"
#include "pslab/prodsys.hpp"
#include "pslab/sections.hpp"

namespace fixtures {

using namespace pslab;

struct Orthant2 {
  ConeModel cone = ConeModel::orthant(2);
  LatticeGrid lattice{0.5, {0.0, 0.0}, {6.0, 6.0}};
  GridIndex a_idx = lattice.index_of({1.0, 1.0});
  Point a = {1.0, 1.0};

  std::shared_ptr<const SectionGrid> grid() const {
    return std::make_shared<SectionGrid>(cone, lattice, a_idx, 3, 1);
  }
  std::shared_ptr<const TrivialModel> trivial(bool with_phase = false) const {
    MultiplierForm form = with_phase
                              ? MultiplierForm::from_rows({{0.0, 1.0}, {0.0, 0.0}})
                              : MultiplierForm::zeros(2);
    return std::make_shared<TrivialModel>(cone, lattice, a_idx, form);
  }
  std::shared_ptr<const CcrModel> ccr(std::size_t family = 8) const {
    return std::make_shared<CcrModel>(cone, lattice, a_idx, family, 1.0);
  }
};

inline GridIndex gi(const LatticeGrid& lattice, std::initializer_list<double> coords) {
  return lattice.index_of(Point(coords));
}

}  // namespace fixtures
