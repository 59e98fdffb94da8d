#pragma once

#include <map>
#include <vector>

#include "pslab/prodsys.hpp"

namespace pslab {

// Finite uniform grid over a box in R^d carrying discretized L^2 vectors.
// Index j in [0, size_j) maps to the point lo_j + spacing * j.
struct OnedimGrid {
  double spacing = 0.0;
  Point lo;
  std::vector<int> size;

  std::size_t dimension() const { return lo.size(); }
  Point point_at(const std::vector<int>& idx) const;
  bool in_range(const std::vector<int>& idx) const;
  // Integer translation for an exact lattice vector x (throws otherwise).
  std::vector<int> delta_of(const Point& x) const;
};

// Sparse complex function on the grid; support is tracked exactly.
struct GridFunction {
  OnedimGrid grid;
  std::map<std::vector<int>, cdouble> values;

  double l2_norm_squared() const;
  double l2_norm() const;
};

cdouble grid_inner(const GridFunction& f, const GridFunction& g);
GridFunction grid_axpy(cdouble alpha, const GridFunction& f, cdouble beta,
                       const GridFunction& g);
double grid_distance(const GridFunction& f, const GridFunction& g);

// (U_x f)(y) = omega(x, y - x) f(y - x). Zero padding only: if the shifted
// support leaves the grid, WindowTooSmall is raised rather than wrapping.
GridFunction u_apply(const MultiplierForm& form, const Point& x, const GridFunction& f);

// Finite-rank operator sum_{p,q} M_pq |delta_p><delta_q| over grid deltas.
struct DeltaOperator {
  OnedimGrid grid;
  std::vector<std::vector<int>> support;  // ordered delta indices
  CMatrix m;                              // support.size() square
};

// Ad(U_x) transported operator: support shifts by x, entries pick up the
// conjugated phases.
DeltaOperator ad_u(const MultiplierForm& form, const Point& x, const DeltaOperator& op);

double delta_operator_distance(const DeltaOperator& a, const DeltaOperator& b);

}  // namespace pslab
