#pragma once

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "pslab/cone.hpp"
#include "pslab/linalg.hpp"

namespace pslab {

// Bilinear phase form: omega(x, y) = exp(i * sum_{i<j} A_ij x_i y_j) with A
// strictly upper triangular. Always unit modulus.
struct MultiplierForm {
  std::vector<std::vector<double>> a;  // d x d, strictly upper triangular

  static MultiplierForm zeros(std::size_t d);
  static MultiplierForm from_rows(std::vector<std::vector<double>> rows);

  std::size_t dimension() const { return a.size(); }
  double exponent(const Point& x, const Point& y) const;
};

cdouble omega(const MultiplierForm& form, const Point& x, const Point& y);

// |omega(x,y) omega(x+y,z) - omega(x,y+z) omega(y,z)|.
double multiplier_defect(const MultiplierForm& form, const Point& x, const Point& y,
                         const Point& z);

// Finitely supported step function on lattice cells. A cell is the cube of
// side h centred at a lattice point and is identified with that point's
// index; the L^2 pairing carries the cell measure h^d.
struct StepFunction {
  std::vector<GridIndex> cells;   // sorted, no duplicates
  std::vector<cdouble> values;

  bool empty() const { return cells.empty(); }
  StepFunction shifted(const GridIndex& delta) const;
  bool operator<(const StepFunction& o) const;
  bool operator==(const StepFunction& o) const;
};

// L^2 inner product h^d * sum_c f_c * conj(g_c); linear in f.
cdouble step_l2_inner(const StepFunction& f, const StepFunction& g, double cell_measure);

// Element of a fibre E(x). The payload is either a scalar (one-dimensional
// model) or a finite combination sum_j coeff_j * e(f_j) of exponential
// vectors (CCR model).
struct FiberVector {
  enum class Kind { Scalar, Combo };

  struct Term {
    cdouble coeff;
    StepFunction fn;
  };

  GridIndex base;
  Kind kind = Kind::Scalar;
  cdouble scalar{0.0, 0.0};
  std::vector<Term> terms;

  static FiberVector make_scalar(GridIndex base, cdouble value);
  static FiberVector make_combo(GridIndex base, std::vector<Term> terms);
};

// Payload-level linear structure; bases must match.
FiberVector fv_add(const FiberVector& u, const FiberVector& v);
FiberVector fv_scale(const FiberVector& u, cdouble s);

// Concrete product system over the interior of the cone, with fibres based
// at lattice points. Operations are pure; the models are immutable after
// construction (the CCR model memoizes per-fibre cell enumerations behind a
// mutex).
class ProductSystemModel {
 public:
  virtual ~ProductSystemModel() = default;

  virtual std::string variant_name() const = 0;
  virtual bool one_dimensional() const = 0;
  virtual std::size_t family_size() const = 0;

  const ConeModel& cone() const { return cone_; }
  const LatticeGrid& grid() const { return grid_; }
  const GridIndex& a_index() const { return a_index_; }
  Point a_point() const { return grid_.point_at(a_index_); }

  virtual FiberVector zero(const GridIndex& base) const = 0;
  // The distinguished unit e in E(a).
  virtual FiberVector unit_e() const = 0;
  // Deterministic generating family of the fibre at `base` (size <=
  // family_size; the actual size can be smaller near the apex).
  virtual std::vector<FiberVector> generating_family(const GridIndex& base) const = 0;

  virtual FiberVector multiply(const FiberVector& u, const FiberVector& v) const = 0;
  virtual cdouble inner(const FiberVector& u, const FiberVector& v) const = 0;
  // Riesz representative of u -> <w | v u> within the truncated span of
  // E(p(w) - p(v)); requires p(w) - p(v) in Omega.
  virtual FiberVector partial_adjoint(const FiberVector& v, const FiberVector& w) const = 0;

  double norm_squared(const FiberVector& u) const;
  double norm(const FiberVector& u) const;
  double distance(const FiberVector& u, const FiberVector& v) const;

  // Orthonormal family spanning the first n generators (modified
  // Gram-Schmidt in the fibre metric).
  std::vector<FiberVector> onb(const GridIndex& base, std::size_t n) const;

  // Coordinates of u in the fibre onb; throws if the payload leaves the
  // truncated span beyond `residual_tol` (relative).
  std::pair<Point, std::vector<cdouble>> trivialize(const FiberVector& u,
                                                    double residual_tol = 1e-8) const;

  FiberVector random_fiber_vector(const GridIndex& base, CounterRng& rng,
                                  std::size_t max_terms = 4) const;

 protected:
  ProductSystemModel(ConeModel cone, LatticeGrid grid, GridIndex a_index);
  void require_interior(const GridIndex& base) const;

  ConeModel cone_;
  LatticeGrid grid_;
  GridIndex a_index_;
};

// One-dimensional model: E(x) = C with multiplication twisted by omega.
class TrivialModel : public ProductSystemModel {
 public:
  TrivialModel(ConeModel cone, LatticeGrid grid, GridIndex a_index, MultiplierForm form);

  std::string variant_name() const override { return "trivial"; }
  bool one_dimensional() const override { return true; }
  std::size_t family_size() const override { return 1; }
  const MultiplierForm& multiplier() const { return form_; }

  FiberVector zero(const GridIndex& base) const override;
  FiberVector unit_e() const override;
  std::vector<FiberVector> generating_family(const GridIndex& base) const override;
  FiberVector multiply(const FiberVector& u, const FiberVector& v) const override;
  cdouble inner(const FiberVector& u, const FiberVector& v) const override;
  FiberVector partial_adjoint(const FiberVector& v, const FiberVector& w) const override;

 private:
  MultiplierForm form_;
};

// Truncated CCR model: fibres are spanned by exponential vectors over step
// functions supported in cells of B_x = P \ (P + x); all inner products are
// evaluated through <e(f)|e(g)> = exp(<f,g>).
class CcrModel : public ProductSystemModel {
 public:
  CcrModel(ConeModel cone, LatticeGrid grid, GridIndex a_index, std::size_t family_size,
           double amplitude);

  std::string variant_name() const override { return "ccr"; }
  bool one_dimensional() const override { return false; }
  std::size_t family_size() const override { return family_size_; }
  double amplitude() const { return amplitude_; }
  double cell_measure() const { return cell_measure_; }

  FiberVector zero(const GridIndex& base) const override;
  FiberVector vacuum(const GridIndex& base) const;
  FiberVector unit_e() const override;
  std::vector<FiberVector> generating_family(const GridIndex& base) const override;
  FiberVector multiply(const FiberVector& u, const FiberVector& v) const override;
  cdouble inner(const FiberVector& u, const FiberVector& v) const override;
  FiberVector partial_adjoint(const FiberVector& v, const FiberVector& w) const override;

  // Cells of B_base within the grid box whose exponentials generate the
  // truncated fibre. Anchored at the ray root base - n(base)*a so that the
  // family is coherent along a-rays.
  std::vector<GridIndex> fiber_cells(const GridIndex& base) const;
  // All cells of B_base inside the box (unanchored), for decomposition checks.
  std::vector<GridIndex> all_cells(const GridIndex& base) const;

 private:
  GridIndex ray_root(const GridIndex& base) const;

  std::size_t family_size_;
  double amplitude_;
  double cell_measure_;
  mutable std::mutex cache_mutex_;
  mutable std::map<GridIndex, std::vector<GridIndex>> cell_cache_;
};

}  // namespace pslab
