#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pslab {

using Point = std::vector<double>;

Point add(const Point& x, const Point& y);
Point sub(const Point& x, const Point& y);
Point scaled(const Point& x, double s);
std::string format_point(const Point& x);

enum class ConeVariant { Orthant, Lorentz, Halfspace };

// Pointed spanning closed convex cone P with interior Omega. Membership
// tests are exact in the sense that they are plain floating-point
// comparisons of closed-form expressions; no tolerance is involved.
class ConeModel {
 public:
  static ConeModel orthant(std::size_t dimension);
  static ConeModel lorentz(std::size_t dimension);
  // Rows are inward facet normals; P = {x : <h_i, x> >= 0 for all i}.
  static ConeModel halfspace(std::size_t dimension, std::vector<std::vector<double>> normals);

  std::size_t dimension() const { return dim_; }
  ConeVariant variant() const { return variant_; }
  std::string variant_name() const;
  const std::vector<std::vector<double>>& normals() const { return normals_; }

  // x in P (closed, non-strict inequalities).
  bool contains(const Point& x) const;
  // x in Omega (strict inequalities).
  bool interior_contains(const Point& x) const;

 private:
  ConeModel(ConeVariant v, std::size_t d) : variant_(v), dim_(d) {}
  void check_dim(const Point& x) const;

  ConeVariant variant_;
  std::size_t dim_;
  std::vector<std::vector<double>> normals_;
};

struct ConeValidation {
  bool pointed = false;
  bool spanning = false;
  bool irredundant = true;  // halfspace only; true for the built-ins
  std::optional<Point> witness;
  std::string diagnostic;
  bool ok() const { return pointed && spanning && irredundant; }
};

// Checks pointedness (rank of normals = d for the halfspace variant,
// structural for the built-ins) and spanning (a strictly interior witness
// point is produced). For the halfspace variant each facet is additionally
// probed for irredundancy.
ConeValidation validate_cone(const ConeModel& cone, std::uint64_t seed = 1);

// Least positive integer n with n*a - x in Omega.
int archimedean_index(const ConeModel& cone, const Point& a, const Point& x,
                      int iteration_cap = 10000);

// Largest k >= 0 with x - k*a in Omega; equivalently the unique k with
// x in L_k = (Omega + k a) \ (Omega + (k+1) a). Requires x in Omega.
int level_index(const ConeModel& cone, const Point& a, const Point& x,
                int iteration_cap = 10000);

// x in L_k.
bool slab_contains(const ConeModel& cone, const Point& a, int k, const Point& x);

// x in L_b = (Omega + b) \ (Omega + b + a).
bool slab_b_contains(const ConeModel& cone, const Point& a, const Point& b, const Point& x);

// Least m >= 0 with x + m*a - b in Omega. Preconditions: x in L_k and
// b - k*a in Omega (for k = 0, b in Omega).
int m_index(const ConeModel& cone, const Point& a, const Point& b, int k, const Point& x,
            int iteration_cap = 10000);

// chi(x) = x + m(x)*a, the point where the ray {x + m a} meets L_b.
Point chi(const ConeModel& cone, const Point& a, const Point& b, int k, const Point& x,
          int iteration_cap = 10000);

// Inverse of chi: for y in L_b returns y - n0*a with n0 the largest
// integer such that y - n0*a - k*a in Omega; the result lies in L_k.
Point chi_inverse(const ConeModel& cone, const Point& a, const Point& b, int k, const Point& y,
                  int iteration_cap = 10000);

// Least j >= 0 with j*a - b in P (closed). This is the exact number of
// levels a left shift by b costs on the a-aligned lattice.
int shift_levels(const ConeModel& cone, const Point& a, const Point& b,
                 int iteration_cap = 10000);

// Uniform axis-aligned lattice h * Z^d restricted to a box. Lattice points
// are carried as integer multi-indices so that translations by lattice
// vectors are exact; coordinates are materialized canonically as h * index.
struct GridIndex {
  std::vector<std::int64_t> v;

  bool operator==(const GridIndex& o) const { return v == o.v; }
  bool operator!=(const GridIndex& o) const { return v != o.v; }
  bool operator<(const GridIndex& o) const { return v < o.v; }
};

GridIndex add(const GridIndex& a, const GridIndex& b);
GridIndex sub(const GridIndex& a, const GridIndex& b);
GridIndex scaled(const GridIndex& a, std::int64_t m);

struct GridIndexHash {
  std::size_t operator()(const GridIndex& g) const {
    std::size_t h = 1469598103934665603ULL;
    for (auto x : g.v) {
      h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ULL;
      h *= 1099511628211ULL;
    }
    return h;
  }
};

class LatticeGrid {
 public:
  LatticeGrid(double spacing, Point box_lo, Point box_hi);

  double spacing() const { return h_; }
  const Point& box_lo() const { return lo_; }
  const Point& box_hi() const { return hi_; }
  std::size_t dimension() const { return lo_.size(); }

  Point point_at(const GridIndex& i) const;
  bool in_box(const GridIndex& i) const;
  bool in_box(const Point& x) const;

  // v is an exact lattice vector: every coordinate is an integer multiple of
  // the spacing, bit-exactly.
  bool is_lattice_vector(const Point& v) const;
  // Index of an exact lattice vector; throws InvalidArgument naming the
  // first offending coordinate otherwise.
  GridIndex index_of(const Point& v) const;

  // All lattice indices inside the box, lexicographically ordered.
  std::vector<GridIndex> indices_in_box() const;

 private:
  double h_;
  Point lo_, hi_;
  std::vector<std::int64_t> imin_, imax_;
};

// Lattice points of L_k inside the grid box, lexicographic order.
std::vector<GridIndex> lattice_slab(const ConeModel& cone, const Point& a,
                                    const LatticeGrid& grid, int k);

struct MeasureEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::int64_t samples = 0;
  std::int64_t hits = 0;
  std::uint64_t seed = 0;
};

// Monte Carlo Lebesgue measure of {x in box : predicate(x)}. Reproducible
// from the seed; the estimator is independent of how samples would be split
// across workers because draws are counter-indexed.
template <typename Pred>
MeasureEstimate estimate_measure(Pred&& predicate, const Point& box_lo, const Point& box_hi,
                                 std::int64_t samples, std::uint64_t seed);

}  // namespace pslab

#include "pslab/cone_impl.hpp"
