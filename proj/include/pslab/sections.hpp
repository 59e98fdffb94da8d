#pragma once

#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "pslab/cone.hpp"
#include "pslab/prodsys.hpp"

namespace pslab {

// Discrete window for sections: all a-aligned lattice points of Omega inside
// the box with slab level n(x) <= k_max. Separately, a root r in L_0 is
// "safe" when its ray r + j*a stays inside the box for j up to k_max plus a
// margin; section fixtures keep their support on safe rays. Off-support
// values are genuinely zero, so slab sums restricted to the window remain
// exactly translation invariant and shifted reads stay inside the window as
// long as the box is closed under x -> x - b for interior b (true for the
// built-in cones with the bundled box shapes).
class SectionGrid {
 public:
  SectionGrid(ConeModel cone, LatticeGrid lattice, GridIndex a_index, int k_max,
              int margin_levels = 2);

  const ConeModel& cone() const { return cone_; }
  const LatticeGrid& lattice() const { return lattice_; }
  const GridIndex& a_index() const { return a_index_; }
  Point a_point() const { return lattice_.point_at(a_index_); }
  int k_max() const { return k_max_; }
  int margin_levels() const { return margin_; }
  double cell_measure() const { return cell_measure_; }

  std::size_t size() const { return points_.size(); }
  const std::vector<GridIndex>& points() const { return points_; }
  const GridIndex& point_index(std::size_t pos) const { return points_[pos]; }
  Point point(std::size_t pos) const { return lattice_.point_at(points_[pos]); }
  int level_at(std::size_t pos) const { return levels_[pos]; }

  std::optional<std::size_t> position(const GridIndex& idx) const;
  bool contains(const GridIndex& idx) const { return position(idx).has_value(); }

  // Roots whose rays carry k_max + margin complete levels inside the box;
  // fixtures support their sections here.
  const std::vector<GridIndex>& safe_roots() const { return safe_roots_; }
  // Positions of all lattice points of L_k in the window.
  const std::vector<std::size_t>& slab(int k) const;
  // Positions of r + k*a for the safe roots r only.
  const std::vector<std::size_t>& safe_slab(int k) const;
  // Positions of the lattice points of L_b in the window.
  std::vector<std::size_t> slab_over_b(const GridIndex& b) const;

  // True when shifting a section supported on safe roots by b keeps its
  // support on rays that still carry k_max complete levels in the box.
  bool shifted_support_safe(const GridIndex& b) const;

 private:
  ConeModel cone_;
  LatticeGrid lattice_;
  GridIndex a_index_;
  int k_max_;
  int margin_;
  double cell_measure_;
  std::vector<GridIndex> safe_roots_;
  std::vector<GridIndex> points_;
  std::vector<int> levels_;
  std::vector<std::vector<std::size_t>> slabs_;
  std::vector<std::vector<std::size_t>> safe_slabs_;
  std::unordered_map<GridIndex, std::size_t, GridIndexHash> positions_;
};

// A section assigns to every window point a vector in its fibre. Values are
// stored densely in window order. `valid_max_level` marks the highest slab
// whose values are trustworthy (operations that drop top-level values, like
// the adjoint action, lower it).
class Section {
 public:
  Section(std::shared_ptr<const SectionGrid> grid,
          std::shared_ptr<const ProductSystemModel> model);

  const SectionGrid& grid() const { return *grid_; }
  const std::shared_ptr<const SectionGrid>& grid_ptr() const { return grid_; }
  const ProductSystemModel& model() const { return *model_; }
  const std::shared_ptr<const ProductSystemModel>& model_ptr() const { return model_; }

  const FiberVector& at(std::size_t pos) const { return values_[pos]; }
  FiberVector& at(std::size_t pos) { return values_[pos]; }

  std::optional<int> stable_level() const { return stable_level_; }
  void declare_stable(int k) { stable_level_ = k; }
  int valid_max_level() const { return valid_max_level_; }
  void set_valid_max_level(int k) { valid_max_level_ = k; }

 private:
  std::shared_ptr<const SectionGrid> grid_;
  std::shared_ptr<const ProductSystemModel> model_;
  std::vector<FiberVector> values_;
  std::optional<int> stable_level_;
  int valid_max_level_;
};

Section section_axpy(cdouble alpha, const Section& f, cdouble beta, const Section& g);
Section section_scale(const Section& f, cdouble s);

// Extension of boundary data on L_k by powers of the unit e: the value at a
// window point x with n(x) >= k is xi(x - (n(x)-k) a) * e^{n(x)-k}, zero on
// lower levels. The result is exactly k-stable on the window.
Section stable_extension(std::shared_ptr<const SectionGrid> grid,
                         std::shared_ptr<const ProductSystemModel> model,
                         const std::vector<FiberVector>& xi_on_slab, int k);

struct StabilityCheck {
  bool stable = false;
  double defect = 0.0;
  std::optional<GridIndex> witness;
};

// Max over applicable window points of ||f(x+a) - f(x) e||.
StabilityCheck is_k_stable(const Section& f, int k, double tol = 1e-10);

// Max over applicable window points of ||f(x+m a) - f(x) e^m||.
double m_stability_check(const Section& f, int k, int m);

// h^d * sum over L_k window points of <f(x)|g(x)>.
cdouble level_inner(const Section& f, const Section& g, int k);

struct StabilizedInner {
  cdouble value{0.0, 0.0};
  int level = 0;
  double deviation = 0.0;  // max |I_k - I_{level}| over checked levels
};

// Inner product of stable sections: the level sum at max(k0_f, k0_g),
// verified constant across all higher stored levels. Throws
// NumericalInconsistency when the deviation exceeds `gate` relative to the
// value, which signals a non-stable input.
StabilizedInner stabilized_inner(const Section& f, const Section& g, double gate = 1e-6);

double section_norm(const Section& f);

// h^d * sum over L_b window points of <f(x)|g(x)>; checked against the
// chi-pairing with the stabilization slab, so a window that cannot hold the
// chi image raises WindowTooSmall.
cdouble slab_inner_over_b(const Section& f, const Section& g, const GridIndex& b);

// Finite compression of the section Hilbert space: Gram matrix of the
// generating sections, orthonormalized with spectral thresholding so null
// directions are quotiented out.
class HilbertCompression {
 public:
  HilbertCompression(std::vector<Section> generators, double eigen_threshold = 1e-10);

  std::size_t generator_count() const { return generators_.size(); }
  std::size_t rank() const { return rank_; }
  const CMatrix& gram() const { return gram_; }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  const Section& generator(std::size_t i) const { return generators_[i]; }
  const Section& basis_section(std::size_t p) const { return basis_[p]; }

  // Coordinates of g in the orthonormal basis plus the projection residual.
  std::pair<std::vector<cdouble>, double> coordinates(const Section& g) const;
  Section reconstruct(const std::vector<cdouble>& coords) const;

 private:
  std::vector<Section> generators_;
  CMatrix gram_;
  CMatrix coeff_;  // n x rank, basis_p = sum_i coeff(i,p) * generator_i
  std::vector<double> eigenvalues_;
  std::size_t rank_ = 0;
  std::vector<Section> basis_;
};

// Named section fixtures.
Section section_vacuum(std::shared_ptr<const SectionGrid> grid,
                       std::shared_ptr<const ProductSystemModel> model);
Section section_single_cell(std::shared_ptr<const SectionGrid> grid,
                            std::shared_ptr<const ProductSystemModel> model,
                            std::size_t cell_ordinal, int k = 0);
Section random_stable_section(std::shared_ptr<const SectionGrid> grid,
                              std::shared_ptr<const ProductSystemModel> model, int k,
                              CounterRng& rng, std::size_t max_terms = 4);

}  // namespace pslab
