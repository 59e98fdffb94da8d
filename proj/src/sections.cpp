#include "pslab/sections.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pslab/errors.hpp"

namespace pslab {

SectionGrid::SectionGrid(ConeModel cone, LatticeGrid lattice, GridIndex a_index, int k_max,
                         int margin_levels)
    : cone_(std::move(cone)),
      lattice_(std::move(lattice)),
      a_index_(std::move(a_index)),
      k_max_(k_max),
      margin_(margin_levels) {
  if (k_max_ < 1) throw InvalidArgument("section grid: k_max must be >= 1");
  if (margin_ < 0) throw InvalidArgument("section grid: margin must be >= 0");
  const Point a = lattice_.point_at(a_index_);
  if (!cone_.interior_contains(a)) throw InvalidArgument("section grid: a must lie in Omega");
  cell_measure_ = std::pow(lattice_.spacing(), static_cast<double>(lattice_.dimension()));

  // Window: every interior lattice point with level at most k_max.
  for (const auto& idx : lattice_.indices_in_box()) {
    const Point x = lattice_.point_at(idx);
    if (!cone_.interior_contains(x)) continue;
    const int n = level_index(cone_, a, x);
    if (n > k_max_) continue;
    points_.push_back(idx);
    levels_.push_back(n);
  }
  if (points_.empty())
    throw WindowTooSmall("section grid: the box contains no interior lattice points");

  slabs_.assign(static_cast<std::size_t>(k_max_) + 1, {});
  positions_.reserve(points_.size() * 2);
  for (std::size_t pos = 0; pos < points_.size(); ++pos) {
    positions_.emplace(points_[pos], pos);
    slabs_[static_cast<std::size_t>(levels_[pos])].push_back(pos);
  }

  // Safe roots: slab-0 points whose ray keeps k_max + margin levels inside.
  for (std::size_t pos : slabs_[0]) {
    const GridIndex& r = points_[pos];
    bool fits = true;
    GridIndex top = r;
    for (int j = 1; j <= k_max_ + margin_ && fits; ++j) {
      top = add(top, a_index_);
      if (!lattice_.in_box(top)) fits = false;
    }
    if (fits) safe_roots_.push_back(r);
  }
  if (safe_roots_.empty())
    throw WindowTooSmall(
        "section grid: no ray carries k_max + margin levels; enlarge the box or reduce k_max");
  safe_slabs_.assign(static_cast<std::size_t>(k_max_) + 1, {});
  for (const auto& r : safe_roots_) {
    GridIndex x = r;
    for (int j = 0; j <= k_max_; ++j) {
      safe_slabs_[static_cast<std::size_t>(j)].push_back(positions_.at(x));
      x = add(x, a_index_);
    }
  }
}

bool SectionGrid::shifted_support_safe(const GridIndex& b) const {
  const Point a = a_point();
  for (const auto& r : safe_roots_) {
    const GridIndex rb = add(r, b);
    const Point rbp = lattice_.point_at(rb);
    if (!cone_.interior_contains(rbp)) return false;
    int n = 0;
    try {
      n = level_index(cone_, a, rbp);
    } catch (const IterationCapExceeded&) {
      return false;
    }
    GridIndex top = sub(rb, scaled(a_index_, n));
    if (!lattice_.in_box(top)) return false;
    for (int j = 1; j <= k_max_; ++j) {
      top = add(top, a_index_);
      if (!lattice_.in_box(top)) return false;
    }
  }
  return true;
}

std::optional<std::size_t> SectionGrid::position(const GridIndex& idx) const {
  auto it = positions_.find(idx);
  if (it == positions_.end()) return std::nullopt;
  return it->second;
}

const std::vector<std::size_t>& SectionGrid::slab(int k) const {
  if (k < 0 || k > k_max_) throw InvalidArgument("slab: level out of range");
  return slabs_[static_cast<std::size_t>(k)];
}

const std::vector<std::size_t>& SectionGrid::safe_slab(int k) const {
  if (k < 0 || k > k_max_) throw InvalidArgument("safe_slab: level out of range");
  return safe_slabs_[static_cast<std::size_t>(k)];
}

std::vector<std::size_t> SectionGrid::slab_over_b(const GridIndex& b) const {
  const Point bp = lattice_.point_at(b);
  const Point a = a_point();
  std::vector<std::size_t> out;
  for (std::size_t pos = 0; pos < points_.size(); ++pos)
    if (slab_b_contains(cone_, a, bp, point(pos))) out.push_back(pos);
  return out;
}

Section::Section(std::shared_ptr<const SectionGrid> grid,
                 std::shared_ptr<const ProductSystemModel> model)
    : grid_(std::move(grid)), model_(std::move(model)) {
  values_.reserve(grid_->size());
  for (std::size_t pos = 0; pos < grid_->size(); ++pos)
    values_.push_back(model_->zero(grid_->point_index(pos)));
  valid_max_level_ = grid_->k_max();
}

namespace {

void require_compatible(const Section& f, const Section& g) {
  if (f.grid_ptr() != g.grid_ptr() || f.model_ptr() != g.model_ptr())
    throw InvalidArgument("sections live on different grids or models");
}

// Left-associated powers of the unit e; index m holds e^m (m >= 1).
std::vector<FiberVector> unit_powers(const ProductSystemModel& model, int up_to) {
  std::vector<FiberVector> pow;
  pow.push_back(model.unit_e());  // e^1
  for (int m = 2; m <= up_to; ++m) pow.push_back(model.multiply(pow.back(), model.unit_e()));
  return pow;
}

}  // namespace

Section section_axpy(cdouble alpha, const Section& f, cdouble beta, const Section& g) {
  require_compatible(f, g);
  Section out(f.grid_ptr(), f.model_ptr());
  for (std::size_t pos = 0; pos < f.grid().size(); ++pos)
    out.at(pos) = fv_add(fv_scale(f.at(pos), alpha), fv_scale(g.at(pos), beta));
  if (f.stable_level() && g.stable_level())
    out.declare_stable(std::max(*f.stable_level(), *g.stable_level()));
  out.set_valid_max_level(std::min(f.valid_max_level(), g.valid_max_level()));
  return out;
}

Section section_scale(const Section& f, cdouble s) {
  Section out(f.grid_ptr(), f.model_ptr());
  for (std::size_t pos = 0; pos < f.grid().size(); ++pos) out.at(pos) = fv_scale(f.at(pos), s);
  if (f.stable_level()) out.declare_stable(*f.stable_level());
  out.set_valid_max_level(f.valid_max_level());
  return out;
}

Section stable_extension(std::shared_ptr<const SectionGrid> grid,
                         std::shared_ptr<const ProductSystemModel> model,
                         const std::vector<FiberVector>& xi_on_slab, int k) {
  const auto& slab = grid->slab(k);
  if (xi_on_slab.size() != slab.size())
    throw InvalidArgument("stable_extension: data size does not match the slab");
  // Map root index -> datum.
  std::unordered_map<GridIndex, const FiberVector*, GridIndexHash> by_point;
  for (std::size_t i = 0; i < slab.size(); ++i) {
    const GridIndex& at = grid->point_index(slab[i]);
    if (xi_on_slab[i].base != at)
      throw InvalidArgument("stable_extension: datum based at the wrong point");
    by_point.emplace(at, &xi_on_slab[i]);
  }

  const std::vector<FiberVector> epow = unit_powers(*model, grid->k_max() - k);
  Section out(grid, model);
  for (std::size_t pos = 0; pos < grid->size(); ++pos) {
    const int n = grid->level_at(pos);
    if (n < k) continue;  // zero below the data slab
    const GridIndex anchor = sub(grid->point_index(pos), scaled(grid->a_index(), n - k));
    const auto it = by_point.find(anchor);
    if (it == by_point.end())
      throw WindowTooSmall("stable_extension: ray anchor escapes the window at " +
                           format_point(grid->lattice().point_at(anchor)));
    const FiberVector& xi = *it->second;
    out.at(pos) = (n == k) ? xi : model->multiply(xi, epow[static_cast<std::size_t>(n - k - 1)]);
  }
  out.declare_stable(k);
  return out;
}

StabilityCheck is_k_stable(const Section& f, int k, double tol) {
  const SectionGrid& grid = f.grid();
  if (k < 0 || k > grid.k_max() - 1) throw InvalidArgument("is_k_stable: level out of range");
  const FiberVector e = f.model().unit_e();
  StabilityCheck check;
  const int top = std::min(grid.k_max(), f.valid_max_level());
  for (std::size_t pos = 0; pos < grid.size(); ++pos) {
    const int n = grid.level_at(pos);
    if (n < k || n + 1 > top) continue;
    const auto next = grid.position(add(grid.point_index(pos), grid.a_index()));
    if (!next) continue;
    const double d = f.model().distance(f.at(*next), f.model().multiply(f.at(pos), e));
    if (d > check.defect) {
      check.defect = d;
      check.witness = grid.point_index(pos);
    }
  }
  check.stable = check.defect <= tol;
  return check;
}

double m_stability_check(const Section& f, int k, int m) {
  if (m < 1) throw InvalidArgument("m_stability_check: m must be >= 1");
  const SectionGrid& grid = f.grid();
  const std::vector<FiberVector> epow = unit_powers(f.model(), m);
  const int top = std::min(grid.k_max(), f.valid_max_level());
  double defect = 0.0;
  for (std::size_t pos = 0; pos < grid.size(); ++pos) {
    const int n = grid.level_at(pos);
    if (n < k || n + m > top) continue;
    const auto target = grid.position(add(grid.point_index(pos), scaled(grid.a_index(), m)));
    if (!target) continue;
    const FiberVector expected =
        f.model().multiply(f.at(pos), epow[static_cast<std::size_t>(m - 1)]);
    defect = std::max(defect, f.model().distance(f.at(*target), expected));
  }
  return defect;
}

cdouble level_inner(const Section& f, const Section& g, int k) {
  require_compatible(f, g);
  const SectionGrid& grid = f.grid();
  if (k < 0 || k > grid.k_max()) throw InvalidArgument("level_inner: level out of range");
  if (k > f.valid_max_level() || k > g.valid_max_level())
    throw WindowTooSmall("level_inner: level beyond the valid window of a section");
  const auto& slab = grid.slab(k);
  if (slab.empty()) throw WindowTooSmall("level_inner: slab is empty in the window");
  cdouble s(0.0, 0.0);
  for (std::size_t pos : slab) s += f.model().inner(f.at(pos), g.at(pos));
  return grid.cell_measure() * s;
}

StabilizedInner stabilized_inner(const Section& f, const Section& g, double gate) {
  require_compatible(f, g);
  if (!f.stable_level() || !g.stable_level())
    throw InvalidArgument("stabilized_inner: both sections must declare a stability level");
  const int k0 = std::max(*f.stable_level(), *g.stable_level());
  const int top = std::min({f.grid().k_max(), f.valid_max_level(), g.valid_max_level()});
  if (k0 > top) throw WindowTooSmall("stabilized_inner: stability level beyond the window");
  StabilizedInner out;
  out.level = k0;
  out.value = level_inner(f, g, k0);
  for (int k = k0 + 1; k <= top; ++k)
    out.deviation = std::max(out.deviation, std::abs(level_inner(f, g, k) - out.value));
  if (out.deviation > gate * std::max(1.0, std::abs(out.value)))
    throw NumericalInconsistency("stabilized_inner: level sums do not stabilize (non-stable input?)");
  return out;
}

double section_norm(const Section& f) {
  return std::sqrt(std::max(0.0, stabilized_inner(f, f).value.real()));
}

cdouble slab_inner_over_b(const Section& f, const Section& g, const GridIndex& b) {
  require_compatible(f, g);
  if (!f.stable_level() || !g.stable_level())
    throw InvalidArgument("slab_inner_over_b: both sections must declare a stability level");
  const SectionGrid& grid = f.grid();
  const ConeModel& cone = grid.cone();
  const Point a = grid.a_point();
  const Point bp = grid.lattice().point_at(b);
  const int k0 = std::max(*f.stable_level(), *g.stable_level());
  {
    Point rel = bp;
    for (int i = 0; i < k0; ++i) rel = sub(rel, a);
    if (!cone.interior_contains(rel))
      throw InvalidArgument("slab_inner_over_b: b - k0*a must lie in Omega");
  }
  const int top = std::min({grid.k_max(), f.valid_max_level(), g.valid_max_level()});

  const std::vector<std::size_t> target = grid.slab_over_b(b);
  if (target.empty()) throw WindowTooSmall("slab_inner_over_b: L_b does not meet the window");
  for (std::size_t pos : target)
    if (grid.level_at(pos) > top)
      throw WindowTooSmall("slab_inner_over_b: L_b reaches beyond the valid window");

  // Value-aware chi pairing: every slab point carrying a nonzero value must
  // map into the window, and every contributing L_b point must map back onto
  // the stabilization slab. Zero-value rays need no pairing since they add
  // nothing to either sum.
  const ProductSystemModel& model = f.model();
  auto carries_value = [&](std::size_t pos) {
    return model.norm_squared(f.at(pos)) > 0.0 || model.norm_squared(g.at(pos)) > 0.0;
  };
  for (std::size_t pos : grid.slab(k0)) {
    if (!carries_value(pos)) continue;
    const int m = m_index(cone, a, bp, k0, grid.point(pos));
    const GridIndex y = add(grid.point_index(pos), scaled(grid.a_index(), m));
    const auto ypos = grid.position(y);
    if (!ypos || grid.level_at(*ypos) > top)
      throw WindowTooSmall("slab_inner_over_b: window too small to contain the chi image");
  }
  for (std::size_t pos : target) {
    if (!carries_value(pos)) continue;
    const Point back = chi_inverse(cone, a, bp, k0, grid.point(pos));
    const auto bpos = grid.position(grid.lattice().index_of(back));
    if (!bpos || grid.level_at(*bpos) != k0)
      throw WindowTooSmall("slab_inner_over_b: chi preimage escapes the stabilization slab");
  }

  cdouble s(0.0, 0.0);
  for (std::size_t pos : target) s += model.inner(f.at(pos), g.at(pos));
  return grid.cell_measure() * s;
}

HilbertCompression::HilbertCompression(std::vector<Section> generators, double eigen_threshold)
    : generators_(std::move(generators)) {
  const std::size_t n = generators_.size();
  gram_ = CMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const cdouble v = stabilized_inner(generators_[j], generators_[i]).value;
      gram_.at(i, j) = v;
      gram_.at(j, i) = std::conj(v);
    }
  if (n == 0) return;
  const HermitianEigen eig = hermitian_eigen(gram_);
  eigenvalues_ = eig.values;
  const double lmax = std::max(0.0, eig.values.back());
  const double cutoff = eigen_threshold * std::max(1.0, lmax);
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < n; ++j)
    if (eig.values[j] > cutoff) kept.push_back(j);
  rank_ = kept.size();
  coeff_ = CMatrix(n, rank_);
  for (std::size_t p = 0; p < rank_; ++p) {
    const double scale = 1.0 / std::sqrt(eig.values[kept[p]]);
    for (std::size_t i = 0; i < n; ++i) coeff_.at(i, p) = eig.vectors.at(i, kept[p]) * scale;
  }
  basis_.reserve(rank_);
  for (std::size_t p = 0; p < rank_; ++p) {
    Section b(generators_[0].grid_ptr(), generators_[0].model_ptr());
    b = section_scale(generators_[0], coeff_.at(0, p));
    for (std::size_t i = 1; i < n; ++i)
      b = section_axpy(cdouble(1.0, 0.0), b, coeff_.at(i, p), generators_[i]);
    basis_.push_back(std::move(b));
  }
}

std::pair<std::vector<cdouble>, double> HilbertCompression::coordinates(const Section& g) const {
  const std::size_t n = generators_.size();
  std::vector<cdouble> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = stabilized_inner(g, generators_[i]).value;
  std::vector<cdouble> coords(rank_, cdouble(0.0, 0.0));
  for (std::size_t p = 0; p < rank_; ++p)
    for (std::size_t i = 0; i < n; ++i) coords[p] += std::conj(coeff_.at(i, p)) * w[i];
  double captured = 0.0;
  for (const auto& c : coords) captured += std::norm(c);
  const double total = stabilized_inner(g, g).value.real();
  const double residual = std::sqrt(std::max(0.0, total - captured));
  return {coords, residual};
}

Section HilbertCompression::reconstruct(const std::vector<cdouble>& coords) const {
  if (coords.size() != rank_) throw InvalidArgument("reconstruct: coordinate size mismatch");
  if (rank_ == 0) throw InvalidArgument("reconstruct: empty compression");
  Section out = section_scale(basis_[0], coords[0]);
  for (std::size_t p = 1; p < rank_; ++p)
    out = section_axpy(cdouble(1.0, 0.0), out, coords[p], basis_[p]);
  return out;
}

namespace {

// Fixture data lives on the safe rays so every later shift, adjoint and slab
// sum sees a complete support; the remaining slab points carry exact zeros.
template <typename MakeValue>
Section safe_supported_extension(const std::shared_ptr<const SectionGrid>& grid,
                                 const std::shared_ptr<const ProductSystemModel>& model, int k,
                                 MakeValue&& make_value) {
  const auto& slab = grid->slab(k);
  std::vector<bool> safe(grid->size(), false);
  for (std::size_t pos : grid->safe_slab(k)) safe[pos] = true;
  std::vector<FiberVector> xi;
  xi.reserve(slab.size());
  for (std::size_t pos : slab) {
    const GridIndex& at = grid->point_index(pos);
    xi.push_back(safe[pos] ? make_value(at) : model->zero(at));
  }
  return stable_extension(grid, model, xi, k);
}

}  // namespace

Section section_vacuum(std::shared_ptr<const SectionGrid> grid,
                       std::shared_ptr<const ProductSystemModel> model) {
  return safe_supported_extension(grid, model, 0, [&](const GridIndex& at) {
    if (model->one_dimensional()) return FiberVector::make_scalar(at, cdouble(1.0, 0.0));
    return dynamic_cast<const CcrModel&>(*model).vacuum(at);
  });
}

Section section_single_cell(std::shared_ptr<const SectionGrid> grid,
                            std::shared_ptr<const ProductSystemModel> model,
                            std::size_t cell_ordinal, int k) {
  return safe_supported_extension(grid, model, k, [&](const GridIndex& at) {
    const auto fam = model->generating_family(at);
    const std::size_t pick = fam.size() > 1 ? 1 + (cell_ordinal % (fam.size() - 1)) : 0;
    return fam[pick];
  });
}

Section random_stable_section(std::shared_ptr<const SectionGrid> grid,
                              std::shared_ptr<const ProductSystemModel> model, int k,
                              CounterRng& rng, std::size_t max_terms) {
  return safe_supported_extension(grid, model, k, [&](const GridIndex& at) {
    return model->random_fiber_vector(at, rng, max_terms);
  });
}

}  // namespace pslab
