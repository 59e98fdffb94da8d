#include "pslab/prodsys.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pslab/errors.hpp"

namespace pslab {

MultiplierForm MultiplierForm::zeros(std::size_t d) {
  MultiplierForm f;
  f.a.assign(d, std::vector<double>(d, 0.0));
  return f;
}

MultiplierForm MultiplierForm::from_rows(std::vector<std::vector<double>> rows) {
  const std::size_t d = rows.size();
  for (std::size_t i = 0; i < d; ++i) {
    if (rows[i].size() != d) throw InvalidArgument("multiplier form must be square");
    for (std::size_t j = 0; j <= i && j < d; ++j)
      if (rows[i][j] != 0.0)
        throw InvalidArgument("multiplier form must be strictly upper triangular");
  }
  MultiplierForm f;
  f.a = std::move(rows);
  return f;
}

double MultiplierForm::exponent(const Point& x, const Point& y) const {
  const std::size_t d = a.size();
  if (x.size() != d || y.size() != d)
    throw InvalidArgument("multiplier form: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) s += a[i][j] * x[i] * y[j];
  return s;
}

cdouble omega(const MultiplierForm& form, const Point& x, const Point& y) {
  return std::polar(1.0, form.exponent(x, y));
}

double multiplier_defect(const MultiplierForm& form, const Point& x, const Point& y,
                         const Point& z) {
  const cdouble lhs = omega(form, x, y) * omega(form, add(x, y), z);
  const cdouble rhs = omega(form, x, add(y, z)) * omega(form, y, z);
  return std::abs(lhs - rhs);
}

StepFunction StepFunction::shifted(const GridIndex& delta) const {
  StepFunction s;
  s.cells.reserve(cells.size());
  for (const auto& c : cells) s.cells.push_back(add(c, delta));
  s.values = values;
  return s;
}

bool StepFunction::operator<(const StepFunction& o) const {
  if (cells != o.cells) return cells < o.cells;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].real() != o.values[i].real()) return values[i].real() < o.values[i].real();
    if (values[i].imag() != o.values[i].imag()) return values[i].imag() < o.values[i].imag();
  }
  return false;
}

bool StepFunction::operator==(const StepFunction& o) const {
  return cells == o.cells && values == o.values;
}

cdouble step_l2_inner(const StepFunction& f, const StepFunction& g, double cell_measure) {
  cdouble s(0.0, 0.0);
  std::size_t i = 0, j = 0;
  while (i < f.cells.size() && j < g.cells.size()) {
    if (f.cells[i] < g.cells[j]) {
      ++i;
    } else if (g.cells[j] < f.cells[i]) {
      ++j;
    } else {
      s += f.values[i] * std::conj(g.values[j]);
      ++i;
      ++j;
    }
  }
  return cell_measure * s;
}

FiberVector FiberVector::make_scalar(GridIndex base, cdouble value) {
  FiberVector v;
  v.base = std::move(base);
  v.kind = Kind::Scalar;
  v.scalar = value;
  return v;
}

FiberVector FiberVector::make_combo(GridIndex base, std::vector<Term> terms) {
  FiberVector v;
  v.base = std::move(base);
  v.kind = Kind::Combo;
  v.terms = std::move(terms);
  return v;
}

FiberVector fv_add(const FiberVector& u, const FiberVector& v) {
  if (u.base != v.base) throw InvalidArgument("fv_add: base mismatch");
  if (u.kind != v.kind) throw InvalidArgument("fv_add: payload kind mismatch");
  if (u.kind == FiberVector::Kind::Scalar)
    return FiberVector::make_scalar(u.base, u.scalar + v.scalar);
  // Merge terms over identical step functions so combinations of a common
  // generating family stay compact.
  std::map<StepFunction, cdouble> acc;
  for (const auto& t : u.terms) acc[t.fn] += t.coeff;
  for (const auto& t : v.terms) acc[t.fn] += t.coeff;
  std::vector<FiberVector::Term> terms;
  terms.reserve(acc.size());
  for (auto& [fn, coeff] : acc)
    if (coeff != cdouble(0.0, 0.0)) terms.push_back({coeff, fn});
  return FiberVector::make_combo(u.base, std::move(terms));
}

FiberVector fv_scale(const FiberVector& u, cdouble s) {
  FiberVector r = u;
  if (r.kind == FiberVector::Kind::Scalar) {
    r.scalar *= s;
  } else {
    if (s == cdouble(0.0, 0.0)) {
      r.terms.clear();
    } else {
      for (auto& t : r.terms) t.coeff *= s;
    }
  }
  return r;
}

ProductSystemModel::ProductSystemModel(ConeModel cone, LatticeGrid grid, GridIndex a_index)
    : cone_(std::move(cone)), grid_(std::move(grid)), a_index_(std::move(a_index)) {
  if (!cone_.interior_contains(grid_.point_at(a_index_)))
    throw InvalidArgument("product system: a must lie in Omega");
}

void ProductSystemModel::require_interior(const GridIndex& base) const {
  if (!cone_.interior_contains(grid_.point_at(base)))
    throw InvalidArgument("fibre base must lie in Omega: " + format_point(grid_.point_at(base)));
}

double ProductSystemModel::norm_squared(const FiberVector& u) const {
  return std::max(0.0, inner(u, u).real());
}

double ProductSystemModel::norm(const FiberVector& u) const { return std::sqrt(norm_squared(u)); }

double ProductSystemModel::distance(const FiberVector& u, const FiberVector& v) const {
  // Form the payload difference first; combinations over a common family
  // cancel coefficient-wise, which keeps tiny distances measurable.
  return norm(fv_add(u, fv_scale(v, cdouble(-1.0, 0.0))));
}

std::vector<FiberVector> ProductSystemModel::onb(const GridIndex& base, std::size_t n) const {
  const std::vector<FiberVector> gens = generating_family(base);
  if (n > gens.size()) {
    std::ostringstream os;
    os << "onb: requested " << n << " vectors but the generating family at "
       << format_point(grid_.point_at(base)) << " has " << gens.size();
    throw InvalidArgument(os.str());
  }
  std::vector<FiberVector> basis;
  basis.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    FiberVector w = gens[j];
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        const cdouble proj = inner(w, b);
        w = fv_add(w, fv_scale(b, -proj));
      }
    }
    const double nrm = norm(w);
    if (nrm < 1e-10)
      throw SingularGram("onb: generating family numerically rank deficient");
    basis.push_back(fv_scale(w, cdouble(1.0 / nrm, 0.0)));
  }
  return basis;
}

std::pair<Point, std::vector<cdouble>> ProductSystemModel::trivialize(const FiberVector& u,
                                                                      double residual_tol) const {
  const std::vector<FiberVector> basis = onb(u.base, generating_family(u.base).size());
  std::vector<cdouble> coords(basis.size());
  FiberVector projection = zero(u.base);
  for (std::size_t p = 0; p < basis.size(); ++p) {
    coords[p] = inner(u, basis[p]);
    projection = fv_add(projection, fv_scale(basis[p], coords[p]));
  }
  const double residual = distance(u, projection);
  if (residual > residual_tol * std::max(1.0, norm(u)))
    throw NumericalInconsistency("trivialize: payload outside the truncated span");
  return {grid_.point_at(u.base), coords};
}

FiberVector ProductSystemModel::random_fiber_vector(const GridIndex& base, CounterRng& rng,
                                                    std::size_t max_terms) const {
  const std::vector<FiberVector> gens = generating_family(base);
  const std::size_t k = std::min(max_terms, gens.size());
  FiberVector v = zero(base);
  for (std::size_t j = 0; j < k; ++j) {
    const cdouble c(rng.next_uniform(-1.0, 1.0), rng.next_uniform(-1.0, 1.0));
    v = fv_add(v, fv_scale(gens[j], c));
  }
  return v;
}

TrivialModel::TrivialModel(ConeModel cone, LatticeGrid grid, GridIndex a_index,
                           MultiplierForm form)
    : ProductSystemModel(std::move(cone), std::move(grid), std::move(a_index)),
      form_(std::move(form)) {
  if (form_.dimension() != cone_.dimension())
    throw InvalidArgument("multiplier form dimension must match the cone");
}

FiberVector TrivialModel::zero(const GridIndex& base) const {
  require_interior(base);
  return FiberVector::make_scalar(base, 0.0);
}

FiberVector TrivialModel::unit_e() const {
  return FiberVector::make_scalar(a_index_, 1.0);
}

std::vector<FiberVector> TrivialModel::generating_family(const GridIndex& base) const {
  require_interior(base);
  return {FiberVector::make_scalar(base, 1.0)};
}

FiberVector TrivialModel::multiply(const FiberVector& u, const FiberVector& v) const {
  if (u.kind != FiberVector::Kind::Scalar || v.kind != FiberVector::Kind::Scalar)
    throw InvalidArgument("trivial model: scalar payloads expected");
  const Point x = grid_.point_at(u.base);
  const Point y = grid_.point_at(v.base);
  const cdouble w = omega(form_, x, y);
  return FiberVector::make_scalar(add(u.base, v.base), u.scalar * v.scalar * w);
}

cdouble TrivialModel::inner(const FiberVector& u, const FiberVector& v) const {
  if (u.base != v.base) throw InvalidArgument("inner: base mismatch");
  return u.scalar * std::conj(v.scalar);
}

FiberVector TrivialModel::partial_adjoint(const FiberVector& v, const FiberVector& w) const {
  const GridIndex diff = sub(w.base, v.base);
  const Point z = grid_.point_at(diff);
  if (!cone_.interior_contains(z))
    throw InvalidArgument("partial_adjoint: p(w) - p(v) must lie in Omega");
  const Point x = grid_.point_at(v.base);
  const cdouble phase = omega(form_, x, z);
  return FiberVector::make_scalar(diff, std::conj(v.scalar * phase) * w.scalar);
}

CcrModel::CcrModel(ConeModel cone, LatticeGrid grid, GridIndex a_index, std::size_t family_size,
                   double amplitude)
    : ProductSystemModel(std::move(cone), std::move(grid), std::move(a_index)),
      family_size_(family_size),
      amplitude_(amplitude) {
  if (family_size_ < 1) throw InvalidArgument("ccr model: family size must be >= 1");
  if (!(amplitude_ > 0.0)) throw InvalidArgument("ccr model: amplitude must be positive");
  cell_measure_ = std::pow(grid_.spacing(), static_cast<double>(grid_.dimension()));
}

FiberVector CcrModel::zero(const GridIndex& base) const {
  require_interior(base);
  return FiberVector::make_combo(base, {});
}

FiberVector CcrModel::vacuum(const GridIndex& base) const {
  require_interior(base);
  return FiberVector::make_combo(base, {{cdouble(1.0, 0.0), StepFunction{}}});
}

FiberVector CcrModel::unit_e() const { return vacuum(a_index_); }

GridIndex CcrModel::ray_root(const GridIndex& base) const {
  const Point a = a_point();
  const int n = level_index(cone_, a, grid_.point_at(base));
  return sub(base, scaled(a_index_, n));
}

std::vector<GridIndex> CcrModel::all_cells(const GridIndex& base) const {
  std::vector<GridIndex> cells;
  const Point x = grid_.point_at(base);
  for (const auto& idx : grid_.indices_in_box()) {
    const Point c = grid_.point_at(idx);
    if (cone_.contains(c) && !cone_.contains(sub(c, x))) cells.push_back(idx);
  }
  return cells;
}

std::vector<GridIndex> CcrModel::fiber_cells(const GridIndex& base) const {
  require_interior(base);
  const GridIndex root = ray_root(base);
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = cell_cache_.find(root);
    if (it != cell_cache_.end()) return it->second;
  }
  std::vector<GridIndex> cells = all_cells(root);
  if (cells.size() > family_size_ - 1) cells.resize(family_size_ - 1);
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    cell_cache_[root] = cells;
  }
  return cells;
}

std::vector<FiberVector> CcrModel::generating_family(const GridIndex& base) const {
  std::vector<FiberVector> fam;
  fam.push_back(vacuum(base));
  for (const auto& c : fiber_cells(base)) {
    StepFunction f;
    f.cells = {c};
    f.values = {cdouble(amplitude_, 0.0)};
    fam.push_back(FiberVector::make_combo(base, {{cdouble(1.0, 0.0), std::move(f)}}));
  }
  return fam;
}

FiberVector CcrModel::multiply(const FiberVector& u, const FiberVector& v) const {
  if (u.kind != FiberVector::Kind::Combo || v.kind != FiberVector::Kind::Combo)
    throw InvalidArgument("ccr model: combo payloads expected");
  const GridIndex base = add(u.base, v.base);
  require_interior(base);
  std::map<StepFunction, cdouble> acc;
  for (const auto& tu : u.terms) {
    for (const auto& tv : v.terms) {
      StepFunction shifted = tv.fn.shifted(u.base);
      // Supports are disjoint by the exact cell decomposition of
      // B_{x+y} into B_x and B_y + x, so a sorted merge suffices.
      StepFunction joint;
      joint.cells.resize(tu.fn.cells.size() + shifted.cells.size());
      joint.values.resize(joint.cells.size());
      std::size_t i = 0, j = 0, k = 0;
      while (i < tu.fn.cells.size() && j < shifted.cells.size()) {
        if (tu.fn.cells[i] == shifted.cells[j])
          throw NumericalInconsistency("ccr multiply: overlapping cell supports");
        if (tu.fn.cells[i] < shifted.cells[j]) {
          joint.cells[k] = tu.fn.cells[i];
          joint.values[k++] = tu.fn.values[i++];
        } else {
          joint.cells[k] = shifted.cells[j];
          joint.values[k++] = shifted.values[j++];
        }
      }
      while (i < tu.fn.cells.size()) {
        joint.cells[k] = tu.fn.cells[i];
        joint.values[k++] = tu.fn.values[i++];
      }
      while (j < shifted.cells.size()) {
        joint.cells[k] = shifted.cells[j];
        joint.values[k++] = shifted.values[j++];
      }
      acc[joint] += tu.coeff * tv.coeff;
    }
  }
  std::vector<FiberVector::Term> terms;
  terms.reserve(acc.size());
  for (auto& [fn, coeff] : acc)
    if (coeff != cdouble(0.0, 0.0)) terms.push_back({coeff, fn});
  return FiberVector::make_combo(base, std::move(terms));
}

cdouble CcrModel::inner(const FiberVector& u, const FiberVector& v) const {
  if (u.base != v.base) throw InvalidArgument("inner: base mismatch");
  if (u.kind != FiberVector::Kind::Combo || v.kind != FiberVector::Kind::Combo)
    throw InvalidArgument("ccr model: combo payloads expected");
  cdouble s(0.0, 0.0);
  for (const auto& tu : u.terms)
    for (const auto& tv : v.terms)
      s += tu.coeff * std::conj(tv.coeff) *
           std::exp(step_l2_inner(tu.fn, tv.fn, cell_measure_));
  return s;
}

FiberVector CcrModel::partial_adjoint(const FiberVector& v, const FiberVector& w) const {
  const GridIndex diff = sub(w.base, v.base);
  if (!cone_.interior_contains(grid_.point_at(diff)))
    throw InvalidArgument("partial_adjoint: p(w) - p(v) must lie in Omega");
  const std::vector<FiberVector> gens = generating_family(diff);
  const std::size_t n = gens.size();
  CMatrix gram(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) gram.at(i, j) = inner(gens[j], gens[i]);
  std::vector<cdouble> rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = inner(w, multiply(v, gens[i]));
  const std::vector<cdouble> q = solve_hermitian_psd(gram, rhs, 1e-10);
  FiberVector out = zero(diff);
  for (std::size_t j = 0; j < n; ++j) out = fv_add(out, fv_scale(gens[j], q[j]));
  return out;
}

}  // namespace pslab
