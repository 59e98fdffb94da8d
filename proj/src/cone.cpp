#include "pslab/cone.hpp"

#include <cmath>
#include <sstream>

#include "pslab/errors.hpp"
#include "pslab/linalg.hpp"

namespace pslab {

Point add(const Point& x, const Point& y) {
  if (x.size() != y.size()) throw InvalidArgument("point add: dimension mismatch");
  Point r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + y[i];
  return r;
}

Point sub(const Point& x, const Point& y) {
  if (x.size() != y.size()) throw InvalidArgument("point sub: dimension mismatch");
  Point r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
  return r;
}

Point scaled(const Point& x, double s) {
  Point r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] * s;
  return r;
}

std::string format_point(const Point& x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) os << ", ";
    os << x[i];
  }
  os << ")";
  return os.str();
}

ConeModel ConeModel::orthant(std::size_t dimension) {
  if (dimension == 0) throw InvalidArgument("cone dimension must be positive");
  return ConeModel(ConeVariant::Orthant, dimension);
}

ConeModel ConeModel::lorentz(std::size_t dimension) {
  if (dimension < 2) throw InvalidArgument("lorentz cone needs dimension >= 2");
  return ConeModel(ConeVariant::Lorentz, dimension);
}

ConeModel ConeModel::halfspace(std::size_t dimension, std::vector<std::vector<double>> normals) {
  if (dimension == 0) throw InvalidArgument("cone dimension must be positive");
  if (normals.empty()) throw InvalidArgument("halfspace cone needs at least one normal");
  for (const auto& n : normals)
    if (n.size() != dimension) throw InvalidArgument("halfspace normal has wrong dimension");
  ConeModel c(ConeVariant::Halfspace, dimension);
  c.normals_ = std::move(normals);
  return c;
}

std::string ConeModel::variant_name() const {
  switch (variant_) {
    case ConeVariant::Orthant: return "orthant";
    case ConeVariant::Lorentz: return "lorentz";
    case ConeVariant::Halfspace: return "halfspace";
  }
  return "?";
}

void ConeModel::check_dim(const Point& x) const {
  if (x.size() != dim_) {
    std::ostringstream os;
    os << "dimension mismatch: cone is " << dim_ << "-dimensional, point has " << x.size()
       << " coordinates";
    throw InvalidArgument(os.str());
  }
}

bool ConeModel::contains(const Point& x) const {
  check_dim(x);
  switch (variant_) {
    case ConeVariant::Orthant:
      for (double c : x)
        if (!(c >= 0.0)) return false;
      return true;
    case ConeVariant::Lorentz: {
      const double t = x[dim_ - 1];
      if (!(t >= 0.0)) return false;
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < dim_; ++i) s += x[i] * x[i];
      return t * t >= s;
    }
    case ConeVariant::Halfspace:
      for (const auto& n : normals_) {
        double dot = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) dot += n[i] * x[i];
        if (!(dot >= 0.0)) return false;
      }
      return true;
  }
  return false;
}

bool ConeModel::interior_contains(const Point& x) const {
  check_dim(x);
  switch (variant_) {
    case ConeVariant::Orthant:
      for (double c : x)
        if (!(c > 0.0)) return false;
      return true;
    case ConeVariant::Lorentz: {
      const double t = x[dim_ - 1];
      if (!(t > 0.0)) return false;
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < dim_; ++i) s += x[i] * x[i];
      return t * t > s;
    }
    case ConeVariant::Halfspace:
      for (const auto& n : normals_) {
        double dot = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) dot += n[i] * x[i];
        if (!(dot > 0.0)) return false;
      }
      return true;
  }
  return false;
}

namespace {

// Search for a point strictly inside every halfspace except (optionally)
// one, which must be strictly violated. Least-squares target first, then a
// seeded random search.
std::optional<Point> find_strict_point(const ConeModel& cone,
                                       std::optional<std::size_t> violated,
                                       std::uint64_t seed) {
  const auto& normals = cone.normals();
  const std::size_t d = cone.dimension();
  auto admissible = [&](const Point& x) {
    for (std::size_t i = 0; i < normals.size(); ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < d; ++j) dot += normals[i][j] * x[j];
      if (violated && i == *violated) {
        if (!(dot < 0.0)) return false;
      } else if (!(dot > 0.0)) {
        return false;
      }
    }
    return true;
  };

  std::vector<double> target(normals.size(), 1.0);
  if (violated) target[*violated] = -1.0;
  std::vector<double> x = least_squares(normals, target);
  if (!x.empty() && admissible(x)) return x;

  // Scale-free random probe.
  CounterRng rng(seed, violated ? 1000 + *violated : 0);
  std::uint64_t c = 0;
  for (int attempt = 0; attempt < 20000; ++attempt) {
    Point p(d);
    for (std::size_t j = 0; j < d; ++j) p[j] = rng.uniform_at(c++, -1.0, 1.0);
    if (admissible(p)) return p;
  }
  return std::nullopt;
}

}  // namespace

ConeValidation validate_cone(const ConeModel& cone, std::uint64_t seed) {
  ConeValidation v;
  const std::size_t d = cone.dimension();
  switch (cone.variant()) {
    case ConeVariant::Orthant: {
      v.pointed = true;
      v.spanning = true;
      v.witness = Point(d, 1.0);
      v.diagnostic = "orthant: pointed and spanning by construction";
      return v;
    }
    case ConeVariant::Lorentz: {
      v.pointed = true;
      v.spanning = true;
      Point w(d, 0.0);
      w[d - 1] = 1.0;
      v.witness = w;
      v.diagnostic = "lorentz: pointed and spanning by construction";
      return v;
    }
    case ConeVariant::Halfspace: {
      const std::size_t rank = real_rank(cone.normals());
      v.pointed = (rank == d);
      if (!v.pointed) {
        std::ostringstream os;
        os << "not pointed: normal matrix has rank " << rank << " < " << d
           << ", so P contains a line";
        v.diagnostic = os.str();
        return v;
      }
      auto witness = find_strict_point(cone, std::nullopt, seed);
      v.spanning = witness.has_value();
      if (!v.spanning) {
        v.diagnostic = "not spanning: no strictly feasible interior point found";
        return v;
      }
      v.witness = witness;
      // Irredundancy probe: each facet's strict complement region must be
      // reachable while all other facets stay strict.
      for (std::size_t i = 0; i < cone.normals().size(); ++i) {
        if (!find_strict_point(cone, i, seed)) {
          v.irredundant = false;
          std::ostringstream os;
          os << "facet " << i << " appears redundant: no point violates it alone";
          v.diagnostic = os.str();
          return v;
        }
      }
      v.diagnostic = "halfspace: pointed (full rank), spanning, irredundant";
      return v;
    }
  }
  return v;
}

int archimedean_index(const ConeModel& cone, const Point& a, const Point& x, int iteration_cap) {
  if (!cone.interior_contains(a)) throw InvalidArgument("archimedean_index: a must be interior");
  Point na = a;
  for (int n = 1; n <= iteration_cap; ++n) {
    if (cone.interior_contains(sub(na, x))) return n;
    na = add(na, a);
  }
  throw IterationCapExceeded("archimedean_index: cap exceeded; degenerate input?");
}

int level_index(const ConeModel& cone, const Point& a, const Point& x, int iteration_cap) {
  if (!cone.interior_contains(a)) throw InvalidArgument("level_index: a must be interior");
  if (!cone.interior_contains(x)) throw InvalidArgument("level_index: x must lie in Omega");
  Point y = x;
  for (int k = 0; k <= iteration_cap; ++k) {
    Point y_next = sub(y, a);
    if (!cone.interior_contains(y_next)) return k;
    y = y_next;
  }
  throw IterationCapExceeded("level_index: cap exceeded; degenerate input?");
}

bool slab_contains(const ConeModel& cone, const Point& a, int k, const Point& x) {
  if (k < 0) throw InvalidArgument("slab_contains: negative level");
  Point shifted = x;
  for (int i = 0; i < k; ++i) shifted = sub(shifted, a);
  if (!cone.interior_contains(shifted)) return false;
  return !cone.interior_contains(sub(shifted, a));
}

bool slab_b_contains(const ConeModel& cone, const Point& a, const Point& b, const Point& x) {
  Point rel = sub(x, b);
  if (!cone.interior_contains(rel)) return false;
  return !cone.interior_contains(sub(rel, a));
}

int m_index(const ConeModel& cone, const Point& a, const Point& b, int k, const Point& x,
            int iteration_cap) {
  if (!slab_contains(cone, a, k, x)) throw InvalidArgument("m_index: x must lie in L_k");
  {
    Point rel = b;
    for (int i = 0; i < k; ++i) rel = sub(rel, a);
    if (!cone.interior_contains(rel))
      throw InvalidArgument("m_index: b - k*a must lie in Omega");
  }
  Point y = sub(x, b);
  for (int m = 0; m <= iteration_cap; ++m) {
    if (cone.interior_contains(y)) return m;
    y = add(y, a);
  }
  throw IterationCapExceeded("m_index: cap exceeded");
}

Point chi(const ConeModel& cone, const Point& a, const Point& b, int k, const Point& x,
          int iteration_cap) {
  const int m = m_index(cone, a, b, k, x, iteration_cap);
  return add(x, scaled(a, static_cast<double>(m)));
}

Point chi_inverse(const ConeModel& cone, const Point& a, const Point& b, int k, const Point& y,
                  int iteration_cap) {
  if (!slab_b_contains(cone, a, b, y))
    throw InvalidArgument("chi_inverse: y must lie in L_b");
  Point ka = scaled(a, static_cast<double>(k));
  Point z = y;
  for (int n = 0; n <= iteration_cap; ++n) {
    Point z_next = sub(z, a);
    if (!cone.interior_contains(sub(z_next, ka))) return z;
    z = z_next;
  }
  throw IterationCapExceeded("chi_inverse: cap exceeded");
}

int shift_levels(const ConeModel& cone, const Point& a, const Point& b, int iteration_cap) {
  Point ja(b.size(), 0.0);
  for (int j = 0; j <= iteration_cap; ++j) {
    if (cone.contains(sub(ja, b))) return j;
    ja = add(ja, a);
  }
  throw IterationCapExceeded("shift_levels: cap exceeded");
}

GridIndex add(const GridIndex& a, const GridIndex& b) {
  if (a.v.size() != b.v.size()) throw InvalidArgument("grid index add: dimension mismatch");
  GridIndex r = a;
  for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] += b.v[i];
  return r;
}

GridIndex sub(const GridIndex& a, const GridIndex& b) {
  if (a.v.size() != b.v.size()) throw InvalidArgument("grid index sub: dimension mismatch");
  GridIndex r = a;
  for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] -= b.v[i];
  return r;
}

GridIndex scaled(const GridIndex& a, std::int64_t m) {
  GridIndex r = a;
  for (auto& x : r.v) x *= m;
  return r;
}

LatticeGrid::LatticeGrid(double spacing, Point box_lo, Point box_hi)
    : h_(spacing), lo_(std::move(box_lo)), hi_(std::move(box_hi)) {
  if (!(h_ > 0.0)) throw InvalidArgument("lattice spacing must be positive");
  if (lo_.size() != hi_.size() || lo_.empty()) throw InvalidArgument("lattice box: bad corners");
  for (std::size_t j = 0; j < lo_.size(); ++j)
    if (!(hi_[j] > lo_[j])) throw InvalidArgument("lattice box: hi must exceed lo");
  imin_.resize(lo_.size());
  imax_.resize(lo_.size());
  for (std::size_t j = 0; j < lo_.size(); ++j) {
    imin_[j] = static_cast<std::int64_t>(std::ceil(lo_[j] / h_ - 1e-12));
    imax_[j] = static_cast<std::int64_t>(std::floor(hi_[j] / h_ + 1e-12));
  }
}

Point LatticeGrid::point_at(const GridIndex& i) const {
  if (i.v.size() != lo_.size()) throw InvalidArgument("point_at: index dimension mismatch");
  Point p(i.v.size());
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = h_ * static_cast<double>(i.v[j]);
  return p;
}

bool LatticeGrid::in_box(const GridIndex& i) const {
  for (std::size_t j = 0; j < i.v.size(); ++j)
    if (i.v[j] < imin_[j] || i.v[j] > imax_[j]) return false;
  return true;
}

bool LatticeGrid::in_box(const Point& x) const {
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j] < lo_[j] || x[j] > hi_[j]) return false;
  return true;
}

bool LatticeGrid::is_lattice_vector(const Point& v) const {
  for (double c : v) {
    const double k = std::round(c / h_);
    if (h_ * k != c) return false;
  }
  return true;
}

GridIndex LatticeGrid::index_of(const Point& v) const {
  GridIndex g;
  g.v.resize(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double k = std::round(v[j] / h_);
    if (h_ * k != v[j]) {
      std::ostringstream os;
      os << "coordinate " << j << " (" << v[j] << ") is not an exact multiple of the spacing "
         << h_;
      throw InvalidArgument(os.str());
    }
    g.v[j] = static_cast<std::int64_t>(k);
  }
  return g;
}

std::vector<GridIndex> LatticeGrid::indices_in_box() const {
  std::vector<GridIndex> out;
  const std::size_t d = lo_.size();
  GridIndex cur;
  cur.v.assign(imin_.begin(), imin_.end());
  while (true) {
    out.push_back(cur);
    std::size_t j = d;
    while (j > 0) {
      --j;
      if (cur.v[j] < imax_[j]) {
        ++cur.v[j];
        for (std::size_t l = j + 1; l < d; ++l) cur.v[l] = imin_[l];
        break;
      }
      if (j == 0) return out;
    }
  }
}

std::vector<GridIndex> lattice_slab(const ConeModel& cone, const Point& a,
                                    const LatticeGrid& grid, int k) {
  if (!grid.is_lattice_vector(a))
    throw InvalidArgument("lattice_slab: a is not an exact lattice vector");
  std::vector<GridIndex> out;
  for (const auto& idx : grid.indices_in_box()) {
    const Point x = grid.point_at(idx);
    if (slab_contains(cone, a, k, x)) out.push_back(idx);
  }
  return out;
}

}  // namespace pslab
