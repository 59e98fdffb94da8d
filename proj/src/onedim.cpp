#include "pslab/onedim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pslab/errors.hpp"

namespace pslab {

Point OnedimGrid::point_at(const std::vector<int>& idx) const {
  Point p(lo.size());
  for (std::size_t j = 0; j < lo.size(); ++j)
    p[j] = lo[j] + spacing * static_cast<double>(idx[j]);
  return p;
}

bool OnedimGrid::in_range(const std::vector<int>& idx) const {
  for (std::size_t j = 0; j < size.size(); ++j)
    if (idx[j] < 0 || idx[j] >= size[j]) return false;
  return true;
}

std::vector<int> OnedimGrid::delta_of(const Point& x) const {
  if (x.size() != lo.size()) throw InvalidArgument("delta_of: dimension mismatch");
  std::vector<int> d(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double k = std::round(x[j] / spacing);
    if (spacing * k != x[j]) {
      std::ostringstream os;
      os << "coordinate " << j << " (" << x[j] << ") is not an exact multiple of the spacing "
         << spacing;
      throw InvalidArgument(os.str());
    }
    d[j] = static_cast<int>(k);
  }
  return d;
}

double GridFunction::l2_norm_squared() const {
  double s = 0.0;
  for (const auto& [idx, v] : values) s += std::norm(v);
  return s;
}

double GridFunction::l2_norm() const { return std::sqrt(l2_norm_squared()); }

cdouble grid_inner(const GridFunction& f, const GridFunction& g) {
  cdouble s(0.0, 0.0);
  const auto& small = f.values.size() <= g.values.size() ? f.values : g.values;
  const bool small_is_f = f.values.size() <= g.values.size();
  const auto& big = small_is_f ? g.values : f.values;
  for (const auto& [idx, v] : small) {
    auto it = big.find(idx);
    if (it == big.end()) continue;
    s += small_is_f ? v * std::conj(it->second) : it->second * std::conj(v);
  }
  return s;
}

GridFunction grid_axpy(cdouble alpha, const GridFunction& f, cdouble beta,
                       const GridFunction& g) {
  GridFunction out;
  out.grid = f.grid;
  for (const auto& [idx, v] : f.values) out.values[idx] += alpha * v;
  for (const auto& [idx, v] : g.values) out.values[idx] += beta * v;
  for (auto it = out.values.begin(); it != out.values.end();) {
    if (it->second == cdouble(0.0, 0.0))
      it = out.values.erase(it);
    else
      ++it;
  }
  return out;
}

double grid_distance(const GridFunction& f, const GridFunction& g) {
  return grid_axpy(1.0, f, -1.0, g).l2_norm();
}

GridFunction u_apply(const MultiplierForm& form, const Point& x, const GridFunction& f) {
  const std::vector<int> delta = f.grid.delta_of(x);
  GridFunction out;
  out.grid = f.grid;
  for (const auto& [idx, v] : f.values) {
    std::vector<int> nidx(idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) nidx[j] = idx[j] + delta[j];
    if (!f.grid.in_range(nidx)) {
      std::ostringstream os;
      os << "u_apply: support escapes the grid at index (";
      for (std::size_t j = 0; j < nidx.size(); ++j) os << (j ? "," : "") << nidx[j];
      os << ")";
      throw WindowTooSmall(os.str());
    }
    // y - x is exactly the source point.
    out.values[nidx] = omega(form, x, f.grid.point_at(idx)) * v;
  }
  return out;
}

DeltaOperator ad_u(const MultiplierForm& form, const Point& x, const DeltaOperator& op) {
  const std::vector<int> delta = op.grid.delta_of(x);
  DeltaOperator out;
  out.grid = op.grid;
  out.support.reserve(op.support.size());
  std::vector<cdouble> phases(op.support.size());
  for (std::size_t p = 0; p < op.support.size(); ++p) {
    std::vector<int> nidx(op.support[p].size());
    for (std::size_t j = 0; j < nidx.size(); ++j) nidx[j] = op.support[p][j] + delta[j];
    if (!op.grid.in_range(nidx)) throw WindowTooSmall("ad_u: operator support escapes the grid");
    phases[p] = omega(form, x, op.grid.point_at(op.support[p]));
    out.support.push_back(std::move(nidx));
  }
  out.m = CMatrix(op.support.size(), op.support.size());
  for (std::size_t p = 0; p < op.support.size(); ++p)
    for (std::size_t q = 0; q < op.support.size(); ++q)
      out.m.at(p, q) = phases[p] * std::conj(phases[q]) * op.m.at(p, q);
  return out;
}

double delta_operator_distance(const DeltaOperator& a, const DeltaOperator& b) {
  // Align supports; absent entries are zero.
  std::map<std::pair<std::vector<int>, std::vector<int>>, cdouble> entries;
  for (std::size_t p = 0; p < a.support.size(); ++p)
    for (std::size_t q = 0; q < a.support.size(); ++q)
      entries[{a.support[p], a.support[q]}] += a.m.at(p, q);
  for (std::size_t p = 0; p < b.support.size(); ++p)
    for (std::size_t q = 0; q < b.support.size(); ++q)
      entries[{b.support[p], b.support[q]}] -= b.m.at(p, q);
  double worst = 0.0;
  for (const auto& [key, v] : entries) worst = std::max(worst, std::abs(v));
  return worst;
}

}  // namespace pslab
