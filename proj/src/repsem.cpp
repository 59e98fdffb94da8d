#include "pslab/repsem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pslab/errors.hpp"

namespace pslab {

Section phi0(const FiberVector& v, const Section& f) {
  const SectionGrid& grid = f.grid();
  const ConeModel& cone = grid.cone();
  const GridIndex& b = v.base;
  const Point bp = grid.lattice().point_at(b);

  Section out(f.grid_ptr(), f.model_ptr());
  int tainted_above = grid.k_max();  // result levels above this are unreliable
  for (std::size_t pos = 0; pos < grid.size(); ++pos) {
    const GridIndex diff = sub(grid.point_index(pos), b);
    if (!cone.interior_contains(grid.lattice().point_at(diff))) continue;
    const auto src = grid.position(diff);
    if (!src) {
      std::ostringstream os;
      os << "phi0: window too small, needs f at " << format_point(grid.lattice().point_at(diff))
         << " for the value at " << format_point(grid.point(pos));
      throw WindowTooSmall(os.str());
    }
    if (grid.level_at(*src) > f.valid_max_level())
      tainted_above = std::min(tainted_above, grid.level_at(pos) - 1);
    out.at(pos) = f.model().multiply(v, f.at(*src));
  }
  out.set_valid_max_level(tainted_above);
  if (f.stable_level()) {
    const int shift = shift_levels(cone, grid.a_point(), bp);
    out.declare_stable(*f.stable_level() + shift);
  }
  return out;
}

bool phi0_feasible(const SectionGrid& grid, const GridIndex& b) {
  const ConeModel& cone = grid.cone();
  for (std::size_t pos = 0; pos < grid.size(); ++pos) {
    const GridIndex diff = sub(grid.point_index(pos), b);
    if (!cone.interior_contains(grid.lattice().point_at(diff))) continue;
    if (!grid.position(diff)) return false;
  }
  return true;
}

AdjointResult adjoint_section(const FiberVector& v, const Section& f) {
  const SectionGrid& grid = f.grid();
  if (v.base != grid.a_index())
    throw InvalidArgument("adjoint_section: v must be based at the distinguished a");
  AdjointResult res{Section(f.grid_ptr(), f.model_ptr()), 0};
  const int top = std::min(grid.k_max(), f.valid_max_level());
  for (std::size_t pos = 0; pos < grid.size(); ++pos) {
    const auto src = grid.position(add(grid.point_index(pos), grid.a_index()));
    if (!src || grid.level_at(*src) > top) {
      ++res.dropped;
      continue;
    }
    res.section.at(pos) = f.model().partial_adjoint(v, f.at(*src));
  }
  res.section.set_valid_max_level(top - 1);
  if (f.stable_level()) res.section.declare_stable(*f.stable_level());
  return res;
}

CompressedOperator phi_matrix(const FiberVector& v,
                              std::shared_ptr<const HilbertCompression> domain,
                              std::shared_ptr<const HilbertCompression> codomain,
                              double residual_tol) {
  CompressedOperator op;
  op.domain = domain;
  op.codomain = codomain;
  op.matrix = CMatrix(codomain->rank(), domain->rank());
  for (std::size_t p = 0; p < domain->rank(); ++p) {
    const Section img = phi0(v, domain->basis_section(p));
    const auto [coords, cheap_residual] = codomain->coordinates(img);
    (void)cheap_residual;
    // Exact residual: materialize the projection and measure the gap, which
    // avoids the cancellation noise of norm^2 - |coords|^2.
    const Section proj = codomain->reconstruct(coords);
    const Section diff = section_axpy(cdouble(1.0, 0.0), img, cdouble(-1.0, 0.0), proj);
    const double residual = std::sqrt(std::max(0.0, stabilized_inner(diff, diff).value.real()));
    const double nrm = section_norm(img);
    if (residual > residual_tol * std::max(1.0, nrm))
      throw NumericalInconsistency("phi_matrix: image escapes the codomain span");
    for (std::size_t q = 0; q < codomain->rank(); ++q) op.matrix.at(q, p) = coords[q];
  }
  return op;
}

EssentialityCurve essentiality_defect(const Section& f, std::size_t n_terms) {
  EssentialityCurve curve;
  curve.norm_squared = stabilized_inner(f, f).value.real();
  const std::vector<FiberVector> basis = f.model().onb(f.grid().a_index(), n_terms);
  double captured = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const AdjointResult fv = adjoint_section(basis[i], f);
    captured += stabilized_inner(fv.section, fv.section).value.real();
    curve.defects.push_back(curve.norm_squared - captured);
  }
  return curve;
}

CompressedOperator alpha_apply(const GridIndex& x, const CompressedOperator& a,
                               std::size_t n_terms,
                               std::shared_ptr<const HilbertCompression> codomain) {
  if (a.domain != a.codomain)
    throw InvalidArgument("alpha_apply: operator must live on a single compression");
  const ProductSystemModel& model = a.domain->generator(0).model();
  const std::vector<FiberVector> basis = model.onb(x, n_terms);
  CompressedOperator out;
  out.domain = codomain;
  out.codomain = codomain;
  out.matrix = CMatrix(codomain->rank(), codomain->rank());
  for (const auto& e : basis) {
    const CompressedOperator m = phi_matrix(e, a.domain, codomain);
    out.matrix = out.matrix + (m.matrix * a.matrix) * m.matrix.adjoint();
  }
  return out;
}

EndoResult endo_from_isometries(const std::vector<CMatrix>& isometries, const CMatrix& a,
                                double ortho_tol) {
  if (isometries.empty()) throw InvalidArgument("endo_from_isometries: empty family");
  const std::size_t n = isometries[0].rows();
  const std::size_t k = isometries[0].cols();
  if (a.rows() != k || a.cols() != k)
    throw InvalidArgument("endo_from_isometries: operator shape does not match the isometries");
  EndoResult res;
  for (const auto& v : isometries)
    if (v.rows() != n || v.cols() != k)
      throw InvalidArgument("endo_from_isometries: inconsistent isometry shapes");
  for (std::size_t i = 0; i < isometries.size(); ++i) {
    for (std::size_t j = 0; j < isometries.size(); ++j) {
      CMatrix prod = isometries[j].adjoint() * isometries[i];
      if (i == j) prod = prod - CMatrix::identity(k);
      res.orthogonality_defect = std::max(res.orthogonality_defect, operator_norm(prod));
    }
  }
  if (res.orthogonality_defect > ortho_tol)
    throw InvalidArgument("endo_from_isometries: family is not isometric with orthogonal ranges");
  res.value = CMatrix(n, n);
  res.alpha_of_one = CMatrix(n, n);
  for (const auto& v : isometries) {
    res.value = res.value + (v * a) * v.adjoint();
    res.alpha_of_one = res.alpha_of_one + v * v.adjoint();
  }
  res.unital = operator_norm(res.alpha_of_one - CMatrix::identity(n)) <= ortho_tol;
  return res;
}

}  // namespace pslab
