#pragma once

#include <memory>
#include <vector>

#include "pslab/sections.hpp"

namespace pslab {

// Creation-type action: (phi0(v) f)(x) = v * f(x - b) for x - b in Omega,
// zero elsewhere, where b = p(v). Raises WindowTooSmall if the shifted read
// leaves the stored window. A k-stable f yields a declared stability level
// k + shift_levels(b).
Section phi0(const FiberVector& v, const Section& f);

// True when every window point x with x - b in Omega can be read back from
// the window, i.e. phi0 with a vector based at b never escapes.
bool phi0_feasible(const SectionGrid& grid, const GridIndex& b);

struct AdjointResult {
  Section section;
  std::size_t dropped = 0;  // top-level values lost to the window edge
};

// Adjoint action f_v(x) = v^* f(x + a) for v in E(a). Values whose source
// x + a lies beyond the window are dropped (and counted); the result's valid
// window shrinks by one level.
AdjointResult adjoint_section(const FiberVector& v, const Section& f);

struct CompressedOperator {
  CMatrix matrix;
  std::shared_ptr<const HilbertCompression> domain;
  std::shared_ptr<const HilbertCompression> codomain;
};

// Matrix of f -> phi0(v) f in the orthonormal coordinates of the given
// compressions. Throws NumericalInconsistency when an image escapes the
// codomain span beyond residual_tol (relative).
CompressedOperator phi_matrix(const FiberVector& v,
                              std::shared_ptr<const HilbertCompression> domain,
                              std::shared_ptr<const HilbertCompression> codomain,
                              double residual_tol = 1e-8);

struct EssentialityCurve {
  double norm_squared = 0.0;
  std::vector<double> defects;  // defect after 1..N adjoint terms
  double final_defect() const { return defects.empty() ? norm_squared : defects.back(); }
};

// ||f||^2 - sum_{i<=n} ||f_{v_i}||^2 for v_i the fibre onb at a.
EssentialityCurve essentiality_defect(const Section& f, std::size_t n_terms);

// alpha_x(A) = sum_{n<=N} phi(e_n(x)) A phi(e_n(x))^* on compressions.
CompressedOperator alpha_apply(const GridIndex& x, const CompressedOperator& a,
                               std::size_t n_terms,
                               std::shared_ptr<const HilbertCompression> codomain);

struct EndoResult {
  CMatrix value;          // sum V_i A V_i^*
  CMatrix alpha_of_one;   // sum V_i V_i^*
  bool unital = false;
  double orthogonality_defect = 0.0;
};

// Endomorphism from a family of isometries with orthogonal ranges. Throws
// InvalidArgument if V_j^* V_i deviates from delta_ij beyond `ortho_tol`.
EndoResult endo_from_isometries(const std::vector<CMatrix>& isometries, const CMatrix& a,
                                double ortho_tol = 1e-10);

}  // namespace pslab
