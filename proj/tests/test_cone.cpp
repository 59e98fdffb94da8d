#include <doctest.h>

#include <cmath>
#include <set>

#include "pslab/cone.hpp"
#include "pslab/errors.hpp"

using namespace pslab;

namespace {

// Independent oracle: scan n upward using only interior membership.
int archimedean_oracle(const ConeModel& cone, const Point& a, const Point& x) {
  for (int n = 1;; ++n) {
    Point na = scaled(a, static_cast<double>(n));
    if (cone.interior_contains(sub(na, x))) return n;
    REQUIRE(n < 100000);
  }
}

int level_oracle(const ConeModel& cone, const Point& a, const Point& x) {
  int k = 0;
  while (cone.interior_contains(sub(x, scaled(a, static_cast<double>(k + 1))))) ++k;
  return k;
}

}  // namespace

TEST_CASE("interior membership across the built-in cones") {
  const ConeModel orthant = ConeModel::orthant(2);
  CHECK(orthant.interior_contains({0.5, 2.5}));
  const ConeModel lorentz = ConeModel::lorentz(2);
  CHECK_FALSE(lorentz.interior_contains({0.3, 0.3}));  // boundary, strict test fails
  CHECK(lorentz.interior_contains({0.3, 2.0}));
  CHECK_THROWS_AS((void)orthant.interior_contains({1.0, 2.0, 3.0}), InvalidArgument);
}

TEST_CASE("closed membership") {
  const ConeModel orthant = ConeModel::orthant(2);
  CHECK(orthant.contains({0.0, 0.0}));
  CHECK_FALSE(orthant.contains({-0.1, 1.0}));
  const ConeModel lorentz3 = ConeModel::lorentz(3);
  CHECK(lorentz3.contains({0.6, 0.8, 1.0}));  // norm of (0.6, 0.8) equals 1.0
  CHECK_FALSE(lorentz3.interior_contains({0.6, 0.8, 1.0}));
}

TEST_CASE("cone validation") {
  CHECK(validate_cone(ConeModel::orthant(3)).ok());
  const ConeValidation half_plane = validate_cone(ConeModel::halfspace(2, {{1.0, 0.0}}));
  CHECK_FALSE(half_plane.pointed);
  const ConeValidation quadrant =
      validate_cone(ConeModel::halfspace(2, {{1.0, 0.0}, {0.0, 1.0}}));
  CHECK(quadrant.ok());
  REQUIRE(quadrant.witness.has_value());
  CHECK((*quadrant.witness)[0] == doctest::Approx(1.0));
  CHECK((*quadrant.witness)[1] == doctest::Approx(1.0));
  // A redundant facet description is flagged.
  const ConeValidation redundant = validate_cone(
      ConeModel::halfspace(2, {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}}));
  CHECK(redundant.pointed);
  CHECK(redundant.spanning);
  CHECK_FALSE(redundant.irredundant);
}

TEST_CASE("archimedean index") {
  const ConeModel orthant = ConeModel::orthant(2);
  const Point a{1.0, 1.0};
  CHECK(archimedean_index(orthant, a, {3.2, 0.1}) == 4);
  CHECK(archimedean_index(orthant, a, {3.2, 0.1}) == archimedean_oracle(orthant, a, {3.2, 0.1}));
  CHECK(archimedean_index(orthant, a, {0.0, 0.0}) == 1);
  const ConeModel lorentz = ConeModel::lorentz(2);
  CHECK(archimedean_index(lorentz, {0.0, 1.0}, {0.5, 0.0}) == 1);
  // Minimality certificate: n - 1 fails (or n == 1).
  const int n = archimedean_index(orthant, a, {7.3, 2.1});
  CHECK(orthant.interior_contains(sub(scaled(a, n), {7.3, 2.1})));
  CHECK_FALSE(orthant.interior_contains(sub(scaled(a, n - 1), {7.3, 2.1})));
}

TEST_CASE("level index against the exhaustive oracle") {
  const ConeModel orthant = ConeModel::orthant(2);
  const Point a{1.0, 1.0};
  CHECK(level_index(orthant, a, {0.5, 2.5}) == 0);
  CHECK(level_index(orthant, a, {2.5, 2.5}) == 2);
  const ConeModel lorentz = ConeModel::lorentz(2);
  CHECK(level_index(lorentz, {0.0, 1.0}, {0.3, 2.0}) == 1);
  CHECK(level_index(lorentz, {0.0, 1.0}, {0.3, 2.0}) ==
        level_oracle(lorentz, {0.0, 1.0}, {0.3, 2.0}));
  CHECK_THROWS_AS(level_index(orthant, a, {-1.0, 2.0}), InvalidArgument);
}

TEST_CASE("m index, chi and its inverse") {
  const ConeModel orthant = ConeModel::orthant(2);
  const Point a{1.0, 1.0};
  CHECK(m_index(orthant, a, {2.0, 3.0}, 0, {0.5, 0.2}) == 3);
  CHECK(m_index(orthant, a, {0.25, 0.25}, 0, {0.5, 0.3}) == 0);  // already past b
  CHECK(m_index(orthant, a, {1.5, 1.5}, 0, {0.9, 0.1}) == 2);

  const Point image = chi(orthant, a, {2.0, 3.0}, 0, {0.5, 0.2});
  CHECK(image[0] == doctest::Approx(3.5));
  CHECK(image[1] == doctest::Approx(3.2));
  CHECK(slab_b_contains(orthant, a, {2.0, 3.0}, image));

  const ConeModel lorentz = ConeModel::lorentz(2);
  const Point la{0.0, 1.0};
  const Point limage = chi(lorentz, la, {0.0, 2.0}, 0, {0.1, 0.5});
  CHECK(limage[0] == doctest::Approx(0.1));
  CHECK(limage[1] == doctest::Approx(2.5));

  const Point back = chi_inverse(orthant, a, {2.0, 3.0}, 0, {3.5, 3.2});
  CHECK(back[0] == doctest::Approx(0.5));
  CHECK(back[1] == doctest::Approx(0.2));
  CHECK(slab_contains(orthant, a, 0, back));

  // n0 = 0: the point is already as low as its ray goes within L_b.
  const Point b2{0.25, 3.0};
  const Point y2{0.5, 3.3};
  REQUIRE(slab_b_contains(orthant, a, b2, y2));
  const Point same = chi_inverse(orthant, a, b2, 0, y2);
  CHECK(same[0] == doctest::Approx(0.5));
  CHECK(same[1] == doctest::Approx(3.3));

  // Round trip.
  const Point x{0.9, 0.1};
  const Point rt = chi_inverse(orthant, a, {1.5, 1.5}, 0, chi(orthant, a, {1.5, 1.5}, 0, x));
  CHECK(rt[0] == doctest::Approx(0.9));
  CHECK(rt[1] == doctest::Approx(0.1));

  CHECK_THROWS_AS(chi_inverse(orthant, a, {2.0, 3.0}, 0, {0.1, 0.1}), InvalidArgument);
  CHECK_THROWS_AS(m_index(orthant, a, {2.0, 3.0}, 1, {0.5, 0.2}), InvalidArgument);
}

TEST_CASE("singleton property of the ray meeting L_b") {
  const ConeModel orthant = ConeModel::orthant(2);
  const Point a{1.0, 1.0};
  const Point b{2.0, 3.0};
  for (const Point x : {Point{0.5, 0.2}, Point{0.9, 0.9}, Point{3.7, 0.4}}) {
    REQUIRE(slab_contains(orthant, a, 0, x));
    int hits = 0;
    for (int m = 0; m <= 12; ++m)
      if (slab_b_contains(orthant, a, b, add(x, scaled(a, static_cast<double>(m))))) ++hits;
    CHECK(hits == 1);
  }
}

TEST_CASE("shift levels") {
  const ConeModel orthant = ConeModel::orthant(2);
  const Point a{1.0, 1.0};
  CHECK(shift_levels(orthant, a, a) == 1);
  CHECK(shift_levels(orthant, a, {2.0, 2.0}) == 2);
  CHECK(shift_levels(orthant, a, {1.0, 2.0}) == 2);
  CHECK(shift_levels(orthant, a, {0.5, 0.25}) == 1);
}

TEST_CASE("lattice grid and slab enumeration") {
  const ConeModel orthant = ConeModel::orthant(2);
  const Point a{1.0, 1.0};
  const LatticeGrid grid(0.5, {0.0, 0.0}, {2.0, 2.0});
  CHECK(grid.is_lattice_vector(a));
  CHECK_FALSE(grid.is_lattice_vector({0.3, 1.0}));
  CHECK_THROWS_WITH_AS(grid.index_of({0.3, 1.0}),
                       doctest::Contains("coordinate 0"), InvalidArgument);

  const auto slab0 = lattice_slab(orthant, a, grid, 0);
  std::set<std::vector<std::int64_t>> points;
  for (const auto& idx : slab0) points.insert(idx.v);
  CHECK(points.count({1, 3}) == 1);   // (0.5, 1.5)
  CHECK(points.count({3, 3}) == 0);   // (1.5, 1.5) sits in L_1
  CHECK(lattice_slab(orthant, a, grid, 5).empty());

  // Translation: slab k shifted by a lands in slab k+1 (within the box).
  const GridIndex ai = grid.index_of(a);
  for (const auto& idx : slab0) {
    const GridIndex up = add(idx, ai);
    if (!grid.in_box(up)) continue;
    CHECK(slab_contains(orthant, a, 1, grid.point_at(up)));
  }
}

TEST_CASE("lattice partition properties on seeded points") {
  const ConeModel lorentz = ConeModel::lorentz(2);
  const Point a{0.0, 1.0};
  const LatticeGrid grid(0.25, {-4.0, 0.0}, {4.0, 6.0});
  int checked = 0;
  for (const auto& idx : grid.indices_in_box()) {
    const Point x = grid.point_at(idx);
    if (!lorentz.interior_contains(x)) continue;
    const int n = level_index(lorentz, a, x);
    // Exactly one slab claims x.
    int owners = 0;
    for (int k = 0; k <= n + 2; ++k)
      if (slab_contains(lorentz, a, k, x)) ++owners;
    CHECK(owners == 1);
    CHECK(slab_contains(lorentz, a, n, x));
    CHECK(slab_contains(lorentz, a, 0, sub(x, scaled(a, static_cast<double>(n)))));
    const GridIndex up = add(idx, grid.index_of(a));
    if (grid.in_box(up)) CHECK(level_index(lorentz, a, grid.point_at(up)) == n + 1);
    ++checked;
  }
  CHECK(checked > 400);
}

TEST_CASE("monte carlo measure estimation") {
  const ConeModel orthant = ConeModel::orthant(2);
  const Point a{1.0, 1.0};

  // Below a the slab fills the whole unit box.
  const auto est = estimate_measure(
      [&](const Point& x) { return slab_contains(orthant, a, 0, x); }, {0.0, 0.0}, {1.0, 1.0},
      50000, 7);
  CHECK(std::abs(est.value - 1.0) <= 3.0 * est.standard_error + 1e-12);

  const auto nothing = estimate_measure([](const Point&) { return false; }, {0.0, 0.0},
                                        {1.0, 1.0}, 1000, 7);
  CHECK(nothing.value == 0.0);
  CHECK(nothing.standard_error == 0.0);

  const auto interior = estimate_measure(
      [&](const Point& x) { return orthant.interior_contains(x); }, {0.0, 0.0}, {1.0, 1.0},
      50000, 7);
  CHECK(std::abs(interior.value - 1.0) <= 3.0 * interior.standard_error + 1e-12);

  // Reproducibility is bit-exact.
  const auto again = estimate_measure(
      [&](const Point& x) { return slab_contains(orthant, a, 0, x); }, {0.0, 0.0}, {1.0, 1.0},
      50000, 7);
  CHECK(again.value == est.value);
  CHECK(again.standard_error == est.standard_error);
  CHECK(again.hits == est.hits);

  CHECK_THROWS_AS(estimate_measure([](const Point&) { return true; }, Point{1.0, 1.0},
                                   Point{0.0, 2.0}, 10, 1),
                  InvalidArgument);
}

TEST_CASE("iteration caps are reported") {
  const ConeModel orthant = ConeModel::orthant(2);
  CHECK_THROWS_AS(archimedean_index(orthant, {1.0, 1.0}, {1e6, 0.0}, 100),
                  IterationCapExceeded);
}

TEST_CASE("sampling is independent of how work would be split") {
  // Draws are indexed by sample counter, so two half-range workers must
  // reproduce the single-pass hit count exactly.
  const ConeModel orthant = ConeModel::orthant(2);
  const Point a{1.0, 1.0};
  const std::int64_t n = 20000;
  const std::uint64_t seed = 99;
  const auto full = estimate_measure(
      [&](const Point& x) { return slab_contains(orthant, a, 0, x); }, {0.0, 0.0}, {2.0, 2.0},
      n, seed);
  const CounterRng rng(seed);
  std::int64_t hits = 0;
  for (std::int64_t lo : {std::int64_t(0), n / 2}) {
    const std::int64_t hi = lo == 0 ? n / 2 : n;
    for (std::int64_t i = lo; i < hi; ++i) {
      Point x{rng.uniform_at(static_cast<std::uint64_t>(i) * 2 + 0, 0.0, 2.0),
              rng.uniform_at(static_cast<std::uint64_t>(i) * 2 + 1, 0.0, 2.0)};
      if (slab_contains(orthant, a, 0, x)) ++hits;
    }
  }
  CHECK(hits == full.hits);
}
