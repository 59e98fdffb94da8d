#include <doctest.h>

#include <cmath>

#include "pslab/errors.hpp"
#include "pslab/onedim.hpp"
#include "pslab/rng.hpp"

using namespace pslab;

namespace {

OnedimGrid make_grid() {
  OnedimGrid g;
  g.spacing = 0.25;
  g.lo = {-4.0, -4.0};
  g.size = {32, 32};
  return g;
}

GridFunction sample_function(const OnedimGrid& grid, std::uint64_t seed) {
  CounterRng rng(seed);
  GridFunction f;
  f.grid = grid;
  for (int t = 0; t < 6; ++t) {
    std::vector<int> idx{10 + static_cast<int>(rng.next_bits() % 8),
                         10 + static_cast<int>(rng.next_bits() % 8)};
    f.values[idx] = cdouble(rng.next_uniform(-1, 1), rng.next_uniform(-1, 1));
  }
  return f;
}

}  // namespace

TEST_CASE("multiplier identity") {
  const MultiplierForm form = MultiplierForm::from_rows({{0.0, 1.0}, {0.0, 0.0}});
  CounterRng rng(4);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    Point x{rng.next_uniform(-2, 2), rng.next_uniform(-2, 2)};
    Point y{rng.next_uniform(-2, 2), rng.next_uniform(-2, 2)};
    Point z{rng.next_uniform(-2, 2), rng.next_uniform(-2, 2)};
    worst = std::max(worst, multiplier_defect(form, x, y, z));
  }
  CHECK(worst <= 1e-12);

  const MultiplierForm zero = MultiplierForm::zeros(2);
  CHECK(multiplier_defect(zero, {0.3, 0.4}, {1.0, -1.0}, {0.2, 0.9}) == 0.0);
  CHECK(multiplier_defect(form, {0.3, 0.4}, {1.0, -1.0}, {0.0, 0.0}) == 0.0);

  // The exponent antisymmetrizes the expected way.
  const Point x{0.7, -0.3}, y{-1.2, 0.4};
  const cdouble ratio = omega(form, x, y) / omega(form, y, x);
  const cdouble expected =
      std::polar(1.0, form.exponent(x, y) - form.exponent(y, x));
  CHECK(std::abs(ratio - expected) < 1e-14);
}

TEST_CASE("translation unitaries") {
  const OnedimGrid grid = make_grid();
  const MultiplierForm zero = MultiplierForm::zeros(2);
  const MultiplierForm form = MultiplierForm::from_rows({{0.0, 1.0}, {0.0, 0.0}});
  const GridFunction f = sample_function(grid, 1);

  SUBCASE("plain translation without a phase") {
    const Point x{0.5, -0.25};
    const GridFunction g = u_apply(zero, x, f);
    for (const auto& [idx, val] : f.values) {
      std::vector<int> shifted{idx[0] + 2, idx[1] - 1};
      REQUIRE(g.values.count(shifted) == 1);
      CHECK(g.values.at(shifted) == val);
    }
  }

  SUBCASE("norm preservation") {
    const GridFunction g = u_apply(form, {0.75, 0.5}, f);
    CHECK(g.l2_norm_squared() ==
          doctest::Approx(f.l2_norm_squared()).epsilon(1e-12));
  }

  SUBCASE("projective relation") {
    const Point x{0.5, 0.25}, y{-0.25, 0.5};
    const GridFunction lhs = u_apply(form, x, u_apply(form, y, f));
    GridFunction rhs = u_apply(form, add(x, y), f);
    const cdouble w = omega(form, x, y);
    for (auto& [idx, val] : rhs.values) val *= w;
    CHECK(grid_distance(lhs, rhs) <= 1e-10 * f.l2_norm());
  }

  SUBCASE("identity at the origin is exact") {
    const GridFunction g = u_apply(form, {0.0, 0.0}, f);
    CHECK(grid_distance(g, f) == 0.0);
  }

  SUBCASE("support escape raises, never wraps") {
    GridFunction corner;
    corner.grid = grid;
    corner.values[{31, 31}] = 1.0;
    CHECK_THROWS_AS(u_apply(form, {0.25, 0.0}, corner), WindowTooSmall);
  }

  SUBCASE("off-lattice translations are rejected") {
    CHECK_THROWS_AS(u_apply(form, {0.1, 0.0}, f), InvalidArgument);
  }
}

TEST_CASE("conjugation semigroup on finite-rank operators") {
  const OnedimGrid grid = make_grid();
  const MultiplierForm form = MultiplierForm::from_rows({{0.0, 1.0}, {0.0, 0.0}});
  CounterRng rng(6);

  DeltaOperator op;
  op.grid = grid;
  op.support = {{14, 14}, {15, 14}, {14, 16}};
  op.m = CMatrix(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      op.m.at(i, j) = cdouble(rng.next_uniform(-1, 1), rng.next_uniform(-1, 1));

  const Point x{0.5, 0.25}, y{-0.5, 0.75};
  const DeltaOperator lhs = ad_u(form, x, ad_u(form, y, op));
  const DeltaOperator rhs = ad_u(form, add(x, y), op);
  CHECK(delta_operator_distance(lhs, rhs) <= 1e-9 * op.m.max_abs());

  // Rank-one transport: |delta_p><delta_q| moves to |U_x delta_p><U_x delta_q|.
  DeltaOperator rank1;
  rank1.grid = grid;
  rank1.support = {{14, 14}, {15, 17}};
  rank1.m = CMatrix(2, 2);
  rank1.m.at(0, 1) = 1.0;  // |p><q|
  const DeltaOperator moved = ad_u(form, x, rank1);
  const cdouble pp = omega(form, x, grid.point_at({14, 14}));
  const cdouble qq = omega(form, x, grid.point_at({15, 17}));
  CHECK(std::abs(moved.m.at(0, 1) - pp * std::conj(qq)) < 1e-14);
  CHECK(moved.support[0] == std::vector<int>{16, 15});
}

TEST_CASE("fibre agreement with the one-dimensional model") {
  const OnedimGrid grid = make_grid();
  const MultiplierForm form = MultiplierForm::from_rows({{0.0, 1.0}, {0.0, 0.0}});
  const GridFunction f = sample_function(grid, 9);
  CounterRng rng(10);
  for (int t = 0; t < 5; ++t) {
    const Point x{0.25 * static_cast<double>(static_cast<int>(rng.next_bits() % 5) - 2),
                  0.25 * static_cast<double>(static_cast<int>(rng.next_bits() % 5) - 2)};
    const Point y{0.25 * static_cast<double>(static_cast<int>(rng.next_bits() % 5) - 2),
                  0.25 * static_cast<double>(static_cast<int>(rng.next_bits() % 5) - 2)};
    const GridFunction lhs = u_apply(form, x, u_apply(form, y, f));
    const GridFunction rhs = u_apply(form, add(x, y), f);
    // Measured composition phase equals the model multiplier, which is the
    // scalar the one-dimensional product attaches to generator products.
    const cdouble measured = grid_inner(lhs, rhs) / cdouble(f.l2_norm_squared(), 0.0);
    CHECK(std::abs(measured - omega(form, x, y)) <= 1e-10);
    // The map c -> c U_x is isometric in the fibre norm.
    const cdouble c(0.3, -0.8);
    GridFunction cf = u_apply(form, x, f);
    for (auto& [idx, val] : cf.values) val *= c;
    CHECK(cf.l2_norm() == doctest::Approx(std::abs(c) * f.l2_norm()).epsilon(1e-12));
  }
}
