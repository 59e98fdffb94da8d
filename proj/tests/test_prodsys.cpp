#include <doctest.h>

#include <cmath>
#include <set>

#include "pslab/errors.hpp"
#include "pslab/prodsys.hpp"
#include "pslab/rng.hpp"
#include "test_fixtures.hpp"

using namespace pslab;
using fixtures::Orthant2;
using fixtures::gi;

TEST_CASE("multiplier form validation and omega") {
  CHECK_THROWS_AS(MultiplierForm::from_rows({{0.0, 1.0}, {1.0, 0.0}}), InvalidArgument);
  const MultiplierForm zero = MultiplierForm::zeros(2);
  CHECK(omega(zero, {0.3, 0.7}, {1.1, -2.0}) == cdouble(1.0, 0.0));
  const MultiplierForm form = MultiplierForm::from_rows({{0.0, 1.0}, {0.0, 0.0}});
  const cdouble w = omega(form, {1.0, 0.0}, {0.0, 1.0});
  CHECK(std::abs(w - std::polar(1.0, 1.0)) < 1e-15);
  CHECK(std::abs(std::abs(w) - 1.0) < 1e-14);
}

TEST_CASE("trivial model multiplication and inner products") {
  const Orthant2 fx;
  const auto plain = fx.trivial(false);
  const FiberVector u = FiberVector::make_scalar(gi(fx.lattice, {1.0, 0.5}), cdouble(2.0, 0.0));
  const FiberVector v = FiberVector::make_scalar(gi(fx.lattice, {0.5, 1.0}), cdouble(0.0, 3.0));
  const FiberVector uv = plain->multiply(u, v);
  CHECK(uv.scalar == cdouble(0.0, 6.0));
  CHECK(plain->grid().point_at(uv.base)[0] == doctest::Approx(1.5));

  // With the phase form the product picks up exp(i x1 y2).
  const auto phased = fx.trivial(true);
  const FiberVector a1 = FiberVector::make_scalar(gi(fx.lattice, {1.0, 0.5}), 1.0);
  const FiberVector b1 = FiberVector::make_scalar(gi(fx.lattice, {0.5, 1.0}), 1.0);
  const cdouble expected = std::polar(1.0, 1.0);  // x1 * y2 = 1
  CHECK(std::abs(phased->multiply(a1, b1).scalar - expected) < 1e-15);

  // Inner product is linear in the first slot.
  CHECK(plain->inner(u, u).real() == doctest::Approx(4.0));
  const FiberVector u2 = FiberVector::make_scalar(u.base, cdouble(0.0, 1.0));
  CHECK(plain->inner(u, u2) == cdouble(0.0, -2.0));
  CHECK_THROWS_AS(plain->inner(u, v), InvalidArgument);
}

TEST_CASE("ccr vacuum and exponential inner products") {
  const Orthant2 fx;
  const auto model = fx.ccr();
  const GridIndex x = gi(fx.lattice, {1.0, 1.5});
  const GridIndex y = gi(fx.lattice, {1.5, 1.0});

  const FiberVector vx = model->vacuum(x);
  CHECK(model->inner(vx, vx) == cdouble(1.0, 0.0));

  const FiberVector prod = model->multiply(vx, model->vacuum(y));
  CHECK(model->distance(prod, model->vacuum(add(x, y))) == 0.0);

  // Single cell, unit value: h^d = 0.25, so the self inner is exp(0.25).
  const auto fam = model->generating_family(x);
  REQUIRE(fam.size() >= 2);
  const FiberVector single = fam[1];
  CHECK(model->inner(single, single).real() == doctest::Approx(std::exp(0.25)).epsilon(1e-14));

  // Norm multiplicativity for exponential vectors.
  const FiberVector u = fam[1];
  const FiberVector w = model->generating_family(y)[2];
  const double lhs = model->norm_squared(model->multiply(u, w));
  const double rhs = model->norm_squared(u) * model->norm_squared(w);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("exact cell decomposition under products") {
  const Orthant2 fx;
  const auto model = fx.ccr();
  const GridIndex x = gi(fx.lattice, {1.0, 0.5});
  const GridIndex y = gi(fx.lattice, {0.5, 1.5});
  const GridIndex xy = add(x, y);
  const Point xp = fx.lattice.point_at(x);
  const Point xyp = fx.lattice.point_at(xy);
  const Point yp = fx.lattice.point_at(y);
  for (const auto& idx : fx.lattice.indices_in_box()) {
    const Point c = fx.lattice.point_at(idx);
    if (!fx.cone.contains(c)) continue;
    const bool in_joint = !fx.cone.contains(sub(c, xyp));
    const bool in_left = !fx.cone.contains(sub(c, xp));
    const bool shifted_in_right =
        fx.cone.contains(sub(c, xp)) && !fx.cone.contains(sub(sub(c, xp), yp));
    const bool disjoint_union = (in_left || shifted_in_right) && !(in_left && shifted_in_right);
    CHECK(in_joint == disjoint_union);
  }
}

TEST_CASE("associativity and unitarity of the multiplication") {
  const Orthant2 fx;
  CounterRng rng(11);
  for (const auto& model : {std::static_pointer_cast<const ProductSystemModel>(fx.trivial(true)),
                            std::static_pointer_cast<const ProductSystemModel>(fx.ccr())}) {
    const GridIndex x = gi(fx.lattice, {1.0, 0.5});
    const GridIndex y = gi(fx.lattice, {0.5, 1.0});
    const GridIndex z = gi(fx.lattice, {0.5, 0.5});
    const FiberVector u = model->random_fiber_vector(x, rng);
    const FiberVector v = model->random_fiber_vector(y, rng);
    const FiberVector w = model->random_fiber_vector(z, rng);
    const FiberVector lhs = model->multiply(model->multiply(u, v), w);
    const FiberVector rhs = model->multiply(u, model->multiply(v, w));
    const double scale = std::max(1.0, model->norm(lhs));
    CHECK(model->distance(lhs, rhs) <= 1e-12 * scale);

    const FiberVector u2 = model->random_fiber_vector(x, rng);
    const FiberVector v2 = model->random_fiber_vector(y, rng);
    const cdouble prod_inner = model->inner(model->multiply(u, v), model->multiply(u2, v2));
    const cdouble split = model->inner(u, u2) * model->inner(v, v2);
    CHECK(std::abs(prod_inner - split) <=
          1e-10 * std::max(1.0, std::abs(split)));
  }
}

TEST_CASE("partial adjoint") {
  const Orthant2 fx;
  const GridIndex x = gi(fx.lattice, {1.0, 1.0});
  const GridIndex y = gi(fx.lattice, {2.5, 3.0});

  SUBCASE("one-dimensional closed form") {
    const auto model = fx.trivial(true);
    const FiberVector v = FiberVector::make_scalar(x, cdouble(0.4, -1.1));
    const FiberVector w = FiberVector::make_scalar(y, cdouble(-0.7, 0.2));
    const FiberVector vw = model->partial_adjoint(v, w);
    const Point diff = sub(fx.lattice.point_at(y), fx.lattice.point_at(x));
    const cdouble expected =
        std::conj(v.scalar * omega(model->multiplier(), fx.lattice.point_at(x), diff)) * w.scalar;
    CHECK(std::abs(vw.scalar - expected) < 1e-14);
  }

  SUBCASE("exact factorization recovers the right factor") {
    CounterRng rng(3);
    for (const auto& model :
         {std::static_pointer_cast<const ProductSystemModel>(fx.trivial(true)),
          std::static_pointer_cast<const ProductSystemModel>(fx.ccr())}) {
      FiberVector v = model->random_fiber_vector(x, rng);
      v = fv_scale(v, cdouble(1.0 / model->norm(v), 0.0));
      const GridIndex d = sub(y, x);
      const FiberVector u = model->random_fiber_vector(d, rng);
      const FiberVector w = model->multiply(v, u);
      const FiberVector back = model->partial_adjoint(v, w);
      CHECK(model->distance(back, u) <= 1e-12 * std::max(1.0, model->norm(u)));
    }
  }

  SUBCASE("vacuum is an isometric left factor") {
    const auto model = fx.ccr();
    CounterRng rng(5);
    const GridIndex d = sub(y, x);
    const FiberVector xi = model->random_fiber_vector(d, rng);
    const FiberVector w = model->multiply(model->vacuum(x), xi);
    CHECK(model->distance(model->partial_adjoint(model->vacuum(x), w), xi) <= 1e-12);
  }

  SUBCASE("defining identity and the norm bound") {
    const auto model = fx.ccr();
    CounterRng rng(7);
    const FiberVector v = model->random_fiber_vector(x, rng);
    const FiberVector w = model->random_fiber_vector(y, rng);
    const FiberVector vw = model->partial_adjoint(v, w);
    const GridIndex d = sub(y, x);
    for (const auto& s : model->generating_family(d)) {
      const cdouble lhs = model->inner(vw, s);
      const cdouble rhs = model->inner(w, model->multiply(v, s));
      CHECK(std::abs(lhs - rhs) <=
            1e-8 * std::max(1.0, model->norm(v) * model->norm(w) * model->norm(s)));
    }
    CHECK(model->norm(vw) <= model->norm(v) * model->norm(w) + 1e-8);
    CHECK_THROWS_AS(model->partial_adjoint(w, v), InvalidArgument);
  }

  SUBCASE("mixed associativity in the weak sense") {
    CounterRng rng(9);
    const GridIndex z = gi(fx.lattice, {1.5, 1.0});
    for (const auto& model :
         {std::static_pointer_cast<const ProductSystemModel>(fx.trivial(true)),
          std::static_pointer_cast<const ProductSystemModel>(fx.ccr())}) {
      const FiberVector v = model->random_fiber_vector(x, rng);
      const FiberVector w1 = model->random_fiber_vector(y, rng);
      const FiberVector w2 = model->random_fiber_vector(z, rng);
      const FiberVector lhs = model->partial_adjoint(v, model->multiply(w1, w2));
      const FiberVector rhs = model->multiply(model->partial_adjoint(v, w1), w2);
      const double scale =
          std::max(1.0, model->norm(v) * model->norm(w1) * model->norm(w2));
      // Both sides agree as functionals on the truncated fibre family.
      for (const auto& s : model->generating_family(lhs.base)) {
        CHECK(std::abs(model->inner(lhs, s) - model->inner(rhs, s)) <=
              1e-8 * scale * std::max(1.0, model->norm(s)));
      }
    }
  }
}

TEST_CASE("orthonormal families") {
  const Orthant2 fx;
  const GridIndex x = gi(fx.lattice, {1.5, 1.0});

  const auto trivial = fx.trivial(false);
  const auto tb = trivial->onb(x, 1);
  REQUIRE(tb.size() == 1);
  CHECK(tb[0].scalar == cdouble(1.0, 0.0));

  const auto model = fx.ccr();
  const auto one = model->onb(x, 1);
  CHECK(model->distance(one[0], model->vacuum(x)) == 0.0);

  const auto basis = model->onb(x, 8);
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const cdouble g = model->inner(basis[i], basis[j]);
      CHECK(std::abs(g - (i == j ? cdouble(1.0, 0.0) : cdouble(0.0, 0.0))) < 1e-10);
    }
  CHECK_THROWS_AS(model->onb(x, 64), InvalidArgument);
}

TEST_CASE("trivialization round trip") {
  const Orthant2 fx;
  const auto model = fx.ccr();
  const GridIndex x = gi(fx.lattice, {1.0, 1.5});

  const auto [pt, vac_coords] = model->trivialize(model->vacuum(x));
  CHECK(pt[0] == doctest::Approx(1.0));
  CHECK(std::abs(vac_coords[0] - cdouble(1.0, 0.0)) < 1e-12);
  for (std::size_t i = 1; i < vac_coords.size(); ++i) CHECK(std::abs(vac_coords[i]) < 1e-12);

  const auto basis = model->onb(x, 8);
  const auto [pt2, coords2] = model->trivialize(fv_scale(basis[0], 2.0));
  CHECK(std::abs(coords2[0] - cdouble(2.0, 0.0)) < 1e-12);

  CounterRng rng(21);
  const FiberVector u = model->random_fiber_vector(x, rng, 8);
  const auto [pt3, coords3] = model->trivialize(u);
  FiberVector rebuilt = model->zero(x);
  for (std::size_t i = 0; i < coords3.size(); ++i)
    rebuilt = fv_add(rebuilt, fv_scale(basis[i], coords3[i]));
  CHECK(model->distance(rebuilt, u) <= 1e-9 * std::max(1.0, model->norm(u)));
  // Coordinates are isometric.
  double csum = 0.0;
  for (const auto& c : coords3) csum += std::norm(c);
  CHECK(csum == doctest::Approx(model->norm_squared(u)).epsilon(1e-10));
}

TEST_CASE("bessel sums over the truncated family reach the norm") {
  const Orthant2 fx;
  const auto model = fx.ccr();
  const GridIndex x = fx.a_idx;                       // left-factor fibre
  const GridIndex y = gi(fx.lattice, {2.0, 3.0});     // ambient fibre
  const GridIndex d = sub(y, x);
  CounterRng rng(31);

  // xi is a combination of products u * w with u in the fibre family at x.
  const auto fam_x = model->generating_family(x);
  FiberVector xi = model->zero(y);
  for (int t = 0; t < 3; ++t) {
    const FiberVector u = fam_x[t];
    const FiberVector w = model->random_fiber_vector(d, rng);
    xi = fv_add(xi, model->multiply(u, w));
  }
  const double total = model->norm_squared(xi);

  const auto basis = model->onb(x, model->family_size());
  double partial = 0.0;
  double previous = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    partial += model->norm_squared(model->partial_adjoint(basis[i], xi));
    CHECK(partial >= previous - 1e-12 * std::max(1.0, total));
    CHECK(partial <= total + 1e-8 * std::max(1.0, total));
    previous = partial;
  }
  CHECK(std::abs(partial - total) <= 1e-6 * std::max(1.0, total));
}
