#include "pslab/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <set>
#include <sstream>

#include "pslab/errors.hpp"
#include "pslab/onedim.hpp"
#include "pslab/repsem.hpp"
#include "pslab/rng.hpp"

namespace pslab {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Suite assembly helper
// ---------------------------------------------------------------------------

class SuiteBuilder {
 public:
  SuiteBuilder(std::string name, std::uint64_t seed) {
    result_.name = std::move(name);
    result_.seed = seed;
    result_.passed = true;
  }

  void tolerance(const std::string& key, double value) { result_.tolerances[key] = value; }

  void check(const std::string& what, double defect, double tol, json witness = json()) {
    defect = std::abs(defect);
    // Every threshold actually applied ends up echoed in the report.
    if (!result_.tolerances.contains(what)) result_.tolerances[what] = tol;
    result_.max_defect = std::max(result_.max_defect, defect);
    defect_sum_ += defect;
    ++defect_count_;
    ++result_.samples;
    if (defect > tol) {
      result_.passed = false;
      if (result_.witness.is_null()) {
        json w;
        w["check"] = what;
        w["defect"] = defect;
        w["tolerance"] = tol;
        if (!witness.is_null()) w["input"] = witness;
        result_.witness = w;
      }
    }
  }

  void check_true(const std::string& what, bool ok, json witness = json()) {
    ++result_.samples;
    if (!ok) {
      result_.passed = false;
      if (result_.witness.is_null()) {
        json w;
        w["check"] = what;
        if (!witness.is_null()) w["input"] = witness;
        result_.witness = w;
      }
    }
  }

  void fail(const std::string& what, json witness = json()) { check_true(what, false, witness); }

  void note(const std::string& text) { result_.notes.push_back(text); }
  void series(json s) { result_.series = std::move(s); }
  void count_samples(std::int64_t extra) { result_.samples += extra; }

  SuiteResult finish() {
    result_.mean_defect = defect_count_ ? defect_sum_ / static_cast<double>(defect_count_) : 0.0;
    return result_;
  }

 private:
  SuiteResult result_;
  double defect_sum_ = 0.0;
  std::int64_t defect_count_ = 0;
};

std::uint64_t suite_stream(const std::string& name) {
  const auto& reg = suite_registry();
  const auto it = std::find(reg.begin(), reg.end(), name);
  return 1000 * (1 + static_cast<std::uint64_t>(it - reg.begin()));
}

json point_json(const Point& p) { return json(p); }

json index_json(const GridIndex& g) { return json(g.v); }

cdouble random_coeff(CounterRng& rng) {
  return cdouble(rng.next_uniform(-1.0, 1.0), rng.next_uniform(-1.0, 1.0));
}

CMatrix random_matrix(std::size_t rows, std::size_t cols, CounterRng& rng) {
  CMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = random_coeff(rng);
  return m;
}

// Deterministic list of vector bases usable for phi0 shifts: lattice points
// of Omega whose window reads never escape, whose level cost fits, and which
// keep fixture supports on complete rays.
std::vector<GridIndex> feasible_bases(const SectionGrid& grid, std::size_t want, int max_shift) {
  const ConeModel& cone = grid.cone();
  const Point a = grid.a_point();
  // Bucketed by shift cost so cheap bases come first; within a bucket the
  // lexicographic scan order is kept.
  std::vector<std::vector<GridIndex>> buckets(static_cast<std::size_t>(max_shift) + 1);
  std::size_t found = 0;
  for (const auto& idx : grid.lattice().indices_in_box()) {
    const Point p = grid.lattice().point_at(idx);
    if (!cone.interior_contains(p)) continue;
    int shift = 0;
    try {
      shift = shift_levels(cone, a, p, 64);
    } catch (const IterationCapExceeded&) {
      continue;
    }
    if (shift < 1 || shift > max_shift) continue;
    auto& bucket = buckets[static_cast<std::size_t>(shift)];
    if (bucket.size() >= want) continue;
    if (!phi0_feasible(grid, idx)) continue;
    if (!grid.shifted_support_safe(idx)) continue;
    bucket.push_back(idx);
    if (++found >= want * buckets.size()) break;
  }
  std::vector<GridIndex> out;
  for (const auto& bucket : buckets)
    for (const auto& idx : bucket) {
      out.push_back(idx);
      if (out.size() >= want) return out;
    }
  return out;
}

struct Fixtures {
  std::shared_ptr<const SectionGrid> grid;
  std::shared_ptr<const ProductSystemModel> model;
};

Fixtures make_fixtures(const Scenario& sc) {
  Fixtures f;
  f.grid = sc.make_section_grid();
  f.model = sc.make_model();
  return f;
}

double safe_div(double num, double den) { return num / std::max(den, 1e-30); }

// ---------------------------------------------------------------------------
// validate-cone
// ---------------------------------------------------------------------------

SuiteResult suite_validate_cone(const Scenario& sc) {
  SuiteBuilder b("validate-cone", sc.seed());
  const ConeValidation v = validate_cone(sc.cone(), sc.seed());
  b.check_true("pointed", v.pointed, json(v.diagnostic));
  b.check_true("spanning", v.spanning, json(v.diagnostic));
  b.check_true("irredundant facets", v.irredundant, json(v.diagnostic));
  if (v.witness) b.note("interior witness: " + format_point(*v.witness));
  b.note(v.diagnostic);
  try {
    const auto grid = sc.make_section_grid();
    std::ostringstream os;
    os << "window: " << grid->size() << " points, " << grid->safe_roots().size()
       << " safe rays, k_max " << grid->k_max();
    b.note(os.str());
  } catch (const std::exception& e) {
    b.fail("section window construction", json(e.what()));
  }
  return b.finish();
}

// ---------------------------------------------------------------------------
// partition
// ---------------------------------------------------------------------------

SuiteResult suite_partition(const Scenario& sc) {
  SuiteBuilder b("partition", sc.seed());
  const ConeModel& cone = sc.cone();
  const LatticeGrid lattice = sc.make_lattice();
  const Point a = sc.a();
  const GridIndex ai = lattice.index_of(a);

  std::int64_t violations = 0;
  std::int64_t points = 0;
  json witness;
  int n_max = 0;
  json cells = json::array();
  const bool plot = cone.dimension() == 2;

  for (const auto& idx : lattice.indices_in_box()) {
    const Point x = lattice.point_at(idx);
    if (!cone.interior_contains(x)) continue;
    ++points;
    int n = 0;
    try {
      n = level_index(cone, a, x);
    } catch (const IterationCapExceeded&) {
      ++violations;
      if (witness.is_null()) witness = point_json(x);
      continue;
    }
    n_max = std::max(n_max, n);
    bool ok = slab_contains(cone, a, n, x);
    // Uniqueness: no other slab within reach may claim x.
    for (int k = 0; ok && k <= n + 2; ++k)
      if (k != n && slab_contains(cone, a, k, x)) ok = false;
    // Root certificate: x - n a lands in L_0.
    if (ok) ok = slab_contains(cone, a, 0, sub(x, scaled(a, static_cast<double>(n))));
    // Shift law.
    const GridIndex up = add(idx, ai);
    if (ok && lattice.in_box(up)) ok = (level_index(cone, a, lattice.point_at(up)) == n + 1);
    if (!ok) {
      ++violations;
      if (witness.is_null()) witness = point_json(x);
    }
    if (plot) cells.push_back(json::array({idx.v[0], idx.v[1], n}));
  }

  // Translation property through the slab enumerator.
  for (int k = 0; k <= 1; ++k) {
    for (const auto& idx : lattice_slab(cone, a, lattice, k)) {
      const GridIndex up = add(idx, ai);
      if (!lattice.in_box(up)) continue;
      if (!slab_contains(cone, a, k + 1, lattice.point_at(up))) {
        ++violations;
        if (witness.is_null()) witness = index_json(idx);
      }
    }
  }

  b.count_samples(points - 1);
  b.check_true("zero partition violations", violations == 0, witness);
  {
    std::ostringstream os;
    os << points << " interior lattice points, levels 0.." << n_max;
    b.note(os.str());
  }
  if (plot) {
    json series;
    series["partition"] = {{"spacing", lattice.spacing()}, {"cells", cells}};
    b.series(series);
  }
  return b.finish();
}

// ---------------------------------------------------------------------------
// chi-check
// ---------------------------------------------------------------------------

SuiteResult suite_chi_check(const Scenario& sc) {
  SuiteBuilder b("chi-check", sc.seed());
  const ConeModel& cone = sc.cone();
  const LatticeGrid lattice = sc.make_lattice();
  const Point a = sc.a();
  const GridIndex ai = lattice.index_of(a);
  CounterRng rng(sc.seed(), suite_stream("chi-check"));

  // Candidate shift targets: seeded picks from interior lattice points.
  const std::vector<GridIndex> all = lattice.indices_in_box();
  const std::int64_t want_b = sc.samples("chi_bs");

  for (int k = 0; k <= 1; ++k) {
    std::vector<GridIndex> bs;
    std::uint64_t cursor = 0;
    while (bs.size() < static_cast<std::size_t>(want_b) && cursor < 50000) {
      const GridIndex& cand = all[rng.bits_at(700 + k * 97 + cursor++) % all.size()];
      const Point bp = lattice.point_at(cand);
      if (!cone.interior_contains(bp)) continue;
      Point rel = bp;
      for (int i = 0; i < k; ++i) rel = sub(rel, a);
      if (!cone.interior_contains(rel)) continue;
      if (std::find(bs.begin(), bs.end(), cand) != bs.end()) continue;
      bs.push_back(cand);
    }
    if (bs.size() < static_cast<std::size_t>(want_b)) {
      b.fail("enough admissible b targets", json(k));
      continue;
    }

    const std::vector<GridIndex> slab_pts = lattice_slab(cone, a, lattice, k);
    for (const auto& bidx : bs) {
      const Point bp = lattice.point_at(bidx);
      std::int64_t violations = 0;
      json witness;
      std::set<GridIndex> images;
      std::int64_t safe = 0;
      for (const auto& xidx : slab_pts) {
        const Point x = lattice.point_at(xidx);
        int m = 0;
        try {
          m = m_index(cone, a, bp, k, x);
        } catch (const IterationCapExceeded&) {
          ++violations;
          continue;
        }
        const GridIndex yidx = add(xidx, scaled(ai, m));
        if (!lattice.in_box(yidx)) continue;  // outside the safe window
        ++safe;
        const Point y = lattice.point_at(yidx);
        bool ok = slab_b_contains(cone, a, bp, y);
        // Minimality of m and the singleton property of the ray meeting L_b.
        if (ok && m > 0) ok = !cone.interior_contains(sub(add(x, scaled(a, m - 1.0)), bp));
        int hits = 0;
        for (int mm = 0; mm <= m + 3; ++mm)
          if (slab_b_contains(cone, a, bp, add(x, scaled(a, static_cast<double>(mm))))) ++hits;
        if (hits != 1) ok = false;
        // chi agrees with the index-level shift, and chi_inverse returns x.
        const Point y_api = chi(cone, a, bp, k, x);
        double d = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) d = std::max(d, std::abs(y_api[j] - y[j]));
        if (d > 1e-12) ok = false;
        try {
          const Point back = chi_inverse(cone, a, bp, k, y);
          const GridIndex backi = lattice.index_of(back);
          if (backi != xidx) ok = false;
        } catch (const std::exception&) {
          ok = false;
        }
        if (!images.insert(yidx).second) ok = false;  // injectivity
        if (!ok) {
          ++violations;
          if (witness.is_null())
            witness = json{{"b", point_json(bp)}, {"x", point_json(x)}, {"k", k}};
        }
      }
      // The other direction on the safe window.
      for (const auto& yidx : all) {
        const Point y = lattice.point_at(yidx);
        if (!slab_b_contains(cone, a, bp, y)) continue;
        Point back;
        try {
          back = chi_inverse(cone, a, bp, k, y);
        } catch (const IterationCapExceeded&) {
          ++violations;
          continue;
        }
        GridIndex backi;
        try {
          backi = lattice.index_of(back);
        } catch (const InvalidArgument&) {
          ++violations;
          continue;
        }
        if (!lattice.in_box(backi)) continue;
        bool ok = slab_contains(cone, a, k, back);
        const Point fwd = chi(cone, a, bp, k, back);
        double d = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) d = std::max(d, std::abs(fwd[j] - y[j]));
        if (d > 1e-12) ok = false;
        if (!ok) {
          ++violations;
          if (witness.is_null())
            witness = json{{"b", point_json(bp)}, {"y", point_json(y)}, {"k", k}};
        }
      }
      b.count_samples(safe);
      b.check_true("chi bijection on the safe window", violations == 0, witness);
    }
  }
  return b.finish();
}

// ---------------------------------------------------------------------------
// measure-check
// ---------------------------------------------------------------------------

SuiteResult suite_measure_check(const Scenario& sc) {
  SuiteBuilder b("measure-check", sc.seed());
  const ConeModel& cone = sc.cone();
  const LatticeGrid lattice = sc.make_lattice();
  const Point a = sc.a();
  const GridIndex ai = lattice.index_of(a);
  const double sigma = sc.tolerance("measure_sigma");
  b.tolerance("measure_sigma", sigma);
  const std::int64_t n_samples = sc.samples("measure");
  const std::size_t d = cone.dimension();

  // Shift target: 2a nudged off the diagonal when possible.
  GridIndex bidx = scaled(ai, 2);
  {
    GridIndex nudged = bidx;
    nudged.v[0] += 1;
    if (cone.interior_contains(lattice.point_at(nudged))) bidx = nudged;
  }
  const Point bp = lattice.point_at(bidx);

  double amax = 0.0;
  for (double c : a) amax = std::max(amax, std::abs(c));
  const double w = 0.15 * amax;

  auto in_box_of = [](const Point& x, const Point& lo, const Point& hi) {
    for (std::size_t j = 0; j < x.size(); ++j)
      if (x[j] < lo[j] || x[j] > hi[j]) return false;
    return true;
  };

  int box_id = 0;
  for (double t : {0.35, 0.5, 0.65}) {
    ++box_id;
    Point src_lo(d), src_hi(d), img_lo(d), img_hi(d);
    const Point center = scaled(a, t);
    for (std::size_t j = 0; j < d; ++j) {
      src_lo[j] = center[j] - w;
      src_hi[j] = center[j] + w;
    }

    auto pred_src = [&](const Point& x) {
      return in_box_of(x, src_lo, src_hi) && slab_contains(cone, a, 0, x);
    };
    const MeasureEstimate est1 =
        estimate_measure(pred_src, src_lo, src_hi, n_samples, sc.seed() + 11 * box_id);

    // Probe the m range over the source box to size the image sampling box.
    int m_lo = 1 << 20, m_hi = 0;
    CounterRng probe(sc.seed(), suite_stream("measure-check") + box_id);
    for (int i = 0; i < 64; ++i) {
      Point x(d);
      for (std::size_t j = 0; j < d; ++j) x[j] = probe.next_uniform(src_lo[j], src_hi[j]);
      if (!slab_contains(cone, a, 0, x)) continue;
      const int m = m_index(cone, a, bp, 0, x);
      m_lo = std::min(m_lo, m);
      m_hi = std::max(m_hi, m);
    }
    if (m_hi == 0 && m_lo > m_hi) {
      b.fail("image probe found no slab points", json{{"box", box_id}});
      continue;
    }
    m_lo = std::max(0, m_lo - 1);
    m_hi += 1;
    for (std::size_t j = 0; j < d; ++j) {
      img_lo[j] = src_lo[j] + std::min(m_lo * a[j], m_hi * a[j]);
      img_hi[j] = src_hi[j] + std::max(m_lo * a[j], m_hi * a[j]);
    }

    auto pred_img = [&](const Point& y) {
      if (!slab_b_contains(cone, a, bp, y)) return false;
      Point back;
      try {
        back = chi_inverse(cone, a, bp, 0, y, 1000);
      } catch (const std::exception&) {
        return false;
      }
      return in_box_of(back, src_lo, src_hi) && slab_contains(cone, a, 0, back);
    };
    const MeasureEstimate est2 =
        estimate_measure(pred_img, img_lo, img_hi, n_samples, sc.seed() + 63 + box_id);

    const double gap = std::abs(est1.value - est2.value);
    const double combined =
        std::sqrt(est1.standard_error * est1.standard_error +
                  est2.standard_error * est2.standard_error);
    b.check("measure preservation box " + std::to_string(box_id), gap,
            sigma * combined + 1e-12,
            json{{"box_lo", src_lo}, {"box_hi", src_hi}, {"b", bp},
                 {"value", est1.value}, {"image_value", est2.value}});
    b.count_samples(2 * n_samples - 1);
  }

  // The slab and the plain interior agree on a band below Omega + a; with a
  // shared seed the two estimates must coincide bit for bit.
  {
    Point lo(d), hi(d);
    const Point c = scaled(a, 0.45);
    for (std::size_t j = 0; j < d; ++j) {
      lo[j] = c[j] - w;
      hi[j] = c[j] + w;
    }
    bool band_clear = true;
    CounterRng probe(sc.seed(), suite_stream("measure-check") + 55);
    for (int i = 0; i < 128 && band_clear; ++i) {
      Point x(d);
      for (std::size_t j = 0; j < d; ++j) x[j] = probe.next_uniform(lo[j], hi[j]);
      if (cone.interior_contains(sub(x, a))) band_clear = false;
    }
    if (band_clear) {
      auto pred_slab = [&](const Point& x) { return slab_contains(cone, a, 0, x); };
      auto pred_int = [&](const Point& x) { return cone.interior_contains(x); };
      const MeasureEstimate eslab = estimate_measure(pred_slab, lo, hi, 20000, sc.seed() + 5);
      const MeasureEstimate eint = estimate_measure(pred_int, lo, hi, 20000, sc.seed() + 5);
      b.check_true("L_0 equals Omega below Omega+a (shared-seed, bit-exact)",
                   eslab.value == eint.value && eslab.hits == eint.hits,
                   json{{"slab", eslab.value}, {"interior", eint.value}});
    }
  }

  // Orthant sanity from the closed form: below a the slab fills the box.
  if (cone.variant() == ConeVariant::Orthant) {
    Point lo(d, 0.0), hi(d);
    double vol = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      hi[j] = a[j];
      vol *= a[j];
    }
    auto pred = [&](const Point& x) { return slab_contains(cone, a, 0, x); };
    const MeasureEstimate est = estimate_measure(pred, lo, hi, n_samples, sc.seed() + 99);
    b.check("slab measure below a matches the box volume", std::abs(est.value - vol),
            sigma * est.standard_error + 1e-9,
            json{{"value", est.value}, {"expected", vol}});
    b.count_samples(n_samples - 1);
  }

  // Reproducibility: identical seeds give bit-identical estimates.
  {
    auto pred = [&](const Point& x) { return cone.interior_contains(x); };
    Point lo(d, -1.0), hi(d, 1.0);
    const MeasureEstimate e1 = estimate_measure(pred, lo, hi, 2000, sc.seed() + 123);
    const MeasureEstimate e2 = estimate_measure(pred, lo, hi, 2000, sc.seed() + 123);
    b.check_true("estimates are bit-identical for equal seeds",
                 e1.value == e2.value && e1.standard_error == e2.standard_error &&
                     e1.hits == e2.hits,
                 json());
  }
  return b.finish();
}

// ---------------------------------------------------------------------------
// sections-check
// ---------------------------------------------------------------------------

SuiteResult suite_sections_check(const Scenario& sc) {
  SuiteBuilder b("sections-check", sc.seed());
  const Fixtures fx = make_fixtures(sc);
  const double tol_stab = sc.tolerance("stabilization_rel");
  const double tol_shift = sc.tolerance("shift_lemma_rel");
  const double tol_defect = sc.tolerance("stability_defect");
  b.tolerance("stabilization_rel", tol_stab);
  b.tolerance("shift_lemma_rel", tol_shift);
  b.tolerance("stability_defect", tol_defect);
  b.tolerance("hermitian_symmetry", sc.tolerance("hermitian_symmetry"));

  CounterRng rng(sc.seed(), suite_stream("sections-check"));
  const std::int64_t n_sections = sc.samples("sections");

  std::vector<Section> fs;
  std::vector<double> norms;
  for (std::int64_t i = 0; i < n_sections; ++i) {
    CounterRng sub = rng.substream(10 + i);
    fs.push_back(random_stable_section(fx.grid, fx.model, static_cast<int>(i % 2), sub));
  }

  // Stabilization of self inner products, plus norms for later scaling.
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const StabilizedInner si = stabilized_inner(fs[i], fs[i]);
    norms.push_back(std::sqrt(std::max(0.0, si.value.real())));
    b.check("self inner stabilization", safe_div(si.deviation, norms[i] * norms[i]), tol_stab,
            json{{"section", i}});
    b.check_true("positivity", si.value.real() >= -1e-12 * std::max(1.0, norms[i] * norms[i]),
                 json{{"section", i}});
  }
  // Pairwise stabilization on a subset.
  for (std::size_t i = 0; i < fs.size() && i < 8; ++i) {
    for (std::size_t j = i + 1; j < fs.size() && j < 8; ++j) {
      const StabilizedInner sij = stabilized_inner(fs[i], fs[j]);
      b.check("pair inner stabilization", safe_div(sij.deviation, norms[i] * norms[j]), tol_stab,
              json{{"pair", {i, j}}});
      const StabilizedInner sji = stabilized_inner(fs[j], fs[i]);
      b.check("hermitian symmetry",
              safe_div(std::abs(sij.value - std::conj(sji.value)), norms[i] * norms[j]),
              sc.tolerance("hermitian_symmetry"), json{{"pair", {i, j}}});
    }
  }

  // Positivity over random combinations.
  for (int t = 0; t < 80; ++t) {
    CounterRng sub = rng.substream(3000 + t);
    const std::size_t i = sub.next_bits() % fs.size();
    const std::size_t j = sub.next_bits() % fs.size();
    const Section h = section_axpy(random_coeff(sub), fs[i], random_coeff(sub), fs[j]);
    const StabilizedInner sh = stabilized_inner(h, h);
    b.check_true("positivity of combinations",
                 sh.value.real() >= -1e-10 * std::max(1.0, std::abs(sh.value.real())),
                 json{{"pair", {i, j}}});
  }

  // Exact stability of extensions, monotonicity, m-step stability.
  for (std::size_t i = 0; i < 4; ++i) {
    const int k = *fs[i].stable_level();
    const StabilityCheck chk = is_k_stable(fs[i], k);
    b.check("extension stability defect", safe_div(chk.defect, std::max(1.0, norms[i])),
            tol_defect, json{{"section", i}});
    if (k + 1 <= fx.grid->k_max() - 1) {
      const StabilityCheck up = is_k_stable(fs[i], k + 1);
      b.check_true("stability is monotone in k", up.stable || up.defect <= chk.defect + 1e-12,
                   json{{"section", i}});
    }
    b.check("two-step stability defect",
            safe_div(m_stability_check(fs[i], k, 2), std::max(1.0, norms[i])), 1e-9,
            json{{"section", i}});
  }

  // V_k isometry: the section norm equals the boundary-data norm.
  for (std::size_t i = 0; i < 5 && i < fs.size(); ++i) {
    const int k = *fs[i].stable_level();
    double direct = 0.0;
    for (std::size_t pos : fx.grid->slab(k))
      direct += fx.model->norm_squared(fs[i].at(pos));
    direct *= fx.grid->cell_measure();
    const double stab = stabilized_inner(fs[i], fs[i]).value.real();
    b.check("extension isometry", safe_div(std::abs(stab - direct), std::max(1.0, direct)), 1e-9,
            json{{"section", i}});
  }

  // Semilinearity.
  {
    const cdouble alpha(0.6, -0.3), beta(-0.25, 0.8);
    const Section h = section_axpy(alpha, fs[0], beta, fs[1]);
    const cdouble lhs = stabilized_inner(h, fs[2]).value;
    const cdouble rhs = alpha * stabilized_inner(fs[0], fs[2]).value +
                        beta * stabilized_inner(fs[1], fs[2]).value;
    b.check("linearity in the first argument",
            safe_div(std::abs(lhs - rhs), std::max(1.0, std::abs(rhs))), 1e-12, json());
  }

  // Null sections: supported below the stability level, hence zero in H.
  {
    Section null_sec(fx.grid, fx.model);
    const auto& slab0 = fx.grid->safe_slab(0);
    CounterRng sub = rng.substream(4000);
    null_sec.at(slab0[0]) =
        fx.model->random_fiber_vector(fx.grid->point_index(slab0[0]), sub);
    null_sec.declare_stable(1);
    const double null_norm = stabilized_inner(null_sec, null_sec).value.real();
    b.check("null section has zero norm", std::abs(null_norm), 1e-12, json());
    const Section fpn = section_axpy(1.0, fs[0], 1.0, null_sec);
    const double changed =
        std::abs(stabilized_inner(fpn, fpn).value.real() - norms[0] * norms[0]);
    b.check("null directions do not move the norm", safe_div(changed, norms[0] * norms[0]),
            1e-10, json());
    // Converse: tiny norm forces tiny values beyond the stability level.
    double worst_value = 0.0;
    for (std::size_t pos = 0; pos < fx.grid->size(); ++pos)
      if (fx.grid->level_at(pos) >= 1)
        worst_value = std::max(worst_value, fx.model->norm(null_sec.at(pos)));
    b.check("zero norm implies vanishing tail", worst_value, 1e-6, json());
  }

  // Shift-lemma agreement over admissible lattice b (0-stable pair so the
  // admissible set is widest).
  {
    const cdouble base_value = stabilized_inner(fs[0], fs[2]).value;
    const double scale = std::max(1.0, norms[0] * norms[2]);
    std::int64_t done = 0;
    const std::int64_t want = sc.samples("shift_bs");
    for (const auto& idx : fx.grid->lattice().indices_in_box()) {
      if (done >= want) break;
      const Point bp = fx.grid->lattice().point_at(idx);
      if (!sc.cone().interior_contains(bp)) continue;
      cdouble over_b;
      try {
        over_b = slab_inner_over_b(fs[0], fs[2], idx);
      } catch (const WindowTooSmall&) {
        continue;
      } catch (const InvalidArgument&) {
        continue;
      }
      b.check("shift lemma agreement", safe_div(std::abs(over_b - base_value), scale), tol_shift,
              json{{"b", point_json(bp)}});
      ++done;
    }
    b.check_true("enough admissible shift targets", done >= want, json(done));
    // The degenerate choice b = a reduces to the next slab sum.
    const GridIndex bnext = fx.grid->a_index();
    const cdouble direct = level_inner(fs[0], fs[2], 1);
    const cdouble via_b = slab_inner_over_b(fs[0], fs[2], bnext);
    b.check("b = a reduces to the level-1 sum", std::abs(direct - via_b), 1e-14 * scale, json());
  }

  // Compression: rank counting and reconstruction.
  {
    std::vector<Section> gens(fs.begin(), fs.begin() + 4);
    const HilbertCompression comp(gens);
    b.check_true("compression rank bounded by generators", comp.rank() <= 4, json(comp.rank()));
    const auto [coords, cheap_residual] = comp.coordinates(fs[0]);
    (void)cheap_residual;
    const Section rec = comp.reconstruct(coords);
    const Section diff = section_axpy(1.0, rec, -1.0, fs[0]);
    const double err = std::sqrt(std::max(0.0, stabilized_inner(diff, diff).value.real()));
    b.check("reconstruction round trip", safe_div(err, std::max(1.0, norms[0])), 1e-9, json());

    Section null_sec(fx.grid, fx.model);
    null_sec.declare_stable(1);
    const auto& slab0 = fx.grid->safe_slab(0);
    CounterRng sub = rng.substream(4100);
    null_sec.at(slab0[slab0.size() / 2]) =
        fx.model->random_fiber_vector(fx.grid->point_index(slab0[slab0.size() / 2]), sub);
    const Section shifted = section_axpy(1.0, fs[0], 1.0, null_sec);
    const HilbertCompression comp2({fs[0], shifted});
    b.check_true("null direction is quotiented out", comp2.rank() == 1, json(comp2.rank()));
  }

  // Stabilization plot data.
  {
    json levels = json::array(), values = json::array();
    for (int k = *fs[0].stable_level(); k <= fx.grid->k_max(); ++k) {
      levels.push_back(k);
      values.push_back(level_inner(fs[0], fs[0], k).real());
    }
    json series;
    series["stabilization"] = {{"levels", levels}, {"values", values}};
    b.series(series);
  }

  // Injected fault: a corrupted stable section must be caught, with the
  // witness point reported.
  if (sc.inject_corrupt_section()) {
    Section bad = fs[0];
    const auto& slab1 = fx.grid->safe_slab(1);
    const std::size_t pos = slab1[slab1.size() / 2];
    CounterRng sub = rng.substream(5000);
    bad.at(pos) = fv_add(bad.at(pos),
                         fx.model->random_fiber_vector(fx.grid->point_index(pos), sub));
    const StabilityCheck chk = is_k_stable(bad, *bad.stable_level());
    json w;
    w["corrupted_point"] = point_json(fx.grid->point(pos));
    if (chk.witness) w["witness"] = point_json(fx.grid->lattice().point_at(*chk.witness));
    b.check("corrupted stable section fixture", chk.defect, tol_defect, w);
  }

  return b.finish();
}

// ---------------------------------------------------------------------------
// representation-check
// ---------------------------------------------------------------------------

SuiteResult suite_representation_check(const Scenario& sc) {
  SuiteBuilder b("representation-check", sc.seed());
  const Fixtures fx = make_fixtures(sc);
  const double tol_iso = sc.tolerance("phi_isometry_rel");
  const double tol_dual = sc.tolerance("duality");
  const double tol_mult = sc.tolerance("phi_mult");
  b.tolerance("phi_isometry_rel", tol_iso);
  b.tolerance("duality", tol_dual);
  b.tolerance("phi_mult", tol_mult);
  b.tolerance("stability_defect", sc.tolerance("stability_defect"));

  CounterRng rng(sc.seed(), suite_stream("representation-check"));
  const int k_max = fx.grid->k_max();
  const std::vector<GridIndex> bases = feasible_bases(*fx.grid, 12, k_max - 1);
  if (bases.empty()) {
    b.fail("no feasible shift bases in the window", json());
    return b.finish();
  }

  // Random stable sections for the tests below.
  std::vector<Section> fpool;
  std::vector<double> fnorm;
  for (int i = 0; i < 6; ++i) {
    CounterRng sub = rng.substream(100 + i);
    fpool.push_back(random_stable_section(fx.grid, fx.model, i % 2, sub));
    fnorm.push_back(std::sqrt(stabilized_inner(fpool.back(), fpool.back()).value.real()));
  }

  // Isometry of phi0 via polarization, and exact lattice stability transport.
  const std::int64_t triples = sc.samples("representation");
  for (std::int64_t t = 0; t < triples; ++t) {
    CounterRng sub = rng.substream(1000 + t);
    const GridIndex& bidx = bases[static_cast<std::size_t>(t) % bases.size()];
    const int shift = shift_levels(sc.cone(), fx.grid->a_point(),
                                   fx.grid->lattice().point_at(bidx));
    std::size_t pick = static_cast<std::size_t>(sub.next_bits() % fpool.size());
    if (*fpool[pick].stable_level() + shift > k_max) pick = 0;  // fall back to a 0-stable one
    const Section& f = fpool[pick];
    const FiberVector u = fx.model->random_fiber_vector(bidx, sub);
    const FiberVector v = fx.model->random_fiber_vector(bidx, sub);
    const Section pu = phi0(u, f);
    const Section pv = phi0(v, f);
    const cdouble lhs = stabilized_inner(pu, pv).value;
    const cdouble rhs = fx.model->inner(u, v) * stabilized_inner(f, f).value;
    const double scale = std::max(1e-6, fx.model->norm(u) * fx.model->norm(v) *
                                            fnorm[pick] * fnorm[pick]);
    b.check("phi0 isometry identity", safe_div(std::abs(lhs - rhs), scale), tol_iso,
            json{{"b", point_json(fx.grid->lattice().point_at(bidx))}, {"triple", t}});
    if (t < 10 && *f.stable_level() + shift <= k_max - 1) {
      const StabilityCheck chk = is_k_stable(pu, *f.stable_level() + shift);
      b.check("stability transport",
              safe_div(chk.defect, std::max(1.0, fx.model->norm(u))),
              sc.tolerance("stability_defect"), json{{"triple", t}});
    }
  }

  // Adjoint duality <f_v | g> = <f | phi0(v) g>.
  const std::int64_t duality_n = sc.samples("duality");
  for (std::int64_t t = 0; t < duality_n; ++t) {
    CounterRng sub = rng.substream(2000 + t);
    const FiberVector v = fx.model->random_fiber_vector(fx.grid->a_index(), sub);
    const Section& f = fpool[static_cast<std::size_t>(sub.next_bits() % fpool.size())];
    const Section& g = fpool[static_cast<std::size_t>(sub.next_bits() % fpool.size())];
    const AdjointResult fv = adjoint_section(v, f);
    const cdouble lhs = stabilized_inner(fv.section, g).value;
    const cdouble rhs = stabilized_inner(f, phi0(v, g)).value;
    const double scale = std::max(1e-6, fx.model->norm(v) * section_norm(f) * section_norm(g));
    b.check("adjoint duality", safe_div(std::abs(lhs - rhs), scale), tol_dual,
            json{{"triple", t}});
  }

  // Compressed multiplicativity phi(uv) = phi(u) phi(v), plus column isometry
  // for unit vectors.
  {
    std::vector<Section> gens;
    gens.push_back(section_vacuum(fx.grid, fx.model));
    for (int i = 0; i < 2; ++i) {
      CounterRng sub = rng.substream(300 + i);
      gens.push_back(random_stable_section(fx.grid, fx.model, 0, sub));
    }
    const auto dom = std::make_shared<HilbertCompression>(gens);

    std::int64_t pairs_done = 0;
    const std::int64_t want_pairs = sc.samples("phi_mult_pairs");
    for (std::size_t i = 0; i < bases.size() && pairs_done < want_pairs; ++i) {
      for (std::size_t j = 0; j < bases.size() && pairs_done < want_pairs; ++j) {
        const Point xp = fx.grid->lattice().point_at(bases[i]);
        const Point yp = fx.grid->lattice().point_at(bases[j]);
        const int sx = shift_levels(sc.cone(), fx.grid->a_point(), xp);
        const int sy = shift_levels(sc.cone(), fx.grid->a_point(), yp);
        if (sx + sy > k_max) continue;
        const GridIndex xy = add(bases[i], bases[j]);
        if (!phi0_feasible(*fx.grid, xy) || !fx.grid->shifted_support_safe(xy)) continue;
        CounterRng sub = rng.substream(4000 + 31 * i + j);
        const FiberVector u = fx.model->random_fiber_vector(bases[i], sub, 3);
        const FiberVector v = fx.model->random_fiber_vector(bases[j], sub, 3);
        std::vector<Section> c1gens, c2gens;
        for (const auto& gsec : gens) c1gens.push_back(phi0(v, gsec));
        for (const auto& gsec : c1gens) c2gens.push_back(phi0(u, gsec));
        const auto c1 = std::make_shared<HilbertCompression>(c1gens);
        const auto c2 = std::make_shared<HilbertCompression>(c2gens);
        const CompressedOperator mv = phi_matrix(v, dom, c1);
        const CompressedOperator mu = phi_matrix(u, c1, c2);
        const CompressedOperator muv = phi_matrix(fx.model->multiply(u, v), dom, c2);
        const double scale =
            std::max(1e-6, fx.model->norm(u) * fx.model->norm(v));
        b.check("phi multiplicativity on compressions",
                safe_div(operator_norm(mu.matrix * mv.matrix - muv.matrix), scale), tol_mult,
                json{{"x", point_json(xp)}, {"y", point_json(yp)}});
        ++pairs_done;
      }
    }
    b.check_true("enough multiplicativity pairs", pairs_done >= want_pairs, json(pairs_done));

    // Unit vector: isometric columns, operator norm 1.
    CounterRng sub = rng.substream(4999);
    FiberVector v = fx.model->random_fiber_vector(bases[0], sub);
    v = fv_scale(v, cdouble(1.0 / fx.model->norm(v), 0.0));
    std::vector<Section> cgens;
    for (const auto& gsec : gens) cgens.push_back(phi0(v, gsec));
    const auto cod = std::make_shared<HilbertCompression>(cgens);
    const CompressedOperator m = phi_matrix(v, dom, cod);
    const CMatrix gramm = m.matrix.adjoint() * m.matrix;
    b.check("unit phi has isometric columns",
            operator_norm(gramm - CMatrix::identity(dom->rank())), 1e-8, json());
    b.check("unit phi norm bound", std::max(0.0, operator_norm(m.matrix) - 1.0), 1e-8, json());
  }

  return b.finish();
}

// ---------------------------------------------------------------------------
// essentiality
// ---------------------------------------------------------------------------

SuiteResult suite_essentiality(const Scenario& sc) {
  SuiteBuilder b("essentiality", sc.seed());
  const Fixtures fx = make_fixtures(sc);
  const double tol_triv = sc.tolerance("essentiality_trivial");
  const double tol_ccr = sc.tolerance("essentiality_ccr_rel");
  b.tolerance("essentiality_trivial", tol_triv);
  b.tolerance("essentiality_ccr_rel", tol_ccr);
  CounterRng rng(sc.seed(), suite_stream("essentiality"));

  // One-dimensional fibres: the single adjoint term saturates Parseval.
  {
    const auto tm = sc.make_trivial_model();
    CounterRng sub = rng.substream(1);
    const Section f = random_stable_section(fx.grid, tm, 0, sub);
    const EssentialityCurve curve = essentiality_defect(f, 1);
    b.check("trivial-model defect at N=1",
            safe_div(std::abs(curve.final_defect()), curve.norm_squared), tol_triv, json());
  }

  if (!fx.model->one_dimensional()) {
    json series_terms = json::array(), series_defects = json::array();
    const std::size_t n_f = fx.model->family_size();
    const std::int64_t n_sections = sc.samples("essentiality_sections");
    for (std::int64_t s = 0; s < n_sections; ++s) {
      CounterRng sub = rng.substream(100 + s);
      // Sections generated inside the truncation: left factor in the span of
      // the fibre family at a.
      const Section h = random_stable_section(fx.grid, fx.model, 0, sub);
      const FiberVector u = fx.model->random_fiber_vector(fx.grid->a_index(), sub, n_f);
      const Section f = phi0(u, h);
      const EssentialityCurve curve = essentiality_defect(f, n_f);
      const double scale = std::max(1e-12, curve.norm_squared);
      b.check_true("defect floor", curve.final_defect() >= -1e-8 * std::max(1.0, scale),
                   json{{"section", s}});
      for (std::size_t i = 1; i < curve.defects.size(); ++i)
        b.check_true("defect nonincreasing in N",
                     curve.defects[i] <= curve.defects[i - 1] + 1e-12 * std::max(1.0, scale),
                     json{{"section", s}, {"n", i + 1}});
      b.check("truncation-generated defect at N=N_f",
              safe_div(std::abs(curve.final_defect()), scale), tol_ccr, json{{"section", s}});
      if (s == 0) {
        for (std::size_t i = 0; i < curve.defects.size(); ++i) {
          series_terms.push_back(i + 1);
          series_defects.push_back(curve.defects[i]);
        }
      }
    }
    // The vacuum section is caught by the first basis vector alone.
    const Section vac = section_vacuum(fx.grid, fx.model);
    const EssentialityCurve vcurve = essentiality_defect(vac, 1);
    b.check("vacuum section defect at N=1",
            safe_div(std::abs(vcurve.final_defect()), vcurve.norm_squared), 1e-8, json());

    json series;
    series["essentiality"] = {{"terms", series_terms}, {"defects", series_defects}};
    b.series(series);
  } else {
    // Defect curve for the plot in the one-dimensional case.
    const auto tm = sc.make_trivial_model();
    CounterRng sub = rng.substream(2);
    const Section f = random_stable_section(fx.grid, tm, 0, sub);
    const EssentialityCurve curve = essentiality_defect(f, 1);
    json series;
    series["essentiality"] = {{"terms", json::array({1})},
                              {"defects", json::array({curve.final_defect()})}};
    b.series(series);
  }

  return b.finish();
}

// ---------------------------------------------------------------------------
// semigroup
// ---------------------------------------------------------------------------

SuiteResult suite_semigroup(const Scenario& sc) {
  SuiteBuilder b("semigroup", sc.seed());
  const double tol_semi = sc.tolerance("semigroup");
  const double tol_endo = sc.tolerance("endo");
  b.tolerance("semigroup", tol_semi);
  b.tolerance("endo", tol_endo);
  CounterRng rng(sc.seed(), suite_stream("semigroup"));

  // The induced semigroup law on compressions, in the one-dimensional model
  // where the conjugation is exact.
  {
    const auto grid = sc.make_section_grid();
    const auto tm = sc.make_trivial_model();
    std::vector<Section> gens;
    gens.push_back(section_vacuum(grid, tm));
    for (int i = 0; i < 2; ++i) {
      CounterRng sub = rng.substream(10 + i);
      gens.push_back(random_stable_section(grid, tm, 0, sub));
    }
    const auto dom = std::make_shared<HilbertCompression>(gens);
    CounterRng msub = rng.substream(20);
    CompressedOperator aop{random_matrix(dom->rank(), dom->rank(), msub), dom, dom};
    const double ascale = operator_norm(aop.matrix);

    const std::vector<GridIndex> bases = feasible_bases(*grid, 8, grid->k_max() - 1);
    std::int64_t pairs_done = 0;
    const std::int64_t want_pairs = sc.samples("semigroup_pairs");
    double max_entry_step = 0.0;
    for (std::size_t i = 0; i < bases.size() && pairs_done < want_pairs; ++i) {
      for (std::size_t j = 0; j < bases.size() && pairs_done < want_pairs; ++j) {
        const Point xp = grid->lattice().point_at(bases[i]);
        const Point yp = grid->lattice().point_at(bases[j]);
        const int sx = shift_levels(sc.cone(), grid->a_point(), xp);
        const int sy = shift_levels(sc.cone(), grid->a_point(), yp);
        if (sx + sy > grid->k_max()) continue;
        const GridIndex xy = add(bases[i], bases[j]);
        if (!phi0_feasible(*grid, xy) || !grid->shifted_support_safe(xy)) continue;

        const FiberVector ey = tm->onb(bases[j], 1)[0];
        const FiberVector ex = tm->onb(bases[i], 1)[0];
        std::vector<Section> c1gens, c2gens;
        for (const auto& gsec : gens) c1gens.push_back(phi0(ey, gsec));
        for (const auto& gsec : c1gens) c2gens.push_back(phi0(ex, gsec));
        const auto c1 = std::make_shared<HilbertCompression>(c1gens);
        const auto c2 = std::make_shared<HilbertCompression>(c2gens);

        const CompressedOperator ay = alpha_apply(bases[j], aop, 1, c1);
        const CompressedOperator axy_two = alpha_apply(bases[i], ay, 1, c2);
        const CompressedOperator axy_one = [&]() {
          CompressedOperator tmp = aop;
          return alpha_apply(xy, tmp, 1, c2);
        }();
        b.check("semigroup law on compressed operators",
                safe_div(operator_norm(axy_two.matrix - axy_one.matrix),
                         std::max(1.0, ascale)),
                tol_semi, json{{"x", point_json(xp)}, {"y", point_json(yp)}});
        ++pairs_done;
      }
    }
    b.check_true("enough semigroup pairs", pairs_done >= want_pairs, json(pairs_done));

    // Weak-continuity smoke along the lattice ray a, 2a, 3a: finite
    // differences of the leading matrix element of alpha_x(A), each computed
    // on its own codomain. Informational only.
    {
      std::vector<cdouble> entries;
      for (int m = 1; m <= std::min(3, grid->k_max()); ++m) {
        const GridIndex x = scaled(grid->a_index(), m);
        std::vector<Section> cgens;
        for (const auto& gsec : gens) cgens.push_back(phi0(tm->onb(x, 1)[0], gsec));
        const auto cod = std::make_shared<HilbertCompression>(cgens);
        const CompressedOperator ax = alpha_apply(x, aop, 1, cod);
        entries.push_back(ax.matrix.at(0, 0));
      }
      for (std::size_t m = 1; m < entries.size(); ++m)
        max_entry_step = std::max(max_entry_step, std::abs(entries[m] - entries[m - 1]));
      std::ostringstream os;
      os << "weak-continuity smoke: max finite difference of alpha entries along the a-ray "
         << max_entry_step;
      b.note(os.str());
    }
  }

  // Matrix-level endomorphisms from isometry families.
  {
    // Block embeddings C^2 -> C^4: unital.
    CMatrix v1(4, 2), v2(4, 2);
    v1.at(0, 0) = 1.0;
    v1.at(1, 1) = 1.0;
    v2.at(2, 0) = 1.0;
    v2.at(3, 1) = 1.0;
    const EndoResult blocks = endo_from_isometries({v1, v2}, CMatrix::identity(2), tol_endo);
    b.check("block embeddings reproduce the identity",
            operator_norm(blocks.value - CMatrix::identity(4)), tol_endo, json());
    b.check_true("block embeddings are unital", blocks.unital, json());

    // A single unit column: a rank-one non-unital endomorphism.
    CounterRng sub = rng.substream(40);
    CMatrix u = random_matrix(4, 1, sub);
    double nrm = 0.0;
    for (std::size_t i = 0; i < 4; ++i) nrm += std::norm(u.at(i, 0));
    u = u.scaled(cdouble(1.0 / std::sqrt(nrm), 0.0));
    const EndoResult rank1 = endo_from_isometries({u}, CMatrix::identity(1), tol_endo);
    b.check_true("rank-one family is not unital", !rank1.unital, json());

    // Random unitary split into two blocks: a *-homomorphism, unital.
    const CMatrix uu = random_unitary(6, sc.seed() + 7);
    CMatrix w1(6, 3), w2(6, 3);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        w1.at(i, j) = uu.at(i, j);
        w2.at(i, j) = uu.at(i, j + 3);
      }
    CounterRng msub = rng.substream(50);
    const CMatrix ma = random_matrix(3, 3, msub);
    const CMatrix mb = random_matrix(3, 3, msub);
    const std::vector<CMatrix> fam = {w1, w2};
    const EndoResult ra = endo_from_isometries(fam, ma, tol_endo);
    const EndoResult rb = endo_from_isometries(fam, mb, tol_endo);
    const EndoResult rab = endo_from_isometries(fam, ma * mb, tol_endo);
    const double scale = std::max(1.0, operator_norm(ma) * operator_norm(mb));
    b.check("endomorphism is multiplicative",
            safe_div(operator_norm(rab.value - ra.value * rb.value), scale), tol_endo, json());
    const EndoResult radj = endo_from_isometries(fam, ma.adjoint(), tol_endo);
    b.check("endomorphism preserves adjoints",
            operator_norm(radj.value - ra.value.adjoint()), tol_endo, json());
    const EndoResult rsum = endo_from_isometries(fam, ma + mb, tol_endo);
    b.check("endomorphism is linear",
            operator_norm(rsum.value - (ra.value + rb.value)), tol_endo, json());
    b.check_true("unitality iff the ranges fill the space",
                 ra.unital && operator_norm(ra.alpha_of_one - CMatrix::identity(6)) <= tol_endo,
                 json());

    // Families without orthogonal ranges must be rejected.
    bool rejected = false;
    try {
      endo_from_isometries({v1, v1}, CMatrix::identity(2), tol_endo);
    } catch (const InvalidArgument&) {
      rejected = true;
    }
    b.check_true("non-orthogonal families are rejected", rejected, json());
  }

  return b.finish();
}

// ---------------------------------------------------------------------------
// onedim-check
// ---------------------------------------------------------------------------

SuiteResult suite_onedim_check(const Scenario& sc) {
  SuiteBuilder b("onedim-check", sc.seed());
  const MultiplierForm& form = sc.onedim_spec().multiplier;
  const std::size_t d = sc.cone().dimension();
  const double tol_mult = sc.tolerance("multiplier");
  const double tol_proj = sc.tolerance("projective");
  const double tol_ad = sc.tolerance("ad_semigroup");
  const double tol_cross = sc.tolerance("cross_model");
  b.tolerance("multiplier", tol_mult);
  b.tolerance("projective", tol_proj);
  b.tolerance("ad_semigroup", tol_ad);
  b.tolerance("cross_model", tol_cross);
  CounterRng rng(sc.seed(), suite_stream("onedim-check"));

  // Multiplier identity on random triples.
  const std::int64_t triples = sc.samples("multiplier_triples");
  double worst = 0.0;
  for (std::int64_t t = 0; t < triples; ++t) {
    CounterRng sub = rng.substream(100 + t);
    Point x(d), y(d), z(d);
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = sub.next_uniform(-2.0, 2.0);
      y[j] = sub.next_uniform(-2.0, 2.0);
      z[j] = sub.next_uniform(-2.0, 2.0);
    }
    worst = std::max(worst, multiplier_defect(form, x, y, z));
  }
  b.count_samples(triples - 1);
  b.check("multiplier identity", worst, tol_mult, json());
  b.check("multiplier with zero argument",
          multiplier_defect(form, Point(d, 0.7), Point(d, -0.4), Point(d, 0.0)), 0.0, json());

  // Grid, functions, unitaries.
  OnedimGrid grid;
  grid.spacing = sc.onedim_spec().spacing;
  grid.lo = sc.onedim_spec().box_lo;
  grid.size.assign(d, sc.onedim_spec().grid_points);

  auto random_function = [&](std::uint64_t stream) {
    CounterRng sub = rng.substream(stream);
    GridFunction f;
    f.grid = grid;
    const int third = grid.size[0] / 3;
    for (int t = 0; t < 8; ++t) {
      std::vector<int> idx(d);
      for (std::size_t j = 0; j < d; ++j)
        idx[j] = third + static_cast<int>(sub.next_bits() % static_cast<std::uint64_t>(third));
      f.values[idx] = random_coeff(sub);
    }
    return f;
  };

  auto lattice_vector = [&](std::uint64_t stream) {
    CounterRng sub = rng.substream(stream);
    Point x(d);
    for (std::size_t j = 0; j < d; ++j) {
      const int steps = static_cast<int>(sub.next_bits() % 5) - 2;  // -2..2
      x[j] = grid.spacing * steps;
    }
    return x;
  };

  for (int t = 0; t < 5; ++t) {
    const GridFunction f = random_function(300 + t);
    const Point x = lattice_vector(400 + t);
    const Point y = lattice_vector(450 + t);
    const GridFunction uxf = u_apply(form, x, f);
    b.check("translation preserves the norm",
            std::abs(uxf.l2_norm_squared() - f.l2_norm_squared()),
            sc.tolerance("norm_preservation") * std::max(1.0, f.l2_norm_squared()), json());
    // Projective relation U_x U_y = omega(x, y) U_{x+y}.
    const GridFunction lhs = u_apply(form, x, u_apply(form, y, f));
    const GridFunction rhs_fn = u_apply(form, add(x, y), f);
    const cdouble w = omega(form, x, y);
    GridFunction scaled_rhs = rhs_fn;
    for (auto& [idx, val] : scaled_rhs.values) val *= w;
    b.check("projective relation", safe_div(grid_distance(lhs, scaled_rhs), f.l2_norm()),
            tol_proj, json{{"x", x}, {"y", y}});

    // Cross-model agreement: the measured composition phase equals the model
    // multiplier, which is exactly the scalar the one-dimensional product
    // system attaches to the product of fibre generators.
    const cdouble measured = grid_inner(lhs, rhs_fn) / cdouble(f.l2_norm_squared(), 0.0);
    b.check("cross-model fibre agreement", std::abs(measured - w), tol_cross,
            json{{"x", x}, {"y", y}});
  }

  // Conjugation semigroup on finite-rank operators.
  for (int t = 0; t < 5; ++t) {
    CounterRng sub = rng.substream(600 + t);
    DeltaOperator op;
    op.grid = grid;
    const int c = grid.size[0] / 2;
    std::vector<std::vector<int>> supp;
    for (int i = 0; i < 3; ++i) {
      std::vector<int> idx(d, c);
      idx[0] = c + i;
      supp.push_back(idx);
    }
    op.support = supp;
    op.m = random_matrix(supp.size(), supp.size(), sub);
    const Point x = lattice_vector(700 + t);
    const Point y = lattice_vector(750 + t);
    const DeltaOperator lhs = ad_u(form, x, ad_u(form, y, op));
    const DeltaOperator rhs = ad_u(form, add(x, y), op);
    b.check("conjugation semigroup", safe_div(delta_operator_distance(lhs, rhs), op.m.max_abs()),
            tol_ad, json{{"x", x}, {"y", y}});
  }

  // Identity at the origin is exact.
  {
    const GridFunction f = random_function(900);
    const Point zero(d, 0.0);
    const GridFunction same = u_apply(form, zero, f);
    b.check("U_0 is the identity", grid_distance(same, f), 0.0, json());
  }

  // Support escape is an error, never a wrap.
  {
    GridFunction f;
    f.grid = grid;
    std::vector<int> corner(d, grid.size[0] - 1);
    f.values[corner] = 1.0;
    bool raised = false;
    try {
      u_apply(form, Point(d, grid.spacing), f);
    } catch (const WindowTooSmall&) {
      raised = true;
    }
    b.check_true("support escape raises an error", raised, json());
  }

  return b.finish();
}

// ---------------------------------------------------------------------------
// roundtrip
// ---------------------------------------------------------------------------

SuiteResult suite_roundtrip(const Scenario& sc) {
  SuiteBuilder b("roundtrip", sc.seed());
  const Fixtures fx = make_fixtures(sc);
  const double tol_iso = sc.tolerance("roundtrip_isometry_rel");
  const double tol_mult = sc.tolerance("roundtrip_mult_rel");
  b.tolerance("roundtrip_isometry_rel", tol_iso);
  b.tolerance("roundtrip_mult_rel", tol_mult);
  CounterRng rng(sc.seed(), suite_stream("roundtrip"));
  const int k_max = fx.grid->k_max();

  std::vector<Section> gens;
  gens.push_back(section_vacuum(fx.grid, fx.model));
  for (int i = 0; i < 2; ++i) {
    CounterRng sub = rng.substream(10 + i);
    gens.push_back(random_stable_section(fx.grid, fx.model, 0, sub));
  }
  const auto dom = std::make_shared<HilbertCompression>(gens);
  const CMatrix eye = CMatrix::identity(dom->rank());

  const std::vector<GridIndex> bases = feasible_bases(*fx.grid, 8, k_max - 1);
  const std::int64_t want_points = sc.samples("roundtrip_points");
  if (bases.size() < 2) {
    b.fail("not enough feasible base points", json(bases.size()));
    return b.finish();
  }

  std::int64_t points_done = 0;
  for (std::size_t i = 0; i < bases.size() || points_done < want_points; ++i) {
    if (points_done >= want_points) break;
    const GridIndex& x = bases[i % bases.size()];
    CounterRng sub = rng.substream(100 + points_done);
    const FiberVector u = fx.model->random_fiber_vector(x, sub);
    const FiberVector v = fx.model->random_fiber_vector(x, sub);
    // Codomain spanned by the images of the whole fibre family, so any
    // combination's image has exact coordinates.
    std::vector<Section> cgens;
    for (const auto& g : fx.model->generating_family(x))
      for (const auto& base_sec : gens) cgens.push_back(phi0(g, base_sec));
    const auto cod = std::make_shared<HilbertCompression>(cgens);
    CompressedOperator mu, mv;
    try {
      mu = phi_matrix(u, dom, cod);
      mv = phi_matrix(v, dom, cod);
    } catch (const NumericalInconsistency& e) {
      b.fail("codomain coverage", json{{"x", point_json(fx.grid->lattice().point_at(x))},
                                       {"error", e.what()}});
      ++points_done;
      continue;
    }
    const double nu = fx.model->norm(u), nv = fx.model->norm(v);
    // (i) phi(v)^* phi(u) = <u|v> on the represented subspace.
    const CMatrix prod = mv.matrix.adjoint() * mu.matrix;
    const CMatrix expected = eye.scaled(fx.model->inner(u, v));
    b.check("scalar identity phi(v)* phi(u) = <u|v>",
            safe_div(operator_norm(prod - expected), std::max(1e-6, nu * nv)), tol_mult,
            json{{"x", point_json(fx.grid->lattice().point_at(x))}});
    // (iii) the fibre map is isometric.
    const CMatrix self = mu.matrix.adjoint() * mu.matrix;
    b.check("fibre map isometry",
            safe_div(operator_norm(self - eye.scaled(cdouble(nu * nu, 0.0))),
                     std::max(1e-6, nu * nu)),
            tol_iso, json{{"x", point_json(fx.grid->lattice().point_at(x))}});
    ++points_done;
  }
  b.check_true("enough sampled base points", points_done >= want_points, json(points_done));

  // (ii) multiplicativity across fibres.
  std::int64_t pairs_done = 0;
  const std::int64_t want_pairs = sc.samples("roundtrip_pairs");
  for (std::size_t i = 0; i < bases.size() && pairs_done < want_pairs; ++i) {
    for (std::size_t j = 0; j < bases.size() && pairs_done < want_pairs; ++j) {
      const Point xp = fx.grid->lattice().point_at(bases[i]);
      const Point yp = fx.grid->lattice().point_at(bases[j]);
      const int sx = shift_levels(sc.cone(), fx.grid->a_point(), xp);
      const int sy = shift_levels(sc.cone(), fx.grid->a_point(), yp);
      if (sx + sy > k_max) continue;
      const GridIndex xy = add(bases[i], bases[j]);
      if (!phi0_feasible(*fx.grid, xy) || !fx.grid->shifted_support_safe(xy)) continue;
      CounterRng sub = rng.substream(7000 + 13 * i + j);
      const FiberVector u = fx.model->random_fiber_vector(bases[i], sub, 3);
      const FiberVector v = fx.model->random_fiber_vector(bases[j], sub, 3);
      std::vector<Section> c1gens, c2gens;
      for (const auto& gsec : gens) c1gens.push_back(phi0(v, gsec));
      for (const auto& gsec : c1gens) c2gens.push_back(phi0(u, gsec));
      const auto c1 = std::make_shared<HilbertCompression>(c1gens);
      const auto c2 = std::make_shared<HilbertCompression>(c2gens);
      const CompressedOperator mv = phi_matrix(v, dom, c1);
      const CompressedOperator mu = phi_matrix(u, c1, c2);
      const CompressedOperator muv = phi_matrix(fx.model->multiply(u, v), dom, c2);
      b.check("multiplicativity of the fibre map",
              safe_div(operator_norm(mu.matrix * mv.matrix - muv.matrix),
                       std::max(1e-6, fx.model->norm(u) * fx.model->norm(v))),
              tol_mult, json{{"x", point_json(xp)}, {"y", point_json(yp)}});
      ++pairs_done;
    }
  }
  b.check_true("enough multiplicativity pairs", pairs_done >= want_pairs, json(pairs_done));

  return b.finish();
}

}  // namespace

SuiteResult run_suite(const Scenario& sc, const std::string& name) {
  if (name == "validate-cone") return suite_validate_cone(sc);
  if (name == "partition") return suite_partition(sc);
  if (name == "chi-check") return suite_chi_check(sc);
  if (name == "measure-check") return suite_measure_check(sc);
  if (name == "sections-check") return suite_sections_check(sc);
  if (name == "representation-check") return suite_representation_check(sc);
  if (name == "essentiality") return suite_essentiality(sc);
  if (name == "semigroup") return suite_semigroup(sc);
  if (name == "onedim-check") return suite_onedim_check(sc);
  if (name == "roundtrip") return suite_roundtrip(sc);
  throw InvalidArgument("unknown suite '" + name + "'");
}

VerificationReport run_scenario(const Scenario& sc) {
  VerificationReport rep;
  rep.scenario_echo = sc.echo();
  {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    rep.generated_at_utc = buf;
  }
  for (const auto& name : sc.suites()) {
    const auto t0 = std::chrono::steady_clock::now();
    SuiteResult r;
    try {
      r = run_suite(sc, name);
    } catch (const std::exception& e) {
      SuiteBuilder b(name, sc.seed());
      b.fail("suite aborted", json(e.what()));
      r = b.finish();
    }
    const auto t1 = std::chrono::steady_clock::now();
    r.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    rep.suites.push_back(std::move(r));
  }
  return rep;
}

}  // namespace pslab
