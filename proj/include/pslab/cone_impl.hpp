#pragma once

#include <cmath>

#include "pslab/errors.hpp"
#include "pslab/rng.hpp"

namespace pslab {

template <typename Pred>
MeasureEstimate estimate_measure(Pred&& predicate, const Point& box_lo, const Point& box_hi,
                                 std::int64_t samples, std::uint64_t seed) {
  const std::size_t d = box_lo.size();
  if (box_hi.size() != d || d == 0) throw InvalidArgument("estimate_measure: bad box");
  double volume = 1.0;
  for (std::size_t j = 0; j < d; ++j) {
    if (!(box_hi[j] > box_lo[j])) throw InvalidArgument("estimate_measure: empty box");
    volume *= box_hi[j] - box_lo[j];
  }
  if (samples < 1) throw InvalidArgument("estimate_measure: need at least one sample");

  const CounterRng rng(seed);
  std::int64_t hits = 0;
  Point x(d);
  for (std::int64_t i = 0; i < samples; ++i) {
    for (std::size_t j = 0; j < d; ++j)
      x[j] = rng.uniform_at(static_cast<std::uint64_t>(i) * d + j, box_lo[j], box_hi[j]);
    if (predicate(x)) ++hits;
  }

  MeasureEstimate est;
  est.samples = samples;
  est.hits = hits;
  est.seed = seed;
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  est.value = volume * p;
  est.standard_error = volume * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  return est;
}

}  // namespace pslab
