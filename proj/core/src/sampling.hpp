#pragma once

#include <cstddef>
#include <span>

#include "rulex/rng.hpp"

namespace rulex::detail {

// Draws an index with probability proportional to w (all w >= 0, at least
// one positive among the candidates). `exclude` (if < w.size()) is never drawn.
inline std::size_t sample_weighted(std::span<const double> w, Rng& rng,
                                   std::size_t exclude = static_cast<std::size_t>(-1)) {
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (i != exclude) total += w[i];
  double u = uniform01(rng) * total;
  std::size_t last = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i == exclude || w[i] <= 0.0) continue;
    last = i;
    if (u < w[i]) return i;
    u -= w[i];
  }
  return last;
}

}  // namespace rulex::detail
