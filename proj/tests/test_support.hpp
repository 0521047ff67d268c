#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "properdiv/measures.hpp"

namespace properdiv::testing {

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

/// Random piecewise-linear CDF with up to max_breaks breakpoints, mixing
/// jumps, ramps, and flat stretches. The first left value is 0 and the last
/// right value exactly 1.
inline PiecewiseLinearCdf random_piecewise_cdf(std::mt19937_64& rng,
                                               int max_breaks = 8,
                                               double lo = -5.0,
                                               double hi = 5.0) {
  std::uniform_int_distribution<int> n_dist(1, max_breaks);
  std::uniform_real_distribution<double> x_dist(lo, hi);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  const int n = n_dist(rng);
  std::vector<double> bp;
  while (static_cast<int>(bp.size()) < n) {
    const double x = x_dist(rng);
    bool close = false;
    for (double b : bp) {
      if (std::abs(b - x) < 1e-6) close = true;
    }
    if (!close) bp.push_back(x);
  }
  std::sort(bp.begin(), bp.end());

  // 2n nonnegative increments: jump at i, then ramp from i to i+1
  std::vector<double> inc(2 * static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& d : inc) {
    d = u01(rng) < 0.3 ? 0.0 : u01(rng);
    total += d;
  }
  if (total == 0.0) {
    inc.back() = 1.0;
    total = 1.0;
  }
  std::vector<double> vl(static_cast<std::size_t>(n)),
      vr(static_cast<std::size_t>(n));
  double cum = 0.0;
  for (int i = 0; i < n; ++i) {
    vl[static_cast<std::size_t>(i)] = cum / total;
    cum += inc[2 * static_cast<std::size_t>(i)];
    vr[static_cast<std::size_t>(i)] = cum / total;
    cum += inc[2 * static_cast<std::size_t>(i) + 1];
  }
  vl.front() = 0.0;
  vr.back() = 1.0;
  return PiecewiseLinearCdf(std::move(bp), std::move(vl), std::move(vr));
}

inline std::vector<double> random_samples(std::mt19937_64& rng, int n,
                                          double lo = -5.0, double hi = 5.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& v : out) v = dist(rng);
  return out;
}

/// Random discrete distribution on [lo, hi] with exact-rational weights
/// (multiples of 1/den. denominator <= 12), so cumulative values stay clean.
inline std::pair<std::vector<double>, std::vector<double>> random_discrete(
    std::mt19937_64& rng, int max_atoms = 6, double lo = -3.0,
    double hi = 3.0) {
  std::uniform_int_distribution<int> n_dist(1, max_atoms);
  std::uniform_real_distribution<double> x_dist(lo, hi);
  const int n = n_dist(rng);
  std::vector<double> atoms;
  while (static_cast<int>(atoms.size()) < n) {
    const double x = x_dist(rng);
    bool close = false;
    for (double a : atoms) {
      if (std::abs(a - x) < 1e-6) close = true;
    }
    if (!close) atoms.push_back(x);
  }
  std::sort(atoms.begin(), atoms.end());
  std::uniform_int_distribution<int> unit(1, 4);
  std::vector<int> parts(static_cast<std::size_t>(n));
  int total = 0;
  for (auto& p : parts) {
    p = unit(rng);
    total += p;
  }
  std::vector<double> weights(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] = static_cast<double>(parts[i]) / total;
  }
  return {std::move(atoms), std::move(weights)};
}

inline std::vector<double> random_probs(std::mt19937_64& rng, int categories,
                                        bool allow_zero = false) {
  std::uniform_int_distribution<int> unit(allow_zero ? 0 : 1, 6);
  std::vector<int> parts(static_cast<std::size_t>(categories));
  int total = 0;
  for (auto& p : parts) {
    p = unit(rng);
    total += p;
  }
  if (total == 0) {
    parts[0] = 1;
    total = 1;
  }
  std::vector<double> probs(parts.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    probs[i] = static_cast<double>(parts[i]) / total;
  }
  return probs;
}

}  // namespace properdiv::testing
