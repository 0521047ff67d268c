#pragma once

#include <vector>

#include "properdiv/measures.hpp"

namespace properdiv {

/// One open interval (t0, t1) of the merged breakpoint grid of two CDFs,
/// with the one-sided values of each CDF at the interval ends. Both CDFs
/// are affine on the open interval.
struct CdfSegment {
  double t0, t1;
  double f0, f1;  // F(t0+), F(t1-)
  double g0, g1;  // G(t0+), G(t1-)
};

std::vector<CdfSegment> merged_segments(const PiecewiseLinearCdf& F,
                                        const PiecewiseLinearCdf& G);

/// Integral of (F - G)^2 dt, exact per segment.
double integral_squared_diff(const PiecewiseLinearCdf& F,
                             const PiecewiseLinearCdf& G);

/// Integral of |F - G| dt, exact: segments are split at sign changes.
double integral_abs_diff(const PiecewiseLinearCdf& F,
                         const PiecewiseLinearCdf& G);

/// sup_t |F(t) - G(t)|. The supremum over an open segment with affine F - G
/// is attained at an endpoint, so only one-sided values at the merged
/// breakpoints need checking.
double sup_abs_diff(const PiecewiseLinearCdf& F, const PiecewiseLinearCdf& G);

/// E|x - y| for independent x ~ F, y ~ G, computed as the exact integral of
/// F(1-G) + G(1-F) over the merged grid.
double expected_abs_difference(const PiecewiseLinearCdf& F,
                               const PiecewiseLinearCdf& G);

/// One open probability-level interval (u0, u1) on which both quantile
/// functions are affine, with one-sided values at the ends.
struct QuantileSegment {
  double u0, u1;
  double qf0, qf1;  // F^{-1}(u0+), F^{-1}(u1-)
  double qg0, qg1;
};

std::vector<QuantileSegment> merged_quantile_segments(
    const PiecewiseLinearCdf& F, const PiecewiseLinearCdf& G);

/// Integral over (0,1) of |F^{-1}(u) - G^{-1}(u)|^p du. Exact closed forms
/// for p in {1, 2}; otherwise 32-node Gauss-Legendre per quantile segment
/// (segments are additionally split at sign changes), accurate to ~1e-9.
double integral_quantile_diff_pow(const PiecewiseLinearCdf& F,
                                  const PiecewiseLinearCdf& G, double p);

}  // namespace properdiv
