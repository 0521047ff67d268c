#include "properdiv/piecewise.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "properdiv/errors.hpp"

namespace properdiv {

namespace {

std::vector<double> merged_grid(const std::vector<double>& a,
                                const std::vector<double>& b) {
  std::vector<double> grid;
  grid.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(grid));
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

// 32-point Gauss-Legendre rule on [-1, 1], computed once by Newton iteration
// on the Legendre polynomial.
struct GaussLegendre32 {
  std::array<double, 32> node{};
  std::array<double, 32> weight{};
  GaussLegendre32() {
    constexpr int n = 32;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
          const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      node[static_cast<std::size_t>(i)] = x;
      weight[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

const GaussLegendre32& gl32() {
  static const GaussLegendre32 rule;
  return rule;
}

}  // namespace

std::vector<CdfSegment> merged_segments(const PiecewiseLinearCdf& F,
                                        const PiecewiseLinearCdf& G) {
  const std::vector<double> grid =
      merged_grid(F.breakpoints(), G.breakpoints());
  std::vector<CdfSegment> segs;
  segs.reserve(grid.size() > 0 ? grid.size() - 1 : 0);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    CdfSegment s;
    s.t0 = grid[i];
    s.t1 = grid[i + 1];
    s.f0 = F.eval(s.t0);
    s.f1 = F.eval_left(s.t1);
    s.g0 = G.eval(s.t0);
    s.g1 = G.eval_left(s.t1);
    segs.push_back(s);
  }
  return segs;
}

double integral_squared_diff(const PiecewiseLinearCdf& F,
                             const PiecewiseLinearCdf& G) {
  double acc = 0.0;
  for (const CdfSegment& s : merged_segments(F, G)) {
    const double da = s.f0 - s.g0;
    const double db = s.f1 - s.g1;
    acc += (s.t1 - s.t0) * (da * da + da * db + db * db) / 3.0;
  }
  return acc;
}

double integral_abs_diff(const PiecewiseLinearCdf& F,
                         const PiecewiseLinearCdf& G) {
  double acc = 0.0;
  for (const CdfSegment& s : merged_segments(F, G)) {
    const double len = s.t1 - s.t0;
    const double da = s.f0 - s.g0;
    const double db = s.f1 - s.g1;
    if (da * db >= 0.0) {
      acc += len * 0.5 * (std::abs(da) + std::abs(db));
    } else {
      // affine difference changes sign once inside the segment
      const double root = len * da / (da - db);
      acc += 0.5 * (std::abs(da) * root + std::abs(db) * (len - root));
    }
  }
  return acc;
}

double sup_abs_diff(const PiecewiseLinearCdf& F, const PiecewiseLinearCdf& G) {
  const std::vector<double> grid =
      merged_grid(F.breakpoints(), G.breakpoints());
  double sup = 0.0;
  for (double t : grid) {
    sup = std::max(sup, std::abs(F.eval(t) - G.eval(t)));
    sup = std::max(sup, std::abs(F.eval_left(t) - G.eval_left(t)));
  }
  return sup;
}

double expected_abs_difference(const PiecewiseLinearCdf& F,
                               const PiecewiseLinearCdf& G) {
  // Integrand F(1-G) + G(1-F) is quadratic per segment: Simpson is exact.
  double acc = 0.0;
  for (const CdfSegment& s : merged_segments(F, G)) {
    const double fm = 0.5 * (s.f0 + s.f1);
    const double gm = 0.5 * (s.g0 + s.g1);
    const double h0 = s.f0 * (1.0 - s.g0) + s.g0 * (1.0 - s.f0);
    const double hm = fm * (1.0 - gm) + gm * (1.0 - fm);
    const double h1 = s.f1 * (1.0 - s.g1) + s.g1 * (1.0 - s.f1);
    acc += (s.t1 - s.t0) / 6.0 * (h0 + 4.0 * hm + h1);
  }
  return acc;
}

namespace {

// Affine representation q(u) = q_lo + slope * (u - u_lo) of the quantile
// function on an open level interval (u_lo, u_hi) that crosses no stored
// CDF value. Classified at the midpoint: either a jump of the CDF covers
// the whole interval (constant quantile) or a strictly increasing linear
// piece does (affine quantile).
struct AffinePiece {
  double q_lo, q_hi;
};

AffinePiece quantile_affine(const PiecewiseLinearCdf& F, double u_lo,
                            double u_hi) {
  const double um = 0.5 * (u_lo + u_hi);
  const auto& bp = F.breakpoints();
  const auto& vl = F.values_left();
  const auto& vr = F.values_right();
  const auto it = std::lower_bound(vr.begin(), vr.end(), um);
  const std::size_t i = static_cast<std::size_t>(it - vr.begin());
  if (i == 0 || um > vl[i]) {
    const double q = bp[i];  // jump at bp[i] spans the interval
    return {q, q};
  }
  const double y0 = vr[i - 1], y1 = vl[i];
  const double x0 = bp[i - 1], x1 = bp[i];
  const double slope = (x1 - x0) / (y1 - y0);
  return {x0 + (u_lo - y0) * slope, x0 + (u_hi - y0) * slope};
}

std::vector<double> level_grid(const PiecewiseLinearCdf& F,
                               const PiecewiseLinearCdf& G) {
  std::vector<double> levels{0.0, 1.0};
  auto add = [&](const PiecewiseLinearCdf& cdf) {
    for (double v : cdf.values_left()) levels.push_back(v);
    for (double v : cdf.values_right()) levels.push_back(v);
  };
  add(F);
  add(G);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  // clamp to [0, 1]; stored values are probabilities already, 0/1 included
  while (!levels.empty() && levels.front() < 0.0) levels.erase(levels.begin());
  return levels;
}

}  // namespace

std::vector<QuantileSegment> merged_quantile_segments(
    const PiecewiseLinearCdf& F, const PiecewiseLinearCdf& G) {
  const std::vector<double> levels = level_grid(F, G);
  std::vector<QuantileSegment> segs;
  segs.reserve(levels.size() > 0 ? levels.size() - 1 : 0);
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    QuantileSegment s;
    s.u0 = levels[i];
    s.u1 = levels[i + 1];
    const AffinePiece qf = quantile_affine(F, s.u0, s.u1);
    const AffinePiece qg = quantile_affine(G, s.u0, s.u1);
    s.qf0 = qf.q_lo;
    s.qf1 = qf.q_hi;
    s.qg0 = qg.q_lo;
    s.qg1 = qg.q_hi;
    segs.push_back(s);
  }
  return segs;
}

double integral_quantile_diff_pow(const PiecewiseLinearCdf& F,
                                  const PiecewiseLinearCdf& G, double p) {
  if (!(p >= 1.0)) throw InvalidInput("quantile integral: order must be >= 1");
  double acc = 0.0;
  for (const QuantileSegment& s : merged_quantile_segments(F, G)) {
    const double len = s.u1 - s.u0;
    if (len <= 0.0) continue;
    const double da = s.qf0 - s.qg0;
    const double db = s.qf1 - s.qg1;
    if (p == 1.0) {
      if (da * db >= 0.0) {
        acc += len * 0.5 * (std::abs(da) + std::abs(db));
      } else {
        const double root = len * da / (da - db);
        acc += 0.5 * (std::abs(da) * root + std::abs(db) * (len - root));
      }
    } else if (p == 2.0) {
      acc += len * (da * da + da * db + db * db) / 3.0;
    } else {
      // |affine|^p: split at the sign change, then Gauss-Legendre on each
      // smooth piece
      auto gl_piece = [&](double ua, double ub, double qa, double qb) {
        const double half = 0.5 * (ub - ua);
        if (half <= 0.0) return 0.0;
        const auto& rule = gl32();
        double piece = 0.0;
        for (std::size_t j = 0; j < rule.node.size(); ++j) {
          const double w = 0.5 * (1.0 + rule.node[j]);
          const double q = qa + (qb - qa) * w;
          piece += rule.weight[j] * std::pow(std::abs(q), p);
        }
        return piece * half;
      };
      if (da * db < 0.0) {
        const double root = len * da / (da - db);
        acc += gl_piece(s.u0, s.u0 + root, da, 0.0);
        acc += gl_piece(s.u0 + root, s.u1, 0.0, db);
      } else {
        acc += gl_piece(s.u0, s.u1, da, db);
      }
    }
  }
  return acc;
}

}  // namespace properdiv
