#include "properdiv/measures.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace properdiv {

namespace {

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace

PiecewiseLinearCdf::PiecewiseLinearCdf(std::vector<double> breakpoints,
                                       std::vector<double> values_left,
                                       std::vector<double> values_right)
    : breakpoints_(std::move(breakpoints)),
      values_left_(std::move(values_left)),
      values_right_(std::move(values_right)) {
  const std::size_t n = breakpoints_.size();
  if (n == 0 || values_left_.size() != n || values_right_.size() != n) {
    throw InvalidInput("piecewise-linear CDF: mismatched or empty arrays");
  }
  if (!all_finite(breakpoints_)) {
    throw InvalidInput("piecewise-linear CDF: non-finite breakpoint");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(breakpoints_[i - 1] < breakpoints_[i])) {
      throw InvalidInput(
          "piecewise-linear CDF: breakpoints not strictly increasing");
    }
  }
  if (values_left_.front() < 0.0) {
    throw InvalidInput("piecewise-linear CDF: negative initial value");
  }
  if (values_right_.back() != 1.0) {
    throw InvalidInput("piecewise-linear CDF: last value must be exactly 1");
  }
  // The merged sequence vl[0], vr[0], vl[1], vr[1], ... must be nondecreasing.
  for (std::size_t i = 0; i < n; ++i) {
    if (values_left_[i] > values_right_[i]) {
      throw InvalidInput("piecewise-linear CDF: decreasing at breakpoint");
    }
    if (i + 1 < n && values_right_[i] > values_left_[i + 1]) {
      throw InvalidInput("piecewise-linear CDF: decreasing between breakpoints");
    }
  }
}

PiecewiseLinearCdf PiecewiseLinearCdf::point_mass(double x) {
  if (!std::isfinite(x)) throw InvalidInput("point mass: non-finite location");
  return PiecewiseLinearCdf({x}, {0.0}, {1.0});
}

PiecewiseLinearCdf PiecewiseLinearCdf::uniform(double a, double b) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidInput("uniform: requires finite a < b");
  }
  return PiecewiseLinearCdf({a, b}, {0.0, 1.0}, {0.0, 1.0});
}

PiecewiseLinearCdf PiecewiseLinearCdf::discrete(std::vector<double> atoms,
                                                std::vector<double> weights) {
  if (atoms.empty() || atoms.size() != weights.size()) {
    throw InvalidInput("discrete: mismatched or empty atoms/weights");
  }
  if (!all_finite(atoms)) throw InvalidInput("discrete: non-finite atom");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidInput("discrete: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidInput("discrete: weights must sum to 1");
  }

  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return atoms[i] < atoms[j];
  });

  std::vector<double> bp, vl, vr;
  double cum = 0.0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    const double x = atoms[order[r]];
    double w = weights[order[r]];
    // pool duplicates
    while (r + 1 < order.size() && atoms[order[r + 1]] == x) {
      ++r;
      w += weights[order[r]];
    }
    if (w == 0.0) continue;
    bp.push_back(x);
    vl.push_back(cum);
    cum += w;
    vr.push_back(cum);
  }
  if (bp.empty()) throw InvalidInput("discrete: no mass");
  vr.back() = 1.0;  // snap away the accumulated rounding
  return PiecewiseLinearCdf(std::move(bp), std::move(vl), std::move(vr));
}

double PiecewiseLinearCdf::eval(double t) const {
  if (std::isnan(t)) throw InvalidInput("cdf_eval: NaN argument");
  if (t < breakpoints_.front()) return 0.0;
  if (t >= breakpoints_.back()) return 1.0;
  // largest i with breakpoints_[i] <= t
  const auto it =
      std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  if (breakpoints_[i] == t) return values_right_[i];
  const double x0 = breakpoints_[i], x1 = breakpoints_[i + 1];
  const double y0 = values_right_[i], y1 = values_left_[i + 1];
  return y0 + (y1 - y0) * (t - x0) / (x1 - x0);
}

double PiecewiseLinearCdf::eval_left(double t) const {
  if (std::isnan(t)) throw InvalidInput("cdf_eval: NaN argument");
  if (t <= breakpoints_.front()) return t == breakpoints_.front()
                                            ? values_left_.front()
                                            : 0.0;
  if (t > breakpoints_.back()) return 1.0;
  const auto it =
      std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t);
  if (it != breakpoints_.end() && *it == t) {
    return values_left_[static_cast<std::size_t>(it - breakpoints_.begin())];
  }
  return eval(t);  // continuous inside open segments
}

double PiecewiseLinearCdf::quantile(double u) const {
  if (!(u > 0.0) || !(u <= 1.0)) {
    throw InvalidInput("quantile: level must be in (0, 1]");
  }
  const auto it =
      std::lower_bound(values_right_.begin(), values_right_.end(), u);
  const std::size_t i = static_cast<std::size_t>(it - values_right_.begin());
  if (i == 0) return breakpoints_.front();
  if (u > values_left_[i]) return breakpoints_[i];  // jump covers u
  const double y0 = values_right_[i - 1], y1 = values_left_[i];
  const double x0 = breakpoints_[i - 1], x1 = breakpoints_[i];
  return x0 + (u - y0) / (y1 - y0) * (x1 - x0);
}

double PiecewiseLinearCdf::mean() const {
  // E[X] = a + integral of (1 - F) over the support hull.
  double acc = breakpoints_.front();
  for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
    const double len = breakpoints_[i + 1] - breakpoints_[i];
    acc += len * (1.0 - 0.5 * (values_right_[i] + values_left_[i + 1]));
  }
  return acc;
}

double PiecewiseLinearCdf::variance() const {
  // E[X^2] = b^2 - integral of 2 t F(t) dt; the integrand is quadratic per
  // segment, so Simpson is exact.
  const double b = breakpoints_.back();
  double ex2 = b * b;
  for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
    const double t0 = breakpoints_[i], t1 = breakpoints_[i + 1];
    const double f0 = values_right_[i], f1 = values_left_[i + 1];
    const double tm = 0.5 * (t0 + t1), fm = 0.5 * (f0 + f1);
    const double len = t1 - t0;
    ex2 -= len / 6.0 * (2.0 * t0 * f0 + 4.0 * 2.0 * tm * fm + 2.0 * t1 * f1);
  }
  const double mu = mean();
  const double var = ex2 - mu * mu;
  return var > 0.0 ? var : 0.0;
}

PiecewiseLinearCdf PiecewiseLinearCdf::shifted(double delta) const {
  if (!std::isfinite(delta)) throw InvalidInput("shifted: non-finite delta");
  std::vector<double> bp = breakpoints_;
  for (double& x : bp) x += delta;
  return PiecewiseLinearCdf(std::move(bp), values_left_, values_right_);
}

EmpiricalMeasure::EmpiricalMeasure(std::vector<double> values)
    : atoms_(std::move(values)) {
  if (atoms_.empty()) throw InvalidInput("empirical measure: empty sample");
  if (!all_finite(atoms_)) {
    throw InvalidInput("empirical measure: non-finite value");
  }
  std::sort(atoms_.begin(), atoms_.end());
}

PiecewiseLinearCdf EmpiricalMeasure::as_cdf() const {
  const double k = static_cast<double>(atoms_.size());
  std::vector<double> bp, vl, vr;
  std::size_t i = 0;
  while (i < atoms_.size()) {
    std::size_t j = i;
    while (j < atoms_.size() && atoms_[j] == atoms_[i]) ++j;
    bp.push_back(atoms_[i]);
    vl.push_back(static_cast<double>(i) / k);
    vr.push_back(static_cast<double>(j) / k);
    i = j;
  }
  return PiecewiseLinearCdf(std::move(bp), std::move(vl), std::move(vr));
}

EmpiricalMeasure empirical_from_samples(std::vector<double> values) {
  return EmpiricalMeasure(std::move(values));
}

CategoricalDist::CategoricalDist(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty()) throw InvalidInput("categorical: empty vector");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw InvalidInput("categorical: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidInput("categorical: probabilities must sum to 1");
  }
}

MomentSummary::MomentSummary(Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  const Eigen::Index m = mean_.size();
  if (m == 0 || cov_.rows() != m || cov_.cols() != m) {
    throw InvalidInput("moment summary: dimension mismatch");
  }
  if (!mean_.allFinite() || !cov_.allFinite()) {
    throw InvalidInput("moment summary: non-finite entry");
  }
  const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidInput("moment summary: covariance not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov_,
                                                    Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-12 * std::max(cov_.trace(), 1.0)) {
    throw InvalidInput("moment summary: covariance not positive semidefinite");
  }
}

MomentSummary moment_summary(const std::vector<Eigen::VectorXd>& samples) {
  if (samples.empty()) throw InvalidInput("moment summary: empty sample");
  const Eigen::Index m = samples.front().size();
  for (const auto& x : samples) {
    if (x.size() != m) {
      throw InvalidInput("moment summary: dimension mismatch across samples");
    }
    if (!x.allFinite()) throw InvalidInput("moment summary: non-finite value");
  }
  const double n = static_cast<double>(samples.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(m);
  for (const auto& x : samples) mean += x;
  mean /= n;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(m, m);
  for (const auto& x : samples) {
    const Eigen::VectorXd d = x - mean;
    cov += d * d.transpose();
  }
  cov /= n;  // population covariance: the moments of the empirical measure
  return MomentSummary(std::move(mean), std::move(cov));
}

MomentSummary moment_summary(const std::vector<double>& samples) {
  std::vector<Eigen::VectorXd> vecs;
  vecs.reserve(samples.size());
  for (double x : samples) {
    vecs.push_back(Eigen::VectorXd::Constant(1, x));
  }
  return moment_summary(vecs);
}

CategoricalDist bin_to_categorical(const std::vector<double>& values,
                                   const std::vector<double>& edges) {
  if (edges.size() < 2) throw InvalidInput("binning: need at least 2 edges");
  if (!all_finite(edges)) throw InvalidInput("binning: non-finite edge");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i - 1] < edges[i])) {
      throw InvalidInput("binning: edges not strictly increasing");
    }
  }
  if (values.empty()) throw InvalidInput("binning: empty sample");
  const std::size_t c = edges.size() - 1;
  std::vector<std::size_t> counts(c, 0);
  for (double v : values) {
    if (!std::isfinite(v) || v < edges.front() || v > edges.back()) {
      throw OutOfRange("binning: value " + std::to_string(v) +
                       " outside [" + std::to_string(edges.front()) + ", " +
                       std::to_string(edges.back()) + "]");
    }
    std::size_t bin;
    if (v == edges.back()) {
      bin = c - 1;  // last bin is closed on both sides
    } else {
      const auto it = std::upper_bound(edges.begin(), edges.end(), v);
      bin = static_cast<std::size_t>(it - edges.begin()) - 1;
    }
    ++counts[bin];
  }
  // Telescoping prefix quotients make the probabilities sum to 1 exactly.
  const double total = static_cast<double>(values.size());
  std::vector<double> probs(c);
  std::size_t prefix = 0;
  double prev = 0.0;
  for (std::size_t i = 0; i < c; ++i) {
    prefix += counts[i];
    const double cur = static_cast<double>(prefix) / total;
    probs[i] = cur - prev;
    prev = cur;
  }
  return CategoricalDist(std::move(probs));
}

Date parse_date(std::string_view iso) {
  auto digit = [&](std::size_t i) { return std::isdigit(static_cast<unsigned char>(iso[i])) != 0; };
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-' || !digit(0) ||
      !digit(1) || !digit(2) || !digit(3) || !digit(5) || !digit(6) ||
      !digit(8) || !digit(9)) {
    throw InvalidInput("date: expected YYYY-MM-DD, got '" + std::string(iso) +
                       "'");
  }
  auto num = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) v = v * 10 + (iso[i] - '0');
    return v;
  };
  Date d{num(0, 4), num(5, 2), num(8, 2)};
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31) {
    throw InvalidInput("date: out-of-range month or day in '" +
                       std::string(iso) + "'");
  }
  return d;
}

std::vector<AnnualMax> annual_maxima(
    const std::vector<std::pair<Date, double>>& series, int min_days) {
  if (series.empty()) throw InvalidInput("annual maxima: empty series");
  struct YearAcc {
    double max = -std::numeric_limits<double>::infinity();
    int count = 0;
  };
  std::map<int, YearAcc> years;
  for (const auto& [date, value] : series) {
    if (!std::isfinite(value)) {
      throw InvalidInput("annual maxima: non-finite value");
    }
    auto& acc = years[date.year];
    acc.max = std::max(acc.max, value);
    ++acc.count;
  }
  std::vector<AnnualMax> out;
  out.reserve(years.size());
  for (const auto& [year, acc] : years) {
    out.push_back({year, acc.max, acc.count < min_days});
  }
  return out;
}

}  // namespace properdiv
