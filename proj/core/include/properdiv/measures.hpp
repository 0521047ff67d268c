#pragma once

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "properdiv/errors.hpp"

namespace properdiv {

/// A one-dimensional distribution stored as a right-continuous,
/// piecewise-linear CDF. Breakpoints are in physical units; at each
/// breakpoint both the left limit F(x-) and the value F(x) are stored, so
/// one-sided values at jumps are available exactly. F is 0 before the first
/// breakpoint, 1 at and after the last, and linear in between. Step CDFs
/// (empirical measures) and continuous laws such as the uniform are both
/// special cases.
class PiecewiseLinearCdf {
 public:
  PiecewiseLinearCdf(std::vector<double> breakpoints,
                     std::vector<double> values_left,
                     std::vector<double> values_right);

  static PiecewiseLinearCdf point_mass(double x);
  static PiecewiseLinearCdf uniform(double a, double b);
  /// Step CDF of a discrete distribution; atoms need not be sorted,
  /// duplicate atoms have their weights pooled. Weights must be >= 0 and
  /// sum to 1 within 1e-12 (the last cumulative value is snapped to 1).
  static PiecewiseLinearCdf discrete(std::vector<double> atoms,
                                     std::vector<double> weights);

  /// F(t), right-continuous.
  double eval(double t) const;
  /// Left limit F(t-).
  double eval_left(double t) const;
  /// Generalized inverse inf{ t : F(t) >= u } for u in (0, 1].
  double quantile(double u) const;

  double mean() const;
  double variance() const;
  /// Same distribution translated by delta.
  PiecewiseLinearCdf shifted(double delta) const;

  double support_min() const { return breakpoints_.front(); }
  double support_max() const { return breakpoints_.back(); }

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values_left() const { return values_left_; }
  const std::vector<double>& values_right() const { return values_right_; }

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_left_;
  std::vector<double> values_right_;
};

/// Equal-weight point measure on k observations. Duplicate atoms are kept
/// as-is (each carries weight 1/k); they merge into a single jump when
/// converting to a CDF.
class EmpiricalMeasure {
 public:
  explicit EmpiricalMeasure(std::vector<double> values);

  const std::vector<double>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  PiecewiseLinearCdf as_cdf() const;

 private:
  std::vector<double> atoms_;  // sorted
};

EmpiricalMeasure empirical_from_samples(std::vector<double> values);

/// Probability vector over c categories.
class CategoricalDist {
 public:
  explicit CategoricalDist(std::vector<double> probs);

  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }

 private:
  std::vector<double> probs_;
};

/// Mean vector and covariance matrix of an m-dimensional distribution.
/// The covariance must be symmetric within 1e-12 and positive semidefinite
/// within -1e-12 * trace.
class MomentSummary {
 public:
  MomentSummary(Eigen::VectorXd mean, Eigen::MatrixXd cov);

  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }
  Eigen::Index dim() const { return mean_.size(); }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
};

/// Arithmetic mean and population covariance (divisor k, not k-1), so the
/// summary of an empirical measure is the exact moment pair of that measure.
MomentSummary moment_summary(const std::vector<Eigen::VectorXd>& samples);
MomentSummary moment_summary(const std::vector<double>& samples);

/// Relative frequencies over the bins defined by c+1 strictly increasing
/// edges. Bin i is [edges[i], edges[i+1]) except the last, which is closed
/// on both sides. Values outside [edges.front(), edges.back()] raise
/// OutOfRange. The output probabilities sum to 1 exactly.
CategoricalDist bin_to_categorical(const std::vector<double>& values,
                                   const std::vector<double>& edges);

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;
};

/// Parses strict ISO-8601 "YYYY-MM-DD". Throws InvalidInput.
Date parse_date(std::string_view iso);

struct AnnualMax {
  int year;
  double value;
  /// Set when the year has fewer than min_days entries; the value is still
  /// emitted.
  bool incomplete;
};

/// Per calendar year present in the series, the maximum value, years
/// ascending.
std::vector<AnnualMax> annual_maxima(
    const std::vector<std::pair<Date, double>>& series, int min_days = 300);

}  // namespace properdiv
