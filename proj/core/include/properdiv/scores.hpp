#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "properdiv/measures.hpp"

namespace properdiv {

/// A realized score. Units depend on the rule: CRPS and kernel scores are in
/// the physical data units, the log score in nats, Brier and
/// Dawid-Sebastiani are dimensionless(-plus-log-units). +infinity is a legal
/// value (log score on a zero-probability outcome) and propagates through
/// means.
struct ScoreValue {
  double value;
  std::string rule_id;
};

/// Negative definite kernel h(x, y) on the real line.
class Kernel {
 public:
  /// h(x, y) = |x - y|.
  static Kernel absolute();
  /// h(x, y) = |x - y|^alpha for alpha in (0, 2). Outside that range the
  /// kernel stops being negative definite, so the induced divergence loses
  /// propriety beyond mean differences.
  static Kernel power(double alpha);
  /// Extension point. The caller must guarantee symmetry, negative
  /// definiteness, and finite moments on the inputs used.
  static Kernel custom(std::string id, std::function<double(double, double)> h);

  double operator()(double x, double y) const { return fn_(x, y); }
  const std::string& id() const { return id_; }

 private:
  Kernel(std::string id, std::function<double(double, double)> fn)
      : id_(std::move(id)), fn_(std::move(fn)) {}
  std::string id_;
  std::function<double(double, double)> fn_;
};

/// Continuous ranked probability score: the integral of
/// (F(x) - 1{y <= x})^2 dx, evaluated in closed form per segment. Agrees
/// with E|x - y| - E|x - x'|/2 for x, x' independent with law F.
ScoreValue crps(const PiecewiseLinearCdf& forecast, double y);

/// Kernel score E_F h(x, y) - E_F h(x, x')/2, exact double sum over atoms.
ScoreValue kernel_score(const Kernel& h, const EmpiricalMeasure& forecast,
                        double y);

/// -log f_y in nats; +infinity when f_y = 0. Category index is 1-based.
ScoreValue log_score(const CategoricalDist& forecast, std::size_t y);

/// Sum over categories of (f_i - 1{i = y})^2. Category index is 1-based.
ScoreValue brier_score(const CategoricalDist& forecast, std::size_t y);

/// Dawid-Sebastiani score log det(Cov) + (mean - y)' Cov^{-1} (mean - y),
/// solved by symmetric factorization. Requires a strictly positive definite
/// covariance.
ScoreValue ds_score(const MomentSummary& forecast, const Eigen::VectorXd& y);
ScoreValue ds_score(const MomentSummary& forecast, double y);

// Mean scores over an observed sample (the empirical-measure average of the
// pointwise score); +infinity propagates.
double mean_score_crps(const PiecewiseLinearCdf& forecast,
                       const EmpiricalMeasure& sample);
double mean_score_kernel(const Kernel& h, const EmpiricalMeasure& forecast,
                         const EmpiricalMeasure& sample);
double mean_score_log(const CategoricalDist& forecast,
                      const std::vector<std::size_t>& counts);
double mean_score_brier(const CategoricalDist& forecast,
                        const std::vector<std::size_t>& counts);
double mean_score_ds(const MomentSummary& forecast,
                     const std::vector<Eigen::VectorXd>& sample);

// Self scores s(empirical, empirical): the expected score when the forecast
// is the empirical measure of the sample and the observation is drawn from
// it. All closed-form: no resampling involved.
double self_score_crps(const EmpiricalMeasure& sample);
double self_score_kernel(const Kernel& h, const EmpiricalMeasure& sample);
/// Shannon entropy of the empirical category frequencies, in nats.
double self_score_log(const std::vector<std::size_t>& counts);
/// 1 - sum of squared empirical frequencies.
double self_score_brier(const std::vector<std::size_t>& counts);
/// log det of the empirical covariance + dimension (the quadratic form
/// integrates to m exactly).
double self_score_ds(const std::vector<Eigen::VectorXd>& sample);

// Score divergences: mean score minus self score. Nonnegative; values in
// (-1e-10, 0) from floating-point noise are clamped to zero.
double score_divergence_crps(const PiecewiseLinearCdf& forecast,
                             const EmpiricalMeasure& sample);
double score_divergence_kernel(const Kernel& h,
                               const EmpiricalMeasure& forecast,
                               const EmpiricalMeasure& sample);
double score_divergence_log(const CategoricalDist& forecast,
                            const std::vector<std::size_t>& counts);
double score_divergence_brier(const CategoricalDist& forecast,
                              const std::vector<std::size_t>& counts);
double score_divergence_ds(const MomentSummary& forecast,
                           const std::vector<Eigen::VectorXd>& sample);

/// Number of score-divergence evaluations so far whose raw value fell in the
/// negative clamp window (-1e-10, 0). Diagnostic counter; thread-safe.
std::size_t negative_clamp_count();

}  // namespace properdiv
