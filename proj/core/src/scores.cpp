#include "properdiv/scores.hpp"

#include <atomic>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "properdiv/errors.hpp"
#include "properdiv/piecewise.hpp"

namespace properdiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegativeClamp = -1e-10;

std::atomic<std::size_t> g_clamp_count{0};

double clamp_divergence(double v) {
  if (v < 0.0) {
    if (v > kNegativeClamp) {
      ++g_clamp_count;
      return 0.0;
    }
  }
  return v;
}

void check_category(const CategoricalDist& forecast, std::size_t y) {
  if (y < 1 || y > forecast.size()) {
    throw InvalidInput("score: category index out of range");
  }
}

void check_counts(const CategoricalDist& forecast,
                  const std::vector<std::size_t>& counts) {
  if (counts.size() != forecast.size()) {
    throw InvalidInput("score: counts length does not match category count");
  }
  std::size_t k = 0;
  for (std::size_t c : counts) k += c;
  if (k == 0) throw InvalidInput("score: empty sample");
}

// Cholesky of a strictly positive definite covariance; rejects matrices
// singular within 1e-12 * trace.
Eigen::LLT<Eigen::MatrixXd> pd_factor(const Eigen::MatrixXd& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov,
                                                    Eigen::EigenvaluesOnly);
  const double tol = 1e-12 * std::max(cov.trace(), 0.0);
  if (es.eigenvalues().minCoeff() <= tol) {
    throw SingularCovariance("covariance is singular within tolerance");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw SingularCovariance("covariance factorization failed");
  }
  return llt;
}

double log_det_from_llt(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

Kernel Kernel::absolute() {
  return Kernel("abs", [](double x, double y) { return std::abs(x - y); });
}

Kernel Kernel::power(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 2.0)) {
    throw InvalidInput("kernel: exponent must lie in (0, 2)");
  }
  return Kernel("pow" + std::to_string(alpha), [alpha](double x, double y) {
    return std::pow(std::abs(x - y), alpha);
  });
}

Kernel Kernel::custom(std::string id,
                      std::function<double(double, double)> h) {
  if (!h) throw InvalidInput("kernel: empty function");
  return Kernel(std::move(id), std::move(h));
}

ScoreValue crps(const PiecewiseLinearCdf& forecast, double y) {
  if (!std::isfinite(y)) throw InvalidInput("crps: non-finite observation");
  return {integral_squared_diff(forecast, PiecewiseLinearCdf::point_mass(y)),
          "crps"};
}

ScoreValue kernel_score(const Kernel& h, const EmpiricalMeasure& forecast,
                        double y) {
  if (!std::isfinite(y)) {
    throw InvalidInput("kernel score: non-finite observation");
  }
  const auto& xs = forecast.atoms();
  const double k = static_cast<double>(xs.size());
  double cross = 0.0;
  for (double x : xs) cross += h(x, y);
  double within = 0.0;
  for (double a : xs) {
    for (double b : xs) within += h(a, b);
  }
  return {cross / k - 0.5 * within / (k * k), "kernel:" + h.id()};
}

ScoreValue log_score(const CategoricalDist& forecast, std::size_t y) {
  check_category(forecast, y);
  const double f = forecast.probs()[y - 1];
  return {f > 0.0 ? -std::log(f) : kInf, "log"};
}

ScoreValue brier_score(const CategoricalDist& forecast, std::size_t y) {
  check_category(forecast, y);
  double acc = 0.0;
  for (std::size_t i = 0; i < forecast.size(); ++i) {
    const double d = forecast.probs()[i] - (i + 1 == y ? 1.0 : 0.0);
    acc += d * d;
  }
  return {acc, "brier"};
}

ScoreValue ds_score(const MomentSummary& forecast, const Eigen::VectorXd& y) {
  if (y.size() != forecast.dim()) {
    throw InvalidInput("ds score: dimension mismatch");
  }
  if (!y.allFinite()) throw InvalidInput("ds score: non-finite observation");
  const auto llt = pd_factor(forecast.cov());
  const Eigen::VectorXd d = forecast.mean() - y;
  const double quad = d.dot(llt.solve(d));
  return {log_det_from_llt(llt) + quad, "ds"};
}

ScoreValue ds_score(const MomentSummary& forecast, double y) {
  return ds_score(forecast, Eigen::VectorXd::Constant(1, y));
}

double mean_score_crps(const PiecewiseLinearCdf& forecast,
                       const EmpiricalMeasure& sample) {
  double acc = 0.0;
  for (double y : sample.atoms()) acc += crps(forecast, y).value;
  return acc / static_cast<double>(sample.size());
}

double mean_score_kernel(const Kernel& h, const EmpiricalMeasure& forecast,
                         const EmpiricalMeasure& sample) {
  double acc = 0.0;
  for (double y : sample.atoms()) acc += kernel_score(h, forecast, y).value;
  return acc / static_cast<double>(sample.size());
}

double mean_score_log(const CategoricalDist& forecast,
                      const std::vector<std::size_t>& counts) {
  check_counts(forecast, counts);
  std::size_t k = 0;
  double acc = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    k += counts[i];
    if (counts[i] == 0) continue;
    const double f = forecast.probs()[i];
    if (f <= 0.0) return kInf;
    acc += static_cast<double>(counts[i]) * -std::log(f);
  }
  return acc / static_cast<double>(k);
}

double mean_score_brier(const CategoricalDist& forecast,
                        const std::vector<std::size_t>& counts) {
  check_counts(forecast, counts);
  std::size_t k = 0;
  double acc = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    k += counts[i];
    if (counts[i] == 0) continue;
    acc += static_cast<double>(counts[i]) *
           brier_score(forecast, i + 1).value;
  }
  return acc / static_cast<double>(k);
}

double mean_score_ds(const MomentSummary& forecast,
                     const std::vector<Eigen::VectorXd>& sample) {
  if (sample.empty()) throw InvalidInput("ds score: empty sample");
  double acc = 0.0;
  for (const auto& y : sample) acc += ds_score(forecast, y).value;
  return acc / static_cast<double>(sample.size());
}

double self_score_crps(const EmpiricalMeasure& sample) {
  // s(Ghat, Ghat) = E|y - y'| / 2 with both drawn (with replacement) from
  // the sample atoms.
  const auto& ys = sample.atoms();
  const double k = static_cast<double>(ys.size());
  double within = 0.0;
  for (double a : ys) {
    for (double b : ys) within += std::abs(a - b);
  }
  return 0.5 * within / (k * k);
}

double self_score_kernel(const Kernel& h, const EmpiricalMeasure& sample) {
  const auto& ys = sample.atoms();
  const double k = static_cast<double>(ys.size());
  double within = 0.0;
  for (double a : ys) {
    for (double b : ys) within += h(a, b);
  }
  return 0.5 * within / (k * k);
}

double self_score_log(const std::vector<std::size_t>& counts) {
  std::size_t k = 0;
  for (std::size_t c : counts) k += c;
  if (k == 0) throw InvalidInput("score: empty sample");
  double acc = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double g = static_cast<double>(c) / static_cast<double>(k);
    acc -= g * std::log(g);
  }
  return acc;
}

double self_score_brier(const std::vector<std::size_t>& counts) {
  std::size_t k = 0;
  for (std::size_t c : counts) k += c;
  if (k == 0) throw InvalidInput("score: empty sample");
  double acc = 1.0;
  for (std::size_t c : counts) {
    const double g = static_cast<double>(c) / static_cast<double>(k);
    acc -= g * g;
  }
  return acc;
}

double self_score_ds(const std::vector<Eigen::VectorXd>& sample) {
  const MomentSummary summary = moment_summary(sample);
  const auto llt = pd_factor(summary.cov());
  return log_det_from_llt(llt) + static_cast<double>(summary.dim());
}

double score_divergence_crps(const PiecewiseLinearCdf& forecast,
                             const EmpiricalMeasure& sample) {
  return clamp_divergence(mean_score_crps(forecast, sample) -
                          self_score_crps(sample));
}

double score_divergence_kernel(const Kernel& h,
                               const EmpiricalMeasure& forecast,
                               const EmpiricalMeasure& sample) {
  return clamp_divergence(mean_score_kernel(h, forecast, sample) -
                          self_score_kernel(h, sample));
}

double score_divergence_log(const CategoricalDist& forecast,
                            const std::vector<std::size_t>& counts) {
  const double mean = mean_score_log(forecast, counts);
  if (mean == kInf) return kInf;
  return clamp_divergence(mean - self_score_log(counts));
}

double score_divergence_brier(const CategoricalDist& forecast,
                              const std::vector<std::size_t>& counts) {
  return clamp_divergence(mean_score_brier(forecast, counts) -
                          self_score_brier(counts));
}

double score_divergence_ds(const MomentSummary& forecast,
                           const std::vector<Eigen::VectorXd>& sample) {
  return clamp_divergence(mean_score_ds(forecast, sample) -
                          self_score_ds(sample));
}

std::size_t negative_clamp_count() { return g_clamp_count.load(); }

}  // namespace properdiv
