#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "properdiv/measures.hpp"

namespace properdiv {

enum class DivergenceId {
  IQ,                    // integrated quadratic distance
  WIQ,                   // weighted integrated quadratic distance
  MV,                    // mean value divergence
  Mahalanobis,           // squared Mahalanobis distance, fixed matrix
  ImproperMahalanobis,   // Mahalanobis with the forecast's own covariance
  DS,                    // Dawid-Sebastiani divergence
  AV,                    // area validation metric
  Wasserstein,           // order-p transportation distance
  KS,                    // Kolmogorov-Smirnov distance
  KL,                    // Kullback-Leibler, literal orientation
  KLScoreForm,           // Kullback-Leibler, score-divergence orientation
  Brier,                 // quadratic divergence
  Hellinger,
};

enum class Propriety { KProper, AsymptoticallyProper, ImproperVariant };

std::string_view to_string(DivergenceId id);
std::string_view to_string(Propriety p);
DivergenceId divergence_id_from_string(std::string_view name);

/// Nonnegative piecewise-constant weight: level[i] on
/// [breakpoints[i], breakpoints[i+1]), zero outside. The total integral is
/// finite by construction (all segments bounded).
class WeightFunction {
 public:
  WeightFunction(std::vector<double> breakpoints, std::vector<double> levels);

  double at(double t) const;
  double total_integral() const;
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& levels() const { return levels_; }

 private:
  std::vector<double> breakpoints_;  // size n+1, strictly increasing
  std::vector<double> levels_;       // size n, each >= 0
};

/// Identifies a divergence together with its parameters and propriety
/// status. Serializes to/from a JSON object, e.g.
/// {"id": "WASSERSTEIN", "p": 2} or {"id": "MAHALANOBIS", "sigma": [[...]]}.
struct DivergenceSpec {
  DivergenceId id = DivergenceId::IQ;
  double p = 2.0;                          // Wasserstein order
  std::optional<WeightFunction> weight;    // WIQ
  std::optional<Eigen::MatrixXd> sigma;    // Mahalanobis

  Propriety propriety() const;
  /// True for the divergences acting on probability vectors
  /// (KL, KL_SCOREFORM, BRIER, HELLINGER).
  bool categorical() const;

  static DivergenceSpec parse(const std::string& json_text);
  std::string to_json() const;
};

/// All thirteen divergences with their propriety classification.
std::vector<DivergenceSpec> divergence_catalogue();

struct DivergenceValue {
  double value;
  std::string units;
  DivergenceSpec spec;
};

/// Unit bookkeeping: IQ/WIQ/AV/Wasserstein report the data unit, MV the
/// squared data unit, everything else is dimensionless.
std::string units_string(const DivergenceSpec& spec,
                         const std::string& data_unit);

DivergenceValue iq_distance(const PiecewiseLinearCdf& F,
                            const PiecewiseLinearCdf& G);
DivergenceValue weighted_iq(const PiecewiseLinearCdf& F,
                            const PiecewiseLinearCdf& G,
                            const WeightFunction& w);
DivergenceValue mean_value_divergence(const MomentSummary& F,
                                      const MomentSummary& G);
DivergenceValue mahalanobis_divergence(const MomentSummary& F,
                                       const MomentSummary& G,
                                       const Eigen::MatrixXd& sigma);
/// The improper variant that plugs in the forecast's own covariance;
/// inflating it shrinks the value. Tagged improper_variant so downstream
/// ranking emits a warning.
DivergenceValue improper_mahalanobis(const MomentSummary& F,
                                     const MomentSummary& G);
DivergenceValue dawid_sebastiani(const MomentSummary& F,
                                 const MomentSummary& G);
DivergenceValue area_validation_metric(const PiecewiseLinearCdf& F,
                                       const PiecewiseLinearCdf& G);
DivergenceValue wasserstein(const PiecewiseLinearCdf& F,
                            const PiecewiseLinearCdf& G, double p);
DivergenceValue ks_distance(const PiecewiseLinearCdf& F,
                            const PiecewiseLinearCdf& G);
DivergenceValue kl_divergence(const CategoricalDist& F,
                              const CategoricalDist& G);
/// Score-divergence orientation against an observed sample:
/// sum_j ghat_j log(ghat_j / f_j) with ghat = counts / k. This is the form
/// that is k-proper as d(F, Ghat_k) and the default for model ranking.
DivergenceValue kl_score_divergence(const CategoricalDist& F,
                                    const std::vector<std::size_t>& counts);
DivergenceValue brier_divergence(const CategoricalDist& F,
                                 const CategoricalDist& G);
DivergenceValue hellinger_distance(const CategoricalDist& F,
                                   const CategoricalDist& G);

/// Dispatch on a spec for real-valued distributions. Moment-based
/// divergences (MV, Mahalanobis variants, DS) act on the exact moments of
/// the CDFs (m = 1). Categorical specs are rejected here; bin first.
DivergenceValue eval_divergence(const DivergenceSpec& spec,
                                const PiecewiseLinearCdf& F,
                                const PiecewiseLinearCdf& G,
                                const std::string& data_unit = "");

/// Dispatch on a spec for categorical distributions. KL_SCOREFORM treats G
/// as the empirical frequency vector: d = sum_j g_j log(g_j / f_j).
DivergenceValue eval_divergence(const DivergenceSpec& spec,
                                const CategoricalDist& F,
                                const CategoricalDist& G,
                                const std::string& data_unit = "");

}  // namespace properdiv
