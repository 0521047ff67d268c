#include "properdiv/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "properdiv/errors.hpp"
#include "properdiv/piecewise.hpp"

namespace properdiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Divergences are nonnegative; tiny negative values from floating-point
// cancellation are snapped to zero.
double nonneg(double v) { return (v < 0.0 && v > -1e-10) ? 0.0 : v; }

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

DivergenceValue make_value(DivergenceSpec spec, double v,
                           const std::string& data_unit = "") {
  return {v, units_string(spec, data_unit), std::move(spec)};
}

void check_same_dim(const MomentSummary& F, const MomentSummary& G) {
  if (F.dim() != G.dim()) {
    throw InvalidInput("divergence: moment summaries of different dimension");
  }
}

void check_same_size(const CategoricalDist& F, const CategoricalDist& G) {
  if (F.size() != G.size()) {
    throw InvalidInput("divergence: category counts differ");
  }
}

MomentSummary moments_of_cdf(const PiecewiseLinearCdf& F) {
  return MomentSummary(Eigen::VectorXd::Constant(1, F.mean()),
                       Eigen::MatrixXd::Constant(1, 1, F.variance()));
}

}  // namespace

std::string_view to_string(DivergenceId id) {
  switch (id) {
    case DivergenceId::IQ: return "IQ";
    case DivergenceId::WIQ: return "WIQ";
    case DivergenceId::MV: return "MV";
    case DivergenceId::Mahalanobis: return "MAHALANOBIS";
    case DivergenceId::ImproperMahalanobis: return "IMPROPER_MAHALANOBIS";
    case DivergenceId::DS: return "DS";
    case DivergenceId::AV: return "AV";
    case DivergenceId::Wasserstein: return "WASSERSTEIN";
    case DivergenceId::KS: return "KS";
    case DivergenceId::KL: return "KL";
    case DivergenceId::KLScoreForm: return "KL_SCOREFORM";
    case DivergenceId::Brier: return "BRIER";
    case DivergenceId::Hellinger: return "HELLINGER";
  }
  throw InvalidInput("divergence: unknown id");
}

std::string_view to_string(Propriety p) {
  switch (p) {
    case Propriety::KProper: return "k_proper";
    case Propriety::AsymptoticallyProper: return "asymptotically_proper";
    case Propriety::ImproperVariant: return "improper_variant";
  }
  throw InvalidInput("divergence: unknown propriety");
}

DivergenceId divergence_id_from_string(std::string_view name) {
  static const std::pair<std::string_view, DivergenceId> table[] = {
      {"IQ", DivergenceId::IQ},
      {"WIQ", DivergenceId::WIQ},
      {"MV", DivergenceId::MV},
      {"MAHALANOBIS", DivergenceId::Mahalanobis},
      {"IMPROPER_MAHALANOBIS", DivergenceId::ImproperMahalanobis},
      {"DS", DivergenceId::DS},
      {"AV", DivergenceId::AV},
      {"WASSERSTEIN", DivergenceId::Wasserstein},
      {"KS", DivergenceId::KS},
      {"KL", DivergenceId::KL},
      {"KL_SCOREFORM", DivergenceId::KLScoreForm},
      {"BRIER", DivergenceId::Brier},
      {"HELLINGER", DivergenceId::Hellinger},
  };
  for (const auto& [key, id] : table) {
    if (key == name) return id;
  }
  throw InvalidInput("divergence: unknown id '" + std::string(name) + "'");
}

WeightFunction::WeightFunction(std::vector<double> breakpoints,
                               std::vector<double> levels)
    : breakpoints_(std::move(breakpoints)), levels_(std::move(levels)) {
  if (breakpoints_.size() < 2 || levels_.size() + 1 != breakpoints_.size()) {
    throw InvalidInput("weight function: need n+1 breakpoints for n levels");
  }
  for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i - 1] < breakpoints_[i]) ||
        !std::isfinite(breakpoints_[i - 1]) || !std::isfinite(breakpoints_[i])) {
      throw InvalidInput("weight function: breakpoints not strictly increasing");
    }
  }
  for (double l : levels_) {
    if (!(l >= 0.0) || !std::isfinite(l)) {
      throw InvalidInput("weight function: levels must be finite and >= 0");
    }
  }
}

double WeightFunction::at(double t) const {
  if (t < breakpoints_.front() || t >= breakpoints_.back()) return 0.0;
  const auto it =
      std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  return levels_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

double WeightFunction::total_integral() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    acc += levels_[i] * (breakpoints_[i + 1] - breakpoints_[i]);
  }
  return acc;
}

Propriety DivergenceSpec::propriety() const {
  switch (id) {
    case DivergenceId::IQ:
    case DivergenceId::WIQ:
    case DivergenceId::MV:
    case DivergenceId::Mahalanobis:
    case DivergenceId::DS:
    case DivergenceId::KL:
    case DivergenceId::KLScoreForm:
    case DivergenceId::Brier:
      return Propriety::KProper;
    case DivergenceId::AV:
    case DivergenceId::Wasserstein:
    case DivergenceId::KS:
    case DivergenceId::Hellinger:
      return Propriety::AsymptoticallyProper;
    case DivergenceId::ImproperMahalanobis:
      return Propriety::ImproperVariant;
  }
  throw InvalidInput("divergence: unknown id");
}

bool DivergenceSpec::categorical() const {
  return id == DivergenceId::KL || id == DivergenceId::KLScoreForm ||
         id == DivergenceId::Brier || id == DivergenceId::Hellinger;
}

DivergenceSpec DivergenceSpec::parse(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("divergence spec: bad JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
    throw InvalidInput("divergence spec: expected an object with an 'id'");
  }
  DivergenceSpec spec;
  spec.id = divergence_id_from_string(j["id"].get<std::string>());
  try {
    if (j.contains("p")) {
      if (spec.id != DivergenceId::Wasserstein) {
        throw InvalidInput("divergence spec: 'p' only applies to WASSERSTEIN");
      }
      spec.p = j["p"].get<double>();
      if (!(spec.p >= 1.0)) {
        throw InvalidInput("divergence spec: Wasserstein order must be >= 1");
      }
    }
    if (j.contains("weight")) {
      if (spec.id != DivergenceId::WIQ) {
        throw InvalidInput("divergence spec: 'weight' only applies to WIQ");
      }
      const auto& w = j["weight"];
      spec.weight = WeightFunction(w.at("breakpoints").get<std::vector<double>>(),
                                   w.at("levels").get<std::vector<double>>());
    }
    if (j.contains("sigma")) {
      if (spec.id != DivergenceId::Mahalanobis) {
        throw InvalidInput(
            "divergence spec: 'sigma' only applies to MAHALANOBIS");
      }
      const auto rows = j["sigma"].get<std::vector<std::vector<double>>>();
      const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
      Eigen::MatrixXd sigma(m, m);
      for (Eigen::Index r = 0; r < m; ++r) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)].size()) != m) {
          throw InvalidInput("divergence spec: sigma must be square");
        }
        for (Eigen::Index c = 0; c < m; ++c) {
          sigma(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
      }
      spec.sigma = std::move(sigma);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("divergence spec: ") + e.what());
  }
  return spec;
}

std::string DivergenceSpec::to_json() const {
  nlohmann::json j;
  j["id"] = std::string(to_string(id));
  if (id == DivergenceId::Wasserstein) j["p"] = p;
  if (id == DivergenceId::WIQ && weight) {
    j["weight"] = {{"breakpoints", weight->breakpoints()},
                   {"levels", weight->levels()}};
  }
  if (id == DivergenceId::Mahalanobis && sigma) {
    std::vector<std::vector<double>> rows;
    for (Eigen::Index r = 0; r < sigma->rows(); ++r) {
      std::vector<double> row;
      for (Eigen::Index c = 0; c < sigma->cols(); ++c) {
        row.push_back((*sigma)(r, c));
      }
      rows.push_back(std::move(row));
    }
    j["sigma"] = rows;
  }
  return j.dump();
}

std::vector<DivergenceSpec> divergence_catalogue() {
  std::vector<DivergenceSpec> out;
  for (DivergenceId id :
       {DivergenceId::IQ, DivergenceId::WIQ, DivergenceId::MV,
        DivergenceId::Mahalanobis, DivergenceId::ImproperMahalanobis,
        DivergenceId::DS, DivergenceId::AV, DivergenceId::Wasserstein,
        DivergenceId::KS, DivergenceId::KL, DivergenceId::KLScoreForm,
        DivergenceId::Brier, DivergenceId::Hellinger}) {
    DivergenceSpec spec;
    spec.id = id;
    out.push_back(std::move(spec));
  }
  return out;
}

std::string units_string(const DivergenceSpec& spec,
                         const std::string& data_unit) {
  const std::string base = data_unit.empty() ? "data" : data_unit;
  switch (spec.id) {
    case DivergenceId::IQ:
    case DivergenceId::WIQ:
    case DivergenceId::AV:
    case DivergenceId::Wasserstein:
      return base;
    case DivergenceId::MV:
      return base + "^2";
    default:
      return "dimensionless";
  }
}

DivergenceValue iq_distance(const PiecewiseLinearCdf& F,
                            const PiecewiseLinearCdf& G) {
  return make_value({DivergenceId::IQ}, integral_squared_diff(F, G));
}

DivergenceValue weighted_iq(const PiecewiseLinearCdf& F,
                            const PiecewiseLinearCdf& G,
                            const WeightFunction& w) {
  std::vector<double> grid;
  grid.reserve(F.breakpoints().size() + G.breakpoints().size() +
               w.breakpoints().size());
  grid.insert(grid.end(), F.breakpoints().begin(), F.breakpoints().end());
  grid.insert(grid.end(), G.breakpoints().begin(), G.breakpoints().end());
  grid.insert(grid.end(), w.breakpoints().begin(), w.breakpoints().end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double t0 = grid[i], t1 = grid[i + 1];
    const double level = w.at(0.5 * (t0 + t1));
    if (level == 0.0) continue;
    const double da = F.eval(t0) - G.eval(t0);
    const double db = F.eval_left(t1) - G.eval_left(t1);
    acc += level * (t1 - t0) * (da * da + da * db + db * db) / 3.0;
  }
  DivergenceSpec spec;
  spec.id = DivergenceId::WIQ;
  spec.weight = w;
  return make_value(std::move(spec), acc);
}

DivergenceValue mean_value_divergence(const MomentSummary& F,
                                      const MomentSummary& G) {
  check_same_dim(F, G);
  const Eigen::VectorXd d = F.mean() - G.mean();
  return make_value({DivergenceId::MV}, d.squaredNorm());
}

DivergenceValue mahalanobis_divergence(const MomentSummary& F,
                                       const MomentSummary& G,
                                       const Eigen::MatrixXd& sigma) {
  check_same_dim(F, G);
  if (sigma.rows() != F.dim() || sigma.cols() != F.dim()) {
    throw InvalidInput("mahalanobis: sigma dimension mismatch");
  }
  const auto llt = pd_factor(sigma);
  const Eigen::VectorXd d = F.mean() - G.mean();
  DivergenceSpec spec;
  spec.id = DivergenceId::Mahalanobis;
  spec.sigma = sigma;
  return make_value(std::move(spec), nonneg(d.dot(llt.solve(d))));
}

DivergenceValue improper_mahalanobis(const MomentSummary& F,
                                     const MomentSummary& G) {
  check_same_dim(F, G);
  const auto llt = pd_factor(F.cov());
  const Eigen::VectorXd d = F.mean() - G.mean();
  return make_value({DivergenceId::ImproperMahalanobis},
                    nonneg(d.dot(llt.solve(d))));
}

DivergenceValue dawid_sebastiani(const MomentSummary& F,
                                 const MomentSummary& G) {
  check_same_dim(F, G);
  DivergenceSpec spec;
  spec.id = DivergenceId::DS;
  if (F.mean() == G.mean() && F.cov() == G.cov()) {
    return make_value(std::move(spec), 0.0);
  }
  const auto llt = pd_factor(F.cov());
  // +infinity when the observed covariance is singular: the log det term.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_g(G.cov(),
                                                      Eigen::EigenvaluesOnly);
  if (es_g.eigenvalues().minCoeff() <= 0.0) {
    return make_value(std::move(spec), kInf);
  }
  const double m = static_cast<double>(F.dim());
  const double trace_term = llt.solve(G.cov()).trace();
  Eigen::LLT<Eigen::MatrixXd> llt_g(G.cov());
  double log_det_g;
  if (llt_g.info() == Eigen::Success) {
    log_det_g = log_det_from_llt(llt_g);
  } else {
    log_det_g = es_g.eigenvalues().array().log().sum();
  }
  const double log_det_term = log_det_g - log_det_from_llt(llt);
  const Eigen::VectorXd d = F.mean() - G.mean();
  const double quad = d.dot(llt.solve(d));
  return make_value(std::move(spec),
                    nonneg(trace_term - log_det_term + quad - m));
}

DivergenceValue area_validation_metric(const PiecewiseLinearCdf& F,
                                       const PiecewiseLinearCdf& G) {
  return make_value({DivergenceId::AV}, integral_abs_diff(F, G));
}

DivergenceValue wasserstein(const PiecewiseLinearCdf& F,
                            const PiecewiseLinearCdf& G, double p) {
  if (!(p >= 1.0)) throw InvalidInput("wasserstein: order must be >= 1");
  const double integral = integral_quantile_diff_pow(F, G, p);
  DivergenceSpec spec;
  spec.id = DivergenceId::Wasserstein;
  spec.p = p;
  return make_value(std::move(spec),
                    p == 1.0 ? integral : std::pow(integral, 1.0 / p));
}

DivergenceValue ks_distance(const PiecewiseLinearCdf& F,
                            const PiecewiseLinearCdf& G) {
  return make_value({DivergenceId::KS}, sup_abs_diff(F, G));
}

DivergenceValue kl_divergence(const CategoricalDist& F,
                              const CategoricalDist& G) {
  check_same_size(F, G);
  double acc = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    const double f = F.probs()[i], g = G.probs()[i];
    if (f == 0.0) continue;  // 0 log(0/g) = 0
    if (g == 0.0) {
      acc = kInf;
      break;
    }
    acc += f * std::log(f / g);
  }
  return make_value({DivergenceId::KL}, nonneg(acc));
}

DivergenceValue kl_score_divergence(const CategoricalDist& F,
                                    const std::vector<std::size_t>& counts) {
  if (counts.size() != F.size()) {
    throw InvalidInput("kl score divergence: counts length mismatch");
  }
  std::size_t k = 0;
  for (std::size_t c : counts) k += c;
  if (k == 0) throw InvalidInput("kl score divergence: empty sample");
  double acc = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    const double g = static_cast<double>(counts[i]) / static_cast<double>(k);
    const double f = F.probs()[i];
    if (f == 0.0) {
      acc = kInf;
      break;
    }
    acc += g * std::log(g / f);
  }
  return make_value({DivergenceId::KLScoreForm}, nonneg(acc));
}

DivergenceValue brier_divergence(const CategoricalDist& F,
                                 const CategoricalDist& G) {
  check_same_size(F, G);
  double acc = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    const double d = F.probs()[i] - G.probs()[i];
    acc += d * d;
  }
  return make_value({DivergenceId::Brier}, acc);
}

DivergenceValue hellinger_distance(const CategoricalDist& F,
                                   const CategoricalDist& G) {
  check_same_size(F, G);
  double acc = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    const double d = std::sqrt(F.probs()[i]) - std::sqrt(G.probs()[i]);
    acc += d * d;
  }
  return make_value({DivergenceId::Hellinger},
                    std::min(1.0, std::sqrt(0.5 * acc)));
}

DivergenceValue eval_divergence(const DivergenceSpec& spec,
                                const PiecewiseLinearCdf& F,
                                const PiecewiseLinearCdf& G,
                                const std::string& data_unit) {
  DivergenceValue v{0.0, "", spec};
  switch (spec.id) {
    case DivergenceId::IQ:
      v = iq_distance(F, G);
      break;
    case DivergenceId::WIQ:
      if (!spec.weight) throw InvalidInput("WIQ requires a weight function");
      v = weighted_iq(F, G, *spec.weight);
      break;
    case DivergenceId::MV:
      v = mean_value_divergence(moments_of_cdf(F), moments_of_cdf(G));
      break;
    case DivergenceId::Mahalanobis:
      if (!spec.sigma) throw InvalidInput("MAHALANOBIS requires sigma");
      v = mahalanobis_divergence(moments_of_cdf(F), moments_of_cdf(G),
                                 *spec.sigma);
      break;
    case DivergenceId::ImproperMahalanobis:
      v = improper_mahalanobis(moments_of_cdf(F), moments_of_cdf(G));
      break;
    case DivergenceId::DS:
      v = dawid_sebastiani(moments_of_cdf(F), moments_of_cdf(G));
      break;
    case DivergenceId::AV:
      v = area_validation_metric(F, G);
      break;
    case DivergenceId::Wasserstein:
      v = wasserstein(F, G, spec.p);
      break;
    case DivergenceId::KS:
      v = ks_distance(F, G);
      break;
    case DivergenceId::KL:
    case DivergenceId::KLScoreForm:
    case DivergenceId::Brier:
    case DivergenceId::Hellinger:
      throw InvalidInput(
          "categorical divergence applied to real-valued distributions; "
          "bin the data first");
  }
  v.units = units_string(spec, data_unit);
  return v;
}

DivergenceValue eval_divergence(const DivergenceSpec& spec,
                                const CategoricalDist& F,
                                const CategoricalDist& G,
                                const std::string& data_unit) {
  DivergenceValue v{0.0, "", spec};
  switch (spec.id) {
    case DivergenceId::KL:
      v = kl_divergence(F, G);
      break;
    case DivergenceId::KLScoreForm:
      // G is the empirical frequency vector
      v = kl_divergence(G, F);
      v.spec.id = DivergenceId::KLScoreForm;
      break;
    case DivergenceId::Brier:
      v = brier_divergence(F, G);
      break;
    case DivergenceId::Hellinger:
      v = hellinger_distance(F, G);
      break;
    default:
      throw InvalidInput(
          "real-valued divergence applied to categorical distributions");
  }
  v.units = units_string(spec, data_unit);
  return v;
}

}  // namespace properdiv
