#include "properdiv/propriety.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "properdiv/errors.hpp"
#include "properdiv/parallel.hpp"
#include "properdiv/piecewise.hpp"

namespace properdiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (v > 0.0) return "inf";
  if (v < 0.0) return "-inf";
  return "nan";
}

std::vector<double> cumulative_of(const std::vector<double>& weights) {
  std::vector<double> cum(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    cum[i] = acc;
  }
  if (!cum.empty()) cum.back() = 1.0;
  return cum;
}

/// Empirical category frequencies whose entries sum to 1 exactly.
CategoricalDist frequencies_from_counts(const std::vector<std::size_t>& counts,
                                        std::size_t k) {
  std::vector<double> probs(counts.size());
  std::size_t prefix = 0;
  double prev = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    prefix += counts[i];
    const double cur =
        static_cast<double>(prefix) / static_cast<double>(k);
    probs[i] = cur - prev;
    prev = cur;
  }
  return CategoricalDist(std::move(probs));
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw InvalidInput("normal quantile: p must lie in (0, 1)");
  }
  // Acklam's rational approximation with one Halley refinement step.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

Sampler Sampler::uniform(double a, double b) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidInput("sampler: uniform requires finite a < b");
  }
  return Sampler(Uniform{a, b});
}

Sampler Sampler::discrete(std::vector<double> atoms,
                          std::vector<double> weights) {
  // validate through the CDF constructor
  (void)PiecewiseLinearCdf::discrete(atoms, weights);
  auto cum = cumulative_of(weights);
  return Sampler(Discrete{std::move(atoms), std::move(cum)});
}

Sampler Sampler::categorical(std::vector<double> probs) {
  CategoricalDist checked(probs);
  auto cum = cumulative_of(probs);
  return Sampler(Categorical{std::move(probs), std::move(cum)});
}

bool Sampler::is_categorical() const {
  return std::holds_alternative<Categorical>(dist_);
}

double Sampler::draw_real(Substream& rng) const {
  if (const auto* u = std::get_if<Uniform>(&dist_)) {
    return u->a + (u->b - u->a) * rng.uniform01();
  }
  if (const auto* d = std::get_if<Discrete>(&dist_)) {
    const double u = rng.uniform01();
    const auto it =
        std::upper_bound(d->cumulative.begin(), d->cumulative.end(), u);
    const std::size_t i = std::min(
        static_cast<std::size_t>(it - d->cumulative.begin()),
        d->atoms.size() - 1);
    return d->atoms[i];
  }
  throw InvalidInput("sampler: categorical sampler cannot draw reals");
}

std::size_t Sampler::draw_category(Substream& rng) const {
  const auto* c = std::get_if<Categorical>(&dist_);
  if (!c) throw InvalidInput("sampler: real-valued sampler has no categories");
  const double u = rng.uniform01();
  const auto it =
      std::upper_bound(c->cumulative.begin(), c->cumulative.end(), u);
  return std::min(static_cast<std::size_t>(it - c->cumulative.begin()),
                  c->probs.size() - 1);
}

PiecewiseLinearCdf Sampler::as_cdf() const {
  if (const auto* u = std::get_if<Uniform>(&dist_)) {
    return PiecewiseLinearCdf::uniform(u->a, u->b);
  }
  if (const auto* d = std::get_if<Discrete>(&dist_)) {
    std::vector<double> weights(d->cumulative.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      weights[i] = d->cumulative[i] - prev;
      prev = d->cumulative[i];
    }
    return PiecewiseLinearCdf::discrete(d->atoms, weights);
  }
  throw InvalidInput("sampler: categorical sampler has no CDF on the line");
}

CategoricalDist Sampler::as_categorical() const {
  const auto* c = std::get_if<Categorical>(&dist_);
  if (!c) throw InvalidInput("sampler: not categorical");
  return CategoricalDist(c->probs);
}

std::string Sampler::to_json() const {
  nlohmann::json j;
  if (const auto* u = std::get_if<Uniform>(&dist_)) {
    j = {{"type", "uniform"}, {"a", u->a}, {"b", u->b}};
  } else if (const auto* d = std::get_if<Discrete>(&dist_)) {
    std::vector<double> weights(d->cumulative.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      weights[i] = d->cumulative[i] - prev;
      prev = d->cumulative[i];
    }
    j = {{"type", "discrete"}, {"atoms", d->atoms}, {"weights", weights}};
  } else if (const auto* c = std::get_if<Categorical>(&dist_)) {
    j = {{"type", "categorical"}, {"probs", c->probs}};
  }
  return j.dump();
}

Sampler Sampler::parse_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("sampler: bad JSON: ") + e.what());
  }
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "uniform") {
      return uniform(j.at("a").get<double>(), j.at("b").get<double>());
    }
    if (type == "discrete") {
      return discrete(j.at("atoms").get<std::vector<double>>(),
                      j.at("weights").get<std::vector<double>>());
    }
    if (type == "categorical") {
      return categorical(j.at("probs").get<std::vector<double>>());
    }
    throw InvalidInput("sampler: unknown type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("sampler: ") + e.what());
  }
}

std::string candidate_to_json(const Candidate& c) {
  nlohmann::json j;
  if (const auto* cdf = std::get_if<PiecewiseLinearCdf>(&c)) {
    j = {{"type", "cdf"},
         {"breakpoints", cdf->breakpoints()},
         {"values_left", cdf->values_left()},
         {"values_right", cdf->values_right()}};
  } else {
    j = {{"type", "categorical"},
         {"probs", std::get<CategoricalDist>(c).probs()}};
  }
  return j.dump();
}

Candidate candidate_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("candidate: bad JSON: ") + e.what());
  }
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "cdf") {
      return PiecewiseLinearCdf(j.at("breakpoints").get<std::vector<double>>(),
                                j.at("values_left").get<std::vector<double>>(),
                                j.at("values_right").get<std::vector<double>>());
    }
    if (type == "uniform") {
      return PiecewiseLinearCdf::uniform(j.at("a").get<double>(),
                                         j.at("b").get<double>());
    }
    if (type == "point") {
      return PiecewiseLinearCdf::point_mass(j.at("x").get<double>());
    }
    if (type == "discrete") {
      return PiecewiseLinearCdf::discrete(
          j.at("atoms").get<std::vector<double>>(),
          j.at("weights").get<std::vector<double>>());
    }
    if (type == "categorical") {
      return CategoricalDist(j.at("probs").get<std::vector<double>>());
    }
    throw InvalidInput("candidate: unknown type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("candidate: ") + e.what());
  }
}

std::uint64_t Scenario::hash() const { return fnv1a64(to_json()); }

std::string Scenario::to_json() const {
  nlohmann::json j;
  j["divergence"] = nlohmann::json::parse(divergence.to_json());
  j["truth"] = nlohmann::json::parse(truth.to_json());
  j["candidate"] = nlohmann::json::parse(candidate_to_json(candidate));
  j["k"] = k_values;
  return j.dump();
}

Scenario Scenario::parse(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("scenario: bad JSON: ") + e.what());
  }
  try {
    Scenario sc{DivergenceSpec::parse(j.at("divergence").dump()),
                Sampler::parse_json(j.at("truth").dump()),
                candidate_from_json(j.at("candidate").dump()),
                j.at("k").get<std::vector<int>>()};
    if (sc.k_values.empty()) {
      throw InvalidInput("scenario: k list must be nonempty");
    }
    for (int k : sc.k_values) {
      if (k < 1) throw InvalidInput("scenario: k values must be >= 1");
    }
    return sc;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("scenario: ") + e.what());
  }
}

namespace {

void check_scenario_types(const DivergenceSpec& spec,
                          const Candidate& candidate, const Sampler& truth) {
  const bool cat_truth = truth.is_categorical();
  const bool cat_cand = std::holds_alternative<CategoricalDist>(candidate);
  if (cat_truth != cat_cand) {
    throw InvalidInput("scenario: candidate and truth sample spaces differ");
  }
  if (spec.categorical() != cat_truth) {
    throw InvalidInput(cat_truth
                           ? "scenario: real-valued divergence on categories"
                           : "scenario: categorical divergence on the line");
  }
  if (cat_truth) {
    if (std::get<CategoricalDist>(candidate).size() !=
        truth.as_categorical().size()) {
      throw InvalidInput("scenario: category counts differ");
    }
  }
}

struct PairedRun {
  std::vector<double> candidate_values;
  std::vector<double> truth_values;  // empty when not requested
  std::uint64_t draws = 0;
};

// One pass over replicates; when truth_dist is provided the same draws are
// reused for both divergence evaluations (common random numbers).
PairedRun run_replicates(const DivergenceSpec& spec, const Candidate& candidate,
                         const Candidate* truth_dist, const Sampler& truth,
                         int k, const McConfig& cfg, std::uint64_t stream) {
  if (cfg.n_reps < 2) throw InvalidInput("mc: n_reps must be >= 2");
  if (k < 1) throw InvalidInput("mc: k must be >= 1");
  check_scenario_types(spec, candidate, truth);

  const std::size_t n = static_cast<std::size_t>(cfg.n_reps);
  PairedRun run;
  run.candidate_values.assign(n, 0.0);
  if (truth_dist) run.truth_values.assign(n, 0.0);
  std::vector<std::uint32_t> draws(n, 0);

  const std::uint64_t k_stream =
      mix_keys(stream, static_cast<std::uint64_t>(k));
  parallel_for(n, [&](std::size_t r) {
    Substream rng(cfg.seed, k_stream, static_cast<std::uint64_t>(r));
    if (truth.is_categorical()) {
      const auto& forecast = std::get<CategoricalDist>(candidate);
      std::vector<std::size_t> counts(forecast.size(), 0);
      for (int i = 0; i < k; ++i) ++counts[truth.draw_category(rng)];
      auto eval_one = [&](const Candidate& c) {
        const auto& f = std::get<CategoricalDist>(c);
        if (spec.id == DivergenceId::KLScoreForm) {
          return kl_score_divergence(f, counts).value;
        }
        return eval_divergence(
                   spec, f,
                   frequencies_from_counts(counts, static_cast<std::size_t>(k)))
            .value;
      };
      run.candidate_values[r] = eval_one(candidate);
      if (truth_dist) run.truth_values[r] = eval_one(*truth_dist);
    } else {
      std::vector<double> ys(static_cast<std::size_t>(k));
      for (auto& y : ys) y = truth.draw_real(rng);
      const PiecewiseLinearCdf ghat = EmpiricalMeasure(std::move(ys)).as_cdf();
      run.candidate_values[r] =
          eval_divergence(spec, std::get<PiecewiseLinearCdf>(candidate), ghat)
              .value;
      if (truth_dist) {
        run.truth_values[r] =
            eval_divergence(spec, std::get<PiecewiseLinearCdf>(*truth_dist),
                            ghat)
                .value;
      }
    }
    draws[r] = static_cast<std::uint32_t>(rng.draws());
  });

  for (std::uint32_t d : draws) run.draws += d;
  return run;
}

struct MeanSe {
  double mean;
  double se;
  std::int64_t n_infinite;
};

MeanSe mean_and_se(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  std::int64_t n_inf = 0;
  double sum = 0.0;
  for (double v : values) {
    if (std::isinf(v)) ++n_inf;
    sum += v;
  }
  if (n_inf > 0) return {kInf, kInf, n_inf};
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) {
    const double d = v - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / (n * (n - 1.0))), 0};
}

}  // namespace

McEstimate mc_expected_divergence(const DivergenceSpec& spec,
                                  const Candidate& candidate,
                                  const Sampler& truth, int k,
                                  const McConfig& cfg, std::uint64_t stream) {
  const PairedRun run =
      run_replicates(spec, candidate, nullptr, truth, k, cfg, stream);
  const MeanSe ms = mean_and_se(run.candidate_values);
  return {ms.mean, ms.se, ms.n_infinite, run.draws};
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::ProperConsistent: return "proper_consistent";
    case Verdict::ImproperDetected: return "improper_detected";
    case Verdict::Inconclusive: return "inconclusive";
  }
  throw InvalidInput("verdict: unknown value");
}

std::string ProprietyVerdict::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const KVerdict& v : per_k) {
    arr.push_back({{"k", v.k},
                   {"estimate_candidate", json_number(v.estimate_candidate)},
                   {"estimate_truth", json_number(v.estimate_truth)},
                   {"std_error_diff", json_number(v.std_error_diff)},
                   {"verdict", std::string(to_string(v.verdict))},
                   {"n_infinite", v.n_infinite},
                   {"draws", v.draws}});
  }
  return nlohmann::json{{"per_k", arr}}.dump();
}

ProprietyVerdict propriety_check(const Scenario& scenario,
                                 const McConfig& cfg) {
  if (scenario.k_values.empty()) {
    throw InvalidInput("scenario: k list must be nonempty");
  }
  if (!(cfg.confidence > 0.0) || !(cfg.confidence < 1.0)) {
    throw InvalidInput("mc: confidence must lie in (0, 1)");
  }
  const Candidate truth_dist =
      scenario.truth.is_categorical()
          ? Candidate(scenario.truth.as_categorical())
          : Candidate(scenario.truth.as_cdf());
  const double z = normal_quantile(cfg.confidence);
  const std::uint64_t stream = scenario.hash();

  ProprietyVerdict out;
  for (int k : scenario.k_values) {
    const PairedRun run =
        run_replicates(scenario.divergence, scenario.candidate, &truth_dist,
                       scenario.truth, k, cfg, stream);
    const std::size_t n = run.candidate_values.size();

    std::int64_t n_inf = 0;
    bool cand_inf = false, truth_inf = false;
    for (std::size_t r = 0; r < n; ++r) {
      const bool ci = std::isinf(run.candidate_values[r]);
      const bool ti = std::isinf(run.truth_values[r]);
      if (ci || ti) ++n_inf;
      cand_inf |= ci;
      truth_inf |= ti;
    }

    KVerdict kv{};
    kv.k = k;
    kv.n_infinite = n_inf;
    kv.draws = run.draws;

    if (n_inf == 0) {
      double sum_c = 0.0, sum_t = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        sum_c += run.candidate_values[r];
        sum_t += run.truth_values[r];
      }
      const double nn = static_cast<double>(n);
      kv.estimate_candidate = sum_c / nn;
      kv.estimate_truth = sum_t / nn;
      const double mean_diff = kv.estimate_candidate - kv.estimate_truth;
      double ss = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        const double d =
            (run.candidate_values[r] - run.truth_values[r]) - mean_diff;
        ss += d * d;
      }
      kv.std_error_diff = std::sqrt(ss / (nn * (nn - 1.0)));
      if (mean_diff < -z * kv.std_error_diff) {
        kv.verdict = Verdict::ImproperDetected;
      } else if (mean_diff >= 2.0 * kv.std_error_diff) {
        kv.verdict = Verdict::ProperConsistent;
      } else {
        kv.verdict = Verdict::Inconclusive;
      }
    } else {
      kv.estimate_candidate = cand_inf ? kInf : mean_and_se(run.candidate_values).mean;
      kv.estimate_truth = truth_inf ? kInf : mean_and_se(run.truth_values).mean;
      kv.std_error_diff = kInf;
      if (truth_inf && !cand_inf) {
        // the truth's own expected divergence is infinite, the candidate's
        // is finite: an infinite propriety gap
        kv.verdict = Verdict::ImproperDetected;
      } else if (cand_inf && !truth_inf) {
        kv.verdict = Verdict::ProperConsistent;
      } else {
        kv.verdict = Verdict::Inconclusive;
      }
    }
    out.per_k.push_back(kv);
  }
  return out;
}

namespace {

// Exact E over uniform truth of d(F, point mass at y). The integrand is
// quadratic in y between breakpoints of F for AV and IQ (its derivative is
// 2F(y) - 1) and piecewise affine for KS, so Simpson / split trapezoids are
// exact.
double exact_uniform_k1(const DivergenceSpec& spec, const PiecewiseLinearCdf& F,
                        double a, double b) {
  std::vector<double> grid{a, b};
  for (double t : F.breakpoints()) {
    if (t > a && t < b) grid.push_back(t);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double acc = 0.0;
  if (spec.id == DivergenceId::KS) {
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double y0 = grid[i], y1 = grid[i + 1];
      const double f0 = F.eval(y0), f1 = F.eval_left(y1);
      const double h0 = std::max(f0, 1.0 - f0);
      const double h1 = std::max(f1, 1.0 - f1);
      if ((f0 - 0.5) * (f1 - 0.5) < 0.0) {
        const double ystar = y0 + (0.5 - f0) / (f1 - f0) * (y1 - y0);
        acc += 0.5 * (h0 + 0.5) * (ystar - y0);
        acc += 0.5 * (0.5 + h1) * (y1 - ystar);
      } else {
        acc += 0.5 * (h0 + h1) * (y1 - y0);
      }
    }
  } else {
    auto point_div = [&](double y) {
      const PiecewiseLinearCdf delta = PiecewiseLinearCdf::point_mass(y);
      return spec.id == DivergenceId::AV ? integral_abs_diff(F, delta)
                                         : integral_squared_diff(F, delta);
    };
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double y0 = grid[i], y1 = grid[i + 1];
      const double ym = 0.5 * (y0 + y1);
      acc += (y1 - y0) / 6.0 *
             (point_div(y0) + 4.0 * point_div(ym) + point_div(y1));
    }
  }
  return acc / (b - a);
}

}  // namespace

double exact_expected_divergence_k1(const DivergenceSpec& spec,
                                    const Candidate& candidate,
                                    const Sampler& truth) {
  check_scenario_types(spec, candidate, truth);
  if (truth.is_categorical()) {
    const CategoricalDist g = truth.as_categorical();
    const auto& forecast = std::get<CategoricalDist>(candidate);
    if (spec.id != DivergenceId::Hellinger && spec.id != DivergenceId::Brier &&
        spec.id != DivergenceId::KLScoreForm) {
      throw Unsupported("exact k=1: unsupported categorical divergence");
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (g.probs()[j] == 0.0) continue;
      std::vector<std::size_t> counts(g.size(), 0);
      counts[j] = 1;
      double dj;
      if (spec.id == DivergenceId::KLScoreForm) {
        dj = kl_score_divergence(forecast, counts).value;
      } else {
        dj = eval_divergence(spec, forecast, frequencies_from_counts(counts, 1))
                 .value;
      }
      if (std::isinf(dj)) return kInf;
      acc += g.probs()[j] * dj;
    }
    return acc;
  }

  if (spec.id != DivergenceId::AV && spec.id != DivergenceId::KS &&
      spec.id != DivergenceId::IQ) {
    throw Unsupported("exact k=1: unsupported real-valued divergence");
  }
  // only the uniform sampler admits the exact integral here
  const PiecewiseLinearCdf g_cdf = truth.as_cdf();
  const auto& bp = g_cdf.breakpoints();
  const bool is_uniform = bp.size() == 2 && g_cdf.values_left()[0] == 0.0 &&
                          g_cdf.values_right()[0] == 0.0 &&
                          g_cdf.values_left()[1] == 1.0;
  if (!is_uniform) {
    throw Unsupported("exact k=1: real-valued truth must be uniform");
  }
  return exact_uniform_k1(spec, std::get<PiecewiseLinearCdf>(candidate),
                          bp.front(), bp.back());
}

Scenario build_counterexample(const CounterexampleFamily& family) {
  switch (family.id) {
    case FamilyId::AvUniform: {
      if (family.k < 1) throw InvalidInput("counterexample: k must be >= 1");
      const int k = family.k;
      std::vector<double> atoms, weights;
      for (int i = 1; i <= k; ++i) {
        atoms.push_back(static_cast<double>(i) / (k + 1));
        weights.push_back(1.0 / k);
      }
      DivergenceSpec spec;
      spec.id = DivergenceId::AV;
      return Scenario{spec, Sampler::uniform(0.0, 1.0),
                      PiecewiseLinearCdf::discrete(atoms, weights),
                      {k}};
    }
    case FamilyId::KsUniform: {
      if (family.k < 1) throw InvalidInput("counterexample: k must be >= 1");
      const int k = family.k;
      std::vector<double> atoms, weights;
      for (int i = 0; i <= k; ++i) {
        atoms.push_back(static_cast<double>(i) / k);
        weights.push_back(1.0 / (k + 1));
      }
      DivergenceSpec spec;
      spec.id = DivergenceId::KS;
      return Scenario{spec, Sampler::uniform(0.0, 1.0),
                      PiecewiseLinearCdf::discrete(atoms, weights),
                      {k}};
    }
    case FamilyId::HellingerBinary: {
      const double f1 = family.f1, g1 = family.g1;
      if (!(f1 >= 0.0) || !(f1 <= 1.0) || !(g1 >= 0.0) || !(g1 <= 1.0)) {
        throw InvalidInput("counterexample: f1, g1 must lie in [0, 1]");
      }
      DivergenceSpec spec;
      spec.id = DivergenceId::Hellinger;
      return Scenario{spec, Sampler::categorical({g1, 1.0 - g1}),
                      CategoricalDist({f1, 1.0 - f1}),
                      {family.k}};
    }
  }
  throw InvalidInput("counterexample: unknown family");
}

std::vector<CurvePoint> asymptotic_curve(const Scenario& scenario,
                                         const McConfig& cfg) {
  std::vector<CurvePoint> out;
  const std::uint64_t stream = scenario.hash();
  for (int k : scenario.k_values) {
    const McEstimate est =
        mc_expected_divergence(scenario.divergence, scenario.candidate,
                               scenario.truth, k, cfg, stream);
    out.push_back({k, est.mean, est.std_error});
  }
  return out;
}

}  // namespace properdiv
