#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "properdiv/divergences.hpp"
#include "properdiv/measures.hpp"
#include "properdiv/rng.hpp"

namespace properdiv {

/// Inverse of the standard normal CDF.
double normal_quantile(double p);

/// Truth distribution that can both be sampled and be handed to a
/// divergence as an exact distribution.
class Sampler {
 public:
  static Sampler uniform(double a, double b);
  static Sampler discrete(std::vector<double> atoms,
                          std::vector<double> weights);
  static Sampler categorical(std::vector<double> probs);

  bool is_categorical() const;
  /// One draw; real-valued samplers only.
  double draw_real(Substream& rng) const;
  /// One draw as a 0-based category index; categorical samplers only.
  std::size_t draw_category(Substream& rng) const;

  PiecewiseLinearCdf as_cdf() const;
  CategoricalDist as_categorical() const;

  std::string to_json() const;
  static Sampler parse_json(const std::string& text);

 private:
  struct Uniform {
    double a, b;
  };
  struct Discrete {
    std::vector<double> atoms;
    std::vector<double> cumulative;  // same length, last == 1
  };
  struct Categorical {
    std::vector<double> probs;
    std::vector<double> cumulative;
  };
  std::variant<Uniform, Discrete, Categorical> dist_;
  explicit Sampler(std::variant<Uniform, Discrete, Categorical> d)
      : dist_(std::move(d)) {}
};

/// Candidate distribution under audit; must live on the same sample space
/// as the truth sampler.
using Candidate = std::variant<PiecewiseLinearCdf, CategoricalDist>;

std::string candidate_to_json(const Candidate& c);
Candidate candidate_from_json(const std::string& text);

struct Scenario {
  DivergenceSpec divergence;
  Sampler truth;
  Candidate candidate;
  std::vector<int> k_values;

  /// Stable hash of the canonical JSON form; keys the RNG substreams.
  std::uint64_t hash() const;
  std::string to_json() const;
  static Scenario parse(const std::string& text);
};

struct McConfig {
  std::int64_t n_reps = 100000;
  std::uint64_t seed = 0;
  double confidence = 0.99;  // one-sided level for the impropriety test
};

struct McEstimate {
  double mean;
  double std_error;
  std::int64_t n_infinite;   // replicates with value +infinity (counted in)
  std::uint64_t draws;       // truth-sampler draws consumed
};

/// Monte Carlo estimate of the expected divergence d(F, Ghat_k) over
/// independent size-k samples from the truth. Replicate r uses the
/// substream keyed by (seed, scenario-independent stream, r), so results
/// are identical for identical (seed, inputs) regardless of execution
/// order or worker count. Any +infinity replicate makes the mean infinite.
McEstimate mc_expected_divergence(const DivergenceSpec& spec,
                                  const Candidate& candidate,
                                  const Sampler& truth, int k,
                                  const McConfig& cfg,
                                  std::uint64_t stream = 0);

enum class Verdict { ProperConsistent, ImproperDetected, Inconclusive };

std::string_view to_string(Verdict v);

struct KVerdict {
  int k;
  double estimate_candidate;  // mean of d(F, Ghat_k)
  double estimate_truth;      // mean of d(G, Ghat_k)
  double std_error_diff;      // paired (common-random-numbers) difference
  Verdict verdict;
  std::int64_t n_infinite;    // replicates infinite on either side
  std::uint64_t draws;        // total sampler draws (one shared set per rep)
};

struct ProprietyVerdict {
  std::vector<KVerdict> per_k;
  std::string to_json() const;
};

/// For each k: estimates E_G d(F, Ghat_k) and E_G d(G, Ghat_k) on shared
/// sample draws (common random numbers), then applies the one-sided test.
/// improper_detected requires estimate_candidate + z * se_diff <
/// estimate_truth at the configured confidence; differences under 2 * se
/// are reported as inconclusive rather than forced into a binary verdict
/// (a paired difference of exactly zero, as when F == G, is
/// proper_consistent).
ProprietyVerdict propriety_check(const Scenario& scenario,
                                 const McConfig& cfg);

/// Exact k = 1 expectation E_G d(F, Ghat_1). Supported: categorical truth
/// with any categorical divergence (finite sum over categories), and
/// uniform truth with d in {AV, KS, IQ} (exact piecewise integration over
/// the observation). Everything else raises Unsupported.
double exact_expected_divergence_k1(const DivergenceSpec& spec,
                                    const Candidate& candidate,
                                    const Sampler& truth);

enum class FamilyId { AvUniform, KsUniform, HellingerBinary };

/// The known impropriety counterexamples:
///  - AV_UNIFORM(k): truth uniform[0,1]; candidate discrete with mass 1/k
///    at i/(k+1), i = 1..k; area validation metric.
///  - KS_UNIFORM(k): truth uniform[0,1]; candidate discrete with mass
///    1/(k+1) at i/k, i = 0..k; Kolmogorov-Smirnov distance.
///  - HELLINGER_BINARY(f1, g1): binary categorical truth (g1, 1-g1) and
///    candidate (f1, 1-f1); Hellinger distance.
struct CounterexampleFamily {
  FamilyId id;
  int k = 1;          // AV_UNIFORM / KS_UNIFORM
  double f1 = 0.10;   // HELLINGER_BINARY
  double g1 = 0.25;
};

Scenario build_counterexample(const CounterexampleFamily& family);

struct CurvePoint {
  int k;
  double estimate;
  double std_error;
};

/// Estimates E_G d(F, Ghat_k) across the scenario's k values; with F = G
/// this traces the decay that asymptotic propriety rests on.
std::vector<CurvePoint> asymptotic_curve(const Scenario& scenario,
                                         const McConfig& cfg);

}  // namespace properdiv
