#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cohesion/injector.hpp"
#include "cohesion/scorer.hpp"
#include "cohesion/scores.hpp"

namespace cohesion {

class EvaluationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malicious-to-benign ratio "A:B"; thousands separators are accepted.
struct Ratio {
    std::uint64_t malicious{1};
    std::uint64_t benign{100};

    static Ratio parse(std::string_view text);
    std::string str() const;
    bool operator==(const Ratio&) const = default;
};

/// The four ranking metrics plus two calibration metrics: `oracle` scores
/// injected pairs 1 and benign pairs 0, `constant` scores everything 0.
enum class Metric { CD, OTCD, CDz, OTCDz, Oracle, Constant };
std::string_view metric_name(Metric m);
Metric parse_metric(std::string_view name);  // throws std::invalid_argument

struct EvaluationConfig {
    Ratio ratio;
    std::size_t trials{1000};
    std::vector<Metric> metrics{Metric::CD, Metric::OTCD, Metric::CDz, Metric::OTCDz};
    bool high_cohesion_only{false};
    double high_cohesion_threshold{0.5};
    std::size_t k{100};
    std::uint64_t master_seed{0};
    bool contaminated_stats{false};  ///< fit bucket stats on injected pairs too
    std::size_t threads{0};          ///< 0 = hardware concurrency
    ScoreOptions score_options;
};

struct PrecisionAtK {
    double raw{0};
    double adjusted{0};
    bool operator==(const PrecisionAtK&) const = default;
};

struct TrialResult {
    std::map<Metric, PrecisionAtK> metrics;
    std::size_t n_malicious{0};
    std::size_t injected_labels{0};     ///< labels seen in the ranked list
    std::size_t injection_failures{0};  ///< selected pairs replaced after failed injections
};

struct MetricSummary {
    double mean_raw{0};
    double mean_adjusted{0};
};

struct EvaluationResult {
    EvaluationConfig config;
    std::size_t n_candidates{0};
    std::size_t n_malicious_per_trial{0};
    std::size_t trials_run{0};
    std::size_t injection_failures{0};
    std::map<Metric, MetricSummary> metrics;
};

/// raw / (min(n_malicious, k) / k).
double adjusted_p_at_k(double raw_precision, std::size_t n_malicious, std::size_t k);

/// floor(candidates * A / B).
std::size_t malicious_count(std::size_t candidates, const Ratio& ratio);

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial_index);

/// Indices of pairs eligible under the config's cohesion filter.
std::vector<std::size_t> candidate_indices(std::span<const ScoredPair> pairs, const EvaluationConfig& config);

/// One simulation: injects n_malicious uniformly chosen candidates (their v2
/// becomes injected v1, rescored through `backend`), standardizes against
/// stats fitted on the benign pairs, ranks every candidate per metric
/// (descending, pair_id ascending on ties) and measures precision in the top k.
TrialResult run_trial(std::span<const ScoredPair> pairs, std::span<const MaliciousSnippet> corpus,
                      TokenProbabilityBackend& backend, const EvaluationConfig& config, std::uint64_t seed);

/// Runs config.trials trials concurrently and averages them in trial order.
EvaluationResult evaluate(std::span<const ScoredPair> pairs, std::span<const MaliciousSnippet> corpus,
                          TokenProbabilityBackend& backend, const EvaluationConfig& config);

std::string evaluation_json(const EvaluationResult& result);

/// ratio, filter, metric, n_candidates, n_malicious, trials, mean_raw_p_at_k, mean_adjusted_p_at_k
void write_evaluation_csv(std::ostream& out, const EvaluationResult& result, bool header = true);

}  // namespace cohesion
