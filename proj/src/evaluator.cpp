#include "cohesion/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <json.hpp>
#include <optional>
#include <random>
#include <thread>

#include "cohesion/backend.hpp"
#include "cohesion/delta.hpp"

namespace cohesion {

namespace {

constexpr int kInjectionAttempts = 10;

std::uint64_t parse_count(std::string_view s, std::string_view whole) {
    std::string digits;
    for (char c : s) {
        if (c == ',' || c == '_' || c == ' ') continue;
        digits.push_back(c);
    }
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size() || v == 0)
        throw std::invalid_argument("ratio must look like 1:100, got '" + std::string(whole) + "'");
    return v;
}

double metric_value(Metric m, const VersionPairDelta& d) {
    switch (m) {
        case Metric::CD: return d.cd;
        case Metric::OTCD: return d.otcd;
        case Metric::CDz: return *d.cdz;
        case Metric::OTCDz: return *d.otcdz;
        case Metric::Oracle: return d.label == PairLabel::Injected ? 1.0 : 0.0;
        case Metric::Constant: return 0.0;
    }
    return 0.0;
}

// Injects and rescores v1 of `pair`; nullopt when every attempt fails.
std::optional<CohesionScore> injected_score(const ScoredPair& pair, std::span<const MaliciousSnippet> corpus,
                                            TokenProbabilityBackend& backend, const ScoreOptions& options,
                                            std::mt19937_64& rng) {
    std::vector<ExtractedFunction> fns;
    try {
        fns = extract_functions(pair.v1_text, pair.file_path);
    } catch (const ParseError&) {
        return std::nullopt;
    }
    if (fns.size() != 1) return std::nullopt;
    for (int attempt = 0; attempt < kInjectionAttempts; ++attempt) {
        try {
            const auto injected = inject_random(fns[0], corpus, rng);
            const auto again = extract_functions(injected.full_text, pair.file_path);
            return score(again.at(0), backend, options);
        } catch (const InjectionError&) {
        } catch (const MaskError&) {
        } catch (const ParseError&) {
        }
    }
    return std::nullopt;
}

}  // namespace

Ratio Ratio::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos)
        throw std::invalid_argument("ratio must look like 1:100, got '" + std::string(text) + "'");
    return {parse_count(text.substr(0, colon), text), parse_count(text.substr(colon + 1), text)};
}

std::string Ratio::str() const { return std::to_string(malicious) + ":" + std::to_string(benign); }

std::string_view metric_name(Metric m) {
    switch (m) {
        case Metric::CD: return "cd";
        case Metric::OTCD: return "otcd";
        case Metric::CDz: return "cdz";
        case Metric::OTCDz: return "otcdz";
        case Metric::Oracle: return "oracle";
        case Metric::Constant: return "constant";
    }
    return "?";
}

Metric parse_metric(std::string_view name) {
    for (auto m : {Metric::CD, Metric::OTCD, Metric::CDz, Metric::OTCDz, Metric::Oracle, Metric::Constant})
        if (metric_name(m) == name) return m;
    throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

double adjusted_p_at_k(double raw_precision, std::size_t n_malicious, std::size_t k) {
    if (n_malicious == 0 || k == 0) throw std::invalid_argument("adjusted precision needs n_malicious >= 1 and k >= 1");
    const double best = static_cast<double>(std::min(n_malicious, k)) / static_cast<double>(k);
    return raw_precision / best;
}

std::size_t malicious_count(std::size_t candidates, const Ratio& ratio) {
    const auto n = static_cast<std::size_t>(static_cast<unsigned __int128>(candidates) * ratio.malicious / ratio.benign);
    return n;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial_index) {
    return splitmix64(splitmix64(master_seed) ^ static_cast<std::uint64_t>(trial_index));
}

std::vector<std::size_t> candidate_indices(std::span<const ScoredPair> pairs, const EvaluationConfig& config) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pairs.size(); ++i)
        if (!config.high_cohesion_only || pairs[i].s1.npc > config.high_cohesion_threshold) out.push_back(i);
    return out;
}

TrialResult run_trial(std::span<const ScoredPair> pairs, std::span<const MaliciousSnippet> corpus,
                      TokenProbabilityBackend& backend, const EvaluationConfig& config, std::uint64_t seed) {
    if (config.k == 0) throw EvaluationError("k must be at least 1");
    if (corpus.empty()) throw EvaluationError("empty snippet corpus");
    const auto candidates = candidate_indices(pairs, config);
    const std::size_t total = candidates.size();
    if (total == 0) throw EvaluationError("no candidate pairs to evaluate");
    const std::size_t n = malicious_count(total, config.ratio);
    if (n == 0)
        throw EvaluationError("ratio " + config.ratio.str() + " injects no pairs among " + std::to_string(total) +
                              " candidates");
    if (n >= total)
        throw EvaluationError("ratio " + config.ratio.str() + " leaves no benign pairs among " + std::to_string(total));

    TrialResult result;
    result.n_malicious = n;
    std::mt19937_64 rng(seed);
    std::vector<std::optional<CohesionScore>> injected(pairs.size());
    auto pool = candidates;
    std::size_t chosen = 0;
    for (std::size_t cursor = 0; chosen < n; ++cursor) {
        if (cursor == total)
            throw EvaluationError("only " + std::to_string(chosen) + " of " + std::to_string(n) +
                                  " injections succeeded");
        const auto j = std::uniform_int_distribution<std::size_t>(cursor, total - 1)(rng);
        std::swap(pool[cursor], pool[j]);
        const auto idx = pool[cursor];
        injected[idx] = injected_score(pairs[idx], corpus, backend, config.score_options, rng);
        if (injected[idx]) {
            ++chosen;
        } else {
            ++result.injection_failures;
        }
    }

    std::vector<VersionPairDelta> deltas;
    deltas.reserve(total);
    for (auto idx : candidates) {
        const auto& p = pairs[idx];
        auto d = injected[idx] ? make_delta(p.pair_id, p.s1, *injected[idx], PairLabel::Injected)
                               : make_delta(p.pair_id, p.s1, p.s2, PairLabel::Benign);
        d.body_lines = p.v1_lines;
        deltas.push_back(std::move(d));
    }
    const auto stats = fit_bucket_stats(deltas, config.contaminated_stats);
    for (auto& d : deltas) {
        d = standardize(std::move(d), stats);
        result.injected_labels += d.label == PairLabel::Injected;
    }

    const std::size_t top = std::min(config.k, total);
    std::vector<std::size_t> order(total);
    std::vector<double> values(total);
    for (auto metric : config.metrics) {
        for (std::size_t i = 0; i < total; ++i) {
            order[i] = i;
            values[i] = metric_value(metric, deltas[i]);
        }
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                          [&](std::size_t a, std::size_t b) {
                              if (values[a] != values[b]) return values[a] > values[b];
                              return deltas[a].pair_id < deltas[b].pair_id;
                          });
        std::size_t hits = 0;
        for (std::size_t i = 0; i < top; ++i) hits += deltas[order[i]].label == PairLabel::Injected;
        const double raw = static_cast<double>(hits) / static_cast<double>(config.k);
        result.metrics[metric] = {raw, adjusted_p_at_k(raw, n, config.k)};
    }
    return result;
}

EvaluationResult evaluate(std::span<const ScoredPair> pairs, std::span<const MaliciousSnippet> corpus,
                          TokenProbabilityBackend& backend, const EvaluationConfig& config) {
    if (config.trials == 0) throw EvaluationError("trials must be at least 1");
    if (config.metrics.empty()) throw EvaluationError("no metrics selected");

    std::vector<TrialResult> trials(config.trials);
    std::vector<std::exception_ptr> errors(config.trials);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (auto t = next.fetch_add(1); t < config.trials; t = next.fetch_add(1)) {
            try {
                trials[t] = run_trial(pairs, corpus, backend, config, trial_seed(config.master_seed, t));
            } catch (...) {
                errors[t] = std::current_exception();
                next = config.trials;  // stop handing out work
            }
        }
    };
    const std::size_t threads = std::min<std::size_t>(
        config.trials, config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency()));
    {
        std::vector<std::jthread> pool;
        for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
        worker();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    EvaluationResult out;
    out.config = config;
    out.n_candidates = candidate_indices(pairs, config).size();
    out.n_malicious_per_trial = trials.front().n_malicious;
    out.trials_run = trials.size();
    for (auto m : config.metrics) {
        MetricSummary s;
        for (const auto& t : trials) {
            s.mean_raw += t.metrics.at(m).raw;
            s.mean_adjusted += t.metrics.at(m).adjusted;
        }
        s.mean_raw /= static_cast<double>(trials.size());
        s.mean_adjusted /= static_cast<double>(trials.size());
        out.metrics[m] = s;
    }
    for (const auto& t : trials) out.injection_failures += t.injection_failures;
    return out;
}

std::string evaluation_json(const EvaluationResult& r) {
    using nlohmann::ordered_json;
    ordered_json metrics = ordered_json::array();
    for (auto m : r.config.metrics) metrics.push_back(metric_name(m));
    ordered_json j;
    j["config"] = {
        {"ratio", r.config.ratio.str()},
        {"trials", r.config.trials},
        {"k", r.config.k},
        {"master_seed", r.config.master_seed},
        {"high_cohesion_only", r.config.high_cohesion_only},
        {"high_cohesion_threshold", r.config.high_cohesion_threshold},
        {"contaminated_stats", r.config.contaminated_stats},
        {"mask_scope", r.config.score_options.scope == MaskScope::AllOccurrences ? "all" : "declaration"},
        {"probability_mode", r.config.score_options.mode == ProbabilityMode::GoldTokens ? "gold" : "top1"},
        {"metrics", metrics},
    };
    j["n_candidates"] = r.n_candidates;
    j["n_malicious_per_trial"] = r.n_malicious_per_trial;
    j["trials_run"] = r.trials_run;
    j["injection_failures"] = r.injection_failures;
    ordered_json results = ordered_json::object();
    for (auto m : r.config.metrics) {
        const auto& s = r.metrics.at(m);
        results[std::string(metric_name(m))] = {{"mean_raw_p_at_k", s.mean_raw},
                                                {"mean_adjusted_p_at_k", s.mean_adjusted}};
    }
    j["results"] = results;
    return j.dump(2) + "\n";
}

void write_evaluation_csv(std::ostream& out, const EvaluationResult& r, bool header) {
    if (header) out << "ratio,filter,metric,n_candidates,n_malicious,trials,mean_raw_p_at_k,mean_adjusted_p_at_k\n";
    const char* filter = r.config.high_cohesion_only ? "high_cohesion" : "all";
    for (auto m : r.config.metrics) {
        const auto& s = r.metrics.at(m);
        out << r.config.ratio.str() << ',' << filter << ',' << metric_name(m) << ',' << r.n_candidates << ','
            << r.n_malicious_per_trial << ',' << r.trials_run << ',' << format_number(s.mean_raw) << ','
            << format_number(s.mean_adjusted) << '\n';
    }
}

}  // namespace cohesion
