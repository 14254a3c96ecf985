// cohesion: mine function histories, score name-prediction cohesion, rank
// suspicious version changes and run injection simulations.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include "cohesion/backend.hpp"
#include "cohesion/delta.hpp"
#include "cohesion/evaluator.hpp"
#include "cohesion/injector.hpp"
#include "cohesion/miner.hpp"
#include "cohesion/scores.hpp"

namespace {

using namespace cohesion;
using nlohmann::ordered_json;

enum Exit : int {
    kOk = 0,
    kUsage = 1,
    kFatalIo = 2,
    kBackendUnreachable = 3,
    kMissingScores = 4,
    kEvaluationError = 5,
};

struct Failure {
    int code;
    std::string message;
};

void log(const std::string& message) { std::cerr << "cohesion: " << message << '\n'; }

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Writes through a temporary sibling and renames, so readers never see a
/// half-written file.
void write_file(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Failure{kFatalIo, "cannot write " + path.string()};
        out << content;
        if (!out.flush()) throw Failure{kFatalIo, "write failed: " + path.string()};
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Failure{kFatalIo, "cannot write " + path.string() + ": " + ec.message()};
}

/// Sends data to --out when given, otherwise to stdout.
void emit(const std::string& out, const std::string& content) {
    if (out.empty()) {
        std::cout << content << std::flush;
    } else {
        write_file(out, content);
    }
}

struct Manifest {
    std::string subcommand;
    ordered_json config = ordered_json::object();
    ordered_json inputs = ordered_json::object();
    ordered_json outputs = ordered_json::object();
    std::uint64_t seed{0};
    std::string started{utc_now()};

    void write(const std::string& out) const {
        if (out.empty()) return;
        ordered_json j;
        j["subcommand"] = subcommand;
        j["tool_version"] = COHESION_VERSION;
        j["config"] = config;
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        j["master_seed"] = seed;
        j["started_at"] = started;
        j["finished_at"] = utc_now();
        write_file(out + ".manifest.json", j.dump(2) + "\n");
    }
};

FunctionHistoryStore load_store_or_fail(const std::string& path) {
    try {
        return store_load(path);
    } catch (const StoreFormatError& e) {
        throw Failure{kFatalIo, path + ":" + std::to_string(e.line()) + ": " + e.what()};
    } catch (const std::exception& e) {
        throw Failure{kFatalIo, e.what()};
    }
}

ScoreTable load_scores_or_fail(const std::string& path) {
    if (!std::filesystem::exists(path)) throw Failure{kMissingScores, "scores file not found: " + path};
    try {
        bool dropped = false;
        auto table = load_scores(path, &dropped);
        if (dropped) log("ignoring a truncated final line in " + path);
        return table;
    } catch (const StoreFormatError& e) {
        throw Failure{kMissingScores, path + ":" + std::to_string(e.line()) + ": " + e.what()};
    } catch (const std::exception& e) {
        throw Failure{kMissingScores, e.what()};
    }
}

PairAssembly pairs_or_fail(const FunctionHistoryStore& store, const ScoreTable& scores) {
    auto assembly = assemble_pairs(store, scores);
    if (assembly.missing_scores > 0)
        log(std::to_string(assembly.missing_scores) + " version pairs lack scores and are excluded");
    if (assembly.pairs.empty()) throw Failure{kMissingScores, "no scored version pairs; run `cohesion score` first"};
    return assembly;
}

struct BackendFlags {
    bool mock{false};
    std::string url;
    std::size_t in_flight{4};
    int retries{2};
    double timeout_s{60};
    bool mask_all{false};
    bool gold_tokens{false};

    void add_to(CLI::App* cmd) {
        cmd->add_flag("--mock", mock, "Use the deterministic mock backend");
        cmd->add_option("--backend-url", url, "Model server base URL")->envname("COHESION_BACKEND_URL");
        cmd->add_option("--in-flight", in_flight, "Concurrent backend requests")->check(CLI::PositiveNumber);
        cmd->add_option("--retries", retries, "Retries after a connection failure")->check(CLI::NonNegativeNumber);
        cmd->add_option("--timeout", timeout_s, "Backend request timeout in seconds")->check(CLI::PositiveNumber);
        cmd->add_flag("--mask-all", mask_all, "Also hide body occurrences of the name");
        cmd->add_flag("--gold-tokens", gold_tokens, "Score the true name pieces instead of the top-1 prediction");
    }

    ScoreOptions score_options() const {
        ScoreOptions o;
        o.scope = mask_all ? MaskScope::AllOccurrences : MaskScope::DeclarationOnly;
        o.mode = gold_tokens ? ProbabilityMode::GoldTokens : ProbabilityMode::TopOne;
        return o;
    }

    std::unique_ptr<TokenProbabilityBackend> make(std::uint64_t seed) const {
        if (mock) return std::make_unique<MockBackend>(seed);
        if (url.empty()) throw Failure{kUsage, "no backend: pass --mock or --backend-url (or set COHESION_BACKEND_URL)"};
        RemoteOptions opts;
        opts.retries = retries;
        opts.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000));
        try {
            auto remote = std::make_unique<RemoteBackend>(url, opts);
            remote->info();
            return remote;
        } catch (const BackendError& e) {
            throw Failure{kBackendUnreachable, e.what()};
        }
    }

    void describe(ordered_json& config) const {
        config["backend"] = mock ? "mock" : url;
        config["mask_scope"] = mask_all ? "all" : "declaration";
        config["probability_mode"] = gold_tokens ? "gold" : "top1";
    }
};

// ---- mine ---------------------------------------------------------------

struct MineArgs {
    std::string repo, out, skip_log, ref{"HEAD"};
    std::vector<std::string> extensions{".cpp", ".cc", ".cxx", ".h", ".hpp"};
    std::size_t max_commits{0};
};

int cmd_mine(const MineArgs& a) {
    Manifest manifest{"mine"};
    MiningConfig cfg;
    cfg.extensions = a.extensions;
    cfg.ref = a.ref;
    cfg.max_commits = a.max_commits;
    MiningResult result;
    try {
        result = mine_repository(a.repo, cfg);
    } catch (const MiningError& e) {
        throw Failure{kFatalIo, e.what()};
    }
    std::ostringstream store;
    store_save(result.store, store);
    emit(a.out, store.str());

    const auto skip_path = !a.skip_log.empty() ? a.skip_log : a.out.empty() ? std::string() : a.out + ".skipped.log";
    if (!skip_path.empty()) {
        write_skip_log(result.skipped, skip_path);
    } else {
        for (const auto& s : result.skipped) log("skipped " + s.path + "@" + s.commit + ": " + s.reason);
    }
    log("scanned " + std::to_string(result.commits_scanned) + " commits: " + std::to_string(result.store.size()) +
        " functions, " + std::to_string(result.store.version_count()) + " versions, " +
        std::to_string(list_version_pairs(result.store).size()) + " pairs, " + std::to_string(result.skipped.size()) +
        " skipped files");

    manifest.config = {{"ref", a.ref}, {"extensions", a.extensions}, {"max_commits", a.max_commits}};
    manifest.inputs = {{"repo", a.repo}};
    manifest.outputs = {{"store", a.out}, {"skip_log", skip_path}};
    manifest.write(a.out);
    return kOk;
}

// ---- score --------------------------------------------------------------

struct ScoreArgs {
    std::string store, out;
    std::uint64_t seed{0};
    bool exclude_special{false};
    bool retry_failed{false};
    BackendFlags backend;
};

int cmd_score(const ScoreArgs& a) {
    Manifest manifest{"score"};
    manifest.seed = a.seed;
    const auto store = load_store_or_fail(a.store);
    auto backend = a.backend.make(a.seed);

    ScoreTable table;
    if (!a.out.empty() && std::filesystem::exists(a.out)) {
        bool dropped = false;
        try {
            table = load_scores(a.out, &dropped);
        } catch (const std::exception& e) {
            throw Failure{kFatalIo, "cannot resume from " + a.out + ": " + e.what()};
        }
        log("resuming: " + std::to_string(table.size()) + " records already in " + a.out);
        // Rewrite without a torn tail before appending.
        std::ostringstream compact;
        save_scores(table, compact);
        write_file(a.out, compact.str());
    }

    ScoreRunOptions opts;
    opts.score = a.backend.score_options();
    opts.max_in_flight = a.backend.mock ? std::max(1u, std::thread::hardware_concurrency()) : a.backend.in_flight;
    opts.exclude_special = a.exclude_special;
    opts.retry_failed = a.retry_failed;
    opts.progress = [](std::size_t done, std::size_t total) {
        if (done == total || done % 1024 == 0) log("scored " + std::to_string(done) + "/" + std::to_string(total));
    };

    std::ofstream file;
    if (!a.out.empty()) {
        file.open(a.out, std::ios::binary | std::ios::app);
        if (!file) throw Failure{kFatalIo, "cannot write " + a.out};
    }
    ScoreRunStats stats;
    try {
        stats = score_store(store, *backend, table, a.out.empty() ? nullptr : &file, opts);
    } catch (const BackendError& e) {
        throw Failure{kBackendUnreachable, e.what()};
    }
    file.close();

    std::ostringstream canonical;
    save_scores(table, canonical);
    emit(a.out, canonical.str());
    log(std::to_string(stats.total) + " versions: " + std::to_string(stats.scored) + " scored, " +
        std::to_string(stats.reused) + " already scored, " + std::to_string(stats.failed) + " failed, " +
        std::to_string(stats.excluded) + " excluded");

    a.backend.describe(manifest.config);
    manifest.config["exclude_special"] = a.exclude_special;
    manifest.inputs = {{"store", a.store}};
    manifest.outputs = {{"scores", a.out}};
    manifest.write(a.out);
    return kOk;
}

// ---- monitor ------------------------------------------------------------

struct MonitorArgs {
    std::string store, scores, out, report, metric{"cdz"};
    std::size_t top{10};
};

std::vector<std::string> added_lines(const std::string& before, const std::string& after, std::size_t limit) {
    std::multiset<std::string> old;
    std::istringstream a(before), b(after);
    std::string line;
    while (std::getline(a, line)) old.insert(line);
    std::vector<std::string> out;
    while (std::getline(b, line) && out.size() < limit) {
        const auto it = old.find(line);
        if (it != old.end()) {
            old.erase(it);
        } else {
            out.push_back(line);
        }
    }
    return out;
}

int cmd_monitor(const MonitorArgs& a) {
    Manifest manifest{"monitor"};
    Metric metric;
    try {
        metric = parse_metric(a.metric);
    } catch (const std::invalid_argument& e) {
        throw Failure{kUsage, e.what()};
    }
    const auto store = load_store_or_fail(a.store);
    const auto scores = load_scores_or_fail(a.scores);
    const auto assembly = pairs_or_fail(store, scores);

    std::vector<VersionPairDelta> deltas;
    for (const auto& p : assembly.pairs) deltas.push_back(make_delta(p.pair_id, p.s1, p.s2));
    const auto stats = fit_bucket_stats(deltas);
    for (auto& d : deltas) d = standardize(std::move(d), stats);

    auto value = [&](const VersionPairDelta& d) {
        switch (metric) {
            case Metric::CD: return d.cd;
            case Metric::OTCD: return d.otcd;
            case Metric::CDz: return *d.cdz;
            case Metric::OTCDz: return *d.otcdz;
            default: return 0.0;
        }
    };
    if (metric == Metric::Oracle || metric == Metric::Constant)
        throw Failure{kUsage, "monitor ranks by cd, otcd, cdz or otcdz"};
    std::vector<std::size_t> order(deltas.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (value(deltas[x]) != value(deltas[y])) return value(deltas[x]) > value(deltas[y]);
        return deltas[x].pair_id < deltas[y].pair_id;
    });
    order.resize(std::min(a.top, order.size()));

    std::vector<VersionPairDelta> ranked;
    std::ostringstream human;
    human << "Top " << order.size() << " of " << deltas.size() << " version changes by " << a.metric << "\n";
    for (std::size_t r = 0; r < order.size(); ++r) {
        const auto& d = deltas[order[r]];
        ranked.push_back(d);
        human << "\n#" << r + 1 << "  " << d.pair_id << "\n    npc " << format_number(d.npc1) << " -> "
              << format_number(d.npc2) << "  cd " << format_number(d.cd) << "  cdz " << format_number(*d.cdz)
              << "\n";
        const auto hash = d.pair_id.rfind('#');
        const auto key = d.pair_id.substr(0, hash);
        const auto v1 = std::stoul(d.pair_id.substr(hash + 1));
        if (const auto* h = store.find(key)) {
            for (const auto& line : added_lines(h->versions[v1].body_text, h->versions[v1 + 1].body_text, 6))
                human << "    + " << line << "\n";
        }
    }

    std::ostringstream csv;
    write_deltas_csv(csv, ranked);
    emit(a.out, csv.str());
    if (!a.report.empty()) {
        write_file(a.report, human.str());
    } else {
        std::cerr << human.str();
    }

    manifest.config = {{"metric", a.metric}, {"top", a.top}};
    manifest.inputs = {{"store", a.store}, {"scores", a.scores}};
    manifest.outputs = {{"csv", a.out}, {"report", a.report}};
    manifest.write(a.out);
    return kOk;
}

// ---- evaluate -----------------------------------------------------------

struct EvaluateArgs {
    std::string store, scores, snippets{COHESION_DEFAULT_SNIPPETS}, out, csv, ratio{"1:100"};
    std::vector<std::string> metrics{"cd", "otcd", "cdz", "otcdz"};
    std::size_t trials{1000}, k{100}, threads{0};
    std::uint64_t seed{0};
    bool high_cohesion_only{false};
    bool contaminated{false};
    BackendFlags backend;
};

int cmd_evaluate(const EvaluateArgs& a) {
    Manifest manifest{"evaluate"};
    manifest.seed = a.seed;
    EvaluationConfig cfg;
    try {
        cfg.ratio = Ratio::parse(a.ratio);
        cfg.metrics.clear();
        for (const auto& m : a.metrics) cfg.metrics.push_back(parse_metric(m));
    } catch (const std::invalid_argument& e) {
        throw Failure{kUsage, e.what()};
    }
    cfg.trials = a.trials;
    cfg.k = a.k;
    cfg.master_seed = a.seed;
    cfg.high_cohesion_only = a.high_cohesion_only;
    cfg.contaminated_stats = a.contaminated;
    cfg.threads = a.threads;
    cfg.score_options = a.backend.score_options();

    const auto store = load_store_or_fail(a.store);
    const auto scores = load_scores_or_fail(a.scores);
    const auto assembly = pairs_or_fail(store, scores);
    SnippetCorpus corpus;
    try {
        corpus = load_snippets(a.snippets);
    } catch (const SnippetError& e) {
        throw Failure{kFatalIo, e.what()};
    }
    for (const auto& r : corpus.rejected) log("rejected snippet " + r.file + ": " + r.reason);
    auto backend = a.backend.make(a.seed);

    EvaluationResult result;
    try {
        result = evaluate(assembly.pairs, corpus.snippets, *backend, cfg);
    } catch (const BackendError& e) {
        throw Failure{e.kind() == BackendError::Kind::Connection ? kBackendUnreachable : kEvaluationError, e.what()};
    } catch (const EvaluationError& e) {
        throw Failure{kEvaluationError, e.what()};
    }
    emit(a.out, evaluation_json(result));
    if (!a.csv.empty()) {
        std::ostringstream csv;
        write_evaluation_csv(csv, result);
        write_file(a.csv, csv.str());
    }
    log(std::to_string(result.trials_run) + " trials over " + std::to_string(result.n_candidates) + " pairs, " +
        std::to_string(result.n_malicious_per_trial) + " injected per trial");

    manifest.config = {{"ratio", cfg.ratio.str()}, {"trials", a.trials},   {"k", a.k},
                       {"metrics", a.metrics},     {"high_cohesion_only", a.high_cohesion_only},
                       {"contaminated_stats", a.contaminated}};
    a.backend.describe(manifest.config);
    manifest.inputs = {{"store", a.store}, {"scores", a.scores}, {"snippets", a.snippets}};
    manifest.outputs = {{"json", a.out}, {"csv", a.csv}};
    manifest.write(a.out);
    return kOk;
}

// ---- report -------------------------------------------------------------

struct ReportArgs {
    std::string kind, store, scores, out;
    double bin_width{0.05};
    std::size_t size_width{5};
};

int cmd_report(const ReportArgs& a) {
    Manifest manifest{"report"};
    const auto scores = load_scores_or_fail(a.scores);
    std::ostringstream out;
    int code = kOk;

    if (a.kind == "histogram") {
        std::vector<double> npcs;
        for (const auto& [k, r] : scores.records())
            if (r.score) npcs.push_back(r.score->npc);
        // Closed upper edge so NPC = 1.0 lands in the last bin.
        auto bins = histogram(npcs, a.bin_width, 0.0, 1.0);
        for (double v : npcs)
            if (v == 1.0) ++bins.back().count;
        out << "bin_lo,bin_hi,count\n";
        for (const auto& b : bins)
            out << format_number(b.lo) << ',' << format_number(b.lo + a.bin_width) << ',' << b.count << '\n';
    } else {
        if (a.store.empty()) throw Failure{kUsage, "--kind " + a.kind + " needs --store"};
        const auto store = load_store_or_fail(a.store);
        if (a.kind == "size-buckets") {
            std::vector<std::size_t> lines;
            std::vector<double> npcs;
            for (const auto& [key, h] : store.histories())
                for (std::size_t i = 0; i < h.versions.size(); ++i)
                    if (const auto* r = scores.find(key, i); r && r->score) {
                        lines.push_back(h.versions[i].body_line_count);
                        npcs.push_back(r->score->npc);
                    }
            if (npcs.empty()) throw Failure{kMissingScores, "no scored versions"};
            out << "lines_lo,lines_hi,count,mean_npc,sigma_npc\n";
            for (const auto& b : size_buckets(lines, npcs, a.size_width))
                out << b.lines_lo << ',' << b.lines_hi << ',' << b.moments.count << ','
                    << format_number(b.moments.mean) << ',' << format_number(b.moments.sigma) << '\n';
        } else if (a.kind == "correlation") {
            const auto assembly = pairs_or_fail(store, scores);
            std::vector<double> npc1, cds, otcds, sizes;
            for (const auto& p : assembly.pairs) {
                npc1.push_back(p.s1.npc);
                cds.push_back(cd(p.s1, p.s2));
                otcds.push_back(otcd(p.s1, p.s2));
                sizes.push_back(static_cast<double>(p.v1_lines));
            }
            out << "x,y,n,r,p_value,error\n";
            auto row = [&](const char* x, const char* y, const std::vector<double>& xs, const std::vector<double>& ys) {
                try {
                    const auto c = pearson(xs, ys);
                    out << x << ',' << y << ',' << c.n << ',' << format_number(c.r) << ',' << format_number(c.p_value)
                        << ",\n";
                } catch (const StatisticsError& e) {
                    out << x << ',' << y << ',' << xs.size() << ",,," << csv_field(e.what()) << '\n';
                    log(std::string(x) + " vs " + y + ": " + e.what());
                    code = kEvaluationError;
                }
            };
            row("npc1", "cd", npc1, cds);
            row("npc1", "otcd", npc1, otcds);
            row("npc1", "body_lines", npc1, sizes);
        } else if (a.kind == "bucket-stats") {
            const auto assembly = pairs_or_fail(store, scores);
            std::vector<VersionPairDelta> deltas;
            for (const auto& p : assembly.pairs) deltas.push_back(make_delta(p.pair_id, p.s1, p.s2));
            write_bucket_stats_csv(out, fit_bucket_stats(deltas));
        } else if (a.kind == "deltas") {
            const auto assembly = pairs_or_fail(store, scores);
            std::vector<VersionPairDelta> deltas;
            for (const auto& p : assembly.pairs) deltas.push_back(make_delta(p.pair_id, p.s1, p.s2));
            const auto stats = fit_bucket_stats(deltas);
            for (auto& d : deltas) d = standardize(std::move(d), stats);
            write_deltas_csv(out, deltas);
        }
    }
    emit(a.out, out.str());

    manifest.config = {{"kind", a.kind}, {"bin_width", a.bin_width}, {"size_width", a.size_width}};
    manifest.inputs = {{"store", a.store}, {"scores", a.scores}};
    manifest.outputs = {{"csv", a.out}};
    manifest.write(a.out);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Track name-prediction cohesion across C++ function histories"};
    app.set_version_flag("--version", COHESION_VERSION);
    app.require_subcommand(1);

    MineArgs mine;
    auto* mine_cmd = app.add_subcommand("mine", "Extract function histories from a git repository");
    mine_cmd->add_option("--repo", mine.repo, "Repository path or URL")->required();
    mine_cmd->add_option("--out", mine.out, "Store file (JSONL); stdout when omitted");
    mine_cmd->add_option("--skip-log", mine.skip_log, "Skip log path (default <out>.skipped.log)");
    mine_cmd->add_option("--ref", mine.ref, "Branch or commit to walk")->capture_default_str();
    mine_cmd->add_option("--ext", mine.extensions, "File extensions to scan")->capture_default_str();
    mine_cmd->add_option("--max-commits", mine.max_commits, "Stop after this many commits (0 = all)");

    ScoreArgs score;
    auto* score_cmd = app.add_subcommand("score", "Score every function version");
    score_cmd->add_option("--store", score.store, "Store file from `mine`")->required()->check(CLI::ExistingFile);
    score_cmd->add_option("--out,--scores", score.out, "Scores file (JSONL); resumed when it exists");
    score_cmd->add_option("--seed", score.seed, "Mock backend seed");
    score_cmd->add_flag("--exclude-special", score.exclude_special, "Skip constructors, destructors and operators");
    score_cmd->add_flag("--retry-failed", score.retry_failed, "Rescore versions whose earlier attempt failed");
    score.backend.add_to(score_cmd);

    MonitorArgs monitor;
    auto* monitor_cmd = app.add_subcommand("monitor", "Rank version changes by cohesion drop");
    monitor_cmd->add_option("--store", monitor.store, "Store file")->required()->check(CLI::ExistingFile);
    monitor_cmd->add_option("--scores", monitor.scores, "Scores file")->required();
    monitor_cmd->add_option("--metric", monitor.metric, "cd, otcd, cdz or otcdz")->capture_default_str();
    monitor_cmd->add_option("--top", monitor.top, "Rows to report")->capture_default_str();
    monitor_cmd->add_option("--out", monitor.out, "CSV output; stdout when omitted");
    monitor_cmd->add_option("--report", monitor.report, "Human-readable report; stderr when omitted");

    EvaluateArgs evaluate_args;
    auto* eval_cmd = app.add_subcommand("evaluate", "Injection simulation with adjusted precision at k");
    eval_cmd->add_option("--store", evaluate_args.store, "Store file")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--scores", evaluate_args.scores, "Scores file")->required();
    eval_cmd->add_option("--snippets", evaluate_args.snippets, "Snippet directory or manifest")->capture_default_str();
    eval_cmd->add_option("--ratio", evaluate_args.ratio, "Malicious-to-benign ratio A:B")->capture_default_str();
    eval_cmd->add_option("--trials", evaluate_args.trials, "Number of trials")->capture_default_str();
    eval_cmd->add_option("--seed", evaluate_args.seed, "Master seed")->capture_default_str();
    eval_cmd->add_option("--metric", evaluate_args.metrics, "cd, otcd, cdz, otcdz, oracle, constant")
        ->capture_default_str();
    eval_cmd->add_option("--k", evaluate_args.k, "Precision cutoff")->capture_default_str();
    eval_cmd->add_flag("--high-cohesion-only", evaluate_args.high_cohesion_only, "Only pairs with NPC(v1) > 0.5");
    eval_cmd->add_flag("--contaminated-stats", evaluate_args.contaminated, "Fit bucket stats including injected pairs");
    eval_cmd->add_option("--threads", evaluate_args.threads, "Worker threads (0 = all cores)");
    eval_cmd->add_option("--out", evaluate_args.out, "Result JSON; stdout when omitted");
    eval_cmd->add_option("--csv", evaluate_args.csv, "Also write the result as CSV rows");
    evaluate_args.backend.add_to(eval_cmd);

    ReportArgs report;
    auto* report_cmd = app.add_subcommand("report", "Distribution, size and correlation tables");
    report_cmd->add_option("--kind", report.kind, "Report kind")
        ->required()
        ->check(CLI::IsMember({"histogram", "size-buckets", "correlation", "bucket-stats", "deltas"}));
    report_cmd->add_option("--scores", report.scores, "Scores file")->required();
    report_cmd->add_option("--store", report.store, "Store file (all kinds except histogram)");
    report_cmd->add_option("--bin-width", report.bin_width, "Histogram bin width")->check(CLI::PositiveNumber);
    report_cmd->add_option("--size-width", report.size_width, "Lines per size bucket")->check(CLI::PositiveNumber);
    report_cmd->add_option("--out", report.out, "CSV output; stdout when omitted");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*mine_cmd) return cmd_mine(mine);
        if (*score_cmd) return cmd_score(score);
        if (*monitor_cmd) return cmd_monitor(monitor);
        if (*eval_cmd) return cmd_evaluate(evaluate_args);
        if (*report_cmd) return cmd_report(report);
    } catch (const Failure& f) {
        log(f.message);
        return f.code;
    } catch (const std::exception& e) {
        log(std::string("fatal: ") + e.what());
        return kFatalIo;
    }
    return kUsage;
}
