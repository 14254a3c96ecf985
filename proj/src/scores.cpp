#include "cohesion/scores.hpp"

#include <fstream>
#include <json.hpp>

#include "cohesion/delta.hpp"
#include "cohesion/extractor.hpp"

namespace cohesion {

using nlohmann::json;

std::string score_record_json(const ScoreRecord& r) {
    json j = {{"key", r.key}, {"version", r.version}, {"commit", r.commit}, {"backend", r.backend}};
    if (r.score) {
        j["npc"] = r.score->npc;
        j["otc"] = r.score->otc;
        j["per_n"] = r.score->per_n_confidence;
    } else {
        j["error"] = r.error;
    }
    return j.dump();
}

ScoreRecord parse_score_record(std::string_view line) {
    const auto j = json::parse(line);
    ScoreRecord r;
    r.key = j.at("key").get<std::string>();
    r.version = j.at("version").get<std::size_t>();
    r.commit = j.value("commit", std::string());
    r.backend = j.value("backend", std::string());
    if (j.contains("per_n")) {
        const auto table = j.at("per_n").get<std::array<double, kMaxMaskCount>>();
        for (double c : table)
            if (!(c > 0.0) || c > 1.0) throw std::invalid_argument("confidence outside (0, 1]");
        r.score = make_score(table);
    } else {
        r.error = j.at("error").get<std::string>();
    }
    return r;
}

void ScoreTable::insert(ScoreRecord record) {
    Key k{record.key, record.version};
    records_[std::move(k)] = std::move(record);
}

const ScoreRecord* ScoreTable::find(const std::string& key, std::size_t version) const {
    const auto it = records_.find(Key{key, version});
    return it == records_.end() ? nullptr : &it->second;
}

std::size_t ScoreTable::scored_count() const {
    std::size_t n = 0;
    for (const auto& [k, r] : records_) n += r.score.has_value();
    return n;
}

ScoreTable load_scores(const std::filesystem::path& path, bool* dropped_tail) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read scores file: " + path.string());
    const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (dropped_tail) *dropped_tail = false;

    ScoreTable table;
    std::size_t pos = 0, line_no = 0;
    while (pos < content.size()) {
        ++line_no;
        const auto nl = content.find('\n', pos);
        const bool terminated = nl != std::string::npos;
        const std::string_view line(content.data() + pos, (terminated ? nl : content.size()) - pos);
        pos = terminated ? nl + 1 : content.size();
        if (line.empty()) continue;
        try {
            table.insert(parse_score_record(line));
        } catch (const std::exception& e) {
            if (!terminated) {
                if (dropped_tail) *dropped_tail = true;
                break;
            }
            throw StoreFormatError(line_no, std::string("bad score record: ") + e.what());
        }
    }
    return table;
}

void save_scores(const ScoreTable& table, std::ostream& out) {
    for (const auto& [k, r] : table.records()) out << score_record_json(r) << '\n';
}

ScoreRunStats score_store(const FunctionHistoryStore& store, TokenProbabilityBackend& backend, ScoreTable& table,
                          std::ostream* sink, const ScoreRunOptions& options) {
    struct Job {
        const FunctionHistory* history;
        std::size_t version;
        ExtractedFunction fn;
    };
    ScoreRunStats stats;
    std::vector<Job> jobs;
    auto emit = [&](ScoreRecord r) {
        if (sink) *sink << score_record_json(r) << '\n';
        table.insert(std::move(r));
    };

    for (const auto& [key, h] : store.histories()) {
        for (std::size_t i = 0; i < h.versions.size(); ++i) {
            ++stats.total;
            const auto& v = h.versions[i];
            if (const auto* existing = table.find(key, i);
                existing && existing->commit == v.commit_id && (existing->score || !options.retry_failed)) {
                ++stats.reused;
                continue;
            }
            ScoreRecord failure{key, i, v.commit_id, std::nullopt, "", ""};
            std::vector<ExtractedFunction> fns;
            try {
                fns = extract_functions(v.body_text, h.identity.file_path);
            } catch (const ParseError& e) {
                failure.error = std::string("extraction failed: ") + e.what();
            }
            if (failure.error.empty() && fns.size() != 1) failure.error = "stored body is not a single function";
            if (failure.error.empty() && options.exclude_special && fns[0].special) {
                failure.error = "excluded: special member function";
                ++stats.excluded;
                emit(std::move(failure));
                continue;
            }
            if (!failure.error.empty()) {
                ++stats.failed;
                emit(std::move(failure));
                continue;
            }
            jobs.push_back({&h, i, std::move(fns[0])});
        }
    }
    if (sink) sink->flush();
    if (jobs.empty()) return stats;

    const auto info = backend.info();  // fails fast when the backend is unreachable
    std::size_t done = 0;
    for (std::size_t start = 0; start < jobs.size(); start += options.batch_size) {
        const auto end = std::min(jobs.size(), start + options.batch_size);
        std::vector<ExtractedFunction> batch;
        for (std::size_t j = start; j < end; ++j) batch.push_back(jobs[j].fn);
        const auto outcomes = score_all(batch, backend, options.score, options.max_in_flight);

        std::optional<std::string> unreachable;
        for (std::size_t j = start; j < end; ++j) {
            const auto& o = outcomes[j - start];
            if (o.connection_failure) {
                unreachable = o.error;
                continue;
            }
            const auto& job = jobs[j];
            ScoreRecord r{identity_key(job.history->identity), job.version,
                          job.history->versions[job.version].commit_id, o.score, o.error, info.model_id};
            o.score ? ++stats.scored : ++stats.failed;
            emit(std::move(r));
        }
        if (sink) sink->flush();
        done = end;
        if (options.progress) options.progress(done, jobs.size());
        if (unreachable) throw BackendError(BackendError::Kind::Connection, *unreachable);
    }
    return stats;
}

PairAssembly assemble_pairs(const FunctionHistoryStore& store, const ScoreTable& table) {
    PairAssembly out;
    for (const auto& [key, h] : store.histories()) {
        for (std::size_t i = 0; i + 1 < h.versions.size(); ++i) {
            const auto* a = table.find(key, i);
            const auto* b = table.find(key, i + 1);
            if (!a || !b || !a->score || !b->score) {
                ++out.missing_scores;
                continue;
            }
            out.pairs.push_back({make_pair_id(key, i, i + 1), h.identity.file_path, h.versions[i].body_text,
                                 h.versions[i].body_line_count, *a->score, *b->score});
        }
    }
    return out;
}

}  // namespace cohesion
