#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "cohesion/corpus.hpp"
#include "cohesion/scorer.hpp"

namespace cohesion {

/// Score of one function version, or the reason it could not be scored.
struct ScoreRecord {
    std::string key;
    std::size_t version{0};
    std::string commit;
    std::optional<CohesionScore> score;
    std::string error;
    std::string backend;

    bool operator==(const ScoreRecord&) const = default;
};

/// One JSON object, no trailing newline.
std::string score_record_json(const ScoreRecord& record);
ScoreRecord parse_score_record(std::string_view line);

class ScoreTable {
public:
    using Key = std::pair<std::string, std::size_t>;

    void insert(ScoreRecord record);
    const ScoreRecord* find(const std::string& key, std::size_t version) const;
    std::size_t size() const { return records_.size(); }
    std::size_t scored_count() const;
    const std::map<Key, ScoreRecord>& records() const { return records_; }

private:
    std::map<Key, ScoreRecord> records_;
};

/// Loads a scores file. A malformed final line without a trailing newline
/// is what an interrupted run leaves behind and is dropped (reported via
/// `dropped_tail`); any other malformed line throws StoreFormatError.
ScoreTable load_scores(const std::filesystem::path& path, bool* dropped_tail = nullptr);

/// Whole table in key order, one record per line.
void save_scores(const ScoreTable& table, std::ostream& out);

struct ScoreRunOptions {
    ScoreOptions score;
    std::size_t max_in_flight{4};
    bool exclude_special{false};
    bool retry_failed{false};
    std::size_t batch_size{64};
    std::function<void(std::size_t done, std::size_t total)> progress;
};

struct ScoreRunStats {
    std::size_t total{0};
    std::size_t scored{0};
    std::size_t reused{0};
    std::size_t failed{0};
    std::size_t excluded{0};
};

/// Scores every version in `store` that `table` does not already cover and
/// appends each new record to `sink` (flushed per batch) as well as `table`.
/// Throws BackendError when the backend becomes unreachable; records written
/// before that point remain valid for a resumed run.
ScoreRunStats score_store(const FunctionHistoryStore& store, TokenProbabilityBackend& backend, ScoreTable& table,
                          std::ostream* sink, const ScoreRunOptions& options = {});

/// A consecutive version pair with both sides scored.
struct ScoredPair {
    std::string pair_id;
    std::string file_path;
    std::string v1_text;
    std::size_t v1_lines{0};
    CohesionScore s1;
    CohesionScore s2;
};

struct PairAssembly {
    std::vector<ScoredPair> pairs;
    std::size_t missing_scores{0};  ///< pairs dropped because a side is unscored or failed
};

/// Pairs in store order (identity key, then version index).
PairAssembly assemble_pairs(const FunctionHistoryStore& store, const ScoreTable& table);

}  // namespace cohesion
