#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cohesion {

/// Stable identity of a function across commits.
struct FunctionIdentity {
    std::string name;
    std::vector<std::string> arg_types;
    std::string file_path;  ///< repository-relative

    bool operator==(const FunctionIdentity&) const = default;
};

/// "file_path::name(arg1,arg2,...)"
std::string identity_key(const FunctionIdentity& identity);

/// Inverse of identity_key. Throws std::invalid_argument on malformed keys.
FunctionIdentity parse_identity_key(std::string_view key);

struct FunctionVersion {
    FunctionIdentity identity;
    std::string commit_id;
    std::int64_t commit_time{0};  ///< seconds since the Unix epoch, UTC
    std::string body_text;        ///< full definition including signature
    std::size_t body_line_count{0};
    std::size_t token_estimate{0};

    bool operator==(const FunctionVersion&) const = default;
};

/// Whitespace-delimited token count.
std::size_t count_whitespace_tokens(std::string_view text);

struct FunctionHistory {
    FunctionIdentity identity;
    std::vector<FunctionVersion> versions;  ///< ordered by (commit_time, commit_id)

    bool operator==(const FunctionHistory&) const = default;
};

/// Orders by (commit_time, commit_id) and drops versions whose body equals
/// the immediately preceding one. Idempotent.
void normalize_history(FunctionHistory& history);

/// Removes consecutive identical bodies without reordering.
void dedup_consecutive(FunctionHistory& history);

struct ConsecutiveVersionPair {
    const FunctionHistory* history{nullptr};
    std::size_t index{0};  ///< v1 = versions[index], v2 = versions[index + 1]

    const FunctionIdentity& identity() const { return history->identity; }
    const FunctionVersion& v1() const { return history->versions[index]; }
    const FunctionVersion& v2() const { return history->versions[index + 1]; }
};

class StoreFormatError : public std::runtime_error {
public:
    StoreFormatError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Function histories keyed by identity_key, iterated in key order.
class FunctionHistoryStore {
public:
    using Map = std::map<std::string, FunctionHistory>;

    /// Appends without reordering; call normalize() once all versions are in.
    void append(FunctionVersion version);
    void normalize();

    const Map& histories() const { return histories_; }
    const FunctionHistory* find(const std::string& key) const;
    std::size_t size() const { return histories_.size(); }
    std::size_t version_count() const;

    bool operator==(const FunctionHistoryStore&) const = default;

private:
    Map histories_;
};

/// L-1 pairs per history of length L, in store order.
std::vector<ConsecutiveVersionPair> list_version_pairs(const FunctionHistoryStore& store);

/// One JSON object per line: {key, commit, time, body, lines, tokens}.
void store_save(const FunctionHistoryStore& store, std::ostream& out);
void store_save(const FunctionHistoryStore& store, const std::filesystem::path& path);

/// Throws StoreFormatError naming the first bad line (malformed JSON, missing
/// field, bad key, or versions out of order).
FunctionHistoryStore store_load(std::istream& in);
FunctionHistoryStore store_load(const std::filesystem::path& path);

}  // namespace cohesion
