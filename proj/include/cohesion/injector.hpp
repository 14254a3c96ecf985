#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cohesion/corpus.hpp"
#include "cohesion/extractor.hpp"

namespace cohesion {

struct MaliciousSnippet {
    std::string id;
    std::vector<std::string> code_lines;
    std::string description;
};

enum class InjectionPosition { Beginning, Mid, End };
std::string_view position_name(InjectionPosition p);

struct InjectionRecord {
    FunctionIdentity target;  ///< filled in by callers that know the identity
    std::size_t version_index{0};
    std::string snippet_id;
    InjectionPosition position{InjectionPosition::Beginning};
    std::size_t insert_line_index{0};  ///< snippet starts before this body line
    std::size_t insert_offset{0};      ///< byte offset into the original full_text
    std::size_t inserted_length{0};    ///< bytes added at insert_offset
};

struct InjectionResult {
    std::string full_text;
    InjectionRecord record;
};

class InjectionError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class SnippetError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Body line index the snippet is inserted before: 0, ceil(L/2) or L.
std::size_t insertion_line(std::size_t body_lines, InjectionPosition position);

/// Reason the snippet is unusable, or nullopt when it is fine.
std::optional<std::string> validate_snippet(const MaliciousSnippet& snippet);

struct SnippetRejection {
    std::string file;
    std::string reason;
};

struct SnippetCorpus {
    std::vector<MaliciousSnippet> snippets;
    std::vector<SnippetRejection> rejected;
};

/// Loads a manifest (JSON list of {id, file, description}) or a directory.
/// A directory uses its manifest.json when present, otherwise every *.cpp
/// file with the file stem as id. Invalid snippets are rejected one by one;
/// ending up with no snippets throws SnippetError.
SnippetCorpus load_snippets(const std::filesystem::path& path);

/// Inserts `snippet` into the body at `position`, re-indented to match the
/// surrounding code. Throws InjectionError when the insertion point is not a
/// statement boundary or the result is not a valid single definition with
/// body_line_count() == L + snippet lines.
InjectionResult inject(const ExtractedFunction& fn, const MaliciousSnippet& snippet, InjectionPosition position);

/// Draws a snippet uniformly, then a position uniformly, from `rng`.
InjectionResult inject_random(const ExtractedFunction& fn, std::span<const MaliciousSnippet> corpus,
                              std::mt19937_64& rng);

/// Removes the inserted bytes, restoring the original full_text.
std::string remove_injection(std::string_view modified, const InjectionRecord& record);

}  // namespace cohesion
