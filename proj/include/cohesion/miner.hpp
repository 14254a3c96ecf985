#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "cohesion/corpus.hpp"

namespace cohesion {

struct MiningConfig {
    std::vector<std::string> extensions{".cpp", ".cc", ".cxx", ".h", ".hpp"};
    std::string ref{"HEAD"};
    std::size_t max_commits{0};  ///< 0 = whole first-parent history
    std::string git{"git"};
};

/// A file that could not be extracted at some commit.
struct SkipEntry {
    std::string path;
    std::string commit;
    std::string reason;
};

struct MiningResult {
    FunctionHistoryStore store;
    std::vector<SkipEntry> skipped;
    std::size_t commits_scanned{0};
};

/// Repository missing, unreadable, or git failing on it.
class MiningError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Walks the first-parent history of `config.ref` oldest first, extracts
/// every function definition from files each commit adds or modifies, and
/// returns deduplicated histories. A locator containing "://" (or starting
/// with "git@") is cloned into a temporary directory first.
MiningResult mine_repository(const std::string& repo_locator, const MiningConfig& config = {});

/// "path@commit: reason", one per line.
void write_skip_log(const std::vector<SkipEntry>& skipped, const std::filesystem::path& path);

}  // namespace cohesion
