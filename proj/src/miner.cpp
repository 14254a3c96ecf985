#include "cohesion/miner.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "cohesion/extractor.hpp"
#include "cohesion/process.hpp"

namespace cohesion {

namespace {

struct CommitInfo {
    std::string id;
    std::int64_t time{0};
    std::string first_parent;  // empty for a root commit
};

class Git {
public:
    Git(std::string exe, std::string repo) : exe_(std::move(exe)), repo_(std::move(repo)) {}

    std::string run(std::vector<std::string> args, const std::string& what) const {
        args.insert(args.begin(), {exe_, "-C", repo_});
        ProcessResult r;
        try {
            r = run_process(args);
        } catch (const std::exception& e) {
            throw MiningError(what + ": " + e.what());
        }
        if (r.exit_code != 0) throw MiningError(what + ": git exited with status " + std::to_string(r.exit_code));
        return std::move(r.out);
    }

private:
    std::string exe_;
    std::string repo_;
};

std::vector<CommitInfo> first_parent_commits(const Git& git, const MiningConfig& config) {
    const auto out = git.run({"log", "--first-parent", "--reverse", "--format=%H %ct %P", config.ref},
                             "listing commits of " + config.ref);
    std::vector<CommitInfo> commits;
    std::istringstream lines(out);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        CommitInfo c;
        fields >> c.id >> c.time >> c.first_parent;
        commits.push_back(std::move(c));
    }
    if (config.max_commits > 0 && commits.size() > config.max_commits) commits.resize(config.max_commits);
    return commits;
}

// Added/modified paths relative to the first parent (deletions dropped).
std::vector<std::string> changed_files(const Git& git, const CommitInfo& c) {
    std::vector<std::string> args = {"diff-tree", "-r", "--no-commit-id", "--no-renames", "--name-status", "-z"};
    if (c.first_parent.empty()) {
        args.push_back("--root");
    } else {
        args.push_back(c.first_parent);
    }
    args.push_back(c.id);
    const auto out = git.run(args, "diffing " + c.id);

    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (pos < out.size()) {
        const auto nul = out.find('\0', pos);
        const auto end = nul == std::string::npos ? out.size() : nul;
        fields.emplace_back(out.substr(pos, end - pos));
        pos = end + 1;
    }
    std::vector<std::string> paths;
    for (std::size_t i = 0; i + 1 < fields.size(); i += 2) {
        if (!fields[i].empty() && fields[i][0] != 'D') paths.push_back(fields[i + 1]);
    }
    return paths;
}

bool wanted(const std::string& path, const std::vector<std::string>& extensions) {
    const auto ext = std::filesystem::path(path).extension().string();
    return std::find(extensions.begin(), extensions.end(), ext) != extensions.end();
}

bool is_remote(const std::string& locator) {
    return locator.find("://") != std::string::npos || locator.starts_with("git@");
}

class TempDir {
public:
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "cohesion-clone-XXXXXX").string();
        if (!mkdtemp(tmpl.data())) throw MiningError("cannot create temporary directory");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

MiningResult mine_local(const std::string& repo, const MiningConfig& config) {
    if (!std::filesystem::is_directory(repo)) throw MiningError("repository not found: " + repo);
    const Git git(config.git, repo);
    git.run({"rev-parse", "--verify", "--quiet", config.ref + "^{commit}"}, "resolving " + config.ref + " in " + repo);

    MiningResult result;
    for (const auto& commit : first_parent_commits(git, config)) {
        ++result.commits_scanned;
        for (const auto& path : changed_files(git, commit)) {
            if (!wanted(path, config.extensions)) continue;
            const auto source = git.run({"cat-file", "blob", commit.id + ":" + path}, "reading " + path);
            std::vector<ExtractedFunction> functions;
            try {
                functions = extract_functions(source, path);
            } catch (const ParseError& e) {
                result.skipped.push_back({path, commit.id, e.message() + " at line " + std::to_string(e.where().line)});
                continue;
            }
            std::set<std::string> seen;  // first definition wins within one file snapshot
            for (auto& f : functions) {
                FunctionVersion v;
                v.identity = {f.name, f.arg_types, path};
                if (!seen.insert(identity_key(v.identity)).second) continue;
                v.commit_id = commit.id;
                v.commit_time = commit.time;
                v.body_line_count = f.body_line_count();
                v.token_estimate = count_whitespace_tokens(f.full_text);
                v.body_text = std::move(f.full_text);
                result.store.append(std::move(v));
            }
        }
    }
    result.store.normalize();
    return result;
}

}  // namespace

MiningResult mine_repository(const std::string& repo_locator, const MiningConfig& config) {
    if (!is_remote(repo_locator)) return mine_local(repo_locator, config);
    TempDir dir;
    const auto target = (dir.path() / "repo").string();
    ProcessResult r;
    try {
        r = run_process({config.git, "clone", "--quiet", repo_locator, target});
    } catch (const std::exception& e) {
        throw MiningError(std::string("clone failed: ") + e.what());
    }
    if (r.exit_code != 0) throw MiningError("clone failed for " + repo_locator);
    return mine_local(target, config);
}

void write_skip_log(const std::vector<SkipEntry>& skipped, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write skip log: " + path.string());
    for (const auto& s : skipped) out << s.path << '@' << s.commit << ": " << s.reason << '\n';
}

}  // namespace cohesion
