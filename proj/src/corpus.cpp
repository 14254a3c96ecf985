#include "cohesion/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <tuple>

#include <json.hpp>

namespace cohesion {

using nlohmann::json;

std::string identity_key(const FunctionIdentity& identity) {
    std::string key = identity.file_path + "::" + identity.name + "(";
    for (std::size_t i = 0; i < identity.arg_types.size(); ++i) {
        if (i > 0) key += ',';
        key += identity.arg_types[i];
    }
    return key + ")";
}

FunctionIdentity parse_identity_key(std::string_view key) {
    if (key.empty() || key.back() != ')') throw std::invalid_argument("identity key must end with ')'");
    // argument list: match the final ')' backwards
    int depth = 0;
    std::size_t open = std::string_view::npos;
    for (std::size_t i = key.size(); i-- > 0;) {
        if (key[i] == ')') ++depth;
        else if (key[i] == '(' && --depth == 0) {
            open = i;
            break;
        }
    }
    if (open == std::string_view::npos) throw std::invalid_argument("unbalanced argument list in identity key");
    const auto head = key.substr(0, open);
    const auto sep = head.rfind("::");
    if (sep == std::string_view::npos || sep + 2 >= head.size())
        throw std::invalid_argument("identity key lacks 'path::name'");

    FunctionIdentity id;
    id.file_path = std::string(head.substr(0, sep));
    id.name = std::string(head.substr(sep + 2));
    const auto args = key.substr(open + 1, key.size() - open - 2);
    if (!args.empty()) {
        int level = 0;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= args.size(); ++i) {
            if (i == args.size() || (args[i] == ',' && level == 0)) {
                id.arg_types.emplace_back(args.substr(start, i - start));
                start = i + 1;
                continue;
            }
            const char c = args[i];
            if (c == '(' || c == '<' || c == '[' || c == '{') ++level;
            else if (c == ')' || c == '>' || c == ']' || c == '}') --level;
        }
    }
    return id;
}

std::size_t count_whitespace_tokens(std::string_view text) {
    std::size_t count = 0;
    bool in_token = false;
    for (const unsigned char c : text) {
        if (std::isspace(c)) {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++count;
        }
    }
    return count;
}

void dedup_consecutive(FunctionHistory& history) {
    auto& v = history.versions;
    v.erase(std::unique(v.begin(), v.end(),
                        [](const FunctionVersion& a, const FunctionVersion& b) { return a.body_text == b.body_text; }),
            v.end());
}

void normalize_history(FunctionHistory& history) {
    std::stable_sort(history.versions.begin(), history.versions.end(), [](const auto& a, const auto& b) {
        return std::tie(a.commit_time, a.commit_id) < std::tie(b.commit_time, b.commit_id);
    });
    dedup_consecutive(history);
}

void FunctionHistoryStore::append(FunctionVersion version) {
    const auto key = identity_key(version.identity);
    auto [it, inserted] = histories_.try_emplace(key);
    if (inserted) it->second.identity = version.identity;
    it->second.versions.push_back(std::move(version));
}

void FunctionHistoryStore::normalize() {
    for (auto& [key, history] : histories_) normalize_history(history);
}

const FunctionHistory* FunctionHistoryStore::find(const std::string& key) const {
    const auto it = histories_.find(key);
    return it == histories_.end() ? nullptr : &it->second;
}

std::size_t FunctionHistoryStore::version_count() const {
    std::size_t n = 0;
    for (const auto& [key, h] : histories_) n += h.versions.size();
    return n;
}

std::vector<ConsecutiveVersionPair> list_version_pairs(const FunctionHistoryStore& store) {
    std::vector<ConsecutiveVersionPair> pairs;
    for (const auto& [key, history] : store.histories()) {
        for (std::size_t i = 0; i + 1 < history.versions.size(); ++i) pairs.push_back({&history, i});
    }
    return pairs;
}

void store_save(const FunctionHistoryStore& store, std::ostream& out) {
    for (const auto& [key, history] : store.histories()) {
        for (const auto& v : history.versions) {
            const json record = {{"key", key},           {"commit", v.commit_id},
                                 {"time", v.commit_time}, {"body", v.body_text},
                                 {"lines", v.body_line_count}, {"tokens", v.token_estimate}};
            out << record.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
        }
    }
}

void store_save(const FunctionHistoryStore& store, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write store: " + path.string());
    store_save(store, out);
    if (!out) throw std::runtime_error("failed writing store: " + path.string());
}

FunctionHistoryStore store_load(std::istream& in) {
    FunctionHistoryStore store;
    std::string line;
    std::size_t line_no = 0;
    std::map<std::string, std::pair<std::int64_t, std::string>> last;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            throw StoreFormatError(line_no, std::string("malformed JSON: ") + e.what());
        }
        FunctionVersion v;
        std::string key;
        try {
            key = record.at("key").get<std::string>();
            v.commit_id = record.at("commit").get<std::string>();
            v.commit_time = record.at("time").get<std::int64_t>();
            v.body_text = record.at("body").get<std::string>();
            v.body_line_count = record.at("lines").get<std::size_t>();
            v.token_estimate = record.at("tokens").get<std::size_t>();
        } catch (const json::exception& e) {
            throw StoreFormatError(line_no, std::string("bad record: ") + e.what());
        }
        try {
            v.identity = parse_identity_key(key);
        } catch (const std::invalid_argument& e) {
            throw StoreFormatError(line_no, e.what());
        }
        if (identity_key(v.identity) != key) throw StoreFormatError(line_no, "non-canonical identity key");
        const auto order = std::make_pair(v.commit_time, v.commit_id);
        if (const auto it = last.find(key); it != last.end() && !(it->second < order))
            throw StoreFormatError(line_no, "versions of " + key + " are not in (time, commit) order");
        last[key] = order;
        store.append(std::move(v));
    }
    return store;
}

FunctionHistoryStore store_load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read store: " + path.string());
    return store_load(in);
}

}  // namespace cohesion
