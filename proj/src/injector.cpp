#include "cohesion/injector.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "cohesion/lexer.hpp"

namespace cohesion {

namespace {

bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

std::string leading_whitespace(std::string_view line) {
    const auto n = line.find_first_not_of(" \t");
    return std::string(line.substr(0, n == std::string_view::npos ? line.size() : n));
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string line(text.substr(pos, nl - pos));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        pos = nl + 1;
    }
    while (!lines.empty() && is_blank(lines.back())) lines.pop_back();
    const auto first = std::find_if(lines.begin(), lines.end(), [](const std::string& l) { return !is_blank(l); });
    lines.erase(lines.begin(), first);
    return lines;
}

// Snippet lines with their common indentation replaced by `indent`.
std::vector<std::string> reindent(const std::vector<std::string>& lines, const std::string& indent) {
    std::size_t common = std::string::npos;
    for (const auto& l : lines)
        if (!is_blank(l)) common = std::min(common, leading_whitespace(l).size());
    if (common == std::string::npos) common = 0;
    std::vector<std::string> out;
    for (const auto& l : lines) out.push_back(is_blank(l) ? std::string() : indent + l.substr(common));
    return out;
}

bool opens_statement_block(std::string_view before) {
    static const std::set<std::string_view> ok = {")", "else", "do", "try", "{", "}", ";", ":"};
    return ok.contains(before);
}

// Checks that inserting statements at `offset` of a function's full text
// lands between two statements of a block: not inside a token, not inside
// parentheses or an initializer/class brace, and not splitting constructs
// such as `} else` or `do { } while`.
std::optional<std::string> boundary_problem(std::string_view text, std::size_t body_begin, std::size_t offset) {
    const auto all = lex(text);
    bool after_directive = false;
    for (const auto& t : all) {
        if (t.begin < offset && offset < t.end) return "insertion point inside a comment, literal or directive";
        if (t.end <= offset && t.kind != TokenKind::Comment) after_directive = t.kind == TokenKind::Preprocessor;
    }

    std::vector<Token> sig;
    for (const auto& t : all)
        if (t.significant()) sig.push_back(t);
    auto tx = [&](std::size_t i) { return sig[i].text(text); };
    auto before = [&](std::size_t i) { return i == 0 ? std::string_view() : tx(i - 1); };

    std::size_t fn_brace = sig.size();
    for (std::size_t i = 0; i < sig.size(); ++i)
        if (sig[i].begin + 1 == body_begin && tx(i) == "{") fn_brace = i;
    if (fn_brace == sig.size()) return "function body brace not found";

    std::vector<std::size_t> open;
    std::optional<std::size_t> last_closed_open;  // opener matching the latest '}' before offset
    std::size_t prev = fn_brace;
    std::size_t i = fn_brace;
    for (; i < sig.size() && sig[i].end <= offset; ++i) {
        const auto t = tx(i);
        if (t == "{" || t == "(" || t == "[") {
            open.push_back(i);
        } else if (t == "}" || t == ")" || t == "]") {
            if (open.empty()) return "insertion point outside the function body";
            if (t == "}") last_closed_open = open.back();
            open.pop_back();
        }
        prev = i;
    }
    if (open.empty()) return "insertion point outside the function body";
    if (tx(open.back()) != "{") return "insertion point inside parentheses or brackets";
    if (open.back() != fn_brace && !opens_statement_block(before(open.back())))
        return "insertion point inside an initializer or class body";
    if (after_directive) return std::nullopt;

    const auto p = tx(prev);
    const auto next = i < sig.size() ? tx(i) : std::string_view();
    if (p == "{" || p == ";") return std::nullopt;
    if (p == "}") {
        static const std::set<std::string_view> continuation = {"else", "catch", "while", ";", ",", ")", "]"};
        if (continuation.contains(next)) return "insertion point splits a compound statement";
        if (!last_closed_open || !opens_statement_block(before(*last_closed_open)))
            return "insertion point follows a non-statement brace";
        return std::nullopt;
    }
    if (p == ":") {
        std::size_t start = prev;
        while (start > fn_brace && tx(start - 1) != ";" && tx(start - 1) != "{" && tx(start - 1) != "}") --start;
        const auto head = tx(start);
        const auto span = prev - start;
        if (head == "case" || (span == 1 && (head == "default" || sig[start].kind == TokenKind::Identifier)))
            return std::nullopt;
        return "insertion point follows a ':' that is not a label";
    }
    return "insertion point is not at a statement boundary";
}

MaliciousSnippet read_snippet(const std::filesystem::path& file, std::string id, std::string description) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw SnippetError("cannot read " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return {std::move(id), split_lines(ss.str()), std::move(description)};
}

}  // namespace

std::string_view position_name(InjectionPosition p) {
    switch (p) {
        case InjectionPosition::Beginning: return "beginning";
        case InjectionPosition::Mid: return "mid";
        case InjectionPosition::End: return "end";
    }
    return "?";
}

std::size_t insertion_line(std::size_t body_lines, InjectionPosition position) {
    switch (position) {
        case InjectionPosition::Beginning: return 0;
        case InjectionPosition::Mid: return (body_lines + 1) / 2;
        case InjectionPosition::End: return body_lines;
    }
    return 0;
}

std::optional<std::string> validate_snippet(const MaliciousSnippet& snippet) {
    if (snippet.id.empty()) return "snippet has no id";
    if (std::all_of(snippet.code_lines.begin(), snippet.code_lines.end(), [](const std::string& l) { return is_blank(l); }))
        return "snippet has no code";
    std::string text;
    for (const auto& l : snippet.code_lines) text += l + "\n";
    std::vector<Token> tokens;
    try {
        tokens = lex_significant(text);
    } catch (const ParseError& e) {
        return "does not lex: " + e.message() + " at line " + std::to_string(e.where().line);
    }
    std::vector<char> stack;
    for (const auto& t : tokens) {
        const auto s = t.text(text);
        if (s == "{" || s == "(" || s == "[") {
            stack.push_back(s[0]);
        } else if (s == "}" || s == ")" || s == "]") {
            const char want = s == "}" ? '{' : s == ")" ? '(' : '[';
            if (stack.empty() || stack.back() != want) return "unbalanced '" + std::string(s) + "'";
            stack.pop_back();
        }
    }
    if (!stack.empty()) return std::string("unclosed '") + stack.back() + "'";
    return std::nullopt;
}

SnippetCorpus load_snippets(const std::filesystem::path& path) {
    struct Entry {
        std::string id;
        std::filesystem::path file;
        std::string description;
    };
    std::vector<Entry> entries;
    std::filesystem::path manifest;
    if (std::filesystem::is_directory(path)) {
        if (std::filesystem::exists(path / "manifest.json")) {
            manifest = path / "manifest.json";
        } else {
            for (const auto& e : std::filesystem::directory_iterator(path))
                if (e.is_regular_file() && e.path().extension() == ".cpp")
                    entries.push_back({e.path().stem().string(), e.path(), ""});
            std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.id < b.id; });
        }
    } else if (std::filesystem::is_regular_file(path)) {
        manifest = path;
    } else {
        throw SnippetError("snippet path not found: " + path.string());
    }

    if (!manifest.empty()) {
        std::ifstream in(manifest);
        try {
            const auto doc = nlohmann::json::parse(in);
            if (!doc.is_array()) throw SnippetError("snippet manifest must be a JSON list: " + manifest.string());
            for (const auto& item : doc)
                entries.push_back({item.at("id").get<std::string>(),
                                   manifest.parent_path() / item.at("file").get<std::string>(),
                                   item.value("description", std::string())});
        } catch (const nlohmann::json::exception& e) {
            throw SnippetError("malformed snippet manifest " + manifest.string() + ": " + e.what());
        }
    }

    SnippetCorpus corpus;
    std::set<std::string> ids;
    for (auto& e : entries) {
        const auto name = e.file.filename().string();
        if (!ids.insert(e.id).second) {
            corpus.rejected.push_back({name, "duplicate snippet id '" + e.id + "'"});
            continue;
        }
        try {
            auto snippet = read_snippet(e.file, e.id, e.description);
            if (auto problem = validate_snippet(snippet)) {
                corpus.rejected.push_back({name, *problem});
                continue;
            }
            corpus.snippets.push_back(std::move(snippet));
        } catch (const SnippetError& err) {
            corpus.rejected.push_back({name, err.what()});
        }
    }
    if (corpus.snippets.empty()) throw SnippetError("no usable snippets under " + path.string());
    return corpus;
}

InjectionResult inject(const ExtractedFunction& fn, const MaliciousSnippet& snippet, InjectionPosition position) {
    if (auto problem = validate_snippet(snippet)) throw InjectionError("snippet " + snippet.id + ": " + *problem);
    if (!is_syntactically_valid(fn.full_text)) throw InjectionError("target function is not syntactically valid");

    const auto spans = body_line_spans(fn.body_text);
    const std::size_t L = spans.size();
    const std::size_t k = insertion_line(L, position);
    const std::size_t body_begin = fn.signature_text.size();
    auto body_line = [&](std::size_t i) {
        return std::string_view(fn.body_text).substr(spans[i].begin, spans[i].end - spans[i].begin);
    };

    std::string indent;
    if (L == 0) {
        const auto sig_line_start = fn.signature_text.rfind('\n');
        indent = leading_whitespace(std::string_view(fn.signature_text)
                                        .substr(sig_line_start == std::string::npos ? 0 : sig_line_start + 1)) +
                 "    ";
    } else {
        indent = leading_whitespace(body_line(k == 0 ? 0 : k - 1));
    }
    const auto lines = reindent(snippet.code_lines, indent);
    std::string block;
    for (std::size_t i = 0; i < lines.size(); ++i) block += (i ? "\n" : "") + lines[i];

    std::size_t offset;
    std::string inserted;
    if (L == 0) {
        offset = body_begin;
        inserted = "\n" + block + (fn.body_text.starts_with('\n') ? "" : "\n");
    } else if (k < L) {
        offset = body_begin + spans[k].begin;
        inserted = block + "\n";
    } else {
        offset = body_begin + spans[L - 1].end;
        inserted = "\n" + block;
    }

    if (auto problem = boundary_problem(fn.full_text, body_begin, offset)) throw InjectionError(*problem);

    InjectionResult result;
    result.full_text = fn.full_text.substr(0, offset) + inserted + fn.full_text.substr(offset);
    result.record.snippet_id = snippet.id;
    result.record.position = position;
    result.record.insert_line_index = k;
    result.record.insert_offset = offset;
    result.record.inserted_length = inserted.size();

    if (!is_syntactically_valid(result.full_text)) throw InjectionError("injected function is not syntactically valid");
    const auto again = extract_functions(result.full_text, "injected");
    if (again.size() != 1 || again[0].name != fn.name || again[0].arg_types != fn.arg_types)
        throw InjectionError("injected text no longer extracts as the same function");
    if (again[0].body_line_count() != L + snippet.code_lines.size())
        throw InjectionError("injected body has " + std::to_string(again[0].body_line_count()) + " lines, expected " +
                             std::to_string(L + snippet.code_lines.size()));
    return result;
}

InjectionResult inject_random(const ExtractedFunction& fn, std::span<const MaliciousSnippet> corpus,
                              std::mt19937_64& rng) {
    if (corpus.empty()) throw InjectionError("empty snippet corpus");
    const auto s = std::uniform_int_distribution<std::size_t>(0, corpus.size() - 1)(rng);
    const auto p = std::uniform_int_distribution<int>(0, 2)(rng);
    return inject(fn, corpus[s], static_cast<InjectionPosition>(p));
}

std::string remove_injection(std::string_view modified, const InjectionRecord& record) {
    if (record.insert_offset + record.inserted_length > modified.size())
        throw std::invalid_argument("injection record does not fit the text");
    std::string out(modified.substr(0, record.insert_offset));
    out += modified.substr(record.insert_offset + record.inserted_length);
    return out;
}

}  // namespace cohesion
