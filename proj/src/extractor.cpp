#include "cohesion/extractor.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <unordered_set>

namespace cohesion {

namespace {

// Identifiers that can precede '(' without naming a function.
const std::unordered_set<std::string_view> kNotAName = {
    "if", "while", "for", "switch", "return", "sizeof", "alignof", "decltype", "noexcept", "throw",
    "requires", "static_assert", "alignas", "typeid", "typeof", "__typeof__", "__attribute__",
    "__declspec", "asm", "__asm__", "__asm", "new", "delete", "case", "catch", "co_await", "co_yield",
    "co_return", "void", "int", "char", "short", "long", "float", "double", "bool", "signed",
    "unsigned", "auto", "const", "volatile", "wchar_t", "char8_t", "char16_t", "char32_t", "explicit",
    "constexpr", "consteval", "static", "inline", "virtual", "extern", "template", "typename",
    "class", "struct", "union", "enum", "namespace", "using", "typedef", "operator", "__pragma",
    "_Pragma", "__declspec"};

const std::unordered_set<std::string_view> kTypeWords = {
    "void", "int", "char", "short", "long", "float", "double", "bool", "signed", "unsigned", "auto",
    "wchar_t", "char8_t", "char16_t", "char32_t", "size_t"};

const std::unordered_set<std::string_view> kTypeDecorators = {"const", "volatile", "struct", "class",
                                                             "enum", "union", "typename", "register"};

const std::unordered_set<std::string_view> kTrailingWords = {
    "const", "volatile", "noexcept", "throw", "override", "final", "mutable", "try", "decltype",
    "__attribute__", "constexpr", "consteval", "&", "&&"};

struct Declarator {
    std::size_t name_begin;    // token index of the name's first token
    std::size_t name_end;      // one past the name's last token
    std::size_t params_open;   // token index of '('
    std::size_t params_close;  // token index of ')'
    std::size_t qual_begin;    // first token of the written qualifier ("Foo::")
    bool class_like_trailing;  // identifiers after ')' that a function could not have
};

class Extractor {
public:
    Extractor(std::string_view src, std::string_view path)
        : src_(src), path_(path), t_(lex_significant(src)), n_(t_.size()) {}

    std::vector<ExtractedFunction> run() {
        std::size_t i = 0;
        parse_scope(i, std::nullopt);
        return std::move(out_);
    }

private:
    struct Scope {
        std::string name;
        bool is_class;
    };

    std::string_view tx(std::size_t i) const { return i < n_ ? t_[i].text(src_) : std::string_view{}; }
    bool is(std::size_t i, std::string_view s) const { return i < n_ && tx(i) == s; }
    bool ident(std::size_t i) const { return i < n_ && t_[i].kind == TokenKind::Identifier; }

    [[noreturn]] void fail(std::size_t tok, const std::string& msg) const {
        const std::size_t off = tok < n_ ? t_[tok].begin : src_.size();
        throw ParseError(location_of(src_, off), msg, std::string(path_));
    }

    // i indexes '{'; returns index of the matching '}'.
    std::size_t match_brace(std::size_t i) const {
        int depth = 0;
        for (std::size_t j = i; j < n_; ++j) {
            if (is(j, "{")) ++depth;
            else if (is(j, "}") && --depth == 0) return j;
        }
        fail(i, "unterminated '{'");
    }

    // i indexes '('; returns index of the matching ')'.
    std::size_t match_paren(std::size_t i) const {
        int depth = 0;
        int braces = 0;
        for (std::size_t j = i; j < n_; ++j) {
            if (is(j, "(")) ++depth;
            else if (is(j, ")") && --depth == 0) return j;
            else if (is(j, "{")) ++braces;
            else if (is(j, "}") && braces-- == 0) break;
            else if (is(j, ";") && braces == 0) break;
        }
        fail(i, "unterminated '('");
    }

    // i indexes '<'; returns index after the matching '>' (best effort).
    std::size_t skip_angles(std::size_t i) const {
        int depth = 0;
        for (std::size_t j = i; j < n_; ++j) {
            if (is(j, "<")) ++depth;
            else if (is(j, ">") && --depth == 0) return j + 1;
            else if (is(j, "(")) j = match_paren(j);
            else if (is(j, ";") || is(j, "{") || is(j, "}")) return j;
        }
        return n_;
    }

    // i indexes "operator"; returns the index of the parameter list '('.
    std::size_t skip_operator_name(std::size_t i) const {
        std::size_t j = i + 1;
        if (is(j, "(") && is(j + 1, ")")) return j + 2;
        while (j < n_ && !is(j, "(") && !is(j, ";") && !is(j, "{")) ++j;
        return j;
    }

    std::size_t after_template_headers(std::size_t i, std::size_t end) const {
        while (i < end && is(i, "template") && is(i + 1, "<")) i = skip_angles(i + 1);
        return i;
    }

    // Walks back over a '<...>' ending at q (tx(q) == ">"); returns index of '<'.
    std::optional<std::size_t> angle_open_before(std::size_t q, std::size_t lo) const {
        int depth = 0;
        for (std::size_t r = q + 1; r-- > lo;) {
            if (is(r, ">")) ++depth;
            else if (is(r, "<") && --depth == 0) return r;
            else if (is(r, ";") || is(r, "{") || is(r, "}")) return std::nullopt;
        }
        return std::nullopt;
    }

    std::optional<Declarator> name_before(std::size_t p, std::size_t lo) const {
        if (p == 0 || p - 1 < lo) return std::nullopt;
        std::size_t q = p - 1;
        Declarator d{};
        d.params_open = p;
        bool found = false;
        if (is(q, ")") && q >= lo + 2 && is(q - 1, "(") && is(q - 2, "operator")) {
            d.name_begin = q - 2;
            d.name_end = q + 1;
            found = true;
        }
        if (!found) {
            for (std::size_t r = q + 1; r-- > lo && q - r <= 8;) {
                if (is(r, "operator")) {
                    d.name_begin = r;
                    d.name_end = q + 1;
                    found = true;
                    break;
                }
                if (r < q && (is(r, "(") || is(r, ")") || is(r, ";") || is(r, "{") || is(r, "}"))) break;
            }
        }
        if (!found) {
            if (is(q, ">")) {
                const auto open = angle_open_before(q, lo);
                if (!open || *open == 0 || *open - 1 < lo) return std::nullopt;
                q = *open - 1;
            }
            if (!ident(q) || kNotAName.contains(tx(q))) return std::nullopt;
            d.name_begin = (q > lo && is(q - 1, "~")) ? q - 1 : q;
            d.name_end = q + 1;
        }
        // Written qualifier: ns::Class<T>::
        std::size_t b = d.name_begin;
        while (b > lo && is(b - 1, "::")) {
            if (b - 1 == lo) {
                b -= 1;
                break;
            }
            std::size_t c = b - 2;
            if (is(c, ">")) {
                const auto open = angle_open_before(c, lo);
                if (!open || *open == 0 || *open - 1 < lo) break;
                c = *open - 1;
            }
            if (!ident(c)) break;
            b = c;
        }
        d.qual_begin = b;
        return d;
    }

    std::optional<Declarator> find_declarator(std::size_t begin, std::size_t end) const {
        std::optional<Declarator> best;
        const std::size_t lo = after_template_headers(begin, end);
        int bracket = 0;
        for (std::size_t j = lo; j < end; ++j) {
            if (is(j, "[")) ++bracket;
            else if (is(j, "]")) --bracket;
            else if (is(j, "operator")) {
                const std::size_t open = skip_operator_name(j);
                if (open < end && is(open, "(") && bracket == 0) {
                    if (auto d = name_before(open, lo)) {
                        d->params_close = match_paren(open);
                        best = d;
                        j = d->params_close;
                        continue;
                    }
                }
                j = open > j ? open - 1 : j;
            } else if (is(j, "(")) {
                const std::size_t close = match_paren(j);
                if (bracket == 0) {
                    if (auto d = name_before(j, lo)) {
                        d->params_close = close;
                        best = d;
                    }
                }
                j = close;
            }
        }
        if (best) {
            best->class_like_trailing = false;
            for (std::size_t j = best->params_close + 1; j < end; ++j) {
                if (is(j, "->") || is(j, "requires")) break;
                if (is(j, "(")) {
                    j = match_paren(j);
                    continue;
                }
                if (ident(j) && !kTrailingWords.contains(tx(j))) {
                    best->class_like_trailing = true;
                    break;
                }
            }
        }
        return best;
    }

    // Index of the first class-key after any template headers, or npos.
    std::size_t class_key(std::size_t begin, std::size_t end) const {
        int paren = 0;
        for (std::size_t j = after_template_headers(begin, end); j < end; ++j) {
            if (is(j, "(")) ++paren;
            else if (is(j, ")")) --paren;
            else if (paren == 0 && (is(j, "class") || is(j, "struct") || is(j, "union") || is(j, "enum")))
                return j;
        }
        return std::string_view::npos;
    }

    std::string class_name(std::size_t key, std::size_t end) const {
        std::size_t stop = end;
        for (std::size_t j = key + 1; j < end; ++j) {
            if (is(j, ":")) {
                stop = j;
                break;
            }
        }
        std::size_t q = stop;
        while (q > key + 1) {
            --q;
            if (is(q, "final")) continue;
            if (is(q, ">")) {
                const auto open = angle_open_before(q, key + 1);
                if (!open) break;
                q = *open;
                continue;
            }
            if (ident(q)) return std::string(tx(q));
            if (is(q, "]")) {
                while (q > key + 1 && !is(q, "[")) --q;
                continue;
            }
            if (is(q, ")")) {
                while (q > key + 1 && !is(q, "(")) --q;
                continue;
            }
        }
        return "(anonymous)";
    }

    // Parses declarations until the '}' closing this scope (consumed).
    void parse_scope(std::size_t& i, std::optional<std::size_t> open) {
        while (i < n_) {
            if (is(i, "}")) {
                if (!open) fail(i, "unmatched '}'");
                ++i;
                return;
            }
            if (is(i, ";")) {
                ++i;
                continue;
            }
            parse_declaration(i);
        }
        if (open) fail(*open, "unterminated '{'");
    }

    void parse_declaration(std::size_t& i) {
        std::size_t start = i;
        std::size_t j = i;
        int paren = 0;
        int bracket = 0;
        bool seen_eq = false;
        while (j < n_) {
            const auto s = tx(j);
            if (s == "(") {
                ++paren;
            } else if (s == ")") {
                if (paren == 0) fail(j, "unmatched ')'");
                --paren;
            } else if (s == "[") {
                ++bracket;
            } else if (s == "]") {
                if (bracket > 0) --bracket;
            } else if (paren > 0 || bracket > 0) {
                if (s == "{") {
                    j = match_brace(j) + 1;
                    continue;
                }
                if (s == "}") fail(j, "unbalanced '}' inside parentheses");
            } else if (s == ";") {
                i = j + 1;
                return;
            } else if (s == "}") {
                i = j;
                return;
            } else if (s == "template" && is(j + 1, "<")) {
                j = skip_angles(j + 1);
                continue;
            } else if (s == "operator") {
                j = skip_operator_name(j);
                continue;
            } else if (s == "=") {
                seen_eq = true;
            } else if (s == ":" && !seen_eq) {
                if (class_key(start, j) == std::string_view::npos) {
                    if (auto d = find_declarator(start, j)) {
                        const std::size_t body = skip_member_initializers(j + 1);
                        emit_function(start, *d, body);
                        i = match_brace(body) + 1;
                        return;
                    }
                    // access specifier, bit-field or label-like macro
                    start = j + 1;
                }
            } else if (s == "{") {
                if (seen_eq) {
                    j = match_brace(j) + 1;
                    continue;
                }
                if (auto next = open_brace(start, j)) {
                    if (*next == kFunctionDone) {
                        i = match_brace(j) + 1;
                        return;
                    }
                    j = *next;
                    continue;
                }
                // namespace / linkage scope consumed entirely
                i = j;
                return;
            }
            ++j;
        }
        i = n_;
    }

    static constexpr std::size_t kFunctionDone = static_cast<std::size_t>(-1);

    // Handles a '{' at declaration level. Returns the token index to resume the
    // declaration scan at, kFunctionDone after a function definition, or
    // nullopt after a namespace/linkage block (j updated past it).
    std::optional<std::size_t> open_brace(std::size_t start, std::size_t& j) {
        const std::size_t lo = (is(start, "inline") && is(start + 1, "namespace")) ? start + 1 : start;
        if (is(lo, "namespace")) {
            std::string name;
            for (std::size_t k = lo + 1; k < j; ++k) {
                if (!ident(k) && !is(k, "::")) continue;
                name += tx(k);
            }
            scopes_.push_back({name.empty() ? "(anonymous)" : name, false});
            std::size_t k = j + 1;
            parse_scope(k, j);
            scopes_.pop_back();
            j = k;
            return std::nullopt;
        }
        if (is(start, "extern") && start + 2 == j && t_[start + 1].kind == TokenKind::String) {
            std::size_t k = j + 1;
            parse_scope(k, j);
            j = k;
            return std::nullopt;
        }
        const std::size_t key = class_key(start, j);
        const auto decl = find_declarator(start, j);
        if (decl && (key == std::string_view::npos || !decl->class_like_trailing)) {
            emit_function(start, *decl, j);
            return kFunctionDone;
        }
        if (key != std::string_view::npos && !is(key, "enum")) {
            scopes_.push_back({class_name(key, j), true});
            std::size_t k = j + 1;
            parse_scope(k, j);
            scopes_.pop_back();
            return k;
        }
        return match_brace(j) + 1;
    }

    // i is the first token after the ctor-initializer ':'; returns the body '{'.
    std::size_t skip_member_initializers(std::size_t i) const {
        std::size_t j = i;
        while (j < n_) {
            while (j < n_ && !is(j, "(") && !is(j, "{")) {
                if (is(j, ";") || is(j, "}")) fail(j, "malformed member initializer list");
                if (is(j, "<")) {
                    j = skip_angles(j);
                    continue;
                }
                ++j;
            }
            if (j >= n_) break;
            j = is(j, "(") ? match_paren(j) + 1 : match_brace(j) + 1;
            if (is(j, "...")) ++j;
            if (is(j, ",")) {
                ++j;
                continue;
            }
            if (is(j, "{")) return j;
            fail(j, "expected function body after member initializers");
        }
        fail(i, "unterminated member initializer list");
    }

    std::string join_tokens(const std::vector<std::size_t>& idx) const {
        std::string out;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (k > 0) {
                const std::size_t prev = idx[k - 1];
                const std::size_t cur = idx[k];
                const bool adjacent = cur == prev + 1;
                const auto gap = src_.substr(t_[prev].end, t_[cur].begin - t_[prev].end);
                const bool ws = std::any_of(gap.begin(), gap.end(), [](unsigned char c) { return std::isspace(c); }) ||
                                gap.find("/*") != std::string_view::npos;
                bool space = ws;
                if (!adjacent) {
                    // A token was removed here: keep the left gap's spacing.
                    const auto left = src_.substr(t_[prev].end, t_[prev + 1].begin - t_[prev].end);
                    space = !left.empty() && !is(cur, "[") && !is(cur, ")");
                }
                if (space) out += ' ';
            }
            out += tx(idx[k]);
        }
        return out;
    }

    std::vector<std::string> parameter_types(std::size_t open, std::size_t close) const {
        std::vector<std::vector<std::size_t>> params(1);
        int depth = 0;
        int angle = 0;
        for (std::size_t j = open + 1; j < close; ++j) {
            const auto s = tx(j);
            if (s == "(" || s == "[" || s == "{") ++depth;
            else if (s == ")" || s == "]" || s == "}") --depth;
            else if (s == "<" && j > open + 1 && (ident(j - 1) || is(j - 1, ">"))) ++angle;
            else if (s == ">" && angle > 0) --angle;
            else if (s == "," && depth == 0 && angle == 0) {
                params.emplace_back();
                continue;
            }
            params.back().push_back(j);
        }
        std::vector<std::string> out;
        for (auto& p : params) {
            // strip default argument
            int d = 0;
            int a = 0;
            for (std::size_t k = 0; k < p.size(); ++k) {
                const auto s = tx(p[k]);
                if (s == "(" || s == "[" || s == "{") ++d;
                else if (s == ")" || s == "]" || s == "}") --d;
                else if (s == "<" && k > 0 && ident(p[k - 1])) ++a;
                else if (s == ">" && a > 0) --a;
                else if (s == "=" && d == 0 && a == 0) {
                    p.resize(k);
                    break;
                }
            }
            if (p.empty()) continue;
            drop_parameter_name(p);
            if (p.size() == 1 && tx(p[0]) == "void" && params.size() == 1) continue;
            out.push_back(join_tokens(p));
        }
        return out;
    }

    void drop_parameter_name(std::vector<std::size_t>& p) const {
        auto type_tokens_before = [&](std::size_t k) {
            for (std::size_t m = 0; m < k; ++m) {
                const auto s = tx(p[m]);
                if (ident(p[m]) && !kTypeDecorators.contains(s)) return true;
            }
            return false;
        };
        // function pointer / reference: ( * name ) or ( & name ) or ( Class :: * name )
        for (std::size_t k = 0; k + 2 < p.size(); ++k) {
            if (tx(p[k]) != "(") continue;
            std::size_t m = k + 1;
            while (m < p.size() && (ident(p[m]) || tx(p[m]) == "::") && !(m + 1 < p.size() && tx(p[m + 1]) == ")"))
                ++m;
            if (m < p.size() && (tx(p[m]) == "*" || tx(p[m]) == "&" || tx(p[m]) == "&&" || tx(p[m]) == "^")) {
                if (m + 2 < p.size() && ident(p[m + 1]) && tx(p[m + 2]) == ")") {
                    p.erase(p.begin() + static_cast<std::ptrdiff_t>(m + 1));
                    return;
                }
                return;
            }
        }
        // array parameter: name [ N ]
        int depth = 0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            const auto s = tx(p[k]);
            if (s == "(" || s == "<") ++depth;
            else if (s == ")" || s == ">") --depth;
            else if (s == "[" && depth == 0) {
                if (k > 0 && ident(p[k - 1]) && !kTypeWords.contains(tx(p[k - 1])) &&
                    !kTypeDecorators.contains(tx(p[k - 1])) && type_tokens_before(k - 1) &&
                    !(k >= 2 && tx(p[k - 2]) == "::"))
                    p.erase(p.begin() + static_cast<std::ptrdiff_t>(k - 1));
                return;
            }
        }
        const std::size_t last = p.size() - 1;
        if (last == 0 || !ident(p[last])) return;
        const auto s = tx(p[last]);
        if (kTypeWords.contains(s) || kTypeDecorators.contains(s)) return;
        if (tx(p[last - 1]) == "::") return;
        if (!type_tokens_before(last)) return;
        p.pop_back();
    }

    void emit_function(std::size_t start, const Declarator& d, std::size_t open) {
        const std::size_t close = match_brace(open);
        const std::size_t begin = t_[start].begin;
        const std::size_t brace = t_[open].begin;
        const std::size_t end = t_[close].end;

        ExtractedFunction f;
        std::vector<std::size_t> name_tokens;
        for (std::size_t k = d.name_begin; k < d.name_end; ++k) name_tokens.push_back(k);
        f.name = is(d.name_begin, "~") ? "~" + std::string(tx(d.name_begin + 1)) : join_tokens(name_tokens);

        std::string qualifier;
        for (std::size_t k = d.qual_begin; k < d.name_begin; ++k) qualifier += tx(k);
        for (const auto& s : scopes_) f.qualified_name += s.name + "::";
        f.qualified_name += qualifier + f.name;

        f.arg_types = parameter_types(d.params_open, d.params_close);
        f.full_text = std::string(src_.substr(begin, end - begin));
        f.signature_text = std::string(src_.substr(begin, brace + 1 - begin));
        f.body_text = std::string(src_.substr(brace + 1, t_[close].begin - brace - 1));
        for (const auto& span : body_line_spans(f.body_text))
            f.body_lines.emplace_back(f.body_text.substr(span.begin, span.end - span.begin));
        f.source_offset = begin;
        f.name_offset = t_[d.name_begin].begin - begin;
        f.name_length = t_[d.name_end - 1].end - t_[d.name_begin].begin;

        std::string owner;
        if (d.qual_begin < d.name_begin) {
            // last identifier of the qualifier, e.g. "Foo" in "ns::Foo<T>::"
            for (std::size_t k = d.name_begin; k-- > d.qual_begin;) {
                if (ident(k)) {
                    owner = std::string(tx(k));
                    break;
                }
                if (is(k, ">")) {
                    if (auto o = angle_open_before(k, d.qual_begin)) k = *o;
                }
            }
        } else if (!scopes_.empty() && scopes_.back().is_class) {
            owner = scopes_.back().name;
        }
        f.special = f.name.starts_with("operator") || f.name.starts_with("~") || (!owner.empty() && f.name == owner);
        out_.push_back(std::move(f));
    }

    std::string_view src_;
    std::string_view path_;
    std::vector<Token> t_;
    std::size_t n_;
    std::vector<Scope> scopes_;
    std::vector<ExtractedFunction> out_;
};

bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

std::vector<LineSpan> body_line_spans(std::string_view body_text) {
    std::vector<LineSpan> spans;
    std::size_t pos = 0;
    while (true) {
        const auto nl = body_text.find('\n', pos);
        if (nl == std::string_view::npos) {
            spans.push_back({pos, body_text.size()});
            break;
        }
        spans.push_back({pos, nl});
        pos = nl + 1;
    }
    auto text = [&](const LineSpan& s) { return body_text.substr(s.begin, s.end - s.begin); };
    if (spans.size() == 1) {
        if (blank(text(spans.front()))) spans.clear();
        return spans;
    }
    if (blank(text(spans.back()))) spans.pop_back();
    if (!spans.empty() && blank(text(spans.front()))) spans.erase(spans.begin());
    return spans;
}

std::vector<ExtractedFunction> extract_functions(std::string_view source_text, std::string_view file_path) {
    try {
        return Extractor(source_text, file_path).run();
    } catch (const ParseError& e) {
        if (!e.file().empty()) throw;
        throw ParseError(e.where(), e.message(), std::string(file_path));
    }
}

bool is_syntactically_valid(std::string_view full_text) {
    std::vector<Token> tokens;
    try {
        tokens = lex_significant(full_text);
    } catch (const ParseError&) {
        return false;
    }
    std::vector<char> stack;
    for (const auto& t : tokens) {
        if (t.kind != TokenKind::Punct) continue;
        const char c = full_text[t.begin];
        if (t.end - t.begin != 1) continue;
        if (c == '(' || c == '[' || c == '{') {
            stack.push_back(c);
        } else if (c == ')' || c == ']' || c == '}') {
            const char want = c == ')' ? '(' : c == ']' ? '[' : '{';
            if (stack.empty() || stack.back() != want) return false;
            stack.pop_back();
        }
    }
    if (!stack.empty()) return false;
    try {
        return extract_functions(full_text, "<validity>").size() == 1;
    } catch (const ParseError&) {
        return false;
    }
}

std::string normalize_whitespace(std::string_view text) {
    std::string out;
    bool pending = false;
    for (const unsigned char c : text) {
        if (std::isspace(c)) {
            pending = !out.empty();
            continue;
        }
        if (pending) out += ' ';
        pending = false;
        out += static_cast<char>(c);
    }
    return out;
}

}  // namespace cohesion
