#include "cohesion/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace cohesion {

namespace {

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c == '$' || c >= 0x80; }

bool is_string_prefix(std::string_view id) { return id == "L" || id == "u" || id == "U" || id == "u8"; }
bool is_raw_prefix(std::string_view id) { return id == "R" || id == "LR" || id == "uR" || id == "UR" || id == "u8R"; }

// Longest-first; '>' deliberately absent from every multi-char entry except "->".
constexpr std::array<std::string_view, 24> kMultiPunct = {
    "->*", "<<=", "<=>", "...", "::", "->", ".*", "<<", "<=", "==", "!=", "&&", "||", "++", "--",
    "+=",  "-=",  "*=",  "/=",  "%=", "&=", "|=", "^=", "##"};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        bool line_start = true;
        while (pos_ < src_.size()) {
            const unsigned char c = src_[pos_];
            if (c == '\n') {
                line_start = true;
                ++pos_;
                continue;
            }
            if (std::isspace(c)) {
                ++pos_;
                continue;
            }
            const std::size_t begin = pos_;
            if (c == '#' && line_start) {
                skip_directive();
                out.push_back({TokenKind::Preprocessor, begin, pos_});
                continue;
            }
            line_start = false;
            if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
                out.push_back({TokenKind::Comment, begin, pos_});
                continue;
            }
            if (c == '/' && peek(1) == '*') {
                const auto close = src_.find("*/", pos_ + 2);
                if (close == std::string_view::npos) fail(begin, "unterminated block comment");
                pos_ = close + 2;
                out.push_back({TokenKind::Comment, begin, pos_});
                continue;
            }
            if (is_ident_start(c)) {
                while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
                const auto id = src_.substr(begin, pos_ - begin);
                if (pos_ < src_.size() && src_[pos_] == '"' && is_raw_prefix(id)) {
                    raw_string(begin);
                    out.push_back({TokenKind::String, begin, pos_});
                } else if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'') && is_string_prefix(id)) {
                    const char q = src_[pos_];
                    quoted(begin, q);
                    out.push_back({q == '"' ? TokenKind::String : TokenKind::Char, begin, pos_});
                } else {
                    out.push_back({TokenKind::Identifier, begin, pos_});
                }
                continue;
            }
            if (std::isdigit(c) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
                number();
                out.push_back({TokenKind::Number, begin, pos_});
                continue;
            }
            if (c == '"' || c == '\'') {
                quoted(begin, static_cast<char>(c));
                out.push_back({c == '"' ? TokenKind::String : TokenKind::Char, begin, pos_});
                continue;
            }
            out.push_back({TokenKind::Punct, begin, begin + punct_length()});
            pos_ = out.back().end;
        }
        return out;
    }

private:
    char peek(std::size_t ahead) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    [[noreturn]] void fail(std::size_t offset, const std::string& msg) const {
        throw ParseError(location_of(src_, offset), msg);
    }

    void skip_directive() {
        while (pos_ < src_.size()) {
            if (src_[pos_] == '\\' && peek(1) == '\n') {
                pos_ += 2;
                continue;
            }
            if (src_[pos_] == '\n') break;
            if (src_[pos_] == '/' && peek(1) == '*') {
                const auto close = src_.find("*/", pos_ + 2);
                if (close == std::string_view::npos) fail(pos_, "unterminated block comment");
                pos_ = close + 2;
                continue;
            }
            ++pos_;
        }
    }

    void quoted(std::size_t begin, char quote) {
        ++pos_;  // opening quote
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '\\') {
                pos_ += 2;
                continue;
            }
            if (c == '\n') break;
            ++pos_;
            if (c == quote) return;
        }
        fail(begin, quote == '"' ? "unterminated string literal" : "unterminated character literal");
    }

    void raw_string(std::size_t begin) {
        ++pos_;  // opening quote
        const auto paren = src_.find('(', pos_);
        if (paren == std::string_view::npos || paren - pos_ > 16) fail(begin, "malformed raw string delimiter");
        const std::string closer = ")" + std::string(src_.substr(pos_, paren - pos_)) + "\"";
        const auto close = src_.find(closer, paren + 1);
        if (close == std::string_view::npos) fail(begin, "unterminated raw string literal");
        pos_ = close + closer.size();
    }

    void number() {
        while (pos_ < src_.size()) {
            const unsigned char c = src_[pos_];
            if ((c == '+' || c == '-') && pos_ > 0) {
                const char prev = static_cast<char>(std::tolower(static_cast<unsigned char>(src_[pos_ - 1])));
                if (prev == 'e' || prev == 'p') {
                    ++pos_;
                    continue;
                }
                return;
            }
            if (c == '\'' && std::isalnum(static_cast<unsigned char>(peek(1)))) {
                ++pos_;
                continue;
            }
            if (!(std::isalnum(c) || c == '_' || c == '.')) return;
            ++pos_;
        }
    }

    std::size_t punct_length() const {
        const auto rest = src_.substr(pos_);
        for (const auto p : kMultiPunct) {
            if (rest.starts_with(p)) return p.size();
        }
        return 1;
    }

    std::string_view src_;
    std::size_t pos_{0};
};

}  // namespace

SourceLocation location_of(std::string_view source, std::size_t offset) {
    SourceLocation loc;
    offset = std::min(offset, source.size());
    for (std::size_t i = 0; i < offset; ++i) {
        if (source[i] == '\n') {
            ++loc.line;
            loc.column = 1;
        } else {
            ++loc.column;
        }
    }
    return loc;
}

ParseError::ParseError(SourceLocation where, std::string message, std::string file)
    : std::runtime_error((file.empty() ? std::string() : file + ":") + std::to_string(where.line) + ":" +
                         std::to_string(where.column) + ": " + message),
      where_(where),
      message_(std::move(message)),
      file_(std::move(file)) {}

std::vector<Token> lex(std::string_view source) { return Lexer(source).run(); }

std::vector<Token> lex_significant(std::string_view source) {
    auto tokens = lex(source);
    std::erase_if(tokens, [](const Token& t) { return !t.significant(); });
    return tokens;
}

}  // namespace cohesion
