#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cohesion {

enum class TokenKind {
    Identifier,
    Number,
    String,
    Char,
    Punct,
    Comment,
    Preprocessor,
};

struct Token {
    TokenKind kind;
    std::size_t begin;  ///< byte offset into the lexed text
    std::size_t end;    ///< one past the last byte

    std::string_view text(std::string_view source) const { return source.substr(begin, end - begin); }
    bool significant() const { return kind != TokenKind::Comment && kind != TokenKind::Preprocessor; }
};

struct SourceLocation {
    std::size_t line{1};    // 1-based
    std::size_t column{1};  // 1-based, bytes
};

SourceLocation location_of(std::string_view source, std::size_t offset);

/// Raised for text that cannot be tokenized or whose scopes do not balance.
class ParseError : public std::runtime_error {
public:
    ParseError(SourceLocation where, std::string message, std::string file = {});
    SourceLocation where() const { return where_; }
    const std::string& message() const { return message_; }
    const std::string& file() const { return file_; }

private:
    SourceLocation where_;
    std::string message_;
    std::string file_;
};

/// Tokenizes C++ surface syntax without preprocessing. Comments and whole
/// preprocessor directives are emitted as single tokens. `>` is always a
/// single-character token so nested template closers stay separable.
///
/// Throws ParseError on an unterminated comment, string, char or raw string.
std::vector<Token> lex(std::string_view source);

/// Significant tokens only (comments and directives dropped).
std::vector<Token> lex_significant(std::string_view source);

}  // namespace cohesion
