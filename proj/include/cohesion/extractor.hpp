#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cohesion/lexer.hpp"

namespace cohesion {

/// A function definition found in a source file.
///
/// `full_text == signature_text + body_text + "}"` and is the exact slice of
/// the source the definition occupies. `body_lines` is the line view of
/// `body_text`: the text after `{` on the opening line and the text before
/// `}` on the closing line are dropped when they are blank.
struct ExtractedFunction {
    std::string name;            ///< unqualified, e.g. "run", "~Widget", "operator=="
    std::string qualified_name;  ///< enclosing namespaces/classes and written qualifiers
    std::vector<std::string> arg_types;
    std::string signature_text;
    std::string body_text;
    std::vector<std::string> body_lines;
    std::string full_text;

    std::size_t source_offset{0};  ///< where full_text starts in the scanned file
    std::size_t name_offset{0};    ///< declaration-site name position inside full_text
    std::size_t name_length{0};

    /// Constructor, destructor, operator or conversion function. Their names
    /// say little about the body, so scoring may skip them.
    bool special{false};

    std::size_t body_line_count() const { return body_lines.size(); }
};

/// Byte range of one body line inside `body_text` (newline excluded).
struct LineSpan {
    std::size_t begin;
    std::size_t end;
};

/// Line segmentation used for `body_lines`.
std::vector<LineSpan> body_line_spans(std::string_view body_text);

/// Every free and member function definition in `source_text`, in source
/// order. Declarations without bodies, lambdas and anything nested inside a
/// function body are skipped. Throws ParseError (prefixed with `file_path`)
/// when the file cannot be tokenized or its scopes do not balance.
std::vector<ExtractedFunction> extract_functions(std::string_view source_text, std::string_view file_path);

/// True iff `full_text` lexes cleanly, its brackets balance, and it contains
/// exactly one function definition.
bool is_syntactically_valid(std::string_view full_text);

/// Collapse whitespace runs to one space and trim.
std::string normalize_whitespace(std::string_view text);

}  // namespace cohesion
