#include "cohesion/scorer.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <thread>

#include "cohesion/lexer.hpp"

namespace cohesion {

namespace {

std::string strip_spaces(std::string_view s) {
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
    return out;
}

bool is_plain_identifier(std::string_view s) {
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string_view::npos; pos = text.find(needle, pos + needle.size())) ++n;
    return n;
}

// Rough model-token estimate; subword tokenizers average a few bytes per token on code.
std::size_t estimated_model_tokens(std::string_view text) { return text.size() / 3 + 2; }

}  // namespace

MaskedCode mask_function_name(const ExtractedFunction& fn, int mask_count, std::string_view mask_token,
                              MaskScope scope) {
    if (mask_count < 1 || mask_count > kMaxMaskCount)
        throw std::invalid_argument("mask count must be in [1, 8], got " + std::to_string(mask_count));
    if (fn.name.empty()) throw MaskError("function has no name");
    if (mask_token.empty()) throw std::invalid_argument("empty mask token");
    if (fn.name_offset + fn.name_length > fn.full_text.size() ||
        strip_spaces(std::string_view(fn.full_text).substr(fn.name_offset, fn.name_length)) != strip_spaces(fn.name))
        throw MaskError("name '" + fn.name + "' not found at its declaration site");

    std::string masks;
    for (int i = 0; i < mask_count; ++i) masks += mask_token;

    const std::string_view full = fn.full_text;
    std::string tail(full.substr(fn.name_offset + fn.name_length));
    if (scope == MaskScope::AllOccurrences && is_plain_identifier(fn.name)) {
        // Rewrite identifier tokens inside the body; the signature is left alone.
        const std::size_t body_start = fn.signature_text.size() - (fn.name_offset + fn.name_length);
        std::string rewritten;
        std::size_t copied = 0;
        for (const auto& t : lex(tail)) {
            if (t.begin < body_start || t.kind != TokenKind::Identifier || t.text(tail) != fn.name) continue;
            rewritten.append(tail, copied, t.begin - copied);
            rewritten += kNeutralName;
            copied = t.end;
        }
        rewritten.append(tail, copied, std::string::npos);
        tail = std::move(rewritten);
    }

    MaskedCode out;
    out.text.reserve(full.size() + masks.size());
    out.text.append(full.substr(0, fn.name_offset));
    out.text += masks;
    out.text += tail;
    out.mask_count = mask_count;
    out.site_offset = fn.name_offset;
    out.mask_token = std::string(mask_token);
    if (count_occurrences(out.text, mask_token) != static_cast<std::size_t>(mask_count))
        throw MaskError("function text already contains the mask token '" + out.mask_token + "'");
    return out;
}

std::vector<std::string> split_name_tokens(std::string_view name, int pieces) {
    if (pieces < 1) throw std::invalid_argument("pieces must be positive");
    std::vector<std::string> words;
    auto kind = [](char c) {
        const auto u = static_cast<unsigned char>(c);
        if (std::isupper(u)) return 1;
        if (std::islower(u)) return 2;
        if (std::isdigit(u)) return 3;
        return 0;
    };
    for (std::size_t i = 0; i < name.size(); ++i) {
        const char c = name[i];
        bool boundary = words.empty();
        if (!boundary) {
            const char prev = name[i - 1];
            const int kp = kind(prev), kc = kind(c);
            if (c == '_' && prev != '_') boundary = true;
            else if (kp == 2 && kc == 1) boundary = true;
            else if ((kp == 3) != (kc == 3) && kp != 0) boundary = true;
            // "HTTPServer": the S starts a new word
            else if (kp == 1 && kc == 1 && i + 1 < name.size() && kind(name[i + 1]) == 2) boundary = true;
        }
        if (boundary) words.emplace_back();
        words.back().push_back(c);
    }
    while (words.size() > static_cast<std::size_t>(pieces)) {
        auto last = words.back();
        words.pop_back();
        words.back() += last;
    }
    while (words.size() < static_cast<std::size_t>(pieces)) {
        auto longest = std::max_element(words.begin(), words.end(),
                                        [](const std::string& a, const std::string& b) { return a.size() < b.size(); });
        if (longest == words.end() || longest->size() < 2) {
            words.emplace_back();
            continue;
        }
        const auto half = longest->size() / 2;
        std::string right = longest->substr(half);
        longest->resize(half);
        words.insert(longest + 1, std::move(right));
    }
    return words;
}

double confidence(std::span<const double> probabilities) {
    if (probabilities.empty()) throw std::invalid_argument("confidence of an empty probability list");
    double inverse_sum = 0;
    for (double p : probabilities) {
        if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("probability outside (0, 1]: " + std::to_string(p));
        inverse_sum += 1.0 / std::max(p, kProbabilityFloor);
    }
    return static_cast<double>(probabilities.size()) / inverse_sum;
}

CohesionScore make_score(const std::array<double, kMaxMaskCount>& per_n_confidence) {
    CohesionScore s;
    s.per_n_confidence = per_n_confidence;
    const auto best = std::max_element(per_n_confidence.begin(), per_n_confidence.end());
    s.npc = *best;
    s.otc = static_cast<int>(best - per_n_confidence.begin()) + 1;
    return s;
}

ExtractedFunction truncate_body(const ExtractedFunction& fn, std::size_t keep_lines) {
    const auto spans = body_line_spans(fn.body_text);
    if (keep_lines >= spans.size()) return fn;
    ExtractedFunction out = fn;
    out.body_text = keep_lines == 0 ? std::string("\n") : fn.body_text.substr(0, spans[keep_lines - 1].end) + "\n";
    out.body_lines.resize(keep_lines);
    out.full_text = out.signature_text + out.body_text + "}";
    return out;
}

CohesionScore score(const ExtractedFunction& fn, TokenProbabilityBackend& backend, const ScoreOptions& options) {
    const auto info = backend.info();
    std::size_t keep = fn.body_line_count();
    if (info.max_context > 0) {
        while (keep > 0 &&
               estimated_model_tokens(mask_function_name(truncate_body(fn, keep), kMaxMaskCount, info.mask_token,
                                                         options.scope).text) > info.max_context)
            --keep;
    }

    for (;;) {
        const auto target = truncate_body(fn, keep);
        std::array<double, kMaxMaskCount> table{};
        try {
            for (int n = 1; n <= kMaxMaskCount; ++n) {
                auto masked = mask_function_name(target, n, info.mask_token, options.scope);
                if (options.mode == ProbabilityMode::GoldTokens) masked.gold_tokens = split_name_tokens(fn.name, n);
                const auto result = backend.fill_mask(masked);
                if (result.probabilities.size() != static_cast<std::size_t>(n))
                    throw BackendError(BackendError::Kind::LengthMismatch,
                                       "backend returned " + std::to_string(result.probabilities.size()) +
                                           " probabilities for " + std::to_string(n) + " masks");
                table[static_cast<std::size_t>(n - 1)] = confidence(result.probabilities);
            }
        } catch (const BackendError& e) {
            if (e.kind() != BackendError::Kind::ContextOverflow || keep == 0) throw;
            keep /= 2;
            continue;
        }
        return make_score(table);
    }
}

std::vector<ScoreOutcome> score_all(std::span<const ExtractedFunction> functions, TokenProbabilityBackend& backend,
                                    const ScoreOptions& options, std::size_t max_in_flight) {
    std::vector<ScoreOutcome> out(functions.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (auto i = next.fetch_add(1); i < functions.size(); i = next.fetch_add(1)) {
            try {
                out[i].score = score(functions[i], backend, options);
            } catch (const BackendError& e) {
                out[i].error = e.what();
                out[i].connection_failure = e.kind() == BackendError::Kind::Connection;
            } catch (const std::exception& e) {
                out[i].error = e.what();
            }
        }
    };
    const auto workers = std::clamp<std::size_t>(max_in_flight, 1, std::max<std::size_t>(functions.size(), 1));
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < workers; ++i) pool.emplace_back(worker);
    worker();
    return out;
}

}  // namespace cohesion
