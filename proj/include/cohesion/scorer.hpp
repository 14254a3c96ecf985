#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cohesion/extractor.hpp"

namespace cohesion {

inline constexpr int kMaxMaskCount = 8;
inline constexpr double kProbabilityFloor = 1e-9;
inline constexpr std::string_view kDefaultMaskToken = "<mask>";

/// Which name occurrences get hidden. Body occurrences are never turned into
/// masks (that would change the mask count); in AllOccurrences mode they are
/// rewritten to the neutral identifier `kNeutralName`.
enum class MaskScope { DeclarationOnly, AllOccurrences };
inline constexpr std::string_view kNeutralName = "fn";

/// Which probability feeds the harmonic mean for each mask position.
enum class ProbabilityMode { TopOne, GoldTokens };

struct MaskedCode {
    std::string text;
    int mask_count{1};
    std::size_t site_offset{0};  ///< where the masks start in `text`
    std::string mask_token{kDefaultMaskToken};
    std::vector<std::string> gold_tokens;  ///< only in GoldTokens mode
};

class MaskError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

MaskedCode mask_function_name(const ExtractedFunction& fn, int mask_count,
                              std::string_view mask_token = kDefaultMaskToken,
                              MaskScope scope = MaskScope::DeclarationOnly);

/// Splits an identifier into exactly `pieces` sub-tokens along snake_case /
/// camelCase boundaries, merging or splitting words as needed.
std::vector<std::string> split_name_tokens(std::string_view name, int pieces);

/// Harmonic mean n / sum(1/p_i) with every p_i floored at kProbabilityFloor.
/// Throws std::invalid_argument for an empty list or any p outside (0, 1].
double confidence(std::span<const double> probabilities);

struct CohesionScore {
    std::array<double, kMaxMaskCount> per_n_confidence{};  ///< index n-1 holds Confidence(f, n)
    double npc{0};
    int otc{1};

    double confidence_at(int n) const { return per_n_confidence.at(static_cast<std::size_t>(n - 1)); }
    bool operator==(const CohesionScore&) const = default;
};

/// npc = max, otc = smallest n achieving it.
CohesionScore make_score(const std::array<double, kMaxMaskCount>& per_n_confidence);

struct FillMaskResult {
    std::vector<double> probabilities;
    std::vector<std::string> tokens;
    std::string backend_id;
};

struct BackendInfo {
    std::string mask_token{kDefaultMaskToken};
    std::size_t max_context{0};  ///< model tokens; 0 = unbounded
    std::string model_id;
};

class BackendError : public std::runtime_error {
public:
    enum class Kind { Connection, Status, Malformed, LengthMismatch, ContextOverflow };
    BackendError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Source of fill-mask token probabilities. Implementations must be safe to
/// call from several threads at once.
class TokenProbabilityBackend {
public:
    virtual ~TokenProbabilityBackend() = default;
    virtual BackendInfo info() = 0;
    virtual FillMaskResult fill_mask(const MaskedCode& masked) = 0;
};

struct ScoreOptions {
    MaskScope scope{MaskScope::DeclarationOnly};
    ProbabilityMode mode{ProbabilityMode::TopOne};
};

/// Copy of `fn` keeping the signature and the first `keep_lines` body lines.
ExtractedFunction truncate_body(const ExtractedFunction& fn, std::size_t keep_lines);

/// Confidence for n = 1..8 and the derived NPC/OTC. Any backend failure
/// fails the whole score. Bodies are cut from the tail when the masked text
/// would not fit the backend's context window.
CohesionScore score(const ExtractedFunction& fn, TokenProbabilityBackend& backend, const ScoreOptions& options = {});

struct ScoreOutcome {
    std::optional<CohesionScore> score;
    std::string error;
    bool connection_failure{false};  ///< the backend could not be reached at all
};

/// Scores independent functions with at most `max_in_flight` concurrent
/// backend sessions. Results are in input order.
std::vector<ScoreOutcome> score_all(std::span<const ExtractedFunction> functions, TokenProbabilityBackend& backend,
                                    const ScoreOptions& options = {}, std::size_t max_in_flight = 4);

}  // namespace cohesion
