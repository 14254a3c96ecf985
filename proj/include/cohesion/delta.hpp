#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cohesion/scorer.hpp"

namespace cohesion {

/// NPC drop between two versions; positive means cohesion fell.
double cd(const CohesionScore& before, const CohesionScore& after);

/// NPC of `before` minus the confidence of `after` at `before`'s optimal token count.
double otcd(const CohesionScore& before, const CohesionScore& after);

enum class PairLabel { Benign, Injected };
std::string_view label_name(PairLabel label);

struct VersionPairDelta {
    std::string pair_id;
    double npc1{0};
    double npc2{0};
    double cd{0};
    double otcd{0};
    std::optional<double> cdz;
    std::optional<double> otcdz;
    PairLabel label{PairLabel::Benign};
    std::size_t body_lines{0};  ///< v1 size, for size-bucket reports
};

/// "identity_key#i-j" for versions i and j of one history.
std::string make_pair_id(const std::string& identity_key, std::size_t v1_index, std::size_t v2_index);

VersionPairDelta make_delta(std::string pair_id, const CohesionScore& before, const CohesionScore& after,
                            PairLabel label = PairLabel::Benign);

inline constexpr int kBucketCount = 20;
inline constexpr double kBucketWidth = 0.05;
inline constexpr double kSigmaFloor = 1e-6;

/// floor(npc1 / 0.05) clamped to [0, 19].
int bucket_index(double npc1);

struct Moments {
    double mean{0};
    double sigma{1};  ///< population standard deviation, floored at kSigmaFloor
    std::size_t count{0};
};

/// Per-bucket mean and standard deviation of cd and otcd, keyed by npc1.
struct BucketStats {
    std::array<std::optional<Moments>, kBucketCount> cd;
    std::array<std::optional<Moments>, kBucketCount> otcd;
    Moments global_cd;
    Moments global_otcd;

    /// Bucket moments, or the global ones when that bucket is empty.
    const Moments& cd_moments(double npc1) const;
    const Moments& otcd_moments(double npc1) const;
};

Moments moments_of(std::span<const double> values);

/// Fits on benign deltas only unless `include_injected` is set. Throws
/// std::invalid_argument when nothing remains to fit on.
BucketStats fit_bucket_stats(std::span<const VersionPairDelta> deltas, bool include_injected = false);

VersionPairDelta standardize(VersionPairDelta delta, const BucketStats& stats);

class StatisticsError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sample Pearson correlation. Throws StatisticsError on length mismatch,
/// fewer than 3 points or a constant column.
double pearson_r(std::span<const double> xs, std::span<const double> ys);

struct Correlation {
    double r{0};
    double p_value{1};  ///< two-sided; indicative only
    std::size_t n{0};
};
Correlation pearson(std::span<const double> xs, std::span<const double> ys);

/// Two-sided p-value of r under the null of no correlation: exact Student t
/// for n <= 200, normal tail beyond.
double pearson_p_value(double r, std::size_t n);

struct HistogramBin {
    double lo{0};
    std::size_t count{0};
};

/// Bins [lo, hi) into ceil((hi - lo) / width) bins; out-of-range values are dropped.
std::vector<HistogramBin> histogram(std::span<const double> values, double bin_width, double lo, double hi);

struct SizeBucket {
    std::size_t lines_lo{0};  ///< inclusive
    std::size_t lines_hi{0};  ///< inclusive
    Moments moments;          ///< raw (unfloored) sigma
};

/// Groups `values` by `lines` into [0,4], [5,9], ... intervals of `width`
/// lines; empty intervals are omitted.
std::vector<SizeBucket> size_buckets(std::span<const std::size_t> lines, std::span<const double> values,
                                     std::size_t width = 5);

/// pair_id, npc1, npc2, cd, otcd, cdz, otcdz, label
void write_deltas_csv(std::ostream& out, std::span<const VersionPairDelta> deltas);

/// bucket, lo, hi, metric, mean, sigma, count
void write_bucket_stats_csv(std::ostream& out, const BucketStats& stats);

/// RFC 4180 quoting when needed.
std::string csv_field(std::string_view s);

/// Shortest round-tripping decimal rendering.
std::string format_number(double v);

}  // namespace cohesion
