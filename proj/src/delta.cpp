#include "cohesion/delta.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>

namespace cohesion {

namespace {

// Keeps exact multiples of the bin width (0.7, 0.35, ...) in the bin they start.
constexpr double kBinEpsilon = 1e-9;

std::size_t bin_of(double offset, double width) {
    return static_cast<std::size_t>(std::floor(offset / width + kBinEpsilon));
}

}  // namespace

double cd(const CohesionScore& before, const CohesionScore& after) { return before.npc - after.npc; }

double otcd(const CohesionScore& before, const CohesionScore& after) {
    return before.npc - after.confidence_at(before.otc);
}

std::string_view label_name(PairLabel label) { return label == PairLabel::Injected ? "injected" : "benign"; }

std::string make_pair_id(const std::string& identity_key, std::size_t v1_index, std::size_t v2_index) {
    return identity_key + "#" + std::to_string(v1_index) + "-" + std::to_string(v2_index);
}

VersionPairDelta make_delta(std::string pair_id, const CohesionScore& before, const CohesionScore& after,
                            PairLabel label) {
    VersionPairDelta d;
    d.pair_id = std::move(pair_id);
    d.npc1 = before.npc;
    d.npc2 = after.npc;
    d.cd = cd(before, after);
    d.otcd = otcd(before, after);
    d.label = label;
    return d;
}

int bucket_index(double npc1) {
    if (!(npc1 > 0)) return 0;
    return static_cast<int>(std::min<double>(std::floor(npc1 * kBucketCount + kBinEpsilon), kBucketCount - 1));
}

Moments moments_of(std::span<const double> values) {
    Moments m;
    m.count = values.size();
    if (values.empty()) return m;
    double sum = 0;
    for (double v : values) sum += v;
    m.mean = sum / static_cast<double>(values.size());
    double sq = 0;
    for (double v : values) sq += (v - m.mean) * (v - m.mean);
    m.sigma = std::sqrt(sq / static_cast<double>(values.size()));
    return m;
}

const Moments& BucketStats::cd_moments(double npc1) const {
    const auto& b = cd[static_cast<std::size_t>(bucket_index(npc1))];
    return b ? *b : global_cd;
}

const Moments& BucketStats::otcd_moments(double npc1) const {
    const auto& b = otcd[static_cast<std::size_t>(bucket_index(npc1))];
    return b ? *b : global_otcd;
}

BucketStats fit_bucket_stats(std::span<const VersionPairDelta> deltas, bool include_injected) {
    std::array<std::vector<double>, kBucketCount> cds, otcds;
    std::vector<double> all_cd, all_otcd;
    for (const auto& d : deltas) {
        if (d.label == PairLabel::Injected && !include_injected) continue;
        const auto b = static_cast<std::size_t>(bucket_index(d.npc1));
        cds[b].push_back(d.cd);
        otcds[b].push_back(d.otcd);
        all_cd.push_back(d.cd);
        all_otcd.push_back(d.otcd);
    }
    if (all_cd.empty()) throw std::invalid_argument("no benign deltas to fit bucket statistics on");

    auto floored = [](Moments m) {
        m.sigma = std::max(m.sigma, kSigmaFloor);
        return m;
    };
    BucketStats stats;
    for (std::size_t b = 0; b < kBucketCount; ++b) {
        if (cds[b].empty()) continue;
        stats.cd[b] = floored(moments_of(cds[b]));
        stats.otcd[b] = floored(moments_of(otcds[b]));
    }
    stats.global_cd = floored(moments_of(all_cd));
    stats.global_otcd = floored(moments_of(all_otcd));
    return stats;
}

VersionPairDelta standardize(VersionPairDelta delta, const BucketStats& stats) {
    const auto& c = stats.cd_moments(delta.npc1);
    const auto& o = stats.otcd_moments(delta.npc1);
    delta.cdz = (delta.cd - c.mean) / c.sigma;
    delta.otcdz = (delta.otcd - o.mean) / o.sigma;
    return delta;
}

double pearson_r(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw StatisticsError("correlation inputs differ in length");
    if (xs.size() < 3) throw StatisticsError("correlation needs at least 3 points");
    const auto mx = moments_of(xs), my = moments_of(ys);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx.mean, dy = ys[i] - my.mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0 || syy == 0) throw StatisticsError("correlation undefined for a constant column");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double pearson_p_value(double r, std::size_t n) {
    if (n < 3) throw StatisticsError("p-value needs at least 3 points");
    if (std::abs(r) >= 1.0) return 0.0;
    const double df = static_cast<double>(n - 2);
    const double t = std::abs(r) * std::sqrt(df / (1.0 - r * r));
    if (n > 200) return std::erfc(t / std::sqrt(2.0));
    const boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, t));
}

Correlation pearson(std::span<const double> xs, std::span<const double> ys) {
    Correlation c;
    c.r = pearson_r(xs, ys);
    c.n = xs.size();
    c.p_value = pearson_p_value(c.r, c.n);
    return c;
}

std::vector<HistogramBin> histogram(std::span<const double> values, double bin_width, double lo, double hi) {
    if (!(bin_width > 0)) throw std::invalid_argument("histogram bin width must be positive");
    if (!(hi > lo)) throw std::invalid_argument("histogram range is empty");
    const auto bins = static_cast<std::size_t>(std::ceil((hi - lo) / bin_width - kBinEpsilon));
    std::vector<HistogramBin> out(bins);
    for (std::size_t i = 0; i < bins; ++i) out[i].lo = lo + static_cast<double>(i) * bin_width;
    for (double v : values) {
        if (!(v >= lo && v < hi)) continue;
        ++out[std::min(bin_of(v - lo, bin_width), bins - 1)].count;
    }
    return out;
}

std::vector<SizeBucket> size_buckets(std::span<const std::size_t> lines, std::span<const double> values,
                                     std::size_t width) {
    if (lines.size() != values.size()) throw std::invalid_argument("size bucket inputs differ in length");
    if (width == 0) throw std::invalid_argument("size bucket width must be positive");
    std::vector<std::vector<double>> groups;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto g = lines[i] / width;
        if (g >= groups.size()) groups.resize(g + 1);
        groups[g].push_back(values[i]);
    }
    std::vector<SizeBucket> out;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].empty()) continue;
        out.push_back({g * width, g * width + width - 1, moments_of(groups[g])});
    }
    return out;
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_deltas_csv(std::ostream& out, std::span<const VersionPairDelta> deltas) {
    out << "pair_id,npc1,npc2,cd,otcd,cdz,otcdz,label\n";
    for (const auto& d : deltas) {
        out << csv_field(d.pair_id) << ',' << format_number(d.npc1) << ',' << format_number(d.npc2) << ','
            << format_number(d.cd) << ',' << format_number(d.otcd) << ',' << (d.cdz ? format_number(*d.cdz) : "")
            << ',' << (d.otcdz ? format_number(*d.otcdz) : "") << ',' << label_name(d.label) << '\n';
    }
}

void write_bucket_stats_csv(std::ostream& out, const BucketStats& stats) {
    out << "bucket,lo,hi,metric,mean,sigma,count\n";
    auto row = [&](const std::string& bucket, double lo, double hi, std::string_view metric, const Moments& m) {
        out << bucket << ',' << format_number(lo) << ',' << format_number(hi) << ',' << metric << ','
            << format_number(m.mean) << ',' << format_number(m.sigma) << ',' << m.count << '\n';
    };
    for (int b = 0; b < kBucketCount; ++b) {
        const double lo = b * kBucketWidth, hi = (b + 1) * kBucketWidth;
        if (stats.cd[b]) row(std::to_string(b), lo, hi, "cd", *stats.cd[b]);
        if (stats.otcd[b]) row(std::to_string(b), lo, hi, "otcd", *stats.otcd[b]);
    }
    row("global", 0, 1, "cd", stats.global_cd);
    row("global", 0, 1, "otcd", stats.global_otcd);
}

}  // namespace cohesion
