#include "cohesion/backend.hpp"

#include <httplib.h>

#include <cmath>
#include <cstdio>
#include <json.hpp>

namespace cohesion {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double MockBackend::probability(std::uint64_t text_hash, int mask_index, int mask_count, std::uint64_t seed) {
    std::uint64_t state = splitmix64(text_hash ^ splitmix64(seed));
    state = splitmix64(state ^ static_cast<std::uint64_t>(mask_count));
    state = splitmix64(state ^ static_cast<std::uint64_t>(mask_index));
    const double unit = (static_cast<double>(state >> 11) + 0.5) * 0x1.0p-53;  // open interval (0, 1)
    return 0.01 + 0.98 * unit;
}

BackendInfo MockBackend::info() { return {std::string(kDefaultMaskToken), 0, model_id()}; }

FillMaskResult MockBackend::fill_mask(const MaskedCode& masked) {
    std::uint64_t h = fnv1a64(masked.text);
    for (const auto& g : masked.gold_tokens) h = splitmix64(h ^ fnv1a64(g));
    FillMaskResult r;
    r.backend_id = model_id();
    for (int i = 0; i < masked.mask_count; ++i) {
        const double p = probability(h, i, masked.mask_count, seed_);
        r.probabilities.push_back(p);
        char tok[24];
        std::snprintf(tok, sizeof tok, "tok%04x", static_cast<unsigned>(std::llround(p * 65535.0)));
        r.tokens.emplace_back(tok);
    }
    return r;
}

RemoteBackend::RemoteBackend(std::string url, RemoteOptions options) : url_(std::move(url)), options_(options) {
    const auto scheme_end = url_.find("://");
    if (scheme_end == std::string::npos || url_.substr(0, scheme_end) != "http")
        throw BackendError(BackendError::Kind::Connection, "unsupported backend URL (expected http://host:port): " + url_);
    const auto path_start = url_.find('/', scheme_end + 3);
    origin_ = url_.substr(0, path_start);
    if (path_start != std::string::npos) base_path_ = url_.substr(path_start);
    while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
    if (origin_.size() <= scheme_end + 3)
        throw BackendError(BackendError::Kind::Connection, "backend URL has no host: " + url_);
}

namespace {

json parse_body(const httplib::Result& res, const std::string& what) {
    try {
        return json::parse(res->body);
    } catch (const json::exception&) {
        throw BackendError(BackendError::Kind::Malformed, what + ": response is not JSON");
    }
}

void check_status(const httplib::Result& res, const std::string& what) {
    if (res->status == 413)
        throw BackendError(BackendError::Kind::ContextOverflow, what + ": input exceeds the model context");
    if (res->status < 200 || res->status >= 300)
        throw BackendError(BackendError::Kind::Status, what + ": HTTP status " + std::to_string(res->status));
}

}  // namespace

BackendInfo RemoteBackend::info() {
    std::lock_guard lock(info_mutex_);
    if (info_) return *info_;

    const std::string what = "GET " + url_ + "/v1/info";
    httplib::Client client(origin_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    httplib::Result res = client.Get(base_path_ + "/v1/info");
    for (int attempt = 0; !res && attempt < options_.retries; ++attempt) res = client.Get(base_path_ + "/v1/info");
    if (!res) throw BackendError(BackendError::Kind::Connection, what + ": " + httplib::to_string(res.error()));
    check_status(res, what);
    const auto body = parse_body(res, what);
    try {
        BackendInfo info{body.at("mask_token").get<std::string>(), body.at("max_context").get<std::size_t>(),
                         body.at("model_id").get<std::string>()};
        if (info.mask_token.empty()) throw BackendError(BackendError::Kind::Malformed, what + ": empty mask_token");
        info_ = info;
        return info;
    } catch (const json::exception& e) {
        throw BackendError(BackendError::Kind::Malformed, what + ": " + e.what());
    }
}

FillMaskResult RemoteBackend::fill_mask(const MaskedCode& masked) {
    json request = {{"code", masked.text}, {"mask_count", masked.mask_count}};
    if (!masked.gold_tokens.empty()) request["gold_tokens"] = masked.gold_tokens;
    const auto payload = request.dump();

    const std::string what = "POST " + url_ + "/v1/fill_mask";
    httplib::Client client(origin_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    const auto path = base_path_ + "/v1/fill_mask";
    httplib::Result res = client.Post(path, payload, "application/json");
    for (int attempt = 0; !res && attempt < options_.retries; ++attempt)
        res = client.Post(path, payload, "application/json");
    if (!res) throw BackendError(BackendError::Kind::Connection, what + ": " + httplib::to_string(res.error()));
    check_status(res, what);
    const auto body = parse_body(res, what);

    FillMaskResult r;
    try {
        r.probabilities = body.at("probabilities").get<std::vector<double>>();
        r.tokens = body.at("tokens").get<std::vector<std::string>>();
        r.backend_id = body.at("model_id").get<std::string>();
    } catch (const json::exception& e) {
        throw BackendError(BackendError::Kind::Malformed, what + ": " + e.what());
    }
    const auto expected = static_cast<std::size_t>(masked.mask_count);
    if (r.probabilities.size() != expected || r.tokens.size() != expected)
        throw BackendError(BackendError::Kind::LengthMismatch,
                           what + ": expected " + std::to_string(expected) + " entries, got " +
                               std::to_string(r.probabilities.size()) + " probabilities and " +
                               std::to_string(r.tokens.size()) + " tokens");
    for (double p : r.probabilities)
        if (!(p > 0.0) || p > 1.0)
            throw BackendError(BackendError::Kind::Malformed, what + ": probability outside (0, 1]: " + std::to_string(p));
    return r;
}

}  // namespace cohesion
