#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "cohesion/scorer.hpp"

namespace cohesion {

std::uint64_t fnv1a64(std::string_view data);
std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic stand-in for a language model. Each mask probability is a
/// closed-form function of the masked text, the mask index, the mask count
/// and the seed, landing in (0.01, 0.99). It carries no semantic signal.
class MockBackend final : public TokenProbabilityBackend {
public:
    explicit MockBackend(std::uint64_t seed = 0) : seed_(seed) {}

    BackendInfo info() override;
    FillMaskResult fill_mask(const MaskedCode& masked) override;

    static double probability(std::uint64_t text_hash, int mask_index, int mask_count, std::uint64_t seed);
    static std::string model_id() { return "mock-v1"; }

private:
    std::uint64_t seed_;
};

struct RemoteOptions {
    std::chrono::milliseconds timeout{std::chrono::seconds(60)};
    int retries{2};  ///< extra attempts after a connection failure
};

/// Client for the model sidecar's fill-mask protocol.
class RemoteBackend final : public TokenProbabilityBackend {
public:
    /// `url` is "http://host:port" optionally followed by a base path.
    explicit RemoteBackend(std::string url, RemoteOptions options = {});

    BackendInfo info() override;
    FillMaskResult fill_mask(const MaskedCode& masked) override;

    const std::string& url() const { return url_; }

private:
    std::string url_;
    std::string origin_;
    std::string base_path_;
    RemoteOptions options_;
    std::mutex info_mutex_;
    std::optional<BackendInfo> info_;
};

}  // namespace cohesion
