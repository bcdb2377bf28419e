#pragma once

#include <cstdint>
#include <string_view>

namespace ctxasr {

/// Abstract supplier of random draws. Implementations must be deterministic
/// given their seed so that masking and degradation are reproducible.
class DrawSource {
public:
    virtual ~DrawSource() = default;

    /// Uniform real in [0, 1).
    virtual double uniform_real() = 0;

    /// Uniform integer in [lo, hi], both inclusive. lo == hi returns lo and
    /// still consumes exactly one draw.
    virtual std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) = 0;
};

/// SplitMix64 generator. uniform_real maps the top 53 bits of a 64-bit output
/// to [0, 1); uniform_int uses Lemire's rejection-free bounded mapping on a
/// fresh 64-bit output. Streams are identical across platforms for a given
/// seed, which makes them part of the manifest-reproducibility contract.
class SplitMix64 final : public DrawSource {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    double uniform_real() override;
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) override;

private:
    std::uint64_t state_;
};

/// FNV-1a 64-bit hash of a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

/// Per-sample seed: FNV-1a of "<global_seed as decimal>:<sample_id>".
/// Stable across platforms and runs.
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view sample_id);

} // namespace ctxasr
