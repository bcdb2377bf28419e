#include "ctxasr/rng.hpp"

#include <cassert>
#include <string>

namespace ctxasr {

std::uint64_t SplitMix64::next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform_real() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::int64_t SplitMix64::uniform_int(std::int64_t lo, std::int64_t hi) {
    assert(lo <= hi);
    const auto range = static_cast<std::uint64_t>(hi - lo + 1);
    const auto scaled = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * range) >> 64);
    return lo + static_cast<std::int64_t>(scaled);
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view sample_id) {
    std::string key = std::to_string(global_seed);
    key += ':';
    key += sample_id;
    return fnv1a64(key);
}

} // namespace ctxasr
