#pragma once
// Deterministic random streams. Every stochastic decision in the harness is
// keyed by a derived stream seed so results are independent of scheduling
// order. mt19937_64 output is pinned by the standard; bounded draws and unit
// draws below avoid the implementation-defined std <random> distributions.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace syco {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = kFnvOffset) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

std::uint64_t hash_mix(std::uint64_t seed, std::string_view part);
std::uint64_t hash_mix(std::uint64_t seed, std::uint64_t part);

// Derives one stream key from a base seed and labeled parts.
template <typename... Parts>
std::uint64_t stream_seed(std::uint64_t base, Parts&&... parts) {
    std::uint64_t h = hash_mix(kFnvOffset, base);
    ((h = hash_mix(h, parts)), ...);
    return h;
}

std::mt19937_64 make_engine(std::uint64_t seed);

// Uniform integer in [0, n). Rejection-sampled, no modulo bias.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t n);

// Uniform double in [0, 1) with 53 random bits.
double draw_unit(std::mt19937_64& rng);

bool draw_bernoulli(std::mt19937_64& rng, double p);

// Portable Fisher-Yates (std::shuffle is implementation-defined).
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(draw_below(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace syco
