#include "syco/rng.hpp"

namespace syco {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t hash_mix(std::uint64_t seed, std::string_view part) {
    std::uint64_t h = fnv1a64(part, seed);
    // Separator byte keeps ("ab","c") distinct from ("a","bc").
    h ^= 0x1f;
    h *= kFnvPrime;
    return h;
}

std::uint64_t hash_mix(std::uint64_t seed, std::uint64_t part) {
    std::uint64_t h = seed;
    for (int i = 0; i < 8; ++i) {
        h ^= (part >> (8 * i)) & 0xff;
        h *= kFnvPrime;
    }
    h ^= 0x1f;
    h *= kFnvPrime;
    return h;
}

std::mt19937_64 make_engine(std::uint64_t seed) {
    // Expand through splitmix64 so adjacent seeds give unrelated streams.
    std::uint64_t s = seed;
    std::seed_seq seq{splitmix64(s), splitmix64(s), splitmix64(s), splitmix64(s)};
    return std::mt19937_64(seq);
}

std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

double draw_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool draw_bernoulli(std::mt19937_64& rng, double p) {
    return draw_unit(rng) < p;
}

}  // namespace syco
