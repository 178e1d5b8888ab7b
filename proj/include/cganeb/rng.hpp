#ifndef CGANEB_RNG_HPP
#define CGANEB_RNG_HPP

#include <cstdint>
#include <stdexcept>

namespace cganeb {

// SplitMix64 stream. Substreams are derived by mixing a key into the seed,
// so per-site / per-replication streams never overlap by construction:
//   substream(seed, key) = SplitMix64(mix64(seed ^ mix64(key)))
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static std::uint64_t mix64(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Derive an independent substream keyed by `key`.
    Rng substream(std::uint64_t key) const {
        return Rng(mix64(state_ ^ mix64(key)));
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform on [0,1), 53-bit resolution
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // standard normal, Box-Muller (two uniforms per draw)
    double normal();

    // gamma(shape, scale), Marsaglia-Tsang; shape < 1 boosted via u^(1/shape)
    double gamma(double shape, double scale);

    // Poisson(lambda): inversion below 30, PTRS rejection above
    long poisson(double lambda);

private:
    std::uint64_t state_;
};

// Combine a master seed with a sequence of tags into a subseed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
    return Rng::mix64(master ^ Rng::mix64(tag));
}
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag1,
                                 std::uint64_t tag2) {
    return derive_seed(derive_seed(master, tag1), tag2);
}
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag1,
                                 std::uint64_t tag2, std::uint64_t tag3) {
    return derive_seed(derive_seed(master, tag1, tag2), tag3);
}

} // namespace cganeb

#endif
