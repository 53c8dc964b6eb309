#pragma once

#include <cstdint>
#include <random>

namespace logitac {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seeded uniform generator. Draws go through an explicit 53-bit path because
// std::uniform_real_distribution is implementation-defined and would break
// cross-platform reproducibility of runs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    std::uint64_t next_u64() { return engine_(); }

    // Seed for the k-th derived stream of a master seed. Streams must not
    // depend on how many other streams exist.
    static std::uint64_t derive_seed(std::uint64_t master, std::uint64_t k) {
        return splitmix64(master ^ splitmix64(k + 1));
    }

    bool operator==(const Rng& other) const = default;

private:
    std::mt19937_64 engine_;
};

}  // namespace logitac
