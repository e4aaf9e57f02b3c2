#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace defplan {

// Deterministic, platform-independent RNG. std:: distributions are
// implementation-defined, so all draws go through these helpers.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        // splitmix64
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    size_t uniform_index(size_t n) {
        if (n == 0) return 0;
        return static_cast<size_t>(next_u64() % n);
    }

    // Sample k distinct indices from [0, n), order not meaningful.
    std::vector<size_t> sample_without_replacement(size_t n, size_t k) {
        std::vector<size_t> idx(n);
        for (size_t i = 0; i < n; ++i) idx[i] = i;
        if (k > n) k = n;
        for (size_t i = 0; i < k; ++i) {
            size_t j = i + uniform_index(n - i);
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        return idx;
    }

  private:
    uint64_t state_;
};

// Stable seed derivation for independent substreams.
inline uint64_t derive_seed(uint64_t base, const std::string& tag, uint64_t index = 0) {
    uint64_t h = 1469598103934665603ULL ^ base;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    h ^= index + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

}  // namespace defplan
