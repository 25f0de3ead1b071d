#pragma once
#include <cstdint>

// Counter-based generator: draw i is a pure function of (seed, stream, i),
// so parallel consumers can index disjoint draws without shared state and
// results cannot depend on thread scheduling.

namespace expdd {

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix64(seed + 0x9e3779b97f4a7c15ULL * (stream + 1))) {}

    std::uint64_t u64(std::uint64_t idx) const {
        return mix64(key_ + (idx + 1) * 0x9e3779b97f4a7c15ULL);
    }

    // [0, 1), 53-bit
    double unit(std::uint64_t idx) const {
        return static_cast<double>(u64(idx) >> 11) * 0x1.0p-53;
    }

    double range(std::uint64_t idx, double lo, double hi) const {
        return lo + (hi - lo) * unit(idx);
    }

    // [0, n)
    std::uint64_t below(std::uint64_t idx, std::uint64_t n) const {
        return u64(idx) % n;
    }

  private:
    std::uint64_t key_;
};

}  // namespace expdd
