#pragma once
// Seeded randomness with reproducibility guarantees: every draw goes through
// hand-rolled, implementation-independent primitives (std::mt19937_64 is
// specified bit-exactly by the standard; the distributions in <random> are
// not, so they are avoided).

#include <cstdint>
#include <random>
#include <vector>

#include "galvin/mask.hpp"

namespace galvin {

// splitmix64; used only to derive independent child seeds from (master, salt)
// so that parallel units (copies, trials) get decorrelated streams whose
// values do not depend on scheduling or thread count.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t derive_seed(uint64_t master, uint64_t salt) {
    uint64_t a = mix64(master ^ 0x5851f42d4c957f2dULL);
    uint64_t b = mix64(salt + 0x14057b7ef767814fULL);
    return mix64(a ^ (b * 0x2545f4914f6cdd1dULL));
}

class Rng {
  public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // Uniform in [0, bound) by rejection; unbiased for any bound >= 1.
    uint64_t below(uint64_t bound) {
        if (bound == 0) throw param_error("below(0)");
        if (bound == 1) return 0;
        uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % bound + 1) % bound;
        for (;;) {
            uint64_t v = gen_();
            if (v <= limit) return v % bound;
        }
    }

    int below_int(int bound) { return int(below(uint64_t(bound))); }

    // Uniform in [0,1) with 53 random bits (exactly representable).
    double unit() { return double(gen_() >> 11) * 0x1.0p-53; }

    // Unbiased in-place Fisher-Yates shuffle.
    void shuffle(std::vector<int>& v) {
        for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[size_t(below(i))]);
    }

    // A uniformly random permutation of 0..n-1.
    std::vector<int> permutation(int n) {
        std::vector<int> p(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) p[size_t(i)] = i;
        shuffle(p);
        return p;
    }

    // Uniform `take`-element subset of `pool` (returned as local indices
    // 0..pool-1) by partial Fisher-Yates.
    std::vector<int> sample_indices(int pool, int take) {
        if (take < 0 || take > pool) throw param_error("sample_indices: take outside [0, pool]");
        std::vector<int> scratch(static_cast<size_t>(pool));
        for (int i = 0; i < pool; ++i) scratch[size_t(i)] = i;
        for (int i = 0; i < take; ++i) {
            int j = i + below_int(pool - i);
            std::swap(scratch[size_t(i)], scratch[size_t(j)]);
        }
        scratch.resize(size_t(take));
        return scratch;
    }

    // Uniform `take`-element submask of `pool`.
    SubsetMask sample_subset(const SubsetMask& pool, int take) {
        std::vector<int> elems = pool.elements();
        std::vector<int> idx = sample_indices(int(elems.size()), take);
        SubsetMask out = SubsetMask::empty_set(pool.universe());
        for (int i : idx) out.set(elems[size_t(i)]);
        return out;
    }

    // Uniform k-element subset of {0..n-1}.
    SubsetMask sample_k_of_n(int n, int k) {
        std::vector<int> idx = sample_indices(n, k);
        return SubsetMask::from_indices(n, idx);
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace galvin
