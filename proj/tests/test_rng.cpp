#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "galvin/mask.hpp"
#include "galvin/rng.hpp"

using galvin::derive_seed;
using galvin::Rng;
using galvin::SubsetMask;

TEST_CASE("same seed gives the same stream") {
    Rng a(12345), b(12345);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derived seeds differ across salts and masters") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(0, 0) != 0);
    // No collisions across a window of salts (would correlate copies).
    std::map<uint64_t, uint64_t> seen;
    for (uint64_t s = 0; s < 10'000; ++s) {
        uint64_t v = derive_seed(42, s);
        CHECK(seen.emplace(v, s).second);
    }
}

TEST_CASE("below is in range and covers all residues") {
    Rng rng(7);
    std::vector<int> counts(10, 0);
    for (int i = 0; i < 10'000; ++i) {
        uint64_t v = rng.below(10);
        REQUIRE(v < 10);
        ++counts[size_t(v)];
    }
    // Each residue expected 1000 times; 5 sigma ~ 150.
    for (int c : counts) CHECK(std::abs(c - 1000) < 150);
    CHECK_THROWS_AS(rng.below(0), galvin::param_error);
    CHECK(rng.below(1) == 0);
}

TEST_CASE("permutation is a permutation") {
    Rng rng(3);
    std::vector<int> p = rng.permutation(50);
    REQUIRE(p.size() == 50);
    std::vector<char> seen(50, 0);
    for (int x : p) {
        REQUIRE(x >= 0);
        REQUIRE(x < 50);
        CHECK(!seen[size_t(x)]);
        seen[size_t(x)] = 1;
    }
}

TEST_CASE("sample_subset stays inside the pool with the right size") {
    Rng rng(11);
    SubsetMask pool = SubsetMask::from_elements(20, {2, 3, 4, 5, 11, 12, 13, 14});
    for (int trial = 0; trial < 1000; ++trial) {
        SubsetMask t = rng.sample_subset(pool, 3);
        CHECK(t.count() == 3);
        CHECK(t.subset_of(pool));
    }
    CHECK_THROWS_AS(rng.sample_subset(pool, 9), galvin::param_error);
}

TEST_CASE("subset sampling is uniform over the 6 two-subsets of a 4-bucket") {
    // 10^5 draws of a 2-subset of {2,3,4,5}: each of the 6 outcomes has
    // expectation 16666.7, sd = sqrt(1e5 * (1/6)(5/6)) ~ 118; allow 5 sigma.
    Rng rng(2024);
    SubsetMask pool = SubsetMask::from_elements(8, {2, 3, 4, 5});
    std::map<uint64_t, int> freq;
    for (int i = 0; i < 100'000; ++i) ++freq[rng.sample_subset(pool, 2).low64()];
    REQUIRE(freq.size() == 6);
    for (const auto& [bits, count] : freq) CHECK(std::abs(count - 16667) < 5 * 118);
}

TEST_CASE("sample_k_of_n edge sizes") {
    Rng rng(5);
    CHECK(rng.sample_k_of_n(12, 0).none());
    CHECK(rng.sample_k_of_n(12, 12) == SubsetMask::full_set(12));
}
