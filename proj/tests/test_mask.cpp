#include <algorithm>
#include <vector>

#include "doctest.h"
#include "galvin/mask.hpp"
#include "galvin/rng.hpp"

using galvin::param_error;
using galvin::Rng;
using galvin::SubsetMask;

TEST_CASE("ground set bounds") {
    CHECK_THROWS_AS(galvin::GroundSet(1), param_error);
    CHECK_THROWS_AS(galvin::GroundSet(0), param_error);
    CHECK_THROWS_AS(galvin::GroundSet(-3), param_error);
    CHECK(galvin::GroundSet(2).n == 2);
}

TEST_CASE("factories and element access") {
    SubsetMask e = SubsetMask::empty_set(10);
    CHECK(e.count() == 0);
    CHECK(e.none());
    SubsetMask f = SubsetMask::full_set(10);
    CHECK(f.count() == 10);
    SubsetMask m = SubsetMask::from_elements(10, {0, 3, 9});
    CHECK(m.count() == 3);
    CHECK(m.test(0));
    CHECK(m.test(3));
    CHECK(m.test(9));
    CHECK_FALSE(m.test(1));
    CHECK(m.elements() == std::vector<int>{0, 3, 9});
    CHECK(m.lowest() == 0);
    CHECK(SubsetMask::from_elements(10, {7}).lowest() == 7);
}

TEST_CASE("out-of-range elements rejected") {
    SubsetMask m = SubsetMask::empty_set(10);
    CHECK_THROWS_AS(m.set(10), param_error);
    CHECK_THROWS_AS(m.set(-1), param_error);
    CHECK_THROWS_AS((void)m.test(10), param_error);
    CHECK_THROWS_AS(SubsetMask::from_elements(4, {4}), param_error);
}

TEST_CASE("multi-word masks") {
    SubsetMask m = SubsetMask::from_elements(130, {0, 63, 64, 127, 128, 129});
    CHECK(m.count() == 6);
    CHECK(m.universe() == 130);
    SubsetMask c = m.comp();
    CHECK(c.count() == 124);
    CHECK((m & c).none());
    CHECK((m | c) == SubsetMask::full_set(130));
    CHECK(m.elements() == std::vector<int>{0, 63, 64, 127, 128, 129});
}

TEST_CASE("complement stays within the ground set") {
    // The tail bits of the last word must never leak into counts.
    for (int n : {2, 5, 63, 64, 65, 100}) {
        SubsetMask e = SubsetMask::empty_set(n);
        CHECK(e.comp().count() == n);
        CHECK(e.comp() == SubsetMask::full_set(n));
    }
}

TEST_CASE("popcount algebra |X u Y| + |X n Y| = |X| + |Y|") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 2 + int(rng.below(120));
        SubsetMask x = rng.sample_k_of_n(n, int(rng.below(uint64_t(n + 1))));
        SubsetMask y = rng.sample_k_of_n(n, int(rng.below(uint64_t(n + 1))));
        CHECK((x | y).count() + (x & y).count() == x.count() + y.count());
        CHECK(x.intersect_count(y) == (x & y).count());
        CHECK(x.minus(y) == (x & y.comp()));
        CHECK((x ^ y).count() == (x | y).count() - (x & y).count());
    }
}

TEST_CASE("dimension mismatches rejected") {
    SubsetMask a = SubsetMask::empty_set(8);
    SubsetMask b = SubsetMask::empty_set(9);
    CHECK_THROWS_AS((void)(a | b), param_error);
    CHECK_THROWS_AS((void)(a & b), param_error);
    CHECK_THROWS_AS((void)a.intersect_count(b), param_error);
    CHECK_THROWS_AS((void)a.subset_of(b), param_error);
}

TEST_CASE("subset and intersection predicates") {
    SubsetMask a = SubsetMask::from_elements(12, {1, 2, 3});
    SubsetMask b = SubsetMask::from_elements(12, {1, 2, 3, 7});
    SubsetMask c = SubsetMask::from_elements(12, {8, 9});
    CHECK(a.subset_of(b));
    CHECK_FALSE(b.subset_of(a));
    CHECK(a.intersects(b));
    CHECK_FALSE(a.intersects(c));
}

TEST_CASE("ordering is a strict total order consistent with equality") {
    std::vector<SubsetMask> sets;
    for (uint64_t bits = 0; bits < 32; ++bits) sets.push_back(SubsetMask::from_u64(5, bits));
    std::sort(sets.begin(), sets.end());
    for (size_t i = 0; i + 1 < sets.size(); ++i) {
        CHECK(sets[i] < sets[i + 1]);
        CHECK_FALSE(sets[i + 1] < sets[i]);
        CHECK(sets[i] != sets[i + 1]);
    }
}

TEST_CASE("from_u64 round-trips through low64") {
    SubsetMask m = SubsetMask::from_u64(20, 0xA937ull);
    CHECK(m.low64() == 0xA937ull);
    CHECK_THROWS_AS(SubsetMask::from_u64(4, 0x10ull), param_error);
}
