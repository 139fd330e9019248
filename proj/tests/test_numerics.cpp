#include <cmath>
#include <vector>

#include "doctest.h"
#include "galvin/numerics.hpp"
#include "galvin/rng.hpp"

using galvin::bigint;
using galvin::bigrat;
using galvin::binom_approx;
using galvin::binom_exact;
using galvin::HypergeomParams;
using galvin::param_error;
using galvin::Rng;

TEST_CASE("exact binomials match a Pascal triangle") {
    CHECK(binom_exact(4, 2) == 6);
    CHECK(binom_exact(8, 4) == 70);
    for (long long n = 0; n <= 40; ++n) CHECK(binom_exact(n, 0) == 1);
    // Full triangle up to n=40 as an independent oracle.
    std::vector<std::vector<bigint>> pascal(41);
    for (int n = 0; n <= 40; ++n) {
        pascal[size_t(n)].assign(size_t(n) + 1, 1);
        for (int m = 1; m < n; ++m)
            pascal[size_t(n)][size_t(m)] = pascal[size_t(n) - 1][size_t(m) - 1] + pascal[size_t(n) - 1][size_t(m)];
        for (int m = 0; m <= n; ++m) CHECK(binom_exact(n, m) == pascal[size_t(n)][size_t(m)]);
    }
    CHECK(binom_exact(10, -1) == 0);
    CHECK(binom_exact(10, 11) == 0);
}

TEST_CASE("hypergeometric pmf exact values") {
    CHECK(galvin::hypergeom_pmf(HypergeomParams{2, 4, 2}, 1) == bigrat(2, 3));
    CHECK(galvin::hypergeom_pmf(HypergeomParams{5, 9, 0}, 0) == 1);
    CHECK(galvin::hypergeom_pmf(HypergeomParams{2, 4, 2}, 3) == 0);
    bigrat total = 0;
    HypergeomParams p{4, 8, 4};
    for (long long x = 0; x <= 4; ++x) total += galvin::hypergeom_pmf(p, x);
    CHECK(total == 1);
    CHECK_THROWS_AS(galvin::hypergeom_pmf(HypergeomParams{5, 4, 2}, 1), param_error);
}

TEST_CASE("hypergeometric sampling degenerate cases") {
    Rng rng(31);
    for (int i = 0; i < 50; ++i) {
        CHECK(galvin::hypergeom_sample(HypergeomParams{0, 12, 5}, rng) == 0);
        CHECK(galvin::hypergeom_sample(HypergeomParams{12, 12, 5}, rng) == 5);
    }
}

TEST_CASE("hypergeometric sampling frequency (inverse-CDF path)") {
    // H(2,4,2): P(X=1) = 2/3. 1e5 draws, sd = sqrt(1e5 * (2/3)(1/3)) ~ 149.
    Rng rng(32);
    int ones = 0;
    for (int i = 0; i < 100'000; ++i) ones += galvin::hypergeom_sample(HypergeomParams{2, 4, 2}, rng) == 1;
    CHECK(std::abs(ones - 66667) < 3 * 149);
}

TEST_CASE("hypergeometric sampling frequency (urn path, N > 10^4)") {
    // H(10001, 20002, 2): P(X=1) = 2 * 10001^2 / (20002 * 20001) ~ 0.50005.
    Rng rng(33);
    int ones = 0;
    const int trials = 40'000;
    for (int i = 0; i < trials; ++i) ones += galvin::hypergeom_sample(HypergeomParams{10001, 20002, 2}, rng) == 1;
    // sd = sqrt(4e4 * 1/4) = 100; allow 4 sigma.
    CHECK(std::abs(ones - 20002) < 400);
}

TEST_CASE("sampling frequencies match the exact pmf on H(6,12,6)") {
    HypergeomParams p{6, 12, 6};
    Rng rng(34);
    std::vector<int> freq(7, 0);
    const int trials = 60'000;
    for (int i = 0; i < trials; ++i) ++freq[size_t(galvin::hypergeom_sample(p, rng))];
    for (long long x = 0; x <= 6; ++x) {
        double expected = galvin::hypergeom_pmf_d(p, x) * trials;
        double sd = std::sqrt(expected * (1.0 - galvin::hypergeom_pmf_d(p, x)));
        CHECK(std::abs(freq[size_t(x)] - expected) <= 4 * sd + 1);
    }
}

TEST_CASE("tail bound values") {
    CHECK(galvin::hoeffding_tail_bound(0, 7) == 2.0);
    CHECK(galvin::hoeffding_tail_bound(std::sqrt(9.0), 9) == doctest::Approx(2.0 / std::exp(1.0)));
    // x = sqrt(k ln(16 d)) with d=4 gives exactly 2/(16*4).
    double x = std::sqrt(25.0 * std::log(16.0 * 4.0));
    CHECK(galvin::hoeffding_tail_bound(x, 25) == doctest::Approx(0.03125));
    CHECK_THROWS_AS(galvin::hoeffding_tail_bound(-1.0, 5), param_error);
}

TEST_CASE("threshold constant wiring") {
    CHECK(galvin::union_bound_constant == 16);
    CHECK(galvin::balance_exponent == 4.0);
    CHECK(galvin::concentration_threshold(80, 10) == doctest::Approx(std::sqrt(4.0 * std::log(160.0))));
}

TEST_CASE("central binomial estimate at n=100") {
    galvin::BinomApprox ba = binom_approx(100, 0);
    CHECK(ba.value == doctest::Approx(1.0115e29).epsilon(0.001));
    CHECK(ba.rel_error == doctest::Approx(0.0025).epsilon(0.2));
    // Symmetric in m.
    CHECK(binom_approx(100, 7).value == binom_approx(100, -7).value);
    // Error shrinks with n at fixed m.
    CHECK(std::abs(binom_approx(400, 10).rel_error) < std::abs(binom_approx(100, 10).rel_error));
}

TEST_CASE("log of big integers") {
    bigint big = bigint(1) << 100;
    CHECK(galvin::log_bigint(big) == doctest::Approx(100.0 * std::log(2.0)).epsilon(1e-12));
    // Against a digit-free oracle: log C(1600,800) = sum log((800+i)/i).
    double expect = 0;
    for (int i = 1; i <= 800; ++i) expect += std::log((800.0 + i) / i);
    CHECK(galvin::log_bigint(binom_exact(1600, 800)) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("balance probability exact values") {
    CHECK(galvin::balance_prob_exact(0, 0, 2) == bigrat(2, 3));
    CHECK(galvin::balance_prob_exact(2, 0, 2) == 0);  // outside the support
    CHECK_THROWS_AS(galvin::balance_prob_exact(0, 0, 3), param_error);
    CHECK_THROWS_AS(galvin::balance_prob_exact(0, 5, 4), param_error);
}

TEST_CASE("balance probability symmetry exact(t,R,k) = exact(-t,-R,k)") {
    for (long long k : {2, 4, 10, 16})
        for (long long R = -k; R <= k; R += 2)
            for (long long t = -3; t <= 3; ++t)
                CHECK(galvin::balance_prob_exact(t, R, k) == galvin::balance_prob_exact(-t, -R, k));
}

TEST_CASE("balance asymptotic agrees with exact") {
    CHECK(galvin::balance_prob_asymptotic(0, 0, 2) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)));
    CHECK(galvin::balance_prob_asymptotic(3, 6, 64) == doctest::Approx(std::sqrt(4.0 / (64.0 * std::numbers::pi))));
    double exact50 = galvin::balance_prob_exact(0, 0, 50).convert_to<double>();
    CHECK(std::abs(galvin::balance_prob_asymptotic(0, 0, 50) / exact50 - 1.0) < 0.05);
    double exact100 = galvin::balance_prob_exact(2, 0, 100).convert_to<double>();
    double ratio = exact100 / galvin::balance_prob_asymptotic(2, 0, 100);
    CHECK(ratio > 0.9);
    CHECK(ratio < 1.1);
}

TEST_CASE("counting lower bound exact cases") {
    galvin::CountingBound b82 = galvin::counting_lower_bound(8, 2);
    CHECK(b82.base_num == 70);
    CHECK(b82.base_den == 36);
    CHECK(b82.base == bigrat(70, 36));
    CHECK(b82.value == doctest::Approx(70.0 / 36.0));
    CHECK(b82.ceiling == 2);

    galvin::CountingBound b42 = galvin::counting_lower_bound(4, 2);
    CHECK(b42.base == bigrat(6, 4));
    CHECK(b42.value == doctest::Approx(1.5));
    CHECK(b42.ceiling == 2);

    CHECK_THROWS_AS(galvin::counting_lower_bound(10, 3), param_error);
}

TEST_CASE("counting bound is at least 1 on a grid") {
    for (int d = 2; d <= 8; ++d)
        for (int k = 1; k <= 4; ++k) {
            int n = 2 * d * k;
            galvin::CountingBound b = galvin::counting_lower_bound(n, d);
            CHECK(b.value >= 1.0);
            CHECK(b.ceiling >= 1);
            // The ceiling really is the least integer c with c^(d-1) >= base.
            bigint pow_c = 1, pow_cm1 = 1;
            for (int i = 0; i < d - 1; ++i) {
                pow_c *= bigint(b.ceiling);
                pow_cm1 *= bigint(b.ceiling - 1);
            }
            CHECK(bigrat(pow_c) >= b.base);
            if (b.ceiling > 1) CHECK(bigrat(pow_cm1) < b.base);
        }
}

TEST_CASE("degree lower bound") {
    CHECK(galvin::degree_lower_bound(6) == 18.0);
    CHECK(galvin::degree_lower_bound(2) == 2.0);
    CHECK(galvin::degree_lower_bound(11) == 60.5);
}

TEST_CASE("bound comparison across the d range at n = 10^4") {
    // The counting bound beats the degree bound for small d and loses for
    // larger d; the crossover for n = 10^4 sits between d = 5 and d = 10.
    int n = 10'000;
    double c5 = galvin::counting_lower_bound(n, 5).value;
    double c10 = galvin::counting_lower_bound(n, 10).value;
    double c100 = galvin::counting_lower_bound(n, 100).value;
    CHECK(c5 > galvin::degree_lower_bound(5));
    CHECK(c10 < galvin::degree_lower_bound(10));
    CHECK(c100 < galvin::degree_lower_bound(100));
}

TEST_CASE("wilson interval basic shape") {
    auto [lo, hi] = galvin::wilson_interval(926, 1000);
    CHECK(lo == doctest::Approx(0.90827).epsilon(1e-3));
    CHECK(hi == doctest::Approx(0.94083).epsilon(1e-3));
    CHECK(lo < 0.926);
    CHECK(hi > 0.926);
    auto [lo0, hi0] = galvin::wilson_interval(0, 50);
    CHECK(lo0 == 0.0);
    CHECK(hi0 > 0.0);
    auto [loall, hiall] = galvin::wilson_interval(50, 50);
    CHECK(hiall == 1.0);
    CHECK(loall < 1.0);
}
