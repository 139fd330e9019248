#pragma once
// Exact and asymptotic combinatorial probability: big-integer binomials, the
// hypergeometric distribution (exact pmf, exact sampling), a sub-gaussian
// tail bound, the central-binomial approximation, balance probabilities, and
// the two family-size lower bounds.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

#include "galvin/mask.hpp"
#include "galvin/rng.hpp"

namespace galvin {

using bigint = boost::multiprecision::cpp_int;
using bigrat = boost::multiprecision::cpp_rational;

// Pinned constants of the construction's tail analysis. The union-bound
// constant feeds the concentration threshold sqrt(k ln(union_bound_constant
// * d)); the balance exponent is the coefficient in the balance-probability
// asymptotic exp(-(balance_exponent/k) (R/2 - t)^2).
inline constexpr int union_bound_constant = 16;
inline constexpr double balance_exponent = 4.0;

// Exact C(n, m); 0 outside 0 <= m <= n.
inline bigint binom_exact(long long n, long long m) {
    if (m < 0 || n < 0 || m > n) return 0;
    if (m > n - m) m = n - m;
    bigint out = 1;
    for (long long i = 1; i <= m; ++i) {
        out *= bigint(n - m + i);
        out /= bigint(i);  // exact: C(n-m+i, i) is an integer
    }
    return out;
}

// Natural log of a positive big integer, accurate to double precision.
inline double log_bigint(const bigint& x) {
    if (x <= 0) throw param_error("log_bigint needs a positive integer");
    size_t bits = boost::multiprecision::msb(x) + 1;
    if (bits <= 1000) return std::log(x.convert_to<double>());
    bigint top = x >> (bits - 64);
    return std::log(top.convert_to<double>()) + double(bits - 64) * std::numbers::ln2;
}

// H(K, N, n_draw): number of successes when drawing n_draw items without
// replacement from a population of N containing K successes.
struct HypergeomParams {
    long long K = 0;
    long long N = 0;
    long long n_draw = 0;

    void validate() const {
        if (N < 0 || K < 0 || K > N || n_draw < 0 || n_draw > N)
            throw param_error("hypergeometric parameters need 0 <= K <= N and 0 <= n_draw <= N");
    }
    long long support_lo() const { return std::max(0LL, n_draw + K - N); }
    long long support_hi() const { return std::min(K, n_draw); }
};

inline bigrat hypergeom_pmf(const HypergeomParams& p, long long x) {
    p.validate();
    if (x < p.support_lo() || x > p.support_hi()) return 0;
    return bigrat(binom_exact(p.K, x) * binom_exact(p.N - p.K, p.n_draw - x), binom_exact(p.N, p.n_draw));
}

inline double hypergeom_pmf_d(const HypergeomParams& p, long long x) {
    return hypergeom_pmf(p, x).convert_to<double>();
}

// Exact draw from H(K, N, n_draw). Small populations use inverse-CDF against
// a 128-bit uniform (all integer arithmetic, no rounding); large populations
// use a draw-by-draw urn simulation, also exact.
inline long long hypergeom_sample(const HypergeomParams& p, Rng& rng) {
    p.validate();
    if (p.N <= 10000) {
        // u = (hi*2^64 + lo) / 2^128, compared against the exact CDF with the
        // common denominator C(N, n_draw) cleared.
        bigint u = (bigint(rng.next_u64()) << 64) | bigint(rng.next_u64());
        bigint threshold = u * binom_exact(p.N, p.n_draw);  // compare cum<<128 >= threshold
        long long lo = p.support_lo(), hi = p.support_hi();
        bigint term = binom_exact(p.K, lo) * binom_exact(p.N - p.K, p.n_draw - lo);
        bigint cum = term;
        for (long long x = lo; x < hi; ++x) {
            if ((cum << 128) > threshold) return x;
            term *= bigint((p.K - x) * (p.n_draw - x));
            term /= bigint((x + 1) * (p.N - p.K - p.n_draw + x + 1));  // exact on the full product
            cum += term;
        }
        return hi;
    }
    long long successes_left = p.K, pop_left = p.N, hits = 0;
    for (long long i = 0; i < p.n_draw; ++i) {
        if (rng.below(uint64_t(pop_left)) < uint64_t(successes_left)) {
            ++hits;
            --successes_left;
        }
        --pop_left;
    }
    return hits;
}

// Two-sided sub-gaussian tail bound 2 exp(-x^2 / k) for the bucket error of a
// half-size challenge set against a bucket of size 2k.
inline double hoeffding_tail_bound(double x, long long k) {
    if (x < 0 || k < 1) throw param_error("hoeffding_tail_bound needs x >= 0 and k >= 1");
    return 2.0 * std::exp(-x * x / double(k));
}

// Threshold sqrt(k ln(union_bound_constant * d)) that the per-bucket errors
// stay below with probability >= 3/4 (k = n/(2d)).
inline double concentration_threshold(int n, int d) {
    if (d < 1 || n < 2) throw param_error("concentration_threshold needs n >= 2, d >= 1");
    double k = double(n) / (2.0 * d);
    return std::sqrt(k * std::log(double(union_bound_constant) * d));
}

// Main term of the central-binomial estimate
//   C(n, n/2 - m) ~ 2^n sqrt(2/(n pi)) exp(-2 m^2 / n),
// plus its exact relative error. `value` overflows to +inf for n >~ 1020;
// `log_value` is always finite.
struct BinomApprox {
    double value = 0;
    double log_value = 0;
    double rel_error = 0;  // approx/exact - 1
};

inline BinomApprox binom_approx(long long n, long long m) {
    if (n < 2 || std::llabs(m) > n / 2) throw param_error("binom_approx needs n >= 2 and |m| <= n/2");
    BinomApprox out;
    out.log_value = double(n) * std::numbers::ln2 + 0.5 * std::log(2.0 / (double(n) * std::numbers::pi)) -
                    2.0 * double(m) * double(m) / double(n);
    out.value = std::exp(out.log_value);
    double log_exact = log_bigint(binom_exact(n, n / 2 - m));
    out.rel_error = std::expm1(out.log_value - log_exact);
    return out;
}

// Probability that a uniformly random k-subset T of a 2k-bucket with error R
// satisfies |A intersect T| = k/2 + t: the pmf of H(k+R, 2k, k) at k/2 + t.
inline bigrat balance_prob_exact(long long t, long long R, long long k) {
    if (k < 2 || k % 2 != 0) throw param_error("balance_prob_exact needs even k >= 2");
    if (std::llabs(R) > k) throw param_error("balance_prob_exact needs |R| <= k");
    HypergeomParams p{k + R, 2 * k, k};
    return hypergeom_pmf(p, k / 2 + t);
}

// Its large-k asymptotic sqrt(4/(k pi)) exp(-(4/k) (R/2 - t)^2).
inline double balance_prob_asymptotic(long long t, long long R, long long k) {
    if (k < 1) throw param_error("balance_prob_asymptotic needs k >= 1");
    double dev = double(R) / 2.0 - double(t);
    return std::sqrt(4.0 / (double(k) * std::numbers::pi)) *
           std::exp(-(balance_exponent / double(k)) * dev * dev);
}

// Counting lower bound on the size of any family with the d-partition
// property: |F| >= (C(n, n/2) / C(n/d, k)^d)^(1/(d-1)), k = n/(2d).
struct CountingBound {
    bigint base_num;   // C(n, n/2), unreduced
    bigint base_den;   // C(n/d, k)^d, unreduced
    bigrat base;       // their exact ratio
    double value = 0;  // base^(1/(d-1))
    long long ceiling = 0;
};

inline CountingBound counting_lower_bound(int n, int d) {
    if (d < 2) throw param_error("counting bound needs d >= 2");
    if (n < 2 || n % (2 * d) != 0) throw param_error("counting bound needs 2d | n");
    int k = n / (2 * d);
    CountingBound out;
    out.base_num = binom_exact(n, n / 2);
    bigint single = binom_exact(n / d, k);
    out.base_den = 1;
    for (int i = 0; i < d; ++i) out.base_den *= single;
    out.base = bigrat(out.base_num, out.base_den);
    out.value = std::exp((log_bigint(out.base_num) - log_bigint(out.base_den)) / double(d - 1));
    // Exact ceiling: smallest integer c with c^(d-1) * den >= num.
    long long c = std::max(1LL, (long long)(std::floor(out.value)) - 2);
    auto big_enough = [&](long long cand) {
        bigint pw = 1;
        for (int i = 0; i < d - 1; ++i) pw *= bigint(cand);
        return pw * out.base_den >= out.base_num;
    };
    while (!big_enough(c)) ++c;
    out.ceiling = c;
    return out;
}

// Per-element-degree lower bound d^2/2: each element must lie in >= d/2
// members, and members have n/d elements each.
inline double degree_lower_bound(int d) {
    if (d < 1) throw param_error("degree bound needs d >= 1");
    return double(d) * double(d) / 2.0;
}

// 95% Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(long long successes, long long trials) {
    if (trials < 1 || successes < 0 || successes > trials)
        throw param_error("wilson_interval needs 0 <= successes <= trials, trials >= 1");
    constexpr double z = 1.959963984540054;
    double nt = double(trials);
    double p = double(successes) / nt;
    double z2 = z * z;
    double denom = 1.0 + z2 / nt;
    double center = (p + z2 / (2.0 * nt)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)) / denom;
    double lo = center - half, hi = center + half;
    if (lo < 0 || successes == 0) lo = 0;  // center == half exactly when p = 0
    if (hi > 1 || successes == trials) hi = 1;
    return {lo, hi};
}

}  // namespace galvin
