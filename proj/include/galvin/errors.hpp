#pragma once
// Per-bucket imbalance bookkeeping: how far a challenge set A is from hitting
// exactly half of each bucket, and prefix sums of those errors under a bucket
// ordering.

#include <numeric>
#include <vector>

#include "galvin/layout.hpp"
#include "galvin/mask.hpp"

namespace galvin {

// values[i] measures |A intersect chi_i| - |chi_i|/2. When every bucket has
// even size the values are stored plainly (scale 1); as soon as any bucket is
// odd, all values are stored doubled (scale 2: 2|A intersect chi_i| - |chi_i|)
// so the arithmetic stays in integers. Signs and orderings are unaffected.
struct ErrorVector {
    std::vector<int> values;
    int scale = 1;
    SubsetMask A;

    int sum() const { return std::accumulate(values.begin(), values.end(), 0); }
};

inline ErrorVector error_terms(const SubsetMask& A, const BucketLayout& layout) {
    if (A.universe() != layout.n)
        throw param_error("dimension error: challenge set over n=" + std::to_string(A.universe()) +
                          ", layout over n=" + std::to_string(layout.n));
    bool any_odd = false;
    for (int i = 0; i <= layout.d; ++i)
        if (layout.bucket_size(i) % 2 != 0) any_odd = true;
    ErrorVector ev;
    ev.scale = any_odd ? 2 : 1;
    ev.A = A;
    ev.values.resize(size_t(layout.d) + 1);
    for (int i = 0; i <= layout.d; ++i) {
        int inter = A.intersect_count(layout.bucket_mask(i));
        int doubled = 2 * inter - layout.bucket_size(i);
        ev.values[size_t(i)] = any_odd ? doubled : doubled / 2;
    }
    return ev;
}

// R over the prefix pi[0..i] (in the vector's stored scale).
inline int prefix_error(const ErrorVector& errors, const std::vector<int>& pi, int i) {
    int d = int(errors.values.size()) - 1;
    if (int(pi.size()) != d + 1) throw param_error("ordering length does not match bucket count");
    if (i < 0 || i > d) throw param_error("prefix index out of range");
    std::vector<char> seen(size_t(d) + 1, 0);
    for (int v : pi) {
        if (v < 0 || v > d || seen[size_t(v)]) throw param_error("ordering is not a permutation of 0..d");
        seen[size_t(v)] = 1;
    }
    int s = 0;
    for (int j = 0; j <= i; ++j) s += errors.values[size_t(pi[size_t(j)])];
    return s;
}

}  // namespace galvin
