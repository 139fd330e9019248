#pragma once
// Bucket layouts: the partition of the ground set into consecutive intervals
// chi_0..chi_d that the randomized construction samples generators from, for
// all three build variants.

#include <string>
#include <vector>

#include "galvin/mask.hpp"

namespace galvin {

enum class Variant {
    standard,      // 2d | n, buckets (k, 2k, ..., 2k, k), members of size 2k = n/d
    mixed_large_d, // 2d | n but d too large for one level; outer buckets scaled by a unit
    indivisible,   // no divisibility assumed; members sized 2*floor(k), floor+ceil, 2*ceil(k)
    classic,       // plain half-size family; a balanced member + its complement form the witness
    composed,      // produced by stitching inner families into an outer family's members
};

inline std::string variant_name(Variant v) {
    switch (v) {
        case Variant::standard: return "standard";
        case Variant::mixed_large_d: return "mixed-large-d";
        case Variant::indivisible: return "indivisible";
        case Variant::classic: return "classic";
        case Variant::composed: return "composed";
    }
    throw param_error("unknown variant");
}

inline Variant variant_from_name(const std::string& s) {
    if (s == "standard") return Variant::standard;
    if (s == "mixed-large-d") return Variant::mixed_large_d;
    if (s == "indivisible") return Variant::indivisible;
    if (s == "classic") return Variant::classic;
    if (s == "composed") return Variant::composed;
    throw param_error("unknown variant '" + s + "'");
}

// The ground set {0..n-1} cut into d+1 consecutive buckets. `d` is the number
// of parts in a witness partition; `tau` is the generator size for interior
// buckets (the last bucket's single generator is the whole bucket, and the
// first bucket's single generator is empty).
struct BucketLayout {
    int n = 0;
    int d = 0;
    std::vector<int> offsets;  // size d+2; bucket i = [offsets[i], offsets[i+1])
    Variant variant = Variant::standard;
    int tau = 0;

    int bucket_count() const { return d + 1; }
    int bucket_size(int i) const { return offsets[size_t(i) + 1] - offsets[size_t(i)]; }

    SubsetMask bucket_mask(int i) const {
        SubsetMask m = SubsetMask::empty_set(n);
        for (int e = offsets[size_t(i)]; e < offsets[size_t(i) + 1]; ++e) m.set(e);
        return m;
    }

    // Generator size for bucket i: 0 at the front, the full bucket at the
    // back, tau in the interior.
    int generator_size(int i) const {
        if (i == 0) return 0;
        if (i == d) return bucket_size(d);
        return tau;
    }
};

inline BucketLayout layout_from_sizes(int n, const std::vector<int>& sizes, Variant v, int tau) {
    BucketLayout lay;
    lay.n = n;
    lay.d = int(sizes.size()) - 1;
    lay.variant = v;
    lay.tau = tau;
    lay.offsets.resize(sizes.size() + 1);
    lay.offsets[0] = 0;
    for (size_t i = 0; i < sizes.size(); ++i) lay.offsets[i + 1] = lay.offsets[i] + sizes[i];
    if (lay.offsets.back() != n) throw param_error("bucket sizes do not sum to n");
    return lay;
}

// Standard layout: requires 2d | n; sizes (k, 2k, ..., 2k, k) with k = n/(2d).
inline BucketLayout bucket_layout_standard(int n, int d) {
    if (d < 2) throw param_error("standard layout needs d >= 2, got " + std::to_string(d));
    if (n < 2 || n % (2 * d) != 0)
        throw param_error("standard layout needs 2d | n (n=" + std::to_string(n) + ", d=" + std::to_string(d) + ")");
    int k = n / (2 * d);
    std::vector<int> sizes(size_t(d) + 1, 2 * k);
    sizes.front() = k;
    sizes.back() = k;
    return layout_from_sizes(n, sizes, Variant::standard, k);
}

// Size bookkeeping for the non-divisible variants. In any witness partition
// the number of parts of each size is forced by (n, d):
//   f parts of size 2*k'*unit, c parts of size 2*(k'+1)*unit, and (only when
//   n is odd, unit = 1) m = 1 part of size 2k'+1 which may be imbalanced by
//   one element. f + c + m = d.
struct MixedSizePlan {
    int n = 0;
    int d = 0;
    int k_prime = 0;
    int unit = 1;  // 1 for the indivisible variant; n/(2d) for mixed-large-d
    int f = 0;
    int c = 0;
    int m = 0;
    std::vector<int> bucket_sizes;  // d+1 buckets

    std::vector<int> allowed_member_sizes() const {
        std::vector<int> out{2 * k_prime * unit};
        if (m) out.push_back(2 * k_prime + 1);
        if (c) out.push_back(2 * (k_prime + 1) * unit);
        return out;
    }
};

// Indivisible plan (unit 1): k' = floor(n/(2d)), m = n mod 2, and c large
// buckets chosen so everything sums to n. Bucket sizes, front to back:
// (k'+m, 2(k'+1) x c, 2k' x (d-1-c), k'). Large interiors come first
// (canonical deterministic order).
inline MixedSizePlan indivisible_plan(int n, int d) {
    if (d < 2) throw param_error("indivisible plan needs d >= 2");
    int kp = n / (2 * d);
    if (kp < 1)
        throw param_error("indivisible plan needs n >= 2d (n=" + std::to_string(n) + ", d=" + std::to_string(d) + ")");
    int m = n % 2;
    int rest = n - m - 2 * kp * d;  // even by construction
    int c = rest / 2;
    int f = d - m - c;
    if (c < 0 || c > d - 1 || f < 0)
        throw param_error("no feasible indivisible plan for n=" + std::to_string(n) + ", d=" + std::to_string(d));
    MixedSizePlan plan;
    plan.n = n;
    plan.d = d;
    plan.k_prime = kp;
    plan.unit = 1;
    plan.f = f;
    plan.c = c;
    plan.m = m;
    plan.bucket_sizes.assign(size_t(d) + 1, 2 * kp);
    plan.bucket_sizes.front() = kp + m;
    plan.bucket_sizes.back() = kp;
    for (int i = 1; i <= c; ++i) plan.bucket_sizes[size_t(i)] = 2 * (kp + 1);
    return plan;
}

// Mixed-large-d plan: one level of the large-d construction with outer part
// count `parts` (so witnesses have `parts` members, of sizes 2*k'*unit and
// 2*(k'+1)*unit with unit = n/(2d)); those members are later subdivided
// recursively down to size n/d.
inline MixedSizePlan mixed_plan(int n, int d, int parts) {
    if (parts < 2 || parts > d) throw param_error("mixed plan needs 2 <= parts <= d");
    if (n % (2 * d) != 0) throw param_error("mixed plan needs 2d | n");
    int unit = n / (2 * d);
    int kp = d / parts;
    int c = d - kp * parts;
    int f = parts - c;
    MixedSizePlan plan;
    plan.n = n;
    plan.d = parts;
    plan.k_prime = kp;
    plan.unit = unit;
    plan.f = f;
    plan.c = c;
    plan.m = 0;
    plan.bucket_sizes.assign(size_t(parts) + 1, 2 * kp * unit);
    plan.bucket_sizes.front() = kp * unit;
    plan.bucket_sizes.back() = kp * unit;
    for (int i = 1; i <= c; ++i) plan.bucket_sizes[size_t(i)] = 2 * (kp + 1) * unit;
    return plan;
}

// Plan lookup by variant.
inline MixedSizePlan mixed_size_plan(int n, int d, Variant variant, int parts_hint = 0) {
    if (variant == Variant::indivisible) return indivisible_plan(n, d);
    if (variant == Variant::mixed_large_d) {
        if (parts_hint < 2) throw param_error("mixed-large-d plan needs an explicit outer part count");
        return mixed_plan(n, d, parts_hint);
    }
    throw param_error("no size plan for variant " + variant_name(variant));
}

inline BucketLayout layout_from_plan(const MixedSizePlan& plan) {
    Variant v = plan.unit == 1 ? Variant::indivisible : Variant::mixed_large_d;
    return layout_from_sizes(plan.n, plan.bucket_sizes, v, plan.k_prime * plan.unit);
}

}  // namespace galvin
