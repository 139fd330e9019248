#pragma once
// Building candidate families: generator sampling, pairwise assembly,
// permuted-copy amplification, empirical calibration of the generator count,
// recursive composition, and the deterministic interval baseline.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "galvin/family.hpp"
#include "galvin/layout.hpp"
#include "galvin/mask.hpp"
#include "galvin/parallel.hpp"
#include "galvin/rng.hpp"
#include "galvin/verify.hpp"

namespace galvin {

// Calibration could not produce an estimate (no data or no observed
// successes); a parameter-level problem: raise trials or set r explicitly.
struct calibration_error : param_error {
    using param_error::param_error;
};

struct BuildConfig {
    int n = 0;
    int d = 0;
    Variant variant = Variant::standard;
    std::optional<int> r;            // generators per interior bucket; unset = calibrate
    int copies = 0;                  // permuted copies to merge; 0 = one per element
    uint64_t seed = 1;
    uint64_t calibration_trials = 2000;
    double calibration_target = 0;   // per-step success target; 0 = 1 - 1/(4d)
    int threads = 1;

    void validate() const {
        if (n < 2) throw param_error("build needs n >= 2");
        if (d < 2) throw param_error("build needs d >= 2");
        if (r && *r < 1) throw param_error("generator count r must be >= 1 (omit it to calibrate)");
        if (copies < 0) throw param_error("copies must be >= 1 (or 0 for the default)");
        if (threads < 1) throw param_error("thread count must be >= 1");
        if (calibration_target < 0 || calibration_target >= 1)
            throw param_error("calibration target must lie in (0,1)");
    }
};

inline double default_step_target(int d) { return 1.0 - 1.0 / (4.0 * d); }

// Salt space for --verify retries: attempt a > 0 rebuilds with
// derive_seed(seed, salt_verify_retry + a); attempt 0 uses the seed as given.
inline constexpr uint64_t salt_verify_retry = uint64_t(1) << 33;

// Raw assembled-member count of one copy before any deduplication:
// ordered bucket pairs (i,j), i != j, excluding the last bucket as a first
// coordinate and the first as a second, with r generators per interior
// bucket: (d-1)(d-2) r^2 + 2(d-1) r + 1.
inline uint64_t expected_pre_dedup(int d, int r) {
    uint64_t dd = uint64_t(d), rr = uint64_t(r);
    return (dd - 1) * (dd - 2) * rr * rr + 2 * (dd - 1) * rr + 1;
}

// ---------- generator sampling and pairwise assembly ----------

inline GeneratorBank sample_generators(const BucketLayout& layout, int r, Rng& rng) {
    if (r < 1) throw param_error("generator count r must be >= 1");
    GeneratorBank bank;
    bank.layout = layout;
    bank.r = r;
    bank.banks.resize(size_t(layout.d) + 1);
    bank.banks[0] = {SubsetMask::empty_set(layout.n)};
    for (int i = 1; i < layout.d; ++i) {
        SubsetMask bucket = layout.bucket_mask(i);
        bank.banks[size_t(i)].reserve(size_t(r));
        for (int h = 0; h < r; ++h) bank.banks[size_t(i)].push_back(rng.sample_subset(bucket, layout.tau));
    }
    bank.banks[size_t(layout.d)] = {layout.bucket_mask(layout.d)};
    return bank;
}

// All members (chi_i minus T_i) union T_j over ordered bucket pairs i != j.
// The last bucket never leads a pair and the first never trails one (their
// degenerate generators would produce wrong-size members otherwise).
inline GalvinFamily assemble_pair_family(const GeneratorBank& bank) {
    const BucketLayout& lay = bank.layout;
    GalvinFamily fam;
    fam.n = lay.n;
    fam.d = lay.d;
    fam.variant = lay.variant;
    uint64_t raw = 0;
    for (int i = 0; i < lay.d; ++i) {
        SubsetMask bucket_i = lay.bucket_mask(i);
        for (int j = 1; j <= lay.d; ++j) {
            if (i == j) continue;
            for (const SubsetMask& ti : bank.banks[size_t(i)])
                for (const SubsetMask& tj : bank.banks[size_t(j)]) {
                    fam.sets.push_back(bucket_i.minus(ti) | tj);
                    ++raw;
                }
        }
    }
    fam.pre_dedup = raw;
    fam.canonicalize();
    return fam;
}

// ---------- calibration of the generator count ----------

struct CalibrationResult {
    double y_hat = 0;   // empirical per-step balance probability
    int r = 0;          // ceil(ln(1/(1-target)) / y_hat), at least 1
    uint64_t steps = 0;
    uint64_t hits = 0;
};

// Estimates the probability that one uniformly sampled interior generator
// meets its chain target, pooled over random half-size challenge sets, then
// sizes the bank so a whole step fails with probability at most 1 - target.
// Each trial derives its own stream from (seed, trial), so the estimate is
// independent of thread count.
inline CalibrationResult calibrate_for_layout(const BucketLayout& lay, double target, uint64_t trials,
                                              uint64_t seed, int threads = 1) {
    if (!(target > 0 && target < 1)) throw param_error("calibration target must lie in (0,1)");
    if (trials < 1) throw calibration_error("calibration needs at least one trial");
    if (lay.d < 2) throw param_error("calibration needs d >= 2");
    int h = (lay.n + 1) / 2;
    std::vector<uint32_t> hits_by_trial(size_t(trials), 0);
    parallel_for_index(trials, threads, [&](uint64_t t) {
        Rng rng(derive_seed(seed, t));
        SubsetMask A = rng.sample_k_of_n(lay.n, h);
        std::vector<int> pi = greedy_order(adjusted_error_doubled(A, lay));
        std::vector<int> needs = chain_needs(A, lay, pi);
        uint32_t hits = 0;
        // Steps 1..d-1 draw from interior banks; the final step is forced.
        for (int j = 1; j <= lay.d - 1; ++j) {
            SubsetMask t_sample = rng.sample_subset(lay.bucket_mask(pi[size_t(j)]), lay.tau);
            if (A.intersect_count(t_sample) == needs[size_t(j)]) ++hits;
        }
        hits_by_trial[size_t(t)] = hits;
    });
    CalibrationResult out;
    out.steps = trials * uint64_t(lay.d - 1);
    for (uint64_t t = 0; t < trials; ++t) out.hits += hits_by_trial[size_t(t)];
    if (out.hits == 0)
        throw calibration_error("calibration observed no successful balance steps; raise trials or set r explicitly");
    out.y_hat = double(out.hits) / double(out.steps);
    out.r = std::max(1, int(std::ceil(std::log(1.0 / (1.0 - target)) / out.y_hat)));
    return out;
}

// Calibration front door over the standard layout; consumes one seed draw from rng.
inline int calibrate_generator_count(int n, int d, double target_step_success, uint64_t trials, Rng& rng) {
    return calibrate_for_layout(bucket_layout_standard(n, d), target_step_success, trials, rng.next_u64()).r;
}

// ---------- single-family and amplified builds ----------

namespace detail {
inline BucketLayout resolve_layout(const BuildConfig& cfg, std::optional<MixedSizePlan>& plan_out) {
    switch (cfg.variant) {
        case Variant::standard:
            plan_out.reset();
            return bucket_layout_standard(cfg.n, cfg.d);
        case Variant::indivisible: {
            MixedSizePlan plan = indivisible_plan(cfg.n, cfg.d);
            plan_out = plan;
            return layout_from_plan(plan);
        }
        default:
            throw param_error("direct builds support the standard and indivisible variants only");
    }
}

inline int resolve_r(const BuildConfig& cfg, const BucketLayout& lay, uint64_t calib_seed) {
    if (cfg.r) return *cfg.r;
    double target = cfg.calibration_target > 0 ? cfg.calibration_target : default_step_target(lay.d);
    return calibrate_for_layout(lay, target, cfg.calibration_trials, calib_seed, cfg.threads).r;
}
}  // namespace detail

// One layout + one sampled bank + the pairwise assembly, with the bank kept
// for the structured verifier (identity permutation).
inline GalvinFamily build_single_family(const BuildConfig& cfg, Rng& rng) {
    cfg.validate();
    std::optional<MixedSizePlan> plan;
    BucketLayout lay = detail::resolve_layout(cfg, plan);
    int r = cfg.r ? *cfg.r : detail::resolve_r(cfg, lay, rng.next_u64());
    GeneratorBank bank = sample_generators(lay, r, rng);
    GalvinFamily fam = assemble_pair_family(bank);
    fam.seed = cfg.seed;
    fam.copies = 1;
    fam.plan = plan;
    std::vector<int> identity(size_t(cfg.n));
    for (int i = 0; i < cfg.n; ++i) identity[size_t(i)] = i;
    fam.provenance.push_back(CopyProvenance{identity, std::move(bank)});
    return fam;
}

namespace detail {

inline constexpr uint64_t salt_calibration = 0;
inline constexpr uint64_t salt_inner_base = uint64_t(1) << 32;

// The permuted-union amplification: `copies` independently sampled banks and
// permutations, each copy's stream derived from (seed, copy index); members
// merged into canonical sorted order so the result is identical at any
// thread count.
inline GalvinFamily amplified_build(const BuildConfig& cfg, const BucketLayout& lay,
                                    const std::optional<MixedSizePlan>& plan) {
    int copies = cfg.copies > 0 ? cfg.copies : cfg.n;
    int r = resolve_r(cfg, lay, derive_seed(cfg.seed, salt_calibration));
    struct CopyOut {
        CopyProvenance prov;
        std::vector<SubsetMask> sets;
        uint64_t raw = 0;
    };
    std::vector<CopyOut> outs(static_cast<size_t>(copies));
    parallel_for_index(uint64_t(copies), cfg.threads, [&](uint64_t c) {
        Rng rng(derive_seed(cfg.seed, c + 1));
        GeneratorBank bank = sample_generators(lay, r, rng);
        std::vector<int> perm = rng.permutation(lay.n);
        GalvinFamily local = assemble_pair_family(bank);
        CopyOut& out = outs[size_t(c)];
        out.raw = local.pre_dedup;
        out.sets.reserve(local.sets.size());
        for (const SubsetMask& s : local.sets) out.sets.push_back(permute_mask(s, perm));
        out.prov = CopyProvenance{std::move(perm), std::move(bank)};
    });
    GalvinFamily fam;
    fam.n = lay.n;
    fam.d = lay.d;
    fam.variant = lay.variant;
    fam.seed = cfg.seed;
    fam.copies = copies;
    fam.plan = plan;
    for (CopyOut& out : outs) {
        fam.pre_dedup += out.raw;
        fam.sets.insert(fam.sets.end(), out.sets.begin(), out.sets.end());
        fam.provenance.push_back(std::move(out.prov));
    }
    fam.canonicalize();
    return fam;
}

}  // namespace detail

// ---------- composition ----------

// Stitches an inner family into each member of `outer`: inner_builder(m, i)
// must produce a family over a ground set of size m for outer member index i;
// its members are relabeled into the outer member through the
// order-preserving bijection. All inner member sizes must agree, giving the
// composed family's uniform member size (and hence its part count d).
template <class InnerBuilder>
GalvinFamily compose_families(const GalvinFamily& outer, InnerBuilder&& inner_builder) {
    if (outer.sets.empty()) throw param_error("composition needs a nonempty outer family");
    GalvinFamily out;
    out.n = outer.n;
    out.variant = Variant::composed;
    out.seed = outer.seed;
    out.copies = outer.copies;
    int member_size = -1;
    for (size_t s = 0; s < outer.sets.size(); ++s) {
        const SubsetMask& outer_member = outer.sets[s];
        std::vector<int> elems = outer_member.elements();
        GalvinFamily inner = inner_builder(int(elems.size()), int(s));
        if (inner.n != int(elems.size()))
            throw param_error("inner family ground set does not match the outer member size");
        for (const SubsetMask& m : inner.sets) {
            if (member_size < 0)
                member_size = m.count();
            else if (m.count() != member_size)
                throw param_error("composition needs uniform inner member sizes");
            SubsetMask relabeled = SubsetMask::empty_set(outer.n);
            m.for_each_bit([&](int x) { relabeled.set(elems[size_t(x)]); });
            out.sets.push_back(relabeled);
            ++out.pre_dedup;
        }
    }
    if (member_size <= 0 || outer.n % member_size != 0)
        throw param_error("composed member size must divide the ground set size");
    out.d = outer.n / member_size;
    out.canonicalize();
    return out;
}

// ---------- interval baselines ----------

// The n/2 half-size windows S_i = {i, ..., i + n/2 - 1}. Every half-size A is
// balanced on some window, so (S, complement) witnesses the two-part
// property; complements are not themselves members (classic semantics).
inline GalvinFamily interval_galvin(int n) {
    if (n < 4 || n % 4 != 0) throw param_error("interval family needs 4 | n");
    GalvinFamily fam;
    fam.n = n;
    fam.d = 2;
    fam.variant = Variant::classic;
    fam.seed = 0;
    fam.copies = 1;
    for (int i = 0; i < n / 2; ++i) {
        SubsetMask s = SubsetMask::empty_set(n);
        for (int e = i; e < i + n / 2; ++e) s.set(e);
        fam.sets.push_back(s);
    }
    fam.pre_dedup = uint64_t(n) / 2;
    fam.canonicalize();
    return fam;
}

// Windows plus their complements: a two-part family whose witnesses are
// genuine member pairs, suitable as a composition building block.
inline GalvinFamily interval_family_with_complements(int n) {
    GalvinFamily fam = interval_galvin(n);
    std::vector<SubsetMask> comps;
    comps.reserve(fam.sets.size());
    for (const SubsetMask& s : fam.sets) comps.push_back(s.comp());
    fam.sets.insert(fam.sets.end(), comps.begin(), comps.end());
    fam.variant = Variant::standard;
    fam.pre_dedup = uint64_t(n);
    fam.canonicalize();
    return fam;
}

// ---------- the large-d recursion ----------

// One level of the construction tops out around n/(ln n)^3 parts; beyond
// that, families are composed recursively.
inline int large_d_threshold(int n) {
    double t = double(n) / std::pow(std::log(double(n)), 3.0);
    return std::max(2, int(std::floor(t)));
}

namespace detail {

inline GalvinFamily identity_family(int n, uint64_t seed) {
    GalvinFamily fam;
    fam.n = n;
    fam.d = 1;
    fam.variant = Variant::composed;
    fam.seed = seed;
    fam.copies = 1;
    fam.sets.push_back(SubsetMask::full_set(n));
    fam.pre_dedup = 1;
    return fam;
}

inline GalvinFamily build_large_d(int n, int d, const BuildConfig& base, uint64_t seed) {
    if (d == 1) return identity_family(n, seed);
    if (n % (2 * d) != 0)
        throw param_error("mixed-large-d build needs 2d | n; use the indivisible variant instead");
    int threshold = large_d_threshold(n);
    BuildConfig sub = base;
    sub.n = n;
    sub.seed = seed;
    sub.variant = Variant::standard;
    if (d <= threshold) {
        sub.d = d;
        return amplified_build(sub, bucket_layout_standard(n, d), std::nullopt);
    }
    // Prefer a clean factor split: outer dd-part standard family, inner
    // (d/dd)-part families built recursively inside each member.
    for (int dd = std::min(threshold, d - 1); dd >= 2; --dd) {
        if (d % dd != 0 || n % (2 * dd) != 0) continue;
        sub.d = dd;
        GalvinFamily outer = amplified_build(sub, bucket_layout_standard(n, dd), std::nullopt);
        GalvinFamily composed = compose_families(outer, [&](int inner_n, int idx) {
            return build_large_d(inner_n, d / dd, base, derive_seed(seed, salt_inner_base + uint64_t(idx)));
        });
        composed.variant = Variant::mixed_large_d;
        return composed;
    }
    // No usable factor: one mixed-size level (members of sizes 2k'u and
    // 2(k'+1)u), then recurse into each member.
    int parts = std::min(threshold, d - 1);
    MixedSizePlan plan = mixed_plan(n, d, parts);
    sub.d = parts;
    GalvinFamily outer = amplified_build(sub, layout_from_plan(plan), plan);
    int unit = plan.unit;
    GalvinFamily composed = compose_families(outer, [&](int inner_n, int idx) {
        return build_large_d(inner_n, inner_n / (2 * unit), base, derive_seed(seed, salt_inner_base + uint64_t(idx)));
    });
    composed.variant = Variant::mixed_large_d;
    return composed;
}

}  // namespace detail

// Master build driver: permuted-union amplification for the standard and
// indivisible variants, the recursive composition for mixed-large-d.
inline GalvinFamily build_galvin(const BuildConfig& cfg) {
    cfg.validate();
    switch (cfg.variant) {
        case Variant::standard:
            return detail::amplified_build(cfg, bucket_layout_standard(cfg.n, cfg.d), std::nullopt);
        case Variant::indivisible: {
            MixedSizePlan plan = indivisible_plan(cfg.n, cfg.d);
            return detail::amplified_build(cfg, layout_from_plan(plan), plan);
        }
        case Variant::mixed_large_d:
            return detail::build_large_d(cfg.n, cfg.d, cfg, cfg.seed);
        default:
            throw param_error("build_galvin supports the standard, indivisible, and mixed-large-d variants");
    }
}

}  // namespace galvin
