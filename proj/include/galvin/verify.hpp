#pragma once
// Deciding and witnessing the partition-handling property: the greedy bucket
// ordering, the sequential chain search over generator banks, an exact
// budgeted backtracking oracle, exhaustive checking, and Monte Carlo
// estimation, plus structural validation of witnesses and the degree
// necessary condition.

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "galvin/errors.hpp"
#include "galvin/family.hpp"
#include "galvin/layout.hpp"
#include "galvin/mask.hpp"
#include "galvin/numerics.hpp"
#include "galvin/parallel.hpp"
#include "galvin/rng.hpp"

namespace galvin {

// ---------- permutation plumbing ----------

// Applies an element relabeling: bit x of `m` becomes bit perm[x].
inline SubsetMask permute_mask(const SubsetMask& m, const std::vector<int>& perm) {
    SubsetMask out = SubsetMask::empty_set(m.universe());
    m.for_each_bit([&](int x) { out.set(perm[size_t(x)]); });
    return out;
}

// Pullback through the relabeling: bit x of the result is bit perm[x] of `m`.
inline SubsetMask unpermute_mask(const SubsetMask& m, const std::vector<int>& perm) {
    SubsetMask out = SubsetMask::empty_set(m.universe());
    for (int x = 0; x < m.universe(); ++x)
        if (m.test(perm[size_t(x)])) out.set(x);
    return out;
}

// ---------- greedy bucket ordering ----------

// Core greedy: first and last buckets pinned, every interior pick opposes the
// sign of the running prefix (smallest-index tie-break), which keeps
// max |prefix| <= max |value| whenever the values sum to zero.
inline std::vector<int> greedy_order(const std::vector<int>& values) {
    int d = int(values.size()) - 1;
    if (d < 1) throw param_error("greedy order needs at least two buckets");
    std::vector<int> pi;
    pi.reserve(size_t(d) + 1);
    pi.push_back(0);
    std::vector<char> used(size_t(d) + 1, 0);
    used[0] = 1;
    used[size_t(d)] = 1;
    long long prefix = values[0];
    for (int step = 1; step <= d - 1; ++step) {
        int pick = -1;
        auto first_where = [&](auto pred) {
            for (int e = 1; e < d; ++e)
                if (!used[size_t(e)] && pred(values[size_t(e)])) return e;
            return -1;
        };
        if (prefix > 0) {
            pick = first_where([](int v) { return v < 0; });
            if (pick < 0) pick = first_where([](int v) { return v == 0; });
        } else if (prefix < 0) {
            pick = first_where([](int v) { return v > 0; });
            if (pick < 0) pick = first_where([](int v) { return v == 0; });
        }
        if (pick < 0) pick = first_where([](int) { return true; });
        pi.push_back(pick);
        used[size_t(pick)] = 1;
        prefix += values[size_t(pick)];
    }
    pi.push_back(d);
    return pi;
}

// Public form over an ErrorVector; requires the zero-sum precondition a
// half-size challenge set guarantees.
inline std::vector<int> greedy_pi(const ErrorVector& errors) {
    if (errors.sum() != 0)
        throw param_error("greedy ordering needs error values summing to zero (half-size challenge set)");
    return greedy_order(errors.values);
}

// Doubled-scale error values adjusted so they always sum to zero: for an odd
// ground set the one-element surplus of the challenge set is attributed to
// the front bucket, whose pair-part is exactly the one allowed to carry a +1
// imbalance.
inline std::vector<int> adjusted_error_doubled(const SubsetMask& A, const BucketLayout& lay) {
    std::vector<int> vals(size_t(lay.d) + 1);
    for (int i = 0; i <= lay.d; ++i)
        vals[size_t(i)] = 2 * A.intersect_count(lay.bucket_mask(i)) - lay.bucket_size(i);
    vals[0] -= 2 * A.count() - lay.n;
    return vals;
}

// ---------- sequential chain search ----------

// Required generator overlaps |A intersect T_{pi(j)}| for steps j = 1..d.
// Fully determined by (A, layout, pi): part j has size
//   s_j = |chi_{pi(j-1)}| - gen(pi(j-1)) + gen(pi(j)),
// its balance target is ceil(s_j / 2) elements of A, and the recurrence
//   need_j = target_j - |A intersect chi_{pi(j-1)}| + need_{j-1}
// carries the previous step's overlap forward.
inline std::vector<int> chain_needs(const SubsetMask& A, const BucketLayout& lay, const std::vector<int>& pi) {
    std::vector<int> inter(size_t(lay.d) + 1);
    for (int i = 0; i <= lay.d; ++i) inter[size_t(i)] = A.intersect_count(lay.bucket_mask(i));
    std::vector<int> needs(size_t(lay.d) + 1, 0);
    int carry = 0;
    for (int j = 1; j <= lay.d; ++j) {
        int bi = pi[size_t(j) - 1], bj = pi[size_t(j)];
        int s = lay.bucket_size(bi) - lay.generator_size(bi) + lay.generator_size(bj);
        int target = (s + (s & 1)) / 2;
        carry = target - inter[size_t(bi)] + carry;
        needs[size_t(j)] = carry;
    }
    return needs;
}

namespace detail {
// Puts the (at most one) odd-size part last and fills in balances.
inline PartitionWitness finish_witness(const SubsetMask& A, std::vector<SubsetMask> parts) {
    for (size_t i = 0; i + 1 < parts.size(); ++i)
        if (parts[i].count() % 2 != 0) {
            SubsetMask odd = parts[i];
            parts.erase(parts.begin() + long(i));
            parts.push_back(odd);
            break;
        }
    PartitionWitness w;
    w.parts = std::move(parts);
    w.balance_twice.reserve(w.parts.size());
    for (const auto& p : w.parts) w.balance_twice.push_back(2 * A.intersect_count(p) - p.count());
    return w;
}
}  // namespace detail

// Walks the pair chain along `pi`, taking the first generator in each bucket
// bank that meets the step's required overlap. One-sided: absence of a
// witness here does not mean A is unhandled.
inline std::optional<PartitionWitness> structured_handle(const SubsetMask& A, const GeneratorBank& bank,
                                                         const std::vector<int>& pi) {
    const BucketLayout& lay = bank.layout;
    if (A.universe() != lay.n) throw param_error("dimension error: challenge set does not match bank's ground set");
    if (A.count() != (lay.n + 1) / 2)
        throw param_error("structured search needs a half-size challenge set (ceil(n/2) elements)");
    std::vector<int> needs = chain_needs(A, lay, pi);
    SubsetMask prev_t = SubsetMask::empty_set(lay.n);
    std::vector<SubsetMask> parts;
    parts.reserve(size_t(lay.d));
    for (int j = 1; j <= lay.d; ++j) {
        int bi = pi[size_t(j) - 1], bj = pi[size_t(j)];
        const SubsetMask* match = nullptr;
        for (const SubsetMask& t : bank.banks[size_t(bj)])
            if (A.intersect_count(t) == needs[size_t(j)]) {
                match = &t;
                break;
            }
        if (!match) return std::nullopt;
        parts.push_back(lay.bucket_mask(bi).minus(prev_t) | *match);
        prev_t = *match;
    }
    return detail::finish_witness(A, std::move(parts));
}

// ---------- whole-family handling drivers ----------

enum class HandleStatus { found, not_found, budget_exceeded };

struct HandleResult {
    HandleStatus status = HandleStatus::not_found;
    std::optional<PartitionWitness> witness;
};

namespace detail {
inline void resolve_indices(PartitionWitness& w, const GalvinFamily& fam, bool allow_virtual_second = false) {
    w.indices.clear();
    for (size_t i = 0; i < w.parts.size(); ++i) {
        int idx = fam.find_index(w.parts[i]);
        if (idx < 0 && !(allow_virtual_second && i == 1))
            throw param_error("internal: witness part is not a family member");
        w.indices.push_back(idx);
    }
}
}  // namespace detail

// Exact backtracking oracle: searches for d pairwise-disjoint members
// covering the ground set, each holding its balance target. Explores members
// containing the lowest uncovered element only; a node budget turns oversized
// searches into an explicit resource outcome (never a "no").
inline HandleResult brute_force_handle(const SubsetMask& A, const GalvinFamily& fam,
                                       uint64_t node_budget = 10'000'000) {
    if (A.universe() != fam.n) throw param_error("dimension error: challenge set does not match family");
    if (fam.variant == Variant::classic) {
        // Witness is a balanced member plus its complement.
        for (size_t i = 0; i < fam.sets.size(); ++i) {
            const SubsetMask& s = fam.sets[i];
            if (2 * A.intersect_count(s) == s.count()) {
                PartitionWitness w = detail::finish_witness(A, {s, s.comp()});
                detail::resolve_indices(w, fam, /*allow_virtual_second=*/true);
                return {HandleStatus::found, std::move(w)};
            }
        }
        return {HandleStatus::not_found, std::nullopt};
    }

    // A member is placeable iff it meets its own balance target: exactly half
    // for even size, the extra element on A's side for odd size.
    std::vector<int> ok;
    int min_size = fam.n, max_size = 0;
    for (size_t i = 0; i < fam.sets.size(); ++i) {
        const SubsetMask& s = fam.sets[i];
        int sz = s.count();
        if (2 * A.intersect_count(s) - sz == (sz & 1)) {
            ok.push_back(int(i));
            min_size = std::min(min_size, sz);
            max_size = std::max(max_size, sz);
        }
    }
    if (ok.empty()) return {HandleStatus::not_found, std::nullopt};
    std::vector<std::vector<int>> by_elem(size_t(fam.n));
    for (int i : ok)
        fam.sets[size_t(i)].for_each_bit([&](int e) { by_elem[size_t(e)].push_back(i); });

    uint64_t nodes = 0;
    bool out_of_budget = false;
    std::vector<SubsetMask> chosen;
    SubsetMask covered = SubsetMask::empty_set(fam.n);

    auto rec = [&](auto&& self) -> bool {
        int remaining = fam.n - covered.count();
        int parts_left = fam.d - int(chosen.size());
        if (remaining == 0) return parts_left == 0;
        if (parts_left == 0) return false;
        if (remaining < parts_left * min_size || remaining > parts_left * max_size) return false;
        int e = covered.comp().lowest();
        for (int i : by_elem[size_t(e)]) {
            if (++nodes > node_budget) {
                out_of_budget = true;
                return false;
            }
            const SubsetMask& s = fam.sets[size_t(i)];
            if (covered.intersects(s)) continue;
            chosen.push_back(s);
            covered = covered | s;
            if (self(self)) return true;
            covered = covered.minus(s);
            chosen.pop_back();
            if (out_of_budget) return false;
        }
        return false;
    };
    if (rec(rec)) {
        PartitionWitness w = detail::finish_witness(A, std::move(chosen));
        detail::resolve_indices(w, fam);
        return {HandleStatus::found, std::move(w)};
    }
    return {out_of_budget ? HandleStatus::budget_exceeded : HandleStatus::not_found, std::nullopt};
}

// Structured search across a family's retained per-copy provenance: each copy
// is probed on the pulled-back challenge set and a found witness is mapped
// forward through the copy's permutation. One-sided, no backtracking.
inline HandleResult structured_handle_family(const SubsetMask& A, const GalvinFamily& fam) {
    for (const CopyProvenance& cp : fam.provenance) {
        SubsetMask local_a = unpermute_mask(A, cp.perm);
        std::vector<int> pi = greedy_order(adjusted_error_doubled(local_a, cp.bank.layout));
        std::optional<PartitionWitness> w = structured_handle(local_a, cp.bank, pi);
        if (!w) continue;
        std::vector<SubsetMask> parts;
        parts.reserve(w->parts.size());
        for (const SubsetMask& p : w->parts) parts.push_back(permute_mask(p, cp.perm));
        PartitionWitness mapped = detail::finish_witness(A, std::move(parts));
        detail::resolve_indices(mapped, fam);
        return {HandleStatus::found, std::move(mapped)};
    }
    return {HandleStatus::not_found, std::nullopt};
}

// Full decision procedure for one challenge set: structured search first
// (when provenance is available), exact backtracking as the fallback.
inline HandleResult handle(const SubsetMask& A, const GalvinFamily& fam, uint64_t node_budget = 10'000'000) {
    if (fam.variant == Variant::classic) return brute_force_handle(A, fam, node_budget);
    if (!fam.provenance.empty()) {
        HandleResult r = structured_handle_family(A, fam);
        if (r.status == HandleStatus::found) return r;
    }
    return brute_force_handle(A, fam, node_budget);
}

// ---------- enumeration helpers (ground sets up to 64 elements) ----------

inline uint64_t binom_u64(int n, int k) {
    static const auto table = [] {
        std::array<std::array<uint64_t, 65>, 65> t{};
        for (int i = 0; i <= 64; ++i) {
            t[size_t(i)][0] = 1;
            for (int j = 1; j <= i; ++j)
                t[size_t(i)][size_t(j)] = t[size_t(i) - 1][size_t(j) - 1] + (j <= i - 1 ? t[size_t(i) - 1][size_t(j)] : 0);
        }
        return t;
    }();
    if (n < 0 || n > 64 || k < 0 || k > n) throw param_error("binom_u64 out of range");
    return table[size_t(n)][size_t(k)];
}

// rank-th h-subset of {0..n-1} in increasing numeric (colex) order.
inline uint64_t combination_unrank(int n, int h, uint64_t rank) {
    uint64_t mask = 0;
    for (int i = h; i >= 1; --i) {
        int e = i - 1;  // lowest position leaving room for the i-1 smaller elements
        while (e + 1 < n && binom_u64(e + 1, i) <= rank) ++e;
        mask |= uint64_t{1} << e;
        if (e >= i) rank -= binom_u64(e, i);  // binom(i-1, i) would be 0
    }
    return mask;
}

// Next bit pattern with the same popcount in increasing numeric order.
inline uint64_t gosper_next(uint64_t v) {
    uint64_t c = v & (~v + 1);
    uint64_t r = v + c;
    return (((r ^ v) >> 2) / c) | r;
}

// ---------- reports and batch drivers ----------

struct VerifyReport {
    std::string mode;
    bool ok = false;
    std::optional<PartitionWitness> witness;       // single-challenge modes
    std::optional<SubsetMask> counterexample;      // lowest-rank / first failing challenge set
    uint64_t counterexample_rank = 0;
    uint64_t trials = 0;
    uint64_t successes = 0;
    double p_hat = 0, ci_lo = 0, ci_hi = 0;
};

// Checks every half-size challenge set (all C(n, ceil(n/2)) of them).
// Deterministic regardless of thread count: the reported counterexample is
// the lowest-ranked failure. Throws budget_error when n exceeds max_n (the
// enumeration is meant for desk-scale instances).
inline VerifyReport exhaustive_check(const GalvinFamily& fam, int max_n = 20, int threads = 1,
                                     uint64_t node_budget = 10'000'000) {
    if (fam.n > max_n)
        throw budget_error("exhaustive check over n=" + std::to_string(fam.n) + " exceeds the budget n <= " +
                           std::to_string(max_n));
    if (fam.n > 64) throw budget_error("exhaustive enumeration caps at n = 64");
    int h = (fam.n + 1) / 2;
    uint64_t total = binom_u64(fam.n, h);
    int workers = int(std::min<uint64_t>(uint64_t(threads), std::max<uint64_t>(total, 1)));
    std::vector<uint64_t> fail_rank(size_t(workers), total);  // per-worker lowest failing rank
    std::vector<uint64_t> fail_count(size_t(workers), 0);
    uint64_t chunk = total / uint64_t(workers), extra = total % uint64_t(workers);
    parallel_for_index(uint64_t(workers), workers, [&](uint64_t w) {
        uint64_t begin = w * chunk + std::min(w, extra);
        uint64_t end = begin + chunk + (w < extra ? 1 : 0);
        if (begin >= end) return;
        uint64_t bits = combination_unrank(fam.n, h, begin);
        for (uint64_t rank = begin; rank < end; ++rank) {
            SubsetMask A = SubsetMask::from_u64(fam.n, bits);
            HandleResult r = handle(A, fam, node_budget);
            if (r.status == HandleStatus::budget_exceeded)
                throw budget_error("backtracking budget exhausted during exhaustive check");
            if (r.status != HandleStatus::found) {
                ++fail_count[size_t(w)];
                if (fail_rank[size_t(w)] == total) fail_rank[size_t(w)] = rank;
            }
            if (rank + 1 < end) bits = gosper_next(bits);
        }
    });
    VerifyReport rep;
    rep.mode = "exhaustive";
    rep.trials = total;
    uint64_t failures = 0, first = total;
    for (int w = 0; w < workers; ++w) {
        failures += fail_count[size_t(w)];
        first = std::min(first, fail_rank[size_t(w)]);
    }
    rep.successes = total - failures;
    rep.ok = failures == 0;
    rep.p_hat = total ? double(rep.successes) / double(total) : 0.0;
    rep.ci_lo = rep.ci_hi = rep.p_hat;
    if (!rep.ok) {
        rep.counterexample = SubsetMask::from_u64(fam.n, combination_unrank(fam.n, h, first));
        rep.counterexample_rank = first;
    }
    return rep;
}

// Estimates the handling probability over uniform half-size challenge sets.
// Each trial derives its own stream from (seed, trial index), so results are
// independent of thread count.
inline VerifyReport monte_carlo_handle_prob(const GalvinFamily& fam, uint64_t trials, uint64_t seed,
                                            int threads = 1, uint64_t node_budget = 10'000'000) {
    if (trials < 1) throw param_error("monte carlo needs trials >= 1");
    int h = (fam.n + 1) / 2;
    std::vector<char> hit(size_t(trials), 0);
    std::vector<char> over(size_t(trials), 0);
    parallel_for_index(trials, threads, [&](uint64_t t) {
        Rng rng(derive_seed(seed, t));
        SubsetMask A = rng.sample_k_of_n(fam.n, h);
        HandleResult r = handle(A, fam, node_budget);
        if (r.status == HandleStatus::budget_exceeded)
            over[size_t(t)] = 1;
        else
            hit[size_t(t)] = r.status == HandleStatus::found;
    });
    VerifyReport rep;
    rep.mode = "monte-carlo";
    rep.trials = trials;
    for (uint64_t t = 0; t < trials; ++t) {
        if (over[size_t(t)]) throw budget_error("backtracking budget exhausted during monte carlo estimation");
        rep.successes += uint64_t(hit[size_t(t)]);
    }
    rep.ok = rep.successes == trials;
    rep.p_hat = double(rep.successes) / double(trials);
    auto ci = wilson_interval(int64_t(rep.successes), int64_t(trials));
    rep.ci_lo = ci.first;
    rep.ci_hi = ci.second;
    if (!rep.ok) {
        for (uint64_t t = 0; t < trials; ++t)
            if (!hit[size_t(t)]) {
                Rng rng(derive_seed(seed, t));
                rep.counterexample = rng.sample_k_of_n(fam.n, h);
                rep.counterexample_rank = t;
                break;
            }
    }
    return rep;
}

// ---------- structural validation ----------

// True iff the witness is a genuine certificate: pairwise-disjoint parts
// covering the ground set, membership (with the classic variant's virtual
// complement allowed), sizes matching the family's variant/plan, every
// even part exactly balanced, and at most one odd part, placed last, carrying
// its extra element on A's side.
inline bool check_witness(const SubsetMask& A, const GalvinFamily& fam, const PartitionWitness& w) {
    if (int(w.parts.size()) != fam.d) return false;
    if (!w.indices.empty() && w.indices.size() != w.parts.size()) return false;
    if (!w.balance_twice.empty() && w.balance_twice.size() != w.parts.size()) return false;

    SubsetMask seen = SubsetMask::empty_set(fam.n);
    int covered = 0;
    for (const SubsetMask& p : w.parts) {
        if (p.universe() != fam.n) return false;
        if (seen.intersects(p)) return false;
        seen = seen | p;
        covered += p.count();
    }
    if (covered != fam.n || seen != SubsetMask::full_set(fam.n)) return false;

    int odd_seen = 0;
    for (size_t i = 0; i < w.parts.size(); ++i) {
        const SubsetMask& p = w.parts[i];
        int bal2 = 2 * A.intersect_count(p) - p.count();
        if (!w.balance_twice.empty() && w.balance_twice[i] != bal2) return false;
        if (p.count() % 2 == 0) {
            if (bal2 != 0) return false;
        } else {
            ++odd_seen;
            if (odd_seen > 1) return false;
            if (i + 1 != w.parts.size()) return false;  // the odd part must sit last
            if (bal2 != 1) return false;
        }
    }

    // Membership: all parts are members, except the classic variant's second
    // part which only needs to be the complement of the first.
    for (size_t i = 0; i < w.parts.size(); ++i) {
        int idx = fam.find_index(w.parts[i]);
        if (!w.indices.empty() && w.indices[i] >= 0 && w.indices[i] != idx) return false;
        if (idx < 0) {
            bool virtual_ok = fam.variant == Variant::classic && i == 1 && w.parts[1] == w.parts[0].comp();
            if (!virtual_ok) return false;
        }
    }

    // Size discipline per variant.
    if (fam.plan.has_value()) {
        const MixedSizePlan& plan = *fam.plan;
        int small = 2 * plan.k_prime * plan.unit;
        int large = 2 * (plan.k_prime + 1) * plan.unit;
        int odd_size = 2 * plan.k_prime + 1;
        int nf = 0, nc = 0, nm = 0;
        for (const SubsetMask& p : w.parts) {
            int sz = p.count();
            if (sz == small)
                ++nf;
            else if (plan.c > 0 && sz == large)
                ++nc;
            else if (plan.m > 0 && sz == odd_size)
                ++nm;
            else
                return false;
        }
        if (nf != plan.f || nc != plan.c || nm != plan.m) return false;
    } else if (fam.variant == Variant::classic) {
        for (const SubsetMask& p : w.parts)
            if (2 * p.count() != fam.n) return false;
    } else {
        if (fam.n % fam.d != 0) return false;
        for (const SubsetMask& p : w.parts)
            if (p.count() != fam.n / fam.d) return false;
    }
    return true;
}

struct DegreeReport {
    bool ok = false;
    int min_degree = 0;
    std::vector<int> degrees;  // per element
};

// Necessary condition: every element must lie in at least d/2 usable witness
// parts (checked as 2 * degree >= d, exact for odd d). For the classic
// variant a member's complement is a usable part too, so each member counts
// toward every element: the ones it contains directly and, virtually, the
// rest.
inline DegreeReport check_degree_condition(const GalvinFamily& fam) {
    DegreeReport rep;
    if (fam.variant == Variant::classic) {
        rep.degrees.assign(size_t(fam.n), int(fam.sets.size()));
    } else {
        rep.degrees.assign(size_t(fam.n), 0);
        for (const SubsetMask& s : fam.sets)
            s.for_each_bit([&](int e) { ++rep.degrees[size_t(e)]; });
    }
    rep.min_degree = fam.n ? *std::min_element(rep.degrees.begin(), rep.degrees.end()) : 0;
    rep.ok = 2 * rep.min_degree >= fam.d;
    return rep;
}

}  // namespace galvin
