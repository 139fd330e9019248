#pragma once
// The built-in acceptance suite: twelve end-to-end checks covering the
// interval baseline, calibrated single-family probability, amplified builds,
// the greedy ordering invariants, the numerics stack, composition, size
// bounds, the uneven-ground-set variant, oracle cross-agreement, and
// thread-count determinism. Each check prints one PASS/FAIL line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "galvin/construct.hpp"
#include "galvin/errors.hpp"
#include "galvin/io.hpp"
#include "galvin/numerics.hpp"
#include "galvin/verify.hpp"

namespace galvin {

struct CriterionResult {
    std::string label;
    bool pass = false;
    std::string details;
    double ms = 0;
};

struct SelftestOptions {
    int threads = 1;
    uint64_t seed = 2026;
    std::string cli_path;  // when set, the determinism check also runs the real binary
};

namespace selftest_detail {

using clock = std::chrono::steady_clock;

inline double ms_since(clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
}

struct Context {
    SelftestOptions opt;
    // Families that passed an exhaustive check, kept for the size-bound sweep.
    std::vector<GalvinFamily> verified;
};

inline std::string fmt_double(double v, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return std::string(buf);
}

// ---- 1: the n/2-window baseline handles every challenge set ----
inline CriterionResult c01_interval_baseline(Context& ctx) {
    CriterionResult r{"interval-baseline-exhaustive", false, "", 0};
    auto t0 = clock::now();
    std::ostringstream det;
    bool ok = true;
    uint64_t total = 0;
    for (int n : {8, 12, 16, 20}) {
        GalvinFamily fam = interval_galvin(n);
        if (n == 8 && fam.sets.size() != 4) {
            ok = false;
            det << "n=8 expected 4 members, got " << fam.sets.size() << "; ";
            continue;
        }
        VerifyReport rep = exhaustive_check(fam, 20, ctx.opt.threads);
        total += rep.trials;
        if (!rep.ok) {
            ok = false;
            det << "n=" << n << " counterexample rank=" << rep.counterexample_rank << "; ";
        } else {
            ctx.verified.push_back(std::move(fam));
        }
    }
    r.ms = ms_since(t0);
    bool in_time = r.ms < 10'000;
    r.pass = ok && in_time;
    det << "challenges=" << total << " limit-ms=10000";
    r.details = det.str();
    return r;
}

// ---- 2: calibrated single family at (24,3) handles >= 45% of random A ----
inline CriterionResult c02_single_family_probability(Context& ctx) {
    CriterionResult r{"single-family-handling-probability", false, "", 0};
    auto t0 = clock::now();
    BuildConfig cfg;
    cfg.n = 24;
    cfg.d = 3;
    // cfg.r left unset: the generator count comes from calibration
    cfg.seed = derive_seed(ctx.opt.seed, 2);
    cfg.threads = ctx.opt.threads;
    Rng rng(cfg.seed);
    GalvinFamily fam = build_single_family(cfg, rng);
    VerifyReport rep = monte_carlo_handle_prob(fam, 1000, derive_seed(cfg.seed, 99), ctx.opt.threads);
    r.ms = ms_since(t0);
    r.pass = rep.p_hat >= 0.45 && r.ms < 60'000;
    std::ostringstream det;
    det << "r=" << fam.provenance.at(0).bank.r << " members=" << fam.sets.size() << " p-hat=" << fmt_double(rep.p_hat)
        << " ci=[" << fmt_double(rep.ci_lo) << "," << fmt_double(rep.ci_hi) << "] need>=0.45 limit-ms=60000";
    r.details = det.str();
    return r;
}

// ---- 3: amplified (12,3) x 12 copies passes the full 924-set sweep ----
inline CriterionResult c03_amplified_exhaustive(Context& ctx) {
    CriterionResult r{"amplified-build-exhaustive", false, "", 0};
    auto t0 = clock::now();
    BuildConfig cfg;
    cfg.n = 12;
    cfg.d = 3;
    cfg.copies = 12;
    cfg.threads = ctx.opt.threads;
    uint64_t base = derive_seed(ctx.opt.seed, 3);
    std::ostringstream det;
    for (int attempt = 0; attempt < 16; ++attempt) {
        cfg.seed = attempt == 0 ? base : derive_seed(base, salt_verify_retry + uint64_t(attempt));
        GalvinFamily fam = build_galvin(cfg);
        VerifyReport rep = exhaustive_check(fam, 20, ctx.opt.threads);
        if (rep.ok) {
            r.ms = ms_since(t0);
            r.pass = rep.trials == 924 && r.ms < 60'000;
            det << "attempts=" << (attempt + 1) << " members=" << fam.sets.size() << " challenges=" << rep.trials
                << " limit-ms=60000";
            r.details = det.str();
            ctx.verified.push_back(std::move(fam));
            return r;
        }
    }
    r.ms = ms_since(t0);
    det << "no passing family within 16 derived seeds";
    r.details = det.str();
    return r;
}

// ---- 4: greedy ordering keeps every prefix error within max |R_i| ----
inline CriterionResult c04_greedy_prefix(Context& ctx) {
    CriterionResult r{"greedy-prefix-within-max-error", false, "", 0};
    auto t0 = clock::now();
    const std::pair<int, int> configs[] = {{24, 3}, {40, 5}, {80, 10}};
    uint64_t violations = 0, samples = 0;
    for (auto [n, d] : configs) {
        BucketLayout lay = bucket_layout_standard(n, d);
        uint64_t salt = uint64_t(n) * 1000 + uint64_t(d);
        for (int t = 0; t < 10'000; ++t) {
            Rng rng(derive_seed(derive_seed(ctx.opt.seed, 4), salt * 100'000 + uint64_t(t)));
            SubsetMask A = rng.sample_k_of_n(n, n / 2);
            std::vector<int> values = adjusted_error_doubled(A, lay);
            std::vector<int> pi = greedy_order(values);
            int max_single = 0, max_prefix = 0, run = 0;
            for (int v : values) max_single = std::max(max_single, std::abs(v));
            for (int i = 0; i <= lay.d; ++i) {
                run += values[size_t(pi[size_t(i)])];
                max_prefix = std::max(max_prefix, std::abs(run));
            }
            if (max_prefix > max_single) ++violations;
            ++samples;
        }
    }
    r.ms = ms_since(t0);
    r.pass = violations == 0;
    std::ostringstream det;
    det << "samples=" << samples << " violations=" << violations;
    r.details = det.str();
    return r;
}

// ---- 5: bucket errors stay below sqrt(k ln(16 d)) for >= 75% of A ----
inline CriterionResult c05_concentration(Context& ctx) {
    CriterionResult r{"bucket-error-concentration", false, "", 0};
    auto t0 = clock::now();
    int n = 80, d = 10;
    BucketLayout lay = bucket_layout_standard(n, d);
    double threshold = concentration_threshold(n, d);
    uint64_t exceed = 0;
    const int trials = 10'000;
    for (int t = 0; t < trials; ++t) {
        Rng rng(derive_seed(derive_seed(ctx.opt.seed, 5), uint64_t(t)));
        SubsetMask A = rng.sample_k_of_n(n, n / 2);
        std::vector<int> values = adjusted_error_doubled(A, lay);
        int max_doubled = 0;
        for (int v : values) max_doubled = std::max(max_doubled, std::abs(v));
        if (double(max_doubled) > 2.0 * threshold) ++exceed;
    }
    double fraction = double(exceed) / double(trials);
    r.ms = ms_since(t0);
    r.pass = fraction <= 0.25;
    std::ostringstream det;
    det << "threshold=" << fmt_double(threshold) << " exceed-fraction=" << fmt_double(fraction) << " need<=0.25";
    r.details = det.str();
    return r;
}

// ---- 6: exact/asymptotic balance probability, pmf mass, tail domination ----
inline CriterionResult c06_balance_numerics(Context&) {
    CriterionResult r{"balance-probability-numerics", false, "", 0};
    auto t0 = clock::now();
    std::ostringstream det;
    bool ok = true;

    double worst_rel = 0;
    for (long long k : {50, 100, 200}) {
        double exact = balance_prob_exact(0, 0, k).convert_to<double>();
        double asym = balance_prob_asymptotic(0, 0, k);
        double rel = std::abs(asym / exact - 1.0);
        worst_rel = std::max(worst_rel, rel);
        if (rel > 0.10) {
            ok = false;
            det << "k=" << k << " rel=" << fmt_double(rel) << " over 10%; ";
        }
    }

    // Every pmf over N <= 64 carries total mass exactly 1 in rational
    // arithmetic, across the whole (N, K, n_draw) grid.
    uint64_t mass_checks = 0;
    for (long long N = 1; N <= 64 && ok; ++N) {
        for (long long K = 0; K <= N && ok; ++K) {
            for (long long ndraw = 0; ndraw <= N; ++ndraw) {
                HypergeomParams p{K, N, ndraw};
                bigrat sum = 0;
                for (long long x = p.support_lo(); x <= p.support_hi(); ++x) sum += hypergeom_pmf(p, x);
                ++mass_checks;
                if (sum != 1) {
                    ok = false;
                    det << "pmf mass != 1 at N=" << N << " K=" << K << " n=" << ndraw << "; ";
                    break;
                }
            }
        }
    }

    // Two-sided tails of H(N/2, N, 2k) (mean k) never exceed 2 exp(-x^2/k).
    uint64_t tail_checks = 0;
    for (long long k = 1; k <= 32 && ok; ++k) {
        for (long long mult : {2, 4, 8}) {
            long long N = mult * k;
            HypergeomParams p{N / 2, N, 2 * k};
            std::vector<bigrat> pmf;
            for (long long xd = p.support_lo(); xd <= p.support_hi(); ++xd) pmf.push_back(hypergeom_pmf(p, xd));
            for (long long x = 0; x <= k + 1; ++x) {
                bigrat tail = 0;
                for (long long xd = p.support_lo(); xd <= p.support_hi(); ++xd)
                    if (std::llabs(xd - k) > x) tail += pmf[size_t(xd - p.support_lo())];
                double bound = hoeffding_tail_bound(double(x), k);
                ++tail_checks;
                if (tail.convert_to<double>() > bound + 1e-12) {
                    ok = false;
                    det << "tail above bound at k=" << k << " N=" << N << " x=" << x << "; ";
                }
            }
        }
    }

    r.ms = ms_since(t0);
    r.pass = ok;
    det << "worst-rel=" << fmt_double(worst_rel) << " mass-checks=" << mass_checks << " tail-checks=" << tail_checks;
    r.details = det.str();
    return r;
}

// ---- 7: central-binomial estimate within 1% across the stated window ----
inline CriterionResult c07_binom_approx(Context&) {
    CriterionResult r{"central-binomial-approximation", false, "", 0};
    auto t0 = clock::now();
    double worst = 0;
    uint64_t checks = 0;
    bool ok = true;
    std::ostringstream det;
    for (long long n : {100, 400, 1600}) {
        long long mmax = (long long)std::floor(std::pow(double(n), 0.55));
        for (long long m = -mmax; m <= mmax; ++m) {
            BinomApprox ba = binom_approx(n, m);
            double rel = std::abs(ba.rel_error);
            worst = std::max(worst, rel);
            ++checks;
            if (rel > 0.01) {
                ok = false;
                det << "n=" << n << " m=" << m << " rel=" << fmt_double(rel) << "; ";
            }
        }
    }
    r.ms = ms_since(t0);
    r.pass = ok;
    det << "checks=" << checks << " worst-rel=" << fmt_double(worst) << " need<=0.01";
    r.details = det.str();
    return r;
}

// ---- 8: two-level composition at n=16 survives all 12870 challenge sets ----
inline CriterionResult c08_composition(Context& ctx) {
    CriterionResult r{"two-level-composition-exhaustive", false, "", 0};
    auto t0 = clock::now();
    GalvinFamily outer = interval_family_with_complements(16);
    GalvinFamily composed =
        compose_families(outer, [](int inner_n, int) { return interval_family_with_complements(inner_n); });
    VerifyReport rep = exhaustive_check(composed, 20, ctx.opt.threads);
    r.ms = ms_since(t0);
    r.pass = rep.ok && rep.trials == 12870 && composed.d == 4 && r.ms < 300'000;
    std::ostringstream det;
    det << "members=" << composed.sets.size() << " d=" << composed.d << " challenges=" << rep.trials;
    if (!rep.ok) det << " counterexample-rank=" << rep.counterexample_rank;
    det << " limit-ms=300000";
    r.details = det.str();
    if (rep.ok) ctx.verified.push_back(std::move(composed));
    return r;
}

// ---- 9: counting/degree lower bounds, checked against verified families ----
inline CriterionResult c09_size_bounds(Context& ctx) {
    CriterionResult r{"family-size-lower-bounds", false, "", 0};
    auto t0 = clock::now();
    std::ostringstream det;
    bool ok = true;

    CountingBound cb = counting_lower_bound(8, 2);
    if (cb.base_num != 70 || cb.base_den != 36 || cb.base != bigrat(70, 36)) {
        ok = false;
        det << "counting(8,2) base mismatch; ";
    }
    if (cb.ceiling != 2) {
        ok = false;
        det << "counting(8,2) ceiling=" << cb.ceiling << " expected 2; ";
    }
    for (int d = 2; d <= 12; ++d)
        if (degree_lower_bound(d) != double(d) * double(d) / 2.0) {
            ok = false;
            det << "degree(" << d << ") mismatch; ";
        }

    if (ctx.verified.empty()) {
        ok = false;
        det << "no exhaustively verified families available; ";
    }
    for (const GalvinFamily& fam : ctx.verified) {
        uint64_t size = fam.sets.size();
        CountingBound bound = counting_lower_bound(fam.n, fam.d);
        double deg_bound = degree_lower_bound(fam.d);
        DegreeReport deg = check_degree_condition(fam);
        if (size < uint64_t(bound.ceiling) || double(size) < deg_bound || !deg.ok) {
            ok = false;
            det << "family n=" << fam.n << " d=" << fam.d << " size=" << size << " fails a bound; ";
        }
    }
    r.ms = ms_since(t0);
    r.pass = ok;
    det << "families=" << ctx.verified.size();
    r.details = det.str();
    return r;
}

// ---- 10: 29-element 6-part builds give {4,4,4,5,6,6} witnesses ----
inline CriterionResult c10_uneven_witnesses(Context& ctx) {
    CriterionResult r{"uneven-ground-set-witnesses", false, "", 0};
    auto t0 = clock::now();
    BuildConfig cfg;
    cfg.n = 29;
    cfg.d = 6;
    cfg.variant = Variant::indivisible;
    cfg.copies = 4;
    cfg.seed = derive_seed(ctx.opt.seed, 10);
    cfg.threads = ctx.opt.threads;
    GalvinFamily fam = build_galvin(cfg);
    const std::vector<int> expected{4, 4, 4, 5, 6, 6};
    uint64_t found = 0, wrong_sizes = 0, bad_witness = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        Rng rng(derive_seed(cfg.seed, 7000 + uint64_t(t)));
        SubsetMask A = rng.sample_k_of_n(cfg.n, (cfg.n + 1) / 2);
        HandleResult h = handle(A, fam);
        if (h.status != HandleStatus::found) continue;
        ++found;
        std::vector<int> sizes;
        for (const SubsetMask& p : h.witness->parts) sizes.push_back(p.count());
        std::sort(sizes.begin(), sizes.end());
        if (sizes != expected) ++wrong_sizes;
        if (!check_witness(A, fam, *h.witness)) ++bad_witness;
    }
    r.ms = ms_since(t0);
    r.pass = found == trials && wrong_sizes == 0 && bad_witness == 0;
    std::ostringstream det;
    det << "handled=" << found << "/" << trials << " wrong-size-multisets=" << wrong_sizes
        << " witness-check-failures=" << bad_witness << " members=" << fam.sets.size();
    r.details = det.str();
    return r;
}

// ---- 11: structured search never beats the exact oracle; witnesses check ----
inline CriterionResult c11_oracle_agreement(Context& ctx) {
    CriterionResult r{"structured-vs-exact-oracle", false, "", 0};
    auto t0 = clock::now();
    struct Combo {
        int n, d;
        Variant v;
    };
    const std::vector<Combo> combos = {
        {8, 2, Variant::classic},      {12, 2, Variant::classic},     {16, 2, Variant::classic},
        {8, 2, Variant::standard},     {12, 2, Variant::standard},    {16, 2, Variant::standard},
        {12, 3, Variant::standard},    {16, 4, Variant::standard},    {5, 2, Variant::indivisible},
        {7, 3, Variant::indivisible},  {9, 2, Variant::indivisible},  {9, 4, Variant::indivisible},
        {10, 3, Variant::indivisible}, {11, 3, Variant::indivisible}, {13, 3, Variant::indivisible},
        {14, 3, Variant::indivisible}, {15, 4, Variant::indivisible}, {16, 5, Variant::indivisible},
    };
    uint64_t base = derive_seed(ctx.opt.seed, 11);
    uint64_t structured_found = 0, implication_breaks = 0, witness_fails = 0, budget_hits = 0;
    const int instances = 500;
    for (int i = 0; i < instances; ++i) {
        const Combo& c = combos[size_t(i) % combos.size()];
        uint64_t inst_seed = derive_seed(base, uint64_t(i));
        GalvinFamily fam;
        if (c.v == Variant::classic) {
            fam = interval_galvin(c.n);
        } else {
            BuildConfig cfg;
            cfg.n = c.n;
            cfg.d = c.d;
            cfg.variant = c.v;
            cfg.r = 1 + i % 3;
            cfg.copies = 1 + i % 2;
            cfg.seed = inst_seed;
            fam = build_galvin(cfg);
        }
        Rng rng(derive_seed(inst_seed, 1'000'003));
        SubsetMask A = rng.sample_k_of_n(c.n, (c.n + 1) / 2);
        HandleResult brute = brute_force_handle(A, fam);
        if (brute.status == HandleStatus::budget_exceeded) {
            ++budget_hits;
            continue;
        }
        if (brute.status == HandleStatus::found && !check_witness(A, fam, *brute.witness)) ++witness_fails;
        if (!fam.provenance.empty()) {
            HandleResult structured = structured_handle_family(A, fam);
            if (structured.status == HandleStatus::found) {
                ++structured_found;
                if (brute.status != HandleStatus::found) ++implication_breaks;
                if (!check_witness(A, fam, *structured.witness)) ++witness_fails;
            }
        }
    }
    r.ms = ms_since(t0);
    r.pass = implication_breaks == 0 && witness_fails == 0 && budget_hits == 0;
    std::ostringstream det;
    det << "instances=" << instances << " structured-found=" << structured_found
        << " implication-breaks=" << implication_breaks << " witness-failures=" << witness_fails
        << " budget-hits=" << budget_hits;
    r.details = det.str();
    return r;
}

// ---- 12: identical bytes from thread counts 1 and 8 ----
inline CriterionResult c12_determinism(Context& ctx) {
    CriterionResult r{"thread-count-determinism", false, "", 0};
    auto t0 = clock::now();
    std::ostringstream det;
    bool ok = true;

    BuildConfig cfg;
    cfg.n = 24;
    cfg.d = 3;
    cfg.r = 4;
    cfg.copies = 8;
    cfg.seed = 424242;
    cfg.threads = 1;
    GalvinFamily f1 = build_galvin(cfg);
    cfg.threads = 8;
    GalvinFamily f8 = build_galvin(cfg);
    std::string t1 = serialize_family(f1, FileEncoding::text);
    std::string t8 = serialize_family(f8, FileEncoding::text);
    std::string c1 = serialize_family(f1, FileEncoding::compact);
    std::string c8 = serialize_family(f8, FileEncoding::compact);
    if (t1 != t8 || c1 != c8) {
        ok = false;
        det << "in-process serialization differs between thread counts; ";
    }
    det << "bytes-text=" << t1.size() << " bytes-compact=" << c1.size();

    if (!ctx.opt.cli_path.empty()) {
        namespace fs = std::filesystem;
        fs::path dir = fs::temp_directory_path();
        fs::path p1 = dir / "galvin-selftest-t1.family";
        fs::path p8 = dir / "galvin-selftest-t8.family";
        auto run = [&](const fs::path& out, int threads) {
            std::ostringstream cmd;
            cmd << "\"" << ctx.opt.cli_path << "\" construct -n 24 -d 3 -r 4 --copies 8 --seed 424242 --threads "
                << threads << " -o \"" << out.string() << "\" > /dev/null 2>&1";
            return std::system(cmd.str().c_str());
        };
        auto slurp = [](const fs::path& p) {
            std::ifstream f(p, std::ios::binary);
            std::ostringstream buf;
            buf << f.rdbuf();
            return buf.str();
        };
        int rc1 = run(p1, 1), rc8 = run(p8, 8);
        std::string b1 = slurp(p1), b8 = slurp(p8);
        fs::remove(p1);
        fs::remove(p8);
        if (rc1 != 0 || rc8 != 0 || b1.empty() || b1 != b8) {
            ok = false;
            det << "; cli outputs differ (rc1=" << rc1 << " rc8=" << rc8 << ")";
        } else {
            det << " cli-bytes=" << b1.size() << " cli=identical";
        }
    }

    r.ms = ms_since(t0);
    r.pass = ok;
    r.details = det.str();
    return r;
}

}  // namespace selftest_detail

// Runs all twelve checks, printing one line per criterion as it completes.
// Returns the collected results; overall success = every `pass` flag set.
inline std::vector<CriterionResult> run_selftest(const SelftestOptions& opt, std::ostream& out) {
    using namespace selftest_detail;
    Context ctx;
    ctx.opt = opt;
    using Fn = CriterionResult (*)(Context&);
    const Fn checks[] = {c01_interval_baseline,
                         c02_single_family_probability,
                         c03_amplified_exhaustive,
                         c04_greedy_prefix,
                         c05_concentration,
                         c06_balance_numerics,
                         c07_binom_approx,
                         c08_composition,
                         c09_size_bounds,
                         c10_uneven_witnesses,
                         c11_oracle_agreement,
                         c12_determinism};
    const char* labels[] = {"interval-baseline-exhaustive",
                            "single-family-handling-probability",
                            "amplified-build-exhaustive",
                            "greedy-prefix-within-max-error",
                            "bucket-error-concentration",
                            "balance-probability-numerics",
                            "central-binomial-approximation",
                            "two-level-composition-exhaustive",
                            "family-size-lower-bounds",
                            "uneven-ground-set-witnesses",
                            "structured-vs-exact-oracle",
                            "thread-count-determinism"};
    std::vector<CriterionResult> results;
    int idx = 0;
    for (Fn fn : checks) {
        ++idx;
        CriterionResult r;
        try {
            r = fn(ctx);
        } catch (const std::exception& e) {
            r.pass = false;
            r.details = std::string("exception: ") + e.what();
        }
        r.label = labels[idx - 1];
        char head[8];
        std::snprintf(head, sizeof head, "%02d", idx);
        out << (r.pass ? "PASS" : "FAIL") << " " << head << " " << r.label << " (" << selftest_detail::fmt_double(r.ms)
            << " ms) " << r.details << "\n";
        out.flush();
        results.push_back(std::move(r));
    }
    return results;
}

inline bool all_passed(const std::vector<CriterionResult>& results) {
    for (const CriterionResult& r : results)
        if (!r.pass) return false;
    return !results.empty();
}

}  // namespace galvin
