// Command-line front door: construct families, verify them, print bounds,
// and run the built-in acceptance suite. All serialization lives here and in
// io.hpp; reports are line-oriented key=value records, with timing isolated
// on the final line so everything above it is byte-reproducible.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "galvin/galvin.hpp"

namespace {

using galvin::BuildConfig;
using galvin::GalvinFamily;
using galvin::SubsetMask;
using galvin::Variant;

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

std::string fmt_double(double v, int prec = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return std::string(buf);
}

// Elements are printed 1-based in human-facing output.
std::string fmt_elements(const SubsetMask& m) {
    std::ostringstream out;
    bool first = true;
    m.for_each_bit([&](int e) {
        if (!first) out << ',';
        out << (e + 1);
        first = false;
    });
    return out.str();
}

std::string fmt_witness(const galvin::PartitionWitness& w) {
    std::ostringstream out;
    for (size_t i = 0; i < w.parts.size(); ++i) {
        if (i) out << '|';
        out << fmt_elements(w.parts[i]);
    }
    return out.str();
}

std::string joined_sizes(const std::vector<int>& sizes) {
    std::ostringstream out;
    for (size_t i = 0; i < sizes.size(); ++i) {
        if (i) out << ',';
        out << sizes[i];
    }
    return out.str();
}

// Distinct member sizes, ascending.
std::vector<int> observed_sizes(const GalvinFamily& fam) {
    std::vector<int> sizes;
    for (const SubsetMask& s : fam.sets) sizes.push_back(s.count());
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    return sizes;
}

// The member-size menu the variant definition allows: {2*floor(k),
// floor(k)+ceil(k), 2*ceil(k)} for k = n/(2d), deduplicated.
std::vector<int> size_menu(int n, int d) {
    int lo = n / (2 * d), hi = (n + 2 * d - 1) / (2 * d);
    std::vector<int> menu{2 * lo, lo + hi, 2 * hi};
    std::sort(menu.begin(), menu.end());
    menu.erase(std::unique(menu.begin(), menu.end()), menu.end());
    return menu;
}

void print_bound_lines(std::ostream& out, const GalvinFamily& fam) {
    double deg_bound = galvin::degree_lower_bound(fam.d);
    out << "degree-bound=" << fmt_double(deg_bound) << "\n";
    bool size_ok = double(fam.sets.size()) >= deg_bound;
    if (fam.n % (2 * fam.d) == 0) {
        galvin::CountingBound cb = galvin::counting_lower_bound(fam.n, fam.d);
        out << "counting-bound=" << fmt_double(cb.value) << "\n";
        out << "counting-bound-ceil=" << cb.ceiling << "\n";
        size_ok = size_ok && (long long)fam.sets.size() >= cb.ceiling;
    } else {
        out << "counting-bound=unavailable\n";
    }
    out << "size-ok=" << (size_ok ? "yes" : "no") << "\n";
}

struct ConstructArgs {
    int n = 0;
    int d = 0;
    std::string variant = "standard";
    int r = 0;
    bool r_given = false;
    int copies = 0;
    uint64_t seed = 1;
    uint64_t trials = 2000;
    double target = 0;
    int threads = 1;
    std::string out_path;
    std::string encoding = "text";
    bool verify = false;
    int retries = 16;
    int max_n = 20;
};

int cmd_construct(const ConstructArgs& a) {
    auto t0 = clock_type::now();
    BuildConfig cfg;
    cfg.n = a.n;
    cfg.d = a.d;
    cfg.variant = galvin::variant_from_name(a.variant);
    if (a.r_given) cfg.r = a.r;
    cfg.copies = a.copies;
    cfg.seed = a.seed;
    cfg.calibration_trials = a.trials;
    cfg.calibration_target = a.target;
    cfg.threads = a.threads;

    GalvinFamily fam;
    bool verified = false;
    int attempts = 0;
    galvin::VerifyReport last_report;
    int max_attempts = a.verify ? a.retries : 1;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        cfg.seed = attempt == 0 ? a.seed : galvin::derive_seed(a.seed, galvin::salt_verify_retry + uint64_t(attempt));
        fam = galvin::build_galvin(cfg);
        attempts = attempt + 1;
        if (!a.verify) break;
        last_report = galvin::exhaustive_check(fam, a.max_n, a.threads);
        if (last_report.ok) {
            verified = true;
            break;
        }
    }

    std::ostream& out = std::cout;
    out << "n=" << fam.n << "\n";
    out << "d=" << fam.d << "\n";
    out << "variant=" << galvin::variant_name(fam.variant) << "\n";
    out << "seed=" << fam.seed << "\n";
    out << "copies=" << fam.copies << "\n";
    if (!fam.provenance.empty()) out << "r=" << fam.provenance.front().bank.r << "\n";
    out << "members=" << fam.sets.size() << "\n";
    out << "pre-dedup=" << fam.pre_dedup << "\n";
    out << "allowed-sizes=" << joined_sizes(size_menu(fam.n, fam.d)) << "\n";
    out << "member-sizes=" << joined_sizes(observed_sizes(fam)) << "\n";
    print_bound_lines(out, fam);
    if (a.verify) {
        out << "verify-attempts=" << attempts << "\n";
        out << "verify-challenges=" << last_report.trials << "\n";
        out << "verified=" << (verified ? "yes" : "no") << "\n";
        if (!verified && last_report.counterexample)
            out << "counterexample=" << fmt_elements(*last_report.counterexample) << "\n";
    }
    if (!a.out_path.empty()) {
        galvin::write_family(a.out_path, fam,
                             a.encoding == "compact" ? galvin::FileEncoding::compact : galvin::FileEncoding::text);
        out << "written=" << a.out_path << "\n";
    }
    out << "time-ms=" << fmt_double(ms_since(t0)) << "\n";
    return (a.verify && !verified) ? 1 : 0;
}

struct VerifyArgs {
    std::string path;
    std::string mode = "exhaustive";
    uint64_t trials = 1000;
    uint64_t seed = 1;
    uint64_t budget = 10'000'000;
    int threads = 1;
    int max_n = 20;
};

int cmd_verify(const VerifyArgs& a) {
    auto t0 = clock_type::now();
    GalvinFamily fam = galvin::read_family(a.path);
    std::ostream& out = std::cout;
    out << "file=" << a.path << "\n";
    out << "n=" << fam.n << "\n";
    out << "d=" << fam.d << "\n";
    out << "variant=" << galvin::variant_name(fam.variant) << "\n";
    out << "members=" << fam.sets.size() << "\n";
    out << "mode=" << a.mode << "\n";

    galvin::DegreeReport deg = galvin::check_degree_condition(fam);
    out << "degree-min=" << deg.min_degree << "\n";
    out << "degree-ok=" << (deg.ok ? "yes" : "no") << "\n";

    galvin::VerifyReport rep;
    if (a.mode == "exhaustive")
        rep = galvin::exhaustive_check(fam, a.max_n, a.threads, a.budget);
    else
        rep = galvin::monte_carlo_handle_prob(fam, a.trials, a.seed, a.threads, a.budget);
    out << "challenges=" << rep.trials << "\n";
    out << "successes=" << rep.successes << "\n";
    if (a.mode != "exhaustive") {
        out << "p-hat=" << fmt_double(rep.p_hat) << "\n";
        out << "ci-lo=" << fmt_double(rep.ci_lo) << "\n";
        out << "ci-hi=" << fmt_double(rep.ci_hi) << "\n";
    }

    bool yes = rep.ok && deg.ok;
    if (!yes && rep.counterexample) {
        out << "counterexample=" << fmt_elements(*rep.counterexample) << "\n";
        out << "counterexample-rank=" << rep.counterexample_rank << "\n";
    }
    if (yes) {
        // Demonstration witness for the first challenge set in enumeration
        // order (or a sampled one beyond the enumerable range).
        SubsetMask a0 = fam.n <= 64
                            ? SubsetMask::from_u64(fam.n, galvin::combination_unrank(fam.n, (fam.n + 1) / 2, 0))
                            : [&] {
                                  galvin::Rng rng(a.seed);
                                  return rng.sample_k_of_n(fam.n, (fam.n + 1) / 2);
                              }();
        galvin::HandleResult h = galvin::handle(a0, fam, a.budget);
        if (h.status == galvin::HandleStatus::found) {
            out << "witness-for=" << fmt_elements(a0) << "\n";
            out << "witness=" << fmt_witness(*h.witness) << "\n";
        }
    }
    out << "galvin=" << (yes ? "yes" : "no") << "\n";
    out << "GALVIN: " << (yes ? "yes" : "no") << "\n";
    out << "time-ms=" << fmt_double(ms_since(t0)) << "\n";
    return yes ? 0 : 1;
}

struct BoundsArgs {
    int n = 0;
    int d = 0;
    int r = 1;
    int copies = 0;
};

int cmd_bounds(const BoundsArgs& a) {
    auto t0 = clock_type::now();
    if (a.n < 2 || a.d < 1) throw galvin::param_error("bounds needs n >= 2 and d >= 1");
    if (a.r < 1) throw galvin::param_error("bounds needs r >= 1");
    std::ostream& out = std::cout;
    int copies = a.copies > 0 ? a.copies : a.n;
    out << "n=" << a.n << "\n";
    out << "d=" << a.d << "\n";
    out << "k=" << fmt_double(double(a.n) / (2.0 * a.d)) << "\n";
    if (a.d >= 2 && a.n % (2 * a.d) == 0) {
        galvin::CountingBound cb = galvin::counting_lower_bound(a.n, a.d);
        out << "counting-bound-num=" << cb.base_num.str() << "\n";
        out << "counting-bound-den=" << cb.base_den.str() << "\n";
        out << "counting-bound=" << fmt_double(cb.value) << "\n";
        out << "counting-bound-ceil=" << cb.ceiling << "\n";
    } else {
        out << "counting-bound=unavailable\n";
    }
    out << "degree-bound=" << fmt_double(galvin::degree_lower_bound(a.d)) << "\n";
    out << "error-threshold=" << fmt_double(galvin::concentration_threshold(a.n, a.d)) << "\n";
    out << "r=" << a.r << "\n";
    out << "per-copy-pre-dedup=" << galvin::expected_pre_dedup(a.d, a.r) << "\n";
    out << "copies=" << copies << "\n";
    out << "total-pre-dedup=" << galvin::expected_pre_dedup(a.d, a.r) * uint64_t(copies) << "\n";
    out << "time-ms=" << fmt_double(ms_since(t0)) << "\n";
    return 0;
}

struct SelftestArgs {
    int threads = 1;
    uint64_t seed = 2026;
    std::string cli_path;
};

int cmd_selftest(const SelftestArgs& a) {
    galvin::SelftestOptions opt;
    opt.threads = a.threads;
    opt.seed = a.seed;
    opt.cli_path = a.cli_path;
    std::vector<galvin::CriterionResult> results = galvin::run_selftest(opt, std::cout);
    size_t passed = 0;
    for (const auto& r : results) passed += r.pass ? 1 : 0;
    std::cout << "passed=" << passed << "/" << results.size() << "\n";
    return galvin::all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"d-Galvin set family construction and verification"};
    app.require_subcommand(1);

    ConstructArgs ca;
    CLI::App* construct = app.add_subcommand("construct", "Build a family and optionally verify it");
    construct->add_option("-n", ca.n, "ground set size")->required();
    construct->add_option("-d", ca.d, "number of parts per witness")->required();
    construct->add_option("--variant", ca.variant, "family variant")
        ->check(CLI::IsMember({"standard", "indivisible", "mixed-large-d"}))
        ->capture_default_str();
    construct->add_option("-r", ca.r, "generators per interior bucket (default: calibrate)");
    construct->add_option("--copies", ca.copies, "permuted copies to merge (0 = one per element)")
        ->capture_default_str();
    construct->add_option("--seed", ca.seed, "master seed")->envname("GALVIN_SEED")->capture_default_str();
    construct->add_option("--trials", ca.trials, "calibration trials")->capture_default_str();
    construct->add_option("--target", ca.target, "calibration per-step success target (0 = 1 - 1/(4d))")
        ->capture_default_str();
    construct->add_option("--threads", ca.threads, "worker threads")->capture_default_str();
    construct->add_option("-o,--out", ca.out_path, "write the family to this path");
    construct->add_option("--encoding", ca.encoding, "family file encoding")
        ->check(CLI::IsMember({"text", "compact"}))
        ->capture_default_str();
    construct->add_flag("--verify", ca.verify, "exhaustively verify; retry with derived seeds on failure");
    construct->add_option("--retries", ca.retries, "max verification attempts")->capture_default_str();
    construct->add_option("--max-n", ca.max_n, "largest n the exhaustive verifier accepts")->capture_default_str();

    VerifyArgs va;
    CLI::App* verify = app.add_subcommand("verify", "Check the property for a family file");
    verify->add_option("family", va.path, "family file path")->required();
    verify->add_option("--mode", va.mode, "exhaustive or sample")
        ->check(CLI::IsMember({"exhaustive", "sample"}))
        ->capture_default_str();
    verify->add_option("--trials", va.trials, "sample-mode trial count")->capture_default_str();
    verify->add_option("--seed", va.seed, "sample-mode seed")->envname("GALVIN_SEED")->capture_default_str();
    verify->add_option("--budget", va.budget, "backtracking node budget")->capture_default_str();
    verify->add_option("--threads", va.threads, "worker threads")->capture_default_str();
    verify->add_option("--max-n", va.max_n, "largest n the exhaustive verifier accepts")->capture_default_str();

    BoundsArgs ba;
    CLI::App* bounds = app.add_subcommand("bounds", "Print size bounds and construction counts");
    bounds->add_option("-n", ba.n, "ground set size")->required();
    bounds->add_option("-d", ba.d, "number of parts per witness")->required();
    bounds->add_option("-r", ba.r, "generators per interior bucket")->capture_default_str();
    bounds->add_option("--copies", ba.copies, "copies for the total count (0 = one per element)")
        ->capture_default_str();

    SelftestArgs sa;
    CLI::App* selftest = app.add_subcommand("selftest", "Run the built-in acceptance suite");
    selftest->add_option("--threads", sa.threads, "worker threads")->capture_default_str();
    selftest->add_option("--seed", sa.seed, "suite master seed")->capture_default_str();
    selftest->add_option("--cli", sa.cli_path, "path to this binary for subprocess checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const galvin::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const galvin::budget_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const galvin::param_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        ca.r_given = construct->count("-r") > 0;
        if (app.got_subcommand(construct)) return cmd_construct(ca);
        if (app.got_subcommand(verify)) return cmd_verify(va);
        if (app.got_subcommand(bounds)) return cmd_bounds(ba);
        if (app.got_subcommand(selftest)) {
            if (sa.cli_path.empty()) sa.cli_path = argv[0];
            return cmd_selftest(sa);
        }
    } catch (const galvin::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const galvin::budget_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const galvin::param_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
