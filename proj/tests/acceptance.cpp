// Acceptance runner: executes the twelve-criterion suite, printing one
// PASS/FAIL line per criterion, and exits nonzero if any criterion fails.

#include <algorithm>
#include <cstdlib>
#include <iostream>

#include "galvin/selftest.hpp"

#ifndef GALVIN_CLI_PATH
#define GALVIN_CLI_PATH ""
#endif

int main() {
    galvin::SelftestOptions opt;
    opt.threads = 2;
    if (const char* t = std::getenv("GALVIN_TEST_THREADS")) opt.threads = std::max(1, std::atoi(t));
    opt.cli_path = GALVIN_CLI_PATH;
    std::vector<galvin::CriterionResult> results = galvin::run_selftest(opt, std::cout);
    return galvin::all_passed(results) ? 0 : 1;
}
