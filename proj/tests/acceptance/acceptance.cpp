// Runs every acceptance suite with its defaults and prints one line per criterion.
#include <chrono>
#include <cstdio>
#include <map>
#include <string>

#include "bergman/errors.hpp"
#include "bergman/suites.hpp"

using namespace bergman;

int main()
{
    const std::map<int, std::string> titles = {
        {1, "kernel identity, standard weights"},
        {2, "kernel identity, nu = lebesgue"},
        {3, "harmonic-number coefficients"},
        {4, "complete monotonicity"},
        {5, "resolvent lower bound"},
        {6, "kernel difference bound"},
        {7, "resolvent-tail ratio band"},
        {8, "dyadic containment"},
        {9, "kernel comparability"},
        {10, "dyadic maximal weak (1,1)"},
        {11, "CZ decomposition"},
        {12, "stopping machinery"},
        {13, "two-weight testing at p = 2"},
        {14, "one-weight bound at p = 2"},
        {15, "weak (1,1) for the projection"},
        {16, "determinism"},
    };
    std::map<int, bool> verdict;
    std::map<int, std::string> source;
    std::map<int, double> seconds;
    for (const auto& info : suite_catalog()) {
        ExperimentConfig cfg;
        cfg.suite = info.name;
        cfg.timestamp = false;
        const auto t0 = std::chrono::steady_clock::now();
        std::map<int, bool> got;
        try {
            got = run_suite(cfg).criteria();
        } catch (const Error& e) {
            std::fprintf(stderr, "suite %s threw: %s\n", info.name.c_str(), e.what());
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (int c : info.criteria) {
            verdict[c] = got.count(c) > 0 && got[c];
            source[c] = info.name;
            seconds[c] = dt;
        }
    }
    int failed = 0;
    for (const auto& [c, title] : titles) {
        const bool ok = verdict.count(c) > 0 && verdict[c];
        failed += ok ? 0 : 1;
        std::printf("criterion %2d: %s  %-36s suite=%s (%.1f s)\n", c, ok ? "PASS" : "FAIL", title.c_str(),
                    source[c].c_str(), seconds[c]);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(titles.size()) - failed, titles.size());
    return failed == 0 ? 0 : 1;
}
