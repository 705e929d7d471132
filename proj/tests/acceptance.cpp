// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "aw/verify.hpp"

int main() {
    struct Outcome {
        bool pass = true;
        double seconds = 0.0;
        std::vector<std::string> failures;
    };
    std::map<int, Outcome> by_criterion;
    for (const std::string& suite : aw::suite_names()) {
        const auto t0 = std::chrono::steady_clock::now();
        aw::SuiteReport report;
        try {
            report = aw::run_suite(suite);
        } catch (const std::exception& e) {
            std::printf("suite %s threw: %s\n", suite.c_str(), e.what());
            return 1;
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("suite %-14s %6.1f s\n", suite.c_str(), secs);
        for (const aw::Check& c : report.checks) {
            Outcome& o = by_criterion[std::stoi(c.criterion.substr(1))];
            o.pass = o.pass && c.pass;
            o.seconds = std::max(o.seconds, c.seconds);
            std::printf("  %-4s %-44s metric %-12.4g threshold %-10.4g %s\n", c.criterion.c_str(), c.name.c_str(),
                        c.metric, c.threshold, c.pass ? "ok" : "FAIL");
            if (!c.pass) o.failures.push_back(c.name);
        }
    }
    bool all = by_criterion.size() == 11;
    for (const auto& [k, o] : by_criterion) {
        std::printf("A%-2d %s", k, o.pass ? "PASS" : "FAIL");
        for (const auto& f : o.failures) std::printf(" %s", f.c_str());
        std::printf("\n");
        all = all && o.pass;
    }
    if (by_criterion.size() != 11) std::printf("expected 11 criteria, saw %zu\n", by_criterion.size());
    return all ? 0 : 1;
}
