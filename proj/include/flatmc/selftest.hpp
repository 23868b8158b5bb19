#pragma once

#include <ostream>
#include <string>

namespace flatmc::selftest {

struct Options {
    unsigned long long seed = 42;
    bool parallel = false;
};

/// Fixed instances from the worked examples, shared by the CLI fixtures and
/// the acceptance battery.
std::string fig1_system_text();
std::string fig1_ba_text();
std::string schema_figure_system_text();

/// Runs the ten acceptance criteria, printing one PASS/FAIL line per
/// criterion; returns true iff all pass.
bool run_acceptance(const Options& opts, std::ostream& out);

}  // namespace flatmc::selftest
