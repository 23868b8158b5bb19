#pragma once

#include "flatmc/automata.hpp"
#include "flatmc/counter_system.hpp"
#include "flatmc/fo.hpp"

#include <optional>
#include <string>
#include <vector>

namespace flatmc::oracle {

/// Brute-force reference answers. TRUE carries a concrete lasso; FALSE is
/// asserted only when the capped search space is provably exhaustive.
struct OracleVerdict {
    enum class Answer { True, False, Inconclusive } answer = Answer::Inconclusive;
    long long explored = 0;
    int count_cap = 0;
    std::string justification;
    // TRUE evidence
    std::vector<int> lasso_prefix;
    std::vector<int> lasso_cycle;
};

/// A lasso-shaped run discovered by exhaustive enumeration: the transition
/// prefix, the cycle, and the letter word it induces.
struct OracleLasso {
    std::vector<int> prefix;
    std::vector<int> cycle;
    spec::UpWord word;
};

/// All valid lasso runs from c0 whose loop repetitions stay within count_cap,
/// found by schema-shaped enumeration with explicit stepping. `exhaustive` is
/// set when no valid run can exceed the caps.
std::vector<OracleLasso> enumerate_lassos(const core::CounterSystem& sys,
                                          const core::Configuration& c0,
                                          const std::vector<core::SysAtom>& letter_atoms,
                                          int count_cap, bool& exhaustive);

/// Is there a run from c0 satisfying some word of the spec? Explicit loop
/// unrolling and naive automaton simulation only.
OracleVerdict oracle_mc_ba(const core::CounterSystem& sys, const core::Configuration& c0,
                           const spec::BuchiSpec& ba, int count_cap);

/// Naive FO evaluation over an explicitly materialized length-L letter array.
bool oracle_fo_eval(const spec::UpWord& w, const fo::Sentence& f, long long len);

/// Truth-table satisfiability, n <= 16 variables.
bool oracle_sat(int n_vars, const std::vector<std::array<int, 3>>& clauses);

/// Naive explicit membership of u.v^omega, coded independently of the main
/// automata module (pure product-graph search).
bool oracle_membership(const spec::UpWord& w, const spec::BuchiAutomaton& b);

/// The letter a run position induces: state propositions plus the atoms that
/// hold on the counters.
spec::Letter letter_of(const core::CounterSystem& sys, const core::Configuration& c,
                       const std::vector<core::SysAtom>& atoms);

/// Validity of repeating `cycle` forever from `entry`, decided exactly via
/// affine stabilization; returns the consumed warmup letters and the
/// stabilized period letters.
std::optional<std::pair<std::vector<spec::Letter>, std::vector<spec::Letter>>> omega_tail(
    const core::CounterSystem& sys, const core::Configuration& entry,
    const std::vector<int>& cycle, const std::vector<core::SysAtom>& letter_atoms);

}  // namespace flatmc::oracle
