#pragma once

#include "flatmc/automata.hpp"
#include "flatmc/checker.hpp"
#include "flatmc/counter_system.hpp"
#include "flatmc/fo.hpp"
#include "flatmc/presburger.hpp"

#include <random>
#include <string>
#include <vector>

namespace flatmc::randgen {

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(unsigned long long seed) : eng(seed) {}
    long long irange(long long lo, long long hi) {  // inclusive
        return std::uniform_int_distribution<long long>(lo, hi)(eng);
    }
    bool coin(double p = 0.5) { return std::uniform_real_distribution<>(0, 1)(eng) < p; }
    template <typename T>
    const T& pick(const std::vector<T>& xs) {
        return xs[static_cast<size_t>(irange(0, static_cast<long long>(xs.size()) - 1))];
    }
};

struct SysParams {
    int max_states = 4;
    int max_transitions = 6;
    int dim = 2;
    long long update_lo = -2, update_hi = 2;
    double guard_atom_prob = 0.25;
    long long guard_rhs_hi = 4;
    std::vector<std::string> props = {"p", "q"};
};

core::CounterSystem random_flat_system(Rng& rng, const SysParams& p = {});
core::Configuration random_config(Rng& rng, const core::CounterSystem& sys, long long max_val);

core::SysAtom random_atom(Rng& rng, int dim, long long rhs_hi, bool allow_eq = true);

spec::BuchiSpec random_ba(Rng& rng, const std::vector<std::string>& props,
                          const std::vector<std::string>& atom_tokens, int max_states);

/// Explicit automaton over a concrete letter set (dense random edges).
spec::BuchiAutomaton random_explicit_ba(Rng& rng, const std::vector<spec::Letter>& sigma,
                                        int n_states);

/// ABA accepting L(b1) ∩ L(b2): fresh initial state conjoining both initials.
spec::AbaSpec conjunction_aba(const spec::BuchiSpec& b1, const spec::BuchiSpec& b2);

/// Classic two-flag product automaton for the same intersection, used as the
/// explicit oracle against dealternation.
spec::BuchiAutomaton intersection_product(const spec::BuchiAutomaton& b1,
                                          const spec::BuchiAutomaton& b2);

fo::Sentence random_fo(Rng& rng, const std::vector<std::string>& tokens, int qheight_budget,
                       int size_budget);

spec::UpWord random_word(Rng& rng, const std::vector<spec::Letter>& sigma, int max_prefix,
                         int max_period);

presburger::Formula random_formula(Rng& rng, const std::vector<std::string>& vars, int depth,
                                   long long coef_hi, long long rhs_hi);

presburger::Nfa random_nfa(Rng& rng, int max_states, int n_letters);

std::vector<check::Clause> random_cnf(Rng& rng, int n_vars, int n_clauses);

std::vector<spec::Letter> letter_universe(const std::vector<std::string>& toks);

}  // namespace flatmc::randgen
