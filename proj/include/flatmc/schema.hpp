#pragma once

#include "flatmc/automata.hpp"
#include "flatmc/counter_system.hpp"
#include "flatmc/presburger.hpp"

#include <optional>
#include <string>
#include <vector>

namespace flatmc::schema {

struct PathSegment {
    std::vector<int> trans;  // transition ids, consecutive targets chain

    bool empty() const { return trans.empty(); }
    int size() const { return static_cast<int>(trans.size()); }
};

/// p_1 l_1^+ p_2 l_2^+ ... p_k l_k^omega with the minimality conditions:
/// p_1...p_k simple non-loop (or empty), loops transition-disjoint.
struct MinimalPathSchema {
    std::vector<PathSegment> segs;   // p_1..p_k, possibly empty entries
    std::vector<PathSegment> loops;  // l_1..l_k

    int k() const { return static_cast<int>(loops.size()); }
    int length() const;  // ell(P)
};

/// All minimal path schemas of a flat system starting at q0, ordered
/// lexicographically on their flattened transition-id sequences.
std::vector<MinimalPathSchema> enumerate_minimal_schemas(const core::CounterSystem& sys, int q0);

/// `d1 (d2 d3)+ d4 d5 (d6 d5)^w` rendering (transition ids are 1-based).
std::string schema_text(const MinimalPathSchema& p);

/// Does the lasso word prefix.cycle^omega lie in L(P)?
bool matches_lasso(const MinimalPathSchema& p, const std::vector<int>& prefix,
                   const std::vector<int>& cycle);

/// A convex window  lo <= coeffs . counters <= hi  (either bound optional).
struct ConvexCond {
    std::vector<long long> coeffs;
    std::optional<long long> lo, hi;

    bool contains(long long v) const {
        return (!lo || v >= *lo) && (!hi || v <= *hi);
    }
};

/// One loop of a schema split into phases; within a phase every tracked atom
/// keeps one convex state at every offset, so endpoint iterations pin all of
/// them (atom values are affine in the iteration index).
struct PhasedLoop {
    std::vector<int> body;
    struct Phase {
        bool omega = false;
        std::vector<std::vector<ConvexCond>> guard_conds;  // per offset: chosen branch
        // per ag atom: per offset: window + whether the atom token is present
        std::vector<std::vector<std::pair<ConvexCond, bool>>> ag_states;
    };
    std::vector<Phase> phases;
};

struct PhasedSchema {
    MinimalPathSchema base;
    std::vector<PhasedLoop> loops;  // aligned with base.loops
};

struct BuildOptions {
    presburger::SolveOptions solve;
    bool prune_infeasible = true;
};

/// All phase decompositions of `base` compatible with atom-slope direction,
/// optionally pruned by feasibility from the given initial configuration
/// (no initial configuration = symbolic initial counters z1..zn).
std::vector<PhasedSchema> guard_phase_split(const MinimalPathSchema& base,
                                            const core::CounterSystem& sys,
                                            const std::vector<core::SysAtom>& ag,
                                            const std::optional<core::Configuration>& init,
                                            const BuildOptions& opts = {});

/// Quantifier-free constraint over the phase-count variables x1..x_{K-1}
/// (plus z1..zn when init is symbolic) whose solutions are exactly the
/// count vectors of valid runs respecting the phased schema: guards at
/// endpoint iterations, nonnegativity at every offset, omega stability.
presburger::Formula generate_run_constraint(const PhasedSchema& ps, const core::CounterSystem& sys,
                                            const std::optional<core::Configuration>& init);

struct Alphabet {
    std::vector<std::string> at;
    std::vector<core::SysAtom> ag;
    std::vector<spec::Letter> letters;
};

struct Cps {
    Alphabet alphabet;
    std::vector<std::vector<spec::Letter>> segs;   // w_1..w_K
    std::vector<std::vector<spec::Letter>> loops;  // u_1..u_K, last one omega
    presburger::Formula constraint;                // vars x1..x_{K-1} (+ z1..zn)
    bool parameterized = false;

    // provenance
    int schema_index = -1;
    std::vector<std::vector<int>> seg_trans;
    std::vector<std::vector<int>> loop_trans;

    int k() const { return static_cast<int>(loops.size()); }
    std::vector<std::string> count_vars() const;  // x1..x_{K-1}
};

/// The set X of constrained path schemas for runs from c0 (or from state q0
/// with symbolic initial counters): sound and complete against the spec atoms
/// in `extra_atoms` plus the propositions of the system.
std::vector<Cps> build_constrained_schemas(const core::CounterSystem& sys, int q0,
                                           const std::optional<std::vector<long long>>& init,
                                           const std::vector<core::SysAtom>& extra_atoms,
                                           const BuildOptions& opts = {});

/// The ultimately periodic word w_1 u_1^{n_1} ... w_K u_K^omega.
spec::UpWord instantiate_word(const Cps& cps, const std::vector<Int>& counts);

/// Transition word of the run behind the instantiation (provenance replay).
std::vector<int> instantiate_transitions(const Cps& cps, const std::vector<Int>& counts,
                                         std::vector<int>& period_out);

/// Membership in X, decided by rebuilding the provenance schema and comparing
/// canonically.
bool cps_in_x(const Cps& cps, const core::CounterSystem& sys, int q0,
              const std::optional<std::vector<long long>>& init,
              const std::vector<core::SysAtom>& extra_atoms);

std::string cps_text(const Cps& cps);

}  // namespace flatmc::schema
