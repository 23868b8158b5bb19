#pragma once

#include "flatmc/basics.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace flatmc::core {

/// Atomic guard  sum_i coeffs[i]*x_{i+1}  cmp  rhs  over the system counters.
struct SysAtom {
    std::vector<long long> coeffs;
    Cmp cmp = Cmp::Eq;
    long long rhs = 0;

    bool operator==(const SysAtom&) const = default;
    auto operator<=>(const SysAtom&) const = default;

    bool holds(const std::vector<long long>& v) const;
    /// canonical token form, e.g. `x1-2*x2<=4` (used as alphabet letters)
    std::string token() const;
};

/// Boolean combination of atomic guards with constants.
struct Guard {
    enum class Kind { True, False, Atom, Not, And, Or };
    Kind kind = Kind::True;
    SysAtom atom;
    std::vector<Guard> kids;

    static Guard truth() { return {}; }
    static Guard falsity() {
        Guard g;
        g.kind = Kind::False;
        return g;
    }
    static Guard mk_atom(SysAtom a) {
        Guard g;
        g.kind = Kind::Atom;
        g.atom = std::move(a);
        return g;
    }
    static Guard mk_not(Guard g);
    static Guard mk_and(Guard a, Guard b);
    static Guard mk_or(Guard a, Guard b);

    bool operator==(const Guard&) const = default;
};

bool eval_guard(const Guard& g, const std::vector<long long>& v, int dim);
void collect_atoms(const Guard& g, std::vector<SysAtom>& out);

struct Transition {
    int src = 0;
    int dst = 0;
    Guard guard;
    std::vector<long long> update;
};

struct CounterSystem {
    int dim = 0;
    std::vector<std::string> state_names;
    std::vector<std::set<std::string>> labels;  // per state
    std::vector<Transition> transitions;

    int n_states() const { return static_cast<int>(state_names.size()); }
    int state_id(const std::string& name) const;  // -1 if unknown
    int add_state(const std::string& name, std::set<std::string> props = {});
    void add_transition(int src, int dst, Guard g, std::vector<long long> update);

    std::vector<int> out_transitions(int state) const;
    /// all proposition names used in labels, sorted
    std::vector<std::string> propositions() const;
    /// all atomic guards occurring in transition guards, deduplicated, sorted
    std::vector<SysAtom> guard_atoms() const;
};

struct Configuration {
    int state = 0;
    std::vector<long long> counters;

    bool operator==(const Configuration&) const = default;
};

struct Run {
    Configuration start;
    std::vector<int> steps;              // transition ids
    std::vector<Configuration> configs;  // configs[0] == start, size == steps+1
};

bool eval_guard(const CounterSystem& sys, const Guard& g, const std::vector<long long>& v);

/// One transition step; throws WrongSource / GuardFailed / NonNegativityViolation.
Configuration step(const CounterSystem& sys, const Configuration& c, int transition);

/// true iff every state lies on at most one simple cycle (no edge repeated).
bool is_flat(const CounterSystem& sys);

/// For flat systems: the unique simple cycle through `state` as a transition
/// sequence starting and ending at `state`, if any.
std::optional<std::vector<int>> cycle_at(const CounterSystem& sys, int state);

/// Exhaustive BFS of the reachable transition system, runs of length <= depth.
std::vector<Run> enumerate_runs(const CounterSystem& sys, const Configuration& c0, int depth);

/// Text DSL.
CounterSystem parse_system(const std::string& text);
std::string to_text(const CounterSystem& sys);
Guard parse_guard(const std::string& text, int dim);

}  // namespace flatmc::core
