#pragma once

#include "flatmc/basics.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace flatmc::presburger {

/// Linear atom  sum_i coeffs[v_i]*v_i  cmp  rhs  over nonnegative integer variables.
struct LinearAtom {
    std::map<std::string, long long> coeffs;
    Cmp cmp = Cmp::Eq;
    long long rhs = 0;

    bool operator==(const LinearAtom&) const = default;
};

class Formula {
  public:
    enum class Kind { True, False, Atom, Not, And, Or };

    Kind kind = Kind::True;
    LinearAtom atom;              // Kind::Atom
    std::vector<Formula> kids;    // Not (1), And/Or (n)

    static Formula truth() { return Formula{}; }
    static Formula falsity() {
        Formula f;
        f.kind = Kind::False;
        return f;
    }
    static Formula mk_atom(LinearAtom a);
    static Formula mk_not(Formula f);
    static Formula mk_and(std::vector<Formula> fs);
    static Formula mk_or(std::vector<Formula> fs);

    bool operator==(const Formula&) const = default;
};

std::set<std::string> free_vars(const Formula& f);

/// Standard semantics over N; throws UnboundVariable if asg misses a free variable.
bool eval(const Formula& f, const std::map<std::string, Int>& asg);

/// Formula size measure N: atoms + connectives + total coefficient bit-length.
/// Only scales the safeguard box, never correctness.
long long size_measure(const Formula& f);

struct SmallModelBound {
    long long n_vars = 0;
    long long size_n = 0;
    Int box;  // p*(N) = 2^(2N(N+2))
};

SmallModelBound small_model_box(const Formula& f);

struct SolveOptions {
    /// Hard cap on the search box; a theoretical box beyond it makes exhaustion
    /// report Unknown instead of Unsat.
    Int box_cap = Int(1) << 40;
    long long node_budget = 2'000'000;
    bool lex_min_witness = false;
};

enum class SolveStatus { Sat, Unsat, Unknown };

struct SolveResult {
    SolveStatus status = SolveStatus::Unknown;
    std::map<std::string, Int> witness;  // set iff Sat; eval-verified
    std::string reason;                  // set iff Unknown
};

/// Exact feasibility over N. Sat results always carry an eval-verified witness.
SolveResult feasible(const Formula& f, const SolveOptions& opts = {});

struct SemilinearWitness {
    std::vector<Int> base;
    std::vector<std::vector<Int>> periods;
    std::vector<Int> multipliers;
};

/// Text dialect. to_text is canonical prefix notation; parse also accepts the
/// sugared infix guard syntax (`2*x1 - x2 <= 4`, `&`, `|`, `!`).
std::string to_text(const Formula& f);
Formula parse(const std::string& text);

/// Explicit finite automaton over a finite alphabet, for Parikh-image formulas.
struct Nfa {
    int n_states = 0;
    int initial = 0;
    std::set<int> finals;
    std::vector<std::string> letters;                    // letter id -> variable name
    std::vector<std::tuple<int, int, int>> transitions;  // (src, letter id, dst)
};

/// Existential-Presburger characterization of the Parikh image of L(nfa):
/// flow variables per transition, per-state conservation, depth-based
/// connectivity. Solutions projected to the letter variables equal the Parikh
/// image; auxiliary variables are named `_f<i>`, `_d<s>`, `_e<s>`.
Formula parikh_formula(const Nfa& nfa, const std::string& aux_prefix = "");

}  // namespace flatmc::presburger
