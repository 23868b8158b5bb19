#pragma once

#include "flatmc/automata.hpp"
#include "flatmc/counter_system.hpp"
#include "flatmc/fo.hpp"
#include "flatmc/presburger.hpp"
#include "flatmc/schema.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace flatmc::check {

enum class Answer { Sat, Unsat, Unknown };

struct Witness {
    int schema_index = -1;
    std::vector<Int> counts;
    std::vector<spec::Letter> word_prefix;
};

struct Verdict {
    Answer answer = Answer::Unknown;
    std::optional<Witness> witness;
    std::string reason;
};

struct LoopBound {
    Int value;
    std::string origin;  // "BA" or "FO" with parameters
};

/// f_BA(B, cps) = 2^pol1(|cps|) + 2 |Q|^|cps| 2^(pol1+pol2)(|cps|) with the
/// p* substitution pol1 = pol2 = 2N(N+2).
LoopBound ba_loop_bound(int n_automaton_states, long long cps_size);

struct CheckOptions {
    presburger::SolveOptions solve;
    bool parallel = false;
    bool lex_min_witness = true;
    size_t dealternation_cap = 4096;
};

/// Specification payload for the model checker.
struct Spec {
    enum class Kind { Ba, Aba, Fo } kind;
    spec::BuchiSpec ba;
    spec::AbaSpec aba;
    fo::Sentence fo;

    static Spec of(spec::BuchiSpec b) { return {Kind::Ba, std::move(b), {}, {}}; }
    static Spec of(spec::AbaSpec a) { return {Kind::Aba, {}, std::move(a), {}}; }
    static Spec of(fo::Sentence f) { return {Kind::Fo, {}, {}, std::move(f)}; }
};

/// Tokens used by a spec, split into propositions and parsed atomic guards.
void spec_atoms(const Spec& s, int dim, std::vector<core::SysAtom>& atoms,
                std::vector<std::string>& props);

/// L(cps) and L(A) intersection tests. SAT witnesses replay successfully.
Verdict intersect_ba(const schema::Cps& cps, const spec::BuchiSpec& ba,
                     const CheckOptions& opts = {});
Verdict intersect_ba_auto(const schema::Cps& cps, const spec::BuchiAutomaton& b,
                          const CheckOptions& opts = {});
Verdict intersect_fo(const schema::Cps& cps, const fo::Sentence& f,
                     const CheckOptions& opts = {});

/// Is there a run from c0 and a word of the spec the run satisfies?
Verdict model_check(const core::CounterSystem& sys, const core::Configuration& c0, const Spec& s,
                    const CheckOptions& opts = {});

/// Existential Presburger formula over z1..zn characterizing the initial
/// counter values at control state q that admit a satisfying run.
presburger::Formula global_model_check(const core::CounterSystem& sys, int q,
                                       const spec::BuchiSpec& ba, const CheckOptions& opts = {});

/// One 3-literal clause: nonzero ints, negative for negated variables.
using Clause = std::array<int, 3>;

struct SatInstance {
    core::CounterSystem sys;
    core::Configuration c0;
    spec::BuchiSpec spec;
};

/// The reachability encoding of SAT: 2n counters, one increment loop per
/// counter, a guarded final transition into an accepting sink.
SatInstance gen_sat_instance(int n_vars, const std::vector<Clause>& clauses);

}  // namespace flatmc::check
