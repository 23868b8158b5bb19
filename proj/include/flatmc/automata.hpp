#pragma once

#include "flatmc/basics.hpp"
#include "flatmc/counter_system.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace flatmc::spec {

/// A letter of a constrained alphabet: a set of tokens, each token either a
/// proposition name or the canonical text of an atomic guard.
struct Letter {
    std::set<std::string> toks;

    bool operator==(const Letter&) const = default;
    auto operator<=>(const Letter&) const = default;
    bool has(const std::string& t) const { return toks.count(t) != 0; }
    std::string text() const;
};

Letter parse_letter(const std::string& text);  // `{p,x1-x2=0}` form

/// Boolean formula over tokens; tokens absent from a letter read as false.
struct TokenFormula {
    enum class Kind { True, False, Tok, Not, And, Or };
    Kind kind = Kind::True;
    std::string tok;
    std::vector<TokenFormula> kids;

    static TokenFormula truth() { return {}; }
    static TokenFormula falsity() {
        TokenFormula f;
        f.kind = Kind::False;
        return f;
    }
    static TokenFormula mk_tok(std::string t) {
        TokenFormula f;
        f.kind = Kind::Tok;
        f.tok = std::move(t);
        return f;
    }
    static TokenFormula mk_not(TokenFormula f);
    static TokenFormula mk_and(TokenFormula a, TokenFormula b);
    static TokenFormula mk_or(TokenFormula a, TokenFormula b);

    bool eval(const Letter& a) const;
    void tokens(std::set<std::string>& out) const;
    std::string text() const;
};

/// Symbolic Buchi specification: edges carry token formulas.
struct BuchiSpec {
    std::vector<std::string> state_names;
    int initial = 0;
    std::set<int> accepting;
    struct Edge {
        int src, dst;
        TokenFormula label;
    };
    std::vector<Edge> edges;

    int n_states() const { return static_cast<int>(state_names.size()); }
    int state_id(const std::string& name) const;
    int add_state(const std::string& name);
    /// all tokens used on edges
    std::set<std::string> tokens() const;
};

/// Explicit Buchi automaton over concrete letters.
struct BuchiAutomaton {
    int n_states = 0;
    int initial = 0;
    std::set<int> accepting;
    std::vector<std::tuple<int, Letter, int>> transitions;
};

/// Alternating Buchi specification: positive Boolean successor formulas.
struct PosBool {
    enum class Kind { True, False, State, And, Or };
    Kind kind = Kind::True;
    int state = 0;
    std::vector<PosBool> kids;

    static PosBool truth() { return {}; }
    static PosBool falsity() {
        PosBool f;
        f.kind = Kind::False;
        return f;
    }
    static PosBool mk_state(int s) {
        PosBool f;
        f.kind = Kind::State;
        f.state = s;
        return f;
    }
    static PosBool mk_and(PosBool a, PosBool b);
    static PosBool mk_or(PosBool a, PosBool b);

    /// antichain of minimal models (as sorted state sets)
    std::vector<std::vector<int>> minimal_models() const;
};

struct AbaSpec {
    std::vector<std::string> state_names;
    int initial = 0;
    std::set<int> accepting;
    struct Edge {
        int src;
        TokenFormula label;
        PosBool succ;
    };
    std::vector<Edge> edges;

    int n_states() const { return static_cast<int>(state_names.size()); }
    int state_id(const std::string& name) const;
    int add_state(const std::string& name);
    std::set<std::string> tokens() const;
};

/// Ultimately periodic word u . v^omega.
struct UpWord {
    std::vector<Letter> prefix;
    std::vector<Letter> period;

    const Letter& letter_at(const Int& i) const;
    bool operator==(const UpWord&) const = default;
};

/// Explicit expansion of a symbolic spec over a finite letter set.
BuchiAutomaton expand(const BuchiSpec& spec, const std::vector<Letter>& sigma);

/// Restriction to a subalphabet: label beta becomes (OR_a phi_a) AND beta.
/// The token universe is the union of the spec's tokens and the letters'.
BuchiSpec restrict_subalphabet(const BuchiSpec& spec, const std::vector<Letter>& sigma_prime);
AbaSpec restrict_subalphabet(const AbaSpec& spec, const std::vector<Letter>& sigma_prime);

/// u . v^omega in L(B)?  Deterministic (q_f, j) sweep: prefix reach by subset
/// simulation, loop side by cycle reachability in the product with the cyclic
/// automaton of v.
bool membership(const UpWord& w, const BuchiAutomaton& b);

/// Same check on a block word (letters^count factors) without unrolling:
/// per-block transition relations composed by repeated squaring.
struct Block {
    std::vector<Letter> body;
    Int count;  // >= 0
};
bool membership_blocks(const std::vector<Block>& prefix, const std::vector<Letter>& period,
                       const BuchiAutomaton& b);

/// Behavioral interface for automata too large to materialize.
struct ImplicitBuchi {
    using State = std::vector<int>;
    virtual ~ImplicitBuchi() = default;
    virtual State initial_state() const = 0;
    virtual bool is_accepting(const State& s) const = 0;
    virtual std::vector<State> successors(const State& s, const Letter& a) const = 0;
};

/// Same verdict as membership on the explicit expansion; memory bounded by the
/// reachable part.
bool membership_onthefly(const UpWord& w, const ImplicitBuchi& b);

/// Plain wrapper so explicit automata can be consumed through the interface.
class ExplicitAsImplicit final : public ImplicitBuchi {
  public:
    explicit ExplicitAsImplicit(const BuchiAutomaton& b) : b_(b) {}
    State initial_state() const override { return {b_.initial}; }
    bool is_accepting(const State& s) const override { return b_.accepting.count(s.at(0)) != 0; }
    std::vector<State> successors(const State& s, const Letter& a) const override;
    mutable long long probe_count = 0;

  private:
    const BuchiAutomaton& b_;
};

/// Miyano-Hayashi dealternation as an implicit automaton; states are (S, O)
/// pairs encoded as [|S|, S..., O...], accepting iff O is empty.
class Dealternated final : public ImplicitBuchi {
  public:
    Dealternated(const AbaSpec& aba);
    State initial_state() const override;
    bool is_accepting(const State& s) const override;
    std::vector<State> successors(const State& s, const Letter& a) const override;

  private:
    const AbaSpec& aba_;
    PosBool delta(int q, const Letter& a) const;
};

/// Reachable explicit expansion of an implicit automaton over a finite letter
/// set; nullopt if more than `state_cap` states get materialized.
std::optional<BuchiAutomaton> expand_reachable(const ImplicitBuchi& b,
                                               const std::vector<Letter>& sigma,
                                               size_t state_cap = 4096);

BuchiSpec parse_ba(const std::string& text);
AbaSpec parse_aba(const std::string& text);
UpWord parse_word(const std::string& text);
std::string to_text(const BuchiSpec& spec);
std::string to_text(const UpWord& w);

}  // namespace flatmc::spec
