#pragma once

#include "flatmc/automata.hpp"
#include "flatmc/basics.hpp"

#include <map>
#include <string>
#include <vector>

namespace flatmc::fo {

using spec::Letter;
using spec::UpWord;

/// First-order sentences over omega-words: letter predicates, successor,
/// order, equality, negation, conjunction, existential quantification.
/// Derived connectives (or, forall, implies) are desugared on construction.
struct Sentence {
    enum class Kind { AtTok, LetterIs, Succ, Lt, Eq, Not, And, Exists };
    Kind kind = Kind::AtTok;
    std::string tok;     // AtTok: token name
    Letter letter;       // LetterIs
    std::string v1, v2;  // variables (Exists binds v1)
    std::vector<Sentence> kids;

    static Sentence at(std::string tok, std::string z);
    static Sentence letter_is(Letter a, std::string z);
    static Sentence succ(std::string z1, std::string z2);
    static Sentence lt(std::string z1, std::string z2);
    static Sentence eq(std::string z1, std::string z2);
    static Sentence mk_not(Sentence f);
    static Sentence mk_and(Sentence a, Sentence b);
    static Sentence mk_or(Sentence a, Sentence b);
    static Sentence exists(std::string z, Sentence body);
    static Sentence forall(std::string z, Sentence body);
};

/// Maximum nesting depth of the existential quantifier.
int qheight(const Sentence& f);

/// u . v^omega |= f, quantifiers relativized to [0, |u| + |v| * 2^qheight).
bool fo_eval(const UpWord& w, const Sentence& f);

/// Replace token predicates by disjunctions of exact-letter predicates over
/// sigma_prime; L(f') = L(f) restricted to words over sigma_prime.
Sentence fo_translate_to_alphabet(const Sentence& f, const std::vector<Letter>& sigma_prime);

/// Loop bound for intersection with a constrained path schema:
/// 2^((qheight+2) + pol1(size) + pol2(size)) with pol1 = pol2 = log2(p*).
Int fo_loop_bound(const Sentence& f, long long cps_size);

Sentence parse_fo(const std::string& text);
std::string to_text(const Sentence& f);

}  // namespace flatmc::fo
