#include "flatmc/checker.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace flatmc::check {

using core::CounterSystem;
using core::SysAtom;
using presburger::Formula;
using presburger::LinearAtom;
using presburger::SolveStatus;
using schema::Cps;
using spec::BuchiAutomaton;
using spec::BuchiSpec;
using spec::Letter;

LoopBound ba_loop_bound(int n_automaton_states, long long cps_size) {
    long long n = std::max<long long>(cps_size, 1);
    long long pol = n > 2000 ? 4'000'000 : 2 * n * (n + 2);
    unsigned pol_c = static_cast<unsigned>(std::min<long long>(pol, 2'000'000));
    Int q = n_automaton_states;
    Int power = 1;
    for (long long i = 0; i < std::min<long long>(n, 64); ++i) power *= std::max<Int>(q, 1);
    LoopBound b;
    b.value = (Int(1) << pol_c) + 2 * power * (Int(1) << std::min<unsigned>(2 * pol_c, 4'000'000));
    b.origin = "BA(|Q|=" + std::to_string(n_automaton_states) + ",|cps|=" + std::to_string(n) + ")";
    return b;
}

namespace {

long long cps_size_measure(const Cps& cps) {
    long long len = 0;
    for (const auto& s : cps.segs) len += static_cast<long long>(s.size());
    for (const auto& l : cps.loops) len += static_cast<long long>(l.size());
    return 2 * cps.k() + len + presburger::size_measure(cps.constraint);
}

// can (qf, off) reach itself through >= 1 steps in the product with cyclic v?
bool cycle_back(const BuchiAutomaton& b, const std::vector<Letter>& v, int qf, size_t off) {
    size_t L = v.size();
    std::set<std::pair<int, size_t>> seen;
    std::deque<std::pair<int, size_t>> queue;
    for (const auto& [src, lab, dst] : b.transitions)
        if (src == qf && lab == v[off]) {
            auto n = std::make_pair(dst, (off + 1) % L);
            if (seen.insert(n).second) queue.push_back(n);
        }
    while (!queue.empty()) {
        auto [q, i] = queue.front();
        queue.pop_front();
        if (q == qf && i == off) return true;
        for (const auto& [src, lab, dst] : b.transitions)
            if (src == q && lab == v[i]) {
                auto n = std::make_pair(dst, (i + 1) % L);
                if (seen.insert(n).second) queue.push_back(n);
            }
    }
    return false;
}

struct SkeletonPos {
    Letter letter;
    int loop = -1;  // loop index owning the position, -1 for segment positions
};

// linear skeleton of the cps prefix w_1 u_1^* ... w_K u_K[1..j] as an NFA over
// unique position letters; loop blocks force complete passes
struct Skeleton {
    std::vector<SkeletonPos> positions;
    presburger::Nfa nfa;  // letters = position indices
    int end_state = -1;
};

Skeleton build_skeleton(const Cps& cps, size_t j) {
    Skeleton sk;
    auto add_pos = [&](const Letter& a, int loop) {
        sk.positions.push_back({a, loop});
        sk.nfa.letters.push_back("_p" + std::to_string(sk.positions.size() - 1));
        return static_cast<int>(sk.positions.size() - 1);
    };
    int cur = 0;
    sk.nfa.n_states = 1;
    auto fresh = [&] { return sk.nfa.n_states++; };
    auto edge = [&](int a, int pos, int b2) { sk.nfa.transitions.emplace_back(a, pos, b2); };
    for (int i = 0; i < cps.k(); ++i) {
        for (const auto& a : cps.segs[i]) {
            int p = add_pos(a, -1);
            int nxt = fresh();
            edge(cur, p, nxt);
            cur = nxt;
        }
        if (i + 1 < cps.k()) {
            const auto& body = cps.loops[i];
            std::vector<int> pos_ids;
            for (const auto& a : body) pos_ids.push_back(add_pos(a, i));
            // entry E = cur; chain through c1..c_{L-1} to X; X loops back
            int x = -1;
            std::vector<int> chain;  // c1..c_{L-1}
            for (size_t o = 0; o + 1 < body.size(); ++o) chain.push_back(fresh());
            x = fresh();
            int prev = cur;
            for (size_t o = 0; o < body.size(); ++o) {
                int nxt = o + 1 < body.size() ? chain[o] : x;
                edge(prev, pos_ids[o], nxt);
                prev = nxt;
            }
            // another pass from X re-enters the chain
            int back_first = body.size() > 1 ? chain[0] : x;
            edge(x, pos_ids[0], back_first);
            cur = x;
        } else {
            // u_K[1..j]
            for (size_t o = 0; o < j; ++o) {
                int p = add_pos(cps.loops[i][o], -1);
                int nxt = fresh();
                edge(cur, p, nxt);
                cur = nxt;
            }
        }
    }
    sk.end_state = cur;
    sk.nfa.initial = 0;
    sk.nfa.finals = {cur};
    return sk;
}

// product of the skeleton with an explicit automaton read as an NFA with the
// single final state qf; Parikh letters stay the skeleton positions
presburger::Nfa product_nfa(const Skeleton& sk, const BuchiAutomaton& b, int qf,
                            int& final_state) {
    presburger::Nfa out;
    out.letters = sk.nfa.letters;
    std::map<std::pair<int, int>, int> ids;
    auto intern = [&](int s, int q) {
        auto key = std::make_pair(s, q);
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        int id = out.n_states++;
        ids.emplace(key, id);
        return id;
    };
    int init = intern(sk.nfa.initial, b.initial);
    out.initial = init;
    // group automaton transitions per letter for the join
    for (const auto& [s, pos, s2] : sk.nfa.transitions) {
        const Letter& a = sk.positions[pos].letter;
        for (const auto& [q, lab, q2] : b.transitions) {
            if (!(lab == a)) continue;
            out.transitions.emplace_back(intern(s, q), pos, intern(s2, q2));
        }
    }
    final_state = intern(sk.end_state, qf);
    out.finals = {final_state};
    return out;
}

Formula count_ties(const Skeleton& sk, const Cps& cps) {
    std::vector<Formula> conj;
    for (size_t p = 0; p < sk.positions.size(); ++p) {
        LinearAtom a;
        a.cmp = Cmp::Eq;
        a.coeffs[sk.nfa.letters[p]] = 1;
        if (sk.positions[p].loop < 0) {
            a.rhs = 1;
        } else {
            a.coeffs["x" + std::to_string(sk.positions[p].loop + 1)] = -1;
            a.rhs = 0;
        }
        conj.push_back(Formula::mk_atom(std::move(a)));
    }
    return Formula::mk_and(std::move(conj));
}

std::vector<Int> counts_from_witness(const Cps& cps,
                                     const std::map<std::string, Int>& witness) {
    std::vector<Int> counts;
    for (const auto& v : cps.count_vars()) {
        auto it = witness.find(v);
        counts.push_back(it == witness.end() ? Int(1) : it->second);
    }
    return counts;
}

bool validate_ba_witness(const Cps& cps, const std::vector<Int>& counts,
                         const BuchiAutomaton& b) {
    std::map<std::string, Int> asg;
    for (size_t i = 0; i < counts.size(); ++i) asg["x" + std::to_string(i + 1)] = counts[i];
    for (const auto& v : presburger::free_vars(cps.constraint))
        if (!asg.count(v)) asg[v] = 0;
    if (!cps.parameterized && !presburger::eval(cps.constraint, asg)) return false;
    // block representation keeps huge counts tractable
    std::vector<spec::Block> blocks;
    for (int i = 0; i < cps.k(); ++i) {
        if (!cps.segs[i].empty()) blocks.push_back({cps.segs[i], 1});
        if (i + 1 < cps.k()) blocks.push_back({cps.loops[i], counts[i]});
    }
    return spec::membership_blocks(blocks, cps.loops.back(), b);
}

Witness make_witness(const Cps& cps, std::vector<Int> counts) {
    Witness w;
    w.schema_index = cps.schema_index;
    w.counts = std::move(counts);
    // a short prefix of the word for reporting
    bool small = true;
    for (const auto& c : w.counts)
        if (c > 64) small = false;
    if (small) {
        auto word = schema::instantiate_word(cps, w.counts);
        size_t n = std::min<size_t>(word.prefix.size(), 32);
        w.word_prefix.assign(word.prefix.begin(), word.prefix.begin() + n);
    }
    return w;
}

}  // namespace

void spec_atoms(const Spec& s, int dim, std::vector<SysAtom>& atoms,
                std::vector<std::string>& props) {
    std::set<std::string> toks;
    if (s.kind == Spec::Kind::Ba) toks = s.ba.tokens();
    else if (s.kind == Spec::Kind::Aba) toks = s.aba.tokens();
    else {
        std::function<void(const fo::Sentence&)> walk = [&](const fo::Sentence& f) {
            if (f.kind == fo::Sentence::Kind::AtTok) toks.insert(f.tok);
            if (f.kind == fo::Sentence::Kind::LetterIs)
                toks.insert(f.letter.toks.begin(), f.letter.toks.end());
            for (const auto& k : f.kids) walk(k);
        };
        walk(s.fo);
    }
    std::set<SysAtom> atom_set;
    std::set<std::string> prop_set;
    for (const auto& t : toks) {
        if (t.find_first_of("<>=") != std::string::npos) {
            core::Guard g = core::parse_guard(t, dim);
            if (g.kind == core::Guard::Kind::Atom) atom_set.insert(g.atom);
        } else {
            prop_set.insert(t);
        }
    }
    atoms.assign(atom_set.begin(), atom_set.end());
    props.assign(prop_set.begin(), prop_set.end());
}

Verdict intersect_ba_auto(const Cps& cps, const BuchiAutomaton& b, const CheckOptions& opts) {
    Verdict out;
    out.answer = Answer::Unsat;
    if (b.accepting.empty()) return out;
    const auto& period = cps.loops.back();
    bool any_unknown = false;
    for (int qf : b.accepting) {
        for (size_t j = 1; j <= period.size(); ++j) {
            if (!cycle_back(b, period, qf, j % period.size())) continue;
            Skeleton sk = build_skeleton(cps, j);
            int final_state = -1;
            presburger::Nfa prod = product_nfa(sk, b, qf, final_state);
            std::vector<Formula> parts;
            parts.push_back(presburger::parikh_formula(prod));
            parts.push_back(count_ties(sk, cps));
            parts.push_back(cps.constraint);
            presburger::SolveOptions sopts = opts.solve;
            sopts.lex_min_witness = opts.lex_min_witness;
            auto res = presburger::feasible(Formula::mk_and(std::move(parts)), sopts);
            if (res.status == SolveStatus::Sat) {
                auto counts = counts_from_witness(cps, res.witness);
                if (!cps.parameterized && !validate_ba_witness(cps, counts, b)) {
                    any_unknown = true;  // never report an unvalidated SAT
                    continue;
                }
                out.answer = Answer::Sat;
                out.witness = make_witness(cps, std::move(counts));
                return out;
            }
            if (res.status == SolveStatus::Unknown) {
                any_unknown = true;
                out.reason = res.reason;
            }
        }
    }
    if (any_unknown) out.answer = Answer::Unknown;
    return out;
}

Verdict intersect_ba(const Cps& cps, const BuchiSpec& ba, const CheckOptions& opts) {
    BuchiSpec restricted = spec::restrict_subalphabet(ba, cps.alphabet.letters);
    BuchiAutomaton b = spec::expand(restricted, cps.alphabet.letters);
    return intersect_ba_auto(cps, b, opts);
}

Verdict intersect_fo(const Cps& cps, const fo::Sentence& f, const CheckOptions& opts) {
    Verdict out;
    out.answer = Answer::Unsat;
    fo::Sentence ff = fo::fo_translate_to_alphabet(f, cps.alphabet.letters);
    int n = fo::qheight(ff);
    Int stutter_cap = (Int(1) << (n + 1)) + 1;
    Int cap = std::min(stutter_cap, fo::fo_loop_bound(ff, cps_size_measure(cps)));
    int k1 = cps.k() - 1;

    bool any_unknown = false;
    std::vector<Int> profile(k1, 1);
    // depth-first over count profiles 1..cap ("cap" standing for "at least cap"),
    // pruning by prefix feasibility of the schema constraint
    std::function<bool(int, std::vector<Formula>&)> rec = [&](int idx,
                                                              std::vector<Formula>& pins) -> bool {
        std::vector<Formula> parts = pins;
        parts.push_back(cps.constraint);
        presburger::SolveOptions sopts = opts.solve;
        sopts.lex_min_witness = opts.lex_min_witness && idx == k1;
        auto res = presburger::feasible(Formula::mk_and(std::move(parts)), sopts);
        if (res.status == SolveStatus::Unknown) {
            any_unknown = true;
            out.reason = res.reason;
            return false;
        }
        if (res.status == SolveStatus::Unsat) return false;
        if (idx == k1) {
            if (!fo::fo_eval(schema::instantiate_word(cps, profile), ff)) return false;
            auto counts = counts_from_witness(cps, res.witness);
            // stuttering keeps the verdict stable above the cap, so the
            // witness counts inherit the profile's evaluation
            out.answer = Answer::Sat;
            out.witness = make_witness(cps, std::move(counts));
            return true;
        }
        for (Int m = 1; m <= cap; ++m) {
            profile[idx] = m;
            LinearAtom pin;
            pin.coeffs["x" + std::to_string(idx + 1)] = 1;
            pin.cmp = m == cap ? Cmp::Ge : Cmp::Eq;
            pin.rhs = m.convert_to<long long>();
            pins.push_back(Formula::mk_atom(pin));
            bool hit = rec(idx + 1, pins);
            pins.pop_back();
            if (hit) return true;
        }
        return false;
    };
    std::vector<Formula> pins;
    if (rec(0, pins)) return out;
    if (any_unknown) out.answer = Answer::Unknown;
    return out;
}

Verdict model_check(const CounterSystem& sys, const core::Configuration& c0, const Spec& s,
                    const CheckOptions& opts) {
    if (!core::is_flat(sys)) throw NotFlat("system is not flat");
    std::vector<SysAtom> atoms;
    std::vector<std::string> props;
    spec_atoms(s, sys.dim, atoms, props);
    schema::BuildOptions bopts;
    bopts.solve = opts.solve;
    auto xs = schema::build_constrained_schemas(sys, c0.state, c0.counters, atoms, bopts);

    std::vector<Verdict> verdicts(xs.size());
    auto run_one = [&](size_t i) {
        const Cps& cps = xs[i];
        if (s.kind == Spec::Kind::Ba) {
            verdicts[i] = intersect_ba(cps, s.ba, opts);
        } else if (s.kind == Spec::Kind::Fo) {
            verdicts[i] = intersect_fo(cps, s.fo, opts);
        } else {
            spec::AbaSpec restricted = spec::restrict_subalphabet(s.aba, cps.alphabet.letters);
            spec::Dealternated impl(restricted);
            auto expanded = spec::expand_reachable(impl, cps.alphabet.letters,
                                                   opts.dealternation_cap);
            if (!expanded) {
                verdicts[i].answer = Answer::Unknown;
                verdicts[i].reason = "dealternation exceeded the state cap";
                return;
            }
            verdicts[i] = intersect_ba_auto(cps, *expanded, opts);
        }
    };
#ifdef _OPENMP
    if (opts.parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(xs.size()); ++i) run_one(i);
    } else {
        for (size_t i = 0; i < xs.size(); ++i) run_one(i);
    }
#else
    for (size_t i = 0; i < xs.size(); ++i) run_one(i);
#endif

    Verdict merged;
    merged.answer = Answer::Unsat;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (verdicts[i].answer == Answer::Sat) return verdicts[i];
        if (verdicts[i].answer == Answer::Unknown) {
            merged.answer = Answer::Unknown;
            if (merged.reason.empty()) merged.reason = verdicts[i].reason;
        }
    }
    return merged;
}

presburger::Formula global_model_check(const CounterSystem& sys, int q, const BuchiSpec& ba,
                                       const CheckOptions& opts) {
    if (!core::is_flat(sys)) throw NotFlat("system is not flat");
    std::vector<SysAtom> atoms;
    std::vector<std::string> props;
    spec_atoms(Spec::of(ba), sys.dim, atoms, props);
    schema::BuildOptions bopts;
    bopts.solve = opts.solve;
    auto xs = schema::build_constrained_schemas(sys, q, std::nullopt, atoms, bopts);

    std::vector<Formula> disjuncts;
    int block = 0;
    for (const auto& cps : xs) {
        BuchiSpec restricted = spec::restrict_subalphabet(ba, cps.alphabet.letters);
        BuchiAutomaton b = spec::expand(restricted, cps.alphabet.letters);
        if (b.accepting.empty()) continue;
        const auto& period = cps.loops.back();
        for (int qf : b.accepting) {
            for (size_t j = 1; j <= period.size(); ++j) {
                if (!cycle_back(b, period, qf, j % period.size())) continue;
                Skeleton sk = build_skeleton(cps, j);
                int final_state = -1;
                presburger::Nfa prod = product_nfa(sk, b, qf, final_state);
                std::string prefix = "g" + std::to_string(block++);
                for (auto& l : prod.letters) l = prefix + l;
                std::vector<Formula> parts;
                parts.push_back(presburger::parikh_formula(prod, prefix));
                // ties between block counts and schema count variables
                {
                    std::vector<Formula> ties;
                    for (size_t p = 0; p < sk.positions.size(); ++p) {
                        LinearAtom a;
                        a.cmp = Cmp::Eq;
                        a.coeffs[prod.letters[p]] = 1;
                        if (sk.positions[p].loop < 0) {
                            a.rhs = 1;
                        } else {
                            a.coeffs["x" + std::to_string(sk.positions[p].loop + 1)] = -1;
                            a.rhs = 0;
                        }
                        ties.push_back(Formula::mk_atom(std::move(a)));
                    }
                    parts.push_back(Formula::mk_and(std::move(ties)));
                }
                parts.push_back(cps.constraint);
                // schema count variables are block-local too
                Formula dis = Formula::mk_and(std::move(parts));
                std::function<void(Formula&)> rename = [&](Formula& f) {
                    if (f.kind == Formula::Kind::Atom) {
                        LinearAtom na;
                        na.cmp = f.atom.cmp;
                        na.rhs = f.atom.rhs;
                        for (const auto& [v, c] : f.atom.coeffs) {
                            if (!v.empty() && v[0] == 'x') na.coeffs[prefix + "_" + v] = c;
                            else na.coeffs[v] = c;
                        }
                        f = Formula::mk_atom(std::move(na));
                        return;
                    }
                    for (auto& kf : f.kids) rename(kf);
                };
                rename(dis);
                disjuncts.push_back(std::move(dis));
            }
        }
    }
    return Formula::mk_or(std::move(disjuncts));
}

SatInstance gen_sat_instance(int n_vars, const std::vector<Clause>& clauses) {
    SatInstance inst;
    CounterSystem& sys = inst.sys;
    sys.dim = 2 * n_vars;
    // one state per counter with an increment self-loop, then a guarded hop
    // into the accepting sink
    for (int i = 0; i < 2 * n_vars; ++i) sys.add_state("t" + std::to_string(i + 1));
    int qf = sys.add_state("qf", {"goal"});
    for (int i = 0; i < 2 * n_vars; ++i) {
        std::vector<long long> inc(sys.dim, 0);
        inc[i] = 1;
        sys.add_transition(i, i, core::Guard::truth(), std::move(inc));
        std::vector<long long> zero(sys.dim, 0);
        if (i + 1 < 2 * n_vars) {
            sys.add_transition(i, i + 1, core::Guard::truth(), std::move(zero));
        }
    }
    // guard: every loop taken once or twice, x_i + x'_i = 3, every clause sum > 3
    core::Guard g = core::Guard::truth();
    auto conj = [&](core::Guard h) { g = core::Guard::mk_and(std::move(g), std::move(h)); };
    auto unit_atom = [&](int idx, Cmp cmp, long long rhs) {
        SysAtom a;
        a.coeffs.assign(sys.dim, 0);
        a.coeffs[idx] = 1;
        a.cmp = cmp;
        a.rhs = rhs;
        return core::Guard::mk_atom(std::move(a));
    };
    for (int i = 0; i < 2 * n_vars; ++i) {
        conj(unit_atom(i, Cmp::Ge, 1));
        conj(unit_atom(i, Cmp::Le, 2));
    }
    for (int i = 0; i < n_vars; ++i) {
        SysAtom a;
        a.coeffs.assign(sys.dim, 0);
        a.coeffs[i] = 1;
        a.coeffs[n_vars + i] = 1;
        a.cmp = Cmp::Eq;
        a.rhs = 3;
        conj(core::Guard::mk_atom(std::move(a)));
    }
    for (const auto& cl : clauses) {
        SysAtom a;
        a.coeffs.assign(sys.dim, 0);
        for (int lit : cl) {
            int v = lit > 0 ? lit : -lit;
            int idx = lit > 0 ? v - 1 : n_vars + v - 1;
            a.coeffs[idx] += 1;
        }
        a.cmp = Cmp::Gt;
        a.rhs = 3;
        conj(core::Guard::mk_atom(std::move(a)));
    }
    {
        std::vector<long long> zero(sys.dim, 0);
        sys.add_transition(2 * n_vars - 1, qf, std::move(g), std::move(zero));
        std::vector<long long> zero2(sys.dim, 0);
        sys.add_transition(qf, qf, core::Guard::truth(), std::move(zero2));
    }
    inst.c0.state = 0;
    inst.c0.counters.assign(sys.dim, 0);

    BuchiSpec& ba = inst.spec;
    int a0 = ba.add_state("a0");
    int a1 = ba.add_state("a1");
    ba.initial = a0;
    ba.accepting = {a1};
    ba.edges.push_back({a0, a0, spec::TokenFormula::truth()});
    ba.edges.push_back({a0, a1, spec::TokenFormula::mk_tok("goal")});
    ba.edges.push_back({a1, a1, spec::TokenFormula::truth()});
    return inst;
}

}  // namespace flatmc::check
