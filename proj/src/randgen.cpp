#include "flatmc/randgen.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace flatmc::randgen {

using core::CounterSystem;
using core::Guard;
using core::SysAtom;
using spec::Letter;

core::SysAtom random_atom(Rng& rng, int dim, long long rhs_hi, bool allow_eq) {
    SysAtom a;
    a.coeffs.assign(dim, 0);
    int nz = static_cast<int>(rng.irange(1, std::max(1, dim)));
    for (int i = 0; i < nz; ++i)
        a.coeffs[rng.irange(0, dim - 1)] = rng.irange(-2, 2) | 1;  // odd, nonzero
    int c = static_cast<int>(rng.irange(0, allow_eq ? 4 : 3));
    a.cmp = c == 0 ? Cmp::Le : c == 1 ? Cmp::Ge : c == 2 ? Cmp::Lt : c == 3 ? Cmp::Gt : Cmp::Eq;
    a.rhs = rng.irange(0, rhs_hi);
    return a;
}

static Guard random_guard(Rng& rng, const SysParams& p) {
    if (!rng.coin(p.guard_atom_prob)) return Guard::truth();
    Guard g = Guard::mk_atom(random_atom(rng, p.dim, p.guard_rhs_hi));
    if (rng.coin(0.3)) {
        Guard h = Guard::mk_atom(random_atom(rng, p.dim, p.guard_rhs_hi));
        g = rng.coin() ? Guard::mk_and(std::move(g), std::move(h))
                       : Guard::mk_or(std::move(g), std::move(h));
    }
    if (rng.coin(0.15)) g = Guard::mk_not(std::move(g));
    return g;
}

CounterSystem random_flat_system(Rng& rng, const SysParams& p) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        CounterSystem sys;
        sys.dim = p.dim;
        int n = static_cast<int>(rng.irange(1, p.max_states));
        for (int i = 0; i < n; ++i) {
            std::set<std::string> props;
            for (const auto& pr : p.props)
                if (rng.coin(0.4)) props.insert(pr);
            sys.add_state("q" + std::to_string(i + 1), std::move(props));
        }
        int m = static_cast<int>(rng.irange(1, p.max_transitions));
        for (int i = 0; i < m; ++i) {
            int src = static_cast<int>(rng.irange(0, n - 1));
            int dst = static_cast<int>(rng.irange(0, n - 1));
            std::vector<long long> upd(p.dim);
            for (auto& u : upd) u = rng.irange(p.update_lo, p.update_hi);
            sys.add_transition(src, dst, random_guard(rng, p), std::move(upd));
        }
        if (core::is_flat(sys)) return sys;
    }
    // tiny fallback, always flat
    CounterSystem sys;
    sys.dim = p.dim;
    sys.add_state("q1");
    sys.add_transition(0, 0, Guard::truth(), std::vector<long long>(p.dim, 0));
    return sys;
}

core::Configuration random_config(Rng& rng, const CounterSystem& sys, long long max_val) {
    core::Configuration c;
    c.state = static_cast<int>(rng.irange(0, sys.n_states() - 1));
    for (int i = 0; i < sys.dim; ++i) c.counters.push_back(rng.irange(0, max_val));
    return c;
}

spec::BuchiSpec random_ba(Rng& rng, const std::vector<std::string>& props,
                          const std::vector<std::string>& atom_tokens, int max_states) {
    spec::BuchiSpec b;
    int n = static_cast<int>(rng.irange(1, max_states));
    for (int i = 0; i < n; ++i) b.add_state("s" + std::to_string(i + 1));
    b.initial = 0;
    b.accepting.insert(static_cast<int>(rng.irange(0, n - 1)));
    if (rng.coin(0.3) && n > 1) b.accepting.insert(static_cast<int>(rng.irange(0, n - 1)));
    auto label = [&]() {
        using TF = spec::TokenFormula;
        if (rng.coin(0.35)) return TF::truth();
        std::vector<std::string> pool = props;
        pool.insert(pool.end(), atom_tokens.begin(), atom_tokens.end());
        if (pool.empty()) return TF::truth();
        TF f = TF::mk_tok(rng.pick(pool));
        if (rng.coin(0.3)) f = TF::mk_not(std::move(f));
        if (rng.coin(0.3)) {
            TF g = TF::mk_tok(rng.pick(pool));
            if (rng.coin(0.3)) g = TF::mk_not(std::move(g));
            f = rng.coin() ? TF::mk_and(std::move(f), std::move(g))
                           : TF::mk_or(std::move(f), std::move(g));
        }
        return f;
    };
    int m = static_cast<int>(rng.irange(n, 2 * n + 2));
    for (int i = 0; i < m; ++i) {
        int s = static_cast<int>(rng.irange(0, n - 1));
        int t = static_cast<int>(rng.irange(0, n - 1));
        b.edges.push_back({s, t, label()});
    }
    return b;
}

spec::BuchiAutomaton random_explicit_ba(Rng& rng, const std::vector<Letter>& sigma,
                                        int n_states) {
    spec::BuchiAutomaton b;
    b.n_states = n_states;
    b.initial = 0;
    b.accepting.insert(static_cast<int>(rng.irange(0, n_states - 1)));
    for (int s = 0; s < n_states; ++s)
        for (const auto& a : sigma)
            for (int t = 0; t < n_states; ++t)
                if (rng.coin(0.45)) b.transitions.emplace_back(s, a, t);
    return b;
}

spec::AbaSpec conjunction_aba(const spec::BuchiSpec& b1, const spec::BuchiSpec& b2) {
    spec::AbaSpec aba;
    int init = aba.add_state("c0");
    aba.initial = init;
    std::vector<int> map1, map2;
    for (const auto& n : b1.state_names) map1.push_back(aba.add_state("l_" + n));
    for (const auto& n : b2.state_names) map2.push_back(aba.add_state("r_" + n));
    for (int s : b1.accepting) aba.accepting.insert(map1[s]);
    for (int s : b2.accepting) aba.accepting.insert(map2[s]);
    for (const auto& e : b1.edges)
        aba.edges.push_back({map1[e.src], e.label, spec::PosBool::mk_state(map1[e.dst])});
    for (const auto& e : b2.edges)
        aba.edges.push_back({map2[e.src], e.label, spec::PosBool::mk_state(map2[e.dst])});
    // the fresh initial state spawns both copies on the first letter
    for (const auto& e1 : b1.edges) {
        if (e1.src != b1.initial) continue;
        for (const auto& e2 : b2.edges) {
            if (e2.src != b2.initial) continue;
            aba.edges.push_back(
                {init, spec::TokenFormula::mk_and(e1.label, e2.label),
                 spec::PosBool::mk_and(spec::PosBool::mk_state(map1[e1.dst]),
                                       spec::PosBool::mk_state(map2[e2.dst]))});
        }
    }
    return aba;
}

spec::BuchiAutomaton intersection_product(const spec::BuchiAutomaton& b1,
                                          const spec::BuchiAutomaton& b2) {
    // two-copy rotation: copy 0 waits for F1, copy 1 waits for F2;
    // accepting = copy-1 states whose second component is in F2
    spec::BuchiAutomaton out;
    auto id = [&](int s1, int s2, int flag) { return (s1 * b2.n_states + s2) * 2 + flag; };
    out.n_states = b1.n_states * b2.n_states * 2;
    out.initial = id(b1.initial, b2.initial, 0);
    for (int s1 = 0; s1 < b1.n_states; ++s1)
        for (int s2 = 0; s2 < b2.n_states; ++s2)
            if (b2.accepting.count(s2)) out.accepting.insert(id(s1, s2, 1));
    for (const auto& [p1, a1, q1] : b1.transitions)
        for (const auto& [p2, a2, q2] : b2.transitions) {
            if (!(a1 == a2)) continue;
            int f0 = b1.accepting.count(p1) ? 1 : 0;
            out.transitions.emplace_back(id(p1, p2, 0), a1, id(q1, q2, f0));
            int f1 = b2.accepting.count(p2) ? 0 : 1;
            out.transitions.emplace_back(id(p1, p2, 1), a1, id(q1, q2, f1));
        }
    return out;
}

fo::Sentence random_fo(Rng& rng, const std::vector<std::string>& tokens, int qheight_budget,
                       int size_budget) {
    using S = fo::Sentence;
    std::vector<std::string> in_scope;
    std::function<S(int, int)> gen = [&](int qb, int sb) -> S {
        if (in_scope.empty() || (qb > 0 && rng.coin(0.55))) {
            std::string z = "z" + std::to_string(in_scope.size() + 1);
            in_scope.push_back(z);
            S body = gen(qb - 1, sb - 1);
            in_scope.pop_back();
            return rng.coin(0.8) ? S::exists(z, std::move(body)) : S::forall(z, std::move(body));
        }
        if (sb <= 1 || rng.coin(0.45)) {
            // leaf
            if (rng.coin(0.6) && !tokens.empty())
                return S::at(rng.pick(tokens), rng.pick(in_scope));
            int kind = static_cast<int>(rng.irange(0, 2));
            const std::string& a = rng.pick(in_scope);
            const std::string& b = rng.pick(in_scope);
            if (kind == 0) return S::lt(a, b);
            if (kind == 1) return S::eq(a, b);
            return S::succ(a, b);
        }
        int conn = static_cast<int>(rng.irange(0, 2));
        if (conn == 0) return S::mk_not(gen(qb, sb - 1));
        S a = gen(qb, sb / 2);
        S b = gen(qb, sb / 2);
        return conn == 1 ? S::mk_and(std::move(a), std::move(b))
                         : S::mk_or(std::move(a), std::move(b));
    };
    return gen(qheight_budget, size_budget);
}

spec::UpWord random_word(Rng& rng, const std::vector<Letter>& sigma, int max_prefix,
                         int max_period) {
    spec::UpWord w;
    int np = static_cast<int>(rng.irange(0, max_prefix));
    int nv = static_cast<int>(rng.irange(1, std::max(1, max_period)));
    for (int i = 0; i < np; ++i) w.prefix.push_back(rng.pick(sigma));
    for (int i = 0; i < nv; ++i) w.period.push_back(rng.pick(sigma));
    return w;
}

presburger::Formula random_formula(Rng& rng, const std::vector<std::string>& vars, int depth,
                                   long long coef_hi, long long rhs_hi) {
    using F = presburger::Formula;
    if (depth <= 0 || rng.coin(0.4)) {
        presburger::LinearAtom a;
        int nz = static_cast<int>(rng.irange(1, static_cast<long long>(vars.size())));
        for (int i = 0; i < nz; ++i) {
            long long c = rng.irange(-coef_hi, coef_hi);
            if (c == 0) c = 1;
            a.coeffs[rng.pick(vars)] = c;
        }
        int cmp = static_cast<int>(rng.irange(0, 4));
        a.cmp = cmp == 0   ? Cmp::Eq
                : cmp == 1 ? Cmp::Le
                : cmp == 2 ? Cmp::Ge
                : cmp == 3 ? Cmp::Lt
                           : Cmp::Gt;
        a.rhs = rng.irange(-rhs_hi, rhs_hi);
        return F::mk_atom(std::move(a));
    }
    int op = static_cast<int>(rng.irange(0, 2));
    if (op == 0) return F::mk_not(random_formula(rng, vars, depth - 1, coef_hi, rhs_hi));
    std::vector<F> kids;
    kids.push_back(random_formula(rng, vars, depth - 1, coef_hi, rhs_hi));
    kids.push_back(random_formula(rng, vars, depth - 1, coef_hi, rhs_hi));
    return op == 1 ? F::mk_and(std::move(kids)) : F::mk_or(std::move(kids));
}

presburger::Nfa random_nfa(Rng& rng, int max_states, int n_letters) {
    presburger::Nfa nfa;
    nfa.n_states = static_cast<int>(rng.irange(1, max_states));
    nfa.initial = 0;
    for (int i = 0; i < n_letters; ++i) nfa.letters.push_back("y" + std::to_string(i + 1));
    int nf = static_cast<int>(rng.irange(0, nfa.n_states));
    for (int i = 0; i < nf; ++i) nfa.finals.insert(static_cast<int>(rng.irange(0, nfa.n_states - 1)));
    if (rng.coin(0.8)) nfa.finals.insert(static_cast<int>(rng.irange(0, nfa.n_states - 1)));
    int m = static_cast<int>(rng.irange(1, 2 * nfa.n_states + 2));
    for (int i = 0; i < m; ++i)
        nfa.transitions.emplace_back(static_cast<int>(rng.irange(0, nfa.n_states - 1)),
                                     static_cast<int>(rng.irange(0, n_letters - 1)),
                                     static_cast<int>(rng.irange(0, nfa.n_states - 1)));
    return nfa;
}

std::vector<check::Clause> random_cnf(Rng& rng, int n_vars, int n_clauses) {
    std::vector<check::Clause> out;
    for (int i = 0; i < n_clauses; ++i) {
        check::Clause cl;
        for (int j = 0; j < 3; ++j) {
            int v = static_cast<int>(rng.irange(1, n_vars));
            cl[j] = rng.coin() ? v : -v;
        }
        out.push_back(cl);
    }
    return out;
}

std::vector<Letter> letter_universe(const std::vector<std::string>& toks) {
    std::vector<Letter> out;
    size_t n = toks.size();
    for (size_t mask = 0; mask < (1u << n); ++mask) {
        Letter a;
        for (size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) a.toks.insert(toks[i]);
        out.push_back(std::move(a));
    }
    return out;
}

}  // namespace flatmc::randgen
