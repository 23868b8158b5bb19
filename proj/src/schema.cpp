#include "flatmc/schema.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace flatmc::schema {

using core::Configuration;
using core::CounterSystem;
using core::Guard;
using core::SysAtom;
using presburger::Formula;
using presburger::LinearAtom;
using spec::Letter;

int MinimalPathSchema::length() const {
    int n = 0;
    for (const auto& s : segs) n += s.size();
    for (const auto& l : loops) n += l.size();
    return n;
}

// ---------------------------------------------------------------------------
// minimal path schema enumeration

namespace {

std::vector<std::vector<int>> flatten(const MinimalPathSchema& p) {
    std::vector<std::vector<int>> out;
    for (int i = 0; i < p.k(); ++i) {
        out.push_back(p.segs[i].trans);
        out.push_back(p.loops[i].trans);
    }
    return out;
}

struct SchemaDfs {
    const CounterSystem& sys;
    int q0;
    std::vector<MinimalPathSchema> found;
    std::vector<std::optional<std::vector<int>>> cycle_cache;

    explicit SchemaDfs(const CounterSystem& s, int q) : sys(s), q0(q) {
        cycle_cache.resize(sys.n_states());
        for (int st = 0; st < sys.n_states(); ++st) cycle_cache[st] = core::cycle_at(sys, st);
    }

    void run() {
        MinimalPathSchema partial;
        std::set<int> used_p, used_loops;
        go(q0, partial, {}, used_p, used_loops, true);
        std::sort(found.begin(), found.end(),
                  [](const MinimalPathSchema& a, const MinimalPathSchema& b) {
                      return flatten(a) < flatten(b);
                  });
    }

    void go(int cur, MinimalPathSchema& partial, std::vector<int> cur_seg, std::set<int>& used_p,
            std::set<int>& used_loops, bool p_all_empty) {
        // option: take the unique simple cycle through cur as the next loop
        if (cycle_cache[cur]) {
            const auto& cyc = *cycle_cache[cur];
            bool disjoint = std::none_of(cyc.begin(), cyc.end(),
                                         [&](int t) { return used_loops.count(t) != 0; });
            if (disjoint) {
                bool p_empty = p_all_empty && cur_seg.empty();
                partial.segs.push_back({cur_seg});
                partial.loops.push_back({cyc});
                for (int t : cyc) used_loops.insert(t);
                // close the schema here (p-part must not be a loop)
                if (p_empty || cur != q0) found.push_back(partial);
                // or continue with a fresh segment
                go(cur, partial, {}, used_p, used_loops, p_empty);
                for (int t : cyc) used_loops.erase(t);
                partial.loops.pop_back();
                partial.segs.pop_back();
            }
        }
        // option: extend the current segment
        for (int t : sys.out_transitions(cur)) {
            if (used_p.count(t)) continue;
            used_p.insert(t);
            cur_seg.push_back(t);
            go(sys.transitions[t].dst, partial, cur_seg, used_p, used_loops, p_all_empty);
            cur_seg.pop_back();
            used_p.erase(t);
        }
    }
};

}  // namespace

std::vector<MinimalPathSchema> enumerate_minimal_schemas(const CounterSystem& sys, int q0) {
    if (!core::is_flat(sys)) throw NotFlat("system is not flat");
    SchemaDfs dfs(sys, q0);
    dfs.run();
    return dfs.found;
}

std::string schema_text(const MinimalPathSchema& p) {
    std::ostringstream os;
    auto seg = [&](const PathSegment& s) {
        for (size_t i = 0; i < s.trans.size(); ++i) {
            if (i) os << " ";
            os << "d" << (s.trans[i] + 1);
        }
    };
    bool first = true;
    for (int i = 0; i < p.k(); ++i) {
        if (!p.segs[i].empty()) {
            if (!first) os << " ";
            seg(p.segs[i]);
            first = false;
        }
        if (!first) os << " ";
        os << "(";
        seg(p.loops[i]);
        os << ")" << (i + 1 == p.k() ? "^w" : "+");
        first = false;
    }
    return os.str();
}

namespace {

// positions past the lasso prefix are canonicalized modulo the cycle length
struct LassoWord {
    const std::vector<int>& prefix;
    const std::vector<int>& cycle;

    int at(long long i) const {
        if (i < static_cast<long long>(prefix.size())) return prefix[i];
        return cycle[(i - prefix.size()) % cycle.size()];
    }
    long long canon(long long i) const {
        long long p = static_cast<long long>(prefix.size());
        if (i < p) return i;
        return p + (i - p) % static_cast<long long>(cycle.size());
    }
};

}  // namespace

bool matches_lasso(const MinimalPathSchema& p, const std::vector<int>& prefix,
                   const std::vector<int>& cycle) {
    if (cycle.empty()) return false;
    LassoWord w{prefix, cycle};
    long long plen = static_cast<long long>(prefix.size());
    long long clen = static_cast<long long>(cycle.size());
    // element 2i = segment i, element 2i+1 = loop i
    std::set<std::pair<int, long long>> visited;
    std::function<bool(int, long long)> match = [&](int elem, long long i) -> bool {
        auto key = std::make_pair(elem, w.canon(i));
        if (visited.count(key)) return false;
        visited.insert(key);
        int k = p.k();
        if (elem == 2 * k) return false;  // walked past the omega loop
        bool is_loop = elem % 2 == 1;
        int idx = elem / 2;
        if (!is_loop) {
            const auto& seg = p.segs[idx].trans;
            for (size_t j = 0; j < seg.size(); ++j)
                if (w.at(i + j) != seg[j]) return false;
            return match(elem + 1, i + seg.size());
        }
        const auto& body = p.loops[idx].trans;
        long long blen = static_cast<long long>(body.size());
        if (idx + 1 == k) {
            // omega loop: word from i must equal body^omega; both tails are
            // eventually periodic, agreement on a preperiod + lcm window decides
            long long g = std::gcd(blen, clen);
            long long l = blen / g * clen;
            long long horizon = std::max(plen - i, 0LL) + l + blen;
            for (long long j = 0; j < horizon; ++j)
                if (w.at(i + j) != body[j % blen]) return false;
            return true;
        }
        // at least one copy, then hand over
        long long copies = 0;
        long long pos = i;
        while (true) {
            bool ok = true;
            for (long long j = 0; j < blen; ++j)
                if (w.at(pos + j) != body[j]) {
                    ok = false;
                    break;
                }
            if (!ok) return false;
            pos += blen;
            ++copies;
            if (match(elem + 1, pos)) return true;
            // canonical position repetition means further copies cycle forever
            if (visited.count({elem, w.canon(pos)})) return false;
            visited.insert({elem, w.canon(pos)});
        }
    };
    return match(0, 0);
}

// ---------------------------------------------------------------------------
// affine expressions over count variables (x1..) and initial counters (z1..)

namespace {

struct Aff {
    std::map<std::string, long long> coef;
    long long cst = 0;

    bool ground() const { return coef.empty(); }
    void add(const Aff& o, long long k = 1) {
        for (const auto& [v, c] : o.coef) {
            coef[v] += c * k;
            if (coef[v] == 0) coef.erase(v);
        }
        cst += o.cst * k;
    }
    void add_var(const std::string& v, long long k) {
        coef[v] += k;
        if (coef[v] == 0) coef.erase(v);
    }
};

Aff value_of(const std::vector<long long>& coeffs, const std::vector<Aff>& cfg) {
    Aff out;
    for (size_t i = 0; i < coeffs.size() && i < cfg.size(); ++i)
        if (coeffs[i] != 0) out.add(cfg[i], coeffs[i]);
    return out;
}

// e >= lo as a formula (ground values fold to constants)
Formula aff_ge(const Aff& e, long long lo) {
    if (e.ground()) return e.cst >= lo ? Formula::truth() : Formula::falsity();
    LinearAtom a;
    a.coeffs = e.coef;
    a.cmp = Cmp::Ge;
    a.rhs = lo - e.cst;
    return Formula::mk_atom(std::move(a));
}
Formula aff_le(const Aff& e, long long hi) {
    if (e.ground()) return e.cst <= hi ? Formula::truth() : Formula::falsity();
    LinearAtom a;
    a.coeffs = e.coef;
    a.cmp = Cmp::Le;
    a.rhs = hi - e.cst;
    return Formula::mk_atom(std::move(a));
}

Formula subst_guard(const Guard& g, const std::vector<Aff>& cfg) {
    switch (g.kind) {
        case Guard::Kind::True: return Formula::truth();
        case Guard::Kind::False: return Formula::falsity();
        case Guard::Kind::Not: return Formula::mk_not(subst_guard(g.kids[0], cfg));
        case Guard::Kind::And: {
            std::vector<Formula> kids{subst_guard(g.kids[0], cfg), subst_guard(g.kids[1], cfg)};
            return Formula::mk_and(std::move(kids));
        }
        case Guard::Kind::Or: {
            std::vector<Formula> kids{subst_guard(g.kids[0], cfg), subst_guard(g.kids[1], cfg)};
            return Formula::mk_or(std::move(kids));
        }
        case Guard::Kind::Atom: {
            Aff e = value_of(g.atom.coeffs, cfg);
            if (e.ground()) {
                return cmp_holds(g.atom.cmp, e.cst, g.atom.rhs) ? Formula::truth()
                                                                : Formula::falsity();
            }
            LinearAtom a;
            a.coeffs = e.coef;
            a.cmp = g.atom.cmp;
            a.rhs = g.atom.rhs - e.cst;
            return Formula::mk_atom(std::move(a));
        }
    }
    return Formula::falsity();
}

// convex truth windows for one atom, ordered by position on the value axis
std::vector<std::pair<ConvexCond, bool>> atom_states(const SysAtom& a) {
    ConvexCond base;
    base.coeffs = a.coeffs;
    auto win = [&](std::optional<long long> lo, std::optional<long long> hi) {
        ConvexCond c = base;
        c.lo = lo;
        c.hi = hi;
        return c;
    };
    switch (a.cmp) {
        case Cmp::Eq:
            return {{win(std::nullopt, a.rhs - 1), false},
                    {win(a.rhs, a.rhs), true},
                    {win(a.rhs + 1, std::nullopt), false}};
        case Cmp::Le:
            return {{win(std::nullopt, a.rhs), true}, {win(a.rhs + 1, std::nullopt), false}};
        case Cmp::Ge:
            return {{win(std::nullopt, a.rhs - 1), false}, {win(a.rhs, std::nullopt), true}};
        case Cmp::Lt:
            return {{win(std::nullopt, a.rhs - 1), true}, {win(a.rhs, std::nullopt), false}};
        case Cmp::Gt:
            return {{win(std::nullopt, a.rhs), false}, {win(a.rhs + 1, std::nullopt), true}};
    }
    return {};
}

// DNF of a guard into convex branches (negated equalities split)
std::vector<std::vector<ConvexCond>> guard_branches(const Guard& g, bool neg) {
    using Out = std::vector<std::vector<ConvexCond>>;
    auto single = [](ConvexCond c) { return Out{{std::move(c)}}; };
    switch (g.kind) {
        case Guard::Kind::True: return neg ? Out{} : Out{{}};
        case Guard::Kind::False: return neg ? Out{{}} : Out{};
        case Guard::Kind::Not: return guard_branches(g.kids[0], !neg);
        case Guard::Kind::Atom: {
            ConvexCond c;
            c.coeffs = g.atom.coeffs;
            long long b = g.atom.rhs;
            if (!neg) {
                switch (g.atom.cmp) {
                    case Cmp::Eq: c.lo = b; c.hi = b; break;
                    case Cmp::Le: c.hi = b; break;
                    case Cmp::Ge: c.lo = b; break;
                    case Cmp::Lt: c.hi = b - 1; break;
                    case Cmp::Gt: c.lo = b + 1; break;
                }
                return single(std::move(c));
            }
            switch (g.atom.cmp) {
                case Cmp::Eq: {
                    ConvexCond lt = c, gt = c;
                    lt.hi = b - 1;
                    gt.lo = b + 1;
                    return Out{{lt}, {gt}};
                }
                case Cmp::Le: c.lo = b + 1; break;
                case Cmp::Ge: c.hi = b - 1; break;
                case Cmp::Lt: c.lo = b; break;
                case Cmp::Gt: c.hi = b; break;
            }
            return single(std::move(c));
        }
        case Guard::Kind::And:
        case Guard::Kind::Or: {
            bool conj = (g.kind == Guard::Kind::And) != neg;
            Out a = guard_branches(g.kids[0], neg);
            Out b = guard_branches(g.kids[1], neg);
            if (!conj) {
                a.insert(a.end(), b.begin(), b.end());
                return a;
            }
            Out out;
            for (const auto& x : a)
                for (const auto& y : b) {
                    std::vector<ConvexCond> merged = x;
                    bool dead = false;
                    for (const auto& cond : y) {
                        auto it = std::find_if(merged.begin(), merged.end(), [&](const ConvexCond& m) {
                            return m.coeffs == cond.coeffs;
                        });
                        if (it == merged.end()) {
                            merged.push_back(cond);
                            continue;
                        }
                        if (cond.lo && (!it->lo || *cond.lo > *it->lo)) it->lo = cond.lo;
                        if (cond.hi && (!it->hi || *cond.hi < *it->hi)) it->hi = cond.hi;
                        if (it->lo && it->hi && *it->lo > *it->hi) {
                            dead = true;
                            break;
                        }
                    }
                    if (!dead) out.push_back(std::move(merged));
                }
            return out;
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// the walker: shared engine behind guard_phase_split, generate_run_constraint
// and build_constrained_schemas

struct LoopInfo {
    std::vector<int> body;
    std::vector<long long> effect;                          // full-iteration effect
    std::vector<std::vector<long long>> prefix_effect;      // per offset
    std::vector<std::vector<std::vector<ConvexCond>>> branches;  // per offset
    std::vector<std::vector<std::pair<ConvexCond, bool>>> states; // per ag atom
    int phase_cap = 1;
};

struct Candidate {
    std::vector<Formula> conjs;
    std::vector<std::vector<Letter>> segs;
    std::vector<std::vector<Letter>> loops;
    std::vector<std::vector<int>> seg_trans;
    std::vector<std::vector<int>> loop_trans;
    std::vector<PhasedLoop> phased;
};

struct Walker {
    const CounterSystem& sys;
    const MinimalPathSchema& base;
    std::vector<SysAtom> ag;
    std::optional<std::vector<long long>> init;
    BuildOptions opts;
    bool guess_seg_states = true;     // build/cps mode
    const PhasedSchema* fixed = nullptr;  // generate_run_constraint mode
    std::function<void(const Candidate&)> sink;

    std::vector<LoopInfo> loop_info;
    int next_var = 0;
    long long prune_calls = 0;

    void prepare() {
        loop_info.clear();
        for (const auto& l : base.loops) {
            LoopInfo li;
            li.body = l.trans;
            li.effect.assign(sys.dim, 0);
            std::vector<long long> acc(sys.dim, 0);
            for (int t : l.trans) {
                li.prefix_effect.push_back(acc);
                for (int i = 0; i < sys.dim; ++i) acc[i] += sys.transitions[t].update[i];
            }
            li.effect = acc;
            for (int t : l.trans)
                li.branches.push_back(guard_branches(sys.transitions[t].guard, false));
            for (const auto& a : ag) li.states.push_back(atom_states(a));
            li.phase_cap = 1;
            for (const auto& st : li.states)
                li.phase_cap += (static_cast<int>(st.size()) - 1) * static_cast<int>(l.trans.size());
            for (const auto& br : li.branches)
                if (br.size() > 1) li.phase_cap += 2 * static_cast<int>(br.size());
            loop_info.push_back(std::move(li));
        }
    }

    std::vector<Aff> initial_config() const {
        std::vector<Aff> cfg(sys.dim);
        for (int i = 0; i < sys.dim; ++i) {
            if (init) cfg[i].cst = (*init)[i];
            else cfg[i].add_var("z" + std::to_string(i + 1), 1);
        }
        return cfg;
    }

    static bool add_conj(Candidate& c, Formula f) {
        if (f.kind == Formula::Kind::False) return false;
        if (f.kind != Formula::Kind::True) c.conjs.push_back(std::move(f));
        return true;
    }

    bool prune_check(const Candidate& c) {
        if (!opts.prune_infeasible) return true;
        ++prune_calls;
        auto res = presburger::feasible(Formula::mk_and(c.conjs), opts.solve);
        return res.status != presburger::SolveStatus::Unsat;
    }

    void run() {
        prepare();
        Candidate c;
        c.segs.emplace_back();
        c.seg_trans.emplace_back();
        do_seg(0, 0, initial_config(), c);
    }

    Letter letter_at(int state, const std::vector<std::pair<int, bool>>& toks) const {
        Letter a;
        for (const auto& p : sys.labels[state]) a.toks.insert(p);
        for (const auto& [atom_idx, present] : toks)
            if (present) a.toks.insert(ag[atom_idx].token());
        return a;
    }

    // --- segments ---------------------------------------------------------
    void do_seg(int elem, int pos, std::vector<Aff> cfg, Candidate c) {
        const auto& seg = base.segs[elem].trans;
        if (pos == static_cast<int>(seg.size())) {
            do_loop(elem, std::move(cfg), std::move(c));
            return;
        }
        int t = seg[pos];
        const auto& tr = sys.transitions[t];
        // nonnegativity at this position
        for (int i = 0; i < sys.dim; ++i)
            if (!add_conj(c, aff_ge(cfg[i], 0))) return;
        // guard as a substituted formula (single position, any Boolean shape)
        if (!add_conj(c, subst_guard(tr.guard, cfg))) return;
        // spec-atom truths recorded in the letter
        enumerate_seg_states(0, {}, cfg, [&](const std::vector<std::pair<int, bool>>& toks,
                                             Candidate cc) {
            cc.segs.back().push_back(letter_at(tr.src, toks));
            cc.seg_trans.back().push_back(t);
            std::vector<Aff> next = cfg;
            for (int i = 0; i < sys.dim; ++i) next[i].cst += tr.update[i];
            do_seg(elem, pos + 1, std::move(next), std::move(cc));
        }, c);
    }

    template <typename Fn>
    void enumerate_seg_states(size_t atom_idx, std::vector<std::pair<int, bool>> chosen,
                              const std::vector<Aff>& cfg, const Fn& cont, const Candidate& c) {
        if (!guess_seg_states || atom_idx == ag.size()) {
            // remaining atoms (if any) resolve later through the fixed schema path
            if (!guess_seg_states) {
                // ground truths still show up in letters when decidable
                std::vector<std::pair<int, bool>> ground;
                for (size_t i = 0; i < ag.size(); ++i) {
                    Aff v = value_of(ag[i].coeffs, cfg);
                    if (v.ground()) ground.emplace_back(static_cast<int>(i),
                                                        cmp_holds(ag[i].cmp, v.cst, ag[i].rhs));
                }
                cont(ground, c);
                return;
            }
            cont(chosen, c);
            return;
        }
        Aff v = value_of(ag[atom_idx].coeffs, cfg);
        auto states = atom_states(ag[atom_idx]);
        for (const auto& [cond, present] : states) {
            if (v.ground() && !cond.contains(v.cst)) continue;
            Candidate cc = c;
            bool ok = true;
            if (!v.ground()) {
                if (cond.lo) ok = ok && add_conj(cc, aff_ge(v, *cond.lo));
                if (cond.hi) ok = ok && add_conj(cc, aff_le(v, *cond.hi));
            }
            if (!ok) continue;
            auto next = chosen;
            next.emplace_back(static_cast<int>(atom_idx), present);
            enumerate_seg_states(atom_idx + 1, std::move(next), cfg, cont, cc);
        }
    }

    // --- loops -------------------------------------------------------------
    struct PhaseChoice {
        std::vector<int> branch;  // per offset
        std::vector<std::vector<int>> state;  // per atom, per offset

        bool operator==(const PhaseChoice&) const = default;
    };

    void do_loop(int elem, std::vector<Aff> cfg, Candidate c) {
        const LoopInfo& li = loop_info[elem];
        for (const auto& br : li.branches)
            if (br.empty()) return;  // guard unsatisfiable at some offset
        if (fixed) {
            do_fixed_loop(elem, std::move(cfg), std::move(c));
            return;
        }
        c.phased.push_back(PhasedLoop{li.body, {}});
        rec_phase(elem, std::move(cfg), std::move(c), std::nullopt, 0);
    }

    // enumerate phase choice vectors compatible with the entry configuration,
    // slope direction and the previous phase
    template <typename Fn>
    void for_each_choice(const LoopInfo& li, const std::vector<Aff>& entry,
                         const std::optional<PhaseChoice>& prev, bool omega, const Fn& fn) {
        size_t len = li.body.size();
        PhaseChoice pc;
        pc.branch.assign(len, 0);
        pc.state.assign(ag.size(), std::vector<int>(len, 0));

        // candidate lists per slot
        std::vector<std::vector<int>> branch_opts(len);
        for (size_t off = 0; off < len; ++off) {
            for (size_t b = 0; b < li.branches[off].size(); ++b) {
                bool ok = true;
                for (const auto& cond : li.branches[off][b]) {
                    long long slope = 0;
                    for (int i = 0; i < sys.dim; ++i) slope += cond.coeffs[i] * li.effect[i];
                    if (omega) {
                        if (slope > 0 && cond.hi) ok = false;
                        if (slope < 0 && cond.lo) ok = false;
                    }
                    Aff v_off = value_of(cond.coeffs, entry);
                    long long pref = 0;
                    for (int i = 0; i < sys.dim; ++i)
                        pref += cond.coeffs[i] * li.prefix_effect[off][i];
                    v_off.cst += pref;
                    if (v_off.ground() && !cond.contains(v_off.cst)) ok = false;
                    if (!ok) break;
                }
                if (ok) branch_opts[off].push_back(static_cast<int>(b));
            }
            if (branch_opts[off].empty()) return;
        }
        std::vector<std::vector<std::vector<int>>> state_opts(ag.size());
        for (size_t a = 0; a < ag.size(); ++a) {
            long long slope = 0;
            for (int i = 0; i < sys.dim; ++i) slope += ag[a].coeffs[i] * li.effect[i];
            state_opts[a].assign(len, {});
            for (size_t off = 0; off < len; ++off) {
                for (size_t s = 0; s < li.states[a].size(); ++s) {
                    const auto& cond = li.states[a][s].first;
                    if (omega) {
                        if (slope > 0 && cond.hi) continue;
                        if (slope < 0 && cond.lo) continue;
                    }
                    if (prev) {
                        int ps = prev->state[a][off];
                        if (slope > 0 && static_cast<int>(s) < ps) continue;
                        if (slope < 0 && static_cast<int>(s) > ps) continue;
                        if (slope == 0 && static_cast<int>(s) != ps) continue;
                    }
                    Aff v = value_of(ag[a].coeffs, entry);
                    long long pref = 0;
                    for (int i = 0; i < sys.dim; ++i)
                        pref += ag[a].coeffs[i] * li.prefix_effect[off][i];
                    v.cst += pref;
                    if (v.ground() && !cond.contains(v.cst)) continue;
                    state_opts[a][off].push_back(static_cast<int>(s));
                }
                if (state_opts[a][off].empty()) return;
            }
        }
        // odometer
        std::function<void(size_t)> spin = [&](size_t slot) {
            size_t nb = len;
            size_t total = nb + ag.size() * len;
            if (slot == total) {
                if (prev && pc == *prev) return;
                fn(pc);
                return;
            }
            if (slot < nb) {
                for (int b : branch_opts[slot]) {
                    pc.branch[slot] = b;
                    spin(slot + 1);
                }
            } else {
                size_t a = (slot - nb) / len;
                size_t off = (slot - nb) % len;
                for (int s : state_opts[a][off]) {
                    pc.state[a][off] = s;
                    spin(slot + 1);
                }
            }
        };
        spin(0);
    }

    // emit the constraints of one phase; count_var empty means omega phase
    bool emit_phase(const LoopInfo& li, const PhaseChoice& pc, const std::vector<Aff>& entry,
                    const std::string& count_var, Candidate& c) {
        size_t len = li.body.size();
        auto value_at = [&](const std::vector<long long>& coeffs, size_t off) {
            Aff v = value_of(coeffs, entry);
            long long pref = 0;
            for (int i = 0; i < sys.dim; ++i) pref += coeffs[i] * li.prefix_effect[off][i];
            v.cst += pref;
            return v;
        };
        auto slope_of = [&](const std::vector<long long>& coeffs) {
            long long s = 0;
            for (int i = 0; i < sys.dim; ++i) s += coeffs[i] * li.effect[i];
            return s;
        };
        auto endpoint = [&](const Aff& v0, long long slope, const ConvexCond& cond) -> bool {
            if (count_var.empty()) {
                // omega: entry plus stability (stability filtered upstream)
                if (cond.lo && !add_conj(c, aff_ge(v0, *cond.lo))) return false;
                if (cond.hi && !add_conj(c, aff_le(v0, *cond.hi))) return false;
                return true;
            }
            Aff vend = v0;
            vend.add_var(count_var, slope);
            vend.cst -= slope;  // value at t = y-1
            if (cond.lo) {
                if (!add_conj(c, aff_ge(v0, *cond.lo))) return false;
                if (!add_conj(c, aff_ge(vend, *cond.lo))) return false;
            }
            if (cond.hi) {
                if (!add_conj(c, aff_le(v0, *cond.hi))) return false;
                if (!add_conj(c, aff_le(vend, *cond.hi))) return false;
            }
            return true;
        };
        for (size_t off = 0; off < len; ++off) {
            for (const auto& cond : li.branches[off][pc.branch[off]]) {
                if (!endpoint(value_at(cond.coeffs, off), slope_of(cond.coeffs), cond))
                    return false;
            }
            for (size_t a = 0; a < ag.size(); ++a) {
                const auto& cond = li.states[a][pc.state[a][off]].first;
                if (!endpoint(value_at(cond.coeffs, off), slope_of(cond.coeffs), cond))
                    return false;
            }
            // counters stay nonnegative at every offset
            for (int i = 0; i < sys.dim; ++i) {
                std::vector<long long> unit(sys.dim, 0);
                unit[i] = 1;
                long long slope = li.effect[i];
                if (count_var.empty() && slope < 0) return false;
                ConvexCond nn;
                nn.coeffs = unit;
                nn.lo = 0;
                if (!endpoint(value_at(unit, off), slope, nn)) return false;
            }
        }
        return true;
    }

    PhasedLoop::Phase to_phase(const LoopInfo& li, const PhaseChoice& pc, bool omega) const {
        PhasedLoop::Phase ph;
        ph.omega = omega;
        for (size_t off = 0; off < li.body.size(); ++off)
            ph.guard_conds.push_back(li.branches[off][pc.branch[off]]);
        ph.ag_states.resize(ag.size());
        for (size_t a = 0; a < ag.size(); ++a)
            for (size_t off = 0; off < li.body.size(); ++off)
                ph.ag_states[a].push_back(li.states[a][pc.state[a][off]]);
        return ph;
    }

    std::vector<Letter> phase_letters(const LoopInfo& li, const PhaseChoice& pc) const {
        std::vector<Letter> out;
        for (size_t off = 0; off < li.body.size(); ++off) {
            std::vector<std::pair<int, bool>> toks;
            for (size_t a = 0; a < ag.size(); ++a)
                toks.emplace_back(static_cast<int>(a), li.states[a][pc.state[a][off]].second);
            out.push_back(letter_at(sys.transitions[li.body[off]].src, toks));
        }
        return out;
    }

    // invariant: c.segs.size() == c.loops.size() + 1 and segs.back() is the
    // accumulating segment; a finite phase pushes its loop plus a fresh empty
    // segment, the omega phase pushes only its loop
    void rec_phase(int elem, std::vector<Aff> cfg, Candidate c,
                   std::optional<PhaseChoice> prev, int n_phases) {
        const LoopInfo& li = loop_info[elem];
        bool final_loop = elem + 1 == base.k();

        if (!final_loop && n_phases >= 1) do_seg(elem + 1, 0, cfg, c);
        if (final_loop) {
            for_each_choice(li, cfg, prev, true, [&](const PhaseChoice& pc) {
                Candidate cc = c;
                if (!emit_phase(li, pc, cfg, "", cc)) return;
                cc.phased.back().phases.push_back(to_phase(li, pc, true));
                cc.loops.push_back(phase_letters(li, pc));
                cc.loop_trans.push_back(li.body);
                finalize(std::move(cc));
            });
        }
        if (n_phases >= li.phase_cap) return;
        for_each_choice(li, cfg, prev, false, [&](const PhaseChoice& pc) {
            Candidate cc = c;
            std::string y = "x" + std::to_string(next_var + 1);
            Aff yv;
            yv.add_var(y, 1);
            if (!add_conj(cc, aff_ge(yv, 1))) return;
            if (!emit_phase(li, pc, cfg, y, cc)) return;
            ++next_var;
            cc.phased.back().phases.push_back(to_phase(li, pc, false));
            cc.loops.push_back(phase_letters(li, pc));
            cc.loop_trans.push_back(li.body);
            cc.segs.emplace_back();
            cc.seg_trans.emplace_back();
            std::vector<Aff> next_cfg = cfg;
            for (int i = 0; i < sys.dim; ++i)
                if (li.effect[i] != 0) next_cfg[i].add_var(y, li.effect[i]);
            if (prune_check(cc))
                rec_phase(elem, std::move(next_cfg), std::move(cc), pc, n_phases + 1);
            --next_var;
        });
    }

    // generate_run_constraint path: phases fixed by `fixed`
    void do_fixed_loop(int elem, std::vector<Aff> cfg, Candidate c) {
        const LoopInfo& li = loop_info[elem];
        const PhasedLoop& pl = fixed->loops[elem];
        std::vector<Aff> cur = std::move(cfg);
        for (const auto& ph : pl.phases) {
            std::string y;
            if (!ph.omega) {
                y = "x" + std::to_string(++next_var);
                Aff yv;
                yv.add_var(y, 1);
                if (!add_conj(c, aff_ge(yv, 1))) return;
            }
            size_t len = li.body.size();
            auto value_at = [&](const std::vector<long long>& coeffs, size_t off) {
                Aff v = value_of(coeffs, cur);
                long long pref = 0;
                for (int i = 0; i < sys.dim; ++i) pref += coeffs[i] * li.prefix_effect[off][i];
                v.cst += pref;
                return v;
            };
            auto slope_of = [&](const std::vector<long long>& coeffs) {
                long long s = 0;
                for (int i = 0; i < sys.dim; ++i) s += coeffs[i] * li.effect[i];
                return s;
            };
            auto endpoint = [&](const Aff& v0, long long slope, const ConvexCond& cond) -> bool {
                if (ph.omega) {
                    if (slope > 0 && cond.hi) return false;
                    if (slope < 0 && cond.lo) return false;
                    if (cond.lo && !add_conj(c, aff_ge(v0, *cond.lo))) return false;
                    if (cond.hi && !add_conj(c, aff_le(v0, *cond.hi))) return false;
                    return true;
                }
                Aff vend = v0;
                vend.add_var(y, slope);
                vend.cst -= slope;
                if (cond.lo &&
                    (!add_conj(c, aff_ge(v0, *cond.lo)) || !add_conj(c, aff_ge(vend, *cond.lo))))
                    return false;
                if (cond.hi &&
                    (!add_conj(c, aff_le(v0, *cond.hi)) || !add_conj(c, aff_le(vend, *cond.hi))))
                    return false;
                return true;
            };
            for (size_t off = 0; off < len; ++off) {
                for (const auto& cond : ph.guard_conds[off])
                    if (!endpoint(value_at(cond.coeffs, off), slope_of(cond.coeffs), cond)) return;
                for (size_t a = 0; a < ph.ag_states.size(); ++a) {
                    const auto& cond = ph.ag_states[a][off].first;
                    if (!endpoint(value_at(cond.coeffs, off), slope_of(cond.coeffs), cond)) return;
                }
                for (int i = 0; i < sys.dim; ++i) {
                    std::vector<long long> unit(sys.dim, 0);
                    unit[i] = 1;
                    if (ph.omega && li.effect[i] < 0) return;
                    ConvexCond nn;
                    nn.coeffs = unit;
                    nn.lo = 0;
                    if (!endpoint(value_at(unit, off), li.effect[i], nn)) return;
                }
            }
            if (ph.omega) {
                finalize(std::move(c));
                return;
            }
            c.segs.emplace_back();
            c.seg_trans.emplace_back();
            for (int i = 0; i < sys.dim; ++i)
                if (li.effect[i] != 0) cur[i].add_var(y, li.effect[i]);
        }
        do_seg(elem + 1, 0, std::move(cur), std::move(c));
    }

    void finalize(Candidate c) {
        while (c.segs.size() > c.loops.size()) {
            c.segs.pop_back();
            c.seg_trans.pop_back();
        }
        sink(c);
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// public operations

std::vector<PhasedSchema> guard_phase_split(const MinimalPathSchema& base,
                                            const CounterSystem& sys,
                                            const std::vector<SysAtom>& ag,
                                            const std::optional<Configuration>& init,
                                            const BuildOptions& opts) {
    Walker w{sys, base, ag,
             init ? std::optional<std::vector<long long>>(init->counters) : std::nullopt, opts};
    w.guess_seg_states = false;
    std::vector<PhasedSchema> out;
    w.sink = [&](const Candidate& c) {
        PhasedSchema ps;
        ps.base = base;
        ps.loops = c.phased;
        out.push_back(std::move(ps));
    };
    w.run();
    return out;
}

presburger::Formula generate_run_constraint(const PhasedSchema& ps, const CounterSystem& sys,
                                            const std::optional<Configuration>& init) {
    Walker w{sys, ps.base, {}, // ag handled through the fixed phases
             init ? std::optional<std::vector<long long>>(init->counters) : std::nullopt,
             BuildOptions{}};
    w.guess_seg_states = false;
    w.fixed = &ps;
    std::optional<Formula> out;
    w.sink = [&](const Candidate& c) {
        if (!out) out = Formula::mk_and(c.conjs);
    };
    w.run();
    return out ? *out : Formula::falsity();
}

std::vector<Cps> build_constrained_schemas(const CounterSystem& sys, int q0,
                                           const std::optional<std::vector<long long>>& init,
                                           const std::vector<SysAtom>& extra_atoms,
                                           const BuildOptions& opts) {
    auto schemas = enumerate_minimal_schemas(sys, q0);
    // spec atoms are recorded in letters; the system's own guards act through
    // the constraint
    std::vector<SysAtom> letter_ag = extra_atoms;
    std::sort(letter_ag.begin(), letter_ag.end());
    letter_ag.erase(std::unique(letter_ag.begin(), letter_ag.end()), letter_ag.end());

    std::vector<Cps> out;
    for (size_t si = 0; si < schemas.size(); ++si) {
        Walker w{sys, schemas[si], letter_ag, init, opts};
        w.sink = [&](const Candidate& c) {
            Cps cps;
            cps.schema_index = static_cast<int>(si);
            cps.segs = c.segs;
            cps.loops = c.loops;
            cps.seg_trans = c.seg_trans;
            cps.loop_trans = c.loop_trans;
            cps.constraint = Formula::mk_and(c.conjs);
            cps.parameterized = !init.has_value();
            cps.alphabet.at = sys.propositions();
            cps.alphabet.ag = letter_ag;
            std::set<Letter> ls;
            for (const auto& seg : cps.segs) ls.insert(seg.begin(), seg.end());
            for (const auto& l : cps.loops) ls.insert(l.begin(), l.end());
            cps.alphabet.letters.assign(ls.begin(), ls.end());
            if (opts.prune_infeasible) {
                auto res = presburger::feasible(cps.constraint, opts.solve);
                if (res.status == presburger::SolveStatus::Unsat) return;
            }
            out.push_back(std::move(cps));
        };
        w.run();
    }
    return out;
}

std::vector<std::string> Cps::count_vars() const {
    std::vector<std::string> vars;
    for (int i = 0; i + 1 < k(); ++i) vars.push_back("x" + std::to_string(i + 1));
    return vars;
}

spec::UpWord instantiate_word(const Cps& cps, const std::vector<Int>& counts) {
    if (static_cast<int>(counts.size()) != cps.k() - 1)
        throw BadArity("expected " + std::to_string(cps.k() - 1) + " counts");
    for (const auto& c : counts)
        if (c < 1) throw BadArity("loop counts must be >= 1");
    spec::UpWord w;
    for (int i = 0; i < cps.k(); ++i) {
        w.prefix.insert(w.prefix.end(), cps.segs[i].begin(), cps.segs[i].end());
        if (i + 1 == cps.k()) break;
        unsigned long long c = counts[i].convert_to<unsigned long long>();
        for (unsigned long long r = 0; r < c; ++r)
            w.prefix.insert(w.prefix.end(), cps.loops[i].begin(), cps.loops[i].end());
    }
    w.period = cps.loops.back();
    return w;
}

std::vector<int> instantiate_transitions(const Cps& cps, const std::vector<Int>& counts,
                                         std::vector<int>& period_out) {
    if (static_cast<int>(counts.size()) != cps.k() - 1)
        throw BadArity("expected " + std::to_string(cps.k() - 1) + " counts");
    std::vector<int> prefix;
    for (int i = 0; i < cps.k(); ++i) {
        prefix.insert(prefix.end(), cps.seg_trans[i].begin(), cps.seg_trans[i].end());
        if (i + 1 == cps.k()) break;
        unsigned long long c = counts[i].convert_to<unsigned long long>();
        for (unsigned long long r = 0; r < c; ++r)
            prefix.insert(prefix.end(), cps.loop_trans[i].begin(), cps.loop_trans[i].end());
    }
    period_out = cps.loop_trans.back();
    return prefix;
}

bool cps_in_x(const Cps& cps, const CounterSystem& sys, int q0,
              const std::optional<std::vector<long long>>& init,
              const std::vector<SysAtom>& extra_atoms) {
    auto all = build_constrained_schemas(sys, q0, init, extra_atoms);
    std::string key = cps_text(cps);
    for (const auto& other : all)
        if (cps_text(other) == key) return true;
    return false;
}

std::string cps_text(const Cps& cps) {
    std::ostringstream os;
    auto letters = [&](const std::vector<Letter>& ls) {
        for (size_t i = 0; i < ls.size(); ++i) {
            if (i) os << " ";
            os << ls[i].text();
        }
    };
    bool first = true;
    for (int i = 0; i < cps.k(); ++i) {
        if (!cps.segs[i].empty()) {
            if (!first) os << " ";
            letters(cps.segs[i]);
            first = false;
        }
        if (!first) os << " ";
        os << "(";
        letters(cps.loops[i]);
        os << ")" << (i + 1 == cps.k() ? "^w" : ("^x" + std::to_string(i + 1)));
        first = false;
    }
    os << "\nletters:";
    for (const auto& a : cps.alphabet.letters) os << " " << a.text();
    os << "\nconstraint: " << presburger::to_text(cps.constraint) << "\n";
    return os.str();
}

}  // namespace flatmc::schema
