#include "flatmc/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <set>

namespace flatmc::oracle {

using core::Configuration;
using core::CounterSystem;
using core::SysAtom;
using spec::Letter;
using spec::UpWord;

Letter letter_of(const CounterSystem& sys, const Configuration& c,
                 const std::vector<SysAtom>& atoms) {
    Letter a;
    for (const auto& p : sys.labels[c.state]) a.toks.insert(p);
    for (const auto& at : atoms)
        if (at.holds(c.counters)) a.toks.insert(at.token());
    return a;
}

namespace {

std::optional<Configuration> try_step(const CounterSystem& sys, const Configuration& c, int t) {
    try {
        return core::step(sys, c, t);
    } catch (const GuardFailed&) {
    } catch (const NonNegativityViolation&) {
    }
    return std::nullopt;
}

// all simple cycles from q (no transition repeated, interior avoids q)
std::vector<std::vector<int>> simple_cycles_at(const CounterSystem& sys, int q) {
    std::vector<std::vector<int>> out;
    std::vector<int> path;
    std::set<int> used;
    std::function<void(int)> dfs = [&](int cur) {
        for (size_t t = 0; t < sys.transitions.size(); ++t) {
            if (used.count(static_cast<int>(t)) || sys.transitions[t].src != cur) continue;
            int dst = sys.transitions[t].dst;
            used.insert(static_cast<int>(t));
            path.push_back(static_cast<int>(t));
            if (dst == q) out.push_back(path);
            else dfs(dst);
            path.pop_back();
            used.erase(static_cast<int>(t));
        }
    };
    dfs(q);
    return out;
}

// all atoms whose truth matters for stabilization of the omega tail
std::vector<SysAtom> relevant_atoms(const CounterSystem& sys, const std::vector<int>& cycle,
                                    const std::vector<SysAtom>& letter_atoms) {
    std::vector<SysAtom> all = letter_atoms;
    for (int t : cycle) core::collect_atoms(sys.transitions[t].guard, all);
    return all;
}

// iterations until every relevant comparison along the cycle is stable
long long stabilization_bound(const CounterSystem& sys, const Configuration& entry,
                              const std::vector<int>& cycle,
                              const std::vector<SysAtom>& atoms) {
    std::vector<long long> effect(sys.dim, 0);
    std::vector<std::vector<long long>> prefix;
    {
        std::vector<long long> acc(sys.dim, 0);
        for (int t : cycle) {
            prefix.push_back(acc);
            for (int i = 0; i < sys.dim; ++i) acc[i] += sys.transitions[t].update[i];
        }
        effect = acc;
    }
    long long bound = 1;
    auto consider = [&](const std::vector<long long>& coeffs, long long rhs) {
        long long slope = 0;
        for (int i = 0; i < sys.dim; ++i) slope += coeffs[i] * effect[i];
        if (slope == 0) return;
        // value at iteration t is c_off + slope*t; it crosses rhs near |rhs-c|/|slope|
        for (size_t off = 0; off < cycle.size(); ++off) {
            long long c = 0;
            for (int i = 0; i < sys.dim; ++i)
                c += coeffs[i] * (entry.counters[i] + prefix[off][i]);
            long long cross = std::llabs(rhs - c) / std::llabs(slope) + 2;
            bound = std::max(bound, cross);
        }
    };
    for (const auto& a : atoms) consider(a.coeffs, a.rhs);
    for (int i = 0; i < sys.dim; ++i) {
        std::vector<long long> unit(sys.dim, 0);
        unit[i] = 1;
        consider(unit, 0);
    }
    return bound;
}

struct LassoSearch {
    const CounterSystem& sys;
    const std::vector<SysAtom>& letter_atoms;
    int cap;
    bool exhaustive = true;
    long long explored = 0;
    std::vector<OracleLasso> found;

    void complete(const std::vector<int>& prefix, const std::vector<Letter>& prefix_letters,
                  const Configuration& cur, const std::vector<int>& cycle) {
        auto tail = oracle::omega_tail(sys, cur, cycle, letter_atoms);
        if (!tail) return;
        OracleLasso l;
        l.word.prefix = prefix_letters;
        l.word.prefix.insert(l.word.prefix.end(), tail->first.begin(), tail->first.end());
        l.word.period = tail->second;
        // the transition lasso: stabilization copies join the prefix
        size_t warm_copies = tail->first.size() / cycle.size();
        l.prefix = prefix;
        for (size_t i = 0; i < warm_copies; ++i)
            l.prefix.insert(l.prefix.end(), cycle.begin(), cycle.end());
        l.cycle = cycle;
        found.push_back(std::move(l));
    }

    void go(const Configuration& cur, std::vector<int>& prefix, std::vector<Letter>& letters,
            std::set<int>& used_p, std::set<int>& loop_trans) {
        ++explored;
        for (const auto& cyc : simple_cycles_at(sys, cur.state)) {
            bool disjoint = std::none_of(cyc.begin(), cyc.end(),
                                         [&](int t) { return loop_trans.count(t) != 0; });
            if (!disjoint) continue;
            // final loop here
            complete(prefix, letters, cur, cyc);
            // or iterate it 1..cap times and continue elsewhere
            Configuration c = cur;
            std::vector<int> added;
            std::vector<Letter> added_letters;
            bool alive = true;
            for (int rep = 1; rep <= cap && alive; ++rep) {
                for (int t : cyc) {
                    added_letters.push_back(letter_of(sys, c, letter_atoms));
                    auto next = try_step(sys, c, t);
                    if (!next) {
                        alive = false;
                        break;
                    }
                    added.push_back(t);
                    c = *next;
                }
                if (!alive) break;
                size_t np = prefix.size(), nl = letters.size();
                prefix.insert(prefix.end(), added.begin(), added.end());
                letters.insert(letters.end(), added_letters.begin(), added_letters.end());
                for (int t : cyc) loop_trans.insert(t);
                go(c, prefix, letters, used_p, loop_trans);
                for (int t : cyc) loop_trans.erase(t);
                prefix.resize(np);
                letters.resize(nl);
            }
            if (alive) {
                // one more full pass would still be steppable: the cap clips runs
                Configuration probe = c;
                bool extendable = true;
                for (int t : cyc) {
                    auto next = try_step(sys, probe, t);
                    if (!next) {
                        extendable = false;
                        break;
                    }
                    probe = *next;
                }
                if (extendable) exhaustive = false;
            }
        }
        for (size_t t = 0; t < sys.transitions.size(); ++t) {
            if (sys.transitions[t].src != cur.state || used_p.count(static_cast<int>(t))) continue;
            auto next = try_step(sys, cur, static_cast<int>(t));
            if (!next) continue;
            used_p.insert(static_cast<int>(t));
            prefix.push_back(static_cast<int>(t));
            letters.push_back(letter_of(sys, cur, letter_atoms));
            go(*next, prefix, letters, used_p, loop_trans);
            letters.pop_back();
            prefix.pop_back();
            used_p.erase(static_cast<int>(t));
        }
    }
};

}  // namespace

std::optional<std::pair<std::vector<Letter>, std::vector<Letter>>> omega_tail(
    const CounterSystem& sys, const Configuration& entry, const std::vector<int>& cycle,
    const std::vector<SysAtom>& letter_atoms) {
    auto atoms = relevant_atoms(sys, cycle, letter_atoms);
    long long warmup = stabilization_bound(sys, entry, cycle, atoms);
    std::vector<Letter> consumed;
    Configuration cur = entry;
    for (long long it = 0; it <= warmup; ++it) {
        for (int t : cycle) {
            consumed.push_back(letter_of(sys, cur, letter_atoms));
            auto next = try_step(sys, cur, t);
            if (!next) return std::nullopt;
            cur = *next;
        }
    }
    // the next iteration is the stabilized period
    std::vector<Letter> period;
    Configuration probe = cur;
    for (int t : cycle) {
        period.push_back(letter_of(sys, probe, letter_atoms));
        auto next = try_step(sys, probe, t);
        if (!next) return std::nullopt;
        probe = *next;
    }
    return std::make_pair(std::move(consumed), std::move(period));
}

std::vector<OracleLasso> enumerate_lassos(const CounterSystem& sys, const Configuration& c0,
                                          const std::vector<SysAtom>& letter_atoms, int count_cap,
                                          bool& exhaustive) {
    LassoSearch search{sys, letter_atoms, count_cap};
    std::vector<int> prefix;
    std::vector<Letter> letters;
    std::set<int> used_p, loop_trans;
    search.go(c0, prefix, letters, used_p, loop_trans);
    exhaustive = search.exhaustive;
    return search.found;
}

bool oracle_membership(const UpWord& w, const spec::BuchiAutomaton& b) {
    if (w.period.empty()) return false;
    size_t P = w.prefix.size(), L = w.period.size();
    auto letter = [&](size_t i) -> const Letter& {
        return i < P ? w.prefix[i] : w.period[(i - P) % L];
    };
    auto next_pos = [&](size_t i) { return i + 1 < P + L ? i + 1 : P + ((i - P + 1) % L); };
    // reachable product nodes
    std::set<std::pair<int, size_t>> seen;
    std::deque<std::pair<int, size_t>> queue;
    seen.insert({b.initial, 0});
    queue.push_back({b.initial, 0});
    std::vector<std::pair<int, size_t>> nodes;
    while (!queue.empty()) {
        auto [q, i] = queue.front();
        queue.pop_front();
        nodes.push_back({q, i});
        for (const auto& [src, lab, dst] : b.transitions) {
            if (src != q || !(lab == letter(i))) continue;
            auto n = std::make_pair(dst, next_pos(i));
            if (seen.insert(n).second) queue.push_back(n);
        }
    }
    // accepting node in the periodic part that reaches itself
    for (const auto& [q, i] : nodes) {
        if (i < P || !b.accepting.count(q)) continue;
        std::set<std::pair<int, size_t>> vis;
        std::deque<std::pair<int, size_t>> bfs;
        for (const auto& [src, lab, dst] : b.transitions) {
            if (src == q && lab == letter(i)) {
                auto n = std::make_pair(dst, next_pos(i));
                if (vis.insert(n).second) bfs.push_back(n);
            }
        }
        bool cycles = false;
        while (!bfs.empty() && !cycles) {
            auto [q2, i2] = bfs.front();
            bfs.pop_front();
            if (q2 == q && i2 == i) {
                cycles = true;
                break;
            }
            for (const auto& [src, lab, dst] : b.transitions) {
                if (src != q2 || !(lab == letter(i2))) continue;
                auto n = std::make_pair(dst, next_pos(i2));
                if (vis.insert(n).second) bfs.push_back(n);
            }
        }
        if (cycles) return true;
    }
    return false;
}

OracleVerdict oracle_mc_ba(const CounterSystem& sys, const Configuration& c0,
                           const spec::BuchiSpec& ba, int count_cap) {
    if (!core::is_flat(sys)) throw NotFlat("system is not flat");
    OracleVerdict v;
    v.count_cap = count_cap;
    std::vector<SysAtom> atoms;
    {
        std::set<SysAtom> dedup;
        for (const auto& tok : ba.tokens()) {
            if (tok.find_first_of("<>=") == std::string::npos) continue;
            core::Guard g = core::parse_guard(tok, sys.dim);
            if (g.kind == core::Guard::Kind::Atom) dedup.insert(g.atom);
        }
        atoms.assign(dedup.begin(), dedup.end());
    }
    bool exhaustive = false;
    auto lassos = enumerate_lassos(sys, c0, atoms, count_cap, exhaustive);
    v.explored = static_cast<long long>(lassos.size());
    // expand the symbolic spec over the letters that actually occur
    std::set<Letter> sigma;
    for (const auto& l : lassos) {
        sigma.insert(l.word.prefix.begin(), l.word.prefix.end());
        sigma.insert(l.word.period.begin(), l.word.period.end());
    }
    spec::BuchiAutomaton b = spec::expand(ba, {sigma.begin(), sigma.end()});
    for (const auto& l : lassos) {
        if (oracle_membership(l.word, b)) {
            v.answer = OracleVerdict::Answer::True;
            v.lasso_prefix = l.prefix;
            v.lasso_cycle = l.cycle;
            v.justification = "accepted lasso found";
            return v;
        }
    }
    if (exhaustive) {
        v.answer = OracleVerdict::Answer::False;
        v.justification = "no lasso accepted; no run can repeat any loop beyond cap " +
                          std::to_string(count_cap) + ", final-loop feasibility decided exactly";
    } else {
        v.answer = OracleVerdict::Answer::Inconclusive;
        v.justification = "count cap reachable by some valid run";
    }
    return v;
}

namespace {

bool naive_fo(const std::vector<Letter>& arr, const fo::Sentence& f,
              std::map<std::string, long long>& asg) {
    using K = fo::Sentence::Kind;
    auto var = [&](const std::string& v) { return asg.at(v); };
    switch (f.kind) {
        case K::AtTok: return arr[var(f.v1)].has(f.tok);
        case K::LetterIs: return arr[var(f.v1)] == f.letter;
        case K::Succ: return var(f.v2) == var(f.v1) + 1;
        case K::Lt: return var(f.v1) < var(f.v2);
        case K::Eq: return var(f.v1) == var(f.v2);
        case K::Not: return !naive_fo(arr, f.kids[0], asg);
        case K::And: return naive_fo(arr, f.kids[0], asg) && naive_fo(arr, f.kids[1], asg);
        case K::Exists: {
            for (long long k = 0; k < static_cast<long long>(arr.size()); ++k) {
                auto saved = asg.count(f.v1) ? std::optional<long long>(asg[f.v1])
                                             : std::optional<long long>();
                asg[f.v1] = k;
                bool ok = naive_fo(arr, f.kids[0], asg);
                if (saved) asg[f.v1] = *saved;
                else asg.erase(f.v1);
                if (ok) return true;
            }
            return false;
        }
    }
    return false;
}

}  // namespace

bool oracle_fo_eval(const UpWord& w, const fo::Sentence& f, long long len) {
    std::vector<Letter> arr;
    arr.reserve(len);
    for (long long i = 0; i < len; ++i) {
        if (i < static_cast<long long>(w.prefix.size())) arr.push_back(w.prefix[i]);
        else arr.push_back(w.period[(i - w.prefix.size()) % w.period.size()]);
    }
    std::map<std::string, long long> asg;
    return naive_fo(arr, f, asg);
}

bool oracle_sat(int n_vars, const std::vector<std::array<int, 3>>& clauses) {
    for (int mask = 0; mask < (1 << n_vars); ++mask) {
        bool ok = true;
        for (const auto& cl : clauses) {
            bool clause_ok = false;
            for (int lit : cl) {
                int v = lit > 0 ? lit : -lit;
                bool val = (mask >> (v - 1)) & 1;
                if ((lit > 0) == val) {
                    clause_ok = true;
                    break;
                }
            }
            if (!clause_ok) {
                ok = false;
                break;
            }
        }
        if (ok) return true;
    }
    return false;
}

}  // namespace flatmc::oracle
