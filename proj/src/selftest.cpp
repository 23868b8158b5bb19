#include "flatmc/selftest.hpp"

#include "flatmc/checker.hpp"
#include "flatmc/oracle.hpp"
#include "flatmc/randgen.hpp"
#include "flatmc/schema.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace flatmc::selftest {

using namespace flatmc;
using core::Configuration;
using core::CounterSystem;
using core::SysAtom;
using randgen::Rng;
using spec::Letter;
using spec::UpWord;

std::string fig1_system_text() {
    return "system 2\n"
           "state q1\n"
           "state q2\n"
           "state q3 props p q\n"
           "state q4\n"
           "state q5 props p\n"
           "trans q1 -> q2 guard true update (0,0)\n"
           "trans q1 -> q4 guard true update (0,0)\n"
           "trans q2 -> q3 guard true update (0,0)\n"
           "trans q2 -> q2 guard true update (-3,0)\n"
           "trans q3 -> q5 guard true update (1,0)\n"
           "trans q5 -> q3 guard true update (0,1)\n"
           "trans q4 -> q3 guard true update (0,0)\n"
           "trans q4 -> q4 guard true update (0,-2)\n";
}

std::string fig1_ba_text() {
    return "ba\n"
           "start s1\n"
           "accept s3\n"
           "edge s1 s1 [true]\n"
           "edge s1 s2 [(p & x1-x2=0)]\n"
           "edge s2 s3 [true]\n"
           "edge s3 s2 [(p & x1-x2=0)]\n";
}

std::string schema_figure_system_text() {
    return "system 1\n"
           "state q0\n"
           "state q1\n"
           "state q2\n"
           "state q3\n"
           "state q4\n"
           "trans q0 -> q1 guard true update (1)\n"
           "trans q1 -> q2 guard true update (2)\n"
           "trans q2 -> q1 guard true update (3)\n"
           "trans q1 -> q3 guard true update (4)\n"
           "trans q3 -> q4 guard true update (5)\n"
           "trans q4 -> q3 guard true update (6)\n";
}

namespace {

struct Report {
    std::ostringstream lines;
    bool all_pass = true;

    void criterion(int n, bool pass, const std::string& detail) {
        lines << "criterion " << n << ": " << (pass ? "PASS" : "FAIL") << " — " << detail << "\n";
        if (!pass) all_pass = false;
    }
};

// replay a cps instantiation through step; the word must match letter by letter
bool replay_counts(const CounterSystem& sys, const Configuration& c0, const schema::Cps& cps,
                   const std::vector<Int>& counts) {
    std::vector<int> period;
    std::vector<int> prefix = schema::instantiate_transitions(cps, counts, period);
    UpWord expected = schema::instantiate_word(cps, counts);
    Configuration cur = c0;
    for (size_t i = 0; i < prefix.size(); ++i) {
        if (oracle::letter_of(sys, cur, cps.alphabet.ag) != expected.prefix[i]) return false;
        try {
            cur = core::step(sys, cur, prefix[i]);
        } catch (const std::runtime_error&) {
            return false;
        }
    }
    auto tail = oracle::omega_tail(sys, cur, period, cps.alphabet.ag);
    if (!tail) return false;
    // stability pinned by the constraint: the first period must already match
    for (size_t o = 0; o < period.size(); ++o) {
        const Letter& got = o < tail->first.size() ? tail->first[o] : tail->second[o];
        if (!(got == expected.period[o])) return false;
    }
    return true;
}

void criterion1(Rng rng, Report& rep) {
    int fail = 0, lassos_checked = 0, replays = 0;
    for (int iter = 0; iter < 100; ++iter) {
        randgen::SysParams p;
        CounterSystem sys = randgen::random_flat_system(rng, p);
        Configuration c0 = randgen::random_config(rng, sys, 3);
        std::vector<SysAtom> atoms;
        if (rng.coin(0.5)) atoms.push_back(randgen::random_atom(rng, sys.dim, 3));
        auto schemas = schema::enumerate_minimal_schemas(sys, c0.state);
        Int bound = 1;
        for (long long i = 0; i < 2 * static_cast<long long>(sys.transitions.size()); ++i)
            bound *= std::max<Int>(Int(sys.transitions.size()), 1);
        if (Int(schemas.size()) > bound) ++fail;

        bool exhaustive = false;
        auto lassos = oracle::enumerate_lassos(sys, c0, atoms, 6, exhaustive);
        for (const auto& l : lassos) {
            ++lassos_checked;
            bool matched = std::any_of(schemas.begin(), schemas.end(), [&](const auto& s) {
                return schema::matches_lasso(s, l.prefix, l.cycle);
            });
            if (!matched) ++fail;
        }
        auto xs = schema::build_constrained_schemas(sys, c0.state, c0.counters, atoms);
        for (const auto& cps : xs) {
            int k1 = cps.k() - 1;
            if (k1 > 4) continue;
            std::vector<Int> counts(k1, 1);
            std::function<void(int)> spin = [&](int idx) {
                if (idx == k1) {
                    std::map<std::string, Int> asg;
                    for (int i = 0; i < k1; ++i) asg["x" + std::to_string(i + 1)] = counts[i];
                    for (const auto& v : presburger::free_vars(cps.constraint))
                        if (!asg.count(v)) asg[v] = 0;
                    if (!presburger::eval(cps.constraint, asg)) return;
                    ++replays;
                    if (!replay_counts(sys, c0, cps, counts)) ++fail;
                    return;
                }
                for (long long m = 1; m <= 6; ++m) {
                    counts[idx] = m;
                    spin(idx + 1);
                }
            };
            spin(0);
        }
    }
    rep.criterion(1, fail == 0,
                  "schema soundness/completeness on 100 systems: " +
                      std::to_string(lassos_checked) + " lasso covers, " +
                      std::to_string(replays) + " count replays, " + std::to_string(fail) +
                      " failures");
}

void criterion2(Rng rng, Report& rep) {
    int fail = 0;
    // the decrement gadget: loop effect (-3,0) entered at (7,0)
    {
        CounterSystem sys;
        sys.dim = 2;
        sys.add_state("a");
        sys.add_state("b");
        sys.add_state("c");
        sys.add_transition(0, 1, core::Guard::truth(), {0, 0});
        sys.add_transition(1, 1, core::Guard::truth(), {-3, 0});
        sys.add_transition(1, 2, core::Guard::truth(), {0, 0});
        sys.add_transition(2, 2, core::Guard::truth(), {0, 0});
        auto xs = schema::build_constrained_schemas(sys, 0, std::vector<long long>{7, 0}, {});
        std::set<long long> got;
        for (const auto& cps : xs) {
            if (cps.k() != 2) continue;
            for (long long m = 1; m <= 6; ++m) {
                std::map<std::string, Int> asg{{"x1", Int(m)}};
                for (const auto& v : presburger::free_vars(cps.constraint))
                    if (!asg.count(v)) asg[v] = 0;
                if (presburger::eval(cps.constraint, asg)) got.insert(m);
            }
        }
        if (got != std::set<long long>{1, 2}) ++fail;
    }
    // random single-loop instances vs the run oracle
    for (int iter = 0; iter < 100; ++iter) {
        CounterSystem sys;
        sys.dim = 2;
        sys.add_state("a");
        sys.add_state("b");
        sys.add_state("c");
        std::vector<long long> upd{rng.irange(-3, 3), rng.irange(-3, 3)};
        sys.add_transition(0, 1, core::Guard::truth(), {0, 0});
        sys.add_transition(1, 1, core::Guard::truth(), upd);
        sys.add_transition(1, 2, core::Guard::truth(), {0, 0});
        sys.add_transition(2, 2, core::Guard::truth(), {0, 0});
        Configuration c0{0, {rng.irange(0, 10), rng.irange(0, 10)}};
        auto xs = schema::build_constrained_schemas(sys, 0, c0.counters, {});
        std::set<long long> got;
        for (const auto& cps : xs) {
            if (cps.k() != 2) continue;
            for (long long m = 1; m <= 6; ++m) {
                std::map<std::string, Int> asg{{"x1", Int(m)}};
                for (const auto& v : presburger::free_vars(cps.constraint))
                    if (!asg.count(v)) asg[v] = 0;
                if (presburger::eval(cps.constraint, asg)) got.insert(m);
            }
        }
        std::set<long long> expected;
        for (long long m = 1; m <= 6; ++m) {
            Configuration cur = c0;
            bool ok = true;
            auto walk = [&](int t) {
                try {
                    cur = core::step(sys, cur, t);
                    return true;
                } catch (const std::runtime_error&) {
                    return false;
                }
            };
            if (!walk(0)) ok = false;
            for (long long r = 0; ok && r < m; ++r) ok = walk(1);
            if (ok) ok = walk(2);
            if (ok) expected.insert(m);
        }
        if (got != expected) ++fail;
    }
    rep.criterion(2, fail == 0,
                  "constraint-system exactness ({1,2} gadget plus 100 random single-loop "
                  "instances): " + std::to_string(fail) + " failures");
}

void criterion3(Rng rng, Report& rep) {
    int fail = 0, total = 0;
    std::vector<std::string> toks{"p", "q"};
    auto sigma = randgen::letter_universe(toks);
    for (int n = 1; n <= 3; ++n) {
        long long m = (1LL << (n + 1)) + 1;
        for (int iter = 0; iter < 50; ++iter) {
            std::vector<Letter> w1, s, w2p;
            int lw1 = static_cast<int>(rng.irange(0, 3));
            int ls = static_cast<int>(rng.irange(1, 2));
            int lw2 = static_cast<int>(rng.irange(1, 2));
            for (int i = 0; i < lw1; ++i) w1.push_back(rng.pick(sigma));
            for (int i = 0; i < ls; ++i) s.push_back(rng.pick(sigma));
            for (int i = 0; i < lw2; ++i) w2p.push_back(rng.pick(sigma));
            fo::Sentence phi = randgen::random_fo(rng, toks, n, 6);
            auto build = [&](long long reps) {
                UpWord w;
                w.prefix = w1;
                for (long long r = 0; r < reps; ++r)
                    w.prefix.insert(w.prefix.end(), s.begin(), s.end());
                w.period = w2p;
                return w;
            };
            ++total;
            if (fo::fo_eval(build(m), phi) != fo::fo_eval(build(m + 1), phi)) ++fail;
        }
    }
    rep.criterion(3, fail == 0,
                  "stuttering at N in {1,2,3}, M = 2^(N+1)+1, " + std::to_string(total) +
                      " word/sentence pairs: " + std::to_string(fail) + " disagreements");
}

void criterion4(Rng rng, Report& rep) {
    int fail = 0, accepted = 0;
    auto sigma = randgen::letter_universe({"p"});
    long long attempts = 0;
    while (accepted < 100 && attempts < 20000) {
        ++attempts;
        int nq = static_cast<int>(rng.irange(1, 3));
        spec::BuchiAutomaton b = randgen::random_explicit_ba(rng, sigma, nq);
        long long reps = 2 * nq * nq;
        std::vector<Letter> w1, u, w2, loop;
        for (int i = 0, n = static_cast<int>(rng.irange(0, 2)); i < n; ++i)
            w1.push_back(rng.pick(sigma));
        for (int i = 0, n = static_cast<int>(rng.irange(1, 2)); i < n; ++i)
            u.push_back(rng.pick(sigma));
        for (int i = 0, n = static_cast<int>(rng.irange(0, 2)); i < n; ++i)
            w2.push_back(rng.pick(sigma));
        for (int i = 0, n = static_cast<int>(rng.irange(1, 2)); i < n; ++i)
            loop.push_back(rng.pick(sigma));
        auto build = [&](long long r) {
            UpWord w;
            w.prefix = w1;
            for (long long i = 0; i < r; ++i) w.prefix.insert(w.prefix.end(), u.begin(), u.end());
            w.prefix.insert(w.prefix.end(), w2.begin(), w2.end());
            w.period = loop;
            return w;
        };
        if (!spec::membership(build(reps), b)) continue;
        ++accepted;
        bool some_k = false;
        for (int k = 1; k <= nq && !some_k; ++k)
            if (spec::membership(build(reps - k), b)) some_k = true;
        if (!some_k) ++fail;
    }
    rep.criterion(4, fail == 0 && accepted == 100,
                  "Buchi pumping on " + std::to_string(accepted) + " accepted words: " +
                      std::to_string(fail) + " failures");
}

void criterion5(Rng rng, Report& rep, bool parallel) {
    int fail = 0;
    struct Case {
        int n;
        std::vector<check::Clause> cnf;
    };
    std::vector<Case> cases;
    for (int iter = 0; iter < 100; ++iter) {
        int n = static_cast<int>(rng.irange(1, 6));
        int m = static_cast<int>(rng.irange(1, 10));
        cases.push_back({n, randgen::random_cnf(rng, n, m)});
    }
    std::vector<int> bad(cases.size(), 0);
    auto run = [&](size_t i) {
        const auto& c = cases[i];
        auto inst = check::gen_sat_instance(c.n, c.cnf);
        check::CheckOptions opts;
        auto v = check::model_check(inst.sys, inst.c0, check::Spec::of(inst.spec), opts);
        bool expected = oracle::oracle_sat(c.n, c.cnf);
        bool got_sat = v.answer == check::Answer::Sat;
        if (v.answer == check::Answer::Unknown || got_sat != expected) bad[i] = 1;
    };
#ifdef _OPENMP
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(cases.size()); ++i) run(i);
    } else
#endif
        for (size_t i = 0; i < cases.size(); ++i) run(i);
    for (int b : bad) fail += b;
    rep.criterion(5, fail == 0,
                  "SAT reduction round-trip on 100 random 3-CNF instances: " +
                      std::to_string(fail) + " disagreements");
}

void criterion6(Rng, Report& rep, bool parallel) {
    CounterSystem sys = core::parse_system(fig1_system_text());
    spec::BuchiSpec ba = spec::parse_ba(fig1_ba_text());
    check::CheckOptions opts;
    int fail = 0;
    auto expect = [&](long long v1, long long v2, check::Answer want) {
        Configuration c0{sys.state_id("q1"), {v1, v2}};
        auto v = check::model_check(sys, c0, check::Spec::of(ba), opts);
        if (v.answer != want) ++fail;
    };
    expect(0, 0, check::Answer::Sat);
    expect(3, 0, check::Answer::Sat);
    expect(1, 0, check::Answer::Unsat);

    presburger::Formula f = check::global_model_check(sys, sys.state_id("q1"), ba, opts);
    auto paper = [&](long long v1, long long v2) {
        // exists y >= 0: v1 = 3y + v2  or  v2 = 2y + v1
        bool left = v1 >= v2 && (v1 - v2) % 3 == 0;
        bool right = v2 >= v1 && (v2 - v1) % 2 == 0;
        return left || right;
    };
    int mismatches = 0;
    std::vector<std::pair<long long, long long>> grid;
    for (long long v1 = 0; v1 <= 30; ++v1)
        for (long long v2 = 0; v2 <= 30; ++v2) grid.emplace_back(v1, v2);
    std::vector<int> bad(grid.size(), 0);
    auto run = [&](size_t i) {
        auto [v1, v2] = grid[i];
        presburger::LinearAtom a1, a2;
        a1.coeffs["z1"] = 1;
        a1.cmp = Cmp::Eq;
        a1.rhs = v1;
        a2.coeffs["z2"] = 1;
        a2.cmp = Cmp::Eq;
        a2.rhs = v2;
        std::vector<presburger::Formula> parts{f, presburger::Formula::mk_atom(a1),
                                               presburger::Formula::mk_atom(a2)};
        auto res = presburger::feasible(presburger::Formula::mk_and(std::move(parts)));
        bool got = res.status == presburger::SolveStatus::Sat;
        if (res.status == presburger::SolveStatus::Unknown || got != paper(v1, v2)) bad[i] = 1;
    };
#ifdef _OPENMP
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(grid.size()); ++i) run(i);
    } else
#endif
        for (size_t i = 0; i < grid.size(); ++i) run(i);
    for (int b : bad) mismatches += b;
    rep.criterion(6, fail == 0 && mismatches == 0,
                  "worked example: verdicts at (0,0)/(3,0)/(1,0) plus pointwise global formula on "
                  "[0,30]^2: " + std::to_string(fail) + " verdict and " +
                      std::to_string(mismatches) + " pointwise mismatches");
}

void criterion7(Rng rng, Report& rep) {
    int fail = 0;
    for (int iter = 0; iter < 50; ++iter) {
        int n_letters = static_cast<int>(rng.irange(1, 3));
        presburger::Nfa nfa = randgen::random_nfa(rng, 4, n_letters);
        presburger::Formula f = presburger::parikh_formula(nfa);
        // brute-force Parikh vectors of accepted words with length <= 8
        std::set<std::vector<int>> accepted;
        {
            std::set<std::pair<int, std::vector<int>>> frontier{
                {nfa.initial, std::vector<int>(n_letters, 0)}};
            for (int len = 0; len <= 8; ++len) {
                std::set<std::pair<int, std::vector<int>>> next;
                for (const auto& [s, vec] : frontier) {
                    if (nfa.finals.count(s)) accepted.insert(vec);
                    for (const auto& [src, a, dst] : nfa.transitions) {
                        if (src != s) continue;
                        auto v2 = vec;
                        v2[a] += 1;
                        next.insert({dst, std::move(v2)});
                    }
                }
                frontier = std::move(next);
            }
        }
        // all candidate vectors with component sum <= 8
        std::vector<int> vec(n_letters, 0);
        std::function<bool(int, int)> spin = [&](int idx, int rest) -> bool {
            if (idx == n_letters) {
                std::vector<presburger::Formula> parts{f};
                for (int i = 0; i < n_letters; ++i) {
                    presburger::LinearAtom pin;
                    pin.coeffs[nfa.letters[i]] = 1;
                    pin.cmp = Cmp::Eq;
                    pin.rhs = vec[i];
                    parts.push_back(presburger::Formula::mk_atom(std::move(pin)));
                }
                auto res = presburger::feasible(presburger::Formula::mk_and(std::move(parts)));
                bool got = res.status == presburger::SolveStatus::Sat;
                return got == (accepted.count(vec) != 0);
            }
            for (int v = 0; v <= rest; ++v) {
                vec[idx] = v;
                if (!spin(idx + 1, rest - v)) return false;
            }
            return true;
        };
        if (!spin(0, 8)) ++fail;
    }
    rep.criterion(7, fail == 0,
                  "Parikh formula vs brute force on 50 NFAs, all count vectors with sum <= 8: " +
                      std::to_string(fail) + " mismatching automata");
}

void criterion8(Rng rng, Report& rep) {
    int fail = 0, words = 0;
    std::vector<std::string> toks{"p", "q"};
    auto sigma = randgen::letter_universe(toks);
    for (int iter = 0; iter < 50; ++iter) {
        spec::BuchiSpec b1 = randgen::random_ba(rng, toks, {}, 3);
        spec::BuchiSpec b2 = randgen::random_ba(rng, toks, {}, 3);
        spec::AbaSpec aba = randgen::conjunction_aba(b1, b2);
        spec::Dealternated impl(aba);
        spec::BuchiAutomaton prod =
            randgen::intersection_product(spec::expand(b1, sigma), spec::expand(b2, sigma));
        for (int k = 0; k < 20; ++k) {
            UpWord w = randgen::random_word(rng, sigma, 3, 3);
            ++words;
            if (spec::membership_onthefly(w, impl) != oracle::oracle_membership(w, prod)) ++fail;
        }
    }
    rep.criterion(8, fail == 0,
                  "dealternation vs explicit product on 50 conjunction ABAs x 20 words (" +
                      std::to_string(words) + " checks): " + std::to_string(fail) +
                      " disagreements");
}

void criterion9(Rng rng, Report& rep, bool parallel) {
    int contradictions = 0, unknowns = 0, decisive = 0;
    struct CaseBa {
        CounterSystem sys;
        Configuration c0;
        spec::BuchiSpec ba;
    };
    struct CaseFo {
        CounterSystem sys;
        Configuration c0;
        fo::Sentence phi;
    };
    std::vector<CaseBa> ba_cases;
    std::vector<CaseFo> fo_cases;
    for (int iter = 0; iter < 200; ++iter) {
        randgen::SysParams p;
        CaseBa c{randgen::random_flat_system(rng, p), {}, {}};
        c.c0 = randgen::random_config(rng, c.sys, 3);
        std::vector<std::string> atom_toks;
        if (rng.coin(0.6)) atom_toks.push_back(randgen::random_atom(rng, c.sys.dim, 3).token());
        c.ba = randgen::random_ba(rng, {"p", "q"}, atom_toks, 3);
        ba_cases.push_back(std::move(c));
    }
    for (int iter = 0; iter < 100; ++iter) {
        randgen::SysParams p;
        CaseFo c{randgen::random_flat_system(rng, p), {}, {}};
        c.c0 = randgen::random_config(rng, c.sys, 3);
        std::vector<std::string> toks{"p", "q"};
        if (rng.coin(0.5)) toks.push_back(randgen::random_atom(rng, c.sys.dim, 3).token());
        c.phi = randgen::random_fo(rng, toks, 2, 6);
        fo_cases.push_back(std::move(c));
    }
    std::vector<int> state_ba(ba_cases.size(), 0);  // 1 contra, 2 unknown, 3 decisive-ok
    std::vector<int> state_fo(fo_cases.size(), 0);
    auto run_ba = [&](size_t i) {
        const auto& c = ba_cases[i];
        auto ov = oracle::oracle_mc_ba(c.sys, c.c0, c.ba, 6);
        check::CheckOptions opts;
        auto v = check::model_check(c.sys, c.c0, check::Spec::of(c.ba), opts);
        if (v.answer == check::Answer::Unknown) {
            state_ba[i] = 2;
            return;
        }
        if (ov.answer == oracle::OracleVerdict::Answer::Inconclusive) return;
        bool oracle_sat = ov.answer == oracle::OracleVerdict::Answer::True;
        state_ba[i] = (oracle_sat == (v.answer == check::Answer::Sat)) ? 3 : 1;
    };
    auto run_fo = [&](size_t i) {
        const auto& c = fo_cases[i];
        std::vector<SysAtom> atoms;
        std::vector<std::string> props;
        check::spec_atoms(check::Spec::of(c.phi), c.sys.dim, atoms, props);
        bool exhaustive = false;
        auto lassos = oracle::enumerate_lassos(c.sys, c.c0, atoms, 6, exhaustive);
        bool any = false;
        for (const auto& l : lassos) {
            long long len = static_cast<long long>(l.word.prefix.size()) +
                            static_cast<long long>(l.word.period.size()) *
                                (1LL << fo::qheight(c.phi));
            if (oracle::oracle_fo_eval(l.word, c.phi, len)) {
                any = true;
                break;
            }
        }
        check::CheckOptions opts;
        auto v = check::model_check(c.sys, c.c0, check::Spec::of(c.phi), opts);
        if (v.answer == check::Answer::Unknown) {
            state_fo[i] = 2;
            return;
        }
        if (!any && !exhaustive) return;  // oracle not decisive for UNSAT
        state_fo[i] = (any == (v.answer == check::Answer::Sat)) ? 3 : 1;
    };
#ifdef _OPENMP
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(ba_cases.size()); ++i) run_ba(i);
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(fo_cases.size()); ++i) run_fo(i);
    } else
#endif
    {
        for (size_t i = 0; i < ba_cases.size(); ++i) run_ba(i);
        for (size_t i = 0; i < fo_cases.size(); ++i) run_fo(i);
    }
    for (int s : state_ba) {
        if (s == 1) ++contradictions;
        if (s == 2) ++unknowns;
        if (s == 3) ++decisive;
    }
    for (int s : state_fo) {
        if (s == 1) ++contradictions;
        if (s == 2) ++unknowns;
        if (s == 3) ++decisive;
    }
    double unknown_rate = 100.0 * unknowns / (ba_cases.size() + fo_cases.size());
    bool pass = contradictions == 0 && unknown_rate < 10.0;
    std::ostringstream d;
    d << "differential on 200 BA + 100 FO instances: " << contradictions << " contradictions, "
      << decisive << " decisive agreements, unknown rate "
      << static_cast<int>(unknown_rate * 10) / 10.0 << "%";
    rep.criterion(9, pass, d.str());
}

std::string mini_battery(unsigned long long seed) {
    std::ostringstream os;
    Report rep;
    criterion3(Rng(seed * 31 + 3), rep);
    criterion7(Rng(seed * 31 + 7), rep);
    os << rep.lines.str();
    return os.str();
}

void criterion10(const Options& opts, Report& rep) {
    std::string a = mini_battery(opts.seed);
    std::string b = mini_battery(opts.seed);
    rep.criterion(10, a == b,
                  a == b ? "two seeded re-runs produced byte-identical reports"
                         : "re-runs differ");
}

}  // namespace

bool run_acceptance(const Options& opts, std::ostream& out) {
    Report rep;
    unsigned long long s = opts.seed;
    criterion1(Rng(s * 31 + 1), rep);
    criterion2(Rng(s * 31 + 2), rep);
    criterion3(Rng(s * 31 + 3), rep);
    criterion4(Rng(s * 31 + 4), rep);
    criterion5(Rng(s * 31 + 5), rep, opts.parallel);
    criterion6(Rng(s * 31 + 6), rep, opts.parallel);
    criterion7(Rng(s * 31 + 7), rep);
    criterion8(Rng(s * 31 + 8), rep);
    criterion9(Rng(s * 31 + 9), rep, opts.parallel);
    criterion10(opts, rep);
    out << rep.lines.str();
    out << (rep.all_pass ? "acceptance: ALL PASS\n" : "acceptance: FAILURES PRESENT\n");
    return rep.all_pass;
}

}  // namespace flatmc::selftest
