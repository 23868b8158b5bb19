#include "flatmc/presburger.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

namespace flatmc::presburger {

namespace {

// Normalized constraint rows over interned variables.
//   GE:  sum coeffs*v >= rhs
//   EQ:  sum coeffs*v == rhs
struct Row {
    bool eq = false;
    std::vector<std::pair<int, Int>> terms;  // sorted by var id, nonzero coeffs
    Int rhs = 0;
};

Row make_row(bool eq, std::map<int, Int> terms, Int rhs) {
    Row r;
    r.eq = eq;
    r.rhs = std::move(rhs);
    for (auto& [v, c] : terms)
        if (c != 0) r.terms.emplace_back(v, std::move(c));
    return r;
}

// NNF tree over rows
struct Node {
    enum class Kind { Leaf, And, Or, ConstTrue, ConstFalse } kind;
    Row row;
    std::vector<Node> kids;
};

struct Interner {
    std::map<std::string, int> ids;
    std::vector<std::string> names;
    int get(const std::string& s) {
        auto it = ids.find(s);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(names.size());
        ids.emplace(s, id);
        names.push_back(s);
        return id;
    }
};

Node row_leaf(Row r) {
    Node n;
    n.kind = Node::Kind::Leaf;
    n.row = std::move(r);
    return n;
}

std::map<int, Int> intern_terms(const LinearAtom& a, Interner& in) {
    std::map<int, Int> t;
    for (const auto& [v, c] : a.coeffs) t[in.get(v)] += c;
    return t;
}

Node to_nnf(const Formula& f, bool neg, Interner& in) {
    using K = Formula::Kind;
    switch (f.kind) {
        case K::True: return Node{neg ? Node::Kind::ConstFalse : Node::Kind::ConstTrue, {}, {}};
        case K::False: return Node{neg ? Node::Kind::ConstTrue : Node::Kind::ConstFalse, {}, {}};
        case K::Not: return to_nnf(f.kids[0], !neg, in);
        case K::And:
        case K::Or: {
            Node n;
            bool conj = (f.kind == K::And) != neg;
            n.kind = conj ? Node::Kind::And : Node::Kind::Or;
            for (const auto& k : f.kids) n.kids.push_back(to_nnf(k, neg, in));
            return n;
        }
        case K::Atom: {
            auto terms = intern_terms(f.atom, in);
            auto negt = [&] {
                std::map<int, Int> m;
                for (const auto& [v, c] : terms) m[v] = -c;
                return m;
            };
            Int b = f.atom.rhs;
            Cmp c = f.atom.cmp;
            if (!neg) {
                switch (c) {
                    case Cmp::Eq: return row_leaf(make_row(true, terms, b));
                    case Cmp::Ge: return row_leaf(make_row(false, terms, b));
                    case Cmp::Gt: return row_leaf(make_row(false, terms, b + 1));
                    case Cmp::Le: return row_leaf(make_row(false, negt(), -b));
                    case Cmp::Lt: return row_leaf(make_row(false, negt(), -b + 1));
                }
            } else {
                switch (c) {
                    case Cmp::Eq: {
                        Node n;
                        n.kind = Node::Kind::Or;
                        n.kids.push_back(row_leaf(make_row(false, negt(), -b + 1)));  // < b
                        n.kids.push_back(row_leaf(make_row(false, terms, b + 1)));    // > b
                        return n;
                    }
                    case Cmp::Ge: return row_leaf(make_row(false, negt(), -b + 1));
                    case Cmp::Gt: return row_leaf(make_row(false, negt(), -b));
                    case Cmp::Le: return row_leaf(make_row(false, terms, b + 1));
                    case Cmp::Lt: return row_leaf(make_row(false, terms, b));
                }
            }
        }
    }
    return Node{Node::Kind::ConstFalse, {}, {}};
}

// ---------------------------------------------------------------------------
// exact rational LP feasibility (phase-1 simplex, Bland's rule)

struct Lp {
    // rows: sum a_ij x_j (>= | ==) b_i with x_j >= 0
    std::vector<std::vector<Rat>> a;
    std::vector<Rat> b;
    std::vector<bool> eq;
    int nvars = 0;

    // returns a feasible rational point, or nullopt
    std::optional<std::vector<Rat>> solve(long long& pivot_budget) const {
        int m = static_cast<int>(a.size());
        if (m == 0) return std::vector<Rat>(nvars, Rat(0));
        // standard form: A' x + slack/artificial = b', b' >= 0
        int n_surplus = 0;
        for (int i = 0; i < m; ++i)
            if (!eq[i]) ++n_surplus;
        int total = nvars + n_surplus + m;  // + artificials
        std::vector<std::vector<Rat>> t(m, std::vector<Rat>(total + 1, Rat(0)));
        std::vector<int> basis(m);
        int si = 0;
        for (int i = 0; i < m; ++i) {
            bool flip = b[i] < 0;
            for (int j = 0; j < nvars; ++j) t[i][j] = flip ? -a[i][j] : a[i][j];
            Rat rhs = flip ? -b[i] : b[i];
            if (!eq[i]) {
                // surplus for >=; flipping turns it into a slack
                t[i][nvars + si] = flip ? Rat(1) : Rat(-1);
                ++si;
            }
            t[i][nvars + n_surplus + i] = 1;
            t[i][total] = rhs;
            basis[i] = nvars + n_surplus + i;
        }
        // objective: minimize sum of artificials -> row z = sum of artificial rows
        std::vector<Rat> z(total + 1, Rat(0));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j <= total; ++j) z[j] += t[i][j];
        for (int i = 0; i < m; ++i) z[nvars + n_surplus + i] = 0;

        auto pivot = [&](int pr, int pc) {
            Rat p = t[pr][pc];
            for (int j = 0; j <= total; ++j) t[pr][j] /= p;
            for (int i = 0; i < m; ++i) {
                if (i == pr || t[i][pc] == 0) continue;
                Rat f = t[i][pc];
                for (int j = 0; j <= total; ++j) t[i][j] -= f * t[pr][j];
            }
            if (z[pc] != 0) {
                Rat f = z[pc];
                for (int j = 0; j <= total; ++j) z[j] -= f * t[pr][j];
            }
            basis[pr] = pc;
        };

        while (true) {
            if (--pivot_budget < 0) return std::nullopt;  // caller treats as unknown
            int pc = -1;
            for (int j = 0; j < nvars + n_surplus; ++j) {
                if (z[j] > 0) {  // Bland: first improving column
                    pc = j;
                    break;
                }
            }
            if (pc < 0) break;
            int pr = -1;
            for (int i = 0; i < m; ++i) {
                if (t[i][pc] <= 0) continue;
                if (pr < 0) {
                    pr = i;
                    continue;
                }
                Rat cur = t[i][total] / t[i][pc];
                Rat best = t[pr][total] / t[pr][pc];
                if (cur < best || (cur == best && basis[i] < basis[pr])) pr = i;
            }
            if (pr < 0) break;  // unbounded in artificial objective: cannot happen
            pivot(pr, pc);
        }
        if (z[total] != 0) return std::nullopt;  // artificials stuck positive
        std::vector<Rat> x(nvars, Rat(0));
        for (int i = 0; i < m; ++i)
            if (basis[i] < nvars) x[basis[i]] = t[i][total];
        return x;
    }
};

struct Bound {
    Int lo = 0;
    bool hi_set = false;
    Int hi = 0;
};

struct IlpProblem {
    std::vector<Row> rows;
    int nvars;
};

// single round of interval propagation; returns false on contradiction
bool propagate_bounds(const std::vector<Row>& rows, std::vector<Bound>& bd) {
    for (int iter = 0; iter < 8; ++iter) {
        bool changed = false;
        for (const auto& r : rows) {
            // for GE rows: sum >= rhs; for EQ also sum <= rhs
            for (int dir = 0; dir < (r.eq ? 2 : 1); ++dir) {
                // dir 0: sum >= rhs ; dir 1: -sum >= -rhs
                // max of the other terms bounds each var
                bool any_unbounded_pos = false;
                Int max_sum = 0;
                for (const auto& [v, c0] : r.terms) {
                    Int c = dir ? -c0 : c0;
                    if (c > 0) {
                        if (!bd[v].hi_set) {
                            any_unbounded_pos = true;
                        } else {
                            max_sum += c * bd[v].hi;
                        }
                    } else {
                        max_sum += c * bd[v].lo;
                    }
                }
                Int rhs = dir ? -r.rhs : r.rhs;
                if (!any_unbounded_pos && max_sum < rhs) return false;
                for (const auto& [v, c0] : r.terms) {
                    Int c = dir ? -c0 : c0;
                    if (c == 0) continue;
                    // rest_max = max_sum - contribution of v (needs v bounded on + side)
                    if (c > 0) {
                        if (any_unbounded_pos) continue;  // cannot isolate
                        Int rest = max_sum - c * bd[v].hi;
                        // c*v >= rhs - rest  ->  v >= ceil((rhs-rest)/c)
                        Int num = rhs - rest;
                        Int lo = num >= 0 ? Int((num + c - 1) / c) : Int(-((-num) / c));
                        if (lo > bd[v].lo) {
                            bd[v].lo = lo;
                            changed = true;
                        }
                    } else {
                        bool rest_unbounded = any_unbounded_pos;
                        if (!rest_unbounded) {
                            Int rest = max_sum - c * bd[v].lo;
                            // c*v >= rhs - rest with c<0 -> v <= floor((rest-rhs)/(-c))
                            Int num = rest - rhs;
                            Int neg = -c;
                            if (num < 0) return false;
                            Int hi = num / neg;
                            if (!bd[v].hi_set || hi < bd[v].hi) {
                                bd[v].hi_set = true;
                                bd[v].hi = hi;
                                changed = true;
                            }
                        }
                    }
                    if (bd[v].hi_set && bd[v].lo > bd[v].hi) return false;
                }
            }
        }
        if (!changed) break;
    }
    return true;
}

Int gcd_int(Int a, Int b) {
    a = abs(a);
    b = abs(b);
    while (b != 0) {
        Int t = a % b;
        a = b;
        b = t;
    }
    return a;
}

struct IlpSolver {
    long long node_budget;
    long long pivot_budget;
    bool budget_hit = false;

    // Eliminated equalities for witness reconstruction: v = (rhs - terms)/1
    struct Elim {
        int var;
        std::vector<std::pair<int, Int>> terms;
        Int rhs;
        Int coef;  // +1 or -1
    };

    std::optional<std::vector<Int>> solve(std::vector<Row> rows, int nvars) {
        std::vector<Elim> elims;

        // equality substitution on unit-coefficient variables
        bool again = true;
        while (again) {
            again = false;
            for (size_t i = 0; i < rows.size(); ++i) {
                if (!rows[i].eq) continue;
                int pick = -1;
                Int coef;
                for (const auto& [v, c] : rows[i].terms) {
                    if (c == 1 || c == -1) {
                        pick = v;
                        coef = c;
                        break;
                    }
                }
                if (pick < 0) continue;
                Elim e;
                e.var = pick;
                e.coef = coef;
                e.rhs = rows[i].rhs;
                for (const auto& [v, c] : rows[i].terms)
                    if (v != pick) e.terms.emplace_back(v, c);
                // substitute  pick = coef*(rhs - sum terms)  into all rows,
                // and keep pick >= 0 as a GE row
                Row nonneg;  // coef*(rhs - terms) >= 0
                {
                    std::map<int, Int> t;
                    for (const auto& [v, c] : e.terms) t[v] = -e.coef * c;
                    nonneg = make_row(false, std::move(t), -e.coef * e.rhs);
                }
                std::vector<Row> next;
                next.reserve(rows.size());
                for (size_t j = 0; j < rows.size(); ++j) {
                    if (j == i) continue;
                    const Row& r = rows[j];
                    Int cv = 0;
                    for (const auto& [v, c] : r.terms)
                        if (v == pick) cv = c;
                    if (cv == 0) {
                        next.push_back(r);
                        continue;
                    }
                    std::map<int, Int> t;
                    for (const auto& [v, c] : r.terms)
                        if (v != pick) t[v] = c;
                    // pick = coef*rhs - coef*terms
                    for (const auto& [v, c] : e.terms) t[v] -= cv * e.coef * c;
                    Int rhs = r.rhs - cv * e.coef * e.rhs;
                    next.push_back(make_row(r.eq, std::move(t), std::move(rhs)));
                }
                next.push_back(std::move(nonneg));
                rows = std::move(next);
                elims.push_back(std::move(e));
                again = true;
                break;
            }
        }

        // gcd normalization; detect integral infeasibility of equalities
        for (auto& r : rows) {
            if (r.terms.empty()) {
                bool ok = r.eq ? (r.rhs == 0) : (r.rhs <= 0);
                if (!ok) return std::nullopt;
                continue;
            }
            Int g = 0;
            for (const auto& [v, c] : r.terms) g = gcd_int(g, c);
            if (g > 1) {
                if (r.eq) {
                    if (r.rhs % g != 0) return std::nullopt;
                    for (auto& [v, c] : r.terms) c /= g;
                    r.rhs /= g;
                } else {
                    for (auto& [v, c] : r.terms) c /= g;
                    // ceil(rhs/g)
                    Int q = r.rhs >= 0 ? Int((r.rhs + g - 1) / g) : Int(-((-r.rhs) / g));
                    r.rhs = q;
                }
            }
        }
        // opposite-pair inequality rows that force an equality slab
        for (size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].eq) continue;
            for (size_t j = i + 1; j < rows.size(); ++j) {
                if (rows[j].eq) continue;
                if (rows[i].terms.size() != rows[j].terms.size()) continue;
                bool opp = true;
                for (size_t k = 0; k < rows[i].terms.size(); ++k) {
                    if (rows[i].terms[k].first != rows[j].terms[k].first ||
                        rows[i].terms[k].second != -rows[j].terms[k].second) {
                        opp = false;
                        break;
                    }
                }
                if (!opp) continue;
                // sum >= b1 and -sum >= b2  ->  b1 <= sum <= -b2
                if (rows[i].rhs == -rows[j].rhs) {
                    Int g = 0;
                    for (const auto& [v, c] : rows[i].terms) g = gcd_int(g, c);
                    if (g > 1 && rows[i].rhs % g != 0) return std::nullopt;
                }
                if (-rows[j].rhs < rows[i].rhs) return std::nullopt;
            }
        }

        std::vector<Bound> bd(nvars);
        if (!propagate_bounds(rows, bd)) return std::nullopt;
        auto point = branch(rows, bd, nvars, 0);
        if (!point) return std::nullopt;

        // reconstruct eliminated variables in reverse order
        std::vector<Int> full = *point;
        for (auto it = elims.rbegin(); it != elims.rend(); ++it) {
            Int s = it->rhs;
            for (const auto& [v, c] : it->terms) s -= c * full[v];
            full[it->var] = it->coef * s;
        }
        return full;
    }

    static bool rows_hold(const std::vector<Row>& rows, const std::vector<Int>& x) {
        for (const auto& r : rows) {
            Int s = 0;
            for (const auto& [v, c] : r.terms) s += c * x[v];
            if (r.eq ? (s != r.rhs) : (s < r.rhs)) return false;
        }
        return true;
    }

    std::optional<std::vector<Int>> branch(const std::vector<Row>& rows, std::vector<Bound> bd,
                                           int nvars, int depth) {
        if (--node_budget < 0) {
            budget_hit = true;
            return std::nullopt;
        }
        if (!propagate_bounds(rows, bd)) return std::nullopt;

        // LP relaxation including the current bounds
        Lp lp;
        lp.nvars = nvars;
        for (const auto& r : rows) {
            std::vector<Rat> row(nvars, Rat(0));
            for (const auto& [v, c] : r.terms) row[v] = Rat(c);
            lp.a.push_back(std::move(row));
            lp.b.push_back(Rat(r.rhs));
            lp.eq.push_back(r.eq);
        }
        for (int v = 0; v < nvars; ++v) {
            if (bd[v].lo > 0) {
                std::vector<Rat> row(nvars, Rat(0));
                row[v] = 1;
                lp.a.push_back(std::move(row));
                lp.b.push_back(Rat(bd[v].lo));
                lp.eq.push_back(false);
            }
            if (bd[v].hi_set) {
                std::vector<Rat> row(nvars, Rat(0));
                row[v] = -1;
                lp.a.push_back(std::move(row));
                lp.b.push_back(Rat(-bd[v].hi));
                lp.eq.push_back(false);
            }
        }
        auto sol = lp.solve(pivot_budget);
        if (pivot_budget < 0) {
            budget_hit = true;
            return std::nullopt;
        }
        if (!sol) return std::nullopt;

        // integral already?
        int frac_var = -1;
        std::vector<Int> rounded(nvars);
        for (int v = 0; v < nvars; ++v) {
            const Rat& val = (*sol)[v];
            Int fl = Int(boost::multiprecision::numerator(val) /
                         boost::multiprecision::denominator(val));
            if (Rat(fl) > val) fl -= 1;  // true floor for negatives (values are >= 0 anyway)
            rounded[v] = fl;
            if (Rat(fl) != val && frac_var < 0) frac_var = v;
        }
        if (frac_var < 0) {
            if (rows_hold(rows, rounded)) return rounded;
            frac_var = 0;  // defensive; should not happen
        } else {
            // cheap rounding probe (floor and ceil of the fractional seat)
            for (int delta = 0; delta <= 1; ++delta) {
                std::vector<Int> probe = rounded;
                probe[frac_var] += delta;
                bool in_bounds = probe[frac_var] >= bd[frac_var].lo &&
                                 (!bd[frac_var].hi_set || probe[frac_var] <= bd[frac_var].hi);
                if (in_bounds && rows_hold(rows, probe)) return probe;
            }
        }

        Int split = rounded[frac_var];
        // left: v <= split ; right: v >= split+1
        {
            std::vector<Bound> left = bd;
            if (!left[frac_var].hi_set || split < left[frac_var].hi) {
                left[frac_var].hi_set = true;
                left[frac_var].hi = split;
            }
            if (left[frac_var].lo <= left[frac_var].hi) {
                auto r = branch(rows, std::move(left), nvars, depth + 1);
                if (r) return r;
            }
        }
        {
            std::vector<Bound> right = bd;
            if (split + 1 > right[frac_var].lo) right[frac_var].lo = split + 1;
            if (!right[frac_var].hi_set || right[frac_var].lo <= right[frac_var].hi) {
                auto r = branch(rows, std::move(right), nvars, depth + 1);
                if (r) return r;
            }
        }
        return std::nullopt;
    }
};

// ---------------------------------------------------------------------------
// DPLL over the Boolean structure

struct Search {
    Interner& in;
    IlpSolver ilp;
    bool unknown = false;

    std::optional<std::vector<Int>> run(const Node& root) {
        std::vector<Row> asserted;
        std::vector<const Node*> pending{&root};
        return go(pending, asserted);
    }

    std::optional<std::vector<Int>> go(std::vector<const Node*> pending, std::vector<Row> asserted) {
        while (!pending.empty()) {
            const Node* n = pending.back();
            pending.pop_back();
            switch (n->kind) {
                case Node::Kind::ConstTrue: break;
                case Node::Kind::ConstFalse: return std::nullopt;
                case Node::Kind::Leaf: {
                    if (n->row.terms.empty()) {
                        bool ok = n->row.eq ? (n->row.rhs == 0) : (n->row.rhs <= 0);
                        if (!ok) return std::nullopt;
                    } else {
                        asserted.push_back(n->row);
                    }
                    break;
                }
                case Node::Kind::And:
                    for (auto it = n->kids.rbegin(); it != n->kids.rend(); ++it)
                        pending.push_back(&*it);
                    break;
                case Node::Kind::Or: {
                    for (const auto& kid : n->kids) {
                        auto branch_pending = pending;
                        branch_pending.push_back(&kid);
                        auto r = go(std::move(branch_pending), asserted);
                        if (r) return r;
                        if (ilp.budget_hit) {
                            unknown = true;
                            return std::nullopt;
                        }
                    }
                    return std::nullopt;
                }
            }
        }
        auto r = ilp.solve(std::move(asserted), static_cast<int>(in.names.size()));
        if (ilp.budget_hit) unknown = true;
        return r;
    }
};

}  // namespace

SolveResult feasible(const Formula& f, const SolveOptions& opts) {
    Interner in;
    Node root = to_nnf(f, false, in);

    Search search{in, IlpSolver{opts.node_budget, opts.node_budget * 64}};
    auto point = search.run(root);

    SolveResult res;
    if (point) {
        for (size_t v = 0; v < in.names.size(); ++v) res.witness[in.names[v]] = (*point)[v];
        for (const auto& name : free_vars(f))
            if (!res.witness.count(name)) res.witness[name] = 0;
        if (!eval(f, res.witness)) {
            res.status = SolveStatus::Unknown;
            res.reason = "internal witness verification failed";
            res.witness.clear();
            return res;
        }
        if (opts.lex_min_witness && res.witness.size() <= 8) {
            // fix variables one at a time, smallest value first
            Formula fixed = f;
            for (auto& [name, val] : res.witness) {
                Int lo = 0, hi = val;
                while (lo < hi) {
                    Int mid = (lo + hi) / 2;
                    LinearAtom pin;
                    pin.cmp = Cmp::Le;
                    pin.coeffs[name] = 1;
                    pin.rhs = static_cast<long long>(mid);
                    std::vector<Formula> parts{fixed, Formula::mk_atom(pin)};
                    SolveOptions inner = opts;
                    inner.lex_min_witness = false;
                    auto sub = feasible(Formula::mk_and(parts), inner);
                    if (sub.status == SolveStatus::Sat) hi = mid;
                    else if (sub.status == SolveStatus::Unsat) lo = mid + 1;
                    else break;
                }
                val = lo;
                LinearAtom pin;
                pin.cmp = Cmp::Eq;
                pin.coeffs[name] = 1;
                pin.rhs = static_cast<long long>(val);
                std::vector<Formula> parts{fixed, Formula::mk_atom(pin)};
                fixed = Formula::mk_and(parts);
            }
            if (!eval(f, res.witness)) {
                // fall back to the first-found witness on any lex-min hiccup
                res.witness.clear();
                for (size_t v = 0; v < in.names.size(); ++v)
                    res.witness[in.names[v]] = (*point)[v];
                for (const auto& name : free_vars(f))
                    if (!res.witness.count(name)) res.witness[name] = 0;
            }
        }
        res.status = SolveStatus::Sat;
        return res;
    }
    if (search.unknown) {
        res.status = SolveStatus::Unknown;
        res.reason = "solver budget exhausted";
        return res;
    }
    res.status = SolveStatus::Unsat;
    return res;
}

}  // namespace flatmc::presburger
