#include "flatmc/counter_system.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <sstream>

namespace flatmc::core {

bool SysAtom::holds(const std::vector<long long>& v) const {
    long long lhs = 0;
    for (size_t i = 0; i < coeffs.size() && i < v.size(); ++i) lhs += coeffs[i] * v[i];
    return cmp_holds(cmp, lhs, rhs);
}

std::string SysAtom::token() const {
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < coeffs.size(); ++i) {
        long long c = coeffs[i];
        if (c == 0) continue;
        if (c > 0 && !first) os << "+";
        if (c == -1) os << "-";
        else if (c != 1) os << c << "*";
        os << "x" << (i + 1);
        first = false;
    }
    if (first) os << "0";
    os << cmp_text(cmp) << rhs;
    return os.str();
}

Guard Guard::mk_not(Guard g) {
    Guard r;
    r.kind = Kind::Not;
    r.kids.push_back(std::move(g));
    return r;
}
Guard Guard::mk_and(Guard a, Guard b) {
    Guard r;
    r.kind = Kind::And;
    r.kids.push_back(std::move(a));
    r.kids.push_back(std::move(b));
    return r;
}
Guard Guard::mk_or(Guard a, Guard b) {
    Guard r;
    r.kind = Kind::Or;
    r.kids.push_back(std::move(a));
    r.kids.push_back(std::move(b));
    return r;
}

bool eval_guard(const Guard& g, const std::vector<long long>& v, int dim) {
    if (static_cast<int>(v.size()) != dim)
        throw DimensionMismatch("counter vector has wrong dimension");
    switch (g.kind) {
        case Guard::Kind::True: return true;
        case Guard::Kind::False: return false;
        case Guard::Kind::Atom: return g.atom.holds(v);
        case Guard::Kind::Not: return !eval_guard(g.kids[0], v, dim);
        case Guard::Kind::And:
            return eval_guard(g.kids[0], v, dim) && eval_guard(g.kids[1], v, dim);
        case Guard::Kind::Or:
            return eval_guard(g.kids[0], v, dim) || eval_guard(g.kids[1], v, dim);
    }
    return false;
}

bool eval_guard(const CounterSystem& sys, const Guard& g, const std::vector<long long>& v) {
    return eval_guard(g, v, sys.dim);
}

void collect_atoms(const Guard& g, std::vector<SysAtom>& out) {
    if (g.kind == Guard::Kind::Atom) out.push_back(g.atom);
    for (const auto& k : g.kids) collect_atoms(k, out);
}

int CounterSystem::state_id(const std::string& name) const {
    for (int i = 0; i < n_states(); ++i)
        if (state_names[i] == name) return i;
    return -1;
}

int CounterSystem::add_state(const std::string& name, std::set<std::string> props) {
    state_names.push_back(name);
    labels.push_back(std::move(props));
    return n_states() - 1;
}

void CounterSystem::add_transition(int src, int dst, Guard g, std::vector<long long> update) {
    if (static_cast<int>(update.size()) != dim)
        throw DimensionMismatch("update vector has wrong dimension");
    transitions.push_back({src, dst, std::move(g), std::move(update)});
}

std::vector<int> CounterSystem::out_transitions(int state) const {
    std::vector<int> out;
    for (size_t t = 0; t < transitions.size(); ++t)
        if (transitions[t].src == state) out.push_back(static_cast<int>(t));
    return out;
}

std::vector<std::string> CounterSystem::propositions() const {
    std::set<std::string> s;
    for (const auto& l : labels) s.insert(l.begin(), l.end());
    return {s.begin(), s.end()};
}

std::vector<SysAtom> CounterSystem::guard_atoms() const {
    std::vector<SysAtom> all;
    for (const auto& t : transitions) collect_atoms(t.guard, all);
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
}

Configuration step(const CounterSystem& sys, const Configuration& c, int transition) {
    const Transition& t = sys.transitions.at(transition);
    if (t.src != c.state) throw WrongSource("transition source does not match configuration");
    if (!eval_guard(sys, t.guard, c.counters)) throw GuardFailed("guard does not hold");
    Configuration next;
    next.state = t.dst;
    next.counters = c.counters;
    for (int i = 0; i < sys.dim; ++i) {
        next.counters[i] += t.update[i];
        if (next.counters[i] < 0)
            throw NonNegativityViolation("counter " + std::to_string(i + 1) + " below zero");
    }
    return next;
}

// A state lies on >= 2 simple cycles iff it admits >= 2 distinct edge-simple
// closed walks that avoid it in the interior.
static int count_minimal_cycles(const CounterSystem& sys, int q, int cap,
                                std::vector<int>* first_cycle = nullptr) {
    int found = 0;
    std::vector<bool> used(sys.transitions.size(), false);
    std::vector<int> path;
    auto dfs = [&](auto&& self, int cur) -> void {
        if (found >= cap) return;
        for (size_t t = 0; t < sys.transitions.size(); ++t) {
            if (used[t] || sys.transitions[t].src != cur) continue;
            int dst = sys.transitions[t].dst;
            used[t] = true;
            path.push_back(static_cast<int>(t));
            if (dst == q) {
                if (found == 0 && first_cycle) *first_cycle = path;
                ++found;
            } else {
                self(self, dst);
            }
            path.pop_back();
            used[t] = false;
            if (found >= cap) return;
        }
    };
    dfs(dfs, q);
    return found;
}

bool is_flat(const CounterSystem& sys) {
    for (int q = 0; q < sys.n_states(); ++q)
        if (count_minimal_cycles(sys, q, 2) >= 2) return false;
    return true;
}

std::optional<std::vector<int>> cycle_at(const CounterSystem& sys, int state) {
    std::vector<int> cyc;
    if (count_minimal_cycles(sys, state, 1, &cyc) >= 1) return cyc;
    return std::nullopt;
}

std::vector<Run> enumerate_runs(const CounterSystem& sys, const Configuration& c0, int depth) {
    std::vector<Run> out;
    Run base;
    base.start = c0;
    base.configs.push_back(c0);
    out.push_back(base);
    std::deque<Run> frontier{base};
    while (!frontier.empty()) {
        Run r = std::move(frontier.front());
        frontier.pop_front();
        if (static_cast<int>(r.steps.size()) >= depth) continue;
        const Configuration& cur = r.configs.back();
        for (int t : sys.out_transitions(cur.state)) {
            try {
                Configuration next = step(sys, cur, t);
                Run ext = r;
                ext.steps.push_back(t);
                ext.configs.push_back(std::move(next));
                out.push_back(ext);
                frontier.push_back(std::move(ext));
            } catch (const GuardFailed&) {
            } catch (const NonNegativityViolation&) {
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// text DSL

namespace {

struct GCursor {
    const std::string& s;
    size_t i = 0;
    int line;
    int col0;

    GCursor(const std::string& text, int line_, int col_) : s(text), line(line_), col0(col_) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, line, col0 + static_cast<int>(i));
    }
    bool eof() const { return i >= s.size(); }
    char peek() const { return eof() ? '\0' : s[i]; }
    char get() { return s[i++]; }
    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) get();
    }
    long long integer() {
        skip_ws();
        bool neg = false;
        if (peek() == '-') {
            get();
            neg = true;
        }
        if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected an integer");
        long long v = 0;
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) v = v * 10 + (get() - '0');
        return neg ? -v : v;
    }
};

struct GuardParser {
    GCursor& c;
    int dim;

    Guard parse() {
        Guard g = unit();
        c.skip_ws();
        return g;
    }

    Guard unit() {
        c.skip_ws();
        if (c.peek() == '!') {
            c.get();
            return Guard::mk_not(unit());
        }
        if (c.peek() == '(') {
            c.get();
            Guard lhs = unit();
            c.skip_ws();
            if (c.peek() == '&' || c.peek() == '|') {
                char op = c.get();
                Guard rhs = unit();
                c.skip_ws();
                if (c.peek() != ')') c.fail("expected ')'");
                c.get();
                return op == '&' ? Guard::mk_and(std::move(lhs), std::move(rhs))
                                 : Guard::mk_or(std::move(lhs), std::move(rhs));
            }
            if (c.peek() != ')') c.fail("expected ')'");
            c.get();
            return lhs;
        }
        size_t save = c.i;
        std::string w;
        while (!c.eof() && std::isalpha(static_cast<unsigned char>(c.peek()))) w += c.get();
        if (w == "true") return Guard::truth();
        if (w == "false") return Guard::falsity();
        c.i = save;
        return Guard::mk_atom(atom());
    }

    SysAtom atom() {
        SysAtom a;
        a.coeffs.assign(dim, 0);
        bool first = true;
        while (true) {
            c.skip_ws();
            long long sign = 1;
            if (c.peek() == '+') {
                c.get();
            } else if (c.peek() == '-') {
                c.get();
                sign = -1;
            } else if (!first) {
                break;
            }
            c.skip_ws();
            long long coef = 1;
            if (std::isdigit(static_cast<unsigned char>(c.peek()))) {
                coef = c.integer();
                c.skip_ws();
                if (c.peek() == '*') c.get();
                c.skip_ws();
            }
            if (c.peek() != 'x') c.fail("expected a counter reference x<i>");
            c.get();
            long long idx = c.integer();
            if (idx < 1 || idx > dim) c.fail("counter index out of range");
            a.coeffs[idx - 1] += sign * coef;
            first = false;
        }
        c.skip_ws();
        if (c.peek() == '<') {
            c.get();
            if (c.peek() == '=') {
                c.get();
                a.cmp = Cmp::Le;
            } else {
                a.cmp = Cmp::Lt;
            }
        } else if (c.peek() == '>') {
            c.get();
            if (c.peek() == '=') {
                c.get();
                a.cmp = Cmp::Ge;
            } else {
                a.cmp = Cmp::Gt;
            }
        } else if (c.peek() == '=') {
            c.get();
            a.cmp = Cmp::Eq;
        } else {
            c.fail("expected a comparison operator");
        }
        a.rhs = c.integer();
        return a;
    }
};

std::string strip(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Guard parse_guard(const std::string& text, int dim) {
    GCursor c(text, 1, 1);
    GuardParser p{c, dim};
    Guard g = p.parse();
    c.skip_ws();
    if (!c.eof()) c.fail("trailing input after guard");
    return g;
}

CounterSystem parse_system(const std::string& text) {
    CounterSystem sys;
    bool have_dim = false;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = strip(raw);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "system") {
            int n;
            if (!(ls >> n) || n < 0) throw ParseError("expected `system <n>`", lineno, 1);
            sys.dim = n;
            have_dim = true;
        } else if (kw == "state") {
            if (!have_dim) throw ParseError("`system <n>` must come first", lineno, 1);
            std::string name;
            if (!(ls >> name)) throw ParseError("expected a state name", lineno, 1);
            if (sys.state_id(name) >= 0) throw ParseError("duplicate state " + name, lineno, 1);
            std::set<std::string> props;
            std::string tok;
            if (ls >> tok) {
                if (tok != "props") throw ParseError("expected `props`", lineno, 1);
                while (ls >> tok) props.insert(tok);
            }
            sys.add_state(name, std::move(props));
        } else if (kw == "trans") {
            if (!have_dim) throw ParseError("`system <n>` must come first", lineno, 1);
            std::string src, arrow, dst, g;
            if (!(ls >> src >> arrow >> dst) || arrow != "->")
                throw ParseError("expected `trans <src> -> <dst> ...`", lineno, 1);
            int si = sys.state_id(src), di = sys.state_id(dst);
            if (si < 0) throw ParseError("unknown state " + src, lineno, 1);
            if (di < 0) throw ParseError("unknown state " + dst, lineno, 1);
            std::string rest;
            std::getline(ls, rest);
            size_t gpos = rest.find("guard");
            size_t upos = rest.find("update");
            if (gpos == std::string::npos || upos == std::string::npos || upos < gpos)
                throw ParseError("expected `guard <expr> update (<i1>,...)`", lineno, 1);
            std::string gtext = strip(rest.substr(gpos + 5, upos - gpos - 5));
            std::string utext = strip(rest.substr(upos + 6));
            GCursor gc(gtext, lineno, 1);
            Guard guard = GuardParser{gc, sys.dim}.parse();
            gc.skip_ws();
            if (!gc.eof()) gc.fail("trailing input after guard");
            if (utext.empty() || utext.front() != '(' || utext.back() != ')')
                throw ParseError("update must look like (<i1>,...,<in>)", lineno, 1);
            std::vector<long long> upd;
            std::string body = utext.substr(1, utext.size() - 2);
            std::istringstream us(body);
            std::string num;
            while (std::getline(us, num, ',')) {
                num = strip(num);
                if (num.empty()) throw ParseError("empty update entry", lineno, 1);
                try {
                    upd.push_back(std::stoll(num));
                } catch (...) {
                    throw ParseError("bad update entry `" + num + "`", lineno, 1);
                }
            }
            if (static_cast<int>(upd.size()) != sys.dim)
                throw ParseError("update has wrong arity", lineno, 1);
            sys.add_transition(si, di, std::move(guard), std::move(upd));
        } else {
            throw ParseError("unknown declaration `" + kw + "`", lineno, 1);
        }
    }
    return sys;
}

static void guard_to_text(std::ostream& os, const Guard& g) {
    switch (g.kind) {
        case Guard::Kind::True: os << "true"; return;
        case Guard::Kind::False: os << "false"; return;
        case Guard::Kind::Atom: os << g.atom.token(); return;
        case Guard::Kind::Not:
            os << "!";
            if (g.kids[0].kind == Guard::Kind::Atom) {
                os << "(";
                guard_to_text(os, g.kids[0]);
                os << ")";
            } else {
                guard_to_text(os, g.kids[0]);
            }
            return;
        case Guard::Kind::And:
        case Guard::Kind::Or:
            os << "(";
            guard_to_text(os, g.kids[0]);
            os << (g.kind == Guard::Kind::And ? " & " : " | ");
            guard_to_text(os, g.kids[1]);
            os << ")";
            return;
    }
}

std::string to_text(const CounterSystem& sys) {
    std::ostringstream os;
    os << "system " << sys.dim << "\n";
    for (int q = 0; q < sys.n_states(); ++q) {
        os << "state " << sys.state_names[q];
        if (!sys.labels[q].empty()) {
            os << " props";
            for (const auto& p : sys.labels[q]) os << " " << p;
        }
        os << "\n";
    }
    for (const auto& t : sys.transitions) {
        os << "trans " << sys.state_names[t.src] << " -> " << sys.state_names[t.dst] << " guard ";
        guard_to_text(os, t.guard);
        os << " update (";
        for (int i = 0; i < sys.dim; ++i) {
            if (i) os << ",";
            os << t.update[i];
        }
        os << ")\n";
    }
    return os.str();
}

}  // namespace flatmc::core
