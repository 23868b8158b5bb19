#include "flatmc/presburger.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace flatmc::presburger {

Formula Formula::mk_atom(LinearAtom a) {
    std::erase_if(a.coeffs, [](const auto& kv) { return kv.second == 0; });
    Formula f;
    f.kind = Kind::Atom;
    f.atom = std::move(a);
    return f;
}

Formula Formula::mk_not(Formula f) {
    Formula r;
    r.kind = Kind::Not;
    r.kids.push_back(std::move(f));
    return r;
}

Formula Formula::mk_and(std::vector<Formula> fs) {
    if (fs.empty()) return truth();
    if (fs.size() == 1) return std::move(fs.front());
    Formula r;
    r.kind = Kind::And;
    r.kids = std::move(fs);
    return r;
}

Formula Formula::mk_or(std::vector<Formula> fs) {
    if (fs.empty()) return falsity();
    if (fs.size() == 1) return std::move(fs.front());
    Formula r;
    r.kind = Kind::Or;
    r.kids = std::move(fs);
    return r;
}

static void collect_vars(const Formula& f, std::set<std::string>& out) {
    if (f.kind == Formula::Kind::Atom)
        for (const auto& [v, c] : f.atom.coeffs) out.insert(v);
    for (const auto& k : f.kids) collect_vars(k, out);
}

std::set<std::string> free_vars(const Formula& f) {
    std::set<std::string> out;
    collect_vars(f, out);
    return out;
}

bool eval(const Formula& f, const std::map<std::string, Int>& asg) {
    switch (f.kind) {
        case Formula::Kind::True: return true;
        case Formula::Kind::False: return false;
        case Formula::Kind::Not: return !eval(f.kids[0], asg);
        case Formula::Kind::And:
            for (const auto& k : f.kids)
                if (!eval(k, asg)) return false;
            return true;
        case Formula::Kind::Or:
            for (const auto& k : f.kids)
                if (eval(k, asg)) return true;
            return false;
        case Formula::Kind::Atom: {
            Int lhs = 0;
            for (const auto& [v, c] : f.atom.coeffs) {
                auto it = asg.find(v);
                if (it == asg.end()) throw UnboundVariable("unbound variable: " + v);
                lhs += Int(c) * it->second;
            }
            return cmp_holds(f.atom.cmp, lhs, Int(f.atom.rhs));
        }
    }
    return false;
}

static long long bit_length(long long v) {
    unsigned long long a = v < 0 ? static_cast<unsigned long long>(-(v + 1)) + 1 : v;
    long long bits = 1;
    while (a > 1) {
        a >>= 1;
        ++bits;
    }
    return bits;
}

long long size_measure(const Formula& f) {
    switch (f.kind) {
        case Formula::Kind::True:
        case Formula::Kind::False: return 1;
        case Formula::Kind::Atom: {
            long long s = 1 + bit_length(f.atom.rhs);
            for (const auto& [v, c] : f.atom.coeffs) s += bit_length(c);
            return s;
        }
        default: {
            long long s = 1;
            for (const auto& k : f.kids) s += size_measure(k);
            return s;
        }
    }
}

SmallModelBound small_model_box(const Formula& f) {
    SmallModelBound b;
    b.n_vars = static_cast<long long>(free_vars(f).size());
    b.size_n = size_measure(f);
    Int one = 1;
    // p*(N) = 2^(2N(N+2)); exponents beyond any practical cap are clamped so the
    // bound object stays constructible, the solver compares against box_cap anyway.
    long long n = b.size_n;
    long long expo;
    if (n > 4000) expo = 64'000'000;  // far beyond every cap
    else expo = 2 * n * (n + 2);
    b.box = one << static_cast<unsigned>(std::min<long long>(expo, 1'000'000));
    return b;
}

// ---------------------------------------------------------------------------
// text form

static void term_to_text(std::ostream& os, const LinearAtom& a) {
    if (a.coeffs.empty()) {
        os << "0";
        return;
    }
    if (a.coeffs.size() == 1) {
        const auto& [v, c] = *a.coeffs.begin();
        os << "(* " << c << " " << v << ")";
        return;
    }
    os << "(+";
    for (const auto& [v, c] : a.coeffs) os << " (* " << c << " " << v << ")";
    os << ")";
}

static void to_text_rec(std::ostream& os, const Formula& f) {
    switch (f.kind) {
        case Formula::Kind::True: os << "(true)"; return;
        case Formula::Kind::False: os << "(false)"; return;
        case Formula::Kind::Not:
            os << "(not ";
            to_text_rec(os, f.kids[0]);
            os << ")";
            return;
        case Formula::Kind::And:
        case Formula::Kind::Or:
            os << (f.kind == Formula::Kind::And ? "(and" : "(or");
            for (const auto& k : f.kids) {
                os << " ";
                to_text_rec(os, k);
            }
            os << ")";
            return;
        case Formula::Kind::Atom: {
            const char* op = nullptr;
            switch (f.atom.cmp) {
                case Cmp::Eq: op = "eq"; break;
                case Cmp::Le: op = "le"; break;
                case Cmp::Ge: op = "ge"; break;
                case Cmp::Lt: op = "lt"; break;
                case Cmp::Gt: op = "gt"; break;
            }
            os << "(" << op << " ";
            term_to_text(os, f.atom);
            os << " " << f.atom.rhs << ")";
            return;
        }
    }
}

std::string to_text(const Formula& f) {
    std::ostringstream os;
    to_text_rec(os, f);
    return os.str();
}

// ---------------------------------------------------------------------------
// parser: canonical prefix form plus the infix guard sugar

namespace {

struct Cursor {
    const std::string& s;
    size_t i = 0;
    int line = 1, col = 1;

    explicit Cursor(const std::string& text) : s(text) {}

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line, col); }

    bool eof() const { return i >= s.size(); }
    char peek() const { return eof() ? '\0' : s[i]; }
    char get() {
        char c = s[i++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }
    void skip_ws() {
        while (!eof()) {
            char c = peek();
            if (c == '#') {
                while (!eof() && peek() != '\n') get();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                get();
            } else {
                break;
            }
        }
    }
    bool accept(char c) {
        skip_ws();
        if (!eof() && peek() == c) {
            get();
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }
    std::string word() {
        skip_ws();
        std::string w;
        while (!eof()) {
            char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '+') {
                if ((c == '-' || c == '+') && !w.empty()) break;
                w += get();
            } else {
                break;
            }
        }
        if (w.empty()) fail("expected a token");
        return w;
    }
    long long integer() {
        skip_ws();
        bool neg = false;
        if (peek() == '-') {
            get();
            neg = true;
        } else if (peek() == '+') {
            get();
        }
        if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected an integer");
        long long v = 0;
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) v = v * 10 + (get() - '0');
        return neg ? -v : v;
    }
    std::string ident() {
        skip_ws();
        std::string w;
        if (!std::isalpha(static_cast<unsigned char>(peek())) && peek() != '_')
            fail("expected an identifier");
        while (!eof()) {
            char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') w += get();
            else break;
        }
        return w;
    }
};

struct PrefixParser {
    Cursor& c;

    void parse_term(LinearAtom& into, long long scale) {
        c.skip_ws();
        if (c.peek() == '(') {
            c.get();
            c.skip_ws();
            std::string op;
            if (c.peek() == '+' || c.peek() == '-' || c.peek() == '*') op = std::string(1, c.get());
            else op = c.word();
            if (op == "+") {
                c.skip_ws();
                while (c.peek() != ')') {
                    parse_term(into, scale);
                    c.skip_ws();
                }
                c.expect(')');
            } else if (op == "*") {
                long long k = c.integer();
                std::string v = c.ident();
                into.coeffs[v] += scale * k;
                c.expect(')');
            } else if (op == "-") {
                parse_term(into, scale);
                parse_term(into, -scale);
                c.expect(')');
            } else {
                c.fail("unknown term operator '" + op + "'");
            }
        } else if (std::isdigit(static_cast<unsigned char>(c.peek())) || c.peek() == '-') {
            // constant term folds into rhs
            into.rhs -= scale * c.integer();
        } else {
            std::string v = c.ident();
            into.coeffs[v] += scale;
        }
    }

    Formula parse_formula() {
        c.expect('(');
        std::string op = c.word();
        auto finish = [&](Formula f) {
            c.expect(')');
            return f;
        };
        if (op == "true") return finish(Formula::truth());
        if (op == "false") return finish(Formula::falsity());
        if (op == "not") return finish(Formula::mk_not(parse_formula()));
        if (op == "and" || op == "or") {
            std::vector<Formula> kids;
            c.skip_ws();
            while (c.peek() != ')') {
                kids.push_back(parse_formula());
                c.skip_ws();
            }
            c.expect(')');
            return op == "and" ? Formula::mk_and(std::move(kids))
                               : Formula::mk_or(std::move(kids));
        }
        if (op == "exists") {
            // binder list, then body; the bound variables stay free for
            // feasibility-style consumption
            c.expect('(');
            c.skip_ws();
            while (c.peek() != ')') {
                c.ident();
                c.skip_ws();
            }
            c.expect(')');
            return finish(parse_formula());
        }
        Cmp cmp;
        if (op == "eq") cmp = Cmp::Eq;
        else if (op == "le") cmp = Cmp::Le;
        else if (op == "ge") cmp = Cmp::Ge;
        else if (op == "lt") cmp = Cmp::Lt;
        else if (op == "gt") cmp = Cmp::Gt;
        else c.fail("unknown operator '" + op + "'");
        LinearAtom a;
        a.cmp = cmp;
        parse_term(a, 1);
        // right side: term or constant, folded to canonical lhs-cmp-rhs
        LinearAtom rhs_side;
        PrefixParser{c}.parse_term(rhs_side, 1);
        for (const auto& [v, k] : rhs_side.coeffs) a.coeffs[v] -= k;
        a.rhs += -rhs_side.rhs;  // rhs_side.rhs holds the negated constant sum
        return finish(Formula::mk_atom(std::move(a)));
    }
};

// infix sugar: Boolean guard grammar over atoms `2*x1 - x2 <= 4`
struct InfixParser {
    Cursor& c;

    Formula parse() {
        Formula f = parse_unit();
        return f;
    }

    Formula parse_unit() {
        c.skip_ws();
        if (c.peek() == '!') {
            c.get();
            return Formula::mk_not(parse_unit());
        }
        if (c.peek() == '(') {
            c.get();
            Formula lhs = parse_unit();
            c.skip_ws();
            if (c.peek() == '&' || c.peek() == '|') {
                char op = c.get();
                Formula rhs = parse_unit();
                c.expect(')');
                std::vector<Formula> kids;
                kids.push_back(std::move(lhs));
                kids.push_back(std::move(rhs));
                return op == '&' ? Formula::mk_and(std::move(kids))
                                 : Formula::mk_or(std::move(kids));
            }
            c.expect(')');
            return lhs;
        }
        c.skip_ws();
        size_t save_i = c.i;
        int save_line = c.line, save_col = c.col;
        std::string w;
        while (!c.eof() && (std::isalnum(static_cast<unsigned char>(c.peek())) || c.peek() == '_'))
            w += c.get();
        if (w == "true") return Formula::truth();
        if (w == "false") return Formula::falsity();
        c.i = save_i;
        c.line = save_line;
        c.col = save_col;
        return parse_atom();
    }

    Formula parse_atom() {
        LinearAtom a;
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
                else if (!(std::isalpha(static_cast<unsigned char>(c.peek())) || c.peek() == '_')) {
                    // bare constant on the left folds into rhs
                    a.rhs -= sign * coef;
                    first = false;
                    continue;
                }
            }
            std::string v = c.ident();
            a.coeffs[v] += sign * coef;
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
        a.rhs += c.integer();
        return Formula::mk_atom(std::move(a));
    }
};

}  // namespace

Formula parse(const std::string& text) {
    Cursor c(text);
    c.skip_ws();
    Formula f;
    if (c.peek() == '(') {
        // lookahead: '(' followed by a keyword is prefix form, otherwise infix
        size_t j = c.i + 1;
        while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        size_t k = j;
        while (k < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[k])) || text[k] == '_' ||
                text[k] == '+' || text[k] == '-' || text[k] == '*'))
            ++k;
        static const std::set<std::string> kw = {"true", "false", "not", "and", "or",
                                                 "eq",   "le",    "ge",  "lt",  "gt",
                                                 "exists", "+", "-", "*"};
        std::string head = text.substr(j, k - j);
        if (kw.count(head)) {
            f = PrefixParser{c}.parse_formula();
        } else {
            f = InfixParser{c}.parse();
        }
    } else {
        f = InfixParser{c}.parse();
    }
    c.skip_ws();
    if (!c.eof()) c.fail("trailing input");
    return f;
}

// ---------------------------------------------------------------------------
// Parikh image

Formula parikh_formula(const Nfa& nfa, const std::string& aux_prefix) {
    if (nfa.finals.empty()) return Formula::falsity();

    auto fvar = [&](size_t t) { return aux_prefix + "_f" + std::to_string(t); };
    auto dvar = [&](int s) { return aux_prefix + "_d" + std::to_string(s); };
    auto evar = [&](int s) { return aux_prefix + "_e" + std::to_string(s); };

    std::vector<Formula> conj;

    // letter counts are sums of flows on same-letter transitions
    for (size_t a = 0; a < nfa.letters.size(); ++a) {
        LinearAtom sum;
        sum.cmp = Cmp::Eq;
        sum.rhs = 0;
        sum.coeffs[nfa.letters[a]] = -1;
        for (size_t t = 0; t < nfa.transitions.size(); ++t)
            if (std::get<1>(nfa.transitions[t]) == static_cast<int>(a)) sum.coeffs[fvar(t)] += 1;
        conj.push_back(Formula::mk_atom(std::move(sum)));
    }

    // flow conservation: in-flow + initial offset = out-flow + final offset
    for (int s = 0; s < nfa.n_states; ++s) {
        LinearAtom bal;
        bal.cmp = Cmp::Eq;
        bal.rhs = (s == nfa.initial) ? -1 : 0;
        for (size_t t = 0; t < nfa.transitions.size(); ++t) {
            if (std::get<2>(nfa.transitions[t]) == s) bal.coeffs[fvar(t)] += 1;
            if (std::get<0>(nfa.transitions[t]) == s) bal.coeffs[fvar(t)] -= 1;
        }
        if (nfa.finals.count(s)) bal.coeffs[evar(s)] -= 1;
        conj.push_back(Formula::mk_atom(std::move(bal)));
    }
    {
        LinearAtom one;
        one.cmp = Cmp::Eq;
        one.rhs = 1;
        for (int s : nfa.finals) one.coeffs[evar(s)] += 1;
        conj.push_back(Formula::mk_atom(std::move(one)));
        for (int s : nfa.finals) {
            LinearAtom ub;
            ub.cmp = Cmp::Le;
            ub.rhs = 1;
            ub.coeffs[evar(s)] = 1;
            conj.push_back(Formula::mk_atom(std::move(ub)));
        }
    }

    // connectivity: initial state at depth 0; every state with positive in/out
    // flow is entered by a used transition from a strictly smaller depth
    {
        LinearAtom d0;
        d0.cmp = Cmp::Eq;
        d0.rhs = 0;
        d0.coeffs[dvar(nfa.initial)] = 1;
        conj.push_back(Formula::mk_atom(std::move(d0)));
    }
    for (int s = 0; s < nfa.n_states; ++s) {
        LinearAtom cap;
        cap.cmp = Cmp::Le;
        cap.rhs = nfa.n_states;
        cap.coeffs[dvar(s)] = 1;
        conj.push_back(Formula::mk_atom(std::move(cap)));
        if (s == nfa.initial) continue;

        LinearAtom unused;
        unused.cmp = Cmp::Le;
        unused.rhs = 0;
        for (size_t t = 0; t < nfa.transitions.size(); ++t)
            if (std::get<0>(nfa.transitions[t]) == s || std::get<2>(nfa.transitions[t]) == s)
                unused.coeffs[fvar(t)] += 1;

        std::vector<Formula> branches;
        branches.push_back(Formula::mk_atom(std::move(unused)));
        for (size_t t = 0; t < nfa.transitions.size(); ++t) {
            if (std::get<2>(nfa.transitions[t]) != s) continue;
            int src = std::get<0>(nfa.transitions[t]);
            if (src == s) continue;  // a self-loop cannot witness first entry
            LinearAtom used;
            used.cmp = Cmp::Ge;
            used.rhs = 1;
            used.coeffs[fvar(t)] = 1;
            LinearAtom inc;
            inc.cmp = Cmp::Ge;
            inc.rhs = 1;
            inc.coeffs[dvar(s)] = 1;
            inc.coeffs[dvar(src)] = -1;
            std::vector<Formula> both;
            both.push_back(Formula::mk_atom(std::move(used)));
            both.push_back(Formula::mk_atom(std::move(inc)));
            branches.push_back(Formula::mk_and(std::move(both)));
        }
        conj.push_back(Formula::mk_or(std::move(branches)));
    }

    return Formula::mk_and(std::move(conj));
}

}  // namespace flatmc::presburger
