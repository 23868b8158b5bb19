#include "flatmc/fo.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace flatmc::fo {

Sentence Sentence::at(std::string tok, std::string z) {
    Sentence s;
    s.kind = Kind::AtTok;
    s.tok = std::move(tok);
    s.v1 = std::move(z);
    return s;
}
Sentence Sentence::letter_is(Letter a, std::string z) {
    Sentence s;
    s.kind = Kind::LetterIs;
    s.letter = std::move(a);
    s.v1 = std::move(z);
    return s;
}
Sentence Sentence::succ(std::string z1, std::string z2) {
    Sentence s;
    s.kind = Kind::Succ;
    s.v1 = std::move(z1);
    s.v2 = std::move(z2);
    return s;
}
Sentence Sentence::lt(std::string z1, std::string z2) {
    Sentence s;
    s.kind = Kind::Lt;
    s.v1 = std::move(z1);
    s.v2 = std::move(z2);
    return s;
}
Sentence Sentence::eq(std::string z1, std::string z2) {
    Sentence s;
    s.kind = Kind::Eq;
    s.v1 = std::move(z1);
    s.v2 = std::move(z2);
    return s;
}
Sentence Sentence::mk_not(Sentence f) {
    Sentence s;
    s.kind = Kind::Not;
    s.kids.push_back(std::move(f));
    return s;
}
Sentence Sentence::mk_and(Sentence a, Sentence b) {
    Sentence s;
    s.kind = Kind::And;
    s.kids.push_back(std::move(a));
    s.kids.push_back(std::move(b));
    return s;
}
Sentence Sentence::mk_or(Sentence a, Sentence b) {
    return mk_not(mk_and(mk_not(std::move(a)), mk_not(std::move(b))));
}
Sentence Sentence::exists(std::string z, Sentence body) {
    Sentence s;
    s.kind = Kind::Exists;
    s.v1 = std::move(z);
    s.kids.push_back(std::move(body));
    return s;
}
Sentence Sentence::forall(std::string z, Sentence body) {
    return mk_not(exists(std::move(z), mk_not(std::move(body))));
}

int qheight(const Sentence& f) {
    int h = 0;
    for (const auto& k : f.kids) h = std::max(h, qheight(k));
    return f.kind == Sentence::Kind::Exists ? h + 1 : h;
}

namespace {

bool eval_rec(const UpWord& w, const Sentence& f, std::map<std::string, Int>& asg,
              const Int& range) {
    using K = Sentence::Kind;
    auto var = [&](const std::string& v) -> const Int& {
        auto it = asg.find(v);
        if (it == asg.end()) throw UnboundVariable("unbound position variable: " + v);
        return it->second;
    };
    switch (f.kind) {
        case K::AtTok: return w.letter_at(var(f.v1)).has(f.tok);
        case K::LetterIs: return w.letter_at(var(f.v1)) == f.letter;
        case K::Succ: return var(f.v2) == var(f.v1) + 1;
        case K::Lt: return var(f.v1) < var(f.v2);
        case K::Eq: return var(f.v1) == var(f.v2);
        case K::Not: return !eval_rec(w, f.kids[0], asg, range);
        case K::And:
            return eval_rec(w, f.kids[0], asg, range) && eval_rec(w, f.kids[1], asg, range);
        case K::Exists: {
            auto saved = asg.find(f.v1) != asg.end() ? std::optional<Int>(asg[f.v1])
                                                     : std::optional<Int>();
            for (Int k = 0; k < range; ++k) {
                asg[f.v1] = k;
                if (eval_rec(w, f.kids[0], asg, range)) {
                    if (saved) asg[f.v1] = *saved;
                    else asg.erase(f.v1);
                    return true;
                }
            }
            if (saved) asg[f.v1] = *saved;
            else asg.erase(f.v1);
            return false;
        }
    }
    return false;
}

}  // namespace

bool fo_eval(const UpWord& w, const Sentence& f) {
    if (w.period.empty()) throw BadArity("empty period");
    int n = qheight(f);
    Int range = Int(w.prefix.size()) + Int(w.period.size()) * (Int(1) << n);
    std::map<std::string, Int> asg;
    return eval_rec(w, f, asg, range);
}

Sentence fo_translate_to_alphabet(const Sentence& f, const std::vector<Letter>& sigma_prime) {
    using K = Sentence::Kind;
    if (f.kind == K::AtTok) {
        // p(z) becomes the disjunction of a(z) over letters containing p;
        // an empty disjunction is the falsum z < z
        Sentence acc = Sentence::lt(f.v1, f.v1);
        bool first = true;
        for (const auto& a : sigma_prime) {
            if (!a.has(f.tok)) continue;
            Sentence lit = Sentence::letter_is(a, f.v1);
            acc = first ? std::move(lit) : Sentence::mk_or(std::move(acc), std::move(lit));
            first = false;
        }
        return acc;
    }
    Sentence out = f;
    for (auto& k : out.kids) k = fo_translate_to_alphabet(k, sigma_prime);
    return out;
}

Int fo_loop_bound(const Sentence& f, long long cps_size) {
    // pol1 = pol2 = log2(p*(N)) = 2N(N+2)
    long long n = std::max<long long>(cps_size, 1);
    long long expo_part = n > 2000 ? 4'000'000 : 4 * n * (n + 2);
    long long expo = (qheight(f) + 2) + expo_part;
    return Int(1) << static_cast<unsigned>(std::min<long long>(expo, 8'000'000));
}

// ---------------------------------------------------------------------------
// s-expression front end

namespace {

struct FCursor {
    const std::string& s;
    size_t i = 0;
    int line = 1, col = 1;

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
            if (peek() == '#') {
                while (!eof() && peek() != '\n') get();
            } else if (std::isspace(static_cast<unsigned char>(peek()))) {
                get();
            } else {
                break;
            }
        }
    }
    void expect(char c) {
        skip_ws();
        if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
        get();
    }
    std::string symbol() {
        skip_ws();
        std::string w;
        while (!eof()) {
            char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '*' || c == '+' ||
                c == '-' || c == '<' || c == '>' || c == '=')
                w += get();
            else break;
        }
        if (w.empty()) fail("expected a symbol");
        return w;
    }
    std::string braced() {
        skip_ws();
        if (peek() != '{') fail("expected '{'");
        std::string w;
        w += get();
        while (!eof() && peek() != '}') w += get();
        if (eof()) fail("unbalanced '{'");
        w += get();
        return w;
    }
};

Sentence parse_rec(FCursor& c) {
    c.expect('(');
    std::string op = c.symbol();
    auto close = [&](Sentence s) {
        c.expect(')');
        return s;
    };
    if (op == "at") {
        std::string tok = c.symbol();
        std::string z = c.symbol();
        return close(Sentence::at(tok, z));
    }
    if (op == "letter") {
        std::string lit = c.braced();
        std::string z = c.symbol();
        return close(Sentence::letter_is(spec::parse_letter(lit), z));
    }
    if (op == "succ" || op == "lt" || op == "eq") {
        std::string a = c.symbol();
        std::string b = c.symbol();
        if (op == "succ") return close(Sentence::succ(a, b));
        if (op == "lt") return close(Sentence::lt(a, b));
        return close(Sentence::eq(a, b));
    }
    if (op == "not") return close(Sentence::mk_not(parse_rec(c)));
    if (op == "and" || op == "or") {
        std::vector<Sentence> kids;
        c.skip_ws();
        while (c.peek() == '(') {
            kids.push_back(parse_rec(c));
            c.skip_ws();
        }
        if (kids.empty()) c.fail("empty connective");
        Sentence acc = kids[0];
        for (size_t i = 1; i < kids.size(); ++i)
            acc = op == "and" ? Sentence::mk_and(std::move(acc), std::move(kids[i]))
                              : Sentence::mk_or(std::move(acc), std::move(kids[i]));
        return close(std::move(acc));
    }
    if (op == "implies") {
        Sentence a = parse_rec(c);
        Sentence b = parse_rec(c);
        return close(Sentence::mk_or(Sentence::mk_not(std::move(a)), std::move(b)));
    }
    if (op == "exists" || op == "forall") {
        std::string z = c.symbol();
        Sentence body = parse_rec(c);
        return close(op == "exists" ? Sentence::exists(z, std::move(body))
                                    : Sentence::forall(z, std::move(body)));
    }
    c.fail("unknown operator '" + op + "'");
}

void to_text_rec(std::ostream& os, const Sentence& f) {
    using K = Sentence::Kind;
    switch (f.kind) {
        case K::AtTok: os << "(at " << f.tok << " " << f.v1 << ")"; return;
        case K::LetterIs: os << "(letter " << f.letter.text() << " " << f.v1 << ")"; return;
        case K::Succ: os << "(succ " << f.v1 << " " << f.v2 << ")"; return;
        case K::Lt: os << "(lt " << f.v1 << " " << f.v2 << ")"; return;
        case K::Eq: os << "(eq " << f.v1 << " " << f.v2 << ")"; return;
        case K::Not:
            os << "(not ";
            to_text_rec(os, f.kids[0]);
            os << ")";
            return;
        case K::And:
            os << "(and ";
            to_text_rec(os, f.kids[0]);
            os << " ";
            to_text_rec(os, f.kids[1]);
            os << ")";
            return;
        case K::Exists:
            os << "(exists " << f.v1 << " ";
            to_text_rec(os, f.kids[0]);
            os << ")";
            return;
    }
}

}  // namespace

Sentence parse_fo(const std::string& text) {
    FCursor c{text};
    Sentence s = parse_rec(c);
    c.skip_ws();
    if (!c.eof()) c.fail("trailing input");
    return s;
}

std::string to_text(const Sentence& f) {
    std::ostringstream os;
    to_text_rec(os, f);
    return os.str();
}

}  // namespace flatmc::fo
