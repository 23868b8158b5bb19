#include "flatmc/automata.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <sstream>

namespace flatmc::spec {

std::string Letter::text() const {
    std::string s = "{";
    bool first = true;
    for (const auto& t : toks) {
        if (!first) s += ",";
        s += t;
        first = false;
    }
    return s + "}";
}

Letter parse_letter(const std::string& text) {
    std::string s = text;
    if (s.size() < 2 || s.front() != '{' || s.back() != '}')
        throw ParseError("letter must look like {tok,...}", 1, 1);
    Letter a;
    std::string body = s.substr(1, s.size() - 2);
    std::istringstream is(body);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        size_t b = tok.find_first_not_of(" \t");
        size_t e = tok.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        a.toks.insert(tok.substr(b, e - b + 1));
    }
    return a;
}

TokenFormula TokenFormula::mk_not(TokenFormula f) {
    TokenFormula r;
    r.kind = Kind::Not;
    r.kids.push_back(std::move(f));
    return r;
}
TokenFormula TokenFormula::mk_and(TokenFormula a, TokenFormula b) {
    TokenFormula r;
    r.kind = Kind::And;
    r.kids.push_back(std::move(a));
    r.kids.push_back(std::move(b));
    return r;
}
TokenFormula TokenFormula::mk_or(TokenFormula a, TokenFormula b) {
    TokenFormula r;
    r.kind = Kind::Or;
    r.kids.push_back(std::move(a));
    r.kids.push_back(std::move(b));
    return r;
}

bool TokenFormula::eval(const Letter& a) const {
    switch (kind) {
        case Kind::True: return true;
        case Kind::False: return false;
        case Kind::Tok: return a.has(tok);
        case Kind::Not: return !kids[0].eval(a);
        case Kind::And: return kids[0].eval(a) && kids[1].eval(a);
        case Kind::Or: return kids[0].eval(a) || kids[1].eval(a);
    }
    return false;
}

void TokenFormula::tokens(std::set<std::string>& out) const {
    if (kind == Kind::Tok) out.insert(tok);
    for (const auto& k : kids) k.tokens(out);
}

std::string TokenFormula::text() const {
    switch (kind) {
        case Kind::True: return "true";
        case Kind::False: return "false";
        case Kind::Tok: return tok;
        case Kind::Not: {
            const auto& k = kids[0];
            if (k.kind == Kind::Tok) return "!" + k.text();
            return "!(" + k.text() + ")";
        }
        case Kind::And: return "(" + kids[0].text() + " & " + kids[1].text() + ")";
        case Kind::Or: return "(" + kids[0].text() + " | " + kids[1].text() + ")";
    }
    return "?";
}

int BuchiSpec::state_id(const std::string& name) const {
    for (int i = 0; i < n_states(); ++i)
        if (state_names[i] == name) return i;
    return -1;
}
int BuchiSpec::add_state(const std::string& name) {
    state_names.push_back(name);
    return n_states() - 1;
}
std::set<std::string> BuchiSpec::tokens() const {
    std::set<std::string> out;
    for (const auto& e : edges) e.label.tokens(out);
    return out;
}

int AbaSpec::state_id(const std::string& name) const {
    for (int i = 0; i < n_states(); ++i)
        if (state_names[i] == name) return i;
    return -1;
}
int AbaSpec::add_state(const std::string& name) {
    state_names.push_back(name);
    return n_states() - 1;
}
std::set<std::string> AbaSpec::tokens() const {
    std::set<std::string> out;
    for (const auto& e : edges) e.label.tokens(out);
    return out;
}

PosBool PosBool::mk_and(PosBool a, PosBool b) {
    PosBool r;
    r.kind = Kind::And;
    r.kids.push_back(std::move(a));
    r.kids.push_back(std::move(b));
    return r;
}
PosBool PosBool::mk_or(PosBool a, PosBool b) {
    PosBool r;
    r.kind = Kind::Or;
    r.kids.push_back(std::move(a));
    r.kids.push_back(std::move(b));
    return r;
}

static void minimize_antichain(std::vector<std::vector<int>>& models) {
    std::sort(models.begin(), models.end(),
              [](const auto& a, const auto& b) { return a.size() < b.size(); });
    std::vector<std::vector<int>> out;
    for (const auto& m : models) {
        bool subsumed = false;
        for (const auto& kept : out) {
            if (std::includes(m.begin(), m.end(), kept.begin(), kept.end())) {
                subsumed = true;
                break;
            }
        }
        if (!subsumed) out.push_back(m);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    models = std::move(out);
}

std::vector<std::vector<int>> PosBool::minimal_models() const {
    switch (kind) {
        case Kind::True: return {{}};
        case Kind::False: return {};
        case Kind::State: return {{state}};
        case Kind::Or: {
            auto a = kids[0].minimal_models();
            auto b = kids[1].minimal_models();
            a.insert(a.end(), b.begin(), b.end());
            minimize_antichain(a);
            return a;
        }
        case Kind::And: {
            auto a = kids[0].minimal_models();
            auto b = kids[1].minimal_models();
            std::vector<std::vector<int>> out;
            for (const auto& x : a)
                for (const auto& y : b) {
                    std::vector<int> u;
                    std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(u));
                    out.push_back(std::move(u));
                }
            minimize_antichain(out);
            return out;
        }
    }
    return {};
}

const Letter& UpWord::letter_at(const Int& i) const {
    Int n = i;
    Int plen = prefix.size();
    if (n < plen) return prefix[static_cast<size_t>(n)];
    if (period.empty()) throw BadArity("empty period");
    Int off = (n - plen) % Int(period.size());
    return period[static_cast<size_t>(off)];
}

BuchiAutomaton expand(const BuchiSpec& spec, const std::vector<Letter>& sigma) {
    BuchiAutomaton b;
    b.n_states = spec.n_states();
    b.initial = spec.initial;
    b.accepting = spec.accepting;
    for (const auto& e : spec.edges)
        for (const auto& a : sigma)
            if (e.label.eval(a)) b.transitions.emplace_back(e.src, a, e.dst);
    return b;
}

static TokenFormula letter_characteristic(const Letter& a, const std::set<std::string>& universe) {
    TokenFormula f = TokenFormula::truth();
    bool first = true;
    for (const auto& t : universe) {
        TokenFormula lit =
            a.has(t) ? TokenFormula::mk_tok(t) : TokenFormula::mk_not(TokenFormula::mk_tok(t));
        f = first ? std::move(lit) : TokenFormula::mk_and(std::move(f), std::move(lit));
        first = false;
    }
    return f;
}

static TokenFormula subalphabet_selector(const std::vector<Letter>& sigma_prime,
                                         const std::set<std::string>& universe) {
    TokenFormula sel = TokenFormula::falsity();
    bool first = true;
    for (const auto& a : sigma_prime) {
        TokenFormula phi = letter_characteristic(a, universe);
        sel = first ? std::move(phi) : TokenFormula::mk_or(std::move(sel), std::move(phi));
        first = false;
    }
    return sel;
}

BuchiSpec restrict_subalphabet(const BuchiSpec& spec, const std::vector<Letter>& sigma_prime) {
    std::set<std::string> universe = spec.tokens();
    for (const auto& a : sigma_prime) universe.insert(a.toks.begin(), a.toks.end());
    TokenFormula sel = subalphabet_selector(sigma_prime, universe);
    BuchiSpec out = spec;
    for (auto& e : out.edges) e.label = TokenFormula::mk_and(sel, std::move(e.label));
    return out;
}

AbaSpec restrict_subalphabet(const AbaSpec& spec, const std::vector<Letter>& sigma_prime) {
    std::set<std::string> universe = spec.tokens();
    for (const auto& a : sigma_prime) universe.insert(a.toks.begin(), a.toks.end());
    TokenFormula sel = subalphabet_selector(sigma_prime, universe);
    AbaSpec out = spec;
    for (auto& e : out.edges) e.label = TokenFormula::mk_and(sel, std::move(e.label));
    return out;
}

// ---------------------------------------------------------------------------
// membership

namespace {

std::set<int> subset_step(const BuchiAutomaton& b, const std::set<int>& from, const Letter& a) {
    std::set<int> next;
    for (const auto& [src, lab, dst] : b.transitions)
        if (from.count(src) && lab == a) next.insert(dst);
    return next;
}

// can (q, i) reach itself by a nonempty cycle in the product with cyclic v?
bool loop_check(const BuchiAutomaton& b, const std::vector<Letter>& v, int qf, int start_off) {
    size_t L = v.size();
    auto id = [&](int q, size_t i) { return q * static_cast<int>(L) + static_cast<int>(i); };
    std::deque<int> queue;
    std::set<int> seen;
    // one forced step first so the empty cycle does not count
    for (const auto& [src, lab, dst] : b.transitions) {
        if (src == qf && lab == v[start_off]) {
            int n = id(dst, (start_off + 1) % L);
            if (seen.insert(n).second) queue.push_back(n);
        }
    }
    while (!queue.empty()) {
        int cur = queue.front();
        queue.pop_front();
        int q = cur / static_cast<int>(L);
        size_t i = cur % L;
        if (q == qf && i == static_cast<size_t>(start_off)) return true;
        for (const auto& [src, lab, dst] : b.transitions) {
            if (src == q && lab == v[i]) {
                int n = id(dst, (i + 1) % L);
                if (seen.insert(n).second) queue.push_back(n);
            }
        }
    }
    return false;
}

}  // namespace

bool membership(const UpWord& w, const BuchiAutomaton& b) {
    if (w.period.empty()) throw BadArity("empty period");
    if (b.accepting.empty()) return false;
    std::set<int> reach{b.initial};
    for (const auto& a : w.prefix) reach = subset_step(b, reach, a);
    // iterate (q_f, j): after u . v[0..j-1] the automaton must sit at q_f and
    // the remaining v-rotation must cycle back to q_f
    size_t L = w.period.size();
    std::set<int> cur = reach;
    for (size_t j = 1; j <= L; ++j) {
        cur = subset_step(b, cur, w.period[j - 1]);
        for (int qf : b.accepting) {
            if (!cur.count(qf)) continue;
            if (loop_check(b, w.period, qf, static_cast<int>(j % L))) return true;
        }
    }
    return false;
}

namespace {

using BoolMat = std::vector<std::vector<bool>>;

BoolMat mat_mul(const BoolMat& a, const BoolMat& b) {
    size_t n = a.size();
    BoolMat c(n, std::vector<bool>(n, false));
    for (size_t i = 0; i < n; ++i)
        for (size_t k = 0; k < n; ++k)
            if (a[i][k])
                for (size_t j = 0; j < n; ++j)
                    if (b[k][j]) c[i][j] = true;
    return c;
}

BoolMat mat_pow(BoolMat base, Int e) {
    size_t n = base.size();
    BoolMat acc(n, std::vector<bool>(n, false));
    for (size_t i = 0; i < n; ++i) acc[i][i] = true;
    while (e > 0) {
        if ((e & 1) != 0) acc = mat_mul(acc, base);
        base = mat_mul(base, base);
        e >>= 1;
    }
    return acc;
}

BoolMat letter_matrix(const BuchiAutomaton& b, const Letter& a) {
    BoolMat m(b.n_states, std::vector<bool>(b.n_states, false));
    for (const auto& [src, lab, dst] : b.transitions)
        if (lab == a) m[src][dst] = true;
    return m;
}

}  // namespace

bool membership_blocks(const std::vector<Block>& prefix, const std::vector<Letter>& period,
                       const BuchiAutomaton& b) {
    if (period.empty()) throw BadArity("empty period");
    if (b.accepting.empty()) return false;
    size_t n = b.n_states;
    BoolMat acc(n, std::vector<bool>(n, false));
    for (size_t i = 0; i < n; ++i) acc[i][i] = true;
    for (const auto& blk : prefix) {
        BoolMat m(n, std::vector<bool>(n, false));
        for (size_t i = 0; i < n; ++i) m[i][i] = true;
        for (const auto& a : blk.body) m = mat_mul(m, letter_matrix(b, a));
        acc = mat_mul(acc, mat_pow(std::move(m), blk.count));
    }
    std::set<int> reach;
    for (size_t j = 0; j < n; ++j)
        if (acc[b.initial][j]) reach.insert(static_cast<int>(j));
    std::set<int> cur = reach;
    size_t L = period.size();
    for (size_t j = 1; j <= L; ++j) {
        cur = subset_step(b, cur, period[j - 1]);
        for (int qf : b.accepting) {
            if (!cur.count(qf)) continue;
            if (loop_check(b, period, qf, static_cast<int>(j % L))) return true;
        }
    }
    return false;
}

std::vector<ImplicitBuchi::State> ExplicitAsImplicit::successors(const State& s,
                                                                 const Letter& a) const {
    ++probe_count;
    std::vector<State> out;
    for (const auto& [src, lab, dst] : b_.transitions)
        if (src == s.at(0) && lab == a) out.push_back({dst});
    return out;
}

bool membership_onthefly(const UpWord& w, const ImplicitBuchi& b) {
    if (w.period.empty()) throw BadArity("empty period");
    using State = ImplicitBuchi::State;
    std::set<State> frontier{b.initial_state()};
    for (const auto& a : w.prefix) {
        std::set<State> next;
        for (const auto& s : frontier)
            for (auto& t : b.successors(s, a)) next.insert(std::move(t));
        frontier = std::move(next);
        if (frontier.empty()) return false;
    }
    // lazy product with the cyclic automaton of the period; accept iff some
    // accepting product node lies on a cycle reachable from the frontier
    size_t L = w.period.size();
    using PNode = std::pair<State, size_t>;
    std::map<PNode, int> ids;
    std::vector<PNode> nodes;
    std::vector<std::vector<int>> adj;
    auto intern = [&](const PNode& p) {
        auto it = ids.find(p);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(nodes.size());
        ids.emplace(p, id);
        nodes.push_back(p);
        adj.emplace_back();
        return id;
    };
    std::deque<int> queue;
    for (const auto& s : frontier) queue.push_back(intern({s, 0}));
    std::set<int> expanded;
    while (!queue.empty()) {
        int cur = queue.front();
        queue.pop_front();
        if (!expanded.insert(cur).second) continue;
        PNode p = nodes[cur];
        for (auto& t : b.successors(p.first, w.period[p.second])) {
            int nid = intern({std::move(t), (p.second + 1) % L});
            adj[cur].push_back(nid);
            if (!expanded.count(nid)) queue.push_back(nid);
        }
    }
    // Tarjan SCC
    int n = static_cast<int>(nodes.size());
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    int next_index = 0, next_comp = 0;
    std::vector<std::vector<int>> comp_members;
    auto strongconnect = [&](auto&& self, int v) -> void {
        index[v] = low[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = true;
        for (int u : adj[v]) {
            if (index[u] < 0) {
                self(self, u);
                low[v] = std::min(low[v], low[u]);
            } else if (on_stack[u]) {
                low[v] = std::min(low[v], index[u]);
            }
        }
        if (low[v] == index[v]) {
            comp_members.emplace_back();
            while (true) {
                int u = stack.back();
                stack.pop_back();
                on_stack[u] = false;
                comp[u] = next_comp;
                comp_members.back().push_back(u);
                if (u == v) break;
            }
            ++next_comp;
        }
    };
    for (int v = 0; v < n; ++v)
        if (index[v] < 0) strongconnect(strongconnect, v);
    for (int c = 0; c < next_comp; ++c) {
        bool cyclic = comp_members[c].size() > 1;
        if (!cyclic)
            for (int u : adj[comp_members[c][0]])
                if (u == comp_members[c][0]) cyclic = true;
        if (!cyclic) continue;
        for (int v : comp_members[c])
            if (b.is_accepting(nodes[v].first)) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Miyano-Hayashi

Dealternated::Dealternated(const AbaSpec& aba) : aba_(aba) {}

PosBool Dealternated::delta(int q, const Letter& a) const {
    PosBool acc = PosBool::falsity();
    bool first = true;
    for (const auto& e : aba_.edges) {
        if (e.src != q || !e.label.eval(a)) continue;
        acc = first ? e.succ : PosBool::mk_or(std::move(acc), e.succ);
        first = false;
    }
    return acc;
}

ImplicitBuchi::State Dealternated::initial_state() const {
    // [|S|, S..., O...]; O empty at the start
    return {1, aba_.initial};
}

bool Dealternated::is_accepting(const State& s) const {
    return static_cast<size_t>(s.at(0)) + 1 == s.size();  // O empty
}

std::vector<ImplicitBuchi::State> Dealternated::successors(const State& s, const Letter& a) const {
    int slen = s.at(0);
    std::vector<int> S(s.begin() + 1, s.begin() + 1 + slen);
    std::vector<int> O(s.begin() + 1 + slen, s.end());

    PosBool conj_s = PosBool::truth();
    bool first = true;
    for (int q : S) {
        PosBool d = delta(q, a);
        conj_s = first ? std::move(d) : PosBool::mk_and(std::move(conj_s), std::move(d));
        first = false;
    }
    auto s_models = conj_s.minimal_models();

    std::vector<std::vector<int>> o_models;
    if (!O.empty()) {
        PosBool conj_o = PosBool::truth();
        first = true;
        for (int q : O) {
            PosBool d = delta(q, a);
            conj_o = first ? std::move(d) : PosBool::mk_and(std::move(conj_o), std::move(d));
            first = false;
        }
        o_models = conj_o.minimal_models();
    }

    std::set<State> out;
    for (const auto& sp : s_models) {
        if (O.empty()) {
            std::vector<int> op;
            for (int q : sp)
                if (!aba_.accepting.count(q)) op.push_back(q);
            State st;
            st.push_back(static_cast<int>(sp.size()));
            st.insert(st.end(), sp.begin(), sp.end());
            st.insert(st.end(), op.begin(), op.end());
            out.insert(std::move(st));
        } else {
            for (const auto& om : o_models) {
                if (!std::includes(sp.begin(), sp.end(), om.begin(), om.end())) continue;
                std::vector<int> op;
                for (int q : om)
                    if (!aba_.accepting.count(q)) op.push_back(q);
                State st;
                st.push_back(static_cast<int>(sp.size()));
                st.insert(st.end(), sp.begin(), sp.end());
                st.insert(st.end(), op.begin(), op.end());
                out.insert(std::move(st));
            }
        }
    }
    return {out.begin(), out.end()};
}

std::optional<BuchiAutomaton> expand_reachable(const ImplicitBuchi& b,
                                               const std::vector<Letter>& sigma,
                                               size_t state_cap) {
    std::map<ImplicitBuchi::State, int> ids;
    std::vector<ImplicitBuchi::State> states;
    BuchiAutomaton out;
    auto intern = [&](const ImplicitBuchi::State& s) {
        auto it = ids.find(s);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(states.size());
        ids.emplace(s, id);
        states.push_back(s);
        return id;
    };
    std::deque<int> queue{intern(b.initial_state())};
    std::set<int> done;
    while (!queue.empty()) {
        int cur = queue.front();
        queue.pop_front();
        if (!done.insert(cur).second) continue;
        if (states.size() > state_cap) return std::nullopt;
        ImplicitBuchi::State s = states[cur];
        for (const auto& a : sigma) {
            for (auto& t : b.successors(s, a)) {
                int nid = intern(t);
                out.transitions.emplace_back(cur, a, nid);
                if (!done.count(nid)) queue.push_back(nid);
            }
        }
    }
    out.n_states = static_cast<int>(states.size());
    out.initial = 0;
    for (int i = 0; i < out.n_states; ++i)
        if (b.is_accepting(states[i])) out.accepting.insert(i);
    return out;
}

// ---------------------------------------------------------------------------
// parsers

namespace {

struct TokCursor {
    const std::string& s;
    size_t i = 0;
    int line;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, line, static_cast<int>(i) + 1);
    }
    bool eof() const { return i >= s.size(); }
    char peek() const { return eof() ? '\0' : s[i]; }
    char get() { return s[i++]; }
    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) get();
    }
};

// token formula over props and atom tokens; atoms in guard syntax
TokenFormula parse_token_formula(TokCursor& c);

bool atom_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '*' || c == '+' ||
           c == '-' || c == '<' || c == '>' || c == '=';
}

TokenFormula parse_tf_unit(TokCursor& c) {
    c.skip_ws();
    if (c.peek() == '!') {
        c.get();
        return TokenFormula::mk_not(parse_tf_unit(c));
    }
    if (c.peek() == '(') {
        c.get();
        TokenFormula lhs = parse_token_formula(c);
        c.skip_ws();
        if (c.peek() == '&' || c.peek() == '|') {
            char op = c.get();
            TokenFormula rhs = parse_token_formula(c);
            c.skip_ws();
            if (c.peek() != ')') c.fail("expected ')'");
            c.get();
            return op == '&' ? TokenFormula::mk_and(std::move(lhs), std::move(rhs))
                             : TokenFormula::mk_or(std::move(lhs), std::move(rhs));
        }
        if (c.peek() != ')') c.fail("expected ')'");
        c.get();
        return lhs;
    }
    std::string tok;
    while (!c.eof() && atom_char(c.peek())) tok += c.get();
    if (tok.empty()) c.fail("expected a token");
    if (tok == "true") return TokenFormula::truth();
    if (tok == "false") return TokenFormula::falsity();
    return TokenFormula::mk_tok(tok);
}

TokenFormula parse_token_formula(TokCursor& c) { return parse_tf_unit(c); }

PosBool parse_posbool(TokCursor& c, AbaSpec& spec);

PosBool parse_pb_unit(TokCursor& c, AbaSpec& spec) {
    c.skip_ws();
    if (c.peek() == '(') {
        c.get();
        PosBool lhs = parse_posbool(c, spec);
        c.skip_ws();
        if (c.peek() == '&' || c.peek() == '|') {
            char op = c.get();
            PosBool rhs = parse_posbool(c, spec);
            c.skip_ws();
            if (c.peek() != ')') c.fail("expected ')'");
            c.get();
            return op == '&' ? PosBool::mk_and(std::move(lhs), std::move(rhs))
                             : PosBool::mk_or(std::move(lhs), std::move(rhs));
        }
        if (c.peek() != ')') c.fail("expected ')'");
        c.get();
        return lhs;
    }
    std::string tok;
    while (!c.eof() &&
           (std::isalnum(static_cast<unsigned char>(c.peek())) || c.peek() == '_'))
        tok += c.get();
    if (tok.empty()) c.fail("expected a state name");
    if (tok == "true") return PosBool::truth();
    if (tok == "false") return PosBool::falsity();
    int id = spec.state_id(tok);
    if (id < 0) id = spec.add_state(tok);
    return PosBool::mk_state(id);
}

PosBool parse_posbool(TokCursor& c, AbaSpec& spec) { return parse_pb_unit(c, spec); }

std::string strip_line(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

BuchiSpec parse_ba(const std::string& text) {
    BuchiSpec spec;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    bool header = false;
    bool have_start = false;
    auto state_of = [&](const std::string& n) {
        int id = spec.state_id(n);
        return id >= 0 ? id : spec.add_state(n);
    };
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = strip_line(raw);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "ba") {
            header = true;
        } else if (!header) {
            throw ParseError("missing `ba` header", lineno, 1);
        } else if (kw == "start") {
            std::string s;
            if (!(ls >> s)) throw ParseError("expected a state name", lineno, 1);
            spec.initial = state_of(s);
            have_start = true;
        } else if (kw == "accept") {
            std::string s;
            while (ls >> s) spec.accepting.insert(state_of(s));
        } else if (kw == "edge") {
            std::string s, t;
            if (!(ls >> s >> t)) throw ParseError("expected `edge <s> <t> [ <guard> ]`", lineno, 1);
            std::string rest;
            std::getline(ls, rest);
            rest = strip_line(rest);
            if (rest.size() < 2 || rest.front() != '[' || rest.back() != ']')
                throw ParseError("edge label must be bracketed", lineno, 1);
            std::string body = rest.substr(1, rest.size() - 2);
            TokCursor c{body, 0, lineno};
            TokenFormula f = parse_token_formula(c);
            c.skip_ws();
            if (!c.eof()) c.fail("trailing input in edge label");
            spec.edges.push_back({state_of(s), state_of(t), std::move(f)});
        } else {
            throw ParseError("unknown declaration `" + kw + "`", lineno, 1);
        }
    }
    if (!header) throw ParseError("missing `ba` header", lineno ? lineno : 1, 1);
    if (!have_start && spec.n_states() == 0) spec.add_state("s0");
    return spec;
}

AbaSpec parse_aba(const std::string& text) {
    AbaSpec spec;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    bool header = false;
    auto state_of = [&](const std::string& n) {
        int id = spec.state_id(n);
        return id >= 0 ? id : spec.add_state(n);
    };
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = strip_line(raw);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "aba") {
            header = true;
        } else if (!header) {
            throw ParseError("missing `aba` header", lineno, 1);
        } else if (kw == "start") {
            std::string s;
            if (!(ls >> s)) throw ParseError("expected a state name", lineno, 1);
            spec.initial = state_of(s);
        } else if (kw == "accept") {
            std::string s;
            while (ls >> s) spec.accepting.insert(state_of(s));
        } else if (kw == "edge") {
            std::string s;
            if (!(ls >> s)) throw ParseError("expected `edge <s> [ <guard> ] -> <succ>`", lineno, 1);
            std::string rest;
            std::getline(ls, rest);
            rest = strip_line(rest);
            size_t arrow = rest.rfind("->");
            if (arrow == std::string::npos)
                throw ParseError("expected `->` in aba edge", lineno, 1);
            std::string label = strip_line(rest.substr(0, arrow));
            std::string succ = strip_line(rest.substr(arrow + 2));
            if (label.size() < 2 || label.front() != '[' || label.back() != ']')
                throw ParseError("edge label must be bracketed", lineno, 1);
            std::string lbody = label.substr(1, label.size() - 2);
            TokCursor lc{lbody, 0, lineno};
            TokenFormula f = parse_token_formula(lc);
            TokCursor sc{succ, 0, lineno};
            PosBool p = parse_posbool(sc, spec);
            sc.skip_ws();
            if (!sc.eof()) sc.fail("trailing input in successor formula");
            spec.edges.push_back({state_of(s), std::move(f), std::move(p)});
        } else {
            throw ParseError("unknown declaration `" + kw + "`", lineno, 1);
        }
    }
    if (!header) throw ParseError("missing `aba` header", lineno ? lineno : 1, 1);
    return spec;
}

UpWord parse_word(const std::string& text) {
    UpWord w;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    bool saw_period = false;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = strip_line(raw);
        if (line.empty() || line[0] == '#') continue;
        std::vector<Letter>* target = nullptr;
        std::string rest;
        if (line.rfind("prefix:", 0) == 0) {
            target = &w.prefix;
            rest = line.substr(7);
        } else if (line.rfind("period:", 0) == 0) {
            target = &w.period;
            rest = line.substr(7);
            saw_period = true;
        } else {
            throw ParseError("expected `prefix:` or `period:`", lineno, 1);
        }
        std::istringstream ls(rest);
        std::string tok;
        while (ls >> tok) target->push_back(parse_letter(tok));
    }
    if (!saw_period || w.period.empty())
        throw ParseError("a word needs a nonempty period", lineno ? lineno : 1, 1);
    return w;
}

std::string to_text(const BuchiSpec& spec) {
    std::ostringstream os;
    os << "ba\n";
    for (const auto& n : spec.state_names) os << "# state " << n << "\n";
    os << "start " << spec.state_names[spec.initial] << "\n";
    if (!spec.accepting.empty()) {
        os << "accept";
        for (int s : spec.accepting) os << " " << spec.state_names[s];
        os << "\n";
    }
    for (const auto& e : spec.edges)
        os << "edge " << spec.state_names[e.src] << " " << spec.state_names[e.dst] << " ["
           << e.label.text() << "]\n";
    return os.str();
}

std::string to_text(const UpWord& w) {
    std::ostringstream os;
    os << "prefix:";
    for (const auto& a : w.prefix) os << " " << a.text();
    os << "\nperiod:";
    for (const auto& a : w.period) os << " " << a.text();
    os << "\n";
    return os.str();
}

}  // namespace flatmc::spec
