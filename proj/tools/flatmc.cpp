#include "flatmc/checker.hpp"
#include "flatmc/oracle.hpp"
#include "flatmc/schema.hpp"
#include "flatmc/selftest.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using json = nlohmann::json;
using namespace flatmc;

namespace {

constexpr int kExitSat = 0;
constexpr int kExitUnsat = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitUsage = 64;
constexpr int kExitParse = 65;

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

core::Configuration parse_init(const core::CounterSystem& sys, const std::string& text) {
    std::istringstream is(text);
    std::string state;
    if (!(is >> state)) throw std::runtime_error("--init needs `<state> <v1> ... <vn>`");
    int id = sys.state_id(state);
    if (id < 0) throw std::runtime_error("unknown state " + state);
    core::Configuration c;
    c.state = id;
    long long v;
    while (is >> v) c.counters.push_back(v);
    if (static_cast<int>(c.counters.size()) != sys.dim)
        throw std::runtime_error("--init expects " + std::to_string(sys.dim) + " counter values");
    return c;
}

struct SpecArg {
    std::string kind;  // ba | aba | fo
    std::string path;
};

SpecArg parse_spec_arg(const std::string& arg) {
    auto colon = arg.find(':');
    if (colon == std::string::npos) throw std::runtime_error("--spec needs <ba|aba|fo>:<file>");
    SpecArg s{arg.substr(0, colon), arg.substr(colon + 1)};
    if (s.kind != "ba" && s.kind != "aba" && s.kind != "fo")
        throw std::runtime_error("unknown spec kind `" + s.kind + "`");
    return s;
}

check::Spec load_spec(const SpecArg& arg) {
    std::string text = read_input(arg.path);
    if (arg.kind == "ba") return check::Spec::of(spec::parse_ba(text));
    if (arg.kind == "aba") return check::Spec::of(spec::parse_aba(text));
    return check::Spec::of(fo::parse_fo(text));
}

int verdict_exit(check::Answer a) {
    switch (a) {
        case check::Answer::Sat: return kExitSat;
        case check::Answer::Unsat: return kExitUnsat;
        case check::Answer::Unknown: return kExitUnknown;
    }
    return kExitUnknown;
}

void print_verdict(const check::Verdict& v, bool as_json, bool with_witness) {
    const char* text = v.answer == check::Answer::Sat     ? "SAT"
                       : v.answer == check::Answer::Unsat ? "UNSAT"
                                                          : "UNKNOWN";
    if (as_json) {
        json j;
        j["verdict"] = text;
        if (!v.reason.empty()) j["reason"] = v.reason;
        if (with_witness && v.witness) {
            j["witness"]["schema"] = v.witness->schema_index;
            for (const auto& c : v.witness->counts)
                j["witness"]["counts"].push_back(c.str());
            for (const auto& l : v.witness->word_prefix)
                j["witness"]["word_prefix"].push_back(l.text());
        }
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::cout << text;
    if (v.answer == check::Answer::Unknown && !v.reason.empty()) std::cout << " (" << v.reason << ")";
    std::cout << "\n";
    if (with_witness && v.witness) {
        std::cout << "witness: schema " << v.witness->schema_index << ", counts";
        for (const auto& c : v.witness->counts) std::cout << " " << c;
        std::cout << "\nword prefix:";
        for (const auto& l : v.witness->word_prefix) std::cout << " " << l.text();
        std::cout << "\n";
    }
}

std::vector<core::SysAtom> parse_atom_list(const core::CounterSystem& sys,
                                           const std::string& list) {
    std::vector<core::SysAtom> atoms;
    std::istringstream is(list);
    std::string tok;
    while (std::getline(is, tok, ';')) {
        if (tok.empty()) continue;
        core::Guard g = core::parse_guard(tok, sys.dim);
        if (g.kind != core::Guard::Kind::Atom)
            throw std::runtime_error("not an atomic guard: " + tok);
        atoms.push_back(g.atom);
    }
    return atoms;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flatmc — model checking flat counter systems against omega-regular and "
                 "first-order specifications"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "machine-readable output");

    // check-flat
    auto* cmd_flat = app.add_subcommand("check-flat", "test the flatness condition");
    std::string flat_sys;
    cmd_flat->add_option("system", flat_sys)->required();

    // schemas
    auto* cmd_schemas = app.add_subcommand("schemas", "enumerate minimal path schemas");
    std::string schemas_sys, schemas_from;
    cmd_schemas->add_option("system", schemas_sys)->required();
    cmd_schemas->add_option("--from", schemas_from, "start state")->required();

    // cps
    auto* cmd_cps = app.add_subcommand("cps", "emit constrained path schemas");
    std::string cps_sys, cps_init, cps_atoms;
    cmd_cps->add_option("system", cps_sys)->required();
    cmd_cps->add_option("--init", cps_init, "`<state> <v1> ... <vn>`")->required();
    cmd_cps->add_option("--atoms", cps_atoms, "semicolon-separated extra atoms");

    // solve
    auto* cmd_solve = app.add_subcommand("solve", "feasibility of a quantifier-free formula");
    std::string solve_file;
    cmd_solve->add_option("formula", solve_file, "file or - for stdin")->required();

    // member
    auto* cmd_member = app.add_subcommand("member", "omega-word membership");
    std::string member_word, member_spec;
    cmd_member->add_option("word", member_word)->required();
    cmd_member->add_option("spec", member_spec, "<ba|aba>:<file>")->required();

    // fo-eval
    auto* cmd_foeval = app.add_subcommand("fo-eval", "evaluate an FO sentence on a word");
    std::string foeval_word, foeval_fo;
    cmd_foeval->add_option("word", foeval_word)->required();
    cmd_foeval->add_option("sentence", foeval_fo)->required();

    // mc
    auto* cmd_mc = app.add_subcommand("mc", "model check a flat counter system");
    std::string mc_sys, mc_init, mc_spec;
    long long mc_cap = 2'000'000;
    bool mc_witness = false, mc_parallel = false;
    cmd_mc->add_option("system", mc_sys)->required();
    cmd_mc->add_option("--init", mc_init)->required();
    cmd_mc->add_option("--spec", mc_spec, "<ba|aba|fo>:<file>")->required();
    cmd_mc->add_option("--cap", mc_cap, "solver budget");
    cmd_mc->add_flag("--witness", mc_witness);
    cmd_mc->add_flag("--parallel", mc_parallel);

    // global
    auto* cmd_global = app.add_subcommand("global", "global model checking formula");
    std::string g_sys, g_state, g_spec, g_out;
    cmd_global->add_option("system", g_sys)->required();
    cmd_global->add_option("--state", g_state)->required();
    cmd_global->add_option("--spec", g_spec, "ba:<file>")->required();
    cmd_global->add_option("--out", g_out, "output formula file")->required();

    // gen-sat
    auto* cmd_gensat = app.add_subcommand("gen-sat", "SAT reduction benchmark generator");
    std::string gs_dimacs, gs_outdir;
    cmd_gensat->add_option("dimacs", gs_dimacs)->required();
    cmd_gensat->add_option("--out-dir", gs_outdir)->required();

    // oracle
    auto* cmd_oracle = app.add_subcommand("oracle", "brute-force reference answers");
    auto* cmd_omc = cmd_oracle->add_subcommand("mc-ba", "oracle model check against a BA");
    std::string omc_sys, omc_init, omc_spec;
    int omc_cap = 6;
    cmd_omc->add_option("system", omc_sys)->required();
    cmd_omc->add_option("--init", omc_init)->required();
    cmd_omc->add_option("--spec", omc_spec, "ba:<file>")->required();
    cmd_omc->add_option("--count-cap", omc_cap);
    auto* cmd_ofo = cmd_oracle->add_subcommand("fo-eval", "naive FO evaluation");
    std::string ofo_word, ofo_fo;
    long long ofo_len = 0;
    cmd_ofo->add_option("word", ofo_word)->required();
    cmd_ofo->add_option("sentence", ofo_fo)->required();
    cmd_ofo->add_option("--len", ofo_len, "materialized length");

    // selftest
    auto* cmd_selftest = app.add_subcommand("selftest", "run the acceptance suite");
    unsigned long long st_seed = 42;
    bool st_parallel = false;
    cmd_selftest->add_option("--seed", st_seed);
    cmd_selftest->add_flag("--parallel", st_parallel);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*cmd_flat) {
            auto sys = core::parse_system(read_input(flat_sys));
            bool flat = core::is_flat(sys);
            if (as_json) std::cout << json{{"flat", flat}}.dump(2) << "\n";
            else std::cout << (flat ? "FLAT" : "NOT FLAT") << "\n";
            return flat ? 0 : 1;
        }
        if (*cmd_schemas) {
            auto sys = core::parse_system(read_input(schemas_sys));
            int q0 = sys.state_id(schemas_from);
            if (q0 < 0) throw std::runtime_error("unknown state " + schemas_from);
            auto schemas = schema::enumerate_minimal_schemas(sys, q0);
            if (as_json) {
                json j = json::array();
                for (const auto& s : schemas) j.push_back(schema::schema_text(s));
                std::cout << j.dump(2) << "\n";
            } else {
                for (const auto& s : schemas) std::cout << schema::schema_text(s) << "\n";
            }
            return 0;
        }
        if (*cmd_cps) {
            auto sys = core::parse_system(read_input(cps_sys));
            auto c0 = parse_init(sys, cps_init);
            auto atoms = parse_atom_list(sys, cps_atoms);
            auto xs = schema::build_constrained_schemas(sys, c0.state, c0.counters, atoms);
            for (size_t i = 0; i < xs.size(); ++i)
                std::cout << "cps " << i << " (schema " << xs[i].schema_index << ")\n"
                          << schema::cps_text(xs[i]) << "\n";
            return 0;
        }
        if (*cmd_solve) {
            auto f = presburger::parse(read_input(solve_file));
            auto res = presburger::feasible(f);
            if (as_json) {
                json j;
                j["verdict"] = res.status == presburger::SolveStatus::Sat     ? "SAT"
                               : res.status == presburger::SolveStatus::Unsat ? "UNSAT"
                                                                              : "UNKNOWN";
                for (const auto& [v, val] : res.witness) j["assignment"][v] = val.str();
                std::cout << j.dump(2) << "\n";
            } else if (res.status == presburger::SolveStatus::Sat) {
                std::cout << "SAT";
                for (const auto& [v, val] : res.witness) std::cout << " " << v << "=" << val;
                std::cout << "\n";
            } else if (res.status == presburger::SolveStatus::Unsat) {
                std::cout << "UNSAT\n";
            } else {
                std::cout << "UNKNOWN (cap)\n";
            }
            return res.status == presburger::SolveStatus::Sat     ? kExitSat
                   : res.status == presburger::SolveStatus::Unsat ? kExitUnsat
                                                                  : kExitUnknown;
        }
        if (*cmd_member) {
            auto w = spec::parse_word(read_input(member_word));
            auto arg = parse_spec_arg(member_spec);
            bool accept;
            std::vector<spec::Letter> sigma(w.prefix.begin(), w.prefix.end());
            sigma.insert(sigma.end(), w.period.begin(), w.period.end());
            std::sort(sigma.begin(), sigma.end());
            sigma.erase(std::unique(sigma.begin(), sigma.end()), sigma.end());
            if (arg.kind == "ba") {
                auto ba = spec::parse_ba(read_input(arg.path));
                accept = spec::membership(w, spec::expand(ba, sigma));
            } else if (arg.kind == "aba") {
                auto aba = spec::parse_aba(read_input(arg.path));
                spec::Dealternated impl(aba);
                accept = spec::membership_onthefly(w, impl);
            } else {
                throw std::runtime_error("member expects ba: or aba:");
            }
            if (as_json) std::cout << json{{"accept", accept}}.dump(2) << "\n";
            else std::cout << (accept ? "ACCEPT" : "REJECT") << "\n";
            return accept ? 0 : 1;
        }
        if (*cmd_foeval) {
            auto w = spec::parse_word(read_input(foeval_word));
            auto f = fo::parse_fo(read_input(foeval_fo));
            bool sat = fo::fo_eval(w, f);
            if (as_json) std::cout << json{{"satisfied", sat}}.dump(2) << "\n";
            else std::cout << (sat ? "TRUE" : "FALSE") << "\n";
            return sat ? 0 : 1;
        }
        if (*cmd_mc) {
            auto sys = core::parse_system(read_input(mc_sys));
            auto c0 = parse_init(sys, mc_init);
            auto sp = load_spec(parse_spec_arg(mc_spec));
            check::CheckOptions opts;
            opts.solve.node_budget = mc_cap;
            opts.parallel = mc_parallel;
            auto v = check::model_check(sys, c0, sp, opts);
            print_verdict(v, as_json, mc_witness);
            return verdict_exit(v.answer);
        }
        if (*cmd_global) {
            auto sys = core::parse_system(read_input(g_sys));
            int q = sys.state_id(g_state);
            if (q < 0) throw std::runtime_error("unknown state " + g_state);
            auto arg = parse_spec_arg(g_spec);
            if (arg.kind != "ba") throw std::runtime_error("global expects a ba: spec");
            auto ba = spec::parse_ba(read_input(arg.path));
            auto f = check::global_model_check(sys, q, ba);
            // bind every auxiliary variable; z1..zn stay free
            std::set<std::string> aux;
            for (const auto& v : presburger::free_vars(f))
                if (v.empty() || v[0] != 'z') aux.insert(v);
            std::ofstream out(g_out);
            if (!out) throw std::runtime_error("cannot write " + g_out);
            if (aux.empty()) {
                out << presburger::to_text(f) << "\n";
            } else {
                out << "(exists (";
                bool first = true;
                for (const auto& v : aux) {
                    if (!first) out << " ";
                    out << v;
                    first = false;
                }
                out << ") " << presburger::to_text(f) << ")\n";
            }
            std::cout << "wrote " << g_out << "\n";
            return 0;
        }
        if (*cmd_gensat) {
            std::string text = read_input(gs_dimacs);
            std::istringstream in(text);
            std::string line;
            int n_vars = 0;
            std::vector<check::Clause> clauses;
            std::vector<int> cur;
            while (std::getline(in, line)) {
                if (line.empty() || line[0] == 'c') continue;
                std::istringstream ls(line);
                if (line[0] == 'p') {
                    std::string p, cnf;
                    ls >> p >> cnf >> n_vars;
                    continue;
                }
                int lit;
                while (ls >> lit) {
                    if (lit == 0) {
                        if (cur.empty() || cur.size() > 3)
                            throw std::runtime_error("only 1..3-literal clauses supported");
                        while (cur.size() < 3) cur.push_back(cur.back());
                        clauses.push_back({cur[0], cur[1], cur[2]});
                        cur.clear();
                    } else {
                        cur.push_back(lit);
                    }
                }
            }
            if (n_vars <= 0) throw std::runtime_error("missing `p cnf` header");
            auto inst = check::gen_sat_instance(n_vars, clauses);
            std::filesystem::create_directories(gs_outdir);
            {
                std::ofstream out(gs_outdir + "/instance.sys");
                out << core::to_text(inst.sys);
            }
            {
                std::ofstream out(gs_outdir + "/instance.ba");
                out << spec::to_text(inst.spec);
            }
            {
                std::ofstream out(gs_outdir + "/instance.init");
                out << inst.sys.state_names[inst.c0.state];
                for (long long v : inst.c0.counters) out << " " << v;
                out << "\n";
            }
            std::cout << "wrote " << gs_outdir << "/instance.{sys,ba,init}\n";
            return 0;
        }
        if (*cmd_omc) {
            auto sys = core::parse_system(read_input(omc_sys));
            auto c0 = parse_init(sys, omc_init);
            auto arg = parse_spec_arg(omc_spec);
            if (arg.kind != "ba") throw std::runtime_error("oracle mc-ba expects a ba: spec");
            auto ba = spec::parse_ba(read_input(arg.path));
            auto v = oracle::oracle_mc_ba(sys, c0, ba, omc_cap);
            const char* text = v.answer == oracle::OracleVerdict::Answer::True    ? "TRUE"
                               : v.answer == oracle::OracleVerdict::Answer::False ? "FALSE"
                                                                                  : "INCONCLUSIVE";
            if (as_json)
                std::cout << json{{"verdict", text}, {"justification", v.justification}}.dump(2)
                          << "\n";
            else std::cout << text << " (" << v.justification << ")\n";
            return v.answer == oracle::OracleVerdict::Answer::True    ? 0
                   : v.answer == oracle::OracleVerdict::Answer::False ? 1
                                                                      : 2;
        }
        if (*cmd_ofo) {
            auto w = spec::parse_word(read_input(ofo_word));
            auto f = fo::parse_fo(read_input(ofo_fo));
            long long len = ofo_len;
            if (len <= 0)
                len = static_cast<long long>(w.prefix.size()) +
                      static_cast<long long>(w.period.size()) * (1LL << fo::qheight(f));
            bool sat = oracle::oracle_fo_eval(w, f, len);
            if (as_json) std::cout << json{{"satisfied", sat}}.dump(2) << "\n";
            else std::cout << (sat ? "TRUE" : "FALSE") << "\n";
            return sat ? 0 : 1;
        }
        if (*cmd_selftest) {
            selftest::Options opts;
            opts.seed = st_seed;
            opts.parallel = st_parallel;
            bool ok = selftest::run_acceptance(opts, std::cout);
            return ok ? 0 : 1;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
