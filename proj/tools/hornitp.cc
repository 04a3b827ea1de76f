#include "hornitp/backend.h"
#include "hornitp/chc.h"
#include "hornitp/renamable_horn.h"
#include "hornitp/solver.h"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>

using namespace hornitp;

namespace {

struct RunConfig {
    std::string subcommand;
    std::string input;
    std::string format;  // empty: chosen by subcommand
    std::string output = "human";
    EngineOptions engine;
    std::size_t expansion_limit = 100000;
    unsigned jobs = 1;
    std::string backend;
    long backend_timeout_ms = 60000;
    std::string solution;
    std::string kind;
};

std::string quoted(const std::string & s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') { out += '\\'; }
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::string model_sexpr(const Model & m) {
    std::string out = "(model";
    for (auto const & [v, q] : m) { out += " (" + quote_symbol(v.name) + " " + rational_to_string(q) + ")"; }
    return out + ")";
}

std::string model_human(const Model & m) {
    std::string out;
    for (auto const & [v, q] : m) { out += (out.empty() ? "" : ", ") + v.name + " = " + rational_to_string(q); }
    return out.empty() ? "(no variables)" : out;
}

ClauseSet read_chc(const RunConfig & cfg) {
    if (!cfg.format.empty() && cfg.format != "chc") { throw Error(cfg.subcommand + " expects --format chc"); }
    return parse_chc(read_file(cfg.input));
}

SolverOptions solver_options(const RunConfig & cfg) {
    SolverOptions o;
    o.engine = cfg.engine;
    o.expansion_limit = cfg.expansion_limit;
    o.jobs = cfg.jobs;
    if (!cfg.backend.empty()) {
        o.make_interpolator = [cfg] {
            return std::make_unique<ExternalInterpolator>(cfg.backend, cfg.engine,
                                                          std::chrono::milliseconds(cfg.backend_timeout_ms));
        };
    }
    return o;
}

int classify_cmd(const RunConfig & cfg) {
    FragmentReport r = classify(read_chc(cfg));
    if (cfg.output == "human") {
        std::cout << r.to_text();
        return 0;
    }
    auto b = [](bool v) { return v ? "true" : "false"; };
    std::cout << "(fragments (recursion-free " << b(r.recursion_free) << ") (linear " << b(r.linear)
              << ") (body-disjoint " << b(r.body_disjoint) << ") (head-disjoint " << b(r.head_disjoint)
              << ") (tree-like " << b(r.tree_like) << ") (linear-tree-like " << b(r.linear_tree_like)
              << ") (subset-limit-hit " << b(r.subset_limit_hit) << "))\n";
    return 0;
}

int solve_cmd(const RunConfig & cfg) {
    ClauseSet hc = read_chc(cfg);
    SolveResult r = solve(hc, solver_options(cfg));
    bool const human = cfg.output == "human";
    if (r.solved()) {
        std::cout << "sat\n";
        if (human) { std::cout << "; the clause set is solvable; definitions follow\n"; }
        std::cout << print_solution(r.solution(), hc);
        return 0;
    }
    auto const & cex = r.counterexample();
    std::cout << "unsat\n";
    if (human) {
        std::cout << "; the clause set is not solvable; a derivation of false:\n"
                  << to_sexpr(cex.derivation, hc) << "\n; satisfied by " << model_human(cex.model) << "\n";
    } else {
        std::cout << "(derivation " << to_sexpr(cex.derivation, hc) << ")\n" << model_sexpr(cex.model) << "\n";
    }
    return 1;
}

int verify_cmd(const RunConfig & cfg) {
    ClauseSet hc = read_chc(cfg);
    Solution sol = parse_solution(read_file(cfg.solution), hc);
    VerifyResult v = verify_solution(sol, hc, cfg.engine);
    if (v.valid) {
        std::cout << "valid\n";
        return 0;
    }
    std::cout << "invalid\n";
    if (cfg.output == "human") {
        std::cout << "clause " << *v.clause << ": " << to_string(hc.clauses()[*v.clause]) << "\n"
                  << "fails for " << model_human(v.model) << "\n";
    } else {
        std::cout << "(clause " << *v.clause << ")\n" << model_sexpr(v.model) << "\n";
    }
    return 1;
}

int expand_cmd(const RunConfig & cfg) {
    Constraint e = expand(read_chc(cfg), cfg.expansion_limit);
    std::cout << (cfg.output == "human" ? to_infix(e) : to_sexpr(e)) << "\n";
    return 0;
}

int encode_cmd(const RunConfig & cfg) {
    Problem p = parse_problem(read_file(cfg.input));
    static const char * const kinds[] = {"binary", "sequence", "tree", "dag"};
    if (cfg.kind != kinds[p.index()]) {
        throw Error("problem file holds a " + std::string(kinds[p.index()]) + " problem, not " + cfg.kind);
    }
    std::cout << print_chc(problem_to_horn(p));
    return 0;
}

int rename_horn_cmd(const RunConfig & cfg) {
    if (!cfg.format.empty() && cfg.format != "dimacs") { throw Error("rename-horn expects --format dimacs"); }
    PropClauseSet cs = parse_dimacs(read_file(cfg.input));
    TerminationResult t = has_termination_property(cs);
    bool const human = cfg.output == "human";
    if (!t.terminating) {
        if (human) {
            std::cout << "NONTERMINATING\ncycle " << to_string(t.cycle) << "\n";
        } else {
            std::cout << "(nonterminating (cycle " << to_string(t.cycle) << "))\n";
        }
        return 1;
    }
    std::set<unsigned> a = compute_renaming(cs);
    std::string renaming;
    for (auto v : a) { renaming += (renaming.empty() ? "" : " ") + std::to_string(v); }
    PropClauseSet renamed = rename(cs, a);
    if (human) {
        std::cout << "TERMINATING\nrenaming " << renaming << "\n" << print_dimacs(renamed);
    } else {
        std::cout << "(terminating (renaming" << (renaming.empty() ? "" : " ") << renaming << ") (order "
                  << to_string(t.order) << "))\n";
        std::cout << print_dimacs(renamed);
    }
    return 0;
}

std::string error_kind(const std::exception & e) {
    if (dynamic_cast<const UndeclaredSymbol *>(&e)) { return "undeclared-symbol"; }
    if (dynamic_cast<const ParseError *>(&e)) { return "parse-error"; }
    if (dynamic_cast<const SortError *>(&e)) { return "sort-error"; }
    if (dynamic_cast<const RecursiveSystem *>(&e)) { return "recursive-system"; }
    if (dynamic_cast<const LimitExceeded *>(&e)) { return "limit-exceeded"; }
    if (dynamic_cast<const UnknownResult *>(&e)) { return "unknown"; }
    if (dynamic_cast<const MissingSymbol *>(&e)) { return "missing-symbol"; }
    if (dynamic_cast<const WrongFragment *>(&e)) { return "wrong-fragment"; }
    if (dynamic_cast<const BackendError *>(&e)) { return "backend"; }
    if (dynamic_cast<const VerificationFailed *>(&e)) { return "verification-failed"; }
    if (dynamic_cast<const Error *>(&e)) { return "error"; }
    return "internal";
}

} // namespace

int main(int argc, char ** argv) {
    CLI::App app{"Solver for recursion-free constrained Horn clauses via interpolation"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig cfg;
    if (const char * env = std::getenv("HORNITP_BACKEND")) { cfg.backend = env; }

    app.add_option("--format", cfg.format, "Input format")->check(CLI::IsMember({"chc", "dimacs"}));
    app.add_option("--output", cfg.output, "Output mode")->check(CLI::IsMember({"human", "sexpr"}));
    app.add_option("--cube-limit", cfg.engine.cube_limit, "Cube budget per query")->check(CLI::PositiveNumber);
    app.add_option("--expansion-limit", cfg.expansion_limit, "Derivation tree node budget")->check(CLI::PositiveNumber);
    app.add_option("--branch-depth", cfg.engine.branch_depth, "Integer branching depth")->check(CLI::PositiveNumber);
    app.add_option("--jobs", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--backend", cfg.backend, "Interpolation backend command (default $HORNITP_BACKEND)");
    app.add_option("--backend-timeout", cfg.backend_timeout_ms, "Backend reply timeout in ms")->check(CLI::PositiveNumber);

    auto add = [&](const char * name, const char * help) {
        CLI::App * sub = app.add_subcommand(name, help);
        sub->add_option("input", cfg.input, "Input file")->required()->check(CLI::ExistingFile);
        sub->callback([&cfg, name] { cfg.subcommand = name; });
        return sub;
    };
    add("classify", "Report the fragments the clause set belongs to");
    add("solve", "Solve a recursion-free clause set");
    add("verify", "Check a solution against a clause set")
        ->add_option("--solution", cfg.solution, "Solution file")
        ->required()
        ->check(CLI::ExistingFile);
    add("expand", "Print the expansion of a recursion-free clause set");
    add("encode", "Encode an interpolation problem file as clauses")
        ->add_option("--kind", cfg.kind, "Problem kind")
        ->required()
        ->check(CLI::IsMember({"binary", "sequence", "tree", "dag"}));
    add("rename-horn", "Rename a DIMACS clause set into recursion-free Horn form");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError & e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cfg.subcommand == "classify") { return classify_cmd(cfg); }
        if (cfg.subcommand == "solve") { return solve_cmd(cfg); }
        if (cfg.subcommand == "verify") { return verify_cmd(cfg); }
        if (cfg.subcommand == "expand") { return expand_cmd(cfg); }
        if (cfg.subcommand == "encode") { return encode_cmd(cfg); }
        return rename_horn_cmd(cfg);
    } catch (const std::exception & e) {
        std::cout.flush();
        std::cerr << "(error " << error_kind(e) << " " << quoted(e.what()) << ")\n";
        return 2;
    }
}
