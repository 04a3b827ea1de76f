// Reference interpolation backend: answers requests on stdin with the
// built-in engine. --fault makes it misbehave for testing error handling.
#include "hornitp/interpolation.h"
#include "hornitp/sexpr.h"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <thread>

using namespace hornitp;

namespace {

std::string escape(const std::string & s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') { out += '\\'; }
        if (c != '\n') { out += c; }
    }
    return out;
}

std::string answer(const std::string & line, const EngineOptions & options, const std::string & fault) {
    auto exprs = read_sexprs(line);
    if (exprs.size() != 1 || !exprs[0].is_call("interpolate") || exprs[0].items.size() != 4) {
        return "(error \"malformed request\")";
    }
    SExpr const & req = exprs[0];
    if (!req.items[1].is_call("vars") || !req.items[2].is_call("A") || !req.items[3].is_call("B") ||
        req.items[2].items.size() != 2 || req.items[3].items.size() != 2) {
        return "(error \"malformed request\")";
    }
    std::map<std::string, Var> vars;
    for (std::size_t i = 1; i < req.items[1].items.size(); ++i) {
        SExpr const & d = req.items[1].items[i];
        if (!d.is_list() || d.items.size() != 2) { return "(error \"malformed variable declaration\")"; }
        Sort sort = d.items[1].is_symbol("Real") ? Sort::Real : Sort::Int;
        vars.emplace(d.items[0].text, Var(d.items[0].text, sort));
    }
    VarLookup lookup = [&](const std::string & n) -> const Var * {
        auto it = vars.find(n);
        return it == vars.end() ? nullptr : &it->second;
    };
    Constraint a = parse_constraint(req.items[2].items[1], lookup);
    Constraint b = parse_constraint(req.items[3].items[1], lookup);
    try {
        Constraint i = binary_interpolant(a, b, options).formula;
        if (fault == "foreign-var") { i = conj({i, ge(LinearTerm::variable(Var("foreign", Sort::Int)), LinearTerm(Rational(0)))}); }
        if (fault == "wrong") { i = Constraint::truth(true); }
        return "(interpolant " + to_sexpr(i) + ")";
    } catch (const NotUnsat & e) {
        std::string out = "(sat (model";
        for (auto const & [v, q] : e.model()) {
            if (vars.count(v.name)) { out += " (" + quote_symbol(v.name) + " " + rational_to_string(q) + ")"; }
        }
        return out + "))";
    }
}

} // namespace

int main(int argc, char ** argv) {
    CLI::App app{"Interpolation backend speaking the line protocol on stdin/stdout"};
    EngineOptions options;
    std::string fault = "none";
    app.add_option("--cube-limit", options.cube_limit, "Cube budget")->check(CLI::PositiveNumber);
    app.add_option("--branch-depth", options.branch_depth, "Integer branching depth")->check(CLI::PositiveNumber);
    app.add_option("--fault", fault, "Misbehave on purpose")
        ->check(CLI::IsMember({"none", "garbage", "foreign-var", "wrong", "exit", "hang"}));
    CLI11_PARSE(app, argc, argv);

    std::string line;
    while (std::getline(std::cin, line)) {
        if (fault == "exit") { return 3; }
        if (fault == "hang") { std::this_thread::sleep_for(std::chrono::hours(1)); }
        if (fault == "garbage") {
            std::cout << "interpolant ((" << std::endl;
            continue;
        }
        std::string reply;
        try {
            reply = answer(line, options, fault);
        } catch (const std::exception & e) {
            reply = "(error \"" + escape(e.what()) + "\")";
        }
        std::cout << reply << std::endl;
    }
    return 0;
}
