#include "hornitp/horn.h"

#include "hornitp/sexpr.h"

namespace hornitp {

VarSet RelationAtom::vars() const {
    VarSet out;
    for (auto const & t : args) {
        for (auto const & [v, c] : t.coeffs()) { out.insert(v); }
    }
    return out;
}

VarSet HornClause::vars() const {
    VarSet out = free_vars(constraint);
    for (auto const & b : body) {
        auto vs = b.vars();
        out.insert(vs.begin(), vs.end());
    }
    if (head) {
        auto vs = head->vars();
        out.insert(vs.begin(), vs.end());
    }
    return out;
}

void ClauseSet::declare(const RelationSymbol & r) {
    auto [it, inserted] = relations_.try_emplace(r.name, r);
    if (!inserted && !(it->second == r)) { throw SortError("conflicting declarations of relation " + r.name); }
}

namespace {

void check_atom(const ClauseSet & hc, const RelationAtom & a) {
    const RelationSymbol & r = hc.relation(a.symbol);
    if (a.args.size() != r.arity()) {
        throw SortError("relation " + a.symbol + " expects " + std::to_string(r.arity()) + " arguments, got " +
                        std::to_string(a.args.size()));
    }
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (r.arg_sorts[i] == Sort::Int && !a.args[i].is_integral()) {
            throw SortError("argument " + std::to_string(i + 1) + " of " + a.symbol + " must be Int");
        }
    }
}

} // namespace

void ClauseSet::add(HornClause clause, bool keep_id) {
    for (auto const & b : clause.body) { check_atom(*this, b); }
    if (clause.head) { check_atom(*this, *clause.head); }
    if (!keep_id) { clause.id = clauses_.size(); }
    clauses_.push_back(std::move(clause));
}

const RelationSymbol & ClauseSet::relation(const std::string & name) const {
    auto it = relations_.find(name);
    if (it == relations_.end()) { throw MissingSymbol(name); }
    return it->second;
}

Constraint Definition::apply(const std::vector<LinearTerm> & args) const {
    if (args.size() != params.size()) { throw SortError("definition applied to the wrong number of arguments"); }
    Substitution sigma;
    for (std::size_t i = 0; i < params.size(); ++i) { sigma[params[i]] = args[i]; }
    return substitute(body, sigma);
}

const Definition & Solution::at(const std::string & symbol) const {
    auto it = defs.find(symbol);
    if (it == defs.end()) { throw MissingSymbol(symbol); }
    return it->second;
}

void check_definition(const RelationSymbol & r, const Definition & d) {
    if (d.params.size() != r.arity()) { throw Error("definition of " + r.name + " has the wrong number of parameters"); }
    VarSet params;
    for (std::size_t i = 0; i < d.params.size(); ++i) {
        if (d.params[i].sort != r.arg_sorts[i]) { throw SortError("parameter sort mismatch in definition of " + r.name); }
        if (!params.insert(d.params[i]).second) { throw Error("duplicate parameter in definition of " + r.name); }
    }
    for (auto const & v : free_vars(d.body)) {
        if (!params.count(v)) { throw Error("definition of " + r.name + " mentions non-parameter " + v.name); }
    }
}

Constraint instantiate(const Solution & sol, const HornClause & h) {
    std::vector<Constraint> body{h.constraint};
    for (auto const & b : h.body) { body.push_back(sol.at(b.symbol).apply(b.args)); }
    Constraint head = h.head ? sol.at(h.head->symbol).apply(h.head->args) : Constraint::truth(false);
    return implies(conj(std::move(body)), head);
}

VerifyResult verify_solution(const Solution & sol, const ClauseSet & hc, const EngineOptions & options) {
    for (auto const & [name, def] : sol.defs) {
        if (hc.has_relation(name)) { check_definition(hc.relation(name), def); }
    }
    for (std::size_t i = 0; i < hc.clauses().size(); ++i) {
        auto r = sat(negate(instantiate(sol, hc.clauses()[i])), options);
        if (r.sat()) { return VerifyResult{false, i, std::move(*r.model)}; }
    }
    return {};
}

std::vector<Var> arg_vector(const RelationSymbol & r) {
    std::vector<Var> out;
    for (std::size_t i = 0; i < r.arity(); ++i) { out.emplace_back(r.name + "#" + std::to_string(i), r.arg_sorts[i]); }
    return out;
}

std::string to_string(const RelationAtom & a) {
    std::string s = a.symbol + "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) { s += ", "; }
        s += to_infix(a.args[i]);
    }
    return s + ")";
}

std::string to_string(const HornClause & h) {
    std::string s = h.head ? to_string(*h.head) : "false";
    s += " <- ";
    bool first = true;
    for (auto const & b : h.body) {
        if (!first) { s += " & "; }
        s += to_string(b);
        first = false;
    }
    if (!h.constraint.is_true() || first) {
        if (!first) { s += " & "; }
        std::string c = to_infix(h.constraint);
        bool wrap = !first && h.constraint.kind() == Constraint::Kind::Or;
        s += wrap ? "(" + c + ")" : c;
    }
    return s;
}

} // namespace hornitp
