#pragma once

#include "hornitp/formula.h"
#include "hornitp/interpolation.h"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hornitp {

struct RelationSymbol {
    std::string name;
    std::vector<Sort> arg_sorts;

    std::size_t arity() const { return arg_sorts.size(); }
    friend bool operator==(const RelationSymbol &, const RelationSymbol &) = default;
};

struct RelationAtom {
    std::string symbol;
    std::vector<LinearTerm> args;

    VarSet vars() const;
    friend bool operator==(const RelationAtom &, const RelationAtom &) = default;
};

// constraint & body_1 & ... & body_n -> head, with head == nullopt meaning false.
struct HornClause {
    std::size_t id = 0;  // position in the input clause set
    Constraint constraint;
    std::vector<RelationAtom> body;
    std::optional<RelationAtom> head;

    bool is_query() const { return !head.has_value(); }
    VarSet vars() const;
    friend bool operator==(const HornClause &, const HornClause &) = default;
};

class ClauseSet {
public:
    // Adds or re-declares a symbol. Throws SortError on a conflicting declaration.
    void declare(const RelationSymbol & r);
    // Appends a clause after checking arities and argument sorts. The clause
    // id is kept when `keep_id` is set, otherwise it becomes the new index.
    void add(HornClause clause, bool keep_id = false);

    const std::map<std::string, RelationSymbol> & relations() const { return relations_; }
    const std::vector<HornClause> & clauses() const { return clauses_; }
    const RelationSymbol & relation(const std::string & name) const;
    bool has_relation(const std::string & name) const { return relations_.count(name) > 0; }
    std::size_t size() const { return clauses_.size(); }
    bool empty() const { return clauses_.empty(); }

    friend bool operator==(const ClauseSet &, const ClauseSet &) = default;

private:
    std::map<std::string, RelationSymbol> relations_;
    std::vector<HornClause> clauses_;
};

// sol(p)(x_1..x_n) = body with fv(body) within params.
struct Definition {
    std::vector<Var> params;
    Constraint body;

    // body[params := args]
    Constraint apply(const std::vector<LinearTerm> & args) const;
};

struct Solution {
    std::map<std::string, Definition> defs;

    const Definition & at(const std::string & symbol) const;
    bool contains(const std::string & symbol) const { return defs.count(symbol) > 0; }
};

// Throws Error when a definition does not fit its symbol (arity, sorts,
// duplicate parameters, free variables outside the parameters).
void check_definition(const RelationSymbol & r, const Definition & d);

// C & sol(p_1)[t_1] & ... & sol(p_n)[t_n] -> sol(p)[t] (or -> false).
Constraint instantiate(const Solution & sol, const HornClause & h);

struct VerifyResult {
    bool valid = true;
    std::optional<std::size_t> clause;  // index into ClauseSet::clauses()
    Model model;                        // countermodel for the failing clause
};

VerifyResult verify_solution(const Solution & sol, const ClauseSet & hc, const EngineOptions & options = {});

// Canonical formal parameters used when building definitions: <sym>#<i>.
std::vector<Var> arg_vector(const RelationSymbol & r);

std::string to_string(const RelationAtom & a);
std::string to_string(const HornClause & h);

} // namespace hornitp
