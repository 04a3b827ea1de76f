#pragma once

#include "hornitp/errors.h"

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hornitp {

// Propositional literal over variables numbered from 1.
struct Literal {
    unsigned var = 0;
    bool positive = true;

    Literal complement() const { return {var, !positive}; }
    int dimacs() const { return positive ? int(var) : -int(var); }
    // Dense index: 2(var-1) for the positive literal, one more for the negative.
    std::size_t index() const { return 2 * std::size_t(var - 1) + (positive ? 0 : 1); }
    static Literal from_index(std::size_t i) { return {unsigned(i / 2 + 1), i % 2 == 0}; }

    auto operator<=>(const Literal &) const = default;
};

// A clause as a multiset of literals; repeated literals are kept.
using PropClause = std::vector<Literal>;

struct PropClauseSet {
    unsigned num_vars = 0;
    std::vector<PropClause> clauses;

    bool operator==(const PropClauseSet &) const = default;
};

bool is_horn(const PropClauseSet & cs);

// Nodes are the 2n literals. (l, l') is an edge iff some clause contains l'
// and the complement of l at two different positions.
struct LiteralGraph {
    unsigned num_vars = 0;
    std::vector<std::vector<std::size_t>> successors;  // by Literal::index, sorted, no duplicates

    bool has_edge(Literal from, Literal to) const;
    std::vector<std::pair<Literal, Literal>> edges() const;
};

LiteralGraph literal_graph(const PropClauseSet & cs);

struct TerminationResult {
    bool terminating = false;
    // Terminating: every literal, ordered so that edges go forward.
    std::vector<Literal> order;
    // Not terminating: l0 -> l1 -> ... -> l0 (the first literal is not repeated).
    std::vector<Literal> cycle;
};

// Acyclicity of the literal graph. Ties in the order go to the smaller
// variable, positive literal first.
TerminationResult has_termination_property(const PropClauseSet & cs);

// Variables whose negative literal precedes the positive one in the order.
// Throws NonTerminating when the literal graph has a cycle.
std::set<unsigned> compute_renaming(const PropClauseSet & cs);

// Complements every literal whose variable is in `a`.
PropClauseSet rename(const PropClauseSet & cs, const std::set<unsigned> & a);

// For Horn sets: the graph with p -> q when p occurs positively and q
// negatively in one clause has no cycle.
bool horn_recursion_free(const PropClauseSet & cs);

// DIMACS CNF. Throws ParseError.
PropClauseSet parse_dimacs(std::string_view text);
std::string print_dimacs(const PropClauseSet & cs);

std::string to_string(const std::vector<Literal> & lits);

} // namespace hornitp
