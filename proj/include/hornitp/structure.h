#pragma once

#include "hornitp/horn.h"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace hornitp {

// p -> q whenever some clause has p in its head and q in its body.
struct DependenceGraph {
    std::set<std::string> nodes;
    std::set<std::pair<std::string, std::string>> edges;

    bool acyclic() const { return !find_cycle().has_value(); }
    // A cycle p_0 -> ... -> p_k -> p_0, listed as p_0 .. p_k, p_0.
    std::optional<std::vector<std::string>> find_cycle() const;
    // Body symbols before head symbols. Throws RecursiveSystem on a cycle.
    std::vector<std::string> bottom_up_order() const;
};

DependenceGraph dependence_graph(const ClauseSet & hc);

struct FragmentReport {
    bool recursion_free = true;
    bool linear = true;
    bool body_disjoint = true;
    bool head_disjoint = true;
    bool tree_like = true;
    bool linear_tree_like = true;
    // Set when the head-choice enumeration behind body_disjoint ran out of budget.
    bool subset_limit_hit = false;

    std::string to_text() const;
};

// Body-disjointness is judged per head choice: every subset returned by
// head_choice_subsets must use each symbol at most once across its bodies.
// Sets that are body-disjoint clause by clause always pass.
FragmentReport classify(const ClauseSet & hc);

// Every clause that is a query or whose head symbol no body uses, closed
// downwards by picking one defining clause for each body symbol reached.
// One subset per choice, as sorted clause indices. Expects recursion-free
// input; throws SubsetLimitExceeded past `limit` subsets.
std::vector<std::vector<std::size_t>> head_choice_subsets(const ClauseSet & hc, std::size_t limit);

// Each symbol in at most one body, at most once.
bool strictly_body_disjoint(const ClauseSet & hc, const std::vector<std::size_t> & indices);

// Weakly connected components of the dependence graph. Clause ids are kept;
// each component declares only the symbols it uses. Clauses without
// relation atoms are components of their own.
std::vector<ClauseSet> connected_components(const ClauseSet & hc);

struct NormalizedClauseSet {
    ClauseSet clauses;  // clause ids kept from the input
    std::map<std::string, std::vector<Var>> arg_vectors;
    // Per clause (same index), the renaming of the input variables.
    std::vector<Substitution> origin;
};

// Rewrites every relation atom occurrence to p(p#0, ..., p#k) and renames the
// remaining variables to <name>@<clause id>. A second occurrence of p in one
// clause gets its own copy <p>#<i>@<clause id>.<k> linked by equalities.
NormalizedClauseSet normalize(const ClauseSet & hc);

// Disjoins the constraints of clauses with equal (body symbol, head symbol).
// Expects normalized input; throws NotLinear on multi-atom bodies.
ClauseSet merge_linear_duplicates(const ClauseSet & hc);

// The clause set restricted to the listed clauses (by index), declaring the
// symbols they use.
ClauseSet subset(const ClauseSet & hc, const std::vector<std::size_t> & indices);

} // namespace hornitp
