#pragma once

#include "hornitp/encodings.h"

#include <functional>
#include <memory>
#include <variant>

namespace hornitp {

// A derivation of false: clause indices (into ClauseSet::clauses()) with one
// child per body atom.
struct DerivationTree {
    std::size_t clause = 0;
    std::vector<DerivationTree> children;

    std::size_t size() const;
};

// Conjunction of the clause constraints of a derivation and the equalities
// binding each body atom to the head of its child. Variables of the node
// numbered k (preorder) are renamed to <name>!k.
Constraint derivation_constraint(const ClauseSet & hc, const DerivationTree & t);

// Every derivation of false. Throws RecursiveSystem, or
// ExpansionLimitExceeded when the trees would hold more than `node_limit` nodes.
std::vector<DerivationTree> derivations(const ClauseSet & hc, std::size_t node_limit = 100000);

// Disjunction of derivation_constraint over all derivations of false.
Constraint expand(const ClauseSet & hc, std::size_t node_limit = 100000);

std::string to_sexpr(const DerivationTree & t, const ClauseSet & hc);

struct TreeStep {
    std::size_t index = 0;  // position in the bottom-up order, from 1
    std::string node;
    Constraint a;
    Constraint b;
    Constraint interpolant;
    // Interpolants of processed nodes whose parent is still open, conjoined
    // with the labels of the open nodes. Unsatisfiable after every step.
    Constraint frontier;
};

struct TreeInterpolation {
    Labeling labels;
    std::vector<TreeStep> trace;
};

// Bottom-up sweep of binary interpolation problems. Throws NotUnsat with a
// model when the conjunction of all labels is satisfiable.
TreeInterpolation tree_interpolate(const TreeProblem & tp, Interpolator & itp);

// I_0 .. I_n, computed on the path tree.
std::vector<Constraint> sequence_interpolants(const SequenceProblem & sp, Interpolator & itp);

// Topological sweep; each node is interpolated against the failure paths
// below it. Throws NotUnsat when some path from entry to exit is feasible,
// PathLimitExceeded when a node has more than `path_limit` failure paths.
Labeling dag_interpolate(const DagProblem & dp, Interpolator & itp, std::size_t path_limit = 10000);

struct SolverOptions {
    EngineOptions engine;
    std::size_t expansion_limit = 100000;
    std::size_t subset_limit = 4096;
    std::size_t path_limit = 10000;
    unsigned jobs = 1;
    // One interpolator per worker; the builtin engine when empty.
    std::function<std::unique_ptr<Interpolator>()> make_interpolator;
    // Called for every tree problem solved, possibly from several workers.
    std::function<void(const TreeProblem &, const TreeInterpolation &)> on_tree;
};

struct Counterexample {
    DerivationTree derivation;
    Constraint constraint;  // derivation_constraint of the derivation
    Model model;
};

struct SolveResult {
    std::variant<Solution, Counterexample> result;

    bool solved() const { return std::holds_alternative<Solution>(result); }
    const Solution & solution() const { return std::get<Solution>(result); }
    const Counterexample & counterexample() const { return std::get<Counterexample>(result); }
};

// Head-choice subsets solved as trees, combined per symbol: alternatives that
// differ inside the symbol's derivation cone are disjoined, uses in
// different contexts conjoined. Expects a recursion-free body-disjoint set.
SolveResult solve_body_disjoint(const ClauseSet & hc, const SolverOptions & options = {});

struct BodyDisjointTransform {
    ClauseSet clauses;
    std::map<std::string, std::string> copy_of;  // copy symbol -> original symbol
};

// Gives every extra body occurrence of a symbol its own copy p$k, together
// with copies of the clauses of its derivation cone. The result is body-disjoint
// clause by clause.
BodyDisjointTransform body_disjoint_transform(const ClauseSet & hc, std::size_t clause_limit = 100000);

// A solution of the transformed set mapped back: each symbol gets the
// conjunction of the definitions of its copies.
Solution map_back(const BodyDisjointTransform & t, const ClauseSet & original, const Solution & sol);

// Solves each connected component along the cheapest applicable encoding.
// Every Solution returned has passed verify_solution; every Counterexample's
// constraint holds in its model.
SolveResult solve(const ClauseSet & hc, const SolverOptions & options = {});

} // namespace hornitp
