#pragma once

#include "hornitp/interpolation.h"
#include "hornitp/structure.h"

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hornitp {

using Labeling = std::map<std::string, Constraint>;

struct BinaryProblem {
    Constraint a;
    Constraint b;
};

// T_1 & ... & T_n, n >= 1.
struct SequenceProblem {
    std::vector<Constraint> parts;

    // fv(T_1..T_i) & fv(T_i+1..T_n), sorted, for i in 0..n.
    std::vector<Var> shared_vars(std::size_t i) const;
};

struct TreeProblem {
    std::vector<std::string> nodes;
    std::string root;
    std::map<std::string, std::vector<std::string>> children;
    Labeling labels;

    // Throws Error unless the edges form a tree over `nodes` rooted at `root`
    // and every node is labeled.
    void validate() const;
    // w with E*(v, w), v included.
    std::set<std::string> subtree(const std::string & v) const;
    // Children before parents.
    std::vector<std::string> bottom_up() const;
    // fv of the labels inside v's subtree intersected with those outside, sorted.
    std::vector<Var> shared_vars(const std::string & v) const;
};

struct DagEdge {
    std::string from;
    std::string to;
    Constraint label;
    // Variables the label mentions only as x = x; they count as free.
    VarSet anchors;

    VarSet vars() const;
};

struct DagProblem {
    std::vector<std::string> nodes;
    std::string entry;
    std::string exit;
    std::vector<DagEdge> edges;
    Labeling node_labels;  // missing means true

    // Throws Error unless acyclic with entry without incoming and exit
    // without outgoing edges, and every edge endpoint is a node.
    void validate() const;
    Constraint node_label(const std::string & v) const;
    std::vector<std::string> topological_order() const;
    // (union of incoming edge vars) & (union of outgoing edge vars), sorted.
    std::vector<Var> allowed_vars(const std::string & v) const;
};

using Problem = std::variant<BinaryProblem, SequenceProblem, TreeProblem, DagProblem>;

// Interpolation problems to clause sets. Relation symbols are p (binary),
// p0..pn (sequence) and p_<node> (tree, dag).
ClauseSet binary_to_horn(const BinaryProblem & bp);
ClauseSet sequence_to_horn(const SequenceProblem & sp);
ClauseSet tree_problem_to_horn(const TreeProblem & tp);
ClauseSet dag_problem_to_horn(const DagProblem & dp);
ClauseSet problem_to_horn(const Problem & p);

// Relation symbol standing for a node or sequence position in the *_to_horn output.
std::string sequence_symbol(std::size_t i);
std::string node_symbol(const std::string & node);

// Clause set fragments back to interpolation problems, one per connected
// component. `symbols[i]` / node names say which relation each interpolant
// solves; an empty entry has no relation.
struct SequenceEncoding {
    SequenceProblem problem;
    std::vector<std::string> symbols;  // size n + 1, positions 0 and n empty
};

struct TreeEncoding {
    TreeProblem problem;  // nodes are relation names plus one fresh false node
    std::string false_node;
};

struct DagEncoding {
    DagProblem problem;  // nodes are relation names plus fresh entry and exit
};

std::vector<SequenceEncoding> sequence_from_linear_treelike(const NormalizedClauseSet & hc);
std::vector<TreeEncoding> tree_problem_from_treelike(const NormalizedClauseSet & hc);
// Expects duplicates merged (merge_linear_duplicates).
std::vector<DagEncoding> dag_problem_from_linear(const NormalizedClauseSet & hc);

// Defining properties of the labelings. Each returns a description of the
// first violated condition, or nullopt.
std::optional<std::string> check_sequence_interpolants(const SequenceProblem & sp, const std::vector<Constraint> & is,
                                                       const EngineOptions & options = {});
std::optional<std::string> check_tree_interpolant(const TreeProblem & tp, const Labeling & is,
                                                  const EngineOptions & options = {});
std::optional<std::string> check_dag_interpolant(const DagProblem & dp, const Labeling & is,
                                                 const EngineOptions & options = {});

// Problem files:
//   (interpolate (vars (x Int) ...) (A c) (B c))
//   (sequence (vars ...) (part c) ...)
//   (tree (vars ...) (root v) (node v c) ... (edge parent child) ...)
//   (dag (vars ...) (entry v) (exit v) (node v c) ... (edge v w c (anchor x ...)) ...)
Problem parse_problem(std::string_view text);
std::string print_problem(const Problem & p);

} // namespace hornitp
