#pragma once

#include "hornitp/formula.h"

#include <cstddef>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace hornitp {

// Nonnegative multipliers over a list of atoms (Eq atoms may take either sign)
// whose weighted sum of left-hand sides is a constant K with K > 0, or K >= 0
// while some strict atom has a positive multiplier.
struct FarkasCertificate {
    std::vector<std::pair<std::size_t, Rational>> multipliers;  // sorted by atom index, nonzero
    bool strict = false;
};

// Refutation of a cube over the integers. A leaf refutes the cube atoms
// together with the branch atoms collected on its path; an inner node splits
// an Int variable into x <= bound (left) and x >= bound + 1 (right).
struct UnsatProof {
    FarkasCertificate certificate;
    std::vector<LinearAtom> branch_atoms;  // leaf only; indices start after the cube atoms
    std::optional<Var> split_var;
    Integer split_bound;
    std::shared_ptr<const UnsatProof> left, right;

    bool is_leaf() const { return !split_var.has_value(); }
    std::size_t leaf_count() const;
};

enum class LpMethod { Auto, FourierMotzkin, Simplex };

struct LinearSolverOptions {
    int branch_depth = 50;
    LpMethod method = LpMethod::Auto;
};

struct CubeResult {
    std::optional<Model> model;  // set when satisfiable
    UnsatProof proof;            // meaningful when unsatisfiable and proved
    // False when unsatisfiability was decided from integer equalities that
    // have no integer solution; such cubes have no branch-and-bound refutation.
    bool proved = true;
    bool sat() const { return model.has_value(); }
};

// Rational feasibility of a conjunction of atoms (Int sorts ignored).
struct LpResult {
    std::optional<Model> model;
    FarkasCertificate certificate;
    bool sat() const { return model.has_value(); }
};
LpResult solve_rational(const std::vector<LinearAtom> & atoms, LpMethod method = LpMethod::Auto);

// Decides a cube. Int variables get integral values via branch and bound;
// throws UnknownResult when the branching depth is exhausted.
CubeResult sat_cube(const Cube & cube, const LinearSolverOptions & options = {});

// Exact re-check of a certificate against the atoms it indexes.
bool check_certificate(const std::vector<LinearAtom> & atoms, const FarkasCertificate & cert);
// Checks a whole proof tree against the cube it claims to refute.
bool check_proof(const Cube & cube, const UnsatProof & proof);

// The branch atoms x - b <= 0 and -x + b + 1 <= 0.
LinearAtom branch_atom_le(const Var & x, const Integer & bound);
LinearAtom branch_atom_ge(const Var & x, const Integer & bound);

} // namespace hornitp
