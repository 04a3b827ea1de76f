#pragma once

#include "hornitp/errors.h"

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace hornitp {

using Rational = mpq_class;
using Integer = mpz_class;

Integer floor_rational(const Rational & q);
Integer ceil_rational(const Rational & q);

enum class Sort { Int, Real };

const char * to_string(Sort sort);

struct Var {
    std::string name;
    Sort sort = Sort::Int;

    Var() = default;
    Var(std::string n, Sort s) : name(std::move(n)), sort(s) {}

    friend bool operator==(const Var & a, const Var & b) { return a.name == b.name && a.sort == b.sort; }
    friend std::strong_ordering operator<=>(const Var & a, const Var & b) {
        if (auto c = a.name <=> b.name; c != 0) { return c; }
        return a.sort <=> b.sort;
    }
};

using VarSet = std::set<Var>;
using Model = std::map<Var, Rational>;

// Exact affine term sum(coeff * var) + constant. Zero coefficients are never stored.
class LinearTerm {
public:
    LinearTerm() = default;
    explicit LinearTerm(Rational constant) : constant_(std::move(constant)) { constant_.canonicalize(); }
    static LinearTerm variable(const Var & v, Rational coeff = 1);

    const std::map<Var, Rational> & coeffs() const { return coeffs_; }
    const Rational & constant() const { return constant_; }
    bool is_constant() const { return coeffs_.empty(); }
    // The single variable x when the term is exactly 1*x + 0.
    std::optional<Var> as_variable() const;
    Rational coeff(const Var & v) const;
    // Int-sorted: only Int variables, integral coefficients and constant.
    bool is_integral() const;

    void add(const Var & v, const Rational & c);
    void add_constant(const Rational & c) { constant_ += c; }

    LinearTerm & operator+=(const LinearTerm & o);
    LinearTerm & operator-=(const LinearTerm & o);
    LinearTerm & operator*=(const Rational & k);
    friend LinearTerm operator+(LinearTerm a, const LinearTerm & b) { return a += b; }
    friend LinearTerm operator-(LinearTerm a, const LinearTerm & b) { return a -= b; }
    friend LinearTerm operator*(LinearTerm a, const Rational & k) { return a *= k; }
    friend LinearTerm operator*(const Rational & k, LinearTerm a) { return a *= k; }
    LinearTerm operator-() const { return *this * Rational(-1); }

    Rational evaluate(const Model & m) const;
    LinearTerm substitute(const std::map<Var, LinearTerm> & sigma) const;

    friend bool operator==(const LinearTerm & a, const LinearTerm & b) {
        return a.constant_ == b.constant_ && a.coeffs_ == b.coeffs_;
    }
    friend std::strong_ordering operator<=>(const LinearTerm & a, const LinearTerm & b);

private:
    std::map<Var, Rational> coeffs_;
    Rational constant_{0};
};

enum class Rel { Le, Lt, Eq, Ne };

const char * to_string(Rel rel);

// Canonical atom `lhs rel 0`: integer coefficients without a common factor,
// leading coefficient positive for = and !=, and integer tightening applied
// when every variable is Int-sorted. Only `make_atom` produces these.
class LinearAtom {
public:
    const LinearTerm & lhs() const { return lhs_; }
    Rel rel() const { return rel_; }
    bool holds(const Model & m) const;
    VarSet vars() const;

    friend bool operator==(const LinearAtom & a, const LinearAtom & b) = default;
    friend std::strong_ordering operator<=>(const LinearAtom & a, const LinearAtom & b);

private:
    friend std::variant<bool, LinearAtom> canonical_atom(LinearTerm lhs, Rel rel);
    LinearAtom(LinearTerm lhs, Rel rel) : lhs_(std::move(lhs)), rel_(rel) {}
    LinearTerm lhs_;
    Rel rel_ = Rel::Le;
};

// Canonicalizes `lhs rel 0`. Variable-free atoms fold to their truth value.
std::variant<bool, LinearAtom> canonical_atom(LinearTerm lhs, Rel rel);
// The complement of an atom (e.g. t <= 0 becomes -t < 0), canonicalized.
std::variant<bool, LinearAtom> negate_atom(const LinearAtom & a);

// Immutable quantifier-free formula over linear atoms. Cheap to copy.
class Constraint {
public:
    enum class Kind { True, False, Atom, And, Or, Not };

    Constraint();  // true
    static Constraint truth(bool value);
    static Constraint atom(const LinearAtom & a);

    Kind kind() const;
    bool is_true() const { return kind() == Kind::True; }
    bool is_false() const { return kind() == Kind::False; }
    const LinearAtom & as_atom() const;
    const std::vector<Constraint> & children() const;

    friend bool operator==(const Constraint & a, const Constraint & b) { return compare(a, b) == 0; }
    friend bool operator<(const Constraint & a, const Constraint & b) { return compare(a, b) < 0; }
    static int compare(const Constraint & a, const Constraint & b);

private:
    struct Node;
    explicit Constraint(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static Constraint junction(Kind kind, std::vector<Constraint> parts);
    friend Constraint conj(std::vector<Constraint>);
    friend Constraint disj(std::vector<Constraint>);
    friend Constraint negate(const Constraint &);
    std::shared_ptr<const Node> node_;
};

Constraint make_atom(LinearTerm lhs, Rel rel);
// Smart constructors: flatten, drop neutral elements, absorb, deduplicate.
Constraint conj(std::vector<Constraint> parts);
Constraint disj(std::vector<Constraint> parts);
Constraint negate(const Constraint & c);
Constraint implies(const Constraint & a, const Constraint & b);

inline Constraint operator&&(const Constraint & a, const Constraint & b) { return conj({a, b}); }
inline Constraint operator||(const Constraint & a, const Constraint & b) { return disj({a, b}); }
inline Constraint operator!(const Constraint & a) { return negate(a); }

// Comparison helpers building canonical atoms from two terms.
Constraint le(const LinearTerm & a, const LinearTerm & b);
Constraint lt(const LinearTerm & a, const LinearTerm & b);
Constraint ge(const LinearTerm & a, const LinearTerm & b);
Constraint gt(const LinearTerm & a, const LinearTerm & b);
Constraint eq(const LinearTerm & a, const LinearTerm & b);
Constraint ne(const LinearTerm & a, const LinearTerm & b);

VarSet free_vars(const Constraint & c);
bool evaluate(const Constraint & c, const Model & m);

using Substitution = std::map<Var, LinearTerm>;
// Simultaneous substitution. Throws SortError when an Int variable would
// receive a term that is not Int-sorted.
Constraint substitute(const Constraint & c, const Substitution & sigma);
// Renames variables; unmapped variables stay untouched.
Constraint rename(const Constraint & c, const std::map<Var, Var> & renaming);

struct Cube {
    std::vector<LinearAtom> atoms;  // rel in {Le, Lt, Eq}
    VarSet vars() const;
    bool holds(const Model & m) const;
};

// Equivalent disjunction of cubes. Equalities become two <= atoms and
// disequalities split into two strict atoms (tightened for Int terms).
std::vector<Cube> to_dnf(const Constraint & c, std::size_t limit);
// Negation normal form: Not only remains folded into atoms.
Constraint to_nnf(const Constraint & c);

Constraint cube_to_constraint(const Cube & cube);

} // namespace hornitp
