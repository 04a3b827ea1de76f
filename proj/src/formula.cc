#include "hornitp/formula.h"

#include <algorithm>
#include <cassert>

namespace hornitp {

Integer floor_rational(const Rational & q) {
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

Integer ceil_rational(const Rational & q) {
    Integer r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

namespace {

int cmp(const Rational & a, const Rational & b) {
    int c = ::cmp(a, b);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

std::strong_ordering to_ordering(int c) {
    return c < 0 ? std::strong_ordering::less : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

} // namespace

const char * to_string(Sort sort) { return sort == Sort::Int ? "Int" : "Real"; }

const char * to_string(Rel rel) {
    switch (rel) {
    case Rel::Le: return "<=";
    case Rel::Lt: return "<";
    case Rel::Eq: return "=";
    case Rel::Ne: return "!=";
    }
    return "?";
}

// ---------------------------------------------------------------- LinearTerm

LinearTerm LinearTerm::variable(const Var & v, Rational coeff) {
    LinearTerm t;
    t.add(v, coeff);
    return t;
}

std::optional<Var> LinearTerm::as_variable() const {
    if (coeffs_.size() != 1 || constant_ != 0) { return std::nullopt; }
    auto const & [v, c] = *coeffs_.begin();
    if (c != 1) { return std::nullopt; }
    return v;
}

Rational LinearTerm::coeff(const Var & v) const {
    auto it = coeffs_.find(v);
    return it == coeffs_.end() ? Rational(0) : it->second;
}

bool LinearTerm::is_integral() const {
    if (constant_.get_den() != 1) { return false; }
    return std::all_of(coeffs_.begin(), coeffs_.end(),
                       [](auto const & e) { return e.first.sort == Sort::Int && e.second.get_den() == 1; });
}

void LinearTerm::add(const Var & v, const Rational & c) {
    if (c == 0) { return; }
    auto [it, inserted] = coeffs_.try_emplace(v, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) { coeffs_.erase(it); }
    }
}

LinearTerm & LinearTerm::operator+=(const LinearTerm & o) {
    for (auto const & [v, c] : o.coeffs_) { add(v, c); }
    constant_ += o.constant_;
    return *this;
}

LinearTerm & LinearTerm::operator-=(const LinearTerm & o) {
    for (auto const & [v, c] : o.coeffs_) { add(v, -c); }
    constant_ -= o.constant_;
    return *this;
}

LinearTerm & LinearTerm::operator*=(const Rational & k) {
    if (k == 0) {
        coeffs_.clear();
        constant_ = 0;
        return *this;
    }
    for (auto & [v, c] : coeffs_) { c *= k; }
    constant_ *= k;
    return *this;
}

Rational LinearTerm::evaluate(const Model & m) const {
    Rational r = constant_;
    for (auto const & [v, c] : coeffs_) {
        auto it = m.find(v);
        if (it != m.end()) { r += c * it->second; }
    }
    return r;
}

LinearTerm LinearTerm::substitute(const std::map<Var, LinearTerm> & sigma) const {
    LinearTerm r(constant_);
    for (auto const & [v, c] : coeffs_) {
        auto it = sigma.find(v);
        if (it == sigma.end()) {
            r.add(v, c);
            continue;
        }
        if (v.sort == Sort::Int && !it->second.is_integral()) {
            throw SortError("cannot substitute a non-Int term for Int variable " + v.name);
        }
        r += it->second * c;
    }
    return r;
}

std::strong_ordering operator<=>(const LinearTerm & a, const LinearTerm & b) {
    auto ia = a.coeffs_.begin();
    auto ib = b.coeffs_.begin();
    for (; ia != a.coeffs_.end() && ib != b.coeffs_.end(); ++ia, ++ib) {
        if (auto c = ia->first <=> ib->first; c != 0) { return c; }
        if (int c = cmp(ia->second, ib->second); c != 0) { return to_ordering(c); }
    }
    if (ia != a.coeffs_.end()) { return std::strong_ordering::greater; }
    if (ib != b.coeffs_.end()) { return std::strong_ordering::less; }
    return to_ordering(cmp(a.constant_, b.constant_));
}

// ---------------------------------------------------------------- LinearAtom

bool LinearAtom::holds(const Model & m) const {
    Rational v = lhs_.evaluate(m);
    switch (rel_) {
    case Rel::Le: return v <= 0;
    case Rel::Lt: return v < 0;
    case Rel::Eq: return v == 0;
    case Rel::Ne: return v != 0;
    }
    return false;
}

VarSet LinearAtom::vars() const {
    VarSet r;
    for (auto const & [v, c] : lhs_.coeffs()) { r.insert(v); }
    return r;
}

std::strong_ordering operator<=>(const LinearAtom & a, const LinearAtom & b) {
    if (auto c = a.lhs_ <=> b.lhs_; c != 0) { return c; }
    return a.rel_ <=> b.rel_;
}

std::variant<bool, LinearAtom> canonical_atom(LinearTerm lhs, Rel rel) {
    if (lhs.is_constant()) {
        Rational const & c = lhs.constant();
        switch (rel) {
        case Rel::Le: return c <= 0;
        case Rel::Lt: return c < 0;
        case Rel::Eq: return c == 0;
        case Rel::Ne: return c != 0;
        }
    }
    // Clear denominators.
    Integer den = lhs.constant().get_den();
    bool all_int = true;
    for (auto const & [v, c] : lhs.coeffs()) {
        den = lcm(den, Integer(c.get_den()));
        all_int = all_int && v.sort == Sort::Int;
    }
    if (den != 1) { lhs *= Rational(den); }

    Integer g = 0;
    for (auto const & [v, c] : lhs.coeffs()) { g = gcd(g, Integer(c.get_num())); }
    Integer constant = lhs.constant().get_num();

    if (all_int) {
        if (rel == Rel::Lt) {
            // An integer-valued term is < 0 iff it is <= -1.
            constant += 1;
            rel = Rel::Le;
        }
        LinearTerm out;
        for (auto const & [v, c] : lhs.coeffs()) { out.add(v, Rational(Integer(c.get_num()) / g)); }
        if (rel == Rel::Le) {
            out.add_constant(Rational(ceil_rational(Rational(constant, g))));
            return LinearAtom(std::move(out), rel);
        }
        if (constant % g != 0) { return rel == Rel::Ne; }
        out.add_constant(Rational(constant / g));
        if (out.coeffs().begin()->second < 0) { out *= Rational(-1); }
        return LinearAtom(std::move(out), rel);
    }

    g = gcd(g, constant);
    if (g != 1) { lhs *= Rational(1, g); }
    if ((rel == Rel::Eq || rel == Rel::Ne) && lhs.coeffs().begin()->second < 0) { lhs *= Rational(-1); }
    return LinearAtom(std::move(lhs), rel);
}

std::variant<bool, LinearAtom> negate_atom(const LinearAtom & a) {
    switch (a.rel()) {
    case Rel::Le: return canonical_atom(-a.lhs(), Rel::Lt);
    case Rel::Lt: return canonical_atom(-a.lhs(), Rel::Le);
    case Rel::Eq: return canonical_atom(a.lhs(), Rel::Ne);
    case Rel::Ne: return canonical_atom(a.lhs(), Rel::Eq);
    }
    return false;
}

// ---------------------------------------------------------------- Constraint

struct Constraint::Node {
    Kind kind;
    std::optional<LinearAtom> atom;
    std::vector<Constraint> children;
};

Constraint::Constraint() : Constraint(truth(true)) {}

Constraint Constraint::truth(bool value) {
    static const auto t = std::make_shared<const Node>(Node{Kind::True, std::nullopt, {}});
    static const auto f = std::make_shared<const Node>(Node{Kind::False, std::nullopt, {}});
    return Constraint(value ? t : f);
}

Constraint Constraint::atom(const LinearAtom & a) {
    return Constraint(std::make_shared<const Node>(Node{Kind::Atom, a, {}}));
}

Constraint::Kind Constraint::kind() const { return node_->kind; }

const LinearAtom & Constraint::as_atom() const {
    assert(node_->atom);
    return *node_->atom;
}

const std::vector<Constraint> & Constraint::children() const { return node_->children; }

int Constraint::compare(const Constraint & a, const Constraint & b) {
    if (a.node_ == b.node_) { return 0; }
    if (a.kind() != b.kind()) { return a.kind() < b.kind() ? -1 : 1; }
    switch (a.kind()) {
    case Kind::True:
    case Kind::False: return 0;
    case Kind::Atom: {
        auto c = a.as_atom() <=> b.as_atom();
        return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    default: break;
    }
    auto const & ca = a.children();
    auto const & cb = b.children();
    for (std::size_t i = 0; i < ca.size() && i < cb.size(); ++i) {
        if (int c = compare(ca[i], cb[i]); c != 0) { return c; }
    }
    if (ca.size() != cb.size()) { return ca.size() < cb.size() ? -1 : 1; }
    return 0;
}

Constraint make_atom(LinearTerm lhs, Rel rel) {
    auto r = canonical_atom(std::move(lhs), rel);
    if (auto const * b = std::get_if<bool>(&r)) { return Constraint::truth(*b); }
    return Constraint::atom(std::get<LinearAtom>(r));
}

Constraint Constraint::junction(Kind kind, std::vector<Constraint> parts) {
    bool const is_and = kind == Kind::And;
    Kind const absorbing = is_and ? Kind::False : Kind::True;
    Kind const neutral = is_and ? Kind::True : Kind::False;
    std::vector<Constraint> flat;
    flat.reserve(parts.size());
    for (auto & p : parts) {
        if (p.kind() == absorbing) { return p; }
        if (p.kind() == neutral) { continue; }
        if (p.kind() == kind) {
            for (auto const & c : p.children()) { flat.push_back(c); }
        } else {
            flat.push_back(std::move(p));
        }
    }
    std::sort(flat.begin(), flat.end());
    flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
    if (flat.empty()) { return truth(is_and); }
    if (flat.size() == 1) { return flat.front(); }
    return Constraint(std::make_shared<const Node>(Node{kind, std::nullopt, std::move(flat)}));
}

Constraint conj(std::vector<Constraint> parts) { return Constraint::junction(Constraint::Kind::And, std::move(parts)); }

Constraint disj(std::vector<Constraint> parts) { return Constraint::junction(Constraint::Kind::Or, std::move(parts)); }

Constraint negate(const Constraint & c) {
    switch (c.kind()) {
    case Constraint::Kind::True: return Constraint::truth(false);
    case Constraint::Kind::False: return Constraint::truth(true);
    case Constraint::Kind::Atom: {
        auto r = negate_atom(c.as_atom());
        if (auto const * b = std::get_if<bool>(&r)) { return Constraint::truth(*b); }
        return Constraint::atom(std::get<LinearAtom>(r));
    }
    case Constraint::Kind::Not: return c.children().front();
    default: break;
    }
    return Constraint(std::make_shared<const Constraint::Node>(Constraint::Node{Constraint::Kind::Not, std::nullopt, {c}}));
}

Constraint implies(const Constraint & a, const Constraint & b) { return disj({negate(a), b}); }

Constraint le(const LinearTerm & a, const LinearTerm & b) { return make_atom(a - b, Rel::Le); }
Constraint lt(const LinearTerm & a, const LinearTerm & b) { return make_atom(a - b, Rel::Lt); }
Constraint ge(const LinearTerm & a, const LinearTerm & b) { return make_atom(b - a, Rel::Le); }
Constraint gt(const LinearTerm & a, const LinearTerm & b) { return make_atom(b - a, Rel::Lt); }
Constraint eq(const LinearTerm & a, const LinearTerm & b) { return make_atom(a - b, Rel::Eq); }
Constraint ne(const LinearTerm & a, const LinearTerm & b) { return make_atom(a - b, Rel::Ne); }

namespace {

void collect_vars(const Constraint & c, VarSet & out) {
    if (c.kind() == Constraint::Kind::Atom) {
        for (auto const & [v, k] : c.as_atom().lhs().coeffs()) { out.insert(v); }
        return;
    }
    for (auto const & ch : c.children()) { collect_vars(ch, out); }
}

template <typename AtomFn>
Constraint map_atoms(const Constraint & c, AtomFn const & fn) {
    switch (c.kind()) {
    case Constraint::Kind::True:
    case Constraint::Kind::False: return c;
    case Constraint::Kind::Atom: return fn(c.as_atom());
    case Constraint::Kind::Not: return negate(map_atoms(c.children().front(), fn));
    case Constraint::Kind::And:
    case Constraint::Kind::Or: {
        std::vector<Constraint> parts;
        parts.reserve(c.children().size());
        for (auto const & ch : c.children()) { parts.push_back(map_atoms(ch, fn)); }
        return c.kind() == Constraint::Kind::And ? conj(std::move(parts)) : disj(std::move(parts));
    }
    }
    return c;
}

} // namespace

VarSet free_vars(const Constraint & c) {
    VarSet out;
    collect_vars(c, out);
    return out;
}

bool evaluate(const Constraint & c, const Model & m) {
    switch (c.kind()) {
    case Constraint::Kind::True: return true;
    case Constraint::Kind::False: return false;
    case Constraint::Kind::Atom: return c.as_atom().holds(m);
    case Constraint::Kind::Not: return !evaluate(c.children().front(), m);
    case Constraint::Kind::And:
        return std::all_of(c.children().begin(), c.children().end(), [&](auto const & ch) { return evaluate(ch, m); });
    case Constraint::Kind::Or:
        return std::any_of(c.children().begin(), c.children().end(), [&](auto const & ch) { return evaluate(ch, m); });
    }
    return false;
}

Constraint substitute(const Constraint & c, const Substitution & sigma) {
    if (sigma.empty()) { return c; }
    return map_atoms(c, [&](const LinearAtom & a) {
        bool touched = false;
        for (auto const & [v, k] : a.lhs().coeffs()) {
            if (sigma.count(v)) {
                touched = true;
                break;
            }
        }
        if (!touched) { return Constraint::atom(a); }
        return make_atom(a.lhs().substitute(sigma), a.rel());
    });
}

Constraint rename(const Constraint & c, const std::map<Var, Var> & renaming) {
    Substitution sigma;
    for (auto const & [from, to] : renaming) {
        if (from.sort != to.sort) { throw SortError("renaming " + from.name + " changes its sort"); }
        sigma.emplace(from, LinearTerm::variable(to));
    }
    return substitute(c, sigma);
}

// ---------------------------------------------------------------- DNF

VarSet Cube::vars() const {
    VarSet r;
    for (auto const & a : atoms) {
        for (auto const & [v, k] : a.lhs().coeffs()) { r.insert(v); }
    }
    return r;
}

bool Cube::holds(const Model & m) const {
    return std::all_of(atoms.begin(), atoms.end(), [&](auto const & a) { return a.holds(m); });
}

Constraint to_nnf(const Constraint & c) {
    switch (c.kind()) {
    case Constraint::Kind::Not: {
        auto const & inner = c.children().front();
        std::vector<Constraint> parts;
        for (auto const & ch : inner.children()) { parts.push_back(to_nnf(negate(ch))); }
        // negate() folds atoms, constants and double negation, so inner is And/Or here.
        return inner.kind() == Constraint::Kind::And ? disj(std::move(parts)) : conj(std::move(parts));
    }
    case Constraint::Kind::And:
    case Constraint::Kind::Or: {
        std::vector<Constraint> parts;
        for (auto const & ch : c.children()) { parts.push_back(to_nnf(ch)); }
        return c.kind() == Constraint::Kind::And ? conj(std::move(parts)) : disj(std::move(parts));
    }
    default: return c;
    }
}

namespace {

using CubeList = std::vector<Cube>;

void push_atom(Cube & cube, std::variant<bool, LinearAtom> a, bool & dead) {
    if (auto const * b = std::get_if<bool>(&a)) {
        dead = dead || !*b;
        return;
    }
    cube.atoms.push_back(std::get<LinearAtom>(std::move(a)));
}

void normalize_cube(Cube & cube) {
    std::sort(cube.atoms.begin(), cube.atoms.end());
    cube.atoms.erase(std::unique(cube.atoms.begin(), cube.atoms.end()), cube.atoms.end());
}

CubeList dnf_atom(const LinearAtom & a) {
    CubeList out;
    switch (a.rel()) {
    case Rel::Le:
    case Rel::Lt: out.push_back(Cube{{a}}); break;
    case Rel::Eq: {
        Cube cube;
        bool dead = false;
        push_atom(cube, canonical_atom(a.lhs(), Rel::Le), dead);
        push_atom(cube, canonical_atom(-a.lhs(), Rel::Le), dead);
        if (!dead) {
            normalize_cube(cube);
            out.push_back(std::move(cube));
        }
        break;
    }
    case Rel::Ne:
        for (auto const & t : {a.lhs(), -a.lhs()}) {
            Cube cube;
            bool dead = false;
            push_atom(cube, canonical_atom(t, Rel::Lt), dead);
            if (!dead) { out.push_back(std::move(cube)); }
        }
        break;
    }
    return out;
}

CubeList dnf_rec(const Constraint & c, std::size_t limit) {
    switch (c.kind()) {
    case Constraint::Kind::True: return {Cube{}};
    case Constraint::Kind::False: return {};
    case Constraint::Kind::Atom: return dnf_atom(c.as_atom());
    case Constraint::Kind::Or: {
        CubeList out;
        for (auto const & ch : c.children()) {
            for (auto & cube : dnf_rec(ch, limit)) {
                out.push_back(std::move(cube));
                if (out.size() > limit) { throw CubeLimitExceeded(limit); }
            }
        }
        return out;
    }
    case Constraint::Kind::And: {
        CubeList acc{Cube{}};
        for (auto const & ch : c.children()) {
            CubeList part = dnf_rec(ch, limit);
            if (part.empty()) { return {}; }
            if (acc.size() * part.size() > limit) { throw CubeLimitExceeded(limit); }
            CubeList next;
            next.reserve(acc.size() * part.size());
            for (auto const & x : acc) {
                for (auto const & y : part) {
                    Cube merged = x;
                    merged.atoms.insert(merged.atoms.end(), y.atoms.begin(), y.atoms.end());
                    next.push_back(std::move(merged));
                }
            }
            acc = std::move(next);
        }
        for (auto & cube : acc) { normalize_cube(cube); }
        return acc;
    }
    case Constraint::Kind::Not: break;
    }
    assert(false && "dnf_rec expects NNF input");
    return {};
}

} // namespace

std::vector<Cube> to_dnf(const Constraint & c, std::size_t limit) {
    CubeList cubes = dnf_rec(to_nnf(c), limit);
    std::sort(cubes.begin(), cubes.end(), [](const Cube & a, const Cube & b) { return a.atoms < b.atoms; });
    cubes.erase(std::unique(cubes.begin(), cubes.end(), [](const Cube & a, const Cube & b) { return a.atoms == b.atoms; }),
                cubes.end());
    return cubes;
}

Constraint cube_to_constraint(const Cube & cube) {
    std::vector<Constraint> parts;
    for (auto const & a : cube.atoms) { parts.push_back(Constraint::atom(a)); }
    return conj(std::move(parts));
}

} // namespace hornitp
