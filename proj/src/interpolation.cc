#include "hornitp/interpolation.h"

#include "hornitp/sexpr.h"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace hornitp {

namespace {

class Budget {
public:
    explicit Budget(std::size_t limit) : limit_(limit) {}
    void tick() {
        if (++count_ > limit_) { throw CubeLimitExceeded(limit_); }
    }

private:
    std::size_t limit_;
    std::size_t count_ = 0;
};

void sort_atoms(std::vector<LinearAtom> & atoms) {
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
}

bool push_folded(std::vector<LinearAtom> & atoms, const std::variant<bool, LinearAtom> & a) {
    if (auto const * b = std::get_if<bool>(&a)) { return *b; }
    atoms.push_back(std::get<LinearAtom>(a));
    return true;
}

// Moves the parts of an NNF conjunction into `cube` until a disjunction is
// met, which is returned in `branch`. False when the cube became false.
bool advance(std::vector<Constraint> & pending, Cube & cube, std::optional<Constraint> & branch) {
    branch.reset();
    while (!pending.empty()) {
        Constraint c = pending.back();
        pending.pop_back();
        switch (c.kind()) {
        case Constraint::Kind::True: break;
        case Constraint::Kind::False: return false;
        case Constraint::Kind::And:
            for (auto it = c.children().rbegin(); it != c.children().rend(); ++it) { pending.push_back(*it); }
            break;
        case Constraint::Kind::Or: branch = c; return true;
        case Constraint::Kind::Not: throw std::logic_error("negation left after NNF conversion");
        case Constraint::Kind::Atom: {
            auto const & a = c.as_atom();
            switch (a.rel()) {
            case Rel::Le:
            case Rel::Lt: cube.atoms.push_back(a); break;
            case Rel::Eq:
                if (!push_folded(cube.atoms, canonical_atom(a.lhs(), Rel::Le)) ||
                    !push_folded(cube.atoms, canonical_atom(-a.lhs(), Rel::Le))) {
                    return false;
                }
                break;
            case Rel::Ne: pending.push_back(disj({make_atom(a.lhs(), Rel::Lt), make_atom(-a.lhs(), Rel::Lt)})); break;
            }
            break;
        }
        }
    }
    sort_atoms(cube.atoms);
    return true;
}

bool rationally_feasible(const std::vector<LinearAtom> & atoms) { return solve_rational(atoms).sat(); }

// Depth-first cube search; prefixes without a rational solution are cut.
// Cubes the integer search leaves undecided are noted in `unknown` and
// skipped, so a later model still answers the query.
std::optional<Model> sat_search(std::vector<Constraint> pending, Cube cube, const LinearSolverOptions & lo,
                                Budget & budget, std::optional<std::string> & unknown) {
    std::optional<Constraint> br;
    if (!advance(pending, cube, br)) { return std::nullopt; }
    if (!br) {
        budget.tick();
        try {
            return sat_cube(cube, lo).model;
        } catch (const UnknownResult & e) {
            unknown = e.what();
            return std::nullopt;
        }
    }
    if (!rationally_feasible(cube.atoms)) {
        budget.tick();
        return std::nullopt;
    }
    for (auto const & ch : br->children()) {
        auto next = pending;
        next.push_back(ch);
        if (auto m = sat_search(std::move(next), cube, lo, budget, unknown)) { return m; }
    }
    return std::nullopt;
}

std::vector<Constraint> top_conjuncts(const Constraint & nnf) {
    if (nnf.kind() == Constraint::Kind::And) { return nnf.children(); }
    return {nnf};
}

// Partition of the parts into groups connected by shared variables.
std::vector<std::vector<std::size_t>> connected_groups(const std::vector<Constraint> & parts) {
    std::vector<std::size_t> parent(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) { parent[i] = i; }
    std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
        return parent[i] == i ? i : parent[i] = find(parent[i]);
    };
    std::map<Var, std::size_t> owner;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        for (auto const & v : free_vars(parts[i])) {
            auto [it, inserted] = owner.emplace(v, i);
            if (!inserted) { parent[find(i)] = find(it->second); }
        }
    }
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < parts.size(); ++i) { groups[find(i)].push_back(i); }
    std::vector<std::vector<std::size_t>> out;
    for (auto & [root, g] : groups) { out.push_back(std::move(g)); }
    return out;
}

std::vector<Constraint> pick(const std::vector<Constraint> & parts, const std::vector<std::size_t> & idx) {
    std::vector<Constraint> out;
    for (auto i : idx) { out.push_back(parts[i]); }
    return out;
}

LinearSolverOptions solver_options(const EngineOptions & options) {
    LinearSolverOptions lo;
    lo.branch_depth = options.branch_depth;
    return lo;
}

} // namespace

SatResult sat(const Constraint & c, const EngineOptions & options) {
    Budget budget(options.cube_limit);
    auto const lo = solver_options(options);
    auto const parts = top_conjuncts(to_nnf(c));
    Model m;
    std::optional<std::string> undecided;
    for (auto const & g : connected_groups(parts)) {
        auto pending = pick(parts, g);
        std::reverse(pending.begin(), pending.end());
        std::optional<std::string> unknown;
        auto r = sat_search(std::move(pending), Cube{}, lo, budget, unknown);
        if (r) {
            m.insert(r->begin(), r->end());
        } else if (unknown) {
            undecided = unknown;
        } else {
            return SatResult{};
        }
    }
    if (undecided) { throw UnknownResult(*undecided); }
    for (auto const & v : free_vars(c)) { m.try_emplace(v, 0); }
    if (!evaluate(c, m)) { throw std::logic_error("model of a cube does not satisfy its formula"); }
    return SatResult{std::move(m)};
}

bool entails(const std::vector<Constraint> & premises, const Constraint & goal, const EngineOptions & options) {
    std::vector<Constraint> parts = premises;
    parts.push_back(negate(goal));
    return !sat(conj(std::move(parts)), options).sat();
}

namespace {

struct CubeProblem {
    std::vector<LinearAtom> atoms;  // A atoms first, then B atoms
    std::size_t a_size = 0;
    VarSet a_vars;
};

// Walks the proof tree. Branch atoms on a variable of A are treated as
// A-side and their subproofs are joined with "or"; otherwise they belong to
// B and the subproofs are joined with "and".
Constraint from_proof(const CubeProblem & p, const UnsatProof & proof, std::vector<bool> & branch_is_a) {
    if (!proof.is_leaf()) {
        bool a_side = p.a_vars.count(*proof.split_var) > 0;
        branch_is_a.push_back(a_side);
        Constraint l = from_proof(p, *proof.left, branch_is_a);
        Constraint r = from_proof(p, *proof.right, branch_is_a);
        branch_is_a.pop_back();
        return a_side ? disj({l, r}) : conj({l, r});
    }
    LinearTerm sum;
    bool strict = false;
    bool any_a = false, any_b = false;
    std::size_t const n = p.atoms.size();
    for (auto const & [i, m] : proof.certificate.multipliers) {
        bool a_side;
        LinearAtom const * atom;
        if (i < n) {
            a_side = i < p.a_size;
            atom = &p.atoms[i];
        } else {
            a_side = branch_is_a.at(i - n);
            atom = &proof.branch_atoms.at(i - n);
        }
        if (!a_side) {
            any_b = true;
            continue;
        }
        any_a = true;
        sum += atom->lhs() * m;
        if (atom->rel() == Rel::Lt && m > 0) { strict = true; }
    }
    if (!any_a) { return Constraint::truth(true); }
    if (!any_b) { return Constraint::truth(false); }
    return make_atom(sum, strict ? Rel::Lt : Rel::Le);
}

} // namespace

namespace {

Constraint interpolant_of(const Cube & a, const Cube & b, const CubeResult & r) {
    if (r.sat()) { throw NotUnsat(*r.model, "A & B is satisfiable"); }
    if (!r.proved) { throw UnknownResult("the integer refutation needs divisibility, no linear interpolant derived"); }
    CubeProblem p;
    p.atoms = a.atoms;
    p.a_size = a.atoms.size();
    p.atoms.insert(p.atoms.end(), b.atoms.begin(), b.atoms.end());
    p.a_vars = a.vars();
    std::vector<bool> branch_is_a;
    return from_proof(p, r.proof, branch_is_a);
}

Cube joint(const Cube & a, const Cube & b) {
    Cube j{a.atoms};
    j.atoms.insert(j.atoms.end(), b.atoms.begin(), b.atoms.end());
    return j;
}

// Interpolant of the cube `a` against the formula still pending on the B
// side. A prefix of B already refuted together with `a` covers all its
// extensions, so the search stops there.
Constraint b_search(const Cube & a, std::vector<Constraint> pending, Cube b, const LinearSolverOptions & lo,
                    Budget & budget) {
    std::optional<Constraint> br;
    if (!advance(pending, b, br)) { return Constraint::truth(true); }
    if (!br) {
        budget.tick();
        return interpolant_of(a, b, sat_cube(joint(a, b), lo));
    }
    if (!rationally_feasible(joint(a, b).atoms)) {
        budget.tick();
        return interpolant_of(a, b, sat_cube(joint(a, b), lo));
    }
    std::vector<Constraint> parts;
    for (auto const & ch : br->children()) {
        auto next = pending;
        next.push_back(ch);
        parts.push_back(b_search(a, std::move(next), b, lo, budget));
    }
    return conj(std::move(parts));
}

Constraint a_search(std::vector<Constraint> pending, Cube a, const std::vector<Constraint> & b,
                    const LinearSolverOptions & lo, Budget & budget) {
    std::optional<Constraint> br;
    if (!advance(pending, a, br)) { return Constraint::truth(false); }
    if (!rationally_feasible(a.atoms)) {
        budget.tick();
        return Constraint::truth(false);
    }
    if (!br) { return b_search(a, b, Cube{}, lo, budget); }
    std::vector<Constraint> parts;
    for (auto const & ch : br->children()) {
        auto next = pending;
        next.push_back(ch);
        parts.push_back(a_search(std::move(next), a, b, lo, budget));
    }
    return disj(std::move(parts));
}

} // namespace

Constraint cube_interpolant(const Cube & a, const Cube & b, const EngineOptions & options) {
    return interpolant_of(a, b, sat_cube(joint(a, b), solver_options(options)));
}

Interpolant binary_interpolant(const Constraint & a, const Constraint & b, const EngineOptions & options) {
    Budget budget(options.cube_limit);
    auto const lo = solver_options(options);
    auto const a_parts = top_conjuncts(to_nnf(a));
    auto const b_parts = top_conjuncts(to_nnf(b));
    std::vector<Constraint> parts = a_parts;
    parts.insert(parts.end(), b_parts.begin(), b_parts.end());

    // Groups of conjuncts sharing no variable are refuted separately; a group
    // on one side only decides the answer when it is unsatisfiable by itself.
    std::vector<std::pair<std::vector<Constraint>, std::vector<Constraint>>> mixed;
    for (auto const & g : connected_groups(parts)) {
        std::vector<Constraint> ga, gb;
        for (auto i : g) { (i < a_parts.size() ? ga : gb).push_back(parts[i]); }
        if (gb.empty() || ga.empty()) {
            auto & side = gb.empty() ? ga : gb;
            std::reverse(side.begin(), side.end());
            std::optional<std::string> unknown;
            if (!sat_search(side, Cube{}, lo, budget, unknown) && !unknown) {
                return Interpolant{Constraint::truth(!gb.empty())};
            }
            continue;
        }
        mixed.emplace_back(std::move(ga), std::move(gb));
    }
    for (auto & [ga, gb] : mixed) {
        std::reverse(ga.begin(), ga.end());
        std::reverse(gb.begin(), gb.end());
        try {
            return Interpolant{a_search(ga, Cube{}, gb, lo, budget)};
        } catch (const NotUnsat &) {
        }
    }
    auto m = sat(a && b, options);
    if (!m.sat()) { throw std::logic_error("unsatisfiable pair without an unsatisfiable group"); }
    throw NotUnsat(*m.model, "A & B is satisfiable");
}

std::optional<std::string> check_interpolant(const Constraint & a, const Constraint & b, const Constraint & i,
                                             const EngineOptions & options) {
    VarSet fa = free_vars(a), fb = free_vars(b);
    for (auto const & v : free_vars(i)) {
        if (!fa.count(v) || !fb.count(v)) { return "variable " + v.name + " is not shared by A and B"; }
    }
    if (!entails({a}, i, options)) { return "A does not entail the interpolant"; }
    if (sat(i && b, options).sat()) { return "interpolant is consistent with B"; }
    return std::nullopt;
}

} // namespace hornitp
