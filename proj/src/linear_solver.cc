#include "hornitp/linear_solver.h"

#include <algorithm>
#include <stdexcept>

namespace hornitp {

namespace {

constexpr std::size_t fm_max_vars = 6;
constexpr std::size_t fm_max_rows = 400;

using Derivation = std::map<std::size_t, Rational>;

FarkasCertificate make_certificate(const std::vector<LinearAtom> & atoms, const Derivation & d) {
    FarkasCertificate cert;
    for (auto const & [i, m] : d) {
        if (m == 0) { continue; }
        cert.multipliers.emplace_back(i, m);
        if (atoms[i].rel() == Rel::Lt && m > 0) { cert.strict = true; }
    }
    return cert;
}

// Picks a value in the interval, preferring 0, then the integer closest to 0.
Rational choose_value(const std::optional<Rational> & lo, bool lo_strict, const std::optional<Rational> & hi, bool hi_strict) {
    auto fits = [&](const Rational & v) {
        if (lo && (lo_strict ? v <= *lo : v < *lo)) { return false; }
        if (hi && (hi_strict ? v >= *hi : v > *hi)) { return false; }
        return true;
    };
    if (fits(0)) { return 0; }
    if (lo && *lo >= 0) {
        Rational v(ceil_rational(*lo));
        if (lo_strict && v == *lo) { v += 1; }
        if (fits(v)) { return v; }
    }
    if (hi && *hi <= 0) {
        Rational v(floor_rational(*hi));
        if (hi_strict && v == *hi) { v -= 1; }
        if (fits(v)) { return v; }
    }
    if (lo && hi) { return (*lo + *hi) / 2; }
    if (lo) { return *lo + 1; }
    return *hi - 1;
}

// ---------------------------------------------------------------- Fourier-Motzkin

struct FmRow {
    LinearTerm lhs;  // lhs (< or <=) 0
    bool strict = false;
    Derivation deriv;
};

class FourierMotzkin {
public:
    FourierMotzkin(const std::vector<LinearAtom> & atoms, std::size_t max_rows) : atoms_(atoms), max_rows_(max_rows) {}

    // nullopt when the row budget is exhausted.
    std::optional<LpResult> run() {
        std::vector<FmRow> rows;
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            auto const & a = atoms_[i];
            if (a.rel() == Rel::Eq) {
                rows.push_back({a.lhs(), false, {{i, Rational(1)}}});
                rows.push_back({-a.lhs(), false, {{i, Rational(-1)}}});
            } else {
                rows.push_back({a.lhs(), a.rel() == Rel::Lt, {{i, Rational(1)}}});
            }
        }
        if (auto conflict = insert_all(rows)) { return conflict; }

        while (!rows_.empty()) {
            Var v = pick();
            std::vector<FmRow> pos, neg, next;
            for (auto & r : rows_) {
                Rational a = r.lhs.coeff(v);
                if (a > 0) {
                    pos.push_back(std::move(r));
                } else if (a < 0) {
                    neg.push_back(std::move(r));
                } else {
                    next.push_back(std::move(r));
                }
            }
            for (auto const & p : pos) {
                for (auto const & n : neg) {
                    Rational ap = p.lhs.coeff(v);
                    Rational an = -n.lhs.coeff(v);
                    FmRow r;
                    r.lhs = p.lhs * an + n.lhs * ap;
                    r.strict = p.strict || n.strict;
                    r.deriv = p.deriv;
                    for (auto & [k, m] : r.deriv) { m *= an; }
                    for (auto const & [k, m] : n.deriv) { r.deriv[k] += m * ap; }
                    next.push_back(std::move(r));
                }
            }
            std::vector<FmRow> touched = std::move(pos);
            touched.insert(touched.end(), std::make_move_iterator(neg.begin()), std::make_move_iterator(neg.end()));
            stages_.emplace_back(v, std::move(touched));
            rows_.clear();
            index_.clear();
            if (auto conflict = insert_all(next)) { return conflict; }
            if (rows_.size() > max_rows_) { return std::nullopt; }
        }
        return LpResult{back_substitute(), {}};
    }

private:
    const std::vector<LinearAtom> & atoms_;
    std::size_t max_rows_;
    std::vector<FmRow> rows_;
    std::map<std::map<Var, Rational>, std::size_t> index_;
    std::vector<std::pair<Var, std::vector<FmRow>>> stages_;

    std::optional<LpResult> insert_all(std::vector<FmRow> & rows) {
        for (auto & r : rows) {
            if (auto conflict = insert(std::move(r))) { return conflict; }
        }
        return std::nullopt;
    }

    std::optional<LpResult> insert(FmRow r) {
        if (r.lhs.is_constant()) {
            Rational const & c = r.lhs.constant();
            if (c > 0 || (c == 0 && r.strict)) { return LpResult{std::nullopt, make_certificate(atoms_, r.deriv)}; }
            return std::nullopt;
        }
        // Scale so the leading coefficient is +-1.
        Rational s = abs(r.lhs.coeffs().begin()->second);
        if (s != 1) {
            Rational inv = 1 / s;
            r.lhs *= inv;
            for (auto & [k, m] : r.deriv) { m *= inv; }
        }
        auto [it, inserted] = index_.try_emplace(r.lhs.coeffs(), rows_.size());
        if (inserted) {
            rows_.push_back(std::move(r));
            return std::nullopt;
        }
        // Same linear form: keep the tighter bound.
        FmRow & old = rows_[it->second];
        int c = cmp(r.lhs.constant(), old.lhs.constant());
        if (c > 0 || (c == 0 && r.strict && !old.strict)) { old = std::move(r); }
        return std::nullopt;
    }

    Var pick() const {
        std::map<Var, std::pair<std::size_t, std::size_t>> counts;
        for (auto const & r : rows_) {
            for (auto const & [v, a] : r.lhs.coeffs()) {
                auto & c = counts[v];
                (a > 0 ? c.first : c.second)++;
            }
        }
        auto best = counts.begin();
        auto score = [](auto const & c) { return c.first * c.second; };
        for (auto it = counts.begin(); it != counts.end(); ++it) {
            if (score(it->second) < score(best->second)) { best = it; }
        }
        return best->first;
    }

    Model back_substitute() const {
        // A variable whose rows all vanished during an elimination is free.
        Model m;
        for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) {
            auto const & [v, rows] = *it;
            std::optional<Rational> lo, hi;
            bool lo_strict = false, hi_strict = false;
            for (auto const & r : rows) {
                Rational a = r.lhs.coeff(v);
                Rational rest = r.lhs.constant();
                for (auto const & [w, c] : r.lhs.coeffs()) {
                    if (!(w == v)) { rest += c * m.try_emplace(w, 0).first->second; }
                }
                Rational bound = -rest / a;
                if (a > 0) {
                    if (!hi || bound < *hi) {
                        hi = bound;
                        hi_strict = r.strict;
                    } else if (bound == *hi && r.strict) {
                        hi_strict = true;
                    }
                } else {
                    if (!lo || bound > *lo) {
                        lo = bound;
                        lo_strict = r.strict;
                    } else if (bound == *lo && r.strict) {
                        lo_strict = true;
                    }
                }
            }
            m[v] = choose_value(lo, lo_strict, hi, hi_strict);
        }
        return m;
    }
};

// ---------------------------------------------------------------- simplex

// r + d * delta for an infinitesimal delta > 0.
struct DeltaRational {
    Rational r, d;
    friend bool operator<(const DeltaRational & a, const DeltaRational & b) { return a.r < b.r || (a.r == b.r && a.d < b.d); }
    friend bool operator==(const DeltaRational & a, const DeltaRational & b) { return a.r == b.r && a.d == b.d; }
    DeltaRational & operator+=(const DeltaRational & o) {
        r += o.r;
        d += o.d;
        return *this;
    }
    DeltaRational operator-(const DeltaRational & o) const { return {r - o.r, d - o.d}; }
    DeltaRational operator*(const Rational & k) const { return {r * k, d * k}; }
};

struct Bound {
    DeltaRational value;
    std::size_t atom = 0;
    int sign = 1;  // multiplier sign of the atom when this bound is used
};

class Simplex {
public:
    explicit Simplex(const std::vector<LinearAtom> & atoms) : atoms_(atoms) {}

    LpResult run() {
        // Columns: original variables first, then one slack per distinct linear form.
        std::map<Var, std::size_t> var_index;
        for (auto const & a : atoms_) {
            for (auto const & [v, c] : a.lhs().coeffs()) { var_index.try_emplace(v, 0); }
        }
        for (auto & [v, i] : var_index) {
            i = vars_.size();
            vars_.push_back(v);
        }
        std::size_t const n = vars_.size();
        std::map<std::map<Var, Rational>, std::size_t> slack_of;
        std::vector<std::map<Var, Rational>> forms;
        std::vector<std::size_t> atom_slack;
        for (auto const & a : atoms_) {
            auto [it, inserted] = slack_of.try_emplace(a.lhs().coeffs(), n + forms.size());
            if (inserted) { forms.push_back(a.lhs().coeffs()); }
            atom_slack.push_back(it->second);
        }
        std::size_t const total = n + forms.size();
        lower_.assign(total, std::nullopt);
        upper_.assign(total, std::nullopt);
        beta_.assign(total, DeltaRational{});
        row_of_.assign(total, -1);
        for (std::size_t k = 0; k < forms.size(); ++k) {
            std::vector<Rational> row(total);
            for (auto const & [v, c] : forms[k]) { row[var_index.at(v)] = c; }
            row_of_[n + k] = static_cast<int>(rows_.size());
            basic_.push_back(n + k);
            rows_.push_back(std::move(row));
        }

        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            auto const & a = atoms_[i];
            std::size_t s = atom_slack[i];
            DeltaRational u{-a.lhs().constant(), a.rel() == Rel::Lt ? Rational(-1) : Rational(0)};
            if (!upper_[s] || u < upper_[s]->value) { upper_[s] = Bound{u, i, 1}; }
            if (a.rel() == Rel::Eq) {
                if (!lower_[s] || lower_[s]->value < u) { lower_[s] = Bound{u, i, -1}; }
            }
            if (lower_[s] && upper_[s] && upper_[s]->value < lower_[s]->value) {
                Derivation d;
                d[upper_[s]->atom] += upper_[s]->sign;
                d[lower_[s]->atom] += lower_[s]->sign;
                return LpResult{std::nullopt, make_certificate(atoms_, d)};
            }
        }

        while (true) {
            std::optional<std::size_t> violated;
            bool below = false;
            for (std::size_t v = 0; v < total; ++v) {
                if (row_of_[v] < 0) { continue; }
                if (lower_[v] && beta_[v] < lower_[v]->value) {
                    violated = v;
                    below = true;
                    break;
                }
                if (upper_[v] && upper_[v]->value < beta_[v]) {
                    violated = v;
                    below = false;
                    break;
                }
            }
            if (!violated) { return LpResult{model(), {}}; }
            std::size_t const i = *violated;
            auto const & row = rows_[row_of_[i]];
            std::optional<std::size_t> entering;
            for (std::size_t j = 0; j < total && !entering; ++j) {
                if (row_of_[j] >= 0 || row[j] == 0) { continue; }
                bool increase = below == (row[j] > 0);
                if (increase ? (!upper_[j] || beta_[j] < upper_[j]->value) : (!lower_[j] || lower_[j]->value < beta_[j])) {
                    entering = j;
                }
            }
            if (!entering) { return LpResult{std::nullopt, conflict(i, below)}; }
            pivot_and_update(i, *entering, below ? lower_[i]->value : upper_[i]->value);
        }
    }

private:
    const std::vector<LinearAtom> & atoms_;
    std::vector<Var> vars_;
    std::vector<std::vector<Rational>> rows_;  // basic_[r] = sum rows_[r][j] * x_j
    std::vector<std::size_t> basic_;
    std::vector<int> row_of_;
    std::vector<std::optional<Bound>> lower_, upper_;
    std::vector<DeltaRational> beta_;

    FarkasCertificate conflict(std::size_t i, bool below) const {
        auto const & row = rows_[row_of_[i]];
        Derivation d;
        auto use = [&](const Bound & b, const Rational & m) { d[b.atom] += m * b.sign; };
        // below: x_i >= l_i is violated; otherwise x_i <= u_i is.
        use(below ? *lower_[i] : *upper_[i], 1);
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (row_of_[j] >= 0 || row[j] == 0) { continue; }
            bool need_upper = below == (row[j] > 0);
            use(need_upper ? *upper_[j] : *lower_[j], abs(row[j]));
        }
        return make_certificate(atoms_, d);
    }

    void pivot_and_update(std::size_t i, std::size_t j, const DeltaRational & v) {
        std::size_t const r = row_of_[i];
        Rational const a = rows_[r][j];
        DeltaRational theta = (v - beta_[i]) * (1 / a);
        beta_[i] = v;
        beta_[j] += theta;
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            if (k != r && rows_[k][j] != 0) { beta_[basic_[k]] += theta * rows_[k][j]; }
        }
        pivot(r, i, j);
    }

    void pivot(std::size_t r, std::size_t i, std::size_t j) {
        auto & row = rows_[r];
        Rational const a = row[j];
        // x_j = (x_i - sum_{k != j} row[k] x_k) / a
        Rational const inv = 1 / a;
        for (auto & c : row) { c *= -inv; }
        row[j] = 0;
        row[i] = inv;
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            if (k == r || rows_[k][j] == 0) { continue; }
            Rational b = rows_[k][j];
            rows_[k][j] = 0;
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (row[c] != 0) { rows_[k][c] += b * row[c]; }
            }
        }
        basic_[r] = j;
        row_of_[j] = static_cast<int>(r);
        row_of_[i] = -1;
    }

    Model model() const {
        Rational delta = 1;
        auto limit = [&](const DeltaRational & small, const DeltaRational & big) {
            // small <= big must survive concretization.
            if (small.r < big.r && small.d > big.d) {
                Rational q = (big.r - small.r) / (small.d - big.d);
                if (q < delta) { delta = q; }
            }
        };
        for (std::size_t v = 0; v < beta_.size(); ++v) {
            if (lower_[v]) { limit(lower_[v]->value, beta_[v]); }
            if (upper_[v]) { limit(beta_[v], upper_[v]->value); }
        }
        Model m;
        for (std::size_t v = 0; v < vars_.size(); ++v) { m[vars_[v]] = beta_[v].r + beta_[v].d * delta; }
        return m;
    }
};

LpResult checked(const std::vector<LinearAtom> & atoms, LpResult r) {
    if (r.sat()) {
        for (auto const & a : atoms) {
            if (!a.holds(*r.model)) { throw std::logic_error("linear solver produced a non-model"); }
        }
    } else if (!check_certificate(atoms, r.certificate)) {
        throw std::logic_error("linear solver produced an invalid certificate");
    }
    return r;
}

} // namespace

std::size_t UnsatProof::leaf_count() const { return is_leaf() ? 1 : left->leaf_count() + right->leaf_count(); }

LpResult solve_rational(const std::vector<LinearAtom> & atoms, LpMethod method) {
    if (method != LpMethod::Simplex) {
        VarSet vars;
        for (auto const & a : atoms) {
            for (auto const & [v, c] : a.lhs().coeffs()) { vars.insert(v); }
        }
        if (method == LpMethod::FourierMotzkin) {
            return checked(atoms, *FourierMotzkin(atoms, static_cast<std::size_t>(-1)).run());
        }
        if (vars.size() <= fm_max_vars) {
            if (auto r = FourierMotzkin(atoms, fm_max_rows).run()) { return checked(atoms, std::move(*r)); }
        }
    }
    return checked(atoms, Simplex(atoms).run());
}

LinearAtom branch_atom_le(const Var & x, const Integer & bound) {
    return std::get<LinearAtom>(canonical_atom(LinearTerm::variable(x) - LinearTerm(Rational(bound)), Rel::Le));
}

LinearAtom branch_atom_ge(const Var & x, const Integer & bound) {
    return std::get<LinearAtom>(canonical_atom(LinearTerm(Rational(bound + 1)) - LinearTerm::variable(x), Rel::Le));
}

namespace {

struct BranchAndBound {
    const Cube & cube;
    const LinearSolverOptions & options;

    std::pair<std::optional<Model>, UnsatProof> run(std::vector<LinearAtom> & path, int depth) {
        std::vector<LinearAtom> atoms = cube.atoms;
        atoms.insert(atoms.end(), path.begin(), path.end());
        LpResult lp = solve_rational(atoms, options.method);
        if (!lp.sat()) {
            UnsatProof leaf;
            leaf.certificate = std::move(lp.certificate);
            leaf.branch_atoms = path;
            return {std::nullopt, std::move(leaf)};
        }
        Model & m = *lp.model;
        for (auto const & v : cube.vars()) { m.try_emplace(v, 0); }
        for (auto const & [v, q] : m) {
            if (v.sort != Sort::Int || q.get_den() == 1) { continue; }
            if (depth >= options.branch_depth) {
                throw UnknownResult("integer branching depth " + std::to_string(options.branch_depth) + " exhausted");
            }
            Var const x = v;
            Integer const b = floor_rational(q);
            path.push_back(branch_atom_le(x, b));
            auto left = run(path, depth + 1);
            path.pop_back();
            if (left.first) { return left; }
            path.push_back(branch_atom_ge(x, b));
            auto right = run(path, depth + 1);
            path.pop_back();
            if (right.first) { return right; }
            UnsatProof node;
            node.split_var = x;
            node.split_bound = b;
            node.left = std::make_shared<const UnsatProof>(std::move(left.second));
            node.right = std::make_shared<const UnsatProof>(std::move(right.second));
            return {std::nullopt, std::move(node)};
        }
        return {std::move(m), {}};
    }
};

bool check_proof_rec(const Cube & cube, const UnsatProof & p, std::vector<LinearAtom> & path) {
    if (p.is_leaf()) {
        if (p.branch_atoms != path) { return false; }
        std::vector<LinearAtom> atoms = cube.atoms;
        atoms.insert(atoms.end(), path.begin(), path.end());
        return check_certificate(atoms, p.certificate);
    }
    if (p.split_var->sort != Sort::Int || !p.left || !p.right) { return false; }
    path.push_back(branch_atom_le(*p.split_var, p.split_bound));
    bool ok = check_proof_rec(cube, *p.left, path);
    path.back() = branch_atom_ge(*p.split_var, p.split_bound);
    ok = ok && check_proof_rec(cube, *p.right, path);
    path.pop_back();
    return ok;
}

// Depth-first search for an integer model inside the box |x| <= radius,
// giving up after `budget` relaxations.
struct BoxSearch {
    const Cube & cube;
    LpMethod method;
    std::size_t budget;

    std::optional<Model> run(std::vector<LinearAtom> & atoms) {
        if (budget == 0) { return std::nullopt; }
        --budget;
        LpResult lp = solve_rational(atoms, method);
        if (!lp.sat()) { return std::nullopt; }
        Model & m = *lp.model;
        for (auto const & v : cube.vars()) { m.try_emplace(v, 0); }
        for (auto const & [v, q] : m) {
            if (v.sort != Sort::Int || q.get_den() == 1) { continue; }
            Integer const b = floor_rational(q);
            for (auto const & side : {branch_atom_le(v, b), branch_atom_ge(v, b)}) {
                atoms.push_back(side);
                auto found = run(atoms);
                atoms.pop_back();
                if (found) { return found; }
            }
            return std::nullopt;
        }
        return std::move(m);
    }
};

std::optional<Model> box_search(const Cube & cube, const LinearSolverOptions & options) {
    for (long radius : {16L, 1024L}) {
        std::vector<LinearAtom> atoms = cube.atoms;
        for (auto const & v : cube.vars()) {
            if (v.sort != Sort::Int) { continue; }
            atoms.push_back(branch_atom_le(v, radius));
            atoms.push_back(branch_atom_ge(v, -radius - 1));
        }
        if (auto m = BoxSearch{cube, options.method, 4000}.run(atoms)) { return m; }
    }
    return std::nullopt;
}

// Integer solvability of the equalities among Int variables: the explicit Eq
// atoms and pairs t <= 0, -t <= 0. Column operations are unimodular, so each
// equation is reduced to a single coefficient g that must divide its constant.
bool integer_equalities_solvable(const Cube & cube) {
    auto all_int = [](const LinearTerm & t) {
        for (auto const & [v, c] : t.coeffs()) {
            if (v.sort != Sort::Int) { return false; }
        }
        return true;
    };
    std::vector<LinearTerm> eqs;
    for (auto const & a : cube.atoms) {
        if (!all_int(a.lhs())) { continue; }
        if (a.rel() == Rel::Eq) { eqs.push_back(a.lhs()); }
    }
    for (std::size_t i = 0; i < cube.atoms.size(); ++i) {
        for (std::size_t j = i + 1; j < cube.atoms.size(); ++j) {
            auto const & a = cube.atoms[i];
            auto const & b = cube.atoms[j];
            if (a.rel() == Rel::Le && b.rel() == Rel::Le && all_int(a.lhs()) && a.lhs() == -b.lhs()) {
                eqs.push_back(a.lhs());
            }
        }
    }
    std::map<Var, std::size_t> column;
    for (auto const & e : eqs) {
        for (auto const & [v, c] : e.coeffs()) { column.try_emplace(v, column.size()); }
    }
    // rows: coefficients followed by the constant, all integral
    std::vector<std::vector<Integer>> rows;
    for (auto const & e : eqs) {
        Integer scale = e.constant().get_den();
        for (auto const & [v, c] : e.coeffs()) { scale = lcm(scale, Integer(c.get_den())); }
        std::vector<Integer> row(column.size() + 1, 0);
        for (auto const & [v, c] : e.coeffs()) {
            Rational s = c * scale;
            row[column.at(v)] = s.get_num();
        }
        Rational k = e.constant() * scale;
        row.back() = k.get_num();
        rows.push_back(std::move(row));
    }
    std::size_t const ncols = column.size();
    std::vector<bool> dead(ncols, false);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        while (true) {
            std::optional<std::size_t> pivot;
            std::size_t nonzero = 0;
            for (std::size_t c = 0; c < ncols; ++c) {
                if (dead[c] || rows[r][c] == 0) { continue; }
                ++nonzero;
                if (!pivot || abs(rows[r][c]) < abs(rows[r][*pivot])) { pivot = c; }
            }
            if (!pivot) {
                if (rows[r].back() != 0) { return false; }
                break;
            }
            if (nonzero == 1) {
                Integer const g = rows[r][*pivot];
                Integer const k = rows[r].back();
                if (k % g != 0) { return false; }
                // g * x + k = 0 fixes x = -k / g in every row
                Integer const value = -k / g;
                for (auto & row : rows) {
                    row.back() += row[*pivot] * value;
                    row[*pivot] = 0;
                }
                dead[*pivot] = true;
                break;
            }
            for (std::size_t c = 0; c < ncols; ++c) {
                if (c == *pivot || dead[c] || rows[r][c] == 0) { continue; }
                Integer q = rows[r][c] / rows[r][*pivot];
                for (auto & row : rows) { row[c] -= q * row[*pivot]; }
            }
        }
    }
    return true;
}

} // namespace

CubeResult sat_cube(const Cube & cube, const LinearSolverOptions & options) {
    std::vector<LinearAtom> path;
    try {
        auto [model, proof] = BranchAndBound{cube, options}.run(path, 0);
        return CubeResult{std::move(model), std::move(proof)};
    } catch (UnknownResult const &) {
        if (!integer_equalities_solvable(cube)) {
            CubeResult r;
            r.proved = false;
            return r;
        }
        if (auto m = box_search(cube, options)) { return CubeResult{std::move(m), {}}; }
        throw;
    }
}

bool check_certificate(const std::vector<LinearAtom> & atoms, const FarkasCertificate & cert) {
    LinearTerm sum;
    bool strict = false;
    for (auto const & [i, m] : cert.multipliers) {
        if (i >= atoms.size() || m == 0) { return false; }
        auto const & a = atoms[i];
        if (a.rel() == Rel::Ne) { return false; }
        if (a.rel() != Rel::Eq && m < 0) { return false; }
        if (a.rel() == Rel::Lt) { strict = true; }
        sum += a.lhs() * m;
    }
    if (!sum.is_constant()) { return false; }
    if (strict != cert.strict) { return false; }
    return sum.constant() > 0 || (sum.constant() == 0 && strict);
}

bool check_proof(const Cube & cube, const UnsatProof & proof) {
    std::vector<LinearAtom> path;
    return check_proof_rec(cube, proof, path);
}

} // namespace hornitp
