#include "hornitp/solver.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

namespace hornitp {

namespace {

std::map<std::string, std::vector<std::size_t>> defining_clauses(const ClauseSet & hc) {
    std::map<std::string, std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < hc.size(); ++i) {
        auto const & h = hc.clauses()[i];
        if (h.head) { out[h.head->symbol].push_back(i); }
    }
    return out;
}

void require_recursion_free(const ClauseSet & hc) {
    if (auto cycle = dependence_graph(hc).find_cycle()) { throw RecursiveSystem(*cycle); }
}

std::unique_ptr<Interpolator> make_interpolator(const SolverOptions & options) {
    if (options.make_interpolator) { return options.make_interpolator(); }
    return std::make_unique<BuiltinInterpolator>(options.engine);
}

// Runs f(i, interpolator) for i < n on up to `jobs` threads. The exception of
// the lowest failing index is rethrown after all workers finish.
template <class F>
void parallel_for(std::size_t n, const SolverOptions & options, F f) {
    unsigned const jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(n)));
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        std::unique_ptr<Interpolator> itp;
        try {
            itp = make_interpolator(options);
        } catch (...) {
            for (std::size_t i = next++; i < n; i = next++) { errors[i] = std::current_exception(); }
            return;
        }
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                f(i, *itp);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) { pool.emplace_back(worker); }
        for (auto & t : pool) { t.join(); }
    }
    for (auto const & e : errors) {
        if (e) { std::rethrow_exception(e); }
    }
}

class Expander {
public:
    Expander(const ClauseSet & hc, std::size_t limit) : hc_(hc), limit_(limit), defining_(defining_clauses(hc)) {}

    std::vector<DerivationTree> from_clause(std::size_t ci) {
        std::vector<DerivationTree> partial{DerivationTree{ci, {}}};
        for (auto const & b : hc_.clauses()[ci].body) {
            auto const & subs = of_symbol(b.symbol);
            std::vector<DerivationTree> next;
            for (auto const & t : partial) {
                for (auto const & s : subs) {
                    charge(s.size());
                    next.push_back(t);
                    next.back().children.push_back(s);
                }
            }
            partial = std::move(next);
        }
        charge(partial.size());
        return partial;
    }

private:
    const std::vector<DerivationTree> & of_symbol(const std::string & p) {
        if (auto it = memo_.find(p); it != memo_.end()) { return it->second; }
        std::vector<DerivationTree> out;
        if (auto it = defining_.find(p); it != defining_.end()) {
            for (auto ci : it->second) {
                auto ts = from_clause(ci);
                out.insert(out.end(), std::make_move_iterator(ts.begin()), std::make_move_iterator(ts.end()));
            }
        }
        return memo_[p] = std::move(out);
    }

    void charge(std::size_t nodes) {
        nodes_ += nodes;
        if (nodes_ > limit_) { throw ExpansionLimitExceeded(limit_); }
    }

    const ClauseSet & hc_;
    std::size_t limit_;
    std::size_t nodes_ = 0;
    std::map<std::string, std::vector<std::size_t>> defining_;
    std::map<std::string, std::vector<DerivationTree>> memo_;
};

std::vector<LinearTerm> instantiate_node(const ClauseSet & hc, const DerivationTree & t, std::size_t & counter,
                                         std::vector<Constraint> & parts) {
    auto const & h = hc.clauses().at(t.clause);
    if (t.children.size() != h.body.size()) { throw Error("derivation does not match the body of its clause"); }
    std::string const tag = "!" + std::to_string(counter++);
    Substitution sigma;
    for (auto const & v : h.vars()) { sigma[v] = LinearTerm::variable(Var(v.name + tag, v.sort)); }
    parts.push_back(substitute(h.constraint, sigma));
    for (std::size_t i = 0; i < h.body.size(); ++i) {
        auto const & child = hc.clauses().at(t.children[i].clause);
        if (!child.head || child.head->symbol != h.body[i].symbol) {
            throw Error("derivation child does not define " + h.body[i].symbol);
        }
        auto args = instantiate_node(hc, t.children[i], counter, parts);
        for (std::size_t j = 0; j < args.size(); ++j) {
            parts.push_back(eq(h.body[i].args[j].substitute(sigma), args[j]));
        }
    }
    std::vector<LinearTerm> out;
    if (h.head) {
        for (auto const & a : h.head->args) { out.push_back(a.substitute(sigma)); }
    }
    return out;
}

std::optional<Counterexample> find_counterexample(const ClauseSet & hc, const SolverOptions & options) {
    for (auto & t : derivations(hc, options.expansion_limit)) {
        Constraint c = derivation_constraint(hc, t);
        if (auto r = sat(c, options.engine); r.sat()) { return Counterexample{std::move(t), c, *r.model}; }
    }
    return std::nullopt;
}

// The queries and the clauses defining symbols they depend on. Every other
// symbol can be true.
ClauseSet query_cone(const ClauseSet & hc) {
    auto const defining = defining_clauses(hc);
    std::set<std::string> reached;
    std::vector<std::string> todo;
    for (auto const & h : hc.clauses()) {
        if (!h.is_query()) { continue; }
        for (auto const & b : h.body) { todo.push_back(b.symbol); }
    }
    while (!todo.empty()) {
        auto p = todo.back();
        todo.pop_back();
        if (!reached.insert(p).second) { continue; }
        if (auto it = defining.find(p); it != defining.end()) {
            for (auto ci : it->second) {
                for (auto const & b : hc.clauses()[ci].body) { todo.push_back(b.symbol); }
            }
        }
    }
    ClauseSet out;
    for (auto const & [name, r] : hc.relations()) { out.declare(r); }
    for (auto const & h : hc.clauses()) {
        if (h.is_query() || reached.count(h.head->symbol)) { out.add(h, true); }
    }
    return out;
}

// Normalized clauses with the same head and the same body atoms become one
// clause with the disjunction of their constraints.
ClauseSet merge_equal_bodies(const ClauseSet & n) {
    using Key = std::pair<std::optional<RelationAtom>, std::vector<RelationAtom>>;
    std::map<std::string, std::vector<std::size_t>> by_text;
    std::vector<HornClause> merged;
    std::vector<Key> keys;
    for (auto const & h : n.clauses()) {
        Key k{h.head, h.body};
        std::string text = h.head ? to_string(*h.head) : "false";
        for (auto const & b : h.body) { text += " " + to_string(b); }
        auto & slots = by_text[text];
        auto it = std::find_if(slots.begin(), slots.end(), [&](std::size_t i) { return keys[i] == k; });
        if (it == slots.end()) {
            slots.push_back(merged.size());
            merged.push_back(h);
            keys.push_back(std::move(k));
        } else {
            merged[*it].constraint = disj({merged[*it].constraint, h.constraint});
        }
    }
    ClauseSet out;
    for (auto const & [name, r] : n.relations()) { out.declare(r); }
    for (auto & h : merged) { out.add(std::move(h), true); }
    return out;
}

// Strictly body-disjoint pieces solved as trees; nullopt when some piece is
// not solvable.
std::optional<Solution> solve_subsets(const ClauseSet & hc, const SolverOptions & options) {
    require_recursion_free(hc);
    NormalizedClauseSet n = normalize(query_cone(hc));
    n.clauses = merge_equal_bodies(n.clauses);
    auto const subsets = head_choice_subsets(n.clauses, options.subset_limit);
    for (auto const & t : subsets) {
        if (!strictly_body_disjoint(n.clauses, t)) {
            throw NotBodyDisjoint("a head choice uses some relation symbol twice");
        }
    }

    std::vector<std::map<std::string, Constraint>> partial(subsets.size());
    std::atomic<bool> unsolvable{false};
    parallel_for(subsets.size(), options, [&](std::size_t i, Interpolator & itp) {
        if (unsolvable) { return; }
        NormalizedClauseSet piece{subset(n.clauses, subsets[i]), n.arg_vectors, {}};
        try {
            for (auto const & enc : tree_problem_from_treelike(piece)) {
                auto ti = tree_interpolate(enc.problem, itp);
                if (options.on_tree) { options.on_tree(enc.problem, ti); }
                for (auto const & [node, c] : ti.labels) {
                    if (node != enc.false_node) { partial[i][node] = c; }
                }
            }
        } catch (const NotUnsat &) {
            unsolvable = true;
        }
    });
    if (unsolvable) { return std::nullopt; }

    // Per symbol: conjoin over subsets that agree on the choices inside the
    // symbol's cone, disjoin over the distinct cones.
    using ConeKey = std::map<std::string, std::size_t>;
    std::map<std::string, std::map<ConeKey, std::vector<Constraint>>> groups;
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        std::map<std::string, std::size_t> choice;
        for (auto ci : subsets[i]) {
            auto const & h = n.clauses.clauses()[ci];
            if (h.head) { choice[h.head->symbol] = ci; }
        }
        for (auto const & [p, c] : partial[i]) {
            ConeKey key;
            std::vector<std::string> todo{p};
            while (!todo.empty()) {
                auto s = todo.back();
                todo.pop_back();
                auto it = choice.find(s);
                if (it == choice.end() || key.count(s)) { continue; }
                key[s] = it->second;
                for (auto const & b : n.clauses.clauses()[it->second].body) { todo.push_back(b.symbol); }
            }
            groups[p][key].push_back(c);
        }
    }
    Solution sol;
    for (auto const & [p, r] : hc.relations()) {
        std::vector<Constraint> alts;
        if (auto it = groups.find(p); it != groups.end()) {
            for (auto const & [key, cs] : it->second) { alts.push_back(conj(cs)); }
        } else {
            alts.push_back(Constraint::truth(true));
        }
        sol.defs[p] = Definition{n.arg_vectors.at(p), disj(std::move(alts))};
    }
    return sol;
}

void verify_gate(const Solution & sol, const ClauseSet & hc, const EngineOptions & engine) {
    auto v = verify_solution(sol, hc, engine);
    if (!v.valid) {
        throw VerificationFailed("internal error: computed solution violates clause " +
                                 std::to_string(hc.clauses()[*v.clause].id));
    }
}

std::optional<Solution> solve_via_transform(const ClauseSet & hc, const SolverOptions & options) {
    auto t = body_disjoint_transform(hc, options.expansion_limit);
    auto sol = solve_subsets(t.clauses, options);
    if (!sol) { return std::nullopt; }
    return map_back(t, hc, *sol);
}

Solution labels_to_solution(const ClauseSet & comp, const std::map<std::string, std::vector<Var>> & arg_vectors,
                            const Labeling & labels) {
    Solution sol;
    for (auto const & [p, r] : comp.relations()) {
        auto it = labels.find(p);
        sol.defs[p] = Definition{arg_vectors.at(p), it == labels.end() ? Constraint::truth(true) : it->second};
    }
    return sol;
}

// nullopt when the component has no solution.
std::optional<Solution> solve_component(const ClauseSet & full, const SolverOptions & options, Interpolator & itp) {
    NormalizedClauseSet n = normalize(query_cone(full));
    n.clauses = merge_equal_bodies(n.clauses);
    ClauseSet const & comp = n.clauses;
    FragmentReport const r = classify(comp);
    try {
        if (r.linear_tree_like || r.tree_like || r.linear) {
            Labeling labels;
            if (r.linear_tree_like) {
                for (auto const & enc : sequence_from_linear_treelike(n)) {
                    auto is = sequence_interpolants(enc.problem, itp);
                    for (std::size_t i = 0; i < enc.symbols.size(); ++i) {
                        if (!enc.symbols[i].empty()) { labels[enc.symbols[i]] = is[i]; }
                    }
                }
            } else if (r.tree_like) {
                for (auto const & enc : tree_problem_from_treelike(n)) {
                    auto ti = tree_interpolate(enc.problem, itp);
                    if (options.on_tree) { options.on_tree(enc.problem, ti); }
                    labels.insert(ti.labels.begin(), ti.labels.end());
                }
            } else {
                NormalizedClauseSet const merged{merge_linear_duplicates(n.clauses), n.arg_vectors, {}};
                for (auto const & enc : dag_problem_from_linear(merged)) {
                    auto is = dag_interpolate(enc.problem, itp, options.path_limit);
                    labels.insert(is.begin(), is.end());
                }
            }
            return labels_to_solution(full, n.arg_vectors, labels);
        }
        if (r.body_disjoint) {
            auto sol = solve_subsets(comp, options);
            if (!sol || verify_solution(*sol, comp, options.engine).valid) { return sol; }
        }
        return solve_via_transform(comp, options);
    } catch (const NotUnsat &) {
        return std::nullopt;
    }
}

} // namespace

std::size_t DerivationTree::size() const {
    std::size_t n = 1;
    for (auto const & c : children) { n += c.size(); }
    return n;
}

Constraint derivation_constraint(const ClauseSet & hc, const DerivationTree & t) {
    std::vector<Constraint> parts;
    std::size_t counter = 0;
    instantiate_node(hc, t, counter, parts);
    return conj(std::move(parts));
}

std::vector<DerivationTree> derivations(const ClauseSet & hc, std::size_t node_limit) {
    require_recursion_free(hc);
    Expander ex(hc, node_limit);
    std::vector<DerivationTree> out;
    for (std::size_t i = 0; i < hc.size(); ++i) {
        if (!hc.clauses()[i].is_query()) { continue; }
        auto ts = ex.from_clause(i);
        out.insert(out.end(), std::make_move_iterator(ts.begin()), std::make_move_iterator(ts.end()));
    }
    return out;
}

Constraint expand(const ClauseSet & hc, std::size_t node_limit) {
    std::vector<Constraint> alts;
    for (auto const & t : derivations(hc, node_limit)) { alts.push_back(derivation_constraint(hc, t)); }
    return disj(std::move(alts));
}

std::string to_sexpr(const DerivationTree & t, const ClauseSet & hc) {
    std::string s = "(clause " + std::to_string(hc.clauses().at(t.clause).id);
    for (auto const & c : t.children) { s += " " + to_sexpr(c, hc); }
    return s + ")";
}

TreeInterpolation tree_interpolate(const TreeProblem & tp, Interpolator & itp) {
    tp.validate();
    std::vector<Constraint> all;
    for (auto const & v : tp.nodes) { all.push_back(tp.labels.at(v)); }
    if (auto r = sat(conj(all), itp.options()); r.sat()) {
        throw NotUnsat(*r.model, "the tree problem is satisfiable");
    }

    auto const order = tp.bottom_up();
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i) { pos[order[i]] = i; }
    std::map<std::string, std::size_t> parent_pos;
    for (auto const & [v, ws] : tp.children) {
        for (auto const & w : ws) { parent_pos[w] = pos.at(v); }
    }
    auto parent_after = [&](const std::string & w, std::size_t i) {
        auto it = parent_pos.find(w);
        return it == parent_pos.end() || it->second > i;
    };

    TreeInterpolation out;
    for (std::size_t i = 0; i < order.size(); ++i) {
        auto const & v = order[i];
        std::vector<Constraint> a{tp.labels.at(v)};
        if (auto it = tp.children.find(v); it != tp.children.end()) {
            for (auto const & w : it->second) { a.push_back(out.labels.at(w)); }
        }
        std::vector<Constraint> b, frontier;
        for (std::size_t k = 0; k < i; ++k) {
            if (parent_after(order[k], i)) { b.push_back(out.labels.at(order[k])); }
        }
        for (std::size_t k = i + 1; k < order.size(); ++k) {
            b.push_back(tp.labels.at(order[k]));
        }
        TreeStep step;
        step.index = i + 1;
        step.node = v;
        step.a = conj(a);
        step.b = conj(b);
        step.interpolant = itp.interpolate(step.a, step.b);
        out.labels[v] = step.interpolant;
        for (std::size_t k = 0; k <= i; ++k) {
            if (parent_after(order[k], i)) { frontier.push_back(out.labels.at(order[k])); }
        }
        for (std::size_t k = i + 1; k < order.size(); ++k) { frontier.push_back(tp.labels.at(order[k])); }
        step.frontier = conj(frontier);
        out.trace.push_back(std::move(step));
    }
    return out;
}

std::vector<Constraint> sequence_interpolants(const SequenceProblem & sp, Interpolator & itp) {
    std::size_t const n = sp.parts.size();
    if (n == 0) { throw Error("sequence problem without parts"); }
    TreeProblem tp;
    for (std::size_t i = 0; i <= n; ++i) {
        auto name = std::to_string(i);
        tp.nodes.push_back(name);
        tp.labels[name] = i == 0 ? Constraint::truth(true) : sp.parts[i - 1];
        if (i > 0) { tp.children[name] = {std::to_string(i - 1)}; }
    }
    tp.root = std::to_string(n);
    auto ti = tree_interpolate(tp, itp);
    std::vector<Constraint> out;
    for (std::size_t i = 0; i <= n; ++i) { out.push_back(ti.labels.at(std::to_string(i))); }
    return out;
}

Labeling dag_interpolate(const DagProblem & dp, Interpolator & itp, std::size_t path_limit) {
    dp.validate();
    auto const order = dp.topological_order();
    std::map<std::string, std::vector<const DagEdge *>> in, out;
    for (auto const & e : dp.edges) {
        out[e.from].push_back(&e);
        in[e.to].push_back(&e);
    }

    // fail[v]: the ways to reach a violated node label or the exit from v,
    // starting with v's own label; paths[v] counts them.
    std::map<std::string, Constraint> fail;
    std::map<std::string, std::size_t> paths;
    auto saturating_add = [](std::size_t a, std::size_t b) { return a > SIZE_MAX - b ? SIZE_MAX : a + b; };
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        auto const & v = *it;
        if (v == dp.exit) { continue; }
        std::vector<Constraint> alts;
        std::size_t count = 0;
        for (auto const * e : out[v]) {
            if (e->to == dp.exit) {
                alts.push_back(e->label);
                count = saturating_add(count, 1);
                continue;
            }
            Constraint const lw = dp.node_label(e->to);
            alts.push_back(conj({e->label, disj({negate(lw), fail.at(e->to)})}));
            count = saturating_add(count, saturating_add(lw.is_true() ? 0 : 1, paths.at(e->to)));
        }
        fail[v] = conj({dp.node_label(v), disj(std::move(alts))});
        paths[v] = count;
    }

    if (paths.at(dp.entry) > path_limit) { throw PathLimitExceeded(path_limit); }
    if (auto r = sat(fail.at(dp.entry), itp.options()); r.sat()) {
        throw NotUnsat(*r.model, "a path from entry to exit is feasible");
    }

    Labeling is;
    is[dp.entry] = Constraint::truth(true);
    is[dp.exit] = Constraint::truth(false);
    for (auto const & v : order) {
        if (v == dp.entry || v == dp.exit) { continue; }
        if (paths.at(v) > path_limit) { throw PathLimitExceeded(path_limit); }
        VarSet in_vars, out_vars;
        std::vector<Constraint> alts;
        for (auto const * e : in[v]) {
            auto vs = e->vars();
            in_vars.insert(vs.begin(), vs.end());
            alts.push_back(conj({is.at(e->from), dp.node_label(e->from), e->label}));
        }
        for (auto const * e : out[v]) {
            auto vs = e->vars();
            out_vars.insert(vs.begin(), vs.end());
        }
        Constraint a = disj(std::move(alts));
        Constraint b = fail.at(v);
        std::map<Var, Var> ra, rb;
        for (auto const & x : free_vars(a)) {
            if (!in_vars.count(x)) { ra[x] = Var(x.name + "%in", x.sort); }
        }
        for (auto const & x : free_vars(b)) {
            if (!out_vars.count(x)) { rb[x] = Var(x.name + "%out", x.sort); }
        }
        try {
            is[v] = itp.interpolate(rename(a, ra), rename(b, rb));
        } catch (const NotUnsat & e) {
            throw NotUnsat(e.model(), "no interpolant at node " + v + " respects the variable condition");
        }
    }
    return is;
}

SolveResult solve_body_disjoint(const ClauseSet & hc, const SolverOptions & options) {
    if (!classify(hc).body_disjoint) { throw NotBodyDisjoint("the clause set is not body-disjoint"); }
    std::optional<Solution> sol;
    try {
        sol = solve_subsets(hc, options);
        if (sol && !verify_solution(*sol, hc, options.engine).valid) { sol = solve_via_transform(hc, options); }
    } catch (const NotUnsat &) {
    }
    if (!sol) {
        auto cex = find_counterexample(hc, options);
        if (!cex) { throw Error("internal error: no feasible derivation found for an unsolvable clause set"); }
        return SolveResult{std::move(*cex)};
    }
    verify_gate(*sol, hc, options.engine);
    return SolveResult{std::move(*sol)};
}

BodyDisjointTransform body_disjoint_transform(const ClauseSet & hc, std::size_t clause_limit) {
    require_recursion_free(hc);
    BodyDisjointTransform t;
    for (auto const & [name, r] : hc.relations()) { t.clauses.declare(r); }
    auto const defining = defining_clauses(hc);
    std::set<std::string> used_names;
    for (auto const & [name, r] : hc.relations()) { used_names.insert(name); }
    std::set<std::string> in_bodies;
    for (auto const & h : hc.clauses()) {
        for (auto const & b : h.body) { in_bodies.insert(b.symbol); }
    }

    std::map<std::string, std::size_t> uses;
    std::vector<std::pair<std::string, std::string>> queue;  // (name, original)
    auto use = [&](const std::string & p) {
        if (uses[p]++ == 0) {
            queue.emplace_back(p, p);
            return p;
        }
        std::string name;
        for (std::size_t k = uses[p] - 1;; ++k) {
            name = p + "$" + std::to_string(k);
            if (!used_names.count(name)) { break; }
        }
        used_names.insert(name);
        RelationSymbol r = hc.relation(p);
        r.name = name;
        t.clauses.declare(r);
        t.copy_of[name] = p;
        queue.emplace_back(name, p);
        return name;
    };
    auto emit = [&](const HornClause & h, const std::optional<std::string> & head_name) {
        HornClause c = h;
        if (c.head && head_name) { c.head->symbol = *head_name; }
        for (auto & b : c.body) { b.symbol = use(b.symbol); }
        t.clauses.add(std::move(c));
        if (t.clauses.size() > clause_limit) { throw ExpansionLimitExceeded(clause_limit); }
    };

    for (auto const & h : hc.clauses()) {
        if (h.is_query() || !in_bodies.count(h.head->symbol)) { emit(h, std::nullopt); }
    }
    for (std::size_t i = 0; i < queue.size(); ++i) {
        auto [name, p] = queue[i];
        if (auto it = defining.find(p); it != defining.end()) {
            for (auto ci : it->second) { emit(hc.clauses()[ci], name); }
        }
    }
    return t;
}

Solution map_back(const BodyDisjointTransform & t, const ClauseSet & original, const Solution & sol) {
    std::map<std::string, std::vector<std::string>> names;
    for (auto const & [p, r] : original.relations()) {
        if (sol.contains(p)) { names[p].push_back(p); }
    }
    for (auto const & [copy, p] : t.copy_of) {
        if (sol.contains(copy)) { names[p].push_back(copy); }
    }
    Solution out;
    for (auto const & [p, r] : original.relations()) {
        auto params = arg_vector(r);
        std::vector<LinearTerm> args;
        for (auto const & x : params) { args.push_back(LinearTerm::variable(x)); }
        std::vector<Constraint> parts;
        for (auto const & name : names[p]) { parts.push_back(sol.at(name).apply(args)); }
        out.defs[p] = Definition{params, conj(std::move(parts))};
    }
    return out;
}

SolveResult solve(const ClauseSet & hc, const SolverOptions & options) {
    require_recursion_free(hc);
    auto const comps = connected_components(hc);

    std::vector<std::optional<Solution>> parts(comps.size());
    SolverOptions inner = options;
    if (comps.size() > 1) { inner.jobs = 1; }
    parallel_for(comps.size(), options, [&](std::size_t i, Interpolator & itp) {
        parts[i] = solve_component(comps[i], inner, itp);
    });

    std::map<std::size_t, std::size_t> index_of_id;
    for (std::size_t i = 0; i < hc.size(); ++i) { index_of_id[hc.clauses()[i].id] = i; }
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (parts[i]) { continue; }
        auto cex = find_counterexample(comps[i], options);
        if (!cex) { throw Error("internal error: no feasible derivation found for an unsolvable component"); }
        std::function<void(DerivationTree &)> reindex = [&](DerivationTree & t) {
            t.clause = index_of_id.at(comps[i].clauses()[t.clause].id);
            for (auto & c : t.children) { reindex(c); }
        };
        reindex(cex->derivation);
        cex->constraint = derivation_constraint(hc, cex->derivation);
        if (!evaluate(cex->constraint, cex->model)) {
            throw Error("internal error: counterexample model does not satisfy its derivation");
        }
        return SolveResult{std::move(*cex)};
    }

    Solution sol;
    for (auto const & p : parts) { sol.defs.insert(p->defs.begin(), p->defs.end()); }
    for (auto const & [name, r] : hc.relations()) {
        if (!sol.contains(name)) { sol.defs[name] = Definition{arg_vector(r), Constraint::truth(true)}; }
    }
    verify_gate(sol, hc, options.engine);
    return SolveResult{std::move(sol)};
}

} // namespace hornitp
