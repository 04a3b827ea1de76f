#include "hornitp/encodings.h"

#include "hornitp/chc.h"
#include "hornitp/sexpr.h"

#include <algorithm>
#include <functional>
#include <sstream>

namespace hornitp {

namespace {

std::vector<Var> sorted(const VarSet & s) { return {s.begin(), s.end()}; }

VarSet intersect(const VarSet & a, const VarSet & b) {
    VarSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

bool subset_of(const VarSet & a, const VarSet & b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

RelationAtom atom_over(const std::string & symbol, const std::vector<Var> & xs) {
    RelationAtom a{symbol, {}};
    for (auto const & x : xs) { a.args.push_back(LinearTerm::variable(x)); }
    return a;
}

RelationSymbol symbol_over(const std::string & symbol, const std::vector<Var> & xs) {
    RelationSymbol r{symbol, {}};
    for (auto const & x : xs) { r.arg_sorts.push_back(x.sort); }
    return r;
}

bool unsat(const Constraint & c, const EngineOptions & options) { return !sat(c, options).sat(); }

std::string show_vars(const VarSet & vs) {
    std::string out;
    for (auto const & v : vs) { out += (out.empty() ? "" : " ") + v.name; }
    return "{" + out + "}";
}

// A name not used by any relation of hc.
std::string fresh_node(const ClauseSet & hc, std::string base) {
    while (hc.has_relation(base)) { base += "'"; }
    return base;
}

void require_recursion_free(const ClauseSet & hc) {
    if (auto c = dependence_graph(hc).find_cycle()) { throw RecursiveSystem(*c); }
}

} // namespace

std::vector<Var> SequenceProblem::shared_vars(std::size_t i) const {
    VarSet before, after;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        auto fv = free_vars(parts[k]);
        (k < i ? before : after).insert(fv.begin(), fv.end());
    }
    return sorted(intersect(before, after));
}

void TreeProblem::validate() const {
    std::set<std::string> known(nodes.begin(), nodes.end());
    if (known.size() != nodes.size()) { throw Error("tree problem: duplicate node"); }
    if (!known.count(root)) { throw Error("tree problem: root " + root + " is not a node"); }
    std::map<std::string, int> parents;
    for (auto const & [v, ws] : children) {
        if (!known.count(v)) { throw Error("tree problem: unknown node " + v); }
        for (auto const & w : ws) {
            if (!known.count(w)) { throw Error("tree problem: unknown node " + w); }
            parents[w]++;
        }
    }
    for (auto const & v : nodes) {
        if (!labels.count(v)) { throw Error("tree problem: node " + v + " has no label"); }
        int expected = v == root ? 0 : 1;
        if (parents[v] != expected) { throw Error("tree problem: node " + v + " has the wrong number of parents"); }
    }
    if (subtree(root).size() != nodes.size()) { throw Error("tree problem: not every node is below the root"); }
}

std::set<std::string> TreeProblem::subtree(const std::string & v) const {
    std::set<std::string> out;
    std::vector<std::string> todo{v};
    while (!todo.empty()) {
        auto u = todo.back();
        todo.pop_back();
        if (!out.insert(u).second) { continue; }
        if (auto it = children.find(u); it != children.end()) { todo.insert(todo.end(), it->second.begin(), it->second.end()); }
    }
    return out;
}

std::vector<std::string> TreeProblem::bottom_up() const {
    std::vector<std::string> order;
    std::function<void(const std::string &)> visit = [&](const std::string & v) {
        if (auto it = children.find(v); it != children.end()) {
            for (auto const & w : it->second) { visit(w); }
        }
        order.push_back(v);
    };
    visit(root);
    return order;
}

std::vector<Var> TreeProblem::shared_vars(const std::string & v) const {
    auto inside = subtree(v);
    VarSet in, out;
    for (auto const & u : nodes) {
        auto fv = free_vars(labels.at(u));
        (inside.count(u) ? in : out).insert(fv.begin(), fv.end());
    }
    return sorted(intersect(in, out));
}

VarSet DagEdge::vars() const {
    VarSet out = free_vars(label);
    out.insert(anchors.begin(), anchors.end());
    return out;
}

Constraint DagProblem::node_label(const std::string & v) const {
    auto it = node_labels.find(v);
    return it == node_labels.end() ? Constraint::truth(true) : it->second;
}

std::vector<std::string> DagProblem::topological_order() const {
    std::map<std::string, int> indegree;
    std::map<std::string, std::vector<std::string>> succ;
    for (auto const & v : nodes) { indegree[v]; }
    for (auto const & e : edges) {
        indegree[e.to]++;
        succ[e.from].push_back(e.to);
    }
    std::vector<std::string> order, ready;
    for (auto const & v : nodes) {
        if (indegree[v] == 0) { ready.push_back(v); }
    }
    while (!ready.empty()) {
        auto v = ready.front();
        ready.erase(ready.begin());
        order.push_back(v);
        for (auto const & w : succ[v]) {
            if (--indegree[w] == 0) { ready.push_back(w); }
        }
    }
    if (order.size() != nodes.size()) { throw Error("dag problem: the edges contain a cycle"); }
    return order;
}

void DagProblem::validate() const {
    std::set<std::string> known(nodes.begin(), nodes.end());
    if (known.size() != nodes.size()) { throw Error("dag problem: duplicate node"); }
    if (!known.count(entry) || !known.count(exit)) { throw Error("dag problem: entry and exit must be nodes"); }
    std::map<std::string, std::set<std::string>> adjacent;
    for (auto const & e : edges) {
        if (!known.count(e.from) || !known.count(e.to)) { throw Error("dag problem: edge with unknown endpoint"); }
        if (e.to == entry) { throw Error("dag problem: edge into the entry node"); }
        if (e.from == exit) { throw Error("dag problem: edge out of the exit node"); }
        adjacent[e.from].insert(e.to);
        adjacent[e.to].insert(e.from);
    }
    for (auto const & [v, c] : node_labels) {
        if (!known.count(v)) { throw Error("dag problem: label for unknown node " + v); }
    }
    topological_order();
    // A component without facts or queries leaves entry or exit isolated.
    std::set<std::string> seen;
    std::vector<std::string> todo;
    for (auto const & v : nodes) {
        if (!adjacent[v].empty()) {
            todo.push_back(v);
            break;
        }
    }
    if (todo.empty()) { return; }
    if (adjacent[entry].empty()) { seen.insert(entry); }
    if (adjacent[exit].empty()) { seen.insert(exit); }
    while (!todo.empty()) {
        auto v = todo.back();
        todo.pop_back();
        if (!seen.insert(v).second) { continue; }
        todo.insert(todo.end(), adjacent[v].begin(), adjacent[v].end());
    }
    if (seen.size() != nodes.size()) { throw Error("dag problem: not connected"); }
}

std::vector<Var> DagProblem::allowed_vars(const std::string & v) const {
    VarSet in, out;
    for (auto const & e : edges) {
        if (e.to == v) {
            auto vs = e.vars();
            in.insert(vs.begin(), vs.end());
        }
        if (e.from == v) {
            auto vs = e.vars();
            out.insert(vs.begin(), vs.end());
        }
    }
    return sorted(intersect(in, out));
}

std::string sequence_symbol(std::size_t i) { return "p" + std::to_string(i); }
std::string node_symbol(const std::string & node) { return "p_" + node; }

ClauseSet binary_to_horn(const BinaryProblem & bp) {
    auto xs = sorted(intersect(free_vars(bp.a), free_vars(bp.b)));
    ClauseSet hc;
    hc.declare(symbol_over("p", xs));
    hc.add({0, bp.a, {}, atom_over("p", xs)});
    hc.add({0, bp.b, {atom_over("p", xs)}, std::nullopt});
    return hc;
}

ClauseSet sequence_to_horn(const SequenceProblem & sp) {
    if (sp.parts.empty()) { throw Error("sequence problem without parts"); }
    std::size_t const n = sp.parts.size();
    std::vector<std::vector<Var>> xs;
    ClauseSet hc;
    for (std::size_t i = 0; i <= n; ++i) {
        xs.push_back(sp.shared_vars(i));
        hc.declare(symbol_over(sequence_symbol(i), xs[i]));
    }
    hc.add({0, Constraint::truth(true), {}, atom_over(sequence_symbol(0), xs[0])});
    for (std::size_t i = 1; i <= n; ++i) {
        hc.add({0, sp.parts[i - 1], {atom_over(sequence_symbol(i - 1), xs[i - 1])}, atom_over(sequence_symbol(i), xs[i])});
    }
    hc.add({0, Constraint::truth(true), {atom_over(sequence_symbol(n), xs[n])}, std::nullopt});
    return hc;
}

ClauseSet tree_problem_to_horn(const TreeProblem & tp) {
    tp.validate();
    std::map<std::string, std::vector<Var>> xs;
    ClauseSet hc;
    for (auto const & v : tp.nodes) {
        xs[v] = tp.shared_vars(v);
        hc.declare(symbol_over(node_symbol(v), xs[v]));
    }
    for (auto const & v : tp.nodes) {
        HornClause h{0, tp.labels.at(v), {}, atom_over(node_symbol(v), xs[v])};
        if (auto it = tp.children.find(v); it != tp.children.end()) {
            for (auto const & w : it->second) { h.body.push_back(atom_over(node_symbol(w), xs[w])); }
        }
        hc.add(std::move(h));
    }
    hc.add({0, Constraint::truth(true), {atom_over(node_symbol(tp.root), xs[tp.root])}, std::nullopt});
    return hc;
}

ClauseSet dag_problem_to_horn(const DagProblem & dp) {
    dp.validate();
    std::map<std::string, std::vector<Var>> xs;
    ClauseSet hc;
    for (auto const & v : dp.nodes) {
        xs[v] = dp.allowed_vars(v);
        hc.declare(symbol_over(node_symbol(v), xs[v]));
    }
    for (auto const & e : dp.edges) {
        auto from = atom_over(node_symbol(e.from), xs[e.from]);
        hc.add({0, conj({dp.node_label(e.from), e.label}), {from}, atom_over(node_symbol(e.to), xs[e.to])});
        Constraint guard = conj({dp.node_label(e.from), negate(dp.node_label(e.to)), e.label});
        if (guard.kind() != Constraint::Kind::False) { hc.add({0, guard, {from}, std::nullopt}); }
    }
    hc.add({0, Constraint::truth(true), {}, atom_over(node_symbol(dp.entry), xs[dp.entry])});
    hc.add({0, Constraint::truth(true), {atom_over(node_symbol(dp.exit), xs[dp.exit])}, std::nullopt});
    return hc;
}

ClauseSet problem_to_horn(const Problem & p) {
    return std::visit(
        [](auto const & q) -> ClauseSet {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, BinaryProblem>) {
                return binary_to_horn(q);
            } else if constexpr (std::is_same_v<T, SequenceProblem>) {
                return sequence_to_horn(q);
            } else if constexpr (std::is_same_v<T, TreeProblem>) {
                return tree_problem_to_horn(q);
            } else {
                return dag_problem_to_horn(q);
            }
        },
        p);
}

namespace {

struct ComponentIndex {
    std::map<std::string, std::vector<const HornClause *>> defining;
    std::map<std::string, std::vector<const HornClause *>> using_;
    std::set<std::string> symbols;

    explicit ComponentIndex(const ClauseSet & comp) {
        for (auto const & h : comp.clauses()) {
            if (h.head) {
                defining[h.head->symbol].push_back(&h);
                symbols.insert(h.head->symbol);
            }
            for (auto const & b : h.body) {
                using_[b.symbol].push_back(&h);
                symbols.insert(b.symbol);
            }
        }
    }

    // The clause no other clause builds on: a query, or a head nobody uses.
    const HornClause & root() const {
        const HornClause * found = nullptr;
        for (auto const & [p, cs] : defining) {
            (void)p;
            for (auto const * h : cs) {
                if (!using_.count(h->head->symbol)) { found = h; }
            }
        }
        for (auto const & [p, cs] : using_) {
            (void)p;
            for (auto const * h : cs) {
                if (!h->head) { found = h; }
            }
        }
        if (!found) { throw WrongFragment("component without a root clause"); }
        return *found;
    }
};

} // namespace

std::vector<SequenceEncoding> sequence_from_linear_treelike(const NormalizedClauseSet & n) {
    require_recursion_free(n.clauses);
    if (!classify(n.clauses).linear_tree_like) { throw WrongFragment("sequence encoding needs linear tree-like clauses"); }
    std::vector<SequenceEncoding> out;
    for (auto const & comp : connected_components(n.clauses)) {
        SequenceEncoding enc;
        if (comp.size() == 1 && comp.clauses()[0].body.empty() && !comp.clauses()[0].head) {
            enc.problem.parts = {comp.clauses()[0].constraint};
            enc.symbols = {"", ""};
            out.push_back(std::move(enc));
            continue;
        }
        ComponentIndex idx(comp);
        // top-down chain of clauses
        std::vector<const HornClause *> chain{&idx.root()};
        std::optional<std::string> undefined;
        while (!chain.back()->body.empty()) {
            auto const & q = chain.back()->body[0].symbol;
            auto it = idx.defining.find(q);
            if (it == idx.defining.end()) {
                undefined = q;
                break;
            }
            chain.push_back(it->second[0]);
        }
        enc.symbols.push_back("");
        if (undefined) {
            enc.problem.parts.push_back(Constraint::truth(false));
            enc.symbols.push_back(*undefined);
        }
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            enc.problem.parts.push_back((*it)->constraint);
            if ((*it)->head) { enc.symbols.push_back((*it)->head->symbol); }
        }
        if (chain.front()->head) { enc.problem.parts.push_back(Constraint::truth(false)); }
        enc.symbols.push_back("");
        out.push_back(std::move(enc));
    }
    return out;
}

std::vector<TreeEncoding> tree_problem_from_treelike(const NormalizedClauseSet & n) {
    require_recursion_free(n.clauses);
    if (!classify(n.clauses).tree_like) { throw WrongFragment("tree encoding needs tree-like clauses"); }
    std::string const false_node = fresh_node(n.clauses, "false");
    std::vector<TreeEncoding> out;
    for (auto const & comp : connected_components(n.clauses)) {
        TreeEncoding enc;
        enc.false_node = false_node;
        TreeProblem & tp = enc.problem;
        tp.root = false_node;
        tp.nodes.push_back(false_node);
        ComponentIndex idx(comp);
        tp.nodes.insert(tp.nodes.end(), idx.symbols.begin(), idx.symbols.end());
        for (auto const & p : idx.symbols) { tp.labels[p] = Constraint::truth(false); }
        auto body_symbols = [](const HornClause & h) {
            std::vector<std::string> out;
            for (auto const & b : h.body) { out.push_back(b.symbol); }
            return out;
        };
        HornClause const & root = idx.symbols.empty() ? comp.clauses()[0] : idx.root();
        if (root.head) {
            tp.labels[false_node] = Constraint::truth(false);
            tp.children[false_node] = {root.head->symbol};
        } else {
            tp.labels[false_node] = root.constraint;
            tp.children[false_node] = body_symbols(root);
        }
        for (auto const & [p, cs] : idx.defining) {
            tp.labels[p] = cs[0]->constraint;
            tp.children[p] = body_symbols(*cs[0]);
        }
        tp.validate();
        out.push_back(std::move(enc));
    }
    return out;
}

std::vector<DagEncoding> dag_problem_from_linear(const NormalizedClauseSet & n) {
    require_recursion_free(n.clauses);
    if (!classify(n.clauses).linear) { throw NotLinear("DAG encoding needs linear clauses"); }
    std::string const en = fresh_node(n.clauses, "en");
    std::string const ex = fresh_node(n.clauses, "ex");
    auto anchors = [&](const std::string & p) {
        auto const & xs = n.arg_vectors.at(p);
        return VarSet(xs.begin(), xs.end());
    };
    std::vector<DagEncoding> out;
    for (auto const & comp : connected_components(n.clauses)) {
        DagEncoding enc;
        DagProblem & dp = enc.problem;
        dp.entry = en;
        dp.exit = ex;
        ComponentIndex idx(comp);
        dp.nodes.push_back(en);
        dp.nodes.insert(dp.nodes.end(), idx.symbols.begin(), idx.symbols.end());
        dp.nodes.push_back(ex);
        std::set<std::pair<std::string, std::string>> seen;
        for (auto const & h : comp.clauses()) {
            DagEdge e{h.body.empty() ? en : h.body[0].symbol, h.head ? h.head->symbol : ex, h.constraint, {}};
            if (!h.body.empty()) { e.anchors = anchors(e.from); }
            if (h.head) {
                auto xs = anchors(e.to);
                e.anchors.insert(xs.begin(), xs.end());
            }
            if (!seen.emplace(e.from, e.to).second) {
                throw WrongFragment("DAG encoding expects clauses with equal symbols to be merged");
            }
            dp.edges.push_back(std::move(e));
        }
        dp.validate();
        out.push_back(std::move(enc));
    }
    return out;
}

std::optional<std::string> check_sequence_interpolants(const SequenceProblem & sp, const std::vector<Constraint> & is,
                                                       const EngineOptions & options) {
    std::size_t const n = sp.parts.size();
    if (is.size() != n + 1) { return "expected " + std::to_string(n + 1) + " interpolants"; }
    if (!entails({}, is[0], options)) { return "I_0 is not true"; }
    if (!unsat(is[n], options)) { return "I_n is not false"; }
    for (std::size_t i = 1; i <= n; ++i) {
        if (!entails({is[i - 1], sp.parts[i - 1]}, is[i], options)) {
            return "I_" + std::to_string(i - 1) + " & T_" + std::to_string(i) + " does not entail I_" + std::to_string(i);
        }
    }
    for (std::size_t i = 0; i <= n; ++i) {
        auto allowed = sp.shared_vars(i);
        if (!subset_of(free_vars(is[i]), VarSet(allowed.begin(), allowed.end()))) {
            return "I_" + std::to_string(i) + " mentions variables outside " + show_vars({allowed.begin(), allowed.end()});
        }
    }
    return std::nullopt;
}

std::optional<std::string> check_tree_interpolant(const TreeProblem & tp, const Labeling & is,
                                                  const EngineOptions & options) {
    for (auto const & v : tp.nodes) {
        if (!is.count(v)) { return "node " + v + " has no interpolant"; }
    }
    if (!unsat(is.at(tp.root), options)) { return "the root interpolant is not false"; }
    for (auto const & v : tp.nodes) {
        std::vector<Constraint> premises{tp.labels.at(v)};
        if (auto it = tp.children.find(v); it != tp.children.end()) {
            for (auto const & w : it->second) { premises.push_back(is.at(w)); }
        }
        if (!entails(premises, is.at(v), options)) { return "entailment fails at node " + v; }
        auto allowed = tp.shared_vars(v);
        if (!subset_of(free_vars(is.at(v)), VarSet(allowed.begin(), allowed.end()))) {
            return "interpolant of " + v + " mentions variables outside " + show_vars({allowed.begin(), allowed.end()});
        }
    }
    return std::nullopt;
}

std::optional<std::string> check_dag_interpolant(const DagProblem & dp, const Labeling & is,
                                                 const EngineOptions & options) {
    for (auto const & v : dp.nodes) {
        if (!is.count(v)) { return "node " + v + " has no interpolant"; }
    }
    if (!entails({}, is.at(dp.entry), options)) { return "the entry interpolant is not true"; }
    if (!unsat(is.at(dp.exit), options)) { return "the exit interpolant is not false"; }
    for (auto const & e : dp.edges) {
        if (!entails({is.at(e.from), dp.node_label(e.from), e.label}, conj({is.at(e.to), dp.node_label(e.to)}), options)) {
            return "entailment fails on edge " + e.from + " -> " + e.to;
        }
    }
    for (auto const & v : dp.nodes) {
        auto allowed = dp.allowed_vars(v);
        if (!subset_of(free_vars(is.at(v)), VarSet(allowed.begin(), allowed.end()))) {
            return "interpolant of " + v + " mentions variables outside " + show_vars({allowed.begin(), allowed.end()});
        }
    }
    return std::nullopt;
}

namespace {

std::string node_name(const SExpr & e) {
    if (e.kind == SExpr::Kind::List) { e.fail("expected a node name"); }
    return e.text;
}

const SExpr & arg(const SExpr & e, std::size_t i) {
    if (i >= e.items.size()) { e.fail("missing argument"); }
    return e.items[i];
}

} // namespace

Problem parse_problem(std::string_view text) {
    auto top = read_sexprs(text);
    if (top.size() != 1 || !top[0].is_list() || top[0].items.empty() || !top[0].items[0].is_symbol()) {
        throw ParseError(1, 1, "expected a single problem form");
    }
    SExpr const & form = top[0];
    std::map<std::string, Var> vars;
    VarLookup lookup = [&](const std::string & name) -> const Var * {
        auto it = vars.find(name);
        return it == vars.end() ? nullptr : &it->second;
    };
    for (std::size_t i = 1; i < form.items.size(); ++i) {
        auto const & item = form.items[i];
        if (item.is_call("vars")) {
            SExpr binders = item;
            binders.items.erase(binders.items.begin());
            for (auto const & v : parse_binders(binders)) { vars.insert_or_assign(v.name, v); }
        }
    }
    auto clauses = [&](const char * head) {
        std::vector<const SExpr *> out;
        for (std::size_t i = 1; i < form.items.size(); ++i) {
            if (form.items[i].is_call(head)) { out.push_back(&form.items[i]); }
        }
        return out;
    };
    auto single = [&](const char * head) -> const SExpr & {
        auto found = clauses(head);
        if (found.size() != 1) { form.fail(std::string("expected exactly one (") + head + " ...)"); }
        return *found[0];
    };
    for (std::size_t i = 1; i < form.items.size(); ++i) {
        if (!form.items[i].is_list() || form.items[i].items.empty() || !form.items[i].items[0].is_symbol()) {
            form.items[i].fail("expected a (keyword ...) entry");
        }
    }
    std::string const kind = form.items[0].text;
    auto check_keywords = [&](std::set<std::string> allowed) {
        allowed.insert("vars");
        for (std::size_t i = 1; i < form.items.size(); ++i) {
            if (!allowed.count(form.items[i].items[0].text)) { form.items[i].fail("unexpected entry in " + kind + " problem"); }
        }
    };
    if (kind == "interpolate") {
        check_keywords({"A", "B"});
        return BinaryProblem{parse_constraint(arg(single("A"), 1), lookup), parse_constraint(arg(single("B"), 1), lookup)};
    }
    if (kind == "sequence") {
        check_keywords({"part"});
        SequenceProblem sp;
        for (auto const * p : clauses("part")) { sp.parts.push_back(parse_constraint(arg(*p, 1), lookup)); }
        if (sp.parts.empty()) { form.fail("sequence problem without parts"); }
        return sp;
    }
    if (kind == "tree") {
        check_keywords({"root", "node", "edge"});
        TreeProblem tp;
        tp.root = node_name(arg(single("root"), 1));
        for (auto const * n : clauses("node")) {
            auto v = node_name(arg(*n, 1));
            if (tp.labels.count(v)) { n->fail("duplicate node " + v); }
            tp.nodes.push_back(v);
            tp.labels[v] = parse_constraint(arg(*n, 2), lookup);
        }
        for (auto const * e : clauses("edge")) { tp.children[node_name(arg(*e, 1))].push_back(node_name(arg(*e, 2))); }
        try {
            tp.validate();
        } catch (ParseError const &) {
            throw;
        } catch (Error const & err) {
            form.fail(err.what());
        }
        return tp;
    }
    if (kind == "dag") {
        check_keywords({"entry", "exit", "node", "edge"});
        DagProblem dp;
        dp.entry = node_name(arg(single("entry"), 1));
        dp.exit = node_name(arg(single("exit"), 1));
        auto add_node = [&](const std::string & v) {
            if (std::find(dp.nodes.begin(), dp.nodes.end(), v) == dp.nodes.end()) { dp.nodes.push_back(v); }
        };
        add_node(dp.entry);
        for (auto const * n : clauses("node")) {
            auto v = node_name(arg(*n, 1));
            add_node(v);
            if (n->items.size() > 2) { dp.node_labels[v] = parse_constraint(n->items[2], lookup); }
        }
        for (auto const * e : clauses("edge")) {
            DagEdge edge{node_name(arg(*e, 1)), node_name(arg(*e, 2)), parse_constraint(arg(*e, 3), lookup), {}};
            for (std::size_t k = 4; k < e->items.size(); ++k) {
                auto const & a = e->items[k];
                if (!a.is_call("anchor")) { a.fail("expected (anchor x ...)"); }
                for (std::size_t j = 1; j < a.items.size(); ++j) {
                    auto const * v = lookup(a.items[j].text);
                    if (!v || !a.items[j].is_symbol()) { throw UndeclaredSymbol(a.items[j].line, a.items[j].col, "undeclared variable " + a.items[j].text); }
                    edge.anchors.insert(*v);
                }
            }
            add_node(edge.from);
            add_node(edge.to);
            dp.edges.push_back(std::move(edge));
        }
        add_node(dp.exit);
        try {
            dp.validate();
        } catch (ParseError const &) {
            throw;
        } catch (Error const & err) {
            form.fail(err.what());
        }
        return dp;
    }
    form.items[0].fail("unknown problem kind " + kind);
}

std::string print_problem(const Problem & p) {
    VarSet vars;
    auto use = [&](const Constraint & c) {
        auto fv = free_vars(c);
        vars.insert(fv.begin(), fv.end());
    };
    std::ostringstream body;
    std::string kind;
    if (auto const * bp = std::get_if<BinaryProblem>(&p)) {
        kind = "interpolate";
        use(bp->a);
        use(bp->b);
        body << "\n  (A " << to_sexpr(bp->a) << ")\n  (B " << to_sexpr(bp->b) << ")";
    } else if (auto const * sp = std::get_if<SequenceProblem>(&p)) {
        kind = "sequence";
        for (auto const & t : sp->parts) {
            use(t);
            body << "\n  (part " << to_sexpr(t) << ")";
        }
    } else if (auto const * tp = std::get_if<TreeProblem>(&p)) {
        kind = "tree";
        body << "\n  (root " << quote_symbol(tp->root) << ")";
        for (auto const & v : tp->nodes) {
            use(tp->labels.at(v));
            body << "\n  (node " << quote_symbol(v) << " " << to_sexpr(tp->labels.at(v)) << ")";
        }
        for (auto const & v : tp->nodes) {
            if (auto it = tp->children.find(v); it != tp->children.end()) {
                for (auto const & w : it->second) { body << "\n  (edge " << quote_symbol(v) << " " << quote_symbol(w) << ")"; }
            }
        }
    } else {
        auto const & dp = std::get<DagProblem>(p);
        kind = "dag";
        body << "\n  (entry " << quote_symbol(dp.entry) << ")\n  (exit " << quote_symbol(dp.exit) << ")";
        for (auto const & v : dp.nodes) {
            body << "\n  (node " << quote_symbol(v);
            if (auto it = dp.node_labels.find(v); it != dp.node_labels.end()) {
                use(it->second);
                body << " " << to_sexpr(it->second);
            }
            body << ")";
        }
        for (auto const & e : dp.edges) {
            use(e.label);
            vars.insert(e.anchors.begin(), e.anchors.end());
            body << "\n  (edge " << quote_symbol(e.from) << " " << quote_symbol(e.to) << " " << to_sexpr(e.label);
            if (!e.anchors.empty()) {
                body << " (anchor";
                for (auto const & v : e.anchors) { body << " " << quote_symbol(v.name); }
                body << ")";
            }
            body << ")";
        }
    }
    std::string binders = print_binders(sorted(vars));
    return "(" + kind + "\n  (vars " + binders.substr(1, binders.size() - 2) + ")" + body.str() + ")\n";
}

} // namespace hornitp
