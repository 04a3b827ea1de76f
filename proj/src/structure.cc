#include "hornitp/structure.h"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace hornitp {

DependenceGraph dependence_graph(const ClauseSet & hc) {
    DependenceGraph g;
    for (auto const & [name, r] : hc.relations()) { g.nodes.insert(name); }
    for (auto const & h : hc.clauses()) {
        if (!h.head) { continue; }
        for (auto const & b : h.body) { g.edges.emplace(h.head->symbol, b.symbol); }
    }
    return g;
}

namespace {

std::map<std::string, std::vector<std::string>> successors(const DependenceGraph & g) {
    std::map<std::string, std::vector<std::string>> succ;
    for (auto const & n : g.nodes) { succ[n]; }
    for (auto const & [p, q] : g.edges) { succ[p].push_back(q); }
    return succ;
}

} // namespace

std::optional<std::vector<std::string>> DependenceGraph::find_cycle() const {
    auto succ = successors(*this);
    std::map<std::string, int> color;  // 0 white, 1 on stack, 2 done
    std::vector<std::string> stack;
    std::optional<std::vector<std::string>> cycle;
    std::function<void(const std::string &)> dfs = [&](const std::string & v) {
        color[v] = 1;
        stack.push_back(v);
        for (auto const & w : succ[v]) {
            if (cycle) { return; }
            if (color[w] == 1) {
                auto it = std::find(stack.begin(), stack.end(), w);
                cycle = std::vector<std::string>(it, stack.end());
                cycle->push_back(w);
                return;
            }
            if (color[w] == 0) { dfs(w); }
        }
        stack.pop_back();
        color[v] = 2;
    };
    for (auto const & [v, s] : succ) {
        if (cycle) { break; }
        if (color[v] == 0) { dfs(v); }
    }
    return cycle;
}

std::vector<std::string> DependenceGraph::bottom_up_order() const {
    if (auto c = find_cycle()) { throw RecursiveSystem(*c); }
    auto succ = successors(*this);
    std::vector<std::string> order;
    std::set<std::string> done;
    std::function<void(const std::string &)> visit = [&](const std::string & v) {
        if (!done.insert(v).second) { return; }
        for (auto const & w : succ[v]) { visit(w); }
        order.push_back(v);
    };
    for (auto const & [v, s] : succ) { visit(v); }
    return order;
}

bool strictly_body_disjoint(const ClauseSet & hc, const std::vector<std::size_t> & indices) {
    std::set<std::string> used;
    for (std::size_t i : indices) {
        for (auto const & b : hc.clauses()[i].body) {
            if (!used.insert(b.symbol).second) { return false; }
        }
    }
    return true;
}

std::vector<std::vector<std::size_t>> head_choice_subsets(const ClauseSet & hc, std::size_t limit) {
    auto const & cs = hc.clauses();
    std::map<std::string, std::vector<std::size_t>> defining;
    std::set<std::string> in_body;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (cs[i].head) { defining[cs[i].head->symbol].push_back(i); }
        for (auto const & b : cs[i].body) { in_body.insert(b.symbol); }
    }
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (!cs[i].head || !in_body.count(cs[i].head->symbol)) { roots.push_back(i); }
    }

    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> selected = roots;
    std::vector<std::string> pending;
    std::set<std::string> decided;
    auto push_body = [&](std::size_t i) {
        for (auto const & b : cs[i].body) {
            if (decided.insert(b.symbol).second) { pending.push_back(b.symbol); }
        }
    };
    for (std::size_t i : roots) { push_body(i); }

    std::function<void(std::size_t)> extend = [&](std::size_t next) {
        if (next == pending.size()) {
            if (out.size() >= limit) { throw SubsetLimitExceeded(limit); }
            auto sorted = selected;
            std::sort(sorted.begin(), sorted.end());
            out.push_back(std::move(sorted));
            return;
        }
        auto it = defining.find(pending[next]);
        if (it == defining.end()) {
            extend(next + 1);
            return;
        }
        for (std::size_t c : it->second) {
            auto const pending_size = pending.size();
            auto const decided_before = decided;
            selected.push_back(c);
            push_body(c);
            extend(next + 1);
            selected.pop_back();
            pending.resize(pending_size);
            decided = decided_before;
        }
    };
    extend(0);
    return out;
}

FragmentReport classify(const ClauseSet & hc) {
    FragmentReport r;
    r.recursion_free = dependence_graph(hc).acyclic();
    std::map<std::string, int> head_uses;
    for (auto const & h : hc.clauses()) {
        if (h.body.size() > 1) { r.linear = false; }
        if (h.head) { head_uses[h.head->symbol]++; }
    }
    for (auto const & [p, n] : head_uses) {
        if (n > 1) { r.head_disjoint = false; }
    }
    std::vector<std::size_t> all(hc.size());
    std::iota(all.begin(), all.end(), 0);
    r.body_disjoint = strictly_body_disjoint(hc, all);
    if (!r.body_disjoint && !r.head_disjoint && r.recursion_free) {
        try {
            r.body_disjoint = true;
            for (auto const & t : head_choice_subsets(hc, 4096)) {
                if (!strictly_body_disjoint(hc, t)) {
                    r.body_disjoint = false;
                    break;
                }
            }
        } catch (SubsetLimitExceeded const &) {
            r.body_disjoint = false;
            r.subset_limit_hit = true;
        }
    }
    r.tree_like = r.body_disjoint && r.head_disjoint;
    r.linear_tree_like = r.linear && r.tree_like;
    return r;
}

std::string FragmentReport::to_text() const {
    auto b = [](bool v) { return v ? "true" : "false"; };
    std::ostringstream out;
    out << "recursion-free: " << b(recursion_free) << "\n"
        << "linear: " << b(linear) << "\n"
        << "body-disjoint: " << b(body_disjoint) << "\n"
        << "head-disjoint: " << b(head_disjoint) << "\n"
        << "tree-like: " << b(tree_like) << "\n"
        << "linear-tree-like: " << b(linear_tree_like) << "\n";
    if (!recursion_free) { out << "note: the input is recursive; only the linear flag is meaningful\n"; }
    if (subset_limit_hit) { out << "note: too many head choices; body-disjoint reported as false\n"; }
    return out.str();
}

ClauseSet subset(const ClauseSet & hc, const std::vector<std::size_t> & indices) {
    ClauseSet out;
    for (std::size_t i : indices) {
        auto const & h = hc.clauses()[i];
        for (auto const & b : h.body) { out.declare(hc.relation(b.symbol)); }
        if (h.head) { out.declare(hc.relation(h.head->symbol)); }
    }
    for (std::size_t i : indices) { out.add(hc.clauses()[i], true); }
    return out;
}

std::vector<ClauseSet> connected_components(const ClauseSet & hc) {
    std::size_t const n = hc.clauses().size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    std::map<std::string, std::size_t> owner;
    for (std::size_t i = 0; i < n; ++i) {
        auto const & h = hc.clauses()[i];
        auto link = [&](const std::string & p) {
            auto [it, inserted] = owner.try_emplace(p, i);
            if (!inserted) { parent[find(i)] = find(it->second); }
        };
        for (auto const & b : h.body) { link(b.symbol); }
        if (h.head) { link(h.head->symbol); }
    }
    std::map<std::size_t, std::vector<std::size_t>> groups;
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = find(i);
        if (!groups.count(r)) { roots.push_back(r); }
        groups[r].push_back(i);
    }
    std::vector<ClauseSet> out;
    for (std::size_t r : roots) { out.push_back(subset(hc, groups[r])); }
    return out;
}

NormalizedClauseSet normalize(const ClauseSet & hc) {
    NormalizedClauseSet out;
    for (auto const & [name, r] : hc.relations()) {
        out.clauses.declare(r);
        out.arg_vectors[name] = arg_vector(r);
    }
    for (auto const & h : hc.clauses()) {
        std::string const tag = std::to_string(h.id);
        // Head first, then the body atoms in order.
        std::vector<const RelationAtom *> atoms;
        if (h.head) { atoms.push_back(&*h.head); }
        for (auto const & b : h.body) { atoms.push_back(&b); }

        std::map<std::string, int> seen;
        std::vector<std::vector<Var>> vectors;
        for (auto const * a : atoms) {
            int k = seen[a->symbol]++;
            if (k == 0) {
                vectors.push_back(out.arg_vectors.at(a->symbol));
            } else {
                std::vector<Var> copy;
                for (auto const & v : out.arg_vectors.at(a->symbol)) {
                    copy.emplace_back(v.name + "@" + tag + "." + std::to_string(k), v.sort);
                }
                vectors.push_back(std::move(copy));
            }
        }

        Substitution sigma;
        std::vector<std::pair<Var, const LinearTerm *>> bindings;
        for (std::size_t j = 0; j < atoms.size(); ++j) {
            for (std::size_t i = 0; i < atoms[j]->args.size(); ++i) {
                auto const & t = atoms[j]->args[i];
                Var const & slot = vectors[j][i];
                auto x = t.as_variable();
                if (x && x->sort == slot.sort && !sigma.count(*x)) {
                    sigma[*x] = LinearTerm::variable(slot);
                } else {
                    bindings.emplace_back(slot, &t);
                }
            }
        }
        for (auto const & v : h.vars()) {
            if (!sigma.count(v)) { sigma[v] = LinearTerm::variable(Var(v.name + "@" + tag, v.sort)); }
        }

        HornClause n;
        n.id = h.id;
        std::vector<Constraint> parts{substitute(h.constraint, sigma)};
        for (auto const & [slot, t] : bindings) { parts.push_back(eq(LinearTerm::variable(slot), t->substitute(sigma))); }
        n.constraint = conj(std::move(parts));
        auto rebuild = [&](std::size_t j) {
            RelationAtom a{atoms[j]->symbol, {}};
            for (auto const & v : vectors[j]) { a.args.push_back(LinearTerm::variable(v)); }
            return a;
        };
        std::size_t j = 0;
        if (h.head) { n.head = rebuild(j++); }
        for (; j < atoms.size(); ++j) { n.body.push_back(rebuild(j)); }
        out.clauses.add(std::move(n), true);
        out.origin.push_back(std::move(sigma));
    }
    return out;
}

ClauseSet merge_linear_duplicates(const ClauseSet & hc) {
    using Key = std::pair<std::string, std::string>;  // body symbol ("" if none), head symbol ("" if false)
    std::map<Key, std::size_t> slot;
    std::vector<HornClause> merged;
    for (auto const & h : hc.clauses()) {
        if (h.body.size() > 1) { throw NotLinear("clause " + std::to_string(h.id) + " has more than one body atom"); }
        Key k{h.body.empty() ? "" : h.body[0].symbol, h.head ? h.head->symbol : ""};
        auto [it, inserted] = slot.try_emplace(k, merged.size());
        if (inserted) {
            merged.push_back(h);
            continue;
        }
        HornClause & m = merged[it->second];
        if (!(m.body == h.body) || !(m.head == h.head)) {
            throw WrongFragment("merging requires normalized clauses");
        }
        m.constraint = disj({m.constraint, h.constraint});
    }
    ClauseSet out;
    for (auto const & [name, r] : hc.relations()) { out.declare(r); }
    for (auto & h : merged) { out.add(std::move(h), true); }
    return out;
}

} // namespace hornitp
