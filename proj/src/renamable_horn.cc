#include "hornitp/renamable_horn.h"

#include <algorithm>
#include <charconv>
#include <functional>
#include <queue>
#include <sstream>

namespace hornitp {

bool is_horn(const PropClauseSet & cs) {
    for (auto const & c : cs.clauses) {
        if (std::count_if(c.begin(), c.end(), [](Literal l) { return l.positive; }) > 1) { return false; }
    }
    return true;
}

bool LiteralGraph::has_edge(Literal from, Literal to) const {
    auto const & s = successors.at(from.index());
    return std::binary_search(s.begin(), s.end(), to.index());
}

std::vector<std::pair<Literal, Literal>> LiteralGraph::edges() const {
    std::vector<std::pair<Literal, Literal>> out;
    for (std::size_t i = 0; i < successors.size(); ++i) {
        for (auto j : successors[i]) { out.emplace_back(Literal::from_index(i), Literal::from_index(j)); }
    }
    return out;
}

LiteralGraph literal_graph(const PropClauseSet & cs) {
    LiteralGraph g;
    g.num_vars = cs.num_vars;
    g.successors.resize(2 * std::size_t(cs.num_vars));
    for (auto const & c : cs.clauses) {
        for (std::size_t i = 0; i < c.size(); ++i) {
            for (std::size_t j = 0; j < c.size(); ++j) {
                if (i != j) { g.successors.at(c[i].complement().index()).push_back(c[j].index()); }
            }
        }
    }
    for (auto & s : g.successors) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    return g;
}

namespace {

// Some cycle among the nodes not in `done`; each of them lies on or reaches one.
std::vector<Literal> find_cycle(const LiteralGraph & g, const std::vector<bool> & done) {
    std::size_t const n = g.successors.size();
    std::vector<int> colour(n, 0);  // 0 unvisited, 1 on stack, 2 finished
    for (std::size_t root = 0; root < n; ++root) {
        if (done[root] || colour[root] != 0) { continue; }
        std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
        colour[root] = 1;
        while (!stack.empty()) {
            auto & [v, next] = stack.back();
            auto const & succ = g.successors[v];
            if (next == succ.size()) {
                colour[v] = 2;
                stack.pop_back();
                continue;
            }
            std::size_t w = succ[next++];
            if (done[w] || colour[w] == 2) { continue; }
            if (colour[w] == 1) {
                std::vector<Literal> cycle;
                auto it = std::find_if(stack.begin(), stack.end(), [&](auto const & e) { return e.first == w; });
                for (; it != stack.end(); ++it) { cycle.push_back(Literal::from_index(it->first)); }
                return cycle;
            }
            colour[w] = 1;
            stack.emplace_back(w, 0);
        }
    }
    return {};
}

} // namespace

TerminationResult has_termination_property(const PropClauseSet & cs) {
    LiteralGraph g = literal_graph(cs);
    std::size_t const n = g.successors.size();
    std::vector<std::size_t> indegree(n, 0);
    for (auto const & s : g.successors) {
        for (auto w : s) { ++indegree[w]; }
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t v = 0; v < n; ++v) {
        if (indegree[v] == 0) { ready.push(v); }
    }
    TerminationResult r;
    std::vector<bool> done(n, false);
    while (!ready.empty()) {
        std::size_t v = ready.top();
        ready.pop();
        done[v] = true;
        r.order.push_back(Literal::from_index(v));
        for (auto w : g.successors[v]) {
            if (--indegree[w] == 0) { ready.push(w); }
        }
    }
    if (r.order.size() == n) {
        r.terminating = true;
    } else {
        r.order.clear();
        r.cycle = find_cycle(g, done);
    }
    return r;
}

std::set<unsigned> compute_renaming(const PropClauseSet & cs) {
    TerminationResult t = has_termination_property(cs);
    if (!t.terminating) { throw NonTerminating("literal graph has a cycle: " + to_string(t.cycle)); }
    std::vector<std::size_t> position(t.order.size());
    for (std::size_t i = 0; i < t.order.size(); ++i) { position[t.order[i].index()] = i; }
    std::set<unsigned> a;
    for (unsigned v = 1; v <= cs.num_vars; ++v) {
        if (position[Literal{v, false}.index()] < position[Literal{v, true}.index()]) { a.insert(v); }
    }
    return a;
}

PropClauseSet rename(const PropClauseSet & cs, const std::set<unsigned> & a) {
    PropClauseSet out = cs;
    for (auto & c : out.clauses) {
        for (auto & l : c) {
            if (a.count(l.var)) { l = l.complement(); }
        }
    }
    return out;
}

bool horn_recursion_free(const PropClauseSet & cs) {
    // dependence p -> q, stored on the positive literals
    LiteralGraph g;
    g.num_vars = cs.num_vars;
    g.successors.resize(2 * std::size_t(cs.num_vars));
    for (auto const & c : cs.clauses) {
        for (auto p : c) {
            if (!p.positive) { continue; }
            for (auto q : c) {
                if (!q.positive) { g.successors[p.index()].push_back(Literal{q.var, true}.index()); }
            }
        }
    }
    for (auto & s : g.successors) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    return find_cycle(g, std::vector<bool>(g.successors.size(), false)).empty();
}

PropClauseSet parse_dimacs(std::string_view text) {
    PropClauseSet cs;
    bool header = false;
    std::size_t declared = 0;
    PropClause current;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) { end = text.size(); }
        std::string_view line = text.substr(pos, end - pos);
        ++line_no;
        pos = end + 1;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || line[first] == 'c') { continue; }
        if (line[first] == '%') { break; }
        if (line[first] == 'p') {
            if (header) { throw ParseError(line_no, first + 1, "duplicate problem line"); }
            std::istringstream in{std::string(line.substr(first + 1))};
            std::string fmt;
            long vars = -1, clauses = -1;
            if (!(in >> fmt >> vars >> clauses) || fmt != "cnf" || vars < 0 || clauses < 0) {
                throw ParseError(line_no, first + 1, "expected 'p cnf <variables> <clauses>'");
            }
            std::string rest;
            if (in >> rest) { throw ParseError(line_no, first + 1, "trailing input on problem line"); }
            cs.num_vars = unsigned(vars);
            declared = std::size_t(clauses);
            header = true;
            continue;
        }
        if (!header) { throw ParseError(line_no, first + 1, "clause before problem line"); }
        std::size_t i = first;
        while (i < line.size()) {
            if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r') {
                ++i;
                continue;
            }
            std::size_t j = line.find_first_of(" \t\r", i);
            if (j == std::string_view::npos) { j = line.size(); }
            std::string_view tok = line.substr(i, j - i);
            long v = 0;
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || ptr != tok.data() + tok.size()) {
                throw ParseError(line_no, i + 1, "expected an integer literal, got '" + std::string(tok) + "'");
            }
            if (v == 0) {
                cs.clauses.push_back(std::move(current));
                current.clear();
            } else {
                unsigned var = unsigned(v < 0 ? -v : v);
                if (var > cs.num_vars) {
                    throw ParseError(line_no, i + 1, "variable " + std::to_string(var) + " exceeds declared count");
                }
                current.push_back({var, v > 0});
            }
            i = j;
        }
    }
    if (!header) { throw ParseError(line_no, 1, "missing problem line"); }
    if (!current.empty()) { throw ParseError(line_no, 1, "last clause is not terminated by 0"); }
    if (cs.clauses.size() != declared) {
        throw ParseError(line_no, 1,
                         "declared " + std::to_string(declared) + " clauses, found " + std::to_string(cs.clauses.size()));
    }
    return cs;
}

std::string print_dimacs(const PropClauseSet & cs) {
    std::ostringstream out;
    out << "p cnf " << cs.num_vars << ' ' << cs.clauses.size() << '\n';
    for (auto const & c : cs.clauses) {
        for (auto l : c) { out << l.dimacs() << ' '; }
        out << "0\n";
    }
    return out.str();
}

std::string to_string(const std::vector<Literal> & lits) {
    std::string s;
    for (auto l : lits) {
        if (!s.empty()) { s += ' '; }
        s += std::to_string(l.dimacs());
    }
    return s;
}

} // namespace hornitp
