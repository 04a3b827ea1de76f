#include "hornitp/chc.h"
#include "hornitp/renamable_horn.h"

#include "random_cnf.h"
#include "test_util.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <optional>

using namespace hornitp;

namespace {

enum : unsigned { a = 1, b = 2, p = 3, q = 4, r = 5, s = 6 };

Literal pos(unsigned v) { return {v, true}; }
Literal neg(unsigned v) { return {v, false}; }

PropClauseSet example() { return parse_dimacs(read_file(data_path("renaming-example.cnf"))); }

std::vector<PropClause> sorted(std::vector<PropClause> cs) {
    for (auto & c : cs) { std::sort(c.begin(), c.end()); }
    std::sort(cs.begin(), cs.end());
    return cs;
}

bool satisfies(const PropClauseSet & cs, unsigned assignment) {
    return std::all_of(cs.clauses.begin(), cs.clauses.end(), [&](const PropClause & c) {
        return std::any_of(c.begin(), c.end(), [&](Literal l) { return bool(assignment >> (l.var - 1) & 1) == l.positive; });
    });
}

std::optional<unsigned> truth_table_model(const PropClauseSet & cs) {
    for (unsigned m = 0; m < (1u << cs.num_vars); ++m) {
        if (satisfies(cs, m)) { return m; }
    }
    return std::nullopt;
}

// Linear resolution as in the definition of termination: each step resolves
// the current clause with an input clause on one literal occurrence. Returns
// true when some sequence reaches `depth` steps.
bool long_derivation(const PropClauseSet & cs, const PropClause & c, unsigned depth, std::size_t & budget) {
    if (depth == 0) { return true; }
    if (budget == 0) { throw std::runtime_error("search budget"); }
    --budget;
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (auto const & d : cs.clauses) {
            for (std::size_t j = 0; j < d.size(); ++j) {
                if (d[j] != c[i].complement()) { continue; }
                PropClause res;
                for (std::size_t k = 0; k < c.size(); ++k) {
                    if (k != i) { res.push_back(c[k]); }
                }
                for (std::size_t k = 0; k < d.size(); ++k) {
                    if (k != j) { res.push_back(d[k]); }
                }
                std::sort(res.begin(), res.end());
                if (long_derivation(cs, res, depth - 1, budget)) { return true; }
            }
        }
    }
    return false;
}

} // namespace

TEST(RenamableHorn, ExampleParses) {
    PropClauseSet cs = example();
    EXPECT_EQ(cs.num_vars, 6u);
    std::vector<PropClause> expected{{neg(a), pos(s)}, {pos(a), neg(p)}, {pos(p), neg(b)}, {pos(b), pos(p), pos(r)}, {neg(p), pos(q)}};
    EXPECT_EQ(cs.clauses, expected);
    EXPECT_EQ(parse_dimacs(print_dimacs(cs)), cs);
}

TEST(RenamableHorn, IsHorn) {
    EXPECT_FALSE(is_horn(example()));
    EXPECT_TRUE(is_horn(PropClauseSet{}));
    EXPECT_TRUE(is_horn(PropClauseSet{2, {{neg(1), neg(2)}, {pos(1)}, {}}}));
    EXPECT_FALSE(is_horn(PropClauseSet{1, {{pos(1), pos(1)}}}));
}

TEST(RenamableHorn, ExampleGraph) {
    LiteralGraph g = literal_graph(example());
    // p | !b gives b -> p and !p -> !b
    EXPECT_TRUE(g.has_edge(pos(b), pos(p)));
    EXPECT_TRUE(g.has_edge(neg(p), neg(b)));
    // b | p | r gives the six edges between !b, !p, !r and b, p, r
    EXPECT_TRUE(g.has_edge(neg(b), pos(r)));
    EXPECT_TRUE(g.has_edge(neg(r), pos(p)));
    EXPECT_FALSE(g.has_edge(pos(p), neg(b)));
    EXPECT_EQ(g.edges().size(), 2u * 4u + 6u);
}

TEST(RenamableHorn, ExampleOrderAndRenaming) {
    PropClauseSet cs = example();
    TerminationResult t = has_termination_property(cs);
    ASSERT_TRUE(t.terminating);
    ASSERT_EQ(t.order.size(), 12u);
    LiteralGraph g = literal_graph(cs);
    for (auto [l, m] : g.edges()) {
        EXPECT_LT(std::find(t.order.begin(), t.order.end(), l), std::find(t.order.begin(), t.order.end(), m));
    }

    std::set<unsigned> ra = compute_renaming(cs);
    EXPECT_EQ(ra, (std::set<unsigned>{a, p, q, r, s}));

    PropClauseSet renamed = rename(cs, ra);
    std::vector<PropClause> expected{
        {pos(a), neg(s)}, {neg(a), pos(p)}, {neg(p), neg(b)}, {pos(b), neg(p), neg(r)}, {pos(p), neg(q)}};
    EXPECT_EQ(sorted(renamed.clauses), sorted(expected));
    EXPECT_TRUE(is_horn(renamed));
    EXPECT_TRUE(horn_recursion_free(renamed));
}

TEST(RenamableHorn, AnotherAdmissibleOrder) {
    std::vector<Literal> order{neg(s), neg(q), neg(r), neg(a), neg(p), pos(b), neg(b), pos(r), pos(p), pos(q), pos(a), pos(s)};
    for (auto [l, m] : literal_graph(example()).edges()) {
        EXPECT_LT(std::find(order.begin(), order.end(), l), std::find(order.begin(), order.end(), m));
    }
}

TEST(RenamableHorn, MutualDependenceCycles) {
    PropClauseSet cs{2, {{pos(1), neg(2)}, {pos(2), neg(1)}}};
    TerminationResult t = has_termination_property(cs);
    ASSERT_FALSE(t.terminating);
    EXPECT_TRUE(t.order.empty());
    ASSERT_FALSE(t.cycle.empty());
    std::set<unsigned> vars;
    for (auto l : t.cycle) { vars.insert(l.var); }
    EXPECT_EQ(vars, (std::set<unsigned>{1, 2}));
    EXPECT_THROW(compute_renaming(cs), NonTerminating);
    EXPECT_FALSE(horn_recursion_free(cs));
}

TEST(RenamableHorn, TautologyIsNonTerminating) {
    PropClauseSet cs{1, {{pos(1), neg(1)}}};
    TerminationResult t = has_termination_property(cs);
    ASSERT_FALSE(t.terminating);
    EXPECT_EQ(t.cycle, (std::vector<Literal>{pos(1)}));
    std::size_t budget = 1000;
    EXPECT_TRUE(long_derivation(cs, cs.clauses[0], 20, budget));
}

TEST(RenamableHorn, RecursionFreeHornNeedsNoRenaming) {
    PropClauseSet cs{3, {{pos(1)}, {pos(2), neg(1)}, {pos(3), neg(1), neg(2)}, {neg(3)}}};
    EXPECT_TRUE(has_termination_property(cs).terminating);
    EXPECT_TRUE(compute_renaming(cs).empty());
    EXPECT_EQ(rename(cs, {}), cs);
}

TEST(RenamableHorn, RepeatedLiteralsAreKept) {
    PropClauseSet cs = parse_dimacs("p cnf 2 1\n1 1 -2 0\n");
    ASSERT_EQ(cs.clauses[0].size(), 3u);
    // the two copies of 1 make !1 -> 1 an edge
    EXPECT_TRUE(literal_graph(cs).has_edge(neg(1), pos(1)));
    EXPECT_EQ(rename(cs, {1}).clauses[0], (PropClause{neg(1), neg(1), neg(2)}));
    EXPECT_EQ(print_dimacs(cs), "p cnf 2 1\n1 1 -2 0\n");
}

TEST(RenamableHorn, DimacsErrors) {
    EXPECT_THROW(parse_dimacs("1 2 0\n"), ParseError);
    EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 3 0\n"), ParseError);
    EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 x 0\n"), ParseError);
    EXPECT_THROW(parse_dimacs("p cnf 2 2\n1 2 0\n"), ParseError);
    EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 2\n"), ParseError);
    EXPECT_THROW(parse_dimacs("p dnf 2 1\n1 2 0\n"), ParseError);
    PropClauseSet cs = parse_dimacs("c comment\np cnf 3 2\n1 -2\n 3 0 -1 0\n%\n0\n");
    EXPECT_EQ(cs.clauses, (std::vector<PropClause>{{pos(1), neg(2), pos(3)}, {neg(1)}}));
    try {
        parse_dimacs("p cnf 1 1\n\n1 2 0\n");
        FAIL();
    } catch (const ParseError & e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_EQ(e.col(), 3u);
    }
}

TEST(RenamableHornProperty, RenameIsInvolutionAndPreservesSatisfiability) {
    for (unsigned seed = 1; seed <= 500; ++seed) {
        PropClauseSet cs = rc::random_cnf(seed, {10, 12, 4, false});
        SCOPED_TRACE(print_dimacs(cs));
        std::set<unsigned> ra;
        unsigned mask = seed * 2654435761u;
        for (unsigned v = 1; v <= cs.num_vars; ++v) {
            if (mask >> v & 1) { ra.insert(v); }
        }
        PropClauseSet renamed = rename(cs, ra);
        EXPECT_EQ(rename(renamed, ra), cs);
        auto m = truth_table_model(cs);
        auto mr = truth_table_model(renamed);
        ASSERT_EQ(m.has_value(), mr.has_value());
        if (m) {
            unsigned flip = 0;
            for (auto v : ra) { flip |= 1u << (v - 1); }
            EXPECT_TRUE(satisfies(renamed, *m ^ flip));
        }
    }
}

TEST(RenamableHornProperty, EdgeSymmetry) {
    for (unsigned seed = 1; seed <= 300; ++seed) {
        LiteralGraph g = literal_graph(rc::random_cnf(seed));
        for (auto [l, m] : g.edges()) { EXPECT_TRUE(g.has_edge(m.complement(), l.complement())); }
    }
}

TEST(RenamableHornProperty, TerminatingSetsBecomeRecursionFreeHorn) {
    int terminating = 0;
    for (unsigned seed = 1; terminating < 500; ++seed) {
        ASSERT_LT(seed, 20000u);
        PropClauseSet cs = rc::random_cnf(seed);
        TerminationResult t = has_termination_property(cs);
        if (!t.terminating) {
            // the witness is a cycle of the literal graph
            LiteralGraph g = literal_graph(cs);
            for (std::size_t i = 0; i < t.cycle.size(); ++i) {
                EXPECT_TRUE(g.has_edge(t.cycle[i], t.cycle[(i + 1) % t.cycle.size()]));
            }
            continue;
        }
        ++terminating;
        PropClauseSet renamed = rename(cs, compute_renaming(cs));
        EXPECT_TRUE(is_horn(renamed)) << print_dimacs(cs);
        EXPECT_TRUE(horn_recursion_free(renamed)) << print_dimacs(cs);
    }
}

TEST(RenamableHornProperty, HornTerminationIsRecursionFreedom) {
    int cyclic = 0, acyclic = 0;
    for (unsigned seed = 1; seed <= 1000; ++seed) {
        PropClauseSet cs = rc::random_cnf(seed, {5, 6, 3, true});
        ASSERT_TRUE(is_horn(cs));
        bool const rf = horn_recursion_free(cs);
        EXPECT_EQ(has_termination_property(cs).terminating, rf) << print_dimacs(cs);
        ++(rf ? acyclic : cyclic);
    }
    EXPECT_GT(cyclic, 0);
    EXPECT_GT(acyclic, 0);
}

// Graph acyclicity against a direct search for long linear resolution sequences.
TEST(RenamableHornProperty, AgreesWithBoundedResolution) {
    int checked = 0, infinite = 0;
    for (unsigned seed = 1; seed <= 400; ++seed) {
        PropClauseSet cs = rc::random_cnf(seed, {3, 4, 3, false});
        unsigned const depth = 4 * 2 * cs.num_vars + 4;
        std::size_t budget = 200000;
        bool long_seq = false;
        try {
            for (auto const & c : cs.clauses) {
                PropClause start = c;
                std::sort(start.begin(), start.end());
                if ((long_seq = long_derivation(cs, start, depth, budget))) { break; }
            }
        } catch (const std::runtime_error &) {
            continue;
        }
        ++checked;
        infinite += long_seq;
        EXPECT_EQ(has_termination_property(cs).terminating, !long_seq) << print_dimacs(cs);
    }
    EXPECT_GT(checked, 300);
    EXPECT_GT(infinite, 0);
    EXPECT_LT(infinite, checked);
}
