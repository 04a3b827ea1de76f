#include "hornitp/chc.h"
#include "hornitp/encodings.h"

#include "random_constraints.h"
#include "test_util.h"

#include <gtest/gtest.h>

using namespace hornitp;

namespace {

ClauseSet load(const std::string & f) { return parse_chc(read_file(data_path(f))); }

LinearTerm T(const Var & v) { return LinearTerm::variable(v); }
LinearTerm K(long c) { return LinearTerm(Rational(c)); }
Var I(const std::string & n) { return Var(n, Sort::Int); }

Constraint TRUE = Constraint::truth(true);
Constraint FALSE = Constraint::truth(false);

// Definition of an encoded symbol from an interpolant over the clause's own argument variables.
Solution solution_from(const ClauseSet & hc, const std::map<std::string, Constraint> & by_symbol) {
    Solution s;
    for (auto const & h : hc.clauses()) {
        auto collect = [&](const RelationAtom & a) {
            std::vector<Var> params;
            for (auto const & t : a.args) { params.push_back(*t.as_variable()); }
            s.defs[a.symbol] = {params, by_symbol.at(a.symbol)};
        };
        if (h.head) { collect(*h.head); }
        for (auto const & b : h.body) { collect(b); }
    }
    return s;
}

} // namespace

TEST(BinaryToHorn, Examples) {
    Var x = I("x"), y = I("y");
    ClauseSet hc = binary_to_horn({ge(T(x), K(0)), le(T(x), K(-1))});
    ASSERT_EQ(hc.size(), 2u);
    EXPECT_EQ(hc.relation("p").arity(), 1u);
    EXPECT_EQ(hc.clauses()[0].constraint, ge(T(x), K(0)));
    EXPECT_EQ(*hc.clauses()[0].head, (RelationAtom{"p", {T(x)}}));
    EXPECT_TRUE(hc.clauses()[1].is_query());
    EXPECT_TRUE(classify(hc).linear_tree_like);

    EXPECT_EQ(binary_to_horn({ge(T(x), K(0)), le(T(y), K(-1))}).relation("p").arity(), 0u);
}

TEST(BinaryToHorn, InterpolantsAreSolutions) {
    Var x = I("x"), y = I("y"), z = I("z");
    rc::RandomConstraints gen(81, {x, y, z});
    int checked = 0;
    for (int i = 0; i < 2000 && checked < 60; ++i) {
        Constraint a = gen.constraint(1), b = gen.constraint(1);
        if (sat(a && b).sat()) { continue; }
        ClauseSet hc = binary_to_horn({a, b});
        Constraint itp = binary_interpolant(a, b).formula;
        EXPECT_TRUE(verify_solution(solution_from(hc, {{"p", itp}}), hc).valid);
        // a non-interpolant is rejected
        EXPECT_FALSE(verify_solution(solution_from(hc, {{"p", FALSE}}), hc).valid && sat(a).sat());
        ++checked;
    }
    EXPECT_EQ(checked, 60);
}

TEST(SequenceToHorn, Examples) {
    Var x = I("x"), y = I("y");
    ClauseSet one = sequence_to_horn({{ge(T(x), K(0)) && le(T(x), K(-1))}});
    EXPECT_EQ(one.size(), 3u);
    EXPECT_EQ(one.relation("p0").arity(), 0u);

    SequenceProblem sp{{ge(T(x), K(0)), eq(T(y), T(x) + K(1)), le(T(y), K(0))}};
    EXPECT_EQ(sp.shared_vars(1), std::vector<Var>{x});
    EXPECT_EQ(sp.shared_vars(2), std::vector<Var>{y});
    EXPECT_TRUE(sp.shared_vars(0).empty());
    EXPECT_TRUE(sp.shared_vars(3).empty());
    ClauseSet hc = sequence_to_horn(sp);
    EXPECT_EQ(hc.size(), 5u);
    EXPECT_TRUE(classify(hc).linear_tree_like);

    std::vector<Constraint> is{TRUE, ge(T(x), K(0)), ge(T(y), K(1)), FALSE};
    EXPECT_FALSE(check_sequence_interpolants(sp, is).has_value());
    EXPECT_TRUE(verify_solution(solution_from(hc, {{"p0", is[0]}, {"p1", is[1]}, {"p2", is[2]}, {"p3", is[3]}}), hc).valid);
    is[2] = ge(T(y), K(2));
    EXPECT_TRUE(check_sequence_interpolants(sp, is).has_value());
    is[2] = ge(T(x), K(0));
    EXPECT_TRUE(check_sequence_interpolants(sp, is).has_value());
}

// The shared vectors match an independent prefix/suffix computation, and the
// encoding is always linear tree-like.
TEST(SequenceToHornProperty, SharedVarsAndFragment) {
    Var x = I("x"), y = I("y"), z = I("z"), w = I("w");
    rc::RandomConstraints gen(82, {x, y, z, w});
    for (int i = 0; i < 100; ++i) {
        SequenceProblem sp;
        int n = gen.uniform(1, 5);
        for (int k = 0; k < n; ++k) { sp.parts.push_back(gen.constraint(1)); }
        for (int k = 0; k <= n; ++k) {
            std::vector<Var> expected;
            for (auto const & v : {w, x, y, z}) {
                bool before = false, after = false;
                for (int j = 0; j < n; ++j) {
                    bool has = free_vars(sp.parts[j]).count(v) > 0;
                    (j < k ? before : after) |= has;
                }
                if (before && after) { expected.push_back(v); }
            }
            EXPECT_EQ(sp.shared_vars(k), expected);
        }
        EXPECT_TRUE(classify(sequence_to_horn(sp)).linear_tree_like);
    }
}

TEST(SequenceFromLinearTreeLike, Chains) {
    ClauseSet hc = parse_chc(R"(
      (declare-fun a (Int) Bool) (declare-fun b (Int) Bool)
      (declare-fun c (Int) Bool) (declare-fun d (Int) Bool)
      (assert (forall ((x Int)) (=> (>= x 0) (a x))))
      (assert (forall ((x Int) (y Int)) (=> (and (a x) (= y (+ x 1))) (b y))))
      (assert (forall ((x Int)) (=> (and (b x) (<= x 0)) false)))
      (assert (forall ((x Int) (y Int)) (=> (and (c x) (= y x)) (d y)))))");
    auto encs = sequence_from_linear_treelike(normalize(hc));
    ASSERT_EQ(encs.size(), 2u);
    auto const & first = encs[0];
    EXPECT_EQ(first.problem.parts.size(), 3u);
    EXPECT_EQ(first.symbols, (std::vector<std::string>{"", "a", "b", ""}));
    EXPECT_EQ(first.problem.shared_vars(1), std::vector<Var>{I("a#0")});
    // c has no defining clause and d no use: false at both ends
    auto const & second = encs[1];
    ASSERT_EQ(second.problem.parts.size(), 3u);
    EXPECT_EQ(second.problem.parts.front(), FALSE);
    EXPECT_EQ(second.problem.parts.back(), FALSE);
    EXPECT_EQ(second.symbols, (std::vector<std::string>{"", "c", "d", ""}));

    EXPECT_THROW(sequence_from_linear_treelike(normalize(load("tree-subset.chc"))), WrongFragment);
    EXPECT_THROW(sequence_from_linear_treelike(normalize(load("recursive-program.chc"))), RecursiveSystem);
}

TEST(TreeFromTreeLike, RunningExampleGivesTheTreeProblem) {
    ClauseSet hc = load("tree-subset.chc");
    NormalizedClauseSet n = normalize(hc);
    auto encs = tree_problem_from_treelike(n);
    ASSERT_EQ(encs.size(), 1u);
    TreeProblem const & tp = encs[0].problem;
    EXPECT_EQ(tp.root, "false");
    EXPECT_EQ(tp.nodes.size(), 8u);
    EXPECT_EQ(tp.children.at("false"), std::vector<std::string>{"r3"});
    EXPECT_EQ(tp.children.at("r3"), (std::vector<std::string>{"r2", "rf"}));
    EXPECT_EQ(tp.children.at("rf"), std::vector<std::string>{"r9"});
    EXPECT_EQ(tp.children.at("r9"), std::vector<std::string>{"r8"});
    EXPECT_EQ(tp.children.at("r8"), std::vector<std::string>{"r5"});
    EXPECT_EQ(tp.children.at("r2"), std::vector<std::string>{"r1"});

    auto v = [](const std::string & s) { return T(I(s)); };
    EXPECT_TRUE(equivalent(tp.labels.at("false"), ne(v("r3#1"), v("r3#0") + K(1))));
    EXPECT_TRUE(equivalent(tp.labels.at("r2"), ge(v("r2#0"), K(0)) && eq(v("r2#1"), v("r1#1"))));
    EXPECT_TRUE(equivalent(tp.labels.at("r8"), eq(v("r8#0"), v("r5#0")) && le(v("r8#0"), K(0)) &&
                                                  eq(v("r8#1"), v("r5#1")) && eq(v("r8#2"), v("r5#2"))));
    EXPECT_TRUE(equivalent(tp.labels.at("r9"), eq(v("r9#0"), v("r8#0")) && eq(v("r9#1"), K(1)) &&
                                                  eq(v("r9#2"), v("r8#2"))));
    EXPECT_TRUE(equivalent(tp.labels.at("rf"), eq(v("rf#0"), v("r9#0")) && eq(v("rf#1"), v("r9#1"))));
    EXPECT_EQ(tp.labels.at("r1"), TRUE);
    EXPECT_EQ(tp.labels.at("r5"), TRUE);

    // The published labelling, read from the solution file, is a tree interpolant.
    Solution sol = parse_solution(read_file(data_path("tree-subset-solution.smt2")), hc);
    Labeling is{{"false", FALSE}};
    for (auto const & [p, d] : sol.defs) {
        std::vector<LinearTerm> args;
        for (auto const & x : n.arg_vectors.at(p)) { args.push_back(T(x)); }
        is[p] = d.apply(args);
    }
    EXPECT_EQ(check_tree_interpolant(tp, is), std::nullopt);
    is["r8"] = TRUE;
    EXPECT_TRUE(check_tree_interpolant(tp, is).has_value());
}

TEST(TreeFromTreeLike, UndefinedSymbolsAndTopHeads) {
    ClauseSet hc = parse_chc(R"(
      (declare-fun a (Int) Bool) (declare-fun b (Int) Bool)
      (assert (forall ((x Int)) (=> (and (a x) (> x 0)) (b x)))))");
    auto encs = tree_problem_from_treelike(normalize(hc));
    ASSERT_EQ(encs.size(), 1u);
    auto const & tp = encs[0].problem;
    EXPECT_EQ(tp.labels.at("a"), FALSE);
    EXPECT_EQ(tp.labels.at("false"), FALSE);
    EXPECT_EQ(tp.children.at("false"), std::vector<std::string>{"b"});

    ClauseSet named = parse_chc("(declare-fun false (Int) Bool)(assert (forall ((x Int)) (=> (false x) false)))");
    EXPECT_EQ(tree_problem_from_treelike(normalize(named))[0].false_node, "false'");
    EXPECT_THROW(tree_problem_from_treelike(normalize(load("unwinding.chc"))), WrongFragment);
}

TEST(TreeToHorn, Examples) {
    Var x = I("x");
    TreeProblem single{{"v"}, "v", {}, {{"v", FALSE}}};
    ClauseSet hc = tree_problem_to_horn(single);
    EXPECT_EQ(hc.size(), 2u);
    EXPECT_TRUE(verify_solution(solution_from(hc, {{"p_v", FALSE}}), hc).valid);

    // flat tree: symmetric interpolants
    TreeProblem flat{{"root", "a", "b", "c"}, "root", {{"root", {"a", "b", "c"}}},
                     {{"root", TRUE}, {"a", ge(T(x), K(2))}, {"b", le(T(x), K(5))}, {"c", le(T(x), K(1))}}};
    ClauseSet fh = tree_problem_to_horn(flat);
    EXPECT_TRUE(classify(fh).tree_like);
    EXPECT_EQ(fh.size(), 5u);
    Labeling is{{"root", FALSE}, {"a", ge(T(x), K(2))}, {"b", TRUE}, {"c", le(T(x), K(1))}};
    EXPECT_EQ(check_tree_interpolant(flat, is), std::nullopt);
    EXPECT_TRUE(verify_solution(
                    solution_from(fh, {{"p_root", FALSE}, {"p_a", is["a"]}, {"p_b", TRUE}, {"p_c", is["c"]}}), fh)
                    .valid);

    TreeProblem bad = flat;
    bad.children["a"] = {"b"};
    EXPECT_THROW(tree_problem_to_horn(bad), Error);
}

// Round trip: the tree problem read off the running example encodes back to a
// tree-like set solved by the same labelling.
TEST(TreeRoundTrip, RunningExample) {
    ClauseSet hc = load("tree-subset.chc");
    NormalizedClauseSet n = normalize(hc);
    TreeProblem tp = tree_problem_from_treelike(n)[0].problem;
    ClauseSet back = tree_problem_to_horn(tp);
    FragmentReport r = classify(back);
    EXPECT_TRUE(r.tree_like);
    EXPECT_EQ(back.size(), tp.nodes.size() + 1);
    Solution sol = parse_solution(read_file(data_path("tree-subset-solution.smt2")), hc);
    std::map<std::string, Constraint> by{{node_symbol("false"), FALSE}};
    for (auto const & [p, d] : sol.defs) {
        std::vector<LinearTerm> args;
        for (auto const & x : n.arg_vectors.at(p)) { args.push_back(T(x)); }
        by[node_symbol(p)] = d.apply(args);
    }
    EXPECT_TRUE(verify_solution(solution_from(back, by), back).valid);
}

TEST(DagToHorn, DiamondDropsGuards) {
    Var x = I("x");
    DagProblem dp{{"en", "a", "b", "ex"}, "en", "ex",
                  {{"en", "a", ge(T(x), K(1)), {}}, {"en", "b", ge(T(x), K(2)), {}},
                   {"a", "ex", le(T(x), K(0)), {}}, {"b", "ex", le(T(x), K(-1)), {}}},
                  {}};
    ClauseSet hc = dag_problem_to_horn(dp);
    EXPECT_EQ(hc.size(), 6u);
    EXPECT_TRUE(classify(hc).linear);
    EXPECT_EQ(dp.allowed_vars("a"), std::vector<Var>{x});
    EXPECT_TRUE(dp.allowed_vars("en").empty());

    Labeling is{{"en", TRUE}, {"a", ge(T(x), K(1))}, {"b", ge(T(x), K(1))}, {"ex", FALSE}};
    EXPECT_EQ(check_dag_interpolant(dp, is), std::nullopt);
    std::map<std::string, Constraint> by;
    for (auto const & [v, c] : is) { by[node_symbol(v)] = c; }
    EXPECT_TRUE(verify_solution(solution_from(hc, by), hc).valid);
    is["b"] = ge(T(x), K(3));
    EXPECT_TRUE(check_dag_interpolant(dp, is).has_value());

    // node labels produce guard clauses
    dp.node_labels["a"] = ge(T(x), K(0));
    EXPECT_EQ(dag_problem_to_horn(dp).size(), 7u);
}

TEST(DagToHorn, SingleFalseEdge) {
    DagProblem dp{{"en", "ex"}, "en", "ex", {{"en", "ex", FALSE, {}}}, {}};
    ClauseSet hc = dag_problem_to_horn(dp);
    EXPECT_TRUE(verify_solution(solution_from(hc, {{"p_en", TRUE}, {"p_ex", FALSE}}), hc).valid);
    DagProblem cyclic{{"en", "a", "b", "ex"}, "en", "ex",
                      {{"en", "a", TRUE, {}}, {"a", "b", TRUE, {}}, {"b", "a", TRUE, {}}, {"b", "ex", TRUE, {}}},
                      {}};
    EXPECT_THROW(dag_problem_to_horn(cyclic), Error);
}

TEST(DagFromLinear, Shapes) {
    ClauseSet chain = parse_chc(R"(
      (declare-fun a (Int) Bool) (declare-fun b (Int Int) Bool)
      (assert (forall ((x Int)) (=> (>= x 0) (a x))))
      (assert (forall ((x Int) (y Int)) (=> (and (a x) (= y 3)) (b x y))))
      (assert (forall ((x Int) (y Int)) (=> (and (b x y) (< x 0)) false))))");
    auto encs = dag_problem_from_linear(normalize(chain));
    ASSERT_EQ(encs.size(), 1u);
    DagProblem const & dp = encs[0].problem;
    EXPECT_EQ(dp.nodes, (std::vector<std::string>{"en", "a", "b", "ex"}));
    ASSERT_EQ(dp.edges.size(), 3u);
    EXPECT_EQ(dp.edges[1].from, "a");
    EXPECT_EQ(dp.edges[1].to, "b");
    // b#1 is not mentioned by the query but the anchors allow it
    EXPECT_EQ(dp.allowed_vars("b"), (std::vector<Var>{I("b#0"), I("b#1")}));
    EXPECT_EQ(dp.allowed_vars("a"), std::vector<Var>{I("a#0")});

    ClauseSet fan = parse_chc(R"(
      (declare-fun p (Int) Bool) (declare-fun q (Int) Bool) (declare-fun r (Int) Bool)
      (assert (forall ((x Int)) (=> true (p x))))
      (assert (forall ((x Int)) (=> (p x) (q x))))
      (assert (forall ((x Int)) (=> (p x) (r x)))))");
    auto f = dag_problem_from_linear(normalize(fan))[0].problem;
    int out_of_p = 0;
    for (auto const & e : f.edges) { out_of_p += e.from == "p"; }
    EXPECT_EQ(out_of_p, 2);

    ClauseSet dup = parse_chc(R"(
      (declare-fun p (Int) Bool)
      (assert (forall ((x Int)) (=> (> x 0) (p x))))
      (assert (forall ((x Int)) (=> (< x 0) (p x)))))");
    EXPECT_THROW(dag_problem_from_linear(normalize(dup)), WrongFragment);
    EXPECT_EQ(dag_problem_from_linear({merge_linear_duplicates(normalize(dup).clauses), normalize(dup).arg_vectors, {}})
                  .at(0)
                  .problem.edges.size(),
              1u);
    EXPECT_THROW(dag_problem_from_linear(normalize(load("tree-subset.chc"))), NotLinear);
}

TEST(ProblemFiles, RoundTrip) {
    std::vector<std::string> texts{
        "(interpolate (vars (x Int) (y Int)) (A (and (>= x 0) (= y x))) (B (< y 0)))",
        "(sequence (vars (x Int) (y Real)) (part (>= x 0)) (part (= y (+ x 1))) (part (<= y 0)))",
        "(tree (vars (x Int)) (root r) (node r true) (node a (>= x 2)) (node b (<= x 1)) (edge r a) (edge r b))",
        "(dag (vars (x Int) (y Int)) (entry en) (exit ex) (node a) (node b (>= y 0)) "
        "(edge en a (>= x 0) (anchor y)) (edge a b (= y x)) (edge b ex (< y 0)))",
    };
    for (auto const & t : texts) {
        Problem p = parse_problem(t);
        Problem again = parse_problem(print_problem(p));
        EXPECT_EQ(print_problem(again), print_problem(p)) << t;
        EXPECT_EQ(p.index(), again.index());
        EXPECT_FALSE(problem_to_horn(p).empty());
    }
    auto dp = std::get<DagProblem>(parse_problem(texts[3]));
    EXPECT_EQ(dp.edges[0].anchors, VarSet{I("y")});
    EXPECT_EQ(dp.nodes, (std::vector<std::string>{"en", "a", "b", "ex"}));
}

TEST(ProblemFiles, Errors) {
    EXPECT_THROW(parse_problem("(interpolate (vars (x Int)) (A (>= x 0)))"), ParseError);
    EXPECT_THROW(parse_problem("(interpolate (vars (x Int)) (A (>= z 0)) (B true))"), UndeclaredSymbol);
    EXPECT_THROW(parse_problem("(sequence (vars))"), ParseError);
    EXPECT_THROW(parse_problem("(tree (vars) (root r) (node r true) (edge r a))"), ParseError);
    EXPECT_THROW(parse_problem("(dag (vars) (entry en) (exit ex) (edge ex en true))"), ParseError);
    EXPECT_THROW(parse_problem("(circle (vars))"), ParseError);
    EXPECT_THROW(parse_problem("(sequence (vars) (part true) (bogus))"), ParseError);
}
