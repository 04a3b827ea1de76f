#include "hornitp/chc.h"
#include "hornitp/solver.h"

#include "random_horn.h"
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

bool unsat(const Constraint & c) { return !sat(c).sat(); }

ClauseSet counterexample_set() {
    return parse_chc(R"(
        (declare-fun p (Int) Bool)
        (assert (forall ((x Int)) (=> true (p x))))
        (assert (forall ((x Int)) (=> (and (p x) (>= x 0)) false)))
    )");
}

void expect_trace_invariant(const TreeInterpolation & ti) {
    for (auto const & s : ti.trace) { EXPECT_TRUE(unsat(s.frontier)) << "after step " << s.index << " at " << s.node; }
}

} // namespace

TEST(Expand, SingleDerivation) {
    ClauseSet hc = counterexample_set();
    auto ts = derivations(hc);
    ASSERT_EQ(ts.size(), 1u);
    EXPECT_EQ(ts[0].clause, 1u);
    ASSERT_EQ(ts[0].children.size(), 1u);
    EXPECT_EQ(ts[0].children[0].clause, 0u);
    EXPECT_EQ(to_sexpr(ts[0], hc), "(clause 1 (clause 0))");

    Constraint e = expand(hc);
    EXPECT_TRUE(sat(e).sat());
    // The query node is numbered 0: the expansion forces its x to be nonnegative.
    EXPECT_TRUE(entails({e}, ge(T(I("x!0")), K(0))));
    EXPECT_TRUE(entails({ge(T(I("x!0")), K(0)), eq(T(I("x!0")), T(I("x!1")))}, e));
}

TEST(Expand, NoQueryIsFalse) {
    ClauseSet hc = parse_chc(R"(
        (declare-fun p (Int) Bool)
        (assert (forall ((x Int)) (=> (>= x 0) (p x))))
    )");
    EXPECT_TRUE(derivations(hc).empty());
    EXPECT_TRUE(expand(hc).is_false());
}

TEST(Expand, RunningExampleIsUnsat) {
    EXPECT_TRUE(unsat(expand(load("tree-subset.chc"))));
    EXPECT_TRUE(unsat(expand(load("unwinding.chc"))));
}

TEST(Expand, EnumeratesEveryChoice) {
    // two facts for p, p used twice in the query: 4 derivations
    ClauseSet hc = parse_chc(R"(
        (declare-fun p (Int) Bool)
        (assert (forall ((x Int)) (=> (= x 1) (p x))))
        (assert (forall ((x Int)) (=> (= x 2) (p x))))
        (assert (forall ((x Int) (y Int)) (=> (and (p x) (p y) (= (+ x y) 4)) false)))
    )");
    EXPECT_EQ(derivations(hc).size(), 4u);
    auto m = sat(expand(hc));
    EXPECT_TRUE(m.sat());
}

TEST(Expand, Errors) {
    EXPECT_THROW(expand(load("recursive-program.chc")), RecursiveSystem);
    EXPECT_THROW(expand(load("unwinding.chc"), 5), ExpansionLimitExceeded);
}

TEST(TreeInterpolate, SingleFalseNode) {
    TreeProblem tp{{"r"}, "r", {}, {{"r", FALSE}}};
    BuiltinInterpolator itp;
    auto ti = tree_interpolate(tp, itp);
    EXPECT_TRUE(unsat(ti.labels.at("r")));
    ASSERT_EQ(ti.trace.size(), 1u);
}

TEST(TreeInterpolate, FlatTwoChildren) {
    Var x = I("x");
    TreeProblem tp{{"r", "a", "b"}, "r", {{"r", {"a", "b"}}}, {{"r", TRUE}, {"a", ge(T(x), K(1))}, {"b", le(T(x), K(0))}}};
    BuiltinInterpolator itp;
    auto ti = tree_interpolate(tp, itp);
    EXPECT_EQ(check_tree_interpolant(tp, ti.labels), std::nullopt);
    EXPECT_TRUE(unsat(conj({ti.labels.at("a"), ti.labels.at("b")})));
    expect_trace_invariant(ti);
}

TEST(TreeInterpolate, RunningExampleTree) {
    auto encs = tree_problem_from_treelike(normalize(load("tree-subset.chc")));
    ASSERT_EQ(encs.size(), 1u);
    BuiltinInterpolator itp;
    auto ti = tree_interpolate(encs[0].problem, itp);
    EXPECT_EQ(check_tree_interpolant(encs[0].problem, ti.labels), std::nullopt);
    EXPECT_EQ(ti.trace.size(), encs[0].problem.nodes.size());
    EXPECT_EQ(ti.trace.back().node, encs[0].false_node);
    expect_trace_invariant(ti);
}

TEST(TreeInterpolate, SatisfiableGivesModel) {
    Var x = I("x");
    TreeProblem tp{{"r", "a"}, "r", {{"r", {"a"}}}, {{"r", le(T(x), K(3))}, {"a", ge(T(x), K(1))}}};
    BuiltinInterpolator itp;
    try {
        tree_interpolate(tp, itp);
        FAIL() << "expected NotUnsat";
    } catch (const NotUnsat & e) {
        EXPECT_TRUE(evaluate(conj({tp.labels.at("r"), tp.labels.at("a")}), e.model()));
    }
}

TEST(SequenceInterpolants, Examples) {
    Var x = I("x"), y = I("y");
    BuiltinInterpolator itp;

    SequenceProblem two{{ge(T(x), K(0)), le(T(x), K(-1))}};
    auto is = sequence_interpolants(two, itp);
    ASSERT_EQ(is.size(), 3u);
    EXPECT_TRUE(is[0].is_true());
    EXPECT_EQ(check_sequence_interpolants(two, is), std::nullopt);

    SequenceProblem one{{FALSE}};
    is = sequence_interpolants(one, itp);
    ASSERT_EQ(is.size(), 2u);
    EXPECT_TRUE(is[0].is_true());
    EXPECT_TRUE(unsat(is[1]));

    SequenceProblem three{{ge(T(x), K(0)), eq(T(y), T(x) + K(1)), le(T(y), K(0))}};
    is = sequence_interpolants(three, itp);
    EXPECT_EQ(check_sequence_interpolants(three, is), std::nullopt);
    EXPECT_EQ(free_vars(is[1]), VarSet({x}));
    EXPECT_EQ(free_vars(is[2]), VarSet({y}));

    SequenceProblem feasible{{ge(T(x), K(0)), le(T(x), K(5))}};
    EXPECT_THROW(sequence_interpolants(feasible, itp), NotUnsat);
}

TEST(DagInterpolate, PathMatchesSequence) {
    Var x = I("x");
    DagProblem dp{{"en", "v", "ex"}, "en", "ex", {{"en", "v", ge(T(x), K(0)), {}}, {"v", "ex", le(T(x), K(-1)), {}}}, {}};
    BuiltinInterpolator itp;
    auto is = dag_interpolate(dp, itp);
    EXPECT_EQ(check_dag_interpolant(dp, is), std::nullopt);
    EXPECT_TRUE(entails({ge(T(x), K(0))}, is.at("v")));
    EXPECT_TRUE(unsat(conj({is.at("v"), le(T(x), K(-1))})));
}

TEST(DagInterpolate, Diamond) {
    Var x = I("x"), y = I("y");
    DagProblem dp{{"en", "a", "b", "j", "ex"},
                  "en",
                  "ex",
                  {{"en", "a", ge(T(x), K(2)), {}},
                   {"en", "b", ge(T(x), K(5)), {}},
                   {"a", "j", eq(T(y), T(x) + K(1)), {}},
                   {"b", "j", eq(T(y), T(x) - K(1)), {}},
                   {"j", "ex", le(T(y), K(2)), {}}},
                  {}};
    BuiltinInterpolator itp;
    auto is = dag_interpolate(dp, itp);
    EXPECT_EQ(check_dag_interpolant(dp, is), std::nullopt);
    EXPECT_TRUE(free_vars(is.at("j")) == VarSet({y}) || free_vars(is.at("j")).empty());
}

TEST(DagInterpolate, NodeLabelsAreEnforced) {
    Var x = I("x");
    DagProblem dp{{"en", "v", "w", "ex"},
                  "en",
                  "ex",
                  {{"en", "v", ge(T(x), K(0)), {}}, {"v", "w", TRUE, {x}}, {"w", "ex", le(T(x), K(-1)), {}}},
                  {{"w", ge(T(x), K(-5))}}};
    BuiltinInterpolator itp;
    auto is = dag_interpolate(dp, itp);
    EXPECT_EQ(check_dag_interpolant(dp, is), std::nullopt);
    EXPECT_TRUE(entails({is.at("v")}, ge(T(x), K(-5))));

    // reaching w with its label violated is a failure like reaching the exit
    dp.edges[2].label = FALSE;
    dp.node_labels["w"] = le(T(x), K(-1));
    EXPECT_THROW(dag_interpolate(dp, itp), NotUnsat);
}

TEST(DagInterpolate, FeasiblePathGivesModel) {
    Var x = I("x");
    DagProblem dp{{"en", "v", "ex"}, "en", "ex", {{"en", "v", ge(T(x), K(0)), {}}, {"v", "ex", le(T(x), K(3)), {}}}, {}};
    BuiltinInterpolator itp;
    try {
        dag_interpolate(dp, itp);
        FAIL() << "expected NotUnsat";
    } catch (const NotUnsat & e) {
        EXPECT_TRUE(evaluate(conj({ge(T(x), K(0)), le(T(x), K(3))}), e.model()));
    }
}

TEST(DagInterpolate, PathLimit) {
    Var x = I("x");
    DagProblem dp{{"en", "a", "b", "j", "ex"},
                  "en",
                  "ex",
                  {{"en", "a", TRUE, {}},
                   {"en", "b", TRUE, {}},
                   {"a", "j", TRUE, {}},
                   {"b", "j", TRUE, {}},
                   {"j", "ex", FALSE, {}}},
                  {}};
    BuiltinInterpolator itp;
    EXPECT_THROW(dag_interpolate(dp, itp, 1), PathLimitExceeded);
    EXPECT_NO_THROW(dag_interpolate(dp, itp, 2));
}

TEST(SolveBodyDisjoint, Unwinding) {
    ClauseSet hc = load("unwinding.chc");
    int trees = 0;
    SolverOptions opts;
    opts.on_tree = [&](const TreeProblem & tp, const TreeInterpolation & ti) {
        ++trees;
        EXPECT_EQ(check_tree_interpolant(tp, ti.labels), std::nullopt);
        expect_trace_invariant(ti);
    };
    auto r = solve_body_disjoint(hc, opts);
    ASSERT_TRUE(r.solved());
    EXPECT_TRUE(verify_solution(r.solution(), hc).valid);
    EXPECT_EQ(trees, 2);
    // The fixture combination is valid as well.
    EXPECT_TRUE(verify_solution(parse_solution(read_file(data_path("unwinding-solution.smt2")), hc), hc).valid);
}

TEST(SolveBodyDisjoint, HeadDisjointIsTreeSolving) {
    ClauseSet hc = load("tree-subset.chc");
    int trees = 0;
    SolverOptions opts;
    opts.on_tree = [&](const TreeProblem &, const TreeInterpolation &) { ++trees; };
    auto r = solve_body_disjoint(hc, opts);
    ASSERT_TRUE(r.solved());
    EXPECT_EQ(trees, 1);
    EXPECT_TRUE(verify_solution(r.solution(), hc).valid);
}

TEST(SolveBodyDisjoint, UnsolvableSubsetGivesCounterexample) {
    ClauseSet hc = parse_chc(R"(
        (declare-fun p (Int) Bool)
        (declare-fun q (Int) Bool)
        (assert (forall ((x Int)) (=> (= x 1) (p x))))
        (assert (forall ((x Int)) (=> (= x 5) (p x))))
        (assert (forall ((x Int) (y Int)) (=> (and (p x) (= y (+ x 1))) (q y))))
        (assert (forall ((y Int)) (=> (and (q y) (>= y 4)) false)))
    )");
    auto r = solve_body_disjoint(hc);
    ASSERT_FALSE(r.solved());
    auto const & cex = r.counterexample();
    EXPECT_TRUE(evaluate(cex.constraint, cex.model));
    EXPECT_EQ(to_sexpr(cex.derivation, hc), "(clause 3 (clause 2 (clause 1)))");
}

TEST(SolveBodyDisjoint, RejectsSharedUse) {
    ClauseSet hc = parse_chc(R"(
        (declare-fun p (Int) Bool)
        (assert (forall ((x Int)) (=> (= x 1) (p x))))
        (assert (forall ((x Int)) (=> (and (p x) (<= x 0)) false)))
        (assert (forall ((x Int)) (=> (and (p x) (>= x 2)) false)))
    )");
    EXPECT_THROW(solve_body_disjoint(hc), NotBodyDisjoint);
}

TEST(BodyDisjointTransform, IdentityOnBodyDisjointClauses) {
    ClauseSet hc = load("tree-subset.chc");
    auto t = body_disjoint_transform(hc);
    EXPECT_TRUE(t.copy_of.empty());
    EXPECT_EQ(t.clauses.size(), hc.size());
}

TEST(BodyDisjointTransform, ThreeUsesTwoCopies) {
    ClauseSet hc = parse_chc(R"(
        (declare-fun q (Int) Bool)
        (declare-fun p (Int) Bool)
        (assert (forall ((x Int)) (=> (>= x 0) (q x))))
        (assert (forall ((x Int) (y Int)) (=> (and (q x) (= y (+ x 1))) (p y))))
        (assert (forall ((x Int)) (=> (and (p x) (<= x 0)) false)))
        (assert (forall ((x Int)) (=> (and (p x) (= x -3)) false)))
        (assert (forall ((x Int) (y Int)) (=> (and (p x) (p y) (< (+ x y) 2)) false)))
    )");
    EXPECT_FALSE(classify(hc).body_disjoint);
    auto t = body_disjoint_transform(hc);
    // p is used 4 times: 3 copies, each with its cone {p, q} of 2 clauses
    EXPECT_EQ(t.copy_of.size(), 6u);
    EXPECT_EQ(t.clauses.size(), 3u + 4u * 2u);
    auto r = classify(t.clauses);
    EXPECT_TRUE(r.body_disjoint);
    EXPECT_TRUE(strictly_body_disjoint(t.clauses, [&] {
        std::vector<std::size_t> all(t.clauses.size());
        for (std::size_t i = 0; i < all.size(); ++i) { all[i] = i; }
        return all;
    }()));
    for (auto const & [copy, orig] : t.copy_of) { EXPECT_EQ(copy.substr(0, copy.find('$')), orig); }

    auto sol = solve(t.clauses);
    ASSERT_TRUE(sol.solved());
    EXPECT_TRUE(verify_solution(map_back(t, hc, sol.solution()), hc).valid);
}

TEST(BodyDisjointTransform, ThreeBodies) {
    // one symbol in three bodies: two fresh copies with their cones
    ClauseSet hc = parse_chc(R"(
        (declare-fun q (Int) Bool)
        (declare-fun p (Int) Bool)
        (assert (forall ((x Int)) (=> (>= x 0) (q x))))
        (assert (forall ((x Int) (y Int)) (=> (and (q x) (= y (+ x 1))) (p y))))
        (assert (forall ((x Int)) (=> (and (p x) (<= x 0)) false)))
        (assert (forall ((x Int)) (=> (and (p x) (= x -3)) false)))
        (assert (forall ((x Int)) (=> (and (p x) (< x 1)) false)))
    )");
    auto t = body_disjoint_transform(hc);
    EXPECT_EQ(t.copy_of.size(), 4u);  // p$1, p$2, q$1, q$2
    EXPECT_EQ(t.clauses.size(), hc.size() + 2u * 2u);
}

TEST(BodyDisjointTransform, RepeatedUseInOneBody) {
    ClauseSet hc = parse_chc(R"(
        (declare-fun p (Int) Bool)
        (assert (forall ((x Int)) (=> (= x 1) (p x))))
        (assert (forall ((x Int)) (=> (= x 2) (p x))))
        (assert (forall ((x Int) (y Int)) (=> (and (p x) (p y) (> (+ x y) 4)) false)))
    )");
    auto r = solve(hc);
    ASSERT_TRUE(r.solved());
    EXPECT_TRUE(verify_solution(r.solution(), hc).valid);
}

TEST(Solve, RecursiveInput) {
    try {
        solve(load("recursive-program.chc"));
        FAIL() << "expected RecursiveSystem";
    } catch (const RecursiveSystem & e) {
        auto const & c = e.cycle();
        EXPECT_NE(std::find(c.begin(), c.end(), "rf"), c.end());
    }
}

TEST(Solve, RunningExample) {
    ClauseSet hc = load("tree-subset.chc");
    auto r = solve(hc);
    ASSERT_TRUE(r.solved());
    EXPECT_TRUE(verify_solution(r.solution(), hc).valid);
    EXPECT_TRUE(verify_solution(parse_solution(read_file(data_path("tree-subset-solution.smt2")), hc), hc).valid);
}

TEST(Solve, Counterexample) {
    ClauseSet hc = counterexample_set();
    auto r = solve(hc);
    ASSERT_FALSE(r.solved());
    auto const & cex = r.counterexample();
    EXPECT_TRUE(evaluate(cex.constraint, cex.model));
    EXPECT_EQ(to_sexpr(cex.derivation, hc), "(clause 1 (clause 0))");
    EXPECT_EQ(cex.model.at(I("x!0")), 0);
}

TEST(Solve, EveryPath) {
    Var x = I("x"), y = I("y");
    // linear with two clauses for q: DAG path
    ClauseSet lin = parse_chc(R"(
        (declare-fun p (Int) Bool)
        (declare-fun q (Int) Bool)
        (assert (forall ((x Int)) (=> (>= x 0) (p x))))
        (assert (forall ((x Int) (y Int)) (=> (and (p x) (= y (+ x 1))) (q y))))
        (assert (forall ((x Int) (y Int)) (=> (and (p x) (= y (+ x 2))) (q y))))
        (assert (forall ((y Int)) (=> (and (q y) (<= y 0)) false)))
    )");
    FragmentReport r = classify(lin);
    EXPECT_TRUE(r.linear);
    EXPECT_FALSE(r.tree_like);
    auto s = solve(lin);
    ASSERT_TRUE(s.solved());
    EXPECT_TRUE(verify_solution(s.solution(), lin).valid);

    // an unused symbol and a pure constraint component
    ClauseSet extra = parse_chc(R"(
        (declare-fun u (Int) Bool)
        (declare-fun p (Int) Bool)
        (assert (forall ((x Int)) (=> (>= x 0) (p x))))
        (assert (forall ((x Int)) (=> (and (p x) (< x 0)) false)))
        (assert (forall ((x Int)) (=> (and (> x 0) (< x 1)) false)))
    )");
    s = solve(extra);
    ASSERT_TRUE(s.solved());
    EXPECT_TRUE(s.solution().at("u").body.is_true());
    (void)x;
    (void)y;
}

TEST(Solve, ParallelJobsAgree) {
    ClauseSet hc = load("unwinding.chc");
    SolverOptions opts;
    opts.jobs = 4;
    auto r = solve(hc, opts);
    ASSERT_TRUE(r.solved());
    EXPECT_TRUE(verify_solution(r.solution(), hc).valid);
}

TEST(Solve, ExternalInterpolatorFactoryIsUsed) {
    struct Counting : Interpolator {
        int * calls;
        BuiltinInterpolator inner;
        explicit Counting(int * c) : calls(c) {}
        Constraint interpolate(const Constraint & a, const Constraint & b) override {
            ++*calls;
            return inner.interpolate(a, b);
        }
        const EngineOptions & options() const override { return inner.options(); }
    };
    int calls = 0;
    SolverOptions opts;
    opts.make_interpolator = [&] { return std::make_unique<Counting>(&calls); };
    auto r = solve(load("tree-subset.chc"), opts);
    ASSERT_TRUE(r.solved());
    EXPECT_GT(calls, 0);
}

// Solvable exactly when the expansion is unsatisfiable.
TEST(SolveProperty, AgreesWithExpansion) {
    int solved = 0, refuted = 0;
    for (unsigned seed = 1; seed <= 80; ++seed) {
        ClauseSet hc = rc::RandomHorn(seed).clause_set();
        SCOPED_TRACE("seed " + std::to_string(seed) + "\n" + print_chc(hc));
        bool const expansion_sat = sat(expand(hc)).sat();
        SolveResult r;
        try {
            r = solve(hc);
        } catch (const Error & e) {
            ADD_FAILURE() << e.what();
            continue;
        }
        EXPECT_EQ(r.solved(), !expansion_sat) << "seed " << seed << "\n" << print_chc(hc);
        if (r.solved()) {
            ++solved;
            EXPECT_TRUE(verify_solution(r.solution(), hc).valid) << "seed " << seed;
        } else {
            ++refuted;
            EXPECT_TRUE(evaluate(r.counterexample().constraint, r.counterexample().model)) << "seed " << seed;
        }
    }
    EXPECT_GT(solved, 0);
    EXPECT_GT(refuted, 0);
}
