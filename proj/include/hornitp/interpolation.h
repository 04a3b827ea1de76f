#pragma once

#include "hornitp/formula.h"
#include "hornitp/linear_solver.h"

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

namespace hornitp {

struct EngineOptions {
    std::size_t cube_limit = 10000;
    int branch_depth = 50;
};

struct SatResult {
    std::optional<Model> model;
    bool sat() const { return model.has_value(); }
};

// A conjunction that was expected to be unsatisfiable has a model.
class NotUnsat : public Error {
public:
    explicit NotUnsat(Model model, const std::string & what = "formula is satisfiable")
        : Error(what), model_(std::move(model)) {}
    const Model & model() const { return model_; }

private:
    Model model_;
};

// Satisfiability via DNF and sat_cube. The model assigns every free variable.
SatResult sat(const Constraint & c, const EngineOptions & options = {});
bool entails(const std::vector<Constraint> & premises, const Constraint & goal, const EngineOptions & options = {});
inline bool equivalent(const Constraint & a, const Constraint & b, const EngineOptions & options = {}) {
    return entails({a}, b, options) && entails({b}, a, options);
}

struct Interpolant {
    Constraint formula;
};

// Interpolant of an unsatisfiable cube pair, read off the refutation by
// summing the A-side atoms. Throws NotUnsat when the pair is satisfiable.
Constraint cube_interpolant(const Cube & a, const Cube & b, const EngineOptions & options = {});
// Craig interpolant of A and B as an or-of-ands of cube interpolants.
Interpolant binary_interpolant(const Constraint & a, const Constraint & b, const EngineOptions & options = {});

// Checks A |= I, I & B unsat and fv(I) within fv(A) & fv(B). Returns an
// explanation of the first failed condition, or nullopt.
std::optional<std::string> check_interpolant(const Constraint & a, const Constraint & b, const Constraint & i,
                                             const EngineOptions & options = {});

// Source of binary interpolants used by the solving pipeline.
class Interpolator {
public:
    virtual ~Interpolator() = default;
    virtual Constraint interpolate(const Constraint & a, const Constraint & b) = 0;
    virtual const EngineOptions & options() const = 0;
};

class BuiltinInterpolator : public Interpolator {
public:
    explicit BuiltinInterpolator(EngineOptions options = {}) : options_(options) {}
    Constraint interpolate(const Constraint & a, const Constraint & b) override {
        return binary_interpolant(a, b, options_).formula;
    }
    const EngineOptions & options() const override { return options_; }

private:
    EngineOptions options_;
};

} // namespace hornitp
