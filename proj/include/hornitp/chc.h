#pragma once

#include "hornitp/horn.h"
#include "hornitp/sexpr.h"

#include <string>
#include <string_view>

namespace hornitp {

// CHC exchange subset: set-logic, declare-fun (relations only), assert with
// an optional forall over Int/Real variables around (=> body head), and
// check-sat. `(not body)` is read as body -> false. A head that is a pure
// constraint c is moved into the body as (not c).
ClauseSet parse_chc(std::string_view text);
std::string print_chc(const ClauseSet & hc);

// One (define-rel p ((x Int) ...) c) per symbol; (define-fun p (...) Bool c)
// is accepted too, as is a leading `sat`. Symbols unknown to `hc` are rejected.
Solution parse_solution(std::string_view text, const ClauseSet & hc);
std::string print_solution(const Solution & sol, const ClauseSet & hc);

std::string read_file(const std::string & path);

// Helpers shared with the problem-file readers.
Sort parse_sort(const SExpr & e);
std::vector<Var> parse_binders(const SExpr & list);  // ((x Int) (y Real) ...)
std::string print_binders(const std::vector<Var> & vars);

} // namespace hornitp
