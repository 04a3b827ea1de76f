#pragma once

#include "hornitp/formula.h"

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace hornitp {

struct SExpr {
    enum class Kind { Symbol, Number, String, List };
    Kind kind = Kind::List;
    std::string text;  // symbol name (unquoted), numeral text or string contents
    std::vector<SExpr> items;
    std::size_t line = 1;
    std::size_t col = 1;

    bool is_symbol() const { return kind == Kind::Symbol; }
    bool is_symbol(std::string_view s) const { return kind == Kind::Symbol && text == s; }
    bool is_list() const { return kind == Kind::List; }
    // A list whose first element is the given symbol.
    bool is_call(std::string_view head) const { return is_list() && !items.empty() && items.front().is_symbol(head); }
    [[noreturn]] void fail(const std::string & message) const;
};

// Reads every top-level s-expression. `;` starts a comment; `|...|` quotes symbols.
std::vector<SExpr> read_sexprs(std::string_view text);
std::string to_string(const SExpr & e);

// Quotes a symbol with |...| when it is not a plain SMT-LIB symbol.
std::string quote_symbol(const std::string & name);
std::string rational_to_string(const Rational & q);  // "3", "-3", "1/2"
Rational parse_rational(const SExpr & e);            // numeral, decimal, n/d, (- x), (/ a b)

// Constraint s-expressions: (and ..) (or ..) (not ..) (<= t t) (< t t) (= t t)
// with terms (+ t..) (* c v) <integer> <n/d> <var>.
std::string to_sexpr(const LinearTerm & t);
std::string to_sexpr(const LinearAtom & a);
std::string to_sexpr(const Constraint & c);
// Human-readable infix rendering, e.g. "x - y <= 3 | n = 0".
std::string to_infix(const LinearTerm & t);
std::string to_infix(const Constraint & c);

// Resolves variable names while parsing. Returns nullptr for unknown names.
using VarLookup = std::function<const Var *(const std::string &)>;

// Parses the constraint/term grammar above, additionally accepting
// >=, >, distinct, =>, -, /, true and false.
LinearTerm parse_term(const SExpr & e, const VarLookup & lookup);
Constraint parse_constraint(const SExpr & e, const VarLookup & lookup);

} // namespace hornitp
