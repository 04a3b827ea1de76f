#include "hornitp/sexpr.h"

#include <cctype>
#include <sstream>

namespace hornitp {

void SExpr::fail(const std::string & message) const { throw ParseError(line, col, message); }

namespace {

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    std::vector<SExpr> read_all() {
        std::vector<SExpr> out;
        skip();
        while (pos_ < text_.size()) {
            out.push_back(read());
            skip();
        }
        return out;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;

    [[noreturn]] void fail(const std::string & message) const { throw ParseError(line_, col_, message); }

    char peek() const { return text_[pos_]; }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip() {
        while (pos_ < text_.size()) {
            char c = peek();
            if (c == ';') {
                while (pos_ < text_.size() && peek() != '\n') { advance(); }
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    SExpr read() {
        SExpr e;
        e.line = line_;
        e.col = col_;
        char c = peek();
        if (c == '(') {
            advance();
            e.kind = SExpr::Kind::List;
            skip();
            while (true) {
                if (pos_ >= text_.size()) { fail("unterminated list"); }
                if (peek() == ')') {
                    advance();
                    break;
                }
                e.items.push_back(read());
                skip();
            }
            return e;
        }
        if (c == ')') { fail("unexpected ')'"); }
        if (c == '|') {
            advance();
            e.kind = SExpr::Kind::Symbol;
            while (pos_ < text_.size() && peek() != '|') {
                e.text += peek();
                advance();
            }
            if (pos_ >= text_.size()) { fail("unterminated quoted symbol"); }
            advance();
            return e;
        }
        if (c == '"') {
            advance();
            e.kind = SExpr::Kind::String;
            while (pos_ < text_.size() && peek() != '"') {
                if (peek() == '\\' && pos_ + 1 < text_.size()) { advance(); }
                e.text += peek();
                advance();
            }
            if (pos_ >= text_.size()) { fail("unterminated string"); }
            advance();
            return e;
        }
        while (pos_ < text_.size()) {
            char d = peek();
            if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';' || d == '"' || d == '|') { break; }
            e.text += d;
            advance();
        }
        bool numeric = !e.text.empty();
        std::size_t start = (e.text.size() > 1 && e.text[0] == '-') ? 1 : 0;
        bool digits = false;
        for (std::size_t i = start; i < e.text.size(); ++i) {
            char d = e.text[i];
            if (std::isdigit(static_cast<unsigned char>(d))) {
                digits = true;
            } else if (d != '.' && d != '/') {
                numeric = false;
            }
        }
        e.kind = (numeric && digits) ? SExpr::Kind::Number : SExpr::Kind::Symbol;
        return e;
    }
};

bool plain_symbol(const std::string & s) {
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) { return false; }
    static const std::string extra = "~!@$%^&*_-+=<>.?/";
    for (char c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && extra.find(c) == std::string::npos) { return false; }
    }
    return true;
}

} // namespace

std::vector<SExpr> read_sexprs(std::string_view text) { return Reader(text).read_all(); }

std::string to_string(const SExpr & e) {
    switch (e.kind) {
    case SExpr::Kind::Symbol: return quote_symbol(e.text);
    case SExpr::Kind::Number: return e.text;
    case SExpr::Kind::String: return "\"" + e.text + "\"";
    case SExpr::Kind::List: {
        std::string s = "(";
        for (std::size_t i = 0; i < e.items.size(); ++i) {
            if (i) { s += ' '; }
            s += to_string(e.items[i]);
        }
        return s + ")";
    }
    }
    return {};
}

std::string quote_symbol(const std::string & name) { return plain_symbol(name) ? name : "|" + name + "|"; }

std::string rational_to_string(const Rational & q) {
    if (q.get_den() == 1) { return q.get_num().get_str(); }
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(const SExpr & e) {
    if (e.kind == SExpr::Kind::Number) {
        std::string const & t = e.text;
        auto dot = t.find('.');
        if (dot != std::string::npos) {
            std::string digits = t.substr(0, dot) + t.substr(dot + 1);
            Integer den = 1;
            for (std::size_t i = dot + 1; i < t.size(); ++i) { den *= 10; }
            Rational r(Integer(digits, 10), den);
            r.canonicalize();
            return r;
        }
        try {
            Rational r(t, 10);
            r.canonicalize();
            if (r.get_den() == 0) { e.fail("zero denominator"); }
            return r;
        } catch (std::invalid_argument const &) {
            e.fail("malformed number '" + t + "'");
        }
    }
    if (e.is_call("-") && e.items.size() == 2) { return -parse_rational(e.items[1]); }
    if (e.is_call("/") && e.items.size() == 3) {
        Rational d = parse_rational(e.items[2]);
        if (d == 0) { e.fail("division by zero"); }
        return parse_rational(e.items[1]) / d;
    }
    e.fail("expected a numeric constant, got " + to_string(e));
}

// ---------------------------------------------------------------- printing

namespace {

// Splits `lhs rel 0` into `vars rel constant` for display.
struct Sides {
    LinearTerm vars;
    Rational rhs;
};

Sides split(const LinearTerm & lhs) {
    Sides s;
    for (auto const & [v, c] : lhs.coeffs()) { s.vars.add(v, c); }
    s.rhs = -lhs.constant();
    return s;
}

std::string const_sexpr(const Rational & q) { return rational_to_string(q); }

} // namespace

std::string to_sexpr(const LinearTerm & t) {
    std::vector<std::string> parts;
    for (auto const & [v, c] : t.coeffs()) {
        if (c == 1) {
            parts.push_back(quote_symbol(v.name));
        } else {
            parts.push_back("(* " + const_sexpr(c) + " " + quote_symbol(v.name) + ")");
        }
    }
    if (t.constant() != 0 || parts.empty()) { parts.push_back(const_sexpr(t.constant())); }
    if (parts.size() == 1) { return parts.front(); }
    std::string s = "(+";
    for (auto const & p : parts) { s += " " + p; }
    return s + ")";
}

std::string to_sexpr(const LinearAtom & a) {
    Sides s = split(a.lhs());
    std::string body = to_sexpr(s.vars) + " " + const_sexpr(s.rhs);
    switch (a.rel()) {
    case Rel::Le: return "(<= " + body + ")";
    case Rel::Lt: return "(< " + body + ")";
    case Rel::Eq: return "(= " + body + ")";
    case Rel::Ne: return "(not (= " + body + "))";
    }
    return {};
}

std::string to_sexpr(const Constraint & c) {
    switch (c.kind()) {
    case Constraint::Kind::True: return "true";
    case Constraint::Kind::False: return "false";
    case Constraint::Kind::Atom: return to_sexpr(c.as_atom());
    case Constraint::Kind::Not: return "(not " + to_sexpr(c.children().front()) + ")";
    case Constraint::Kind::And:
    case Constraint::Kind::Or: {
        std::string s = c.kind() == Constraint::Kind::And ? "(and" : "(or";
        for (auto const & ch : c.children()) { s += " " + to_sexpr(ch); }
        return s + ")";
    }
    }
    return {};
}

std::string to_infix(const LinearTerm & t) {
    std::ostringstream out;
    bool first = true;
    auto emit = [&](const Rational & c, const std::string & name) {
        Rational mag = abs(c);
        if (first) {
            if (c < 0) { out << "-"; }
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        if (name.empty()) {
            out << rational_to_string(mag);
        } else {
            if (mag != 1) { out << rational_to_string(mag) << "*"; }
            out << name;
        }
        first = false;
    };
    for (auto const & [v, c] : t.coeffs()) { emit(c, v.name); }
    if (t.constant() != 0 || first) { emit(t.constant(), ""); }
    return out.str();
}

std::string to_infix(const Constraint & c) {
    switch (c.kind()) {
    case Constraint::Kind::True: return "true";
    case Constraint::Kind::False: return "false";
    case Constraint::Kind::Atom: {
        auto const & a = c.as_atom();
        Sides s = split(a.lhs());
        // Prefer a positive leading coefficient on the left-hand side.
        Rel rel = a.rel();
        bool flip = (rel == Rel::Le || rel == Rel::Lt) && s.vars.coeffs().begin()->second < 0;
        if (flip) {
            s.vars *= Rational(-1);
            s.rhs = -s.rhs;
        }
        const char * op = "";
        switch (rel) {
        case Rel::Le: op = flip ? " >= " : " <= "; break;
        case Rel::Lt: op = flip ? " > " : " < "; break;
        case Rel::Eq: op = " = "; break;
        case Rel::Ne: op = " != "; break;
        }
        return to_infix(s.vars) + op + rational_to_string(s.rhs);
    }
    case Constraint::Kind::Not: return "!(" + to_infix(c.children().front()) + ")";
    case Constraint::Kind::And:
    case Constraint::Kind::Or: {
        std::string sep = c.kind() == Constraint::Kind::And ? " & " : " | ";
        std::string s;
        for (std::size_t i = 0; i < c.children().size(); ++i) {
            auto const & ch = c.children()[i];
            std::string inner = to_infix(ch);
            if (ch.kind() == Constraint::Kind::And || ch.kind() == Constraint::Kind::Or) { inner = "(" + inner + ")"; }
            if (i) { s += sep; }
            s += inner;
        }
        return s;
    }
    }
    return {};
}

// ---------------------------------------------------------------- parsing

LinearTerm parse_term(const SExpr & e, const VarLookup & lookup) {
    if (e.kind == SExpr::Kind::Number) { return LinearTerm(parse_rational(e)); }
    if (e.is_symbol()) {
        if (const Var * v = lookup(e.text)) { return LinearTerm::variable(*v); }
        throw UndeclaredSymbol(e.line, e.col, "unknown variable '" + e.text + "'");
    }
    if (!e.is_list() || e.items.empty() || !e.items.front().is_symbol()) { e.fail("malformed term " + to_string(e)); }
    std::string const & op = e.items.front().text;
    std::size_t const n = e.items.size() - 1;
    if (op == "+") {
        LinearTerm t;
        for (std::size_t i = 1; i <= n; ++i) { t += parse_term(e.items[i], lookup); }
        return t;
    }
    if (op == "-") {
        if (n == 0) { e.fail("'-' needs arguments"); }
        LinearTerm t = parse_term(e.items[1], lookup);
        if (n == 1) { return -t; }
        for (std::size_t i = 2; i <= n; ++i) { t -= parse_term(e.items[i], lookup); }
        return t;
    }
    if (op == "*") {
        LinearTerm t(Rational(1));
        bool have_var = false;
        for (std::size_t i = 1; i <= n; ++i) {
            LinearTerm f = parse_term(e.items[i], lookup);
            if (f.is_constant()) {
                t *= f.constant();
            } else if (t.is_constant() && !have_var) {
                f *= t.constant();
                t = std::move(f);
                have_var = true;
            } else {
                e.fail("nonlinear multiplication");
            }
        }
        return t;
    }
    if (op == "/") {
        if (n != 2) { e.fail("'/' takes two arguments"); }
        LinearTerm num = parse_term(e.items[1], lookup);
        LinearTerm den = parse_term(e.items[2], lookup);
        if (!den.is_constant() || den.constant() == 0) { e.fail("division by a non-constant or zero"); }
        return num * (Rational(1) / den.constant());
    }
    e.fail("unsupported term operator '" + op + "'");
}

namespace {

Constraint chain(const SExpr & e, const VarLookup & lookup, Constraint (*cmp)(const LinearTerm &, const LinearTerm &)) {
    if (e.items.size() < 3) { e.fail("comparison needs two arguments"); }
    std::vector<LinearTerm> terms;
    for (std::size_t i = 1; i < e.items.size(); ++i) { terms.push_back(parse_term(e.items[i], lookup)); }
    std::vector<Constraint> parts;
    for (std::size_t i = 0; i + 1 < terms.size(); ++i) { parts.push_back(cmp(terms[i], terms[i + 1])); }
    return conj(std::move(parts));
}

} // namespace

Constraint parse_constraint(const SExpr & e, const VarLookup & lookup) {
    if (e.is_symbol("true")) { return Constraint::truth(true); }
    if (e.is_symbol("false")) { return Constraint::truth(false); }
    if (!e.is_list() || e.items.empty() || !e.items.front().is_symbol()) { e.fail("malformed constraint " + to_string(e)); }
    std::string const & op = e.items.front().text;
    if (op == "and" || op == "or") {
        std::vector<Constraint> parts;
        for (std::size_t i = 1; i < e.items.size(); ++i) { parts.push_back(parse_constraint(e.items[i], lookup)); }
        return op == "and" ? conj(std::move(parts)) : disj(std::move(parts));
    }
    if (op == "not") {
        if (e.items.size() != 2) { e.fail("'not' takes one argument"); }
        return negate(parse_constraint(e.items[1], lookup));
    }
    if (op == "=>") {
        if (e.items.size() != 3) { e.fail("'=>' takes two arguments"); }
        return implies(parse_constraint(e.items[1], lookup), parse_constraint(e.items[2], lookup));
    }
    if (op == "<=") { return chain(e, lookup, &le); }
    if (op == "<") { return chain(e, lookup, &lt); }
    if (op == ">=") { return chain(e, lookup, &ge); }
    if (op == ">") { return chain(e, lookup, &gt); }
    if (op == "=") { return chain(e, lookup, &eq); }
    if (op == "distinct") {
        std::vector<LinearTerm> terms;
        for (std::size_t i = 1; i < e.items.size(); ++i) { terms.push_back(parse_term(e.items[i], lookup)); }
        std::vector<Constraint> parts;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            for (std::size_t j = i + 1; j < terms.size(); ++j) { parts.push_back(ne(terms[i], terms[j])); }
        }
        return conj(std::move(parts));
    }
    throw UndeclaredSymbol(e.items.front().line, e.items.front().col, "unknown relation or operator '" + op + "'");
}

} // namespace hornitp
