#include "hornitp/chc.h"

#include <fstream>
#include <sstream>

namespace hornitp {

Sort parse_sort(const SExpr & e) {
    if (e.is_symbol("Int")) { return Sort::Int; }
    if (e.is_symbol("Real")) { return Sort::Real; }
    e.fail("unsupported sort " + to_string(e));
}

std::vector<Var> parse_binders(const SExpr & list) {
    if (!list.is_list()) { list.fail("expected a variable list"); }
    std::vector<Var> out;
    for (auto const & b : list.items) {
        if (!b.is_list() || b.items.size() != 2 || !b.items[0].is_symbol()) { b.fail("malformed binder " + to_string(b)); }
        out.emplace_back(b.items[0].text, parse_sort(b.items[1]));
    }
    return out;
}

std::string print_binders(const std::vector<Var> & vars) {
    std::string s = "(";
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (i) { s += ' '; }
        s += "(" + quote_symbol(vars[i].name) + " " + to_string(vars[i].sort) + ")";
    }
    return s + ")";
}

std::string read_file(const std::string & path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) { throw Error("cannot open " + path); }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

class ChcReader {
public:
    ClauseSet run(std::string_view text) {
        for (auto const & cmd : read_sexprs(text)) {
            if (!cmd.is_list() || cmd.items.empty() || !cmd.items[0].is_symbol()) { cmd.fail("expected a command"); }
            std::string const & op = cmd.items[0].text;
            if (op == "set-logic" || op == "set-info" || op == "set-option" || op == "check-sat" || op == "exit" ||
                op == "get-model") {
                continue;
            }
            if (op == "declare-fun") {
                declare(cmd);
            } else if (op == "assert") {
                if (cmd.items.size() != 2) { cmd.fail("assert takes one argument"); }
                assertion(cmd.items[1]);
            } else {
                cmd.fail("unsupported command '" + op + "'");
            }
        }
        return std::move(hc_);
    }

private:
    ClauseSet hc_;
    std::map<std::string, Var> scope_;

    void declare(const SExpr & cmd) {
        if (cmd.items.size() != 4 || !cmd.items[1].is_symbol() || !cmd.items[2].is_list()) {
            cmd.fail("malformed declare-fun");
        }
        if (!cmd.items[3].is_symbol("Bool")) { cmd.fail("only Bool-valued relations can be declared"); }
        RelationSymbol r{cmd.items[1].text, {}};
        for (auto const & s : cmd.items[2].items) { r.arg_sorts.push_back(parse_sort(s)); }
        if (hc_.has_relation(r.name)) { cmd.fail("relation " + r.name + " declared twice"); }
        hc_.declare(r);
    }

    bool is_relation(const SExpr & e) const {
        if (e.is_symbol()) { return hc_.has_relation(e.text) && !scope_.count(e.text); }
        return e.is_list() && !e.items.empty() && e.items[0].is_symbol() && hc_.has_relation(e.items[0].text);
    }

    bool mentions_relation(const SExpr & e) const {
        if (is_relation(e)) { return true; }
        if (e.is_list()) {
            for (std::size_t i = 1; i < e.items.size(); ++i) {
                if (mentions_relation(e.items[i])) { return true; }
            }
        }
        return false;
    }

    VarLookup lookup() const {
        return [this](const std::string & name) -> const Var * {
            auto it = scope_.find(name);
            return it == scope_.end() ? nullptr : &it->second;
        };
    }

    RelationAtom relation_atom(const SExpr & e) const {
        RelationAtom a;
        if (e.is_symbol()) {
            a.symbol = e.text;
        } else {
            a.symbol = e.items[0].text;
            for (std::size_t i = 1; i < e.items.size(); ++i) { a.args.push_back(parse_term(e.items[i], lookup())); }
        }
        const RelationSymbol & r = hc_.relation(a.symbol);
        if (a.args.size() != r.arity()) { e.fail("wrong number of arguments for " + a.symbol); }
        for (std::size_t i = 0; i < a.args.size(); ++i) {
            if (r.arg_sorts[i] == Sort::Int && !a.args[i].is_integral()) {
                throw SortError("argument " + std::to_string(i + 1) + " of " + a.symbol + " must be an Int term");
            }
        }
        return a;
    }

    void body_items(const SExpr & e, std::vector<Constraint> & constraints, std::vector<RelationAtom> & atoms) const {
        if (e.is_call("and")) {
            for (std::size_t i = 1; i < e.items.size(); ++i) { body_items(e.items[i], constraints, atoms); }
            return;
        }
        if (is_relation(e)) {
            atoms.push_back(relation_atom(e));
            return;
        }
        if (mentions_relation(e)) { e.fail("relation atoms may only occur conjunctively in a clause body"); }
        constraints.push_back(parse_constraint(e, lookup()));
    }

    void assertion(const SExpr & e) {
        scope_.clear();
        const SExpr * f = &e;
        if (e.is_call("forall")) {
            if (e.items.size() != 3) { e.fail("malformed forall"); }
            for (auto const & v : parse_binders(e.items[1])) {
                if (!scope_.emplace(v.name, v).second) { e.fail("variable " + v.name + " bound twice"); }
            }
            f = &e.items[2];
        }
        HornClause h;
        std::vector<Constraint> constraints;
        const SExpr * head = f;
        if (f->is_call("=>")) {
            if (f->items.size() != 3) { f->fail("'=>' takes two arguments"); }
            body_items(f->items[1], constraints, h.body);
            head = &f->items[2];
        } else if (f->is_call("not") && f->items.size() == 2) {
            body_items(f->items[1], constraints, h.body);
            head = nullptr;
        }
        if (head) {
            if (head->is_symbol("false")) {
                // query clause
            } else if (is_relation(*head)) {
                h.head = relation_atom(*head);
            } else if (mentions_relation(*head)) {
                head->fail("clause head is not a single relation atom (not Horn)");
            } else {
                constraints.push_back(negate(parse_constraint(*head, lookup())));
            }
        }
        h.constraint = conj(std::move(constraints));
        hc_.add(std::move(h));
    }
};

} // namespace

ClauseSet parse_chc(std::string_view text) { return ChcReader().run(text); }

namespace {

std::string atom_sexpr(const RelationAtom & a) {
    if (a.args.empty()) { return quote_symbol(a.symbol); }
    std::string s = "(" + quote_symbol(a.symbol);
    for (auto const & t : a.args) { s += " " + to_sexpr(t); }
    return s + ")";
}

} // namespace

std::string print_chc(const ClauseSet & hc) {
    std::ostringstream out;
    out << "(set-logic HORN)\n";
    for (auto const & [name, r] : hc.relations()) {
        out << "(declare-fun " << quote_symbol(name) << " (";
        for (std::size_t i = 0; i < r.arg_sorts.size(); ++i) { out << (i ? " " : "") << to_string(r.arg_sorts[i]); }
        out << ") Bool)\n";
    }
    for (auto const & h : hc.clauses()) {
        VarSet vs = h.vars();
        std::vector<std::string> body;
        if (!h.constraint.is_true()) { body.push_back(to_sexpr(h.constraint)); }
        for (auto const & b : h.body) { body.push_back(atom_sexpr(b)); }
        std::string body_s;
        if (body.empty()) {
            body_s = "true";
        } else if (body.size() == 1) {
            body_s = body[0];
        } else {
            body_s = "(and";
            for (auto const & b : body) { body_s += " " + b; }
            body_s += ")";
        }
        std::string f = "(=> " + body_s + " " + (h.head ? atom_sexpr(*h.head) : "false") + ")";
        if (!vs.empty()) { f = "(forall " + print_binders({vs.begin(), vs.end()}) + " " + f + ")"; }
        out << "(assert " << f << ")\n";
    }
    out << "(check-sat)\n";
    return out.str();
}

Solution parse_solution(std::string_view text, const ClauseSet & hc) {
    Solution sol;
    auto exprs = read_sexprs(text);
    // solver output starts with the verdict
    if (!exprs.empty() && exprs.front().is_symbol("sat")) { exprs.erase(exprs.begin()); }
    for (auto const & e : exprs) {
        bool rel = e.is_call("define-rel");
        bool fun = e.is_call("define-fun");
        if (!rel && !fun) { e.fail("expected define-rel or define-fun"); }
        std::size_t const n = rel ? 4 : 5;
        if (e.items.size() != n || !e.items[1].is_symbol()) { e.fail("malformed definition"); }
        if (fun && !e.items[3].is_symbol("Bool")) { e.fail("definitions must be Bool-valued"); }
        std::string const & name = e.items[1].text;
        if (!hc.has_relation(name)) { throw UndeclaredSymbol(e.items[1].line, e.items[1].col, "unknown relation " + name); }
        Definition d;
        d.params = parse_binders(e.items[2]);
        std::map<std::string, Var> scope;
        for (auto const & v : d.params) { scope.emplace(v.name, v); }
        d.body = parse_constraint(e.items[n - 1], [&](const std::string & s) -> const Var * {
            auto it = scope.find(s);
            return it == scope.end() ? nullptr : &it->second;
        });
        check_definition(hc.relation(name), d);
        if (!sol.defs.emplace(name, std::move(d)).second) { e.fail("relation " + name + " defined twice"); }
    }
    return sol;
}

std::string print_solution(const Solution & sol, const ClauseSet & hc) {
    std::ostringstream out;
    for (auto const & [name, d] : sol.defs) {
        if (!hc.has_relation(name)) { continue; }
        out << "(define-rel " << quote_symbol(name) << " " << print_binders(d.params) << " " << to_sexpr(d.body) << ")\n";
    }
    return out.str();
}

} // namespace hornitp
