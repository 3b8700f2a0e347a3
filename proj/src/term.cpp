#include "rippling/term.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>
#include <sstream>

#include "lexer.hpp"

namespace rippling {

// SymbolTable

void SymbolTable::declare(const Symbol& s) {
    if (s.name.empty()) throw TermError("empty symbol name");
    if (auto it = symbols_.find(s.name); it != symbols_.end()) {
        if (it->second.arity != s.arity)
            throw TermError("symbol '" + s.name + "' redeclared with arity " + std::to_string(s.arity) +
                            " (was " + std::to_string(it->second.arity) + ")");
        // A definition may upgrade a plain function symbol.
        if (s.kind != SymbolKind::function) it->second.kind = s.kind;
        return;
    }
    symbols_.emplace(s.name, s);
}

const Symbol* SymbolTable::find(std::string_view name) const {
    auto it = symbols_.find(name);
    return it == symbols_.end() ? nullptr : &it->second;
}

bool SymbolTable::is_declared_var(std::string_view name) const { return vars_.find(name) != vars_.end(); }

bool SymbolTable::is_variable_name(std::string_view name) const {
    if (name.empty()) return false;
    if (is_declared_var(name)) return true;
    if (find(name)) return false;
    return std::isupper(static_cast<unsigned char>(name.front())) != 0;
}

std::string format_position(const Position& p) {
    std::string s = "[";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(p[i]);
    }
    return s + "]";
}

// Term

Term Term::var(std::string name) {
    Term t;
    auto n = std::make_shared<Node>();
    n->is_var = true;
    n->name = std::move(name);
    t.node_ = std::move(n);
    return t;
}

Term Term::app(std::string head, std::vector<Term> args) {
    Term t;
    auto n = std::make_shared<Node>();
    n->name = std::move(head);
    for (const auto& a : args) {
        n->size += a.size();
        n->depth = std::max(n->depth, a.depth() + 1);
    }
    n->args = std::move(args);
    t.node_ = std::move(n);
    return t;
}

bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    if (a.node_->is_var != b.node_->is_var || a.node_->size != b.node_->size || a.name() != b.name() ||
        a.arity() != b.arity())
        return false;
    for (std::size_t i = 0; i < a.arity(); ++i)
        if (a.arg(i) != b.arg(i)) return false;
    return true;
}

int Term::compare(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return 0;
    if (a.is_var() != b.is_var()) return a.is_var() ? -1 : 1;
    if (int c = a.name().compare(b.name()); c != 0) return c < 0 ? -1 : 1;
    if (a.arity() != b.arity()) return a.arity() < b.arity() ? -1 : 1;
    for (std::size_t i = 0; i < a.arity(); ++i)
        if (int c = compare(a.arg(i), b.arg(i)); c != 0) return c;
    return 0;
}

namespace {

void format_into(const Term& t, std::string& out) {
    if (t.is_var() || t.is_constant()) {
        out += t.name();
        return;
    }
    out += '(';
    out += t.name();
    for (const auto& a : t.args()) {
        out += ' ';
        format_into(a, out);
    }
    out += ')';
}

Term parse_plain(detail::TokenStream& ts, SymbolTable& symtab) {
    using detail::Tok;
    const detail::Token& tok = ts.next();
    switch (tok.kind) {
        case Tok::atom: {
            if (symtab.is_variable_name(tok.text)) return Term::var(tok.text);
            const Symbol* s = symtab.find(tok.text);
            if (!s) {
                if (!symtab.auto_declare) throw TermError("unknown symbol '" + tok.text + "'", tok.offset);
                symtab.declare({tok.text, 0, SymbolKind::function});
                s = symtab.find(tok.text);
            }
            if (s->arity != 0)
                throw TermError("arity mismatch: '" + tok.text + "' expects " + std::to_string(s->arity) +
                                    " arguments, given 0",
                                tok.offset);
            return Term::app(tok.text);
        }
        case Tok::lparen: {
            const detail::Token head = ts.next();
            if (head.kind != Tok::atom) throw TermError("expected a head symbol after '('", head.offset);
            if (symtab.is_variable_name(head.text))
                throw TermError("variable '" + head.text + "' used as head", head.offset);
            std::vector<Term> args;
            while (ts.peek().kind != Tok::rparen) {
                if (ts.at_end()) throw TermError("unbalanced parentheses", ts.peek().offset);
                args.push_back(parse_plain(ts, symtab));
            }
            ts.next();
            const Symbol* s = symtab.find(head.text);
            if (!s) {
                if (!symtab.auto_declare) throw TermError("unknown symbol '" + head.text + "'", head.offset);
                symtab.declare({head.text, static_cast<int>(args.size()), SymbolKind::function});
                s = symtab.find(head.text);
            }
            if (static_cast<std::size_t>(s->arity) != args.size())
                throw TermError("arity mismatch: '" + head.text + "' expects " + std::to_string(s->arity) +
                                    " arguments, given " + std::to_string(args.size()),
                                head.offset);
            return Term::app(head.text, std::move(args));
        }
        case Tok::end: throw TermError("unexpected end of input", tok.offset);
        case Tok::rparen: throw TermError("unbalanced parentheses", tok.offset);
        default: throw TermError("unexpected '" + tok.text + "' in plain term", tok.offset);
    }
}

}  // namespace

std::string format_term(const Term& t) {
    std::string s;
    format_into(t, s);
    return s;
}

std::ostream& operator<<(std::ostream& os, const Term& t) { return os << format_term(t); }

Term parse_term(std::string_view text, SymbolTable& symtab) {
    detail::TokenStream ts(text);
    Term t = parse_plain(ts, symtab);
    if (!ts.at_end()) throw TermError("trailing input after term", ts.peek().offset);
    return t;
}

Equation Equation::from_term(const Term& t) {
    if (t.is_var() || t.name() != "=" || t.arity() != 2) throw TermError("not an equation: " + format_term(t));
    return {t.arg(0), t.arg(1)};
}

std::string format_equation(const Equation& e) { return format_term(e.lhs) + " = " + format_term(e.rhs); }

Equation parse_equation(std::string_view text, SymbolTable& symtab) {
    detail::TokenStream ts(text);
    if (ts.peek().kind == detail::Tok::lparen) {
        // `(= L R)` form; peek two ahead by re-tokenizing.
        auto toks = detail::tokenize(text);
        if (toks.size() > 1 && toks[1].kind == detail::Tok::atom && toks[1].text == "=") {
            ts.next();
            ts.next();
            Term l = parse_plain(ts, symtab);
            Term r = parse_plain(ts, symtab);
            ts.expect(detail::Tok::rparen, "')'");
            if (!ts.at_end()) throw TermError("trailing input after equation", ts.peek().offset);
            return {l, r};
        }
    }
    Term l = parse_plain(ts, symtab);
    const detail::Token& eq = ts.next();
    if (eq.kind != detail::Tok::atom || eq.text != "=") throw TermError("expected '='", eq.offset);
    Term r = parse_plain(ts, symtab);
    if (!ts.at_end()) throw TermError("trailing input after equation", ts.peek().offset);
    return {l, r};
}

// Positions

bool valid_position(const Term& t, const Position& p) {
    const Term* cur = &t;
    for (int i : p) {
        if (cur->is_var() || i < 1 || static_cast<std::size_t>(i) > cur->arity()) return false;
        cur = &cur->arg(i - 1);
    }
    return true;
}

const Term& subterm_at(const Term& t, const Position& p) {
    const Term* cur = &t;
    for (int i : p) {
        if (cur->is_var() || i < 1 || static_cast<std::size_t>(i) > cur->arity())
            throw TermError("invalid position " + format_position(p) + " in " + format_term(t));
        cur = &cur->arg(i - 1);
    }
    return *cur;
}

namespace {
Term replace_rec(const Term& t, const Position& p, std::size_t k, const Term& u) {
    if (k == p.size()) return u;
    int i = p[k];
    if (t.is_var() || i < 1 || static_cast<std::size_t>(i) > t.arity()) throw TermError("invalid position " + format_position(p));
    std::vector<Term> args = t.args();
    args[i - 1] = replace_rec(args[i - 1], p, k + 1, u);
    return Term::app(t.name(), std::move(args));
}

void positions_rec(const Term& t, Position& cur, std::vector<Position>& out) {
    out.push_back(cur);
    for (std::size_t i = 0; i < t.arity(); ++i) {
        cur.push_back(static_cast<int>(i + 1));
        positions_rec(t.arg(i), cur, out);
        cur.pop_back();
    }
}
}  // namespace

Term replace_at(const Term& t, const Position& p, const Term& u) { return replace_rec(t, p, 0, u); }

std::vector<Position> positions(const Term& t) {
    std::vector<Position> out;
    Position cur;
    positions_rec(t, cur, out);
    return out;
}

std::set<std::string> variables(const Term& t) {
    std::vector<std::string> v;
    collect_variables(t, v);
    return {v.begin(), v.end()};
}

void collect_variables(const Term& t, std::vector<std::string>& ordered) {
    if (t.is_var()) {
        if (std::find(ordered.begin(), ordered.end(), t.name()) == ordered.end()) ordered.push_back(t.name());
        return;
    }
    for (const auto& a : t.args()) collect_variables(a, ordered);
}

bool occurs(const std::string& var, const Term& t) {
    if (t.is_var()) return t.name() == var;
    for (const auto& a : t.args())
        if (occurs(var, a)) return true;
    return false;
}

// Substitution

const Term* Substitution::find(const std::string& v) const {
    auto it = map_.find(v);
    return it == map_.end() ? nullptr : &it->second;
}

void Substitution::normalize() {
    // Bindings produced by unification are acyclic, so repeated application
    // reaches a fixpoint within |dom| rounds.
    for (std::size_t round = 0; round <= map_.size(); ++round) {
        bool changed = false;
        for (auto& [v, t] : map_) {
            Term n = apply_subst(*this, t);
            if (n != t) {
                t = n;
                changed = true;
            }
        }
        if (!changed) break;
    }
    for (auto it = map_.begin(); it != map_.end();) {
        if (it->second.is_var() && it->second.name() == it->first)
            it = map_.erase(it);
        else
            ++it;
    }
}

bool Substitution::idempotent() const {
    for (const auto& [v, t] : map_)
        for (const auto& [w, u] : map_)
            if (occurs(v, u)) return false;
    return true;
}

bool operator<(const Substitution& a, const Substitution& b) {
    return std::lexicographical_compare(a.map_.begin(), a.map_.end(), b.map_.begin(), b.map_.end());
}

std::string format_subst(const Substitution& s) {
    std::string out = "{";
    bool first = true;
    for (const auto& [v, t] : s.bindings()) {
        if (!first) out += ", ";
        first = false;
        out += v + " -> " + format_term(t);
    }
    return out + "}";
}

Term apply_subst(const Substitution& s, const Term& t) {
    if (s.empty()) return t;
    if (t.is_var()) {
        const Term* b = s.find(t.name());
        return b ? *b : t;
    }
    if (t.is_constant()) return t;
    std::vector<Term> args;
    args.reserve(t.arity());
    bool changed = false;
    for (const auto& a : t.args()) {
        args.push_back(apply_subst(s, a));
        changed = changed || args.back() != a;
    }
    return changed ? Term::app(t.name(), std::move(args)) : t;
}

bool match_into(const Term& pattern, const Term& target, Substitution& s, const VarSet& rigid) {
    if (pattern.is_var() && !rigid.count(pattern.name())) {
        if (const Term* b = s.find(pattern.name())) return *b == target;
        s.bind(pattern.name(), target);
        return true;
    }
    if (pattern.is_var()) return target.is_var() && target.name() == pattern.name();
    if (target.is_var() || pattern.name() != target.name() || pattern.arity() != target.arity()) return false;
    for (std::size_t i = 0; i < pattern.arity(); ++i)
        if (!match_into(pattern.arg(i), target.arg(i), s, rigid)) return false;
    return true;
}

std::optional<Substitution> match_first_order(const Term& pattern, const Term& target, const VarSet& rigid) {
    Substitution s;
    if (!match_into(pattern, target, s, rigid)) return std::nullopt;
    return s;
}

namespace {

Term walk(const Term& t, const Substitution& s) {
    Term cur = t;
    while (cur.is_var()) {
        const Term* b = s.find(cur.name());
        if (!b) break;
        cur = *b;
    }
    return cur;
}

bool occurs_walk(const std::string& v, const Term& t, const Substitution& s) {
    Term w = walk(t, s);
    if (w.is_var()) return w.name() == v;
    for (const auto& a : w.args())
        if (occurs_walk(v, a, s)) return true;
    return false;
}

bool unify_rec(const Term& a, const Term& b, Substitution& s, const VarSet& rigid) {
    Term x = walk(a, s), y = walk(b, s);
    bool xflex = x.is_var() && !rigid.count(x.name());
    bool yflex = y.is_var() && !rigid.count(y.name());
    if (x.is_var() && y.is_var() && x.name() == y.name()) return true;
    if (xflex) {
        if (occurs_walk(x.name(), y, s)) return false;
        s.bind(x.name(), y);
        return true;
    }
    if (yflex) {
        if (occurs_walk(y.name(), x, s)) return false;
        s.bind(y.name(), x);
        return true;
    }
    if (x.is_var() || y.is_var()) return false;
    if (x.name() != y.name() || x.arity() != y.arity()) return false;
    for (std::size_t i = 0; i < x.arity(); ++i)
        if (!unify_rec(x.arg(i), y.arg(i), s, rigid)) return false;
    return true;
}

}  // namespace

std::optional<Substitution> unify_first_order(const Term& s, const Term& t, const VarSet& rigid) {
    Substitution sub;
    if (!unify_rec(s, t, sub, rigid)) return std::nullopt;
    sub.normalize();
    return sub;
}

Substitution rename_apart(const Term& t, const std::set<std::string>& avoid) {
    Substitution r;
    std::set<std::string> used = avoid;
    for (const auto& v : variables(t)) used.insert(v);
    std::vector<std::string> vs;
    collect_variables(t, vs);
    for (const auto& v : vs) {
        if (!avoid.count(v)) continue;
        for (int k = 1;; ++k) {
            std::string cand = v + std::to_string(k);
            if (!used.count(cand)) {
                used.insert(cand);
                r.bind(v, Term::var(cand));
                break;
            }
        }
    }
    return r;
}

}  // namespace rippling
