#include "rippling/theory.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "lexer.hpp"

namespace rippling {

TheoryError::TheoryError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(line ? std::to_string(line) + ":" + std::to_string(column) + ": " + what : what),
      line_(line),
      column_(column) {}

const char* to_string(LemmaStatus s) {
    switch (s) {
        case LemmaStatus::unproved: return "unproved";
        case LemmaStatus::proved: return "proved";
        case LemmaStatus::assumed: return "assumed";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Theory queries

const Datatype* Theory::datatype(const std::string& sort) const {
    for (const auto& d : datatypes)
        if (d.name == sort) return &d;
    return nullptr;
}

std::optional<std::pair<const Datatype*, const Constructor*>> Theory::constructor(const std::string& name) const {
    for (const auto& d : datatypes)
        for (const auto& c : d.constructors)
            if (c.name == name) return std::make_pair(&d, &c);
    return std::nullopt;
}

bool Theory::is_defined(const std::string& symbol) const {
    const Symbol* s = symbols.find(symbol);
    return s && s->kind == SymbolKind::defined;
}

std::string Theory::sort_of(const Term& t) const {
    if (t.is_var()) {
        auto it = var_sorts.find(t.name());
        return it == var_sorts.end() ? "" : it->second;
    }
    if (auto c = constructor(t.name())) return c->first->name;
    auto it = signatures.find(t.name());
    return it == signatures.end() ? "" : it->second.result;
}

namespace {

void infer_var_sorts(const Theory& th, const Term& t, std::map<std::string, std::string>& out) {
    if (t.is_var()) return;
    std::vector<std::string> sorts;
    if (auto c = th.constructor(t.name()))
        sorts = c->second->arg_sorts;
    else if (auto it = th.signatures.find(t.name()); it != th.signatures.end())
        sorts = it->second.arg_sorts;
    for (std::size_t i = 0; i < t.arity(); ++i) {
        const Term& a = t.arg(i);
        if (a.is_var() && i < sorts.size() && !sorts[i].empty()) out.emplace(a.name(), sorts[i]);
        infer_var_sorts(th, a, out);
    }
}

}  // namespace

std::map<std::string, std::string> Theory::variable_sorts(const Term& t) const {
    std::map<std::string, std::string> out;
    for (const auto& v : variables(t))
        if (auto it = var_sorts.find(v); it != var_sorts.end()) out[v] = it->second;
    infer_var_sorts(*this, t, out);
    return out;
}

const Rule* Theory::find_conjecture(const std::string& name) const {
    for (const auto& c : conjectures)
        if (c.name == name) return &c;
    return nullptr;
}

const Lemma* Theory::find_lemma(const std::string& name) const {
    for (const auto& l : lemmas)
        if (l.rule.name == name) return &l;
    return nullptr;
}

Lemma* Theory::find_lemma(const std::string& name) {
    for (auto& l : lemmas)
        if (l.rule.name == name) return &l;
    return nullptr;
}

std::vector<Rule> Theory::rewrite_rules() const {
    std::vector<Rule> out = definitions;
    for (const auto& l : lemmas)
        if (l.status != LemmaStatus::unproved) out.push_back(l.rule);
    return out;
}

std::vector<WaveRule> Theory::wave_rules() const {
    std::vector<WaveRule> out;
    for (const auto& r : rewrite_rules()) {
        auto rs = derive_wave_rules(r.eq, r.name);
        out.insert(out.end(), rs.begin(), rs.end());
    }
    return out;
}

void Theory::add_lemma(const Rule& r, LemmaStatus s) {
    if (Lemma* l = find_lemma(r.name)) {
        l->rule = r;
        l->status = s;
        return;
    }
    lemmas.push_back({r, s});
}

void Theory::infer_signatures() {
    signatures.clear();
    std::map<std::string, std::size_t> arity;
    for (const auto& d : definitions) arity[d.eq.lhs.name()] = d.eq.lhs.arity();
    for (const auto& [f, n] : arity) signatures[f].arg_sorts.assign(n, "");
    for (const auto& d : definitions) {
        auto& sig = signatures[d.eq.lhs.name()];
        for (std::size_t i = 0; i < d.eq.lhs.arity(); ++i)
            if (sig.arg_sorts[i].empty()) sig.arg_sorts[i] = sort_of(d.eq.lhs.arg(i));
    }
    // Result sorts may depend on each other through recursive calls.
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& d : definitions) {
            auto& sig = signatures[d.eq.lhs.name()];
            if (!sig.result.empty()) continue;
            sig.result = sort_of(d.eq.rhs);
            changed = changed || !sig.result.empty();
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Sexp {
    bool atom = false;
    std::string text;
    std::vector<Sexp> items;
    std::size_t begin = 0, end = 0;
};

struct Reader {
    std::string_view src;
    std::vector<detail::Token> toks;
    std::size_t pos = 0;

    std::pair<std::size_t, std::size_t> line_col(std::size_t offset) const {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < offset && i < src.size(); ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        return {line, col};
    }

    [[noreturn]] void fail(const std::string& msg, std::size_t offset) const {
        auto [l, c] = line_col(offset);
        throw TheoryError(msg, l, c);
    }

    Sexp read() {
        const auto& t = toks[pos];
        switch (t.kind) {
            case detail::Tok::atom: {
                ++pos;
                Sexp s;
                s.atom = true;
                s.text = t.text;
                s.begin = t.offset;
                s.end = t.offset + t.text.size();
                return s;
            }
            case detail::Tok::lparen: {
                Sexp s;
                s.begin = t.offset;
                ++pos;
                while (toks[pos].kind != detail::Tok::rparen) {
                    if (toks[pos].kind == detail::Tok::end) fail("unbalanced parentheses", s.begin);
                    s.items.push_back(read());
                }
                s.end = toks[pos].offset + 1;
                ++pos;
                return s;
            }
            case detail::Tok::end: fail("unexpected end of input", t.offset);
            default: fail("unexpected '" + t.text + "'", t.offset);
        }
    }
};

class Loader {
public:
    explicit Loader(std::string_view text) : r_{text, {}, 0} {
        try {
            r_.toks = detail::tokenize(text);
        } catch (const TermError& e) {
            r_.fail(e.what(), e.offset());
        }
    }

    Theory run() {
        std::vector<Sexp> forms;
        while (r_.toks[r_.pos].kind != detail::Tok::end) forms.push_back(r_.read());
        for (const auto& f : forms) {
            if (f.atom || f.items.empty() || !f.items[0].atom) r_.fail("expected a declaration form", f.begin);
        }
        for (const auto& f : forms)
            if (head(f) == "datatype") datatype(f);
        for (const auto& f : forms)
            if (head(f) == "vars") vars(f);
        for (const auto& f : forms)
            if (head(f) == "def") declare_def(f);
        std::map<std::string, std::size_t> counts;
        for (const auto& f : forms)
            if (head(f) == "def") ++counts[f.items[1].items[0].text];
        std::map<std::string, std::size_t> seen;
        std::set<std::string> names;
        for (const auto& f : forms) {
            const std::string h = head(f);
            if (h == "datatype" || h == "vars") continue;
            if (h == "def") {
                if (f.items.size() != 3) r_.fail("def expects a left and a right side", f.begin);
                Equation eq{term(f.items[1]), term(f.items[2])};
                const std::string& fn = eq.lhs.name();
                std::string name = counts[fn] == 1 ? fn : fn + "." + std::to_string(++seen[fn]);
                th_.definitions.push_back({name, eq});
                continue;
            }
            if (h == "lemma" || h == "conjecture") {
                if (f.items.size() != 4 || !f.items[1].atom) r_.fail(h + " expects a name and two sides", f.begin);
                const std::string& name = f.items[1].text;
                if (!names.insert(name).second) r_.fail("duplicate name '" + name + "'", f.items[1].begin);
                Rule rule{name, {term(f.items[2]), term(f.items[3])}};
                if (h == "lemma")
                    th_.lemmas.push_back({rule, LemmaStatus::unproved});
                else
                    th_.conjectures.push_back(rule);
                continue;
            }
            r_.fail("unknown declaration '" + h + "'", f.begin);
        }
        th_.infer_signatures();
        return std::move(th_);
    }

private:
    static std::string head(const Sexp& f) { return f.items[0].text; }

    void datatype(const Sexp& f) {
        if (f.items.size() < 3 || !f.items[1].atom) r_.fail("datatype expects a name and constructors", f.begin);
        Datatype d{f.items[1].text, {}};
        if (th_.datatype(d.name)) r_.fail("duplicate datatype '" + d.name + "'", f.items[1].begin);
        for (std::size_t i = 2; i < f.items.size(); ++i) {
            const Sexp& c = f.items[i];
            if (c.atom || c.items.empty() || !c.items[0].atom) r_.fail("expected (constructor sort...)", c.begin);
            Constructor k{c.items[0].text, {}};
            for (std::size_t j = 1; j < c.items.size(); ++j) {
                if (!c.items[j].atom) r_.fail("expected a sort name", c.items[j].begin);
                k.arg_sorts.push_back(c.items[j].text);
            }
            if (th_.symbols.find(k.name)) r_.fail("duplicate symbol '" + k.name + "'", c.begin);
            th_.symbols.declare({k.name, static_cast<int>(k.arg_sorts.size()), SymbolKind::constructor});
            d.constructors.push_back(std::move(k));
        }
        th_.datatypes.push_back(std::move(d));
    }

    void vars(const Sexp& f) {
        std::string sort;
        std::size_t end = f.items.size();
        for (std::size_t i = 1; i < f.items.size(); ++i) {
            if (!f.items[i].atom) r_.fail("expected a variable name", f.items[i].begin);
            if (f.items[i].text == ":") {
                if (i + 2 != f.items.size()) r_.fail("expected one sort after ':'", f.items[i].begin);
                sort = f.items[i + 1].text;
                end = i;
                break;
            }
        }
        for (std::size_t i = 1; i < end; ++i) {
            const std::string& v = f.items[i].text;
            if (th_.symbols.find(v)) r_.fail("'" + v + "' is already a function symbol", f.items[i].begin);
            th_.symbols.declare_var(v);
            if (!th_.var_sorts.count(v)) th_.var_order.push_back(v);
            if (!sort.empty()) th_.var_sorts[v] = sort;
        }
    }

    void declare_def(const Sexp& f) {
        if (f.items.size() < 2 || f.items[1].atom || f.items[1].items.empty() || !f.items[1].items[0].atom)
            r_.fail("def left side must be an application", f.begin);
        const Sexp& lhs = f.items[1];
        const std::string& name = lhs.items[0].text;
        int arity = static_cast<int>(lhs.items.size()) - 1;
        if (const Symbol* s = th_.symbols.find(name)) {
            if (s->kind != SymbolKind::defined) r_.fail("'" + name + "' cannot be defined here", lhs.begin);
            if (s->arity != arity) r_.fail("arity mismatch for '" + name + "'", lhs.begin);
            return;
        }
        if (th_.symbols.is_declared_var(name)) r_.fail("'" + name + "' is a variable", lhs.begin);
        th_.symbols.declare({name, arity, SymbolKind::defined});
    }

    Term term(const Sexp& s) {
        try {
            return parse_term(r_.src.substr(s.begin, s.end - s.begin), th_.symbols);
        } catch (const TermError& e) {
            r_.fail(e.what(), s.begin + e.offset());
        }
    }

    Reader r_;
    Theory th_;
};

}  // namespace

Theory parse_theory(std::string_view text) { return Loader(text).run(); }

Theory load_theory(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TheoryError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_theory(ss.str());
    } catch (const TheoryError& e) {
        throw TheoryError(path + ":" + e.what());
    }
}

// ---------------------------------------------------------------------------
// Checking

namespace {

// A missing pattern vector for the rows, or nullopt when the rows cover
// every constructor instance.
std::optional<std::vector<std::string>> missing_case(const Theory& th, const std::vector<std::vector<Term>>& rows,
                                                     std::size_t width) {
    if (width == 0) {
        if (rows.empty()) return std::vector<std::string>{};
        return std::nullopt;
    }
    const Datatype* dt = nullptr;
    for (const auto& r : rows)
        if (r[0].is_app())
            if (auto c = th.constructor(r[0].name())) {
                dt = c->first;
                break;
            }
    if (!dt) {
        std::vector<std::vector<Term>> rest;
        for (const auto& r : rows)
            if (r[0].is_var() || !th.constructor(r[0].name())) rest.emplace_back(r.begin() + 1, r.end());
        auto w = missing_case(th, rest, width - 1);
        if (w) w->insert(w->begin(), "_");
        return w;
    }
    for (const auto& c : dt->constructors) {
        const std::size_t k = c.arg_sorts.size();
        std::vector<std::vector<Term>> sub;
        for (const auto& r : rows) {
            std::vector<Term> row;
            if (r[0].is_app() && r[0].name() == c.name) {
                row = r[0].args();
            } else if (r[0].is_var() || !th.constructor(r[0].name())) {
                row.assign(k, Term::var("_"));
            } else {
                continue;
            }
            row.insert(row.end(), r.begin() + 1, r.end());
            sub.push_back(std::move(row));
        }
        if (auto w = missing_case(th, sub, k + width - 1)) {
            std::string pat = k == 0 ? c.name : "(" + c.name;
            for (std::size_t i = 0; i < k; ++i) pat += " " + (*w)[i];
            if (k) pat += ")";
            std::vector<std::string> out{pat};
            out.insert(out.end(), w->begin() + static_cast<long>(k), w->end());
            return out;
        }
    }
    return std::nullopt;
}

bool constructor_pattern(const Theory& th, const Term& t) {
    if (t.is_var()) return true;
    if (!th.constructor(t.name())) return false;
    for (const auto& a : t.args())
        if (!constructor_pattern(th, a)) return false;
    return true;
}

}  // namespace

std::vector<std::string> check_theory(const Theory& th) {
    std::vector<std::string> problems;
    std::map<std::string, std::vector<std::vector<Term>>> rows;
    std::vector<std::string> order;
    for (const auto& d : th.definitions) {
        const Term& l = d.eq.lhs;
        if (!th.is_defined(l.name())) problems.push_back(d.name + ": head '" + l.name() + "' is not a defined symbol");
        std::vector<std::string> seen;
        collect_variables(l, seen);
        std::set<std::string> uniq(seen.begin(), seen.end());
        if (uniq.size() != seen.size()) problems.push_back(d.name + ": left side is not linear");
        for (const auto& a : l.args())
            if (!constructor_pattern(th, a)) {
                problems.push_back(d.name + ": argument " + format_term(a) + " is not a constructor pattern");
                break;
            }
        for (const auto& v : variables(d.eq.rhs))
            if (!uniq.count(v)) problems.push_back(d.name + ": right side variable '" + v + "' is unbound");
        if (!rows.count(l.name())) order.push_back(l.name());
        rows[l.name()].push_back(l.args());
    }
    for (const auto& f : order) {
        const std::size_t n = rows[f].front().size();
        if (auto w = missing_case(th, rows[f], n)) {
            std::string pat = "(" + f;
            for (const auto& p : *w) pat += " " + p;
            problems.push_back("definition of " + f + " is not constructor-complete: missing case " + pat + ")");
        }
    }
    return problems;
}

// ---------------------------------------------------------------------------
// Rewriting

namespace {

bool rewrite_at(const Term& t, const Position& p, const std::vector<Rule>& rules, const Term& root,
                RewriteStep& out) {
    for (const auto& r : rules) {
        auto m = match_first_order(r.eq.lhs, t);
        if (!m) continue;
        Term rep = apply_subst(*m, r.eq.rhs);
        out = {r.name, r.eq, p, *m, root, replace_at(root, p, rep)};
        return true;
    }
    return false;
}

bool find_redex(const Term& t, Position& p, const std::vector<Rule>& rules, const Term& root, Strategy s,
                RewriteStep& out) {
    if (s == Strategy::leftmost_outermost && rewrite_at(t, p, rules, root, out)) return true;
    for (std::size_t i = 0; i < t.arity(); ++i) {
        p.push_back(static_cast<int>(i + 1));
        bool found = find_redex(t.arg(i), p, rules, root, s, out);
        p.pop_back();
        if (found) return true;
    }
    return s == Strategy::leftmost_innermost && rewrite_at(t, p, rules, root, out);
}

}  // namespace

Term simplify(const Term& t, const std::vector<Rule>& rules, std::size_t bound, std::vector<RewriteStep>* steps,
              Strategy strategy) {
    Term cur = t;
    for (std::size_t n = 0;; ++n) {
        RewriteStep st;
        Position p;
        if (!find_redex(cur, p, rules, cur, strategy, st)) return cur;
        if (n == bound) throw BoundExceeded(bound);
        cur = st.after;
        if (steps) steps->push_back(std::move(st));
    }
}

namespace {

std::string format_goal_term(const Term& t) {
    if (t.is_app() && t.name() == "=" && t.arity() == 2) return format_equation(Equation::from_term(t));
    return format_term(t);
}

}  // namespace

std::string format_rewrite_step(const RewriteStep& s) {
    return s.rule + " " + format_position(s.position) + " " + format_goal_term(s.before) + " => " +
           format_goal_term(s.after);
}

}  // namespace rippling
