#include "rippling/annotation.hpp"

#include <algorithm>
#include <ostream>

#include "lexer.hpp"

namespace rippling {

AnnTerm AnnTerm::make(Node n) {
    n.size = 1;
    n.annotated = n.front || n.hole;
    for (const auto& a : n.args) {
        n.size += a.size();
        n.annotated = n.annotated || a.annotated();
    }
    AnnTerm t;
    t.node_ = std::make_shared<const Node>(std::move(n));
    return t;
}

AnnTerm AnnTerm::var(std::string name, bool hole) {
    Node n;
    n.is_var = true;
    n.name = std::move(name);
    n.hole = hole;
    return make(std::move(n));
}

AnnTerm AnnTerm::app(std::string head, std::vector<AnnTerm> args, bool front, bool hole) {
    Node n;
    n.name = std::move(head);
    n.args = std::move(args);
    n.front = front;
    n.hole = hole;
    return make(std::move(n));
}

AnnTerm AnnTerm::plain(const Term& t) {
    if (t.is_var()) return var(t.name());
    std::vector<AnnTerm> args;
    args.reserve(t.arity());
    for (const auto& a : t.args()) args.push_back(plain(a));
    return app(t.name(), std::move(args));
}

AnnTerm AnnTerm::with_hole(bool h) const {
    if (hole() == h) return *this;
    Node n = *node_;
    n.hole = h;
    return make(std::move(n));
}

AnnTerm AnnTerm::with_front(bool f) const {
    if (front() == f) return *this;
    Node n = *node_;
    n.front = f;
    return make(std::move(n));
}

AnnTerm AnnTerm::with_args(std::vector<AnnTerm> args) const {
    Node n = *node_;
    n.args = std::move(args);
    return make(std::move(n));
}

bool operator==(const AnnTerm& a, const AnnTerm& b) { return AnnTerm::compare(a, b) == 0; }

int AnnTerm::compare(const AnnTerm& a, const AnnTerm& b) {
    if (a.node_ == b.node_) return 0;
    if (a.is_var() != b.is_var()) return a.is_var() ? -1 : 1;
    if (int c = a.name().compare(b.name()); c != 0) return c < 0 ? -1 : 1;
    if (a.front() != b.front()) return a.front() ? 1 : -1;
    if (a.hole() != b.hole()) return a.hole() ? 1 : -1;
    if (a.arity() != b.arity()) return a.arity() < b.arity() ? -1 : 1;
    for (std::size_t i = 0; i < a.arity(); ++i)
        if (int c = compare(a.arg(i), b.arg(i)); c != 0) return c;
    return 0;
}

// Printing and parsing

namespace {

void format_into(const AnnTerm& t, std::string& out) {
    if (t.hole()) out += '[';
    if (t.is_var()) {
        out += t.name();
    } else if (t.front()) {
        out += '{';
        out += t.name();
        for (const auto& a : t.args()) {
            out += ' ';
            format_into(a, out);
        }
        out += '}';
    } else if (t.arity() == 0) {
        out += t.name();
    } else {
        out += '(';
        out += t.name();
        for (const auto& a : t.args()) {
            out += ' ';
            format_into(a, out);
        }
        out += ')';
    }
    if (t.hole()) out += ']';
}

AnnTerm parse_ann(detail::TokenStream& ts, SymbolTable& symtab) {
    using detail::Tok;
    const detail::Token tok = ts.next();
    switch (tok.kind) {
        case Tok::atom: {
            try {
                return AnnTerm::plain(parse_term(tok.text, symtab));
            } catch (const TermError& e) {
                throw TermError(e.what(), tok.offset);
            }
        }
        case Tok::lbracket: {
            if (ts.peek().kind == Tok::lbracket) throw TermError("a wavehole cannot directly contain a wavehole", ts.peek().offset);
            AnnTerm inner = parse_ann(ts, symtab);
            ts.expect(Tok::rbracket, "']'");
            return inner.with_hole(true);
        }
        case Tok::lparen:
        case Tok::lbrace: {
            const bool front = tok.kind == Tok::lbrace;
            const Tok close = front ? Tok::rbrace : Tok::rparen;
            const detail::Token head = ts.next();
            if (head.kind != Tok::atom) throw TermError("expected a head symbol", head.offset);
            if (symtab.is_variable_name(head.text))
                throw TermError("variable '" + head.text + "' used as head", head.offset);
            std::vector<AnnTerm> args;
            while (ts.peek().kind != close) {
                if (ts.at_end()) throw TermError(front ? "unbalanced braces" : "unbalanced parentheses", ts.peek().offset);
                if (ts.peek().kind == Tok::rparen || ts.peek().kind == Tok::rbrace || ts.peek().kind == Tok::rbracket)
                    throw TermError("mismatched '" + ts.peek().text + "'", ts.peek().offset);
                args.push_back(parse_ann(ts, symtab));
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
            return AnnTerm::app(head.text, std::move(args), front);
        }
        case Tok::end: throw TermError("unexpected end of input", tok.offset);
        default: throw TermError("unexpected '" + tok.text + "'", tok.offset);
    }
}

}  // namespace

std::string format_annotated(const AnnTerm& t) {
    std::string s;
    format_into(t, s);
    return s;
}

std::string format_annotated_goal(const AnnTerm& t) {
    if (t.is_app() && t.name() == "=" && t.arity() == 2 && !t.front() && !t.hole())
        return format_annotated(t.arg(0)) + " = " + format_annotated(t.arg(1));
    return format_annotated(t);
}

std::ostream& operator<<(std::ostream& os, const AnnTerm& t) { return os << format_annotated(t); }

AnnTerm parse_annotated(std::string_view text, SymbolTable& symtab) {
    detail::TokenStream ts(text);
    AnnTerm t = parse_ann(ts, symtab);
    if (!ts.at_end()) throw TermError("trailing input after term", ts.peek().offset);
    return t;
}

AnnTerm parse_annotated_goal(std::string_view text, SymbolTable& symtab) {
    auto toks = detail::tokenize(text);
    detail::TokenStream ts(text);
    if (toks.size() > 2 && toks[0].kind == detail::Tok::lparen && toks[1].kind == detail::Tok::atom && toks[1].text == "=") {
        ts.next();
        ts.next();
        AnnTerm l = parse_ann(ts, symtab);
        AnnTerm r = parse_ann(ts, symtab);
        ts.expect(detail::Tok::rparen, "')'");
        if (!ts.at_end()) throw TermError("trailing input after goal", ts.peek().offset);
        return AnnTerm::app("=", {l, r});
    }
    AnnTerm l = parse_ann(ts, symtab);
    if (ts.at_end()) return l;
    const detail::Token eq = ts.next();
    if (eq.kind != detail::Tok::atom || eq.text != "=") throw TermError("expected '='", eq.offset);
    AnnTerm r = parse_ann(ts, symtab);
    if (!ts.at_end()) throw TermError("trailing input after goal", ts.peek().offset);
    return AnnTerm::app("=", {l, r});
}

Term erase(const AnnTerm& t) {
    if (t.is_var()) return Term::var(t.name());
    std::vector<Term> args;
    args.reserve(t.arity());
    for (const auto& a : t.args()) args.push_back(erase(a));
    return Term::app(t.name(), std::move(args));
}

// Well-formedness

const char* to_string(WatViolation v) {
    switch (v) {
        case WatViolation::none: return "none";
        case WatViolation::hole_existence: return "hole-existence";
        case WatViolation::nested_wavefront: return "nested-wavefront";
        case WatViolation::stray_hole: return "hole-outside-wavefront";
        case WatViolation::variable_wavefront: return "variable-wavefront";
    }
    return "?";
}

namespace {

struct WatWalker {
    WatReport report;
    Position pos;

    bool fail(WatViolation v) {
        report.violation = v;
        report.position = pos;
        return false;
    }

    // Node reached in skeleton context; the hole flag, if any, has been
    // accounted for by the caller.
    bool skeleton(const AnnTerm& t) {
        if (t.front()) {
            if (t.is_var()) return fail(WatViolation::variable_wavefront);
            std::size_t holes = 0;
            for (std::size_t i = 0; i < t.arity(); ++i) {
                pos.push_back(static_cast<int>(i + 1));
                if (!material(t.arg(i), holes)) return false;
                pos.pop_back();
            }
            if (holes == 0) return fail(WatViolation::hole_existence);
            return true;
        }
        for (std::size_t i = 0; i < t.arity(); ++i) {
            pos.push_back(static_cast<int>(i + 1));
            if (t.arg(i).hole()) return fail(WatViolation::stray_hole);
            if (!skeleton(t.arg(i))) return false;
            pos.pop_back();
        }
        return true;
    }

    bool material(const AnnTerm& t, std::size_t& holes) {
        if (t.hole()) {
            ++holes;
            return skeleton(t);
        }
        if (t.front()) return fail(WatViolation::nested_wavefront);
        for (std::size_t i = 0; i < t.arity(); ++i) {
            pos.push_back(static_cast<int>(i + 1));
            if (!material(t.arg(i), holes)) return false;
            pos.pop_back();
        }
        return true;
    }
};

}  // namespace

WatReport check_wat(const AnnTerm& t) {
    WatWalker w;
    if (t.hole()) {
        w.report.violation = WatViolation::stray_hole;
        return w.report;
    }
    w.skeleton(t);
    return w.report;
}

// Skeletons

namespace {

std::set<Term> skeleton_rec(const AnnTerm& t);

void collect_hole_skeletons(const AnnTerm& t, std::set<Term>& out) {
    if (t.hole()) {
        auto s = skeleton_rec(t);
        out.insert(s.begin(), s.end());
        return;
    }
    for (const auto& a : t.args()) collect_hole_skeletons(a, out);
}

std::set<Term> skeleton_rec(const AnnTerm& t) {
    if (t.front()) {
        std::set<Term> out;
        for (const auto& a : t.args()) collect_hole_skeletons(a, out);
        return out;
    }
    if (t.is_var()) return {Term::var(t.name())};
    std::vector<std::vector<Term>> partial{{}};
    for (const auto& a : t.args()) {
        auto s = skeleton_rec(a);
        std::vector<std::vector<Term>> next;
        next.reserve(partial.size() * s.size());
        for (const auto& p : partial)
            for (const auto& m : s) {
                auto q = p;
                q.push_back(m);
                next.push_back(std::move(q));
            }
        partial = std::move(next);
    }
    std::set<Term> out;
    for (auto& args : partial) out.insert(Term::app(t.name(), std::move(args)));
    return out;
}

std::size_t material_size(const AnnTerm& t) {
    if (t.hole()) return 0;
    std::size_t n = 1;
    for (const auto& a : t.args()) n += material_size(a);
    return n;
}

void find_holes(const AnnTerm& t, Position& rel, std::vector<Position>& out) {
    for (std::size_t i = 0; i < t.arity(); ++i) {
        rel.push_back(static_cast<int>(i + 1));
        if (t.arg(i).hole())
            out.push_back(rel);
        else
            find_holes(t.arg(i), rel, out);
        rel.pop_back();
    }
}

// Walk skeleton context; `depth` counts skeleton nodes strictly above.
void fronts_rec(const AnnTerm& t, Position& pos, std::size_t depth, std::vector<FrontInfo>& out) {
    if (t.front()) {
        FrontInfo info;
        info.position = pos;
        info.skeleton_depth = depth;
        info.size = 1;
        for (const auto& a : t.args()) info.size += material_size(a);
        Position rel;
        find_holes(t, rel, info.holes);
        out.push_back(info);
        for (const auto& h : info.holes) {
            Position full = pos;
            full.insert(full.end(), h.begin(), h.end());
            const AnnTerm& content = subterm_at(t, h);
            fronts_rec(content, full, depth, out);
        }
        return;
    }
    for (std::size_t i = 0; i < t.arity(); ++i) {
        pos.push_back(static_cast<int>(i + 1));
        fronts_rec(t.arg(i), pos, depth + 1, out);
        pos.pop_back();
    }
}

}  // namespace

std::set<Term> skeletons(const AnnTerm& t) { return skeleton_rec(t); }

std::vector<FrontInfo> wavefronts(const AnnTerm& t) {
    std::vector<FrontInfo> out;
    Position pos;
    fronts_rec(t, pos, 0, out);
    std::sort(out.begin(), out.end(), [](const FrontInfo& a, const FrontInfo& b) { return a.position < b.position; });
    return out;
}

std::size_t annotation_cost(const AnnTerm& t) {
    std::size_t total = 0;
    for (const auto& f : wavefronts(t)) total += f.size;
    return total;
}

Measure measure(const AnnTerm& t) {
    Measure m;
    for (const auto& f : wavefronts(t)) {
        if (m.weights.size() <= f.skeleton_depth) m.weights.resize(f.skeleton_depth + 1, 0);
        m.weights[f.skeleton_depth] += f.size;
    }
    while (!m.weights.empty() && m.weights.back() == 0) m.weights.pop_back();
    return m;
}

bool measure_less(const Measure& a, const Measure& b) {
    const std::size_t n = std::max(a.weights.size(), b.weights.size());
    for (std::size_t k = n; k-- > 0;) {
        std::size_t x = k < a.weights.size() ? a.weights[k] : 0;
        std::size_t y = k < b.weights.size() ? b.weights[k] : 0;
        if (x != y) return x < y;
    }
    return false;
}

std::string format_measure(const Measure& m) {
    std::string s = "<";
    for (std::size_t i = 0; i < m.weights.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(m.weights[i]);
    }
    return s + ">";
}

const AnnTerm& subterm_at(const AnnTerm& t, const Position& p) {
    const AnnTerm* cur = &t;
    for (int i : p) {
        if (cur->is_var() || i < 1 || static_cast<std::size_t>(i) > cur->arity())
            throw TermError("invalid position " + format_position(p) + " in " + format_annotated(t));
        cur = &cur->arg(i - 1);
    }
    return *cur;
}

namespace {
AnnTerm replace_rec(const AnnTerm& t, const Position& p, std::size_t k, const AnnTerm& u) {
    if (k == p.size()) return u;
    int i = p[k];
    if (t.is_var() || i < 1 || static_cast<std::size_t>(i) > t.arity()) throw TermError("invalid position " + format_position(p));
    std::vector<AnnTerm> args = t.args();
    args[i - 1] = replace_rec(args[i - 1], p, k + 1, u);
    return t.with_args(std::move(args));
}

void marks_rec(const AnnTerm& t, Position& pos, std::vector<std::pair<Position, char>>& out) {
    if (t.front() || t.hole()) out.emplace_back(pos, t.front() && t.hole() ? 'B' : t.front() ? 'F' : 'H');
    for (std::size_t i = 0; i < t.arity(); ++i) {
        pos.push_back(static_cast<int>(i + 1));
        marks_rec(t.arg(i), pos, out);
        pos.pop_back();
    }
}
}  // namespace

AnnTerm replace_at(const AnnTerm& t, const Position& p, const AnnTerm& u) { return replace_rec(t, p, 0, u); }

std::vector<std::pair<Position, char>> annotation_marks(const AnnTerm& t) {
    std::vector<std::pair<Position, char>> out;
    Position pos;
    marks_rec(t, pos, out);
    return out;
}

}  // namespace rippling
