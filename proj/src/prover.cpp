#include "rippling/prover.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "rippling/difference.hpp"

namespace rippling {

const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::induction: return "induction";
        case NodeKind::base_simplify: return "base-simplify";
        case NodeKind::simplify: return "simplify";
        case NodeKind::ripple: return "ripple";
        case NodeKind::fertilize: return "fertilize";
        case NodeKind::reflexivity: return "reflexivity";
        case NodeKind::lemma_use: return "lemma-use";
        case NodeKind::open: return "open";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Recursion analysis

namespace {

// Argument positions where some defining equation has constructor structure.
std::map<std::string, std::set<std::size_t>> recursive_positions(const Theory& th) {
    std::map<std::string, std::set<std::size_t>> out;
    for (const auto& d : th.definitions) {
        const Term& l = d.eq.lhs;
        for (std::size_t i = 0; i < l.arity(); ++i)
            if (l.arg(i).is_app()) out[l.name()].insert(i);
    }
    return out;
}

void count_occurrences(const Term& t, const std::map<std::string, std::set<std::size_t>>& rec,
                       std::map<std::string, std::size_t>& counts) {
    if (t.is_var()) return;
    auto it = rec.find(t.name());
    for (std::size_t i = 0; i < t.arity(); ++i) {
        if (it != rec.end() && it->second.count(i) && t.arg(i).is_var()) ++counts[t.arg(i).name()];
        count_occurrences(t.arg(i), rec, counts);
    }
}

Term substitute_var(const Term& t, const std::string& v, const Term& by) {
    Substitution s;
    s.bind(v, by);
    return apply_subst(s, t);
}

Equation substitute_var(const Equation& e, const std::string& v, const Term& by) {
    return {substitute_var(e.lhs, v, by), substitute_var(e.rhs, v, by)};
}

std::string fresh_name(const Theory& th, const std::string& sort, std::set<std::string>& taken) {
    for (const auto& v : th.var_order) {
        auto it = th.var_sorts.find(v);
        if (it != th.var_sorts.end() && it->second == sort && !taken.count(v)) {
            taken.insert(v);
            return v;
        }
    }
    const std::string stem = sort.empty() ? "v" : sort.substr(0, 1);
    for (std::size_t n = 1;; ++n) {
        std::string v = stem + std::to_string(n);
        if (!taken.count(v) && !th.symbols.find(v)) {
            taken.insert(v);
            return v;
        }
    }
}

}  // namespace

InductionScheme induction_scheme(const Equation& conj, const std::string& var, const Theory& th) {
    const Term whole = conj.as_term();
    auto sorts = th.variable_sorts(whole);
    auto it = sorts.find(var);
    const Datatype* dt = it == sorts.end() ? nullptr : th.datatype(it->second);
    if (!dt) throw ProverError("variable '" + var + "' does not range over a datatype");
    InductionScheme s{var, dt->name, {}};
    for (const auto& c : dt->constructors) {
        std::set<std::string> taken = variables(whole);
        InductionCase ic{c.name, {}, {}, {}};
        std::vector<Term> args;
        bool reused = false;
        for (const auto& argsort : c.arg_sorts) {
            std::string v;
            if (argsort == dt->name && !reused) {
                v = var;
                reused = true;
            } else {
                v = fresh_name(th, argsort, taken);
                ic.fresh.push_back(v);
            }
            args.push_back(Term::var(v));
            if (argsort == dt->name) ic.hypotheses.push_back(substitute_var(conj, var, Term::var(v)));
        }
        ic.instance = Term::app(c.name, args);
        s.cases.push_back(std::move(ic));
    }
    return s;
}

std::vector<InductionScheme> recursion_analysis(const Equation& conj, const Theory& th) {
    const Term whole = conj.as_term();
    std::vector<std::string> order;
    collect_variables(whole, order);
    if (order.empty()) throw ProverError("conjecture is ground; no induction variable");
    std::map<std::string, std::size_t> counts;
    count_occurrences(whole, recursive_positions(th), counts);
    auto sorts = th.variable_sorts(whole);
    std::vector<std::string> cands;
    for (const auto& v : order) {
        auto it = sorts.find(v);
        if (it != sorts.end() && th.datatype(it->second)) cands.push_back(v);
    }
    if (cands.empty()) throw ProverError("no variable ranges over a datatype");
    std::stable_sort(cands.begin(), cands.end(),
                     [&](const std::string& a, const std::string& b) { return counts[a] > counts[b]; });
    std::vector<InductionScheme> out;
    for (const auto& v : cands) out.push_back(induction_scheme(conj, v, th));
    return out;
}

// ---------------------------------------------------------------------------
// Trees

bool closed(const ProofNode& n) {
    if (n.kind == NodeKind::open) return false;
    if (n.kind == NodeKind::reflexivity) return true;
    if (n.children.empty()) return false;
    for (const auto& c : n.children)
        if (!closed(c)) return false;
    return true;
}

std::size_t count_nodes(const ProofNode& n, NodeKind k) {
    std::size_t c = n.kind == k;
    for (const auto& ch : n.children) c += count_nodes(ch, k);
    return c;
}

namespace {

void render(const ProofNode& n, std::size_t indent, bool trace, std::string& out) {
    const std::string pad(indent, ' ');
    const std::string detail(indent + 4, ' ');
    switch (n.kind) {
        case NodeKind::induction:
            out += pad + "induction on " + n.variable + " : " + n.datatype + "\n";
            for (std::size_t i = 0; i < n.cases.size(); ++i) {
                out += pad + "  case " + format_term(n.cases[i].instance) + ": ";
                out += i < n.children.size() ? format_equation(n.children[i].goal) : "?";
                out += "\n";
                for (const auto& h : n.cases[i].hypotheses) out += pad + "    hypothesis: " + format_equation(h) + "\n";
                if (i < n.children.size()) render(n.children[i], indent + 4, trace, out);
            }
            return;
        case NodeKind::lemma_use:
            out += pad + "lemma " + n.lemma.name + ": " + format_equation(n.lemma.eq) +
                   (n.assumed ? " (assumed)" : "") + "\n";
            if (!n.assumed && !n.children.empty()) render(n.children[0], indent + 2, trace, out);
            if (!n.children.empty()) render(n.children.back(), indent, trace, out);
            return;
        case NodeKind::reflexivity:
            out += pad + "reflexivity: " + format_equation(n.goal) + "\n";
            return;
        case NodeKind::open:
            out += pad + "open: " + format_equation(n.goal) + (n.note.empty() ? "" : " (" + n.note + ")") + "\n";
            return;
        case NodeKind::ripple:
            out += pad + "ripple: " + format_annotated_goal(n.trace->initial) + "\n";
            if (trace) {
                for (const auto& s : n.trace->steps) out += detail + format_step(s) + "\n";
                out += detail + "outcome: " + to_string(n.trace->outcome) + "\n";
            }
            break;
        case NodeKind::fertilize:
            out += pad + "fertilize: " + format_annotated_goal(n.fertilization->before) + "\n";
            if (trace) out += detail + format_fertilization(*n.fertilization) + "\n";
            break;
        case NodeKind::simplify:
        case NodeKind::base_simplify:
            out += pad + to_string(n.kind) + ": " + format_equation(n.goal) + "\n";
            if (trace)
                for (const auto& s : n.steps) out += detail + format_rewrite_step(s) + "\n";
            break;
    }
    for (const auto& c : n.children) render(c, indent, trace, out);
}

}  // namespace

std::string render_tree(const ProofNode& n, bool trace) {
    std::string out;
    render(n, 0, trace, out);
    return out;
}

ProofNode with_lemmas(ProofNode tree, const std::vector<LemmaProof>& lemmas) {
    for (auto it = lemmas.rbegin(); it != lemmas.rend(); ++it) {
        ProofNode n;
        n.kind = NodeKind::lemma_use;
        n.goal = tree.goal;
        n.lemma = it->lemma;
        n.assumed = !it->proof;
        if (it->proof) n.children.push_back(*it->proof);
        n.children.push_back(std::move(tree));
        tree = std::move(n);
    }
    return tree;
}

// ---------------------------------------------------------------------------
// Proving

Equation simplify_equation(const Equation& eq, const std::vector<Rule>& rules, std::size_t bound,
                           std::vector<RewriteStep>* steps) {
    std::vector<RewriteStep> ls, rs;
    Term l = simplify(eq.lhs, rules, bound, &ls);
    Term r = simplify(eq.rhs, rules, bound > ls.size() ? bound - ls.size() : 0, &rs);
    if (steps) {
        for (auto& s : ls) {
            s.position.insert(s.position.begin(), 1);
            s.before = Term::app("=", {s.before, eq.rhs});
            s.after = Term::app("=", {s.after, eq.rhs});
            steps->push_back(std::move(s));
        }
        for (auto& s : rs) {
            s.position.insert(s.position.begin(), 2);
            s.before = Term::app("=", {l, s.before});
            s.after = Term::app("=", {l, s.after});
            steps->push_back(std::move(s));
        }
    }
    return {l, r};
}

namespace {

ProofNode leaf(NodeKind k, const Equation& g, std::string note = {}) {
    ProofNode n;
    n.kind = k;
    n.goal = g;
    n.note = std::move(note);
    return n;
}

AnnTerm annotate(const Term& pattern, const Term& target, bool& ok) {
    ok = true;
    if (pattern == target) return AnnTerm::plain(target);
    VarSet rigid = variables(pattern);
    for (const auto& v : variables(target)) rigid.insert(v);
    if (auto m = dmatch_first(pattern, target, rigid)) return m->annotated_target;
    auto all = dmatch_all(pattern, target, 1, rigid);
    if (!all.empty()) return all[0].annotated_target;
    ok = false;
    return AnnTerm::plain(target);
}

class Prover {
public:
    Prover(const Theory& th, const ProveOptions& opts)
        : th_(th), opts_(opts), rules_(th.rewrite_rules()), waves_(th.wave_rules()) {}

    ProofResult run(const Equation& conj) {
        history_ = {conj};
        ProofResult r;
        r.tree = prove_goal(conj, 0);
        r.closed = closed(r.tree);
        r.history = history_;
        return r;
    }

private:
    // Simplify, then induct if that does not close the goal.
    ProofNode prove_goal(const Equation& g, std::size_t depth) {
        if (g.lhs == g.rhs) return leaf(NodeKind::reflexivity, g);
        std::vector<RewriteStep> steps;
        Equation s = g;
        try {
            s = simplify_equation(g, rules_, opts_.simplify_bound, &steps);
        } catch (const BoundExceeded&) {
            steps.clear();
            s = g;
        }
        if (steps.empty()) return induct(g, depth);
        ProofNode n = leaf(NodeKind::simplify, g);
        n.steps = std::move(steps);
        n.children.push_back(s.lhs == s.rhs ? leaf(NodeKind::reflexivity, s) : induct(s, depth));
        return n;
    }

    ProofNode finish(const Equation& g, std::size_t depth) {
        if (g.lhs == g.rhs) return leaf(NodeKind::reflexivity, g);
        return prove_goal(g, depth + 1);
    }

    ProofNode induct(const Equation& g, std::size_t depth) {
        if (depth >= opts_.induction_depth) return leaf(NodeKind::open, g, "induction depth limit reached");
        std::vector<InductionScheme> schemes;
        try {
            schemes = recursion_analysis(g, th_);
        } catch (const ProverError& e) {
            return leaf(NodeKind::open, g, e.what());
        }
        const InductionScheme& sc = schemes.front();
        ProofNode n = leaf(NodeKind::induction, g);
        n.variable = sc.variable;
        n.datatype = sc.datatype;
        n.cases = sc.cases;
        for (const auto& c : sc.cases) {
            Equation cg = substitute_var(g, sc.variable, c.instance);
            n.children.push_back(c.hypotheses.empty() ? base_case(cg, depth) : step_case(cg, c, sc.variable, depth));
        }
        return n;
    }

    ProofNode base_case(const Equation& g, std::size_t depth) {
        if (g.lhs == g.rhs) return leaf(NodeKind::reflexivity, g);
        std::vector<RewriteStep> steps;
        Equation s = g;
        try {
            s = simplify_equation(g, rules_, opts_.simplify_bound, &steps);
        } catch (const BoundExceeded&) {
            return leaf(NodeKind::open, g, "simplification bound exceeded");
        }
        if (steps.empty()) return prove_goal(g, depth + 1);
        ProofNode n = leaf(NodeKind::base_simplify, g);
        n.steps = std::move(steps);
        n.children.push_back(finish(s, depth));
        return n;
    }

    ProofNode step_case(const Equation& g, const InductionCase& c, const std::string& var, std::size_t depth) {
        const Equation& hyp = c.hypotheses.front();
        bool okl, okr;
        AnnTerm al = annotate(hyp.lhs, g.lhs, okl);
        AnnTerm ar = annotate(hyp.rhs, g.rhs, okr);
        if (!okl || !okr) return blocked(g, depth);
        AnnTerm goal = AnnTerm::app("=", {al, ar});
        RippleOptions ro;
        ro.hypothesis = hyp;
        ro.rigid = {var};
        ro.max_steps = opts_.ripple_steps;
        RippleTrace tr = ripple(goal, waves_, ro);

        ProofNode cont;
        if (tr.outcome == RippleOutcome::fully_rippled) {
            auto f = fertilize(tr.final_goal(), hyp, ro.rigid);
            tr.outcome = RippleOutcome::fertilized;
            Term before = erase(f->before), after = erase(f->after);
            ProofNode fn = leaf(NodeKind::fertilize, Equation::from_term(before));
            fn.fertilization = *f;
            fn.steps.push_back({"hypothesis", f->hypothesis, f->position, f->subst, before, after});
            fn.children.push_back(finish(Equation::from_term(after), depth));
            cont = std::move(fn);
        } else {
            cont = blocked(Equation::from_term(erase(tr.final_goal())), depth);
        }
        if (tr.steps.empty()) return cont;
        ProofNode rn = leaf(NodeKind::ripple, g);
        for (const auto& s : tr.steps)
            rn.steps.push_back({s.rule.source, s.rule.erased(), s.position, s.subst, erase(s.before), erase(s.after)});
        rn.trace = std::move(tr);
        rn.children.push_back(std::move(cont));
        return rn;
    }

    ProofNode blocked(const Equation& g, std::size_t depth) {
        if (history_.size() == depth + 1) history_.push_back(g);
        return prove_goal(g, depth + 1);
    }

    const Theory& th_;
    ProveOptions opts_;
    std::vector<Rule> rules_;
    std::vector<WaveRule> waves_;
    std::vector<Equation> history_;
};

}  // namespace

ProofResult prove(const Equation& conjecture, const Theory& th, const ProveOptions& opts) {
    return Prover(th, opts).run(conjecture);
}

}  // namespace rippling
