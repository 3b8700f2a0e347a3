#include "rippling/checker.hpp"

#include <set>

namespace rippling {

namespace {

struct Hypothesis {
    Equation eq;
    VarSet fixed;
};

struct Context {
    std::vector<Equation> rules;
    std::vector<Hypothesis> hyps;
};

struct Failure {
    std::string what;
};

[[noreturn]] void fail(const ProofNode& n, const std::string& what) {
    throw Failure{std::string(to_string(n.kind)) + " node for " + format_equation(n.goal) + ": " + what};
}

Equation reversed(const Equation& e) { return {e.rhs, e.lhs}; }

bool permitted(const RewriteStep& s, const Context& ctx) {
    for (const auto& r : ctx.rules)
        if (s.eq == r || s.eq == reversed(r)) return true;
    for (const auto& h : ctx.hyps) {
        if (!(s.eq == h.eq || s.eq == reversed(h.eq))) continue;
        bool ok = true;
        for (const auto& v : h.fixed)
            if (const Term* b = s.subst.find(v); b && *b != Term::var(v)) ok = false;
        if (ok) return true;
    }
    return false;
}

void check(const ProofNode& n, const Theory& th, const Context& ctx, bool allow_assumed, CheckResult& res);

void check_rewrites(const ProofNode& n, const Theory& th, const Context& ctx, bool allow_assumed,
                    CheckResult& res) {
    if (n.children.size() != 1) fail(n, "expected exactly one continuation");
    Term cur = n.goal.as_term();
    for (const auto& s : n.steps) {
        if (s.before != cur) fail(n, "step does not start from the current goal");
        if (s.position.empty() || !valid_position(cur, s.position)) fail(n, "invalid position " + format_position(s.position));
        if (!permitted(s, ctx)) fail(n, "rule " + format_equation(s.eq) + " is not available");
        if (apply_subst(s.subst, s.eq.lhs) != subterm_at(cur, s.position))
            fail(n, "rule does not match at " + format_position(s.position));
        Term next = replace_at(cur, s.position, apply_subst(s.subst, s.eq.rhs));
        if (s.after != next) fail(n, "step result differs from the rewrite");
        cur = next;
    }
    if (n.children[0].goal.as_term() != cur) fail(n, "continuation does not prove the rewritten goal");
    check(n.children[0], th, ctx, allow_assumed, res);
}

void check_induction(const ProofNode& n, const Theory& th, const Context& ctx, bool allow_assumed,
                     CheckResult& res) {
    const Datatype* dt = th.datatype(n.datatype);
    if (!dt) fail(n, "unknown datatype " + n.datatype);
    const Term goal = n.goal.as_term();
    auto sorts = th.variable_sorts(goal);
    if (!occurs(n.variable, goal)) fail(n, "induction variable does not occur in the goal");
    if (sorts.count(n.variable) && sorts[n.variable] != dt->name) fail(n, "induction variable has the wrong sort");
    if (n.cases.size() != dt->constructors.size() || n.children.size() != dt->constructors.size())
        fail(n, "expected one case per constructor");
    const auto goal_vars = variables(goal);
    for (std::size_t i = 0; i < dt->constructors.size(); ++i) {
        const Constructor& c = dt->constructors[i];
        const Term& inst = n.cases[i].instance;
        if (inst.is_var() || inst.name() != c.name || inst.arity() != c.arg_sorts.size())
            fail(n, "case " + std::to_string(i + 1) + " is not an instance of " + c.name);
        std::set<std::string> seen;
        std::vector<Hypothesis> hyps;
        Substitution sub;
        sub.bind(n.variable, inst);
        for (std::size_t j = 0; j < inst.arity(); ++j) {
            const Term& a = inst.arg(j);
            if (!a.is_var() || !seen.insert(a.name()).second) fail(n, "case arguments must be distinct variables");
            if (a.name() != n.variable && goal_vars.count(a.name())) fail(n, "case variable " + a.name() + " is not fresh");
            if (c.arg_sorts[j] == dt->name) {
                Substitution h;
                h.bind(n.variable, a);
                hyps.push_back({{apply_subst(h, n.goal.lhs), apply_subst(h, n.goal.rhs)}, {a.name()}});
            }
        }
        const Equation expect{apply_subst(sub, n.goal.lhs), apply_subst(sub, n.goal.rhs)};
        if (!(n.children[i].goal == expect)) fail(n, "case " + std::to_string(i + 1) + " has the wrong goal");
        if (n.cases[i].hypotheses.size() != hyps.size()) fail(n, "case " + std::to_string(i + 1) + " has the wrong hypotheses");
        for (std::size_t k = 0; k < hyps.size(); ++k)
            if (!(n.cases[i].hypotheses[k] == hyps[k].eq)) fail(n, "case " + std::to_string(i + 1) + " has the wrong hypotheses");
        Context inner{ctx.rules, hyps};
        check(n.children[i], th, inner, allow_assumed, res);
    }
}

void check(const ProofNode& n, const Theory& th, const Context& ctx, bool allow_assumed, CheckResult& res) {
    switch (n.kind) {
        case NodeKind::reflexivity:
            if (n.goal.lhs != n.goal.rhs) fail(n, "sides differ");
            if (!n.children.empty()) fail(n, "reflexivity has no continuation");
            return;
        case NodeKind::open: fail(n, "goal is open");
        case NodeKind::simplify:
        case NodeKind::base_simplify:
        case NodeKind::ripple:
        case NodeKind::fertilize: check_rewrites(n, th, ctx, allow_assumed, res); return;
        case NodeKind::induction: check_induction(n, th, ctx, allow_assumed, res); return;
        case NodeKind::lemma_use: {
            Context with = ctx;
            with.rules.push_back(n.lemma.eq);
            if (n.assumed) {
                if (!allow_assumed) fail(n, "lemma " + n.lemma.name + " is assumed");
                if (n.children.size() != 1) fail(n, "expected exactly one continuation");
                res.assumed.push_back(n.lemma.name);
            } else {
                if (n.children.size() != 2) fail(n, "expected a lemma proof and a continuation");
                if (!(n.children[0].goal == n.lemma.eq)) fail(n, "lemma proof has the wrong goal");
                check(n.children[0], th, Context{ctx.rules, {}}, allow_assumed, res);
            }
            if (!(n.children.back().goal == n.goal)) fail(n, "continuation has the wrong goal");
            check(n.children.back(), th, with, allow_assumed, res);
            return;
        }
    }
}

}  // namespace

CheckResult replay_check(const ProofNode& root, const Theory& th, bool allow_assumed) {
    CheckResult res;
    Context ctx;
    for (const auto& d : th.definitions) ctx.rules.push_back(d.eq);
    try {
        check(root, th, ctx, allow_assumed, res);
        res.ok = true;
    } catch (const Failure& f) {
        res.error = f.what;
    }
    return res;
}

}  // namespace rippling
