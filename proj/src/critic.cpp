#include "rippling/critic.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "rippling/checker.hpp"
#include "rippling/difference.hpp"

namespace rippling {

namespace {

const std::string kHole = "_";

Term rename_canonical(const Term& t, std::map<std::string, std::string>& names) {
    if (t.is_var()) {
        if (t.name() == kHole) return t;
        auto it = names.find(t.name());
        if (it == names.end()) it = names.emplace(t.name(), "#" + std::to_string(names.size())).first;
        return Term::var(it->second);
    }
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(rename_canonical(a, names));
    return Term::app(t.name(), std::move(args));
}

bool alpha_equivalent(const Term& a, const Term& b) {
    std::map<std::string, std::string> na, nb;
    return rename_canonical(a, na) == rename_canonical(b, nb);
}

Term plug(const Term& context, const Term& filler) {
    Substitution s;
    s.bind(kHole, filler);
    return apply_subst(s, context);
}

Position concat(Position a, const Position& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::optional<AnnTerm> annotate(const Equation& from, const Equation& to) {
    Term p = from.as_term(), t = to.as_term();
    VarSet rigid = variables(p);
    for (const auto& v : variables(t)) rigid.insert(v);
    if (auto m = dmatch_first(p, t, rigid)) return m->annotated_target;
    auto all = dmatch_all(p, t, 1, rigid);
    if (!all.empty()) return all.front().annotated_target;
    return std::nullopt;
}

// Length of the chain that starts with `f` and follows later pairs.
FrontChain follow(const FrontLayer& f, const std::vector<MatchedPair>& pairs) {
    FrontChain c{{f}};
    while (c.layers.back().pair + 1 < pairs.size()) {
        const FrontLayer& last = c.layers.back();
        Position nested = concat(last.position, last.hole);
        const FrontLayer* next = nullptr;
        for (const auto& g : pairs[last.pair + 1].fronts) {
            if (!alpha_equivalent(g.context, last.context)) continue;
            if (g.position == nested) { next = &g; break; }
            if (g.position == last.position && !next) next = &g;
        }
        if (!next) break;
        c.layers.push_back(*next);
    }
    return c;
}

std::string variable_name(std::size_t i) {
    static const char* base[] = {"Y", "Z", "W", "V", "U"};
    if (i < 5) return base[i];
    return "Y" + std::to_string(i - 4);
}

// X keeps its name; the other variables become Y, Z, ... by first occurrence.
Equation normalize_names(const Equation& eq, const std::string& x) {
    std::vector<std::string> order;
    collect_variables(eq.lhs, order);
    collect_variables(eq.rhs, order);
    Substitution s;
    std::size_t k = 0;
    std::set<std::string> seen;
    for (const auto& v : order) {
        if (v == x || !seen.insert(v).second) continue;
        s.bind(v, Term::var(variable_name(k++)));
    }
    if (x != "X") s.bind(x, Term::var("X"));
    return {apply_subst(s, eq.lhs), apply_subst(s, eq.rhs)};
}

bool ground(const Term& t) { return variables(t).empty(); }

void maximal_ground(const Term& t, std::set<Term>& out) {
    if (t.is_var()) return;
    if (ground(t)) {
        out.insert(t);
        return;
    }
    for (const auto& a : t.args()) maximal_ground(a, out);
}

Term replace_term(const Term& t, const Term& from, const Term& to) {
    if (t == from) return to;
    if (t.is_var()) return t;
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(replace_term(a, from, to));
    return Term::app(t.name(), std::move(args));
}

// Ground subterms shared by both sides become variables.
std::optional<LemmaCandidate> generalize_ground(const Equation& eq) {
    std::set<Term> l, r;
    maximal_ground(eq.lhs, l);
    maximal_ground(eq.rhs, r);
    std::vector<Term> common;
    for (const auto& t : l)
        if (r.count(t)) common.push_back(t);
    if (common.empty()) return std::nullopt;
    std::set<std::string> taken = variables(eq.as_term());
    LemmaCandidate c;
    c.eq = eq;
    std::size_t k = 0;
    for (const auto& g : common) {
        std::string v;
        do v = "G" + std::to_string(++k);
        while (taken.count(v));
        taken.insert(v);
        c.eq = {replace_term(c.eq.lhs, g, Term::var(v)), replace_term(c.eq.rhs, g, Term::var(v))};
        c.generalized.emplace_back(g, v);
    }
    return c;
}

bool is_rule(const Equation& eq) {
    if (eq.lhs.is_var()) return false;
    auto lv = variables(eq.lhs);
    for (const auto& v : variables(eq.rhs))
        if (!lv.count(v)) return false;
    return true;
}

std::vector<Term> ground_values(const std::string& sort, const Theory& th, const GroundBounds& b,
                                std::map<std::string, std::vector<Term>>& memo, std::size_t depth) {
    std::string key = sort + "/" + std::to_string(depth);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::vector<Term> out;
    const Datatype* dt = th.datatype(sort);
    if (!dt) {
        for (std::size_t i = 1; i <= b.elements; ++i) out.push_back(Term::app("c" + std::to_string(i)));
    } else if (depth > 0) {
        for (const auto& c : dt->constructors) {
            std::vector<std::vector<Term>> doms;
            bool empty = false;
            for (const auto& s : c.arg_sorts) {
                doms.push_back(ground_values(s, th, b, memo, depth - 1));
                if (doms.back().empty()) empty = true;
            }
            if (empty) continue;
            std::vector<std::size_t> idx(doms.size(), 0);
            while (out.size() < b.domain_cap) {
                std::vector<Term> args;
                for (std::size_t i = 0; i < doms.size(); ++i) args.push_back(doms[i][idx[i]]);
                out.push_back(Term::app(c.name, std::move(args)));
                std::size_t i = 0;
                while (i < idx.size() && ++idx[i] == doms[i].size()) idx[i++] = 0;
                if (i == idx.size()) break;
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Term& a, const Term& b) { return a.size() < b.size(); });
    if (out.size() > b.domain_cap) out.resize(b.domain_cap);
    memo[key] = out;
    return out;
}

std::string fresh_lemma_name(const Theory& th) {
    for (std::size_t i = 1;; ++i) {
        std::string n = "lemma." + std::to_string(i);
        if (!th.find_lemma(n) && !th.find_conjecture(n)) return n;
    }
}

}  // namespace

const char* to_string(CandidateStatus s) {
    switch (s) {
        case CandidateStatus::speculated: return "speculated";
        case CandidateStatus::refuted: return "refuted";
        case CandidateStatus::proved: return "proved";
        case CandidateStatus::assumed: return "assumed";
        case CandidateStatus::failed: return "failed";
    }
    return "?";
}

std::vector<FrontLayer> front_layers(const AnnTerm& goal, std::size_t pair) {
    std::vector<FrontLayer> out;
    Term plain = erase(goal);
    for (const auto& f : wavefronts(goal)) {
        if (f.holes.size() != 1) continue;
        Term ctx = replace_at(subterm_at(plain, f.position), f.holes[0], Term::var(kHole));
        out.push_back({pair, f.position, ctx, f.holes[0]});
    }
    return out;
}

std::optional<DivergenceReport> detect_divergence(const std::vector<Equation>& goals) {
    DivergenceReport r;
    r.goals = goals;
    for (std::size_t i = 0; i + 1 < goals.size(); ++i) {
        MatchedPair p{goals[i], goals[i + 1], annotate(goals[i], goals[i + 1]), {}};
        if (p.annotated) p.fronts = front_layers(*p.annotated, i);
        r.pairs.push_back(std::move(p));
    }
    for (std::size_t s = 0; s < r.pairs.size(); ++s) {
        std::vector<FrontChain> chains;
        std::size_t best = 0;
        for (const auto& f : r.pairs[s].fronts) {
            FrontChain c = follow(f, r.pairs);
            best = std::max(best, c.layers.size());
            if (c.layers.size() >= 2) chains.push_back(std::move(c));
        }
        if (best > r.evidence) {
            r.evidence = best;
            r.start = s;
            r.chains = std::move(chains);
        }
    }
    if (r.evidence < 2) return std::nullopt;
    return r;
}

std::vector<LemmaCandidate> propose_lemma(const DivergenceReport& report, const Theory& th) {
    std::vector<LemmaCandidate> out;
    if (report.chains.empty()) return out;
    const MatchedPair& pair = report.pairs[report.start];
    Term g = pair.to.as_term();

    auto add = [&](const Equation& eq, const std::string& x) {
        LemmaCandidate c;
        c.eq = normalize_names(eq, x);
        for (const auto& o : out)
            if (alpha_equivalent(o.eq.as_term(), c.eq.as_term())) return;
        out.push_back(c);
        if (auto v = generalize_ground(c.eq)) {
            for (const auto& o : out)
                if (alpha_equivalent(o.eq.as_term(), v->eq.as_term())) return;
            out.push_back(*v);
        }
    };

    for (const auto& chain : report.chains) {
        const FrontLayer& l0 = chain.layers.front();
        if (l0.position.size() < 2 || l0.context.is_var()) continue;
        Position parent(l0.position.begin(), l0.position.end() - 1);
        const Term& f = subterm_at(g, parent);
        if (!f.is_app() || !th.is_defined(f.name())) continue;

        std::set<std::string> taken = variables(g);
        std::string x = "X";
        while (taken.count(x)) x += "'";
        Position arg{l0.position.back()};
        Term fx = replace_at(f, arg, Term::var(x));
        Term lhs = replace_at(f, arg, plug(l0.context, Term::var(x)));

        for (const auto& other : pair.fronts) {
            if (other.position == l0.position || other.context.is_var()) continue;
            add({lhs, plug(other.context, fx)}, x);
        }
        add({lhs, plug(l0.context, fx)}, x);
    }

    for (auto& c : out) {
        c.admissible = is_rule(c.eq) && !derive_wave_rules(c.eq, "lemma").empty();
        if (!c.admissible) c.note = "no wave rule";
    }
    std::stable_sort(out.begin(), out.end(), [](const LemmaCandidate& a, const LemmaCandidate& b) {
        if (a.admissible != b.admissible) return a.admissible;
        return a.eq.lhs.size() + a.eq.rhs.size() < b.eq.lhs.size() + b.eq.rhs.size();
    });
    return out;
}

std::optional<Substitution> counterexample(const Equation& eq, const Theory& th, const GroundBounds& b) {
    auto sorts = th.variable_sorts(eq.as_term());
    std::vector<std::string> vars;
    std::vector<std::vector<Term>> doms;
    std::map<std::string, std::vector<Term>> memo;
    for (const auto& [v, s] : sorts) {
        vars.push_back(v);
        doms.push_back(ground_values(s, th, b, memo, b.depth));
        if (doms.back().empty()) return std::nullopt;
    }
    const auto& rules = th.definitions;
    const std::size_t bound = 10000;
    std::vector<std::size_t> idx(vars.size(), 0);
    for (std::size_t n = 0; n < b.max_instances; ++n) {
        Substitution s;
        for (std::size_t i = 0; i < vars.size(); ++i) s.bind(vars[i], doms[i][idx[i]]);
        try {
            if (simplify(apply_subst(s, eq.lhs), rules, bound) != simplify(apply_subst(s, eq.rhs), rules, bound))
                return s;
        } catch (const BoundExceeded&) {
        }
        std::size_t i = 0;
        while (i < idx.size() && ++idx[i] == doms[i].size()) idx[i++] = 0;
        if (i == idx.size()) break;
    }
    return std::nullopt;
}

CriticResult patch_and_retry(const Equation& conjecture, const Theory& th, const CriticOptions& opts) {
    CriticResult r;
    r.result = prove(conjecture, th, opts.prove);
    if (r.result.closed || opts.depth == 0) return r;
    r.report = detect_divergence(r.result.history);
    if (!r.report) return r;
    r.candidates = propose_lemma(*r.report, th);

    CriticOptions inner = opts;
    inner.depth = opts.depth - 1;
    for (auto& c : r.candidates) {
        if (!c.admissible) continue;
        if (auto cex = counterexample(c.eq, th, opts.bounds)) {
            c.status = CandidateStatus::refuted;
            c.note = "false for " + format_subst(*cex);
            continue;
        }
        CriticResult lemma = patch_and_retry(c.eq, th, inner);
        if (!lemma.result.closed) {
            c.status = CandidateStatus::failed;
            c.note = "no proof found";
            continue;
        }
        CheckResult chk = replay_check(lemma.result.tree, th);
        if (!chk.ok) {
            c.status = CandidateStatus::failed;
            c.note = "proof rejected: " + chk.error;
            continue;
        }
        c.status = CandidateStatus::proved;

        Theory patched = th;
        Rule rule{fresh_lemma_name(th), c.eq};
        patched.add_lemma(rule, LemmaStatus::proved);
        ProofResult retry = prove(conjecture, patched, opts.prove);
        if (!retry.closed) {
            c.note = "proved but did not unblock the conjecture";
            continue;
        }
        r.installed.push_back({rule, lemma.result.tree});
        retry.tree = with_lemmas(retry.tree, r.installed);
        r.result = std::move(retry);
        return r;
    }
    return r;
}

std::string format_report(const DivergenceReport& r) {
    std::string out;
    for (std::size_t i = 0; i < r.goals.size(); ++i) out += "goal " + std::to_string(i) + ": " + format_equation(r.goals[i]) + "\n";
    for (std::size_t i = 0; i < r.pairs.size(); ++i) {
        const auto& p = r.pairs[i];
        out += "match " + std::to_string(i) + ": ";
        out += p.annotated ? format_annotated_goal(*p.annotated) : std::string("none");
        out += "\n";
    }
    out += "evidence " + std::to_string(r.evidence) + " from pair " + std::to_string(r.start) + "\n";
    for (const auto& c : r.chains) {
        out += "chain:";
        for (const auto& l : c.layers) out += " " + format_position(l.position) + " " + format_term(l.context);
        out += "\n";
    }
    return out;
}

}  // namespace rippling
