#include "rippling/ripple.hpp"

#include <algorithm>
#include <map>

#include "rippling/difference.hpp"

namespace rippling {

namespace {

bool has_multi_hole_front(const AnnTerm& t) {
    for (const auto& f : wavefronts(t))
        if (f.holes.size() > 1) return true;
    return false;
}

std::optional<Term> shared_skeleton(const AnnTerm& l, const AnnTerm& r) {
    auto ls = skeletons(l);
    for (const auto& s : skeletons(r))
        if (ls.count(s)) return s;
    return std::nullopt;
}

bool shares_skeleton(const AnnTerm& a, const AnnTerm& b) { return shared_skeleton(a, b).has_value(); }

// Annotation-aware matching of a rule side against a goal subterm.
using Bindings = std::map<std::string, AnnTerm>;

bool match_ann(const AnnTerm& p, const AnnTerm& g, bool in_material, bool root, Bindings& b) {
    const bool material = !p.hole() && (p.front() || in_material);
    if (p.is_var()) {
        AnnTerm val;
        if (material) {
            if (g.annotated()) return false;
            val = g;
        } else {
            if (!root && p.hole() != g.hole()) return false;
            val = g.with_hole(false);
        }
        auto [it, fresh] = b.emplace(p.name(), val);
        return fresh || it->second == val;
    }
    if (!g.is_app() || p.name() != g.name() || p.arity() != g.arity()) return false;
    if (p.front() != g.front()) return false;
    if (!root && p.hole() != g.hole()) return false;
    for (std::size_t i = 0; i < p.arity(); ++i)
        if (!match_ann(p.arg(i), g.arg(i), material, false, b)) return false;
    return true;
}

AnnTerm instantiate(const AnnTerm& r, const Bindings& b) {
    if (r.is_var()) return b.at(r.name()).with_hole(r.hole());
    std::vector<AnnTerm> args;
    args.reserve(r.arity());
    for (const auto& a : r.args()) args.push_back(instantiate(a, b));
    return AnnTerm::app(r.name(), std::move(args), r.front(), r.hole());
}

void ann_positions(const AnnTerm& t, Position& cur, std::vector<Position>& out) {
    out.push_back(cur);
    for (std::size_t i = 0; i < t.arity(); ++i) {
        cur.push_back(static_cast<int>(i + 1));
        ann_positions(t.arg(i), cur, out);
        cur.pop_back();
    }
}

// Postorder positions outside wavefront material.
void skeleton_positions_post(const AnnTerm& t, bool in_material, Position& cur, std::vector<Position>& out) {
    const bool material = !t.hole() && (t.front() || in_material);
    for (std::size_t i = 0; i < t.arity(); ++i) {
        cur.push_back(static_cast<int>(i + 1));
        skeleton_positions_post(t.arg(i), material, cur, out);
        cur.pop_back();
    }
    if (!material) out.push_back(cur);
}

std::string rule_name(const std::string& source, std::size_t k) {
    return k == 0 ? source : source + "/" + std::to_string(k + 1);
}

}  // namespace

std::string format_wave_rule(const WaveRule& r) {
    return r.source + ": " + format_annotated(r.lhs) + " => " + format_annotated(r.rhs);
}

bool check_certificate(const WaveRule& r) {
    if (!is_wat(r.lhs) || !is_wat(r.rhs)) return false;
    if (!skeletons(r.lhs).count(r.skeleton) || !skeletons(r.rhs).count(r.skeleton)) return false;
    if (!(measure(r.lhs) == r.lhs_measure) || !(measure(r.rhs) == r.rhs_measure)) return false;
    if (!measure_less(r.rhs_measure, r.lhs_measure)) return false;
    auto lv = variables(erase(r.lhs));
    for (const auto& v : variables(erase(r.rhs)))
        if (!lv.count(v)) return false;
    return true;
}

std::vector<WaveRule> derive_wave_rules(const Equation& eq, const std::string& source) {
    auto lv = variables(eq.lhs);
    for (const auto& v : variables(eq.rhs))
        if (!lv.count(v)) return {};
    VarSet rigid = lv;
    struct Ranked {
        WaveRule rule;
        bool multi;
        std::size_t cost;
        std::size_t fronts;
    };
    std::vector<Ranked> found;
    for (const auto& u : dunify(eq.lhs, eq.rhs, unlimited, rigid)) {
        auto sk = shared_skeleton(u.annotated_left, u.annotated_right);
        if (!sk) continue;
        WaveRule r{u.annotated_left, u.annotated_right, source, *sk, measure(u.annotated_left),
                   measure(u.annotated_right)};
        if (!measure_less(r.rhs_measure, r.lhs_measure)) continue;
        bool multi = has_multi_hole_front(r.lhs) || has_multi_hole_front(r.rhs);
        std::size_t fronts = wavefronts(r.lhs).size() + wavefronts(r.rhs).size();
        found.push_back({std::move(r), multi, u.annotation_cost, fronts});
    }
    std::stable_sort(found.begin(), found.end(), [](const Ranked& a, const Ranked& b) {
        if (a.multi != b.multi) return !a.multi;
        if (a.cost != b.cost) return a.cost < b.cost;
        return a.fronts < b.fronts;
    });
    std::vector<WaveRule> out;
    for (std::size_t k = 0; k < found.size(); ++k) {
        out.push_back(std::move(found[k].rule));
        out.back().source = rule_name(source, k);
    }
    return out;
}

std::vector<RippleStep> ripple_step(const AnnTerm& goal, const std::vector<WaveRule>& rules) {
    std::vector<RippleStep> out;
    if (!goal.annotated()) return out;
    std::vector<Position> ps;
    Position cur;
    ann_positions(goal, cur, ps);
    const Measure before = measure(goal);
    for (const auto& rule : rules) {
        for (const auto& p : ps) {
            const AnnTerm& sub = subterm_at(goal, p);
            Bindings b;
            if (!match_ann(rule.lhs, sub, false, true, b)) continue;
            AnnTerm rep = instantiate(rule.rhs, b).with_hole(sub.hole());
            AnnTerm after = replace_at(goal, p, rep);
            if (!is_wat(after) || !shares_skeleton(goal, after)) continue;
            if (!measure_less(measure(after), before)) continue;
            Substitution s;
            for (const auto& [v, t] : b) s.bind(v, erase(t));
            out.push_back({rule, p, std::move(s), goal, std::move(after)});
        }
    }
    return out;
}

const char* to_string(RippleOutcome o) {
    switch (o) {
        case RippleOutcome::fully_rippled: return "fully-rippled";
        case RippleOutcome::blocked: return "blocked";
        case RippleOutcome::fertilized: return "fertilized";
    }
    return "?";
}

RippleTrace ripple(const AnnTerm& goal, const std::vector<WaveRule>& rules, const RippleOptions& opts) {
    RippleTrace tr{goal, {}, RippleOutcome::blocked};
    while (tr.steps.size() < opts.max_steps) {
        auto steps = ripple_step(tr.final_goal(), rules);
        if (steps.empty()) break;
        tr.steps.push_back(std::move(steps.front()));
    }
    const AnnTerm& last = tr.final_goal();
    bool done;
    if (opts.hypothesis) {
        done = fertilize(last, *opts.hypothesis, opts.rigid).has_value();
    } else {
        done = true;
        for (const auto& f : wavefronts(last)) {
            // Fronts directly under an equation's `=` count as outermost.
            std::size_t top = last.is_app() && last.name() == "=" && last.arity() == 2 ? 1 : 0;
            if (f.skeleton_depth > top) done = false;
        }
    }
    tr.outcome = done ? RippleOutcome::fully_rippled : RippleOutcome::blocked;
    return tr;
}

std::optional<Fertilization> fertilize(const AnnTerm& goal, const Equation& hypothesis, const VarSet& rigid) {
    std::vector<Position> ps;
    Position cur;
    skeleton_positions_post(goal, false, cur, ps);
    std::vector<Equation> orientations{hypothesis};
    if (!hypothesis.rhs.is_var()) orientations.push_back({hypothesis.rhs, hypothesis.lhs});
    for (const auto& h : orientations) {
        for (const auto& p : ps) {
            const AnnTerm& sub = subterm_at(goal, p);
            if (sub.with_hole(false).annotated()) continue;
            if (sub.is_app() && sub.name() == "=") continue;
            auto m = match_first_order(h.lhs, erase(sub), rigid);
            if (!m) continue;
            AnnTerm rep = AnnTerm::plain(apply_subst(*m, h.rhs)).with_hole(sub.hole());
            return Fertilization{h, p, *m, goal, replace_at(goal, p, rep)};
        }
    }
    return std::nullopt;
}

std::string format_step(const RippleStep& s) {
    return s.rule.source + " " + format_position(s.position) + " " + format_annotated_goal(s.before) + " => " +
           format_annotated_goal(s.after);
}

std::string format_fertilization(const Fertilization& f) {
    return "fertilize " + format_position(f.position) + " " + format_annotated_goal(f.before) + " => " +
           format_annotated_goal(f.after);
}

std::string format_trace(const RippleTrace& t) {
    std::string out;
    for (const auto& s : t.steps) out += format_step(s) + "\n";
    out += std::string("outcome: ") + to_string(t.outcome) + "\n";
    return out;
}

}  // namespace rippling
