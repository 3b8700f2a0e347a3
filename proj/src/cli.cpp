#include "rippling/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <json.hpp>
#include <optional>

#include "rippling/checker.hpp"
#include "rippling/critic.hpp"
#include "rippling/difference.hpp"
#include "rippling/prover.hpp"
#include "rippling/ripple.hpp"
#include "rippling/theory.hpp"

namespace rippling {

namespace {

using Json = nlohmann::ordered_json;

struct Config {
    std::string theory;
    std::string conjecture;
    std::string left, right;
    std::string hypothesis;
    std::size_t cap = 0;  // 0: unlimited
    std::size_t budget = 200;
    std::size_t max_steps = 50;
    bool trace = false;
    bool first = false;
    bool minimal = false;
    bool no_critic = false;
    bool assume_lemmas = false;
    std::string format = "text";

    bool structured() const { return format == "structured"; }
};

class Output {
public:
    Output(std::ostream& os, bool structured) : os_(os), structured_(structured) {}
    bool structured() const { return structured_; }
    void text(const std::string& line) {
        if (!structured_) os_ << line << "\n";
    }
    void record(const Json& j) {
        if (structured_) os_ << j.dump() << "\n";
    }

private:
    std::ostream& os_;
    bool structured_;
};

Json position_json(const Position& p) { return Json(p); }

Json subst_json(const Substitution& s) {
    Json j = Json::object();
    for (const auto& [v, t] : s.bindings()) j[v] = format_term(t);
    return j;
}

SymbolTable term_symbols(const std::string& theory_path) {
    SymbolTable st;
    if (!theory_path.empty()) st = load_theory(theory_path).symbols;
    st.auto_declare = true;
    return st;
}

// Named conjecture, else an equation in the theory's syntax.
Rule find_goal(Theory& th, const std::string& arg) {
    if (const Rule* r = th.find_conjecture(arg)) return *r;
    if (const Lemma* l = th.find_lemma(arg)) return l->rule;
    return {"goal", parse_equation(arg, th.symbols)};
}

void tree_records(const ProofNode& n, Json path, Output& out) {
    Json j;
    j["record"] = "node";
    j["path"] = path;
    j["kind"] = to_string(n.kind);
    j["goal"] = format_equation(n.goal);
    switch (n.kind) {
        case NodeKind::induction: {
            j["variable"] = n.variable;
            j["datatype"] = n.datatype;
            Json cases = Json::array();
            for (const auto& c : n.cases) {
                Json h = Json::array();
                for (const auto& e : c.hypotheses) h.push_back(format_equation(e));
                cases.push_back({{"instance", format_term(c.instance)}, {"hypotheses", h}});
            }
            j["cases"] = cases;
            break;
        }
        case NodeKind::lemma_use:
            j["lemma"] = n.lemma.name;
            j["equation"] = format_equation(n.lemma.eq);
            j["assumed"] = n.assumed;
            break;
        case NodeKind::ripple:
            j["annotated"] = format_annotated_goal(n.trace->initial);
            j["outcome"] = to_string(n.trace->outcome);
            break;
        case NodeKind::fertilize:
            j["annotated"] = format_annotated_goal(n.fertilization->before);
            break;
        case NodeKind::open:
            if (!n.note.empty()) j["note"] = n.note;
            break;
        default: break;
    }
    Json steps = Json::array();
    if (n.kind == NodeKind::ripple) {
        for (const auto& s : n.trace->steps)
            steps.push_back({{"rule", s.rule.source},
                             {"position", position_json(s.position)},
                             {"before", format_annotated_goal(s.before)},
                             {"after", format_annotated_goal(s.after)}});
    } else if (n.kind == NodeKind::fertilize) {
        const auto& f = *n.fertilization;
        steps.push_back({{"rule", "hypothesis"},
                         {"position", position_json(f.position)},
                         {"before", format_annotated_goal(f.before)},
                         {"after", format_annotated_goal(f.after)}});
    } else {
        for (const auto& s : n.steps)
            steps.push_back({{"rule", s.rule},
                             {"position", position_json(s.position)},
                             {"before", format_equation(Equation::from_term(s.before))},
                             {"after", format_equation(Equation::from_term(s.after))}});
    }
    if (!steps.empty()) j["steps"] = steps;
    out.record(j);
    for (std::size_t i = 0; i < n.children.size(); ++i) {
        Json p = path;
        p.push_back(i);
        tree_records(n.children[i], p, out);
    }
}

void emit_tree(const ProofNode& tree, bool trace, Output& out) {
    if (out.structured()) {
        tree_records(tree, Json::array(), out);
        return;
    }
    std::string s = render_tree(tree, trace);
    if (!s.empty() && s.back() == '\n') s.pop_back();
    out.text(s);
}

ProveOptions prove_options(const Config& c) {
    ProveOptions o;
    o.simplify_bound = c.budget;
    return o;
}

// Theory lemmas are proved before use; unproved ones are assumed only on request.
std::vector<LemmaProof> settle_lemmas(Theory& th, const Config& c, Output& out) {
    std::vector<LemmaProof> used;
    CriticOptions opts;
    opts.prove = prove_options(c);
    opts.depth = c.no_critic ? 0 : 1;
    for (auto& l : th.lemmas) {
        if (l.status != LemmaStatus::unproved) continue;
        CriticResult r = patch_and_retry(l.rule.eq, th, opts);
        if (r.result.closed && replay_check(r.result.tree, th).ok) {
            l.status = LemmaStatus::proved;
            used.push_back({l.rule, r.result.tree});
        } else if (c.assume_lemmas) {
            l.status = LemmaStatus::assumed;
            used.push_back({l.rule, std::nullopt});
        }
        out.text("lemma " + l.rule.name + ": " + format_equation(l.rule.eq) + " [" + to_string(l.status) + "]");
        out.record({{"record", "lemma"},
                    {"name", l.rule.name},
                    {"equation", format_equation(l.rule.eq)},
                    {"status", to_string(l.status)}});
    }
    return used;
}

int finish_proof(const ProofNode& tree, bool closed, const Theory& original, const Config& c, Output& out) {
    std::string status = closed ? "proved" : "open";
    std::string check = "skipped";
    if (closed) {
        CheckResult r = replay_check(tree, original, c.assume_lemmas);
        check = r.ok ? "ok" : "rejected: " + r.error;
        if (!r.ok) status = "unchecked";
    }
    out.text("status: " + status);
    if (closed) out.text("check: " + check);
    out.record({{"record", "result"}, {"status", status}, {"check", check}});
    return status == "proved" ? 0 : 1;
}

int cmd_prove(const Config& c, Output& out) {
    Theory th = load_theory(c.theory);
    const Theory original = th;
    Rule goal = find_goal(th, c.conjecture);
    out.text("conjecture " + goal.name + ": " + format_equation(goal.eq));
    out.record({{"record", "conjecture"}, {"name", goal.name}, {"goal", format_equation(goal.eq)}});
    std::vector<LemmaProof> lemmas = settle_lemmas(th, c, out);

    CriticOptions opts;
    opts.prove = prove_options(c);
    opts.depth = c.no_critic ? 0 : 1;
    CriticResult r = patch_and_retry(goal.eq, th, opts);
    for (const auto& l : r.installed) {
        out.text("speculated lemma " + l.lemma.name + ": " + format_equation(l.lemma.eq) + " [proved]");
        out.record({{"record", "lemma"},
                    {"name", l.lemma.name},
                    {"equation", format_equation(l.lemma.eq)},
                    {"status", "proved"},
                    {"speculated", true}});
    }
    ProofNode tree = with_lemmas(r.result.tree, lemmas);
    emit_tree(tree, c.trace, out);
    return finish_proof(tree, r.result.closed, original, c, out);
}

int cmd_critic(const Config& c, Output& out) {
    Theory th = load_theory(c.theory);
    const Theory original = th;
    Rule goal = find_goal(th, c.conjecture);
    std::vector<LemmaProof> lemmas = settle_lemmas(th, c, out);

    CriticOptions opts;
    opts.prove = prove_options(c);
    CriticResult r = patch_and_retry(goal.eq, th, opts);
    if (!r.report) {
        std::vector<Equation> goals = r.result.history;
        for (std::size_t i = 0; i < goals.size(); ++i) {
            out.text("goal " + std::to_string(i) + ": " + format_equation(goals[i]));
            out.record({{"record", "goal"}, {"index", i}, {"goal", format_equation(goals[i])}});
        }
        out.text(r.result.closed ? "no divergence: proved without lemmas" : "no divergence detected");
        out.record({{"record", "report"}, {"divergence", false}});
    } else {
        const DivergenceReport& rep = *r.report;
        std::string s = format_report(rep);
        if (!s.empty() && s.back() == '\n') s.pop_back();
        out.text(s);
        for (std::size_t i = 0; i < rep.goals.size(); ++i)
            out.record({{"record", "goal"}, {"index", i}, {"goal", format_equation(rep.goals[i])}});
        Json chains = Json::array();
        for (const auto& ch : rep.chains) {
            Json layers = Json::array();
            for (const auto& l : ch.layers)
                layers.push_back({{"pair", l.pair},
                                  {"position", position_json(l.position)},
                                  {"context", format_term(l.context)},
                                  {"hole", position_json(l.hole)}});
            chains.push_back(layers);
        }
        Json matches = Json::array();
        for (const auto& p : rep.pairs)
            matches.push_back(p.annotated ? Json(format_annotated_goal(*p.annotated)) : Json(nullptr));
        out.record({{"record", "report"},
                    {"divergence", true},
                    {"matches", matches},
                    {"start", rep.start},
                    {"evidence", rep.evidence},
                    {"chains", chains}});
    }
    for (std::size_t i = 0; i < r.candidates.size(); ++i) {
        const auto& k = r.candidates[i];
        std::string line = "candidate " + std::to_string(i + 1) + ": " + format_equation(k.eq) + " [" + to_string(k.status) + "]";
        if (!k.note.empty()) line += " " + k.note;
        out.text(line);
        out.record({{"record", "candidate"},
                    {"rank", i + 1},
                    {"equation", format_equation(k.eq)},
                    {"admissible", k.admissible},
                    {"status", to_string(k.status)},
                    {"note", k.note}});
    }
    ProofNode tree = with_lemmas(r.result.tree, lemmas);
    emit_tree(tree, true, out);
    return finish_proof(tree, r.result.closed, original, c, out);
}

int cmd_ripple(const Config& c, Output& out) {
    Theory th = load_theory(c.theory);
    for (auto& l : th.lemmas)
        if (c.assume_lemmas && l.status == LemmaStatus::unproved) l.status = LemmaStatus::assumed;
    AnnTerm goal = parse_annotated_goal(c.conjecture, th.symbols);
    if (auto w = check_wat(goal); !w.ok()) throw TermError(std::string("goal is not well annotated: ") + to_string(w.violation));
    RippleOptions opts;
    opts.max_steps = c.max_steps;
    if (!c.hypothesis.empty()) {
        Equation h = parse_equation(c.hypothesis, th.symbols);
        opts.hypothesis = h;
    }
    RippleTrace t = ripple(goal, th.wave_rules(), opts);
    if (out.structured()) {
        for (const auto& s : t.steps)
            out.record({{"record", "step"},
                        {"rule", s.rule.source},
                        {"position", position_json(s.position)},
                        {"before", format_annotated_goal(s.before)},
                        {"after", format_annotated_goal(s.after)},
                        {"measure", format_measure(measure(s.after))}});
        out.record({{"record", "result"},
                    {"outcome", to_string(t.outcome)},
                    {"goal", format_annotated_goal(t.final_goal())}});
    } else {
        std::string s = format_trace(t);
        if (!s.empty() && s.back() == '\n') s.pop_back();
        out.text(s);
    }
    return t.outcome == RippleOutcome::blocked ? 1 : 0;
}

int cmd_dmatch(const Config& c, Output& out) {
    SymbolTable st = term_symbols(c.theory);
    Term p = parse_term(c.left, st), t = parse_term(c.right, st);
    std::vector<DMatch> ms;
    if (c.first) {
        if (auto m = dmatch_first(p, t)) ms.push_back(*m);
    } else {
        ms = dmatch_all(p, t, c.cap ? c.cap : unlimited);
    }
    for (const auto& m : ms) {
        out.text(format_dmatch(m));
        out.record({{"record", "match"},
                    {"annotated", format_annotated(m.annotated_target)},
                    {"subst", subst_json(m.subst)},
                    {"cost", m.cost()}});
    }
    out.text(std::to_string(ms.size()) + (ms.size() == 1 ? " match" : " matches"));
    out.record({{"record", "result"}, {"count", ms.size()}});
    return ms.empty() ? 1 : 0;
}

int cmd_dunify(const Config& c, Output& out) {
    SymbolTable st = term_symbols(c.theory);
    Term l = parse_term(c.left, st), r = parse_term(c.right, st);
    std::vector<DUnifier> us;
    if (c.minimal) {
        if (auto u = dunify_minimal(l, r)) us.push_back(*u);
    } else {
        us = dunify(l, r, c.cap ? c.cap : unlimited);
    }
    for (const auto& u : us) {
        out.text(format_dunifier(u));
        out.record({{"record", "unifier"},
                    {"left", format_annotated(u.annotated_left)},
                    {"right", format_annotated(u.annotated_right)},
                    {"subst", subst_json(u.subst)},
                    {"cost", u.annotation_cost}});
    }
    out.text(std::to_string(us.size()) + (us.size() == 1 ? " unifier" : " unifiers"));
    out.record({{"record", "result"}, {"count", us.size()}});
    return us.empty() ? 1 : 0;
}

int cmd_check(const Config& c, Output& out, std::ostream& err) {
    Theory th = load_theory(c.theory);
    auto problems = check_theory(th);
    if (!problems.empty()) {
        err << "error: " << problems.front() << "\n";
        return 2;
    }
    out.text("theory ok: " + std::to_string(th.datatypes.size()) + " datatypes, " +
             std::to_string(th.definitions.size()) + " definitions");
    out.record({{"record", "theory"},
                {"datatypes", th.datatypes.size()},
                {"definitions", th.definitions.size()},
                {"problems", 0}});
    bool all_ok = true;
    for (const auto& w : th.wave_rules()) {
        bool ok = check_certificate(w);
        all_ok = all_ok && ok;
        out.text(format_wave_rule(w) + "  skeleton " + format_term(w.skeleton) + "  measure " +
                 format_measure(w.lhs_measure) + " > " + format_measure(w.rhs_measure) +
                 (ok ? "  certificate ok" : "  certificate FAILED"));
        out.record({{"record", "wave_rule"},
                    {"source", w.source},
                    {"lhs", format_annotated(w.lhs)},
                    {"rhs", format_annotated(w.rhs)},
                    {"skeleton", format_term(w.skeleton)},
                    {"lhs_measure", format_measure(w.lhs_measure)},
                    {"rhs_measure", format_measure(w.rhs_measure)},
                    {"certificate", ok}});
    }
    return all_ok ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Term rewriting, difference matching and rippling"};
    app.name("rippling");
    app.require_subcommand(1);
    Config c;

    auto format_opt = [&](CLI::App* s) {
        s->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"text", "structured"}));
    };
    auto prover_opts = [&](CLI::App* s) {
        s->add_option("theory", c.theory, "Theory file")->required();
        s->add_option("conjecture", c.conjecture, "Conjecture name or equation")->required();
        s->add_option("--budget", c.budget, "Rewrite steps allowed per simplification")->check(CLI::PositiveNumber);
        s->add_flag("--assume-lemmas", c.assume_lemmas, "Use theory lemmas without proof");
        format_opt(s);
    };

    auto* prove = app.add_subcommand("prove", "Prove a conjecture by induction and rippling");
    prover_opts(prove);
    prove->add_flag("--trace", c.trace, "List every rewrite and ripple step");
    prove->add_flag("--no-critic", c.no_critic, "Do not speculate lemmas");

    auto* critic = app.add_subcommand("critic", "Show divergence analysis and speculated lemmas");
    prover_opts(critic);

    auto* rip = app.add_subcommand("ripple", "Ripple an annotated goal with the theory's wave rules");
    rip->add_option("theory", c.theory, "Theory file")->required();
    rip->add_option("goal", c.conjecture, "Annotated goal, e.g. \"(append {cons e [x]} nil) = {cons e [x]}\"")->required();
    rip->add_option("--hypothesis", c.hypothesis, "Induction hypothesis for fertilization");
    rip->add_option("--max-steps", c.max_steps, "Step limit")->check(CLI::PositiveNumber);
    rip->add_flag("--assume-lemmas", c.assume_lemmas, "Derive wave rules from theory lemmas too");
    format_opt(rip);

    auto* dm = app.add_subcommand("dmatch", "Difference match a pattern against a target");
    dm->add_option("pattern", c.left, "Pattern term")->required();
    dm->add_option("target", c.right, "Target term")->required();
    dm->add_option("--cap", c.cap, "Maximum number of matches")->check(CLI::PositiveNumber);
    dm->add_flag("--first", c.first, "Only the first match found by the linear search");
    dm->add_option("--theory", c.theory, "Theory file for symbol declarations");
    format_opt(dm);

    auto* du = app.add_subcommand("dunify", "Difference unify two terms");
    du->add_option("left", c.left, "Left term")->required();
    du->add_option("right", c.right, "Right term")->required();
    du->add_option("--cap", c.cap, "Maximum number of unifiers")->check(CLI::PositiveNumber);
    du->add_flag("--minimal", c.minimal, "Only a least-cost unifier");
    du->add_option("--theory", c.theory, "Theory file for symbol declarations");
    format_opt(du);

    auto* chk = app.add_subcommand("check", "Validate a theory and list its wave rules");
    chk->add_option("theory", c.theory, "Theory file")->required();
    format_opt(chk);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    Output o(out, c.structured());
    try {
        if (prove->parsed()) return cmd_prove(c, o);
        if (critic->parsed()) return cmd_critic(c, o);
        if (rip->parsed()) return cmd_ripple(c, o);
        if (dm->parsed()) return cmd_dmatch(c, o);
        if (du->parsed()) return cmd_dunify(c, o);
        if (chk->parsed()) return cmd_check(c, o, err);
    } catch (const TermError& e) {
        err << "error: " << e.what();
        if (e.offset() != TermError::npos) err << " (at offset " << e.offset() << ")";
        err << "\n";
        return 2;
    } catch (const TheoryError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace rippling
