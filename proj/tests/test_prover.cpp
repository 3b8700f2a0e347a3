#include <doctest.h>

#include "mutations.hpp"
#include "rippling/checker.hpp"
#include "rippling/critic.hpp"
#include "rippling/prover.hpp"

using namespace rippling;

namespace {

const Theory& list_theory() {
    static Theory th = load_theory(THEORY_DIR "/list.thy");
    return th;
}

Equation eq(const char* s) {
    static Theory th = list_theory();
    return parse_equation(s, th.symbols);
}

}  // namespace

TEST_CASE("recursion analysis") {
    const Theory& th = list_theory();
    CHECK(recursion_analysis(eq("(append x nil) = x"), th).front().variable == "x");
    CHECK(recursion_analysis(eq("(rev (rev x)) = x"), th).front().variable == "x");
    // y sits in append's second argument only
    auto s = recursion_analysis(eq("(append (append x y) z) = (append x (append y z))"), th);
    CHECK(s.front().variable == "x");
    CHECK_THROWS_AS(recursion_analysis(eq("(append nil nil) = nil"), th), ProverError);

    InductionScheme sc = induction_scheme(eq("(append x nil) = x"), "x", th);
    REQUIRE(sc.cases.size() == 2);
    CHECK(format_term(sc.cases[1].instance) == "(cons e x)");
    REQUIRE(sc.cases[1].hypotheses.size() == 1);
    CHECK(format_equation(sc.cases[1].hypotheses[0]) == "(append x nil) = x");
}

TEST_CASE("trivial goals") {
    const Theory& th = list_theory();
    ProofResult r = prove(eq("x = x"), th);
    CHECK(r.closed);
    CHECK(r.tree.kind == NodeKind::reflexivity);
    CHECK(r.tree.children.empty());

    r = prove(eq("(append nil x) = x"), th);
    CHECK(r.closed);
    CHECK(r.tree.kind == NodeKind::simplify);
    CHECK(count_nodes(r.tree, NodeKind::induction) == 0);
}

TEST_CASE("append_nil proof shape") {
    const Theory& th = list_theory();
    ProofResult r = prove(th.find_conjecture("append_nil")->eq, th);
    REQUIRE(r.closed);
    const ProofNode& t = r.tree;
    REQUIRE(t.kind == NodeKind::induction);
    CHECK(t.variable == "x");
    REQUIRE(t.children.size() == 2);
    CHECK(t.children[0].kind == NodeKind::base_simplify);
    CHECK(t.children[0].children[0].kind == NodeKind::reflexivity);
    const ProofNode& rip = t.children[1];
    REQUIRE(rip.kind == NodeKind::ripple);
    REQUIRE(rip.steps.size() == 1);
    CHECK(rip.steps[0].rule == "append.2");
    CHECK(rip.steps[0].position == Position{1});
    REQUIRE(rip.trace);
    CHECK(rip.trace->outcome == RippleOutcome::fertilized);
    const ProofNode& fert = rip.children[0];
    REQUIRE(fert.kind == NodeKind::fertilize);
    CHECK(fert.steps[0].rule == "hypothesis");
    CHECK(fert.steps[0].position == Position{1, 2});
    CHECK(fert.children[0].kind == NodeKind::reflexivity);
    CHECK(format_equation(fert.children[0].goal) == "(cons e x) = (cons e x)");
}

TEST_CASE("rev_rev blocks without a lemma") {
    const Theory& th = list_theory();
    ProofResult r = prove(th.find_conjecture("rev_rev")->eq, th);
    CHECK_FALSE(r.closed);
    REQUIRE(r.history.size() == 3);
    CHECK(format_equation(r.history[1]) == "(rev (append (rev x) (cons e nil))) = (cons e x)");
    CHECK(format_equation(r.history[2]) == "(rev (append (append (rev x) (cons a nil)) (cons e nil))) = (cons e (cons a x))");
    CHECK(count_nodes(r.tree, NodeKind::open) > 0);
    CHECK_FALSE(replay_check(r.tree, th).ok);
}

TEST_CASE("checker accepts closed proofs") {
    const Theory& th = list_theory();
    auto proofs = mutation::closed_proofs(th);
    CHECK(proofs.size() == th.conjectures.size());
    for (const auto& [name, tree] : proofs) {
        CheckResult c = replay_check(tree, th);
        INFO(name << ": " << c.error);
        CHECK(c.ok);
    }
}

TEST_CASE("checker rejects corrupted proofs") {
    const Theory& th = list_theory();
    auto ms = mutation::mutants(th);
    CHECK(ms.size() == 20);
    for (const auto& m : ms) {
        INFO(m.name);
        CHECK_FALSE(replay_check(m.tree, th).ok);
    }
    // an assumed lemma passes only when allowed
    const auto& assumed = ms[17];
    REQUIRE(assumed.name == "assumed lemma");
    CheckResult c = replay_check(assumed.tree, th, true);
    CHECK(c.ok);
    CHECK(c.assumed.size() == 1);
}
