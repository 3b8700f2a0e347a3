#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rippling/term.hpp"

using namespace rippling;

namespace {

SymbolTable list_symbols() {
    SymbolTable st;
    st.declare({"nil", 0, SymbolKind::constructor});
    st.declare({"cons", 2, SymbolKind::constructor});
    st.declare({"append", 2, SymbolKind::defined});
    st.declare({"rev", 1, SymbolKind::defined});
    st.declare({"f", 2, SymbolKind::function});
    st.declare({"a", 0, SymbolKind::function});
    st.declare({"b", 0, SymbolKind::function});
    for (const char* v : {"x", "e", "y"}) st.declare_var(v);
    return st;
}

const oracle::Signature kSig{{{"f", 2}, {"g", 1}, {"a", 0}, {"b", 0}, {"c", 0}}, {"X", "Y", "Z"}};

}  // namespace

TEST_CASE("parse_term builds applications and variables") {
    auto st = list_symbols();
    Term t = parse_term("(append x nil)", st);
    CHECK(t == Term::app("append", {Term::var("x"), Term::app("nil")}));
    CHECK(parse_term("x", st) == Term::var("x"));
    CHECK(parse_term("Q", st).is_var());

    Term n = parse_term("(cons e (cons e x))", st);
    CHECK(n.depth() == 2);
    CHECK(format_term(n) == "(cons e (cons e x))");
}

TEST_CASE("parse_term error paths") {
    auto st = list_symbols();
    CHECK_THROWS_AS(parse_term("(append x)", st), TermError);
    CHECK_THROWS_AS(parse_term("(frob x)", st), TermError);
    CHECK_THROWS_AS(parse_term("(append x nil", st), TermError);
    CHECK_THROWS_AS(parse_term("(append x nil))", st), TermError);
    CHECK_THROWS_AS(parse_term("cons", st), TermError);
    try {
        parse_term("(append x (frob))", st);
        FAIL("expected error");
    } catch (const TermError& e) {
        CHECK(e.offset() == 11);
    }
}

TEST_CASE("auto-declared symbols fix their arity on first use") {
    SymbolTable st;
    st.auto_declare = true;
    Term t = parse_term("(f (g a) b)", st);
    CHECK(t.size() == 4);
    CHECK(st.find("f")->arity == 2);
    CHECK_THROWS_AS(parse_term("(f a)", st), TermError);
}

TEST_CASE("format and parse round-trip on random terms") {
    std::mt19937 rng(7);
    SymbolTable st;
    st.auto_declare = true;
    for (int i = 0; i < 1000; ++i) {
        Term t = oracle::random_term(rng, kSig, 12, 0.3);
        CHECK(parse_term(format_term(t), st) == t);
    }
}

TEST_CASE("equations parse in both notations") {
    auto st = list_symbols();
    Equation a = parse_equation("(append x nil) = x", st);
    Equation b = parse_equation("(= (append x nil) x)", st);
    CHECK(a == b);
    CHECK(format_equation(a) == "(append x nil) = x");
}

TEST_CASE("apply_subst") {
    auto st = list_symbols();
    Term t = parse_term("(append x nil)", st);
    Substitution s;
    s.bind("x", Term::app("nil"));
    CHECK(format_term(apply_subst(s, t)) == "(append nil nil)");
    CHECK(apply_subst(Substitution{}, t) == t);

    Substitution w;
    w.bind("B", Term::var("x"));
    w.bind("A", Term::var("e"));
    w.bind("C", Term::app("nil"));
    Term rhs = parse_term("(cons A (append B C))", st);
    CHECK(format_term(apply_subst(w, rhs)) == "(cons e (append x nil))");
}

TEST_CASE("match_first_order") {
    auto st = list_symbols();
    auto m = match_first_order(parse_term("(append A C)", st), parse_term("(append x nil)", st));
    REQUIRE(m);
    CHECK(format_subst(*m) == "{A -> x, C -> nil}");
    CHECK_FALSE(match_first_order(parse_term("(cons A A)", st), parse_term("(cons e x)", st)));
    // Rigid variables behave as constants.
    CHECK_FALSE(match_first_order(parse_term("(append x nil)", st), parse_term("(append y nil)", st), {"x"}));
}

TEST_CASE("match succeeds on every instance and agrees with brute force") {
    std::mt19937 rng(11);
    oracle::Signature ground{kSig.symbols, {}};
    for (int i = 0; i < 500; ++i) {
        Term p = oracle::random_term(rng, kSig, 6, 0.4);
        Substitution s;
        for (const auto& v : variables(p)) s.bind(v, oracle::random_term(rng, ground, 3, 0));
        Term inst = apply_subst(s, p);
        auto m = match_first_order(p, inst);
        REQUIRE(m);
        CHECK(apply_subst(*m, p) == inst);

        // Cross-check against candidate-binding enumeration on small pairs.
        Term q = oracle::random_term(rng, kSig, 5, 0.5);
        Term target = oracle::random_term(rng, ground, 8, 0);
        if (variables(q).size() > 3 || target.size() > 8) continue;
        CHECK(match_first_order(q, target).has_value() == oracle::match(q, target).has_value());
    }
}

TEST_CASE("unify_first_order") {
    SymbolTable st;
    st.auto_declare = true;
    auto m = unify_first_order(parse_term("(f X a)", st), parse_term("(f b Y)", st));
    REQUIRE(m);
    CHECK(format_subst(*m) == "{X -> b, Y -> a}");
    CHECK_FALSE(unify_first_order(Term::var("X"), parse_term("(g X)", st)));
    CHECK_FALSE(unify_first_order(parse_term("(f X X)", st), parse_term("(f a b)", st)));
}

TEST_CASE("unifiers are most general and idempotent") {
    std::mt19937 rng(3);
    oracle::Signature ground{kSig.symbols, {}};
    int unified = 0;
    for (int i = 0; i < 2000; ++i) {
        Term s = oracle::random_term(rng, kSig, 6, 0.5);
        Term t = oracle::random_term(rng, kSig, 6, 0.5);
        auto mgu = unify_first_order(s, t);
        if (!mgu) continue;
        ++unified;
        CHECK(mgu->idempotent());
        CHECK(apply_subst(*mgu, s) == apply_subst(*mgu, t));
        // Any ground instance of the mgu is a unifier that factors through it.
        Substitution g;
        for (const auto& v : variables(Term::app("p", {s, t}))) g.bind(v, oracle::random_term(rng, ground, 3, 0));
        Substitution theta;
        for (const auto& v : variables(Term::app("p", {s, t}))) theta.bind(v, apply_subst(g, apply_subst(*mgu, Term::var(v))));
        CHECK(apply_subst(theta, s) == apply_subst(theta, t));
        for (const auto& [v, b] : theta.bindings())
            CHECK(apply_subst(theta, apply_subst(*mgu, Term::var(v))) == b);
    }
    CHECK(unified > 100);
}

TEST_CASE("positions") {
    auto st = list_symbols();
    Term t = parse_term("(append (cons e x) nil)", st);
    CHECK(format_term(subterm_at(t, {1})) == "(cons e x)");
    CHECK(replace_at(t, {}, Term::var("y")) == Term::var("y"));
    CHECK_THROWS_AS(subterm_at(t, {3}), TermError);
    CHECK_THROWS_AS(subterm_at(t, {1, 2, 1}), TermError);
    CHECK(positions(t).size() == t.size());

    std::mt19937 rng(5);
    for (int i = 0; i < 300; ++i) {
        Term r = oracle::random_term(rng, kSig, 10, 0.3);
        auto ps = positions(r);
        const Position& p = ps[std::uniform_int_distribution<std::size_t>(0, ps.size() - 1)(rng)];
        CHECK(replace_at(r, p, subterm_at(r, p)) == r);
        Term u = Term::app("c");
        CHECK(subterm_at(replace_at(r, p, u), p) == u);
    }
}
