#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "rippling/difference.hpp"

using namespace rippling;

namespace {

SymbolTable syms() {
    SymbolTable st;
    st.auto_declare = true;
    st.declare({"nil", 0, SymbolKind::constructor});
    st.declare({"cons", 2, SymbolKind::constructor});
    st.declare({"append", 2, SymbolKind::defined});
    for (const char* v : {"x", "e"}) st.declare_var(v);
    return st;
}

Term term(const char* s) {
    static SymbolTable st = syms();
    return parse_term(s, st);
}

const oracle::Signature kSig{{{"f", 2}, {"g", 1}, {"a", 0}, {"b", 0}}, {"X", "Y"}};

void check_dmatch(const DMatch& m, const Term& p, const Term& t) {
    CHECK(is_wat(m.annotated_target));
    CHECK(erase(m.annotated_target) == t);
    CHECK(skeletons(m.annotated_target).count(apply_subst(m.subst, p)) == 1);
}

void check_dunifier(const DUnifier& u, const Term& s, const Term& t) {
    CHECK(is_wat(u.annotated_left));
    CHECK(is_wat(u.annotated_right));
    CHECK(erase(u.annotated_left) == s);
    CHECK(erase(u.annotated_right) == t);
    CHECK(u.annotation_cost == annotation_cost(u.annotated_left) + annotation_cost(u.annotated_right));
    std::set<Term> ls, rs;
    for (const auto& k : skeletons(u.annotated_left)) ls.insert(apply_subst(u.subst, k));
    bool meet = false;
    for (const auto& k : skeletons(u.annotated_right)) meet = meet || ls.count(apply_subst(u.subst, k));
    CHECK(meet);
}

}  // namespace

TEST_CASE("dmatch_first annotates the step-case conclusion") {
    Term p = term("(append x nil)"), t = term("(append (cons e x) nil)");
    auto m = dmatch_first(p, t);
    REQUIRE(m);
    CHECK(m->subst.empty());
    CHECK(format_annotated(m->annotated_target) == "(append {cons e [x]} nil)");
    check_dmatch(*m, p, t);
}

TEST_CASE("dmatch_first basic cases") {
    Term t = term("(append x nil)");
    auto id = dmatch_first(t, t);
    REQUIRE(id);
    CHECK(id->subst.empty());
    CHECK_FALSE(id->annotated_target.annotated());

    auto m = dmatch_first(term("(f A)"), term("(g (f a))"));
    REQUIRE(m);
    CHECK(format_subst(m->subst) == "{A -> a}");
    CHECK(format_annotated(m->annotated_target) == "{g [(f a)]}");

    CHECK_FALSE(dmatch_first(term("(f A)"), term("(g a)")));
    CHECK_FALSE(dmatch_first(term("a"), term("b")));
    auto v = dmatch_first(term("A"), term("(g a)"));
    REQUIRE(v);
    CHECK(format_subst(v->subst) == "{A -> (g a)}");
}

TEST_CASE("dmatch_first backtracks on repeated variables") {
    auto m = dmatch_first(term("(k X X)"), term("(k (g a) a)"));
    REQUIRE(m);
    CHECK(format_annotated(m->annotated_target) == "(k {g [a]} a)");
    CHECK(format_subst(m->subst) == "{X -> a}");
    CHECK_FALSE(dmatch_first(term("(k X X)"), term("(k a b)")));
}

TEST_CASE("dmatch_all contains the step-case annotation and is cost ordered") {
    Term p = term("(append x nil)"), t = term("(append (cons e x) nil)");
    auto all = dmatch_all(p, t);
    REQUIRE_FALSE(all.empty());
    CHECK(std::any_of(all.begin(), all.end(), [](const DMatch& m) {
        return format_annotated(m.annotated_target) == "(append {cons e [x]} nil)";
    }));
    for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].cost() <= all[i].cost());
    auto id = dmatch_all(t, t);
    REQUIRE(id.size() == 1);
    CHECK(id[0].cost() == 0);
    CHECK(dmatch_all(p, t, 0).empty());
}

TEST_CASE("dmatch_all equals the mark-enumeration oracle on random pairs") {
    std::mt19937 rng(31);
    for (int i = 0; i < 400; ++i) {
        Term p = oracle::random_term(rng, kSig, 4, 0.4);
        Term t = oracle::random_term(rng, oracle::Signature{kSig.symbols, {}}, 7, 0);
        auto got = dmatch_all(p, t);
        std::set<oracle::MatchKey> mine;
        for (const auto& m : got) {
            check_dmatch(m, p, t);
            mine.insert({m.subst, m.annotated_target});
        }
        CHECK(mine.size() == got.size());
        CHECK(mine == oracle::dmatch(p, t, default_rigid(p, t)));
        auto first = dmatch_first(p, t);
        CHECK(first.has_value() == !got.empty());
        if (first) check_dmatch(*first, p, t);
    }
}

TEST_CASE("dmatch_first visits are linear in the target") {
    std::mt19937 rng(37);
    oracle::Signature ground{kSig.symbols, {}};
    for (std::size_t n : {10u, 100u, 1000u}) {
        Term t = oracle::random_term(rng, ground, n, 0);
        Term p = term("(k A (g B))");
        dmatch_first(p, t);
        CHECK(dmatch_first_visits() <= 8 * t.size() + 8);
    }
}

TEST_CASE("dunify basic cases") {
    auto u = dunify(term("(p X a)"), term("(p b Y)"), 1);
    REQUIRE(u.size() == 1);
    CHECK(u[0].annotation_cost == 0);
    CHECK(format_subst(u[0].subst) == "{X -> b, Y -> a}");

    VarSet rigid{"a1", "b1", "c1"};
    SymbolTable st;
    st.declare({"cons", 2, SymbolKind::constructor});
    st.declare({"append", 2, SymbolKind::defined});
    for (const char* v : {"a1", "b1", "c1"}) st.declare_var(v);
    Term l = parse_term("(append (cons a1 b1) c1)", st), r = parse_term("(cons a1 (append b1 c1))", st);
    auto all = dunify(l, r, unlimited, rigid);
    bool expected = false;
    for (const auto& d : all) {
        check_dunifier(d, l, r);
        expected = expected || (format_annotated(d.annotated_left) == "(append {cons a1 [b1]} c1)" &&
                          format_annotated(d.annotated_right) == "{cons a1 [(append b1 c1)]}");
    }
    CHECK(expected);

    CHECK_FALSE(dunify_minimal(term("a"), term("b")));
    auto same = dunify_minimal(term("(g a)"), term("(g a)"));
    REQUIRE(same);
    CHECK(same->annotation_cost == 0);
    auto min = dunify_minimal(l, r, rigid);
    REQUIRE(min);
    CHECK(min->annotation_cost == all[0].annotation_cost);
    CHECK(min->annotation_cost == *oracle::dunify_min_cost(l, r, rigid));
}

TEST_CASE("dunify equals the double-annotation oracle on random pairs") {
    std::mt19937 rng(41);
    oracle::Signature left{kSig.symbols, {"X"}}, right{kSig.symbols, {"Y"}};
    for (int i = 0; i < 200; ++i) {
        Term s = oracle::random_term(rng, left, 5, 0.3);
        Term t = oracle::random_term(rng, right, 5, 0.3);
        auto got = dunify(s, t);
        std::set<oracle::UnifierKey> mine;
        for (std::size_t k = 0; k < got.size(); ++k) {
            check_dunifier(got[k], s, t);
            if (k > 0) CHECK(got[k - 1].annotation_cost <= got[k].annotation_cost);
            mine.insert({got[k].subst, got[k].annotated_left, got[k].annotated_right});
        }
        CHECK(mine == oracle::dunify(s, t));
        auto mc = oracle::dunify_min_cost(s, t);
        auto min = dunify_minimal(s, t);
        REQUIRE(min.has_value() == mc.has_value());
        if (min) {
            check_dunifier(*min, s, t);
            CHECK(min->annotation_cost == *mc);
        }
        // Cost-zero results are exactly the ordinary unifiers.
        auto mgu = unify_first_order(s, t);
        std::size_t zero = 0;
        for (const auto& d : got) zero += d.annotation_cost == 0;
        CHECK(zero == (mgu ? 1u : 0u));
    }
}
