#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rippling/annotation.hpp"

using namespace rippling;

namespace {

SymbolTable syms() {
    SymbolTable st;
    st.declare({"nil", 0, SymbolKind::constructor});
    st.declare({"cons", 2, SymbolKind::constructor});
    st.declare({"append", 2, SymbolKind::defined});
    st.declare({"f", 2, SymbolKind::function});
    st.declare({"g", 1, SymbolKind::function});
    st.declare({"a", 0, SymbolKind::function});
    for (const char* v : {"x", "e"}) st.declare_var(v);
    return st;
}

AnnTerm ann(const char* s) {
    static SymbolTable st = syms();
    return parse_annotated(s, st);
}

// Random marks on a random term; not necessarily well formed.
AnnTerm random_marks(std::mt19937& rng, const Term& t, double p) {
    std::bernoulli_distribution coin(p);
    if (t.is_var()) return AnnTerm::var(t.name(), coin(rng));
    std::vector<AnnTerm> args;
    for (const auto& a : t.args()) args.push_back(random_marks(rng, a, p));
    return AnnTerm::app(t.name(), args, t.arity() > 0 && coin(rng), coin(rng));
}

const oracle::Signature kSig{{{"f", 2}, {"g", 1}, {"a", 0}, {"b", 0}}, {"X", "Y"}};

}  // namespace

TEST_CASE("annotated syntax round-trips") {
    for (const char* s : {"(append {cons e [x]} nil)", "{cons e [(append x nil)]}", "{f [a] [{g [x]}]}", "x"}) {
        CHECK(format_annotated(ann(s)) == s);
    }
    SymbolTable st = syms();
    CHECK_THROWS_AS(parse_annotated("{cons e [x]", st), TermError);
    CHECK_THROWS_AS(parse_annotated("[[x]]", st), TermError);
    CHECK(format_annotated_goal(parse_annotated_goal("(append {cons e [x]} nil) = {cons e [x]}", st)) ==
          "(append {cons e [x]} nil) = {cons e [x]}");
}

TEST_CASE("erase") {
    CHECK(format_term(erase(ann("{cons e [x]}"))) == "(cons e x)");
    CHECK(format_term(erase(ann("(append x nil)"))) == "(append x nil)");
    CHECK(erase(ann("{f [a] a}")) == erase(ann("{f a [a]}")));
}

TEST_CASE("skeletons") {
    auto s1 = skeletons(ann("{cons e [x]}"));
    REQUIRE(s1.size() == 1);
    CHECK(format_term(*s1.begin()) == "x");

    auto s2 = skeletons(ann("(append {cons e [x]} nil)"));
    REQUIRE(s2.size() == 1);
    CHECK(format_term(*s2.begin()) == "(append x nil)");

    auto s3 = skeletons(ann("(append {cons [e] [x]} nil)"));
    CHECK(s3.size() == 2);
    CHECK(s3 == oracle::skeletons(ann("(append {cons [e] [x]} nil)")));
}

TEST_CASE("is_wat reports the violated invariant") {
    CHECK(is_wat(ann("(append {cons e [x]} nil)")));
    CHECK(is_wat(ann("{cons e [(append x nil)]}")));
    CHECK(check_wat(ann("{cons e x}")).violation == WatViolation::hole_existence);
    CHECK(check_wat(ann("(append [x] nil)")).violation == WatViolation::stray_hole);
    CHECK(check_wat(ann("{f {g [x]} a}")).violation == WatViolation::nested_wavefront);
    CHECK(is_wat(ann("{f [{g [x]}] a}")));
    auto r = check_wat(ann("(f a {g x})"));
    CHECK(r.violation == WatViolation::hole_existence);
    CHECK(r.position == Position{2});
    CHECK(check_wat(AnnTerm::var("x").with_front(true)).violation == WatViolation::variable_wavefront);
}

TEST_CASE("is_wat agrees with an independent checker on random marks") {
    std::mt19937 rng(17);
    int wats = 0;
    for (int i = 0; i < 20000; ++i) {
        Term t = oracle::random_term(rng, kSig, 9, 0.3);
        AnnTerm a = random_marks(rng, t, 0.3);
        bool ok = is_wat(a);
        CHECK(ok == oracle::is_wat(a));
        if (!ok) continue;
        ++wats;
        CHECK(erase(a) == t);
        CHECK(skeletons(a) == oracle::skeletons(a));
        CHECK(annotation_cost(a) == oracle::cost(a));
        CHECK(measure(a).weights.empty() == !a.annotated());
    }
    CHECK(wats > 1000);
}

TEST_CASE("skeletons are no larger than the erasure") {
    std::mt19937 rng(19);
    for (int i = 0; i < 3000; ++i) {
        Term t = oracle::random_term(rng, kSig, 9, 0.3);
        AnnTerm a = random_marks(rng, t, 0.35);
        if (!is_wat(a)) continue;
        for (const auto& s : skeletons(a)) {
            CHECK(s.size() <= t.size());
        }
    }
}

TEST_CASE("measure moves outward across the append wave-rule step") {
    Measure before = measure(ann("(append {cons e [x]} nil)"));
    Measure after = measure(ann("{cons e [(append x nil)]}"));
    CHECK(before.weights == std::vector<std::size_t>{0, 2});
    CHECK(after.weights == std::vector<std::size_t>{2});
    CHECK(measure_less(after, before));
    CHECK_FALSE(measure_less(before, after));
    CHECK(measure(ann("(append x nil)")).weights.empty());
    CHECK_FALSE(measure_less(Measure{}, Measure{}));
    CHECK(measure_less(Measure{}, after));
}

TEST_CASE("measure_less is a strict partial order") {
    std::mt19937 rng(23);
    std::uniform_int_distribution<std::size_t> len(0, 4), val(0, 3);
    auto gen = [&] {
        Measure m;
        m.weights.resize(len(rng));
        for (auto& w : m.weights) w = val(rng);
        while (!m.weights.empty() && m.weights.back() == 0) m.weights.pop_back();
        return m;
    };
    for (int i = 0; i < 10000; ++i) {
        Measure a = gen(), b = gen(), c = gen();
        CHECK_FALSE(measure_less(a, a));
        if (measure_less(a, b) && measure_less(b, c)) CHECK(measure_less(a, c));
        if (measure_less(a, b)) CHECK_FALSE(measure_less(b, a));
    }
}

TEST_CASE("wavefronts report skeleton depth and size") {
    SymbolTable st = syms();
    auto fs = wavefronts(parse_annotated_goal("(append {cons e [x]} nil) = {cons e [x]}", st));
    REQUIRE(fs.size() == 2);
    CHECK(fs[0].position == Position{1, 1});
    CHECK(fs[0].skeleton_depth == 2);
    CHECK(fs[0].holes == std::vector<Position>{{2}});
    CHECK(fs[1].skeleton_depth == 1);
    CHECK(fs[1].size == 2);
}
