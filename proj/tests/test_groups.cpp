#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "transv/groups.hpp"

using namespace transv;

namespace {

GroupPtr cyclic(int n, const std::string& name) {
    std::vector<std::string> names;
    std::vector<std::vector<int>> table(n, std::vector<int>(n));
    for (int i = 0; i < n; ++i) {
        names.push_back(i == 0 ? "e" : "a" + std::to_string(i));
        for (int j = 0; j < n; ++j) table[i][j] = (i + j) % n;
    }
    return BaseGroup::finite(name, names, table);
}

GroupPtr z2() {
    return BaseGroup::finite("C2", {"e", "a"}, {{0, 1}, {1, 0}});
}

BaseElement random_element(const GroupPtr& g, std::mt19937& rng, int max_len = 6) {
    std::uniform_int_distribution<int> len(0, max_len);
    BaseElement r = identity_of(g);
    switch (g->kind) {
        case GroupKind::Trivial: break;
        case GroupKind::Finite: {
            std::uniform_int_distribution<int> pick(0, static_cast<int>(g->finite_order()) - 1);
            r.index = pick(rng);
            break;
        }
        case GroupKind::Free: {
            std::uniform_int_distribution<int> letter(0, 2 * static_cast<int>(g->rank()) - 1);
            int n = len(rng);
            for (int i = 0; i < n; ++i) r.word.push(letter(rng));
            break;
        }
        case GroupKind::FreeAbelian: {
            std::uniform_int_distribution<int> e(-4, 4);
            for (auto& x : r.exps) x = e(rng);
            break;
        }
    }
    return r;
}

}  // namespace

TEST_CASE("base operations on the built-in classes") {
    auto c2 = z2();
    BaseElement a = parse_element(c2, "a");
    CHECK(base_op(a, a) == identity_of(c2));

    auto f = BaseGroup::free_group("F", {"x"});
    CHECK(base_op(parse_element(f, "x^2"), parse_element(f, "x^-1")) == parse_element(f, "x"));

    auto z2g = BaseGroup::free_abelian("Z2", {"u", "v"});
    CHECK(base_op(parse_element(z2g, "u v^2"), parse_element(z2g, "u^3 v^-2")) ==
          parse_element(z2g, "u^4"));
}

TEST_CASE("mismatched groups are rejected") {
    auto f = BaseGroup::free_group("F", {"x"});
    auto g = BaseGroup::free_group("G", {"x"});
    CHECK_THROWS_AS(base_op(parse_element(f, "x"), parse_element(g, "x")), std::invalid_argument);
}

TEST_CASE("group axioms hold on random elements") {
    std::mt19937 rng(1234);
    std::vector<GroupPtr> groups = {
        BaseGroup::trivial("1"), cyclic(6, "C6"), BaseGroup::free_group("F2", {"x", "y"}),
        BaseGroup::free_abelian("Z2", {"u", "v"})};
    for (const auto& g : groups) {
        for (int i = 0; i < 1000; ++i) {
            BaseElement a = random_element(g, rng);
            BaseElement b = random_element(g, rng);
            BaseElement c = random_element(g, rng);
            CHECK(base_op(base_op(a, b), c) == base_op(a, base_op(b, c)));
            CHECK(base_op(a, base_invert(a)) == identity_of(g));
            // canonical form survives a print/parse round trip
            CHECK(parse_element(g, element_to_word(a)) == a);
        }
    }
}

TEST_CASE("homomorphism application") {
    auto h = BaseGroup::free_group("H", {"z"});
    auto g1 = BaseGroup::free_group("G1", {"x"});
    auto g2 = BaseGroup::free_group("G2", {"y"});
    Homomorphism i1 = make_hom(h, g1, {parse_element(g1, "x^2")}, true);
    Homomorphism i2 = make_hom(h, g2, {parse_element(g2, "y^3")}, true);

    CHECK(i1.apply(parse_element(h, "z")) == parse_element(g1, "x^2"));
    CHECK(i1.apply(identity_of(h)) == identity_of(g1));
    CHECK(i2.apply(parse_element(h, "z^2")) == parse_element(g2, "y^6"));

    std::mt19937 rng(99);
    for (int i = 0; i < 200; ++i) {
        BaseElement a = random_element(h, rng);
        BaseElement b = random_element(h, rng);
        CHECK(i1.apply(base_op(a, b)) == base_op(i1.apply(a), i1.apply(b)));
    }
}

TEST_CASE("finite-source homomorphisms are verified against the table") {
    auto c2 = z2();
    auto c4 = cyclic(4, "C4");
    // C2 -> C4 sending a to the order-2 element a2
    std::vector<BaseElement> images = {identity_of(c4), parse_element(c4, "a2")};
    Homomorphism f = make_hom(c2, c4, images, true);
    CHECK(f.injectivity == Homomorphism::Injectivity::Verified);

    // a |-> e has a kernel; asserting injectivity must fail
    std::vector<BaseElement> bad = {identity_of(c4), identity_of(c4)};
    CHECK_THROWS_AS(make_hom(c2, c4, bad, true), std::invalid_argument);

    // images that break the table are ill-defined
    std::vector<BaseElement> ill = {identity_of(c4), parse_element(c4, "a1")};
    CHECK_THROWS_AS(make_hom(c2, c4, ill, false), std::invalid_argument);
}

TEST_CASE("transversal of 2Z in Z") {
    auto h = BaseGroup::free_group("H", {"z"});
    auto g = BaseGroup::free_group("G", {"x"});
    Transversal t(make_hom(h, g, {parse_element(g, "x^2")}, true));

    auto [h1, r1] = t.factor(parse_element(g, "x^3"));
    CHECK(h1 == parse_element(h, "z"));
    CHECK(r1 == parse_element(g, "x"));

    auto [h0, r0] = t.factor(identity_of(g));
    CHECK(h0 == identity_of(h));
    CHECK(r0 == identity_of(g));

    CHECK(t.index() == 2);
    CHECK(t.representatives().size() == 2);
}

TEST_CASE("transversal of the trivial subgroup of C2") {
    auto triv = BaseGroup::trivial("1");
    auto c2 = z2();
    Transversal t(make_hom(triv, c2, {}, true));
    auto [h, r] = t.factor(parse_element(c2, "a"));
    CHECK(h == identity_of(triv));
    CHECK(r == parse_element(c2, "a"));
    CHECK(t.index() == 2);
}

TEST_CASE("transversal round trips and determinism") {
    std::mt19937 rng(2024);

    auto check_roundtrip = [&rng](const Transversal& t, const GroupPtr& ambient, int iters) {
        for (int i = 0; i < iters; ++i) {
            BaseElement g = random_element(ambient, rng);
            auto [h, r] = t.factor(g);
            CHECK(base_op(t.embedding().apply(h), r) == g);
            CHECK(t.representative(r) == r);  // idempotent
            CHECK(t.representative(g) == r);  // deterministic
            // same coset iff same representative
            BaseElement h2 = random_element(t.embedding().source, rng, 3);
            BaseElement g2 = base_op(t.embedding().apply(h2), g);
            CHECK(t.representative(g2) == r);
        }
    };

    auto hz = BaseGroup::free_group("H", {"z"});
    auto gx = BaseGroup::free_group("G", {"x"});
    check_roundtrip(Transversal(make_hom(hz, gx, {parse_element(gx, "x^2")}, true)), gx, 200);

    auto f2 = BaseGroup::free_group("F2", {"x", "y"});
    auto h2 = BaseGroup::free_group("H2", {"p", "q"});
    Transversal t2(make_hom(h2, f2, {parse_element(f2, "x^2"), parse_element(f2, "y x y^-1")},
                            true));
    check_roundtrip(t2, f2, 200);

    // generating sets that are not Nielsen-reduced force basis changes
    Transversal t2b(make_hom(h2, f2, {parse_element(f2, "x^2"), parse_element(f2, "x^2 y")},
                             true));
    check_roundtrip(t2b, f2, 200);
    auto h3 = BaseGroup::free_group("H3", {"p", "q", "r"});
    Transversal t3b(make_hom(h3, f2,
                             {parse_element(f2, "x^2"), parse_element(f2, "y^2"),
                              parse_element(f2, "x y")},
                             true));
    check_roundtrip(t3b, f2, 200);

    auto za = BaseGroup::free_abelian("Z2", {"u", "v"});
    auto ha = BaseGroup::free_abelian("L", {"p", "q"});
    Transversal t3(make_hom(ha, za, {parse_element(za, "u^2"), parse_element(za, "v^3")}, true));
    check_roundtrip(t3, za, 200);
    CHECK(t3.index() == 6);

    auto c6 = cyclic(6, "C6");
    auto c3 = cyclic(3, "C3");
    Transversal t4(Homomorphism{make_hom(c3, c6,
                                         {identity_of(c6), parse_element(c6, "a2"),
                                          parse_element(c6, "a4")},
                                         true)});
    check_roundtrip(t4, c6, 100);
    CHECK(t4.index() == 2);
}

TEST_CASE("transversal representative of the identity coset is the identity") {
    auto hz = BaseGroup::free_group("H", {"z"});
    auto gx = BaseGroup::free_group("G", {"x"});
    Transversal t(make_hom(hz, gx, {parse_element(gx, "x^2")}, true));
    CHECK(t.representative(parse_element(gx, "x^2")).is_identity());
    CHECK(t.representative(parse_element(gx, "x^-4")).is_identity());
    CHECK(t.in_subgroup(parse_element(gx, "x^6")));
    CHECK_FALSE(t.in_subgroup(parse_element(gx, "x^3")));
}

TEST_CASE("non-injective embeddings are rejected") {
    auto h2 = BaseGroup::free_group("H2", {"p", "q"});
    auto gx = BaseGroup::free_group("G", {"x"});
    // rank-2 free group cannot embed with both images powers of x
    CHECK_THROWS_AS(
        Transversal(make_hom(h2, gx, {parse_element(gx, "x"), parse_element(gx, "x^2")}, false)),
        std::invalid_argument);

    auto za = BaseGroup::free_abelian("Z2", {"u", "v"});
    auto ha = BaseGroup::free_abelian("L", {"p", "q"});
    CHECK_THROWS_AS(
        Transversal(make_hom(ha, za, {parse_element(za, "u"), parse_element(za, "u^2")}, false)),
        std::invalid_argument);
}

TEST_CASE("word parsing errors") {
    auto f = BaseGroup::free_group("F", {"x"});
    CHECK_THROWS_AS(parse_element(f, "w"), std::invalid_argument);
    CHECK_THROWS_AS(parse_element(f, "x^"), std::invalid_argument);
    CHECK(parse_element(f, "") == identity_of(f));
    CHECK(parse_element(f, "1") == identity_of(f));
}
