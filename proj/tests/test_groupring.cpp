#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "desk.hpp"
#include "transv/groupring.hpp"

using namespace transv;

namespace {

RingElement from_word(const PresentationPtr& p, RingTag tag, long long coeff,
                      const std::string& w) {
    return ring_term(p, tag, int_from(coeff), reduce(p, w));
}

RingElement random_ring_element(const PresentationPtr& p, RingTag tag, std::mt19937& rng,
                                int max_terms = 3, int max_len = 3) {
    std::uniform_int_distribution<int> nterms(0, max_terms);
    std::uniform_int_distribution<int> coeff(-3, 3);
    RingElement r = ring_zero(p, tag);
    int n = nterms(rng);
    for (int i = 0; i < n; ++i) {
        NormalForm g = desk::random_nf(p, rng, max_len);
        if (!tag_contains(g, tag)) continue;
        r = ring_add(r, ring_term(p, tag, int_from(coeff(rng)), g));
    }
    return r;
}

}  // namespace

TEST_CASE("basic products") {
    auto c = desk::circle();
    RingElement g = from_word(c, RingTag::G, 1, "t^3");
    CHECK(ring_multiply(g, from_word(c, RingTag::G, 1, "t^-3")) == ring_one(c, RingTag::G));

    // (t - 1)(t + 1) = t^2 - 1
    RingElement tm1 = ring_sub(from_word(c, RingTag::G, 1, "t"), ring_one(c, RingTag::G));
    RingElement tp1 = ring_add(from_word(c, RingTag::G, 1, "t"), ring_one(c, RingTag::G));
    RingElement expect =
        ring_sub(from_word(c, RingTag::G, 1, "t^2"), ring_one(c, RingTag::G));
    CHECK(ring_multiply(tm1, tp1) == expect);

    // Dinf: (a + b)^2 = 2 + ab + ba
    auto d = desk::dihedral_infinity();
    RingElement apb = ring_add(from_word(d, RingTag::G, 1, "a"), from_word(d, RingTag::G, 1, "b"));
    RingElement sq = ring_multiply(apb, apb);
    RingElement expect2 = ring_add(
        ring_add(ring_scale(2, ring_one(d, RingTag::G)), from_word(d, RingTag::G, 1, "a b")),
        from_word(d, RingTag::G, 1, "b a"));
    CHECK(sq == expect2);
}

TEST_CASE("ring axioms on random elements") {
    std::mt19937 rng(808);
    for (const auto& p : desk::all_presentations()) {
        for (int i = 0; i < 500; ++i) {
            RingElement a = random_ring_element(p, RingTag::G, rng);
            RingElement b = random_ring_element(p, RingTag::G, rng);
            RingElement c = random_ring_element(p, RingTag::G, rng);
            CHECK(ring_multiply(ring_multiply(a, b), c) == ring_multiply(a, ring_multiply(b, c)));
            CHECK(ring_multiply(a, ring_add(b, c)) ==
                  ring_add(ring_multiply(a, b), ring_multiply(a, c)));
            CHECK(ring_multiply(ring_add(a, b), c) ==
                  ring_add(ring_multiply(a, c), ring_multiply(b, c)));
            CHECK(ring_add(a, ring_negate(a)).is_zero());
        }
    }
}

TEST_CASE("tag mismatch is a structural error") {
    auto p = desk::dihedral_infinity();
    RingElement a = from_word(p, RingTag::G, 1, "a");
    RingElement b = from_word(p, RingTag::G1, 1, "a");
    CHECK_THROWS_AS(ring_multiply(a, b), std::invalid_argument);
    // membership enforcement
    CHECK_THROWS_AS(from_word(p, RingTag::G1, 1, "b"), std::invalid_argument);
    CHECK_THROWS_AS(from_word(p, RingTag::H, 1, "a"), std::invalid_argument);
    CHECK_NOTHROW(from_word(p, RingTag::G2, 1, "b"));
}

TEST_CASE("support cosets") {
    auto c = desk::circle();
    CHECK(support_cosets(ring_zero(c, RingTag::G), CosetKind::H).empty());

    RingElement tm1 = ring_sub(from_word(c, RingTag::G, 1, "t"), ring_one(c, RingTag::G));
    auto keys = support_cosets(tm1, CosetKind::H);
    CHECK(keys.size() == 2);

    auto d = desk::dihedral_infinity();
    RingElement onepa =
        ring_add(ring_one(d, RingTag::G), from_word(d, RingTag::G, 1, "a"));
    CHECK(support_cosets(onepa, CosetKind::G1).size() == 1);
    CHECK(support_cosets(onepa, CosetKind::G2).size() == 2);
}

TEST_CASE("restriction components and the decomposition identity") {
    auto tr = desk::trefoil();
    RingElement x3 = from_word(tr, RingTag::G, 1, "x^3");
    CosetKey c = coset_key(reduce(tr, "x"), CosetKind::G1);
    RingElement comp = restrict_component(x3, c);
    CHECK(comp.tag == RingTag::G1);
    CHECK(comp.terms.size() == 1);
    // G1*x = G1*e, so the component is recorded against the representative e
    CHECK(c == coset_key(nf_identity(tr), CosetKind::G1));
    CHECK(comp == ring_term(tr, RingTag::G1, 1, reduce(tr, "x^3")));

    CHECK(restrict_component(ring_one(tr, RingTag::G),
                             coset_key(nf_identity(tr), CosetKind::G1)) ==
          ring_one(tr, RingTag::G1));
    // component of an untouched coset is zero
    CosetKey far = coset_key(reduce(tr, "y x"), CosetKind::G1);
    CHECK(restrict_component(x3, far).is_zero());

    std::mt19937 rng(909);
    for (const auto& p : desk::all_presentations()) {
        std::vector<CosetKind> kinds = {CosetKind::G1, CosetKind::H};
        if (p->kind == PresentationKind::Amalgam) kinds.push_back(CosetKind::G2);
        for (int i = 0; i < 100; ++i) {
            RingElement x = random_ring_element(p, RingTag::G, rng, 4, 4);
            for (CosetKind kind : kinds) {
                auto cosets = support_cosets(x, kind);
                CHECK(cosets.size() <= x.terms.size());
                RingElement sum = ring_zero(p, RingTag::G);
                for (const CosetKey& key : cosets)
                    sum = ring_add(sum, induce_component(restrict_component(x, key), key));
                CHECK(sum == x);
            }
        }
    }
}

TEST_CASE("matrix algebra") {
    auto p = desk::circle();
    std::mt19937 rng(111);
    for (int i = 0; i < 50; ++i) {
        RingMatrix a(p, RingTag::G, 2, 3);
        RingMatrix b(p, RingTag::G, 3, 2);
        RingMatrix c(p, RingTag::G, 2, 2);
        for (auto& e : a.entries) e = random_ring_element(p, RingTag::G, rng);
        for (auto& e : b.entries) e = random_ring_element(p, RingTag::G, rng);
        for (auto& e : c.entries) e = random_ring_element(p, RingTag::G, rng);
        CHECK(matrix_multiply(matrix_multiply(a, b), c) ==
              matrix_multiply(a, matrix_multiply(b, c)));
        CHECK(matrix_multiply(a, matrix_identity(p, RingTag::G, 3)) == a);
        CHECK(matrix_multiply(matrix_identity(p, RingTag::G, 2), a) == a);
    }
    RingMatrix bad(p, RingTag::G, 2, 2);
    RingMatrix bad2(p, RingTag::G, 3, 3);
    CHECK_THROWS_AS(matrix_multiply(bad, bad2), std::invalid_argument);
}

TEST_CASE("retagging subrings") {
    auto d = desk::dihedral_infinity();
    RingElement x = from_word(d, RingTag::G1, 1, "a");
    RingElement up = ring_retag(x, RingTag::G);
    CHECK(up.tag == RingTag::G);
    CHECK(up.terms.size() == 1);
    CHECK_THROWS_AS(ring_retag(up, RingTag::G2), std::invalid_argument);
    CHECK_NOTHROW(ring_retag(up, RingTag::G1));
}
