#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "desk.hpp"
#include "transv/presentation.hpp"

using namespace transv;

TEST_CASE("reduction in the infinite dihedral group") {
    auto p = desk::dihedral_infinity();
    CHECK(reduce(p, "a b b a").is_identity());
    CHECK(reduce(p, "a a").is_identity());
    CHECK_FALSE(reduce(p, "a b").is_identity());
    CHECK(reduce(p, "a b a b") == nf_multiply(reduce(p, "a b"), reduce(p, "a b")));
    CHECK(reduce(p, "a b").length() == 2);
}

TEST_CASE("amalgamation identifies the subgroup images") {
    auto p = desk::trefoil();
    CHECK(reduce(p, "x x") == reduce(p, "y y y"));
    CHECK(reduce(p, "x^2 y^-3").is_identity());
    CHECK(reduce(p, "x^4") == reduce(p, "y^6"));
    // the common element is carried by the head
    NormalForm nf = reduce(p, "x^2");
    CHECK(nf.syllables.empty());
    CHECK(nf.head == parse_element(p->h, "z"));
}

TEST_CASE("Britton reduction in HNN extensions") {
    auto circle = desk::circle();
    CHECK(reduce(circle, "t t t^-1") == reduce(circle, "t"));
    CHECK(reduce(circle, "t^3 t^-3").is_identity());
    CHECK(reduce(circle, "t^2").length() == 2);

    auto klein = desk::klein_bottle();
    // defining relation x t = t x^-1, i.e. t^-1 x t = x^-1
    CHECK(reduce(klein, "t^-1 x t") == reduce(klein, "x^-1"));
    CHECK(nf_multiply(reduce(klein, "t"), reduce(klein, "x")) == reduce(klein, "x^-1 t"));
    CHECK(reduce(klein, "t x t^-1") == reduce(klein, "x^-1"));
    CHECK(reduce(klein, "x t x t^-1 x").is_identity() == false);
    CHECK(reduce(klein, "x t x^2 t^-1 x^3").is_identity() == false);
    CHECK(reduce(klein, "t^-1 x^2 t x^2").is_identity());
}

TEST_CASE("unknown generator symbols are parse errors") {
    auto p = desk::circle();
    CHECK_THROWS_AS(reduce(p, "w"), std::invalid_argument);
}

TEST_CASE("normal form uniqueness: equal words, equal forms") {
    auto p = desk::dihedral_infinity();
    NormalForm ab = reduce(p, "a b");
    NormalForm ba = reduce(p, "b a");
    CHECK(ab != ba);
    CHECK(nf_multiply(ab, ba) == reduce(p, "a b b a"));
    CHECK(nf_multiply(ab, nf_invert(ab)).is_identity());
    CHECK(nf_invert(nf_identity(p)).is_identity());
}

TEST_CASE("confluence of the two reduction strategies") {
    std::mt19937 rng(4242);
    for (const auto& p : desk::all_presentations()) {
        for (int i = 0; i < 1000; ++i) {
            std::string w = desk::random_word(p, rng);
            NormalForm leftmost = reduce(p, w);
            NormalForm rightmost = reduce_rightmost(p, w);
            REQUIRE(leftmost == rightmost);
        }
    }
}

TEST_CASE("group laws on normal forms") {
    std::mt19937 rng(515);
    for (const auto& p : desk::all_presentations()) {
        for (int i = 0; i < 250; ++i) {
            NormalForm a = desk::random_nf(p, rng);
            NormalForm b = desk::random_nf(p, rng);
            NormalForm c = desk::random_nf(p, rng);
            CHECK(nf_multiply(nf_multiply(a, b), c) == nf_multiply(a, nf_multiply(b, c)));
            CHECK(nf_multiply(a, nf_invert(a)).is_identity());
            CHECK(nf_multiply(nf_invert(a), a).is_identity());
            // homomorphism property of reduce
            std::string w1 = desk::random_word(p, rng, 6);
            std::string w2 = desk::random_word(p, rng, 6);
            CHECK(reduce(p, w1 + " " + w2) == nf_multiply(reduce(p, w1), reduce(p, w2)));
            // subadditive syllable length
            CHECK(nf_multiply(a, b).length() <= a.length() + b.length());
            // print/parse round trip
            CHECK(reduce(p, nf_to_word(a)) == a);
        }
    }
}

TEST_CASE("coset keys quotient correctly") {
    auto p = desk::dihedral_infinity();
    NormalForm a = reduce(p, "a");
    NormalForm b = reduce(p, "b");
    NormalForm e = nf_identity(p);
    CHECK(coset_key(a, CosetKind::G1) == coset_key(e, CosetKind::G1));
    CHECK(coset_key(b, CosetKind::G1) != coset_key(e, CosetKind::G1));
    CHECK(coset_key(b, CosetKind::G2) == coset_key(e, CosetKind::G2));

    auto circle = desk::circle();
    NormalForm t2 = reduce(circle, "t^2");
    CHECK(coset_key_to_string(coset_key(t2, CosetKind::H)) == "H|t t");

}

TEST_CASE("coset keys are constant exactly on cosets") {
    std::mt19937 rng(707);
    for (const auto& pres : desk::all_presentations()) {
        bool amal = pres->kind == PresentationKind::Amalgam;
        for (int i = 0; i < 200; ++i) {
            NormalForm g = desk::random_nf(pres, rng);
            NormalForm g1elt =
                nf_from_factor(pres, Factor::One, desk::random_base_element(pres->g1, rng));
            CHECK(coset_key(nf_multiply(g1elt, g), CosetKind::G1) ==
                  coset_key(g, CosetKind::G1));
            if (amal) {
                NormalForm g2elt =
                    nf_from_factor(pres, Factor::Two, desk::random_base_element(pres->g2, rng));
                CHECK(coset_key(nf_multiply(g2elt, g), CosetKind::G2) ==
                      coset_key(g, CosetKind::G2));
            }
            NormalForm helt = nf_from_h(pres, desk::random_base_element(pres->h, rng));
            CHECK(coset_key(nf_multiply(helt, g), CosetKind::H) == coset_key(g, CosetKind::H));
            // and distinct keys separate cosets: moving by a non-factor element changes the key
            NormalForm probe = desk::random_nf(pres, rng, 5);
            if (coset_key(probe, CosetKind::G1) != coset_key(g, CosetKind::G1)) {
                // representatives of distinct cosets must differ
                CHECK(nf_multiply(probe, nf_invert(g)) != nf_identity(pres));
            }
        }
    }
}

namespace {

// Ground-truth models, independent of every normal-form code path.

// isometries of Z: z -> s*z + n; a = reflection at 0, b = reflection at 1/2
struct DinfModel {
    long long n = 0;
    int s = 1;
    static DinfModel compose(const DinfModel& f, const DinfModel& g) {
        return {f.n + f.s * g.n, f.s * g.s};
    }
    bool operator==(const DinfModel& o) const { return n == o.n && s == o.s; }
};

DinfModel dinf_eval(const std::string& word) {
    DinfModel acc;
    std::istringstream in(word);
    std::string tok;
    while (in >> tok) {
        DinfModel letter;
        if (tok == "a")
            letter = {0, -1};
        else if (tok == "b")
            letter = {1, -1};
        else
            continue;  // identities e, f
        acc = DinfModel::compose(acc, letter);
    }
    return acc;
}

// Klein bottle group as Z x| Z: (m, n) ~ x^m t^n with t x t^-1 = x^-1
struct KleinModel {
    long long m = 0, n = 0;
    static KleinModel compose(const KleinModel& f, const KleinModel& g) {
        long long sign = (f.n % 2 == 0) ? 1 : -1;
        return {f.m + sign * g.m, f.n + g.n};
    }
    bool operator==(const KleinModel& o) const { return m == o.m && n == o.n; }
};

KleinModel klein_eval(const PresentationPtr& p, const std::string& word) {
    KleinModel acc;
    std::istringstream in(word);
    std::string tok;
    while (in >> tok) {
        long long exp = 1;
        std::string sym = tok;
        auto caret = tok.find('^');
        if (caret != std::string::npos) {
            sym = tok.substr(0, caret);
            exp = std::stoll(tok.substr(caret + 1));
        }
        KleinModel letter;
        if (sym == "x")
            letter = {exp, 0};
        else if (sym == p->stable_letter)
            letter = {0, exp};
        else
            continue;
        // decompose powers to keep the twisted product exact
        long long reps = std::llabs(exp);
        KleinModel unit = sym == "x" ? KleinModel{exp < 0 ? -1 : 1, 0}
                                     : KleinModel{0, exp < 0 ? -1 : 1};
        for (long long i = 0; i < reps; ++i) acc = KleinModel::compose(acc, unit);
    }
    return acc;
}

long long circle_eval(const PresentationPtr& p, const std::string& word) {
    long long total = 0;
    std::istringstream in(word);
    std::string tok;
    while (in >> tok) {
        long long exp = 1;
        std::string sym = tok;
        auto caret = tok.find('^');
        if (caret != std::string::npos) {
            sym = tok.substr(0, caret);
            exp = std::stoll(tok.substr(caret + 1));
        }
        if (sym == p->stable_letter) total += exp;
    }
    return total;
}

}  // namespace

TEST_CASE("normal forms agree with concrete group models") {
    std::mt19937 rng(2718);

    auto d = desk::dihedral_infinity();
    for (int i = 0; i < 500; ++i) {
        std::string w1 = desk::random_word(d, rng);
        std::string w2 = desk::random_word(d, rng);
        bool nf_eq = reduce(d, w1) == reduce(d, w2);
        bool model_eq = dinf_eval(w1) == dinf_eval(w2);
        REQUIRE(nf_eq == model_eq);
    }

    auto c = desk::circle();
    for (int i = 0; i < 500; ++i) {
        std::string w1 = desk::random_word(c, rng);
        std::string w2 = desk::random_word(c, rng);
        bool nf_eq = reduce(c, w1) == reduce(c, w2);
        bool model_eq = circle_eval(c, w1) == circle_eval(c, w2);
        REQUIRE(nf_eq == model_eq);
    }

    auto k = desk::klein_bottle();
    for (int i = 0; i < 500; ++i) {
        std::string w1 = desk::random_word(k, rng);
        std::string w2 = desk::random_word(k, rng);
        bool nf_eq = reduce(k, w1) == reduce(k, w2);
        bool model_eq = klein_eval(k, w1) == klein_eval(k, w2);
        REQUIRE(nf_eq == model_eq);
    }
}

TEST_CASE("word ball enumerates distinct elements") {
    auto p = desk::circle();
    // circle group is Z: ball of radius r has 2r+1 elements
    CHECK(word_ball(p, 3).size() == 7);
    auto d = desk::dihedral_infinity();
    // Dinf ball: words in a, b of length <= 3: e, a, b, ab, ba, aba, bab
    CHECK(word_ball(d, 3).size() == 7);
}
