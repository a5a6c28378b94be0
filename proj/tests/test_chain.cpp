#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "desk.hpp"
#include "transv/chain.hpp"
#include "transv/oracle.hpp"

using namespace transv;

namespace {

RingElement term(const PresentationPtr& p, long long c, const std::string& w) {
    return ring_term(p, RingTag::G, int_from(c), reduce(p, w));
}

// circle complex Z[Z] --(t-1)--> Z[Z]
ChainComplex circle_complex(const PresentationPtr& c) {
    RingMatrix d1(c, RingTag::G, 1, 1);
    d1.at(0, 0) = ring_sub(term(c, 1, "t"), term(c, 1, ""));
    return make_complex(c, RingTag::G, {1, 1}, {d1});
}

void check_cylinder_identities(const CylinderData& cyl) {
    const ChainComplex& m = cyl.cylinder;
    REQUIRE(validate_complex(m).pass);
    REQUIRE(validate_chain_map(cyl.proj).pass);
    REQUIRE(validate_chain_map(cyl.incl).pass);
    // p o incl = 1
    for (int r = 0; r <= cyl.incl.source.top(); ++r) {
        RingMatrix got = matrix_multiply(cyl.incl.mat_at(r), cyl.proj.mat_at(r));
        CHECK(got == matrix_identity(m.pres, m.tag, cyl.incl.source.rank_at(r)));
    }
    // d h + h d = incl o p - 1
    for (int r = 0; r <= m.top(); ++r) {
        RingMatrix hd = r >= 1 ? matrix_multiply(m.diff_at(r),
                                                 cyl.homotopy[static_cast<std::size_t>(r - 1)])
                               : RingMatrix(m.pres, m.tag, m.rank_at(0), m.rank_at(0));
        RingMatrix lhs = matrix_add(
            hd, matrix_multiply(cyl.homotopy[static_cast<std::size_t>(r)], m.diff_at(r + 1)));
        RingMatrix rhs = matrix_sub(matrix_multiply(cyl.proj.mat_at(r), cyl.incl.mat_at(r)),
                                    matrix_identity(m.pres, m.tag, m.rank_at(r)));
        CHECK(lhs == rhs);
    }
}

}  // namespace

TEST_CASE("validate_complex") {
    auto c = desk::circle();
    CHECK(validate_complex(zero_complex(c, RingTag::G)).pass);
    CHECK(validate_complex(circle_complex(c)).pass);

    // d1 d2 = (t-1)(t-1) != 0 must fail at degree 2
    RingMatrix d1(c, RingTag::G, 1, 1), d2(c, RingTag::G, 1, 1);
    d1.at(0, 0) = ring_sub(term(c, 1, "t"), term(c, 1, ""));
    d2.at(0, 0) = d1.at(0, 0);
    ChainComplex bad = make_complex(c, RingTag::G, {1, 1, 1}, {d1, d2});
    ComplexReport rep = validate_complex(bad);
    CHECK_FALSE(rep.pass);
    CHECK(rep.degree == 2);
}

TEST_CASE("mapping cylinder of the identity in degree 0") {
    auto c = desk::circle();
    ChainComplex pt = make_complex(c, RingTag::G, {1}, {});
    CylinderData cyl = mapping_cylinder(identity_chain_map(pt));
    REQUIRE(cyl.cylinder.ranks == std::vector<std::size_t>({2, 1}));
    RingMatrix d1 = cyl.cylinder.diff_at(1);
    CHECK(d1.at(0, 0) == term(c, -1, ""));
    CHECK(d1.at(0, 1) == term(c, 1, ""));
    RingMatrix p0 = cyl.proj.mat_at(0);
    CHECK(p0.rows == 2);
    CHECK(p0.at(0, 0) == term(c, 1, ""));
    CHECK(p0.at(1, 0) == term(c, 1, ""));
    check_cylinder_identities(cyl);
}

TEST_CASE("mapping cylinder of multiplication by two") {
    auto c = desk::circle();
    ChainComplex pt = make_complex(c, RingTag::G, {1}, {});
    RingMatrix two(c, RingTag::G, 1, 1);
    two.at(0, 0) = term(c, 2, "");
    ChainMap e = make_chain_map(pt, pt, RingTag::G, {two});
    CylinderData cyl = mapping_cylinder(e);
    RingMatrix d1 = cyl.cylinder.diff_at(1);
    CHECK(d1.at(0, 0) == term(c, -2, ""));
    CHECK(d1.at(0, 1) == term(c, 1, ""));
    RingMatrix p0 = cyl.proj.mat_at(0);
    CHECK(p0.at(0, 0) == term(c, 1, ""));
    CHECK(p0.at(1, 0) == term(c, 2, ""));
    // p o d1 = 0
    CHECK(matrix_multiply(d1, p0).is_zero());
    check_cylinder_identities(cyl);
}

TEST_CASE("mapping cylinder of the zero map") {
    auto c = desk::circle();
    ChainComplex pt = make_complex(c, RingTag::G, {1}, {});
    CylinderData cyl = mapping_cylinder(zero_chain_map(pt, pt, RingTag::G));
    // p kills the V summands
    CHECK(cyl.proj.mat_at(0).at(1, 0).is_zero());
    check_cylinder_identities(cyl);
}

TEST_CASE("double mapping cylinder shapes") {
    auto c = desk::circle();
    ChainComplex pt = make_complex(c, RingTag::G, {1}, {});
    ChainMap id = identity_chain_map(pt);
    DoubleCylinder dc = double_mapping_cylinder(id, id);
    CHECK(dc.complex.ranks == std::vector<std::size_t>({2, 1}));
    RingMatrix d1 = dc.complex.diff_at(1);
    CHECK(d1.at(0, 0) == term(c, -1, ""));
    CHECK(d1.at(0, 1) == term(c, -1, ""));
    CHECK(validate_complex(dc.complex).pass);

    // V = 0: disjoint sum
    ChainComplex zero = zero_complex(c, RingTag::G);
    DoubleCylinder sum = double_mapping_cylinder(zero_chain_map(zero, pt, RingTag::G),
                                                 zero_chain_map(zero, pt, RingTag::G));
    CHECK(sum.complex.rank_at(0) == 2);
    CHECK(sum.complex.rank_at(1) == 0);

    // e1 = id, e2 = 0: cone-like
    DoubleCylinder cone = double_mapping_cylinder(id, zero_chain_map(pt, pt, RingTag::G));
    CHECK(validate_complex(cone.complex).pass);
    CHECK(cone.complex.diff_at(1).at(0, 1).is_zero());

    // integer homology: H0 = Z in both cases (the W2 copy survives)
    auto integer_h0 = [](const DoubleCylinder& cyl) {
        RingMatrix rd = cyl.complex.diff_at(1);
        IntegerMatrix shadow(rd.rows, rd.cols);
        for (std::size_t i = 0; i < rd.rows; ++i)
            for (std::size_t j = 0; j < rd.cols; ++j) shadow.at(i, j) = augmentation(rd.at(i, j));
        SmithResult s = smith(shadow);
        // free rank of the cokernel plus a torsion-free check
        for (const Int& f : s.factors) REQUIRE(f == 1);
        return cyl.complex.rank_at(0) - s.rank;
    };
    CHECK(integer_h0(dc) == 1);
    CHECK(integer_h0(cone) == 1);
}

TEST_CASE("random cylinders satisfy every identity exactly") {
    std::mt19937 rng(1212);
    for (const auto& p : desk::all_presentations()) {
        for (int i = 0; i < 20; ++i) {
            ChainMap e = desk::random_chain_map(p, rng);
            CylinderData cyl = mapping_cylinder(e);
            check_cylinder_identities(cyl);
            DoubleCylinder dc = double_mapping_cylinder(e, e);
            CHECK(validate_complex(dc.complex).pass);
            ChainComplex cone = mapping_cone(e);
            CHECK(validate_complex(cone).pass);
        }
    }
}

TEST_CASE("chain map validation and composition") {
    auto c = desk::circle();
    ChainComplex circ = circle_complex(c);
    ChainMap id = identity_chain_map(circ);
    CHECK(validate_chain_map(id).pass);
    ChainMap sq = compose(id, id);
    CHECK(sq.mat_at(0) == id.mat_at(0));

    // a non-commuting square must be rejected
    RingMatrix m0(c, RingTag::G, 1, 1), m1(c, RingTag::G, 1, 1);
    m0.at(0, 0) = term(c, 1, "t");
    m1.at(0, 0) = term(c, 1, "");
    CHECK_THROWS_AS(make_chain_map(circ, circ, RingTag::G, {m0, m1}), std::invalid_argument);
    // but multiplication by a central scalar works in every degree
    RingMatrix s0(c, RingTag::G, 1, 1), s1(c, RingTag::G, 1, 1);
    s0.at(0, 0) = term(c, 5, "");
    s1.at(0, 0) = term(c, 5, "");
    CHECK_NOTHROW(make_chain_map(circ, circ, RingTag::G, {s0, s1}));
}

TEST_CASE("direct sums") {
    auto c = desk::circle();
    ChainComplex circ = circle_complex(c);
    ChainComplex pt = make_complex(c, RingTag::G, {1}, {});
    ChainComplex s = direct_sum(circ, pt);
    CHECK(s.rank_at(0) == 2);
    CHECK(s.rank_at(1) == 1);
    CHECK(validate_complex(s).pass);
}
