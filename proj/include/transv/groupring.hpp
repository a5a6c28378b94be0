#pragma once

#include <map>
#include <vector>

#include "transv/integer.hpp"
#include "transv/presentation.hpp"

namespace transv {

// Which group ring an element lives in. All rings are realized on ambient
// normal forms with constrained support, so induction along j1, j2, k is a
// retag and all splitting maps stay exact.
enum class RingTag { G, G1, G2, H };

std::string ring_tag_name(RingTag t);
// partial order H <= G1, G2 <= G
bool ring_tag_leq(RingTag a, RingTag b);

class RingElement {
public:
    PresentationPtr pres;
    RingTag tag = RingTag::G;
    std::map<NormalForm, Int, NfLess> terms;  // canonical order, no zero coefficients

    bool is_zero() const { return terms.empty(); }
    bool operator==(const RingElement& o) const;
    bool operator!=(const RingElement& o) const { return !(*this == o); }
};

RingElement ring_zero(const PresentationPtr& p, RingTag tag);
RingElement ring_one(const PresentationPtr& p, RingTag tag);
// single term; validates membership of g in the tagged subring
RingElement ring_term(const PresentationPtr& p, RingTag tag, Int coeff, const NormalForm& g);

bool tag_contains(const NormalForm& g, RingTag tag);

RingElement ring_add(const RingElement& a, const RingElement& b);
RingElement ring_negate(const RingElement& a);
RingElement ring_sub(const RingElement& a, const RingElement& b);
RingElement ring_multiply(const RingElement& a, const RingElement& b);
RingElement ring_scale(const Int& c, const RingElement& a);
// inclusion of subrings: retag upwards (H -> G1 -> G etc.)
RingElement ring_retag(const RingElement& a, RingTag to);
Int augmentation(const RingElement& a);  // sum of coefficients

// the set { coset_key(g, kind) : g in support }
std::vector<CosetKey> support_cosets(const RingElement& x, CosetKind kind);

// Writing each supported term g in coset c as g = gamma * rep(c), returns
// sum coeff * gamma over the subring matching the coset kind. The identity
// x = sum_c induce_component(restrict_component(x, c), c) holds exactly.
RingElement restrict_component(const RingElement& x, const CosetKey& c);
RingElement induce_component(const RingElement& comp, const CosetKey& c);

class RingMatrix {
public:
    PresentationPtr pres;
    RingTag tag = RingTag::G;
    std::size_t rows = 0, cols = 0;
    std::vector<RingElement> entries;  // row-major

    RingMatrix() = default;
    RingMatrix(const PresentationPtr& p, RingTag tag, std::size_t rows, std::size_t cols);

    RingElement& at(std::size_t r, std::size_t c) { return entries[r * cols + c]; }
    const RingElement& at(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }
    bool is_zero() const;
    bool operator==(const RingMatrix& o) const;
    bool operator!=(const RingMatrix& o) const { return !(*this == o); }
};

RingMatrix matrix_identity(const PresentationPtr& p, RingTag tag, std::size_t n);
RingMatrix matrix_add(const RingMatrix& a, const RingMatrix& b);
RingMatrix matrix_sub(const RingMatrix& a, const RingMatrix& b);
RingMatrix matrix_negate(const RingMatrix& a);
RingMatrix matrix_scale(const Int& c, const RingMatrix& a);
// module elements are rows; maps compose as A * B (apply A, then B)
RingMatrix matrix_multiply(const RingMatrix& a, const RingMatrix& b);
RingMatrix matrix_retag(const RingMatrix& a, RingTag to);
// block placement helper: writes src into dst at (row0, col0)
void matrix_emplace(RingMatrix& dst, const RingMatrix& src, std::size_t row0, std::size_t col0);

}  // namespace transv
