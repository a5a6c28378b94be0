#include "transv/groupring.hpp"

#include <algorithm>

namespace transv {

std::string ring_tag_name(RingTag t) {
    switch (t) {
        case RingTag::G: return "Z[G]";
        case RingTag::G1: return "Z[G1]";
        case RingTag::G2: return "Z[G2]";
        case RingTag::H: return "Z[H]";
    }
    return "?";
}

bool ring_tag_leq(RingTag a, RingTag b) {
    if (a == b || b == RingTag::G) return true;
    if (a == RingTag::H) return true;
    return false;
}

bool tag_contains(const NormalForm& g, RingTag tag) {
    switch (tag) {
        case RingTag::G: return true;
        case RingTag::G1: return nf_in_factor(g, Factor::One);
        case RingTag::G2: return nf_in_factor(g, Factor::Two);
        case RingTag::H: return nf_in_h(g);
    }
    return false;
}

bool RingElement::operator==(const RingElement& o) const {
    if (pres != o.pres || tag != o.tag) return false;
    if (terms.size() != o.terms.size()) return false;
    auto it = terms.begin();
    auto jt = o.terms.begin();
    for (; it != terms.end(); ++it, ++jt) {
        if (!(it->first == jt->first) || it->second != jt->second) return false;
    }
    return true;
}

RingElement ring_zero(const PresentationPtr& p, RingTag tag) {
    RingElement r;
    r.pres = p;
    r.tag = tag;
    return r;
}

RingElement ring_one(const PresentationPtr& p, RingTag tag) {
    return ring_term(p, tag, 1, nf_identity(p));
}

RingElement ring_term(const PresentationPtr& p, RingTag tag, Int coeff, const NormalForm& g) {
    if (g.pres != p) throw std::invalid_argument("normal form from a different presentation");
    if (!tag_contains(g, tag))
        throw std::invalid_argument("term outside the subring " + ring_tag_name(tag));
    RingElement r = ring_zero(p, tag);
    if (coeff != 0) r.terms.emplace(g, std::move(coeff));
    return r;
}

static void require_same_ring(const RingElement& a, const RingElement& b) {
    if (a.pres != b.pres || a.tag != b.tag)
        throw std::invalid_argument("ring tag mismatch");
}

RingElement ring_add(const RingElement& a, const RingElement& b) {
    require_same_ring(a, b);
    RingElement r = a;
    for (const auto& [g, c] : b.terms) {
        auto it = r.terms.find(g);
        if (it == r.terms.end()) {
            r.terms.emplace(g, c);
        } else {
            it->second += c;
            if (it->second == 0) r.terms.erase(it);
        }
    }
    return r;
}

RingElement ring_negate(const RingElement& a) {
    RingElement r = a;
    for (auto& [g, c] : r.terms) c = -c;
    return r;
}

RingElement ring_sub(const RingElement& a, const RingElement& b) {
    return ring_add(a, ring_negate(b));
}

RingElement ring_multiply(const RingElement& a, const RingElement& b) {
    require_same_ring(a, b);
    RingElement r = ring_zero(a.pres, a.tag);
    for (const auto& [g, c] : a.terms) {
        for (const auto& [g2, c2] : b.terms) {
            NormalForm prod = nf_multiply(g, g2);
            Int coeff = c * c2;
            auto it = r.terms.find(prod);
            if (it == r.terms.end()) {
                if (coeff != 0) r.terms.emplace(std::move(prod), std::move(coeff));
            } else {
                it->second += coeff;
                if (it->second == 0) r.terms.erase(it);
            }
        }
    }
    return r;
}

RingElement ring_scale(const Int& c, const RingElement& a) {
    RingElement r = ring_zero(a.pres, a.tag);
    if (c == 0) return r;
    for (const auto& [g, coeff] : a.terms) r.terms.emplace(g, c * coeff);
    return r;
}

RingElement ring_retag(const RingElement& a, RingTag to) {
    if (!ring_tag_leq(a.tag, to)) {
        // retagging downwards still works when the support happens to fit
        for (const auto& [g, c] : a.terms)
            if (!tag_contains(g, to))
                throw std::invalid_argument("support does not fit in " + ring_tag_name(to));
    }
    RingElement r = a;
    r.tag = to;
    return r;
}

Int augmentation(const RingElement& a) {
    Int s = 0;
    for (const auto& [g, c] : a.terms) s += c;
    return s;
}

std::vector<CosetKey> support_cosets(const RingElement& x, CosetKind kind) {
    std::set<CosetKey, CosetKeyLess> keys;
    for (const auto& [g, c] : x.terms) keys.insert(coset_key(g, kind));
    return std::vector<CosetKey>(keys.begin(), keys.end());
}

static RingTag tag_of_kind(CosetKind kind) {
    switch (kind) {
        case CosetKind::G1: return RingTag::G1;
        case CosetKind::G2: return RingTag::G2;
        case CosetKind::H: return RingTag::H;
    }
    return RingTag::G;
}

RingElement restrict_component(const RingElement& x, const CosetKey& c) {
    RingElement r = ring_zero(x.pres, tag_of_kind(c.kind));
    NormalForm rep_inv = nf_invert(c.rep);
    for (const auto& [g, coeff] : x.terms) {
        if (coset_key(g, c.kind) != c) continue;
        NormalForm gamma = nf_multiply(g, rep_inv);
        if (!tag_contains(gamma, r.tag))
            throw std::logic_error("coset component fell outside its subring");
        r.terms.emplace(std::move(gamma), coeff);
    }
    return r;
}

RingElement induce_component(const RingElement& comp, const CosetKey& c) {
    RingElement r = ring_zero(comp.pres, RingTag::G);
    for (const auto& [gamma, coeff] : comp.terms)
        r.terms.emplace(nf_multiply(gamma, c.rep), coeff);
    return r;
}

// ---------------------------------------------------------------------------
// Matrices

RingMatrix::RingMatrix(const PresentationPtr& p, RingTag tag_, std::size_t rows_,
                       std::size_t cols_)
    : pres(p), tag(tag_), rows(rows_), cols(cols_) {
    entries.assign(rows * cols, ring_zero(p, tag_));
}

bool RingMatrix::is_zero() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const RingElement& e) { return e.is_zero(); });
}

bool RingMatrix::operator==(const RingMatrix& o) const {
    return pres == o.pres && tag == o.tag && rows == o.rows && cols == o.cols &&
           entries == o.entries;
}

RingMatrix matrix_identity(const PresentationPtr& p, RingTag tag, std::size_t n) {
    RingMatrix m(p, tag, n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = ring_one(p, tag);
    return m;
}

static void require_same_shape(const RingMatrix& a, const RingMatrix& b) {
    if (a.pres != b.pres || a.tag != b.tag || a.rows != b.rows || a.cols != b.cols)
        throw std::invalid_argument("matrix shape or ring mismatch");
}

RingMatrix matrix_add(const RingMatrix& a, const RingMatrix& b) {
    require_same_shape(a, b);
    RingMatrix r = a;
    for (std::size_t i = 0; i < r.entries.size(); ++i)
        r.entries[i] = ring_add(r.entries[i], b.entries[i]);
    return r;
}

RingMatrix matrix_sub(const RingMatrix& a, const RingMatrix& b) {
    return matrix_add(a, matrix_negate(b));
}

RingMatrix matrix_negate(const RingMatrix& a) {
    RingMatrix r = a;
    for (auto& e : r.entries) e = ring_negate(e);
    return r;
}

RingMatrix matrix_scale(const Int& c, const RingMatrix& a) {
    RingMatrix r = a;
    for (auto& e : r.entries) e = ring_scale(c, e);
    return r;
}

RingMatrix matrix_multiply(const RingMatrix& a, const RingMatrix& b) {
    if (a.pres != b.pres || a.tag != b.tag)
        throw std::invalid_argument("matrix ring mismatch");
    if (a.cols != b.rows) throw std::invalid_argument("matrix dimension mismatch");
    RingMatrix r(a.pres, a.tag, a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            const RingElement& aik = a.at(i, k);
            if (aik.is_zero()) continue;
            for (std::size_t j = 0; j < b.cols; ++j) {
                const RingElement& bkj = b.at(k, j);
                if (bkj.is_zero()) continue;
                r.at(i, j) = ring_add(r.at(i, j), ring_multiply(aik, bkj));
            }
        }
    return r;
}

RingMatrix matrix_retag(const RingMatrix& a, RingTag to) {
    RingMatrix r(a.pres, to, a.rows, a.cols);
    for (std::size_t i = 0; i < a.entries.size(); ++i) r.entries[i] = ring_retag(a.entries[i], to);
    return r;
}

void matrix_emplace(RingMatrix& dst, const RingMatrix& src, std::size_t row0, std::size_t col0) {
    if (dst.pres != src.pres || dst.tag != src.tag)
        throw std::invalid_argument("matrix ring mismatch in block placement");
    if (row0 + src.rows > dst.rows || col0 + src.cols > dst.cols)
        throw std::invalid_argument("block does not fit");
    for (std::size_t i = 0; i < src.rows; ++i)
        for (std::size_t j = 0; j < src.cols; ++j) dst.at(row0 + i, col0 + j) = src.at(i, j);
}

}  // namespace transv
