#include "transv/chain.hpp"

#include <algorithm>

namespace transv {

RingMatrix ChainComplex::diff_at(int r) const {
    if (r >= 1 && r <= top()) return diffs[static_cast<std::size_t>(r)];
    return RingMatrix(pres, tag, rank_at(r), rank_at(r - 1));
}

ChainComplex make_complex(const PresentationPtr& p, RingTag tag, std::vector<std::size_t> ranks,
                          std::vector<RingMatrix> diffs) {
    ChainComplex c;
    c.pres = p;
    c.tag = tag;
    if (ranks.empty()) ranks.push_back(0);
    c.ranks = std::move(ranks);
    c.diffs.assign(c.ranks.size(), RingMatrix(p, tag, 0, 0));
    if (diffs.size() + 1 != c.ranks.size() && !(diffs.empty() && c.ranks.size() == 1))
        throw std::invalid_argument("need one differential per degree 1..top");
    for (std::size_t r = 1; r < c.ranks.size(); ++r) {
        RingMatrix& m = diffs[r - 1];
        if (m.pres != p || m.tag != tag)
            throw std::invalid_argument("differential ring mismatch");
        if (m.rows != c.ranks[r] || m.cols != c.ranks[r - 1])
            throw std::invalid_argument("differential dimensions do not match ranks");
        c.diffs[r] = std::move(m);
    }
    return c;
}

ChainComplex zero_complex(const PresentationPtr& p, RingTag tag) {
    return make_complex(p, tag, {0}, {});
}

ComplexReport validate_complex(const ChainComplex& c) {
    ComplexReport rep;
    for (int r = 1; r <= c.top(); ++r) {
        const RingMatrix& d = c.diffs[static_cast<std::size_t>(r)];
        if (d.rows != c.rank_at(r) || d.cols != c.rank_at(r - 1)) {
            rep.pass = false;
            rep.degree = r;
            rep.violation = "differential dimensions do not match ranks";
            return rep;
        }
    }
    for (int r = 2; r <= c.top(); ++r) {
        if (!matrix_multiply(c.diff_at(r), c.diff_at(r - 1)).is_zero()) {
            rep.pass = false;
            rep.degree = r;
            rep.violation = "d o d != 0";
            return rep;
        }
    }
    return rep;
}

RingMatrix ChainMap::mat_at(int r) const {
    if (r >= 0 && r < static_cast<int>(mats.size())) return mats[static_cast<std::size_t>(r)];
    return RingMatrix(source.pres, tag, source.rank_at(r), target.rank_at(r));
}

ChainMap make_chain_map(ChainComplex source, ChainComplex target, RingTag tag,
                        std::vector<RingMatrix> mats) {
    ChainMap f;
    if (source.pres != target.pres)
        throw std::invalid_argument("chain map between different presentations");
    if (!ring_tag_leq(source.tag, tag) || !ring_tag_leq(target.tag, tag))
        throw std::invalid_argument("chain map ring does not contain the complexes' rings");
    f.tag = tag;
    int degrees = std::max(source.top(), target.top()) + 1;
    if (static_cast<int>(mats.size()) > degrees)
        throw std::invalid_argument("too many chain map matrices");
    mats.resize(static_cast<std::size_t>(degrees));
    for (int r = 0; r < degrees; ++r) {
        RingMatrix& m = mats[static_cast<std::size_t>(r)];
        if (m.rows == 0 && m.cols == 0)
            m = RingMatrix(source.pres, tag, source.rank_at(r), target.rank_at(r));
        if (m.tag != tag) m = matrix_retag(m, tag);
        if (m.rows != source.rank_at(r) || m.cols != target.rank_at(r))
            throw std::invalid_argument("chain map matrix dimensions do not match ranks");
    }
    f.source = std::move(source);
    f.target = std::move(target);
    f.mats = std::move(mats);
    ChainMapReport rep = validate_chain_map(f);
    if (!rep.pass)
        throw std::invalid_argument("not a chain map: " + rep.violation + " at degree " +
                                    std::to_string(rep.degree));
    return f;
}

ChainMap identity_chain_map(const ChainComplex& c) {
    std::vector<RingMatrix> mats;
    for (int r = 0; r <= c.top(); ++r)
        mats.push_back(matrix_identity(c.pres, c.tag, c.rank_at(r)));
    return make_chain_map(c, c, c.tag, std::move(mats));
}

ChainMap zero_chain_map(ChainComplex source, ChainComplex target, RingTag tag) {
    return make_chain_map(std::move(source), std::move(target), tag, {});
}

ChainMapReport validate_chain_map(const ChainMap& f) {
    ChainMapReport rep;
    int degrees = std::max(f.source.top(), f.target.top());
    for (int r = 1; r <= degrees; ++r) {
        RingMatrix lhs = matrix_multiply(matrix_retag(f.source.diff_at(r), f.tag), f.mat_at(r - 1));
        RingMatrix rhs = matrix_multiply(f.mat_at(r), matrix_retag(f.target.diff_at(r), f.tag));
        if (!(lhs == rhs)) {
            rep.pass = false;
            rep.degree = r;
            rep.violation = "square d f != f d";
            return rep;
        }
    }
    return rep;
}

ChainMap compose(const ChainMap& f, const ChainMap& g) {
    if (!(f.target.ranks == g.source.ranks) || f.target.pres != g.source.pres)
        throw std::invalid_argument("composition mismatch");
    RingTag tag = ring_tag_leq(f.tag, g.tag) ? g.tag : f.tag;
    if (!ring_tag_leq(f.tag, tag) || !ring_tag_leq(g.tag, tag))
        throw std::invalid_argument("composition ring mismatch");
    std::vector<RingMatrix> mats;
    int degrees = std::max(f.source.top(), g.target.top()) + 1;
    for (int r = 0; r < degrees; ++r)
        mats.push_back(matrix_multiply(matrix_retag(f.mat_at(r), tag),
                                       matrix_retag(g.mat_at(r), tag)));
    return make_chain_map(f.source, g.target, tag, std::move(mats));
}

// ---------------------------------------------------------------------------
// Cylinders and cones

namespace {

struct BlockLayout {
    // three blocks per degree with given rank functions
    std::vector<std::size_t> a, b, c;
    std::size_t rank(int r) const {
        if (r < 0 || r >= static_cast<int>(a.size())) return 0;
        auto i = static_cast<std::size_t>(r);
        return a[i] + b[i] + c[i];
    }
};

}  // namespace

CylinderData mapping_cylinder(const ChainMap& e) {
    const ChainComplex& v = e.source;
    const ChainComplex& w = e.target;
    const PresentationPtr& p = v.pres;
    RingTag tag = e.tag;
    int topdim = std::max(w.top(), v.top() + 1);

    BlockLayout lay;
    for (int r = 0; r <= topdim; ++r) {
        lay.a.push_back(w.rank_at(r));
        lay.b.push_back(v.rank_at(r - 1));
        lay.c.push_back(v.rank_at(r));
    }

    std::vector<std::size_t> ranks;
    for (int r = 0; r <= topdim; ++r) ranks.push_back(lay.rank(r));

    std::vector<RingMatrix> diffs;
    for (int r = 1; r <= topdim; ++r) {
        RingMatrix d(p, tag, lay.rank(r), lay.rank(r - 1));
        Int sign_r = (r % 2 == 0) ? 1 : -1;
        auto i = static_cast<std::size_t>(r);
        std::size_t row_w = 0, row_v1 = lay.a[i], row_v = lay.a[i] + lay.b[i];
        auto j = static_cast<std::size_t>(r - 1);
        std::size_t col_w = 0, col_v1 = lay.a[j], col_v = lay.a[j] + lay.b[j];
        matrix_emplace(d, matrix_retag(w.diff_at(r), tag), row_w, col_w);
        matrix_emplace(d, matrix_scale(sign_r, e.mat_at(r - 1)), row_v1, col_w);
        matrix_emplace(d, matrix_retag(v.diff_at(r - 1), tag), row_v1, col_v1);
        matrix_emplace(d, matrix_scale(-sign_r, matrix_identity(p, tag, v.rank_at(r - 1))),
                       row_v1, col_v);
        matrix_emplace(d, matrix_retag(v.diff_at(r), tag), row_v, col_v);
        diffs.push_back(std::move(d));
    }

    CylinderData out;
    out.cylinder = make_complex(p, tag, ranks, std::move(diffs));

    std::vector<RingMatrix> incl_mats, proj_mats;
    for (int r = 0; r <= topdim; ++r) {
        auto i = static_cast<std::size_t>(r);
        RingMatrix im(p, tag, w.rank_at(r), lay.rank(r));
        matrix_emplace(im, matrix_identity(p, tag, w.rank_at(r)), 0, 0);
        incl_mats.push_back(std::move(im));
        RingMatrix pm(p, tag, lay.rank(r), w.rank_at(r));
        matrix_emplace(pm, matrix_identity(p, tag, w.rank_at(r)), 0, 0);
        matrix_emplace(pm, e.mat_at(r), lay.a[i] + lay.b[i], 0);
        proj_mats.push_back(std::move(pm));
    }
    out.incl = make_chain_map(w, out.cylinder, tag, std::move(incl_mats));
    out.proj = make_chain_map(out.cylinder, w, tag, std::move(proj_mats));

    for (int r = 0; r <= topdim; ++r) {
        auto i = static_cast<std::size_t>(r);
        RingMatrix h(p, tag, lay.rank(r), lay.rank(r + 1));
        if (r + 1 <= topdim) {
            auto k = static_cast<std::size_t>(r + 1);
            Int sign = (r % 2 == 0) ? -1 : 1;  // (-1)^{r+1}
            matrix_emplace(h, matrix_scale(sign, matrix_identity(p, tag, v.rank_at(r))),
                           lay.a[i] + lay.b[i], lay.a[k]);
        }
        out.homotopy.push_back(std::move(h));
    }
    return out;
}

DoubleCylinder double_mapping_cylinder(const ChainMap& e1, const ChainMap& e2) {
    if (!(e1.source.ranks == e2.source.ranks) || e1.source.pres != e2.source.pres ||
        e1.source.tag != e2.source.tag)
        throw std::invalid_argument("double cylinder maps must share their source");
    const ChainComplex& v = e1.source;
    const ChainComplex& w1 = e1.target;
    const ChainComplex& w2 = e2.target;
    const PresentationPtr& p = v.pres;
    if (e1.tag != e2.tag) throw std::invalid_argument("double cylinder ring mismatch");
    RingTag tag = e1.tag;
    int topdim = std::max({w1.top(), v.top() + 1, w2.top()});

    DoubleCylinder out;
    std::vector<std::size_t> ranks;
    for (int r = 0; r <= topdim; ++r) {
        out.w1_ranks.push_back(w1.rank_at(r));
        out.v_shift_ranks.push_back(v.rank_at(r - 1));
        out.w2_ranks.push_back(w2.rank_at(r));
        ranks.push_back(w1.rank_at(r) + v.rank_at(r - 1) + w2.rank_at(r));
    }

    std::vector<RingMatrix> diffs;
    for (int r = 1; r <= topdim; ++r) {
        auto i = static_cast<std::size_t>(r);
        auto j = static_cast<std::size_t>(r - 1);
        RingMatrix d(p, tag, ranks[i], ranks[j]);
        Int sign_r = (r % 2 == 0) ? 1 : -1;
        std::size_t row_w1 = 0, row_v = out.w1_ranks[i],
                    row_w2 = out.w1_ranks[i] + out.v_shift_ranks[i];
        std::size_t col_w1 = 0, col_v = out.w1_ranks[j],
                    col_w2 = out.w1_ranks[j] + out.v_shift_ranks[j];
        matrix_emplace(d, matrix_retag(w1.diff_at(r), tag), row_w1, col_w1);
        matrix_emplace(d, matrix_scale(sign_r, e1.mat_at(r - 1)), row_v, col_w1);
        matrix_emplace(d, matrix_retag(v.diff_at(r - 1), tag), row_v, col_v);
        matrix_emplace(d, matrix_scale(sign_r, e2.mat_at(r - 1)), row_v, col_w2);
        matrix_emplace(d, matrix_retag(w2.diff_at(r), tag), row_w2, col_w2);
        diffs.push_back(std::move(d));
    }
    out.complex = make_complex(p, tag, std::move(ranks), std::move(diffs));
    return out;
}

ChainComplex mapping_cone(const ChainMap& f) {
    const ChainComplex& v = f.source;
    const ChainComplex& w = f.target;
    const PresentationPtr& p = v.pres;
    RingTag tag = f.tag;
    int topdim = std::max(w.top(), v.top() + 1);
    std::vector<std::size_t> ranks;
    for (int r = 0; r <= topdim; ++r) ranks.push_back(w.rank_at(r) + v.rank_at(r - 1));
    std::vector<RingMatrix> diffs;
    for (int r = 1; r <= topdim; ++r) {
        auto i = static_cast<std::size_t>(r);
        auto j = static_cast<std::size_t>(r - 1);
        RingMatrix d(p, tag, ranks[i], ranks[j]);
        Int sign_r = (r % 2 == 0) ? 1 : -1;
        matrix_emplace(d, matrix_retag(w.diff_at(r), tag), 0, 0);
        matrix_emplace(d, matrix_scale(sign_r, f.mat_at(r - 1)), w.rank_at(r), 0);
        matrix_emplace(d, matrix_retag(v.diff_at(r - 1), tag), w.rank_at(r), w.rank_at(r - 1));
        diffs.push_back(std::move(d));
    }
    return make_complex(p, tag, std::move(ranks), std::move(diffs));
}

ChainComplex direct_sum(const ChainComplex& a, const ChainComplex& b) {
    if (a.pres != b.pres || a.tag != b.tag)
        throw std::invalid_argument("direct sum ring mismatch");
    int topdim = std::max(a.top(), b.top());
    std::vector<std::size_t> ranks;
    for (int r = 0; r <= topdim; ++r) ranks.push_back(a.rank_at(r) + b.rank_at(r));
    std::vector<RingMatrix> diffs;
    for (int r = 1; r <= topdim; ++r) {
        RingMatrix d(a.pres, a.tag, ranks[static_cast<std::size_t>(r)],
                     ranks[static_cast<std::size_t>(r - 1)]);
        matrix_emplace(d, a.diff_at(r), 0, 0);
        matrix_emplace(d, b.diff_at(r), a.rank_at(r), a.rank_at(r - 1));
        diffs.push_back(std::move(d));
    }
    return make_complex(a.pres, a.tag, std::move(ranks), std::move(diffs));
}

}  // namespace transv
