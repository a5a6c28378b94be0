#include "transv/algsplit.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace transv {

namespace {

bool is_vertex_kind(const CosetKey& k) { return k.kind != CosetKind::H; }

std::vector<CosetKey> subtree_vertices(const FiniteSubtree& s, CosetKind kind) {
    std::vector<CosetKey> out;
    for (const CosetKey& v : s.vertices)
        if (v.kind == kind) out.push_back(v);
    return out;
}

std::vector<CosetKey> subtree_edges(const FiniteSubtree& s) {
    return std::vector<CosetKey>(s.edges.begin(), s.edges.end());
}

// union of the supports of all entries of d_r
std::vector<NormalForm> differential_support(const ChainComplex& c, int r) {
    std::set<NormalForm, NfLess> supp;
    RingMatrix d = c.diff_at(r);
    for (const RingElement& e : d.entries)
        for (const auto& [g, coeff] : e.terms) supp.insert(g);
    return std::vector<NormalForm>(supp.begin(), supp.end());
}

}  // namespace

std::vector<CosetKey> diff_support(const ChainComplex& c, int r, const CosetKey& v) {
    if (!is_vertex_kind(v)) throw std::invalid_argument("diff_support expects a vertex");
    std::set<CosetKey, CosetKeyLess> keys;
    for (const NormalForm& s : differential_support(c, r))
        keys.insert(coset_key(nf_multiply(v.rep, s), v.kind));
    return std::vector<CosetKey>(keys.begin(), keys.end());
}

FiniteSubtree default_seed(const PresentationPtr& p) {
    if (p->kind == PresentationKind::Amalgam) return hull({base_edge(p)});
    return hull({base_vertex(p)});
}

SubtreeSequence realize(const ChainComplex& c, const FiniteSubtree& seed) {
    ComplexReport cr = validate_complex(c);
    if (!cr.pass) throw std::invalid_argument("complex invalid: " + cr.violation);
    SubtreeReport sr = validate_subtree(seed);
    if (!sr.pass) throw std::invalid_argument("seed invalid: " + sr.violation);

    int n = c.top();
    SubtreeSequence seq;
    seq.trees.assign(static_cast<std::size_t>(n) + 1, FiniteSubtree{});
    seq.at(n) = seed;
    for (int r = n; r >= 1; --r) {
        std::vector<CosetKey> items;
        for (const CosetKey& v : seq.at(r).vertices) items.push_back(v);
        for (const CosetKey& e : seq.at(r).edges) items.push_back(e);
        for (const CosetKey& v : seq.at(r).vertices)
            for (const CosetKey& w : diff_support(c, r, v)) items.push_back(w);
        seq.at(r - 1) = hull(items);
    }
    return seq;
}

SubtreeSequence extend_sequence(const ChainComplex& c, const SubtreeSequence& seq,
                                const std::vector<std::vector<CosetKey>>& targets) {
    if (static_cast<int>(targets.size()) > seq.top() + 1)
        throw std::invalid_argument("more target degrees than sequence degrees");
    int n = seq.top();
    auto targets_at = [&targets](int r) -> std::vector<CosetKey> {
        if (r < 0 || r >= static_cast<int>(targets.size())) return {};
        return targets[static_cast<std::size_t>(r)];
    };
    SubtreeSequence out;
    out.trees.assign(static_cast<std::size_t>(n) + 1, FiniteSubtree{});
    {
        std::vector<CosetKey> items;
        for (const CosetKey& v : seq.at(n).vertices) items.push_back(v);
        for (const CosetKey& e : seq.at(n).edges) items.push_back(e);
        for (const CosetKey& t : targets_at(n)) items.push_back(t);
        out.at(n) = hull(items);
    }
    for (int r = n; r >= 1; --r) {
        std::vector<CosetKey> items;
        for (const CosetKey& v : seq.at(r - 1).vertices) items.push_back(v);
        for (const CosetKey& e : seq.at(r - 1).edges) items.push_back(e);
        for (const CosetKey& t : targets_at(r - 1)) items.push_back(t);
        for (const CosetKey& v : out.at(r).vertices) {
            items.push_back(v);
            for (const CosetKey& w : diff_support(c, r, v)) items.push_back(w);
        }
        for (const CosetKey& e : out.at(r).edges) items.push_back(e);
        out.at(r - 1) = hull(items);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Assembly

namespace {

struct BasisIndex {
    std::map<CosetKey, std::size_t, CosetKeyLess> start;  // key -> first column
    std::size_t width = 0;                                 // c_r
    std::size_t size = 0;

    std::size_t at(const CosetKey& k, std::size_t i) const {
        auto it = start.find(k);
        if (it == start.end()) throw std::logic_error("basis key missing");
        return it->second + i;
    }
    bool has(const CosetKey& k) const { return start.count(k) > 0; }
};

BasisIndex index_of(const std::vector<CosetKey>& keys, std::size_t width) {
    BasisIndex b;
    b.width = width;
    std::size_t pos = 0;
    for (const CosetKey& k : keys) {
        b.start.emplace(k, pos);
        pos += width;
    }
    b.size = pos;
    return b;
}

RingTag tag_of_kind(CosetKind kind) {
    switch (kind) {
        case CosetKind::G1: return RingTag::G1;
        case CosetKind::G2: return RingTag::G2;
        case CosetKind::H: return RingTag::H;
    }
    return RingTag::G;
}

// gamma with g = gamma * rep(key); must land in the subring of the key kind
RingElement offset_in(const PresentationPtr& p, const NormalForm& g, const CosetKey& key,
                      RingTag tag, const Int& coeff) {
    NormalForm gamma = nf_multiply(g, nf_invert(key.rep));
    return ring_term(p, tag, coeff, gamma);
}

// differential of the assembled complex with basis (key of kind, i) built
// from the keys per degree
ChainComplex assemble_complex(const ChainComplex& c, CosetKind kind,
                              const std::vector<std::vector<CosetKey>>& keys_per_degree,
                              SplitBasis& basis_out) {
    const PresentationPtr& p = c.pres;
    RingTag tag = tag_of_kind(kind);
    int n = c.top();
    std::vector<std::size_t> ranks;
    std::vector<BasisIndex> idx;
    basis_out.assign(static_cast<std::size_t>(n) + 1, {});
    for (int r = 0; r <= n; ++r) {
        const auto& keys = keys_per_degree[static_cast<std::size_t>(r)];
        idx.push_back(index_of(keys, c.rank_at(r)));
        ranks.push_back(idx.back().size);
        for (const CosetKey& k : keys)
            for (std::size_t i = 0; i < c.rank_at(r); ++i)
                basis_out[static_cast<std::size_t>(r)].push_back({k, i});
    }
    std::vector<RingMatrix> diffs;
    for (int r = 1; r <= n; ++r) {
        const auto& rows = keys_per_degree[static_cast<std::size_t>(r)];
        RingMatrix d(p, tag, ranks[static_cast<std::size_t>(r)],
                     ranks[static_cast<std::size_t>(r - 1)]);
        RingMatrix dc = c.diff_at(r);
        for (const CosetKey& key : rows) {
            for (std::size_t i = 0; i < c.rank_at(r); ++i) {
                std::size_t row = idx[static_cast<std::size_t>(r)].at(key, i);
                for (std::size_t j = 0; j < c.rank_at(r - 1); ++j) {
                    for (const auto& [s, coeff] : dc.at(i, j).terms) {
                        NormalForm moved = nf_multiply(key.rep, s);
                        CosetKey target = coset_key(moved, kind);
                        if (!idx[static_cast<std::size_t>(r - 1)].has(target))
                            throw std::logic_error("assembled differential left the sequence");
                        std::size_t col = idx[static_cast<std::size_t>(r - 1)].at(target, j);
                        d.at(row, col) = ring_add(
                            d.at(row, col), offset_in(p, moved, target, tag, coeff));
                    }
                }
            }
        }
        diffs.push_back(std::move(d));
    }
    return make_complex(p, tag, std::move(ranks), std::move(diffs));
}

// the canonical per-degree matrix of e1/e2 (rows: D basis, cols: factor basis)
RingMatrix edge_to_vertex_matrix(const PresentationPtr& p, const ChainComplex& c, int r,
                                 const std::vector<CosetKey>& edges,
                                 const std::vector<CosetKey>& vertices, CosetKind kind,
                                 bool twist_by_t_inverse) {
    RingTag tag = tag_of_kind(kind);
    BasisIndex vidx = index_of(vertices, c.rank_at(r));
    RingMatrix m(p, tag, edges.size() * c.rank_at(r), vidx.size);
    std::size_t row = 0;
    for (const CosetKey& e : edges) {
        NormalForm rep = e.rep;
        if (twist_by_t_inverse) rep = nf_multiply(nf_stable(p, -1), rep);
        CosetKey target = coset_key(rep, kind);
        if (!vidx.has(target)) throw std::logic_error("edge endpoint missing from factor basis");
        for (std::size_t i = 0; i < c.rank_at(r); ++i) {
            m.at(row + i, vidx.at(target, i)) = offset_in(p, rep, target, tag, 1);
        }
        row += c.rank_at(r);
    }
    return m;
}

// assembly matrix per degree: (vertex v, i) -> rep(v) e_i, with sign
RingMatrix vertex_to_c_matrix(const PresentationPtr& p, const ChainComplex& c, int r,
                              const std::vector<CosetKey>& vertices, const Int& sign) {
    RingMatrix m(p, RingTag::G, vertices.size() * c.rank_at(r), c.rank_at(r));
    std::size_t row = 0;
    for (const CosetKey& v : vertices) {
        for (std::size_t i = 0; i < c.rank_at(r); ++i)
            m.at(row + i, i) = ring_term(p, RingTag::G, sign, v.rep);
        row += c.rank_at(r);
    }
    return m;
}

std::string describe_key(const CosetKey& k) { return coset_key_to_string(k); }

void check_realization(const ChainComplex& c, const SubtreeSequence& seq) {
    for (int r = seq.top(); r >= 1; --r) {
        for (const CosetKey& v : seq.at(r).vertices) {
            for (const CosetKey& w : diff_support(c, r, v)) {
                if (!seq.at(r - 1).contains_vertex(w)) {
                    std::ostringstream msg;
                    msg << "sequence not realized at degree " << r << ": vertex "
                        << describe_key(v) << " requires coset " << describe_key(w)
                        << " in degree " << (r - 1);
                    throw std::invalid_argument(msg.str());
                }
            }
        }
    }
}

}  // namespace

ChainComplex twist_by_stable_letter(const ChainComplex& d) {
    const PresentationPtr& p = d.pres;
    NormalForm t_pos = nf_stable(p, 1);
    NormalForm t_neg = nf_stable(p, -1);
    std::vector<RingMatrix> diffs;
    for (int r = 1; r <= d.top(); ++r) {
        RingMatrix src = d.diff_at(r);
        RingMatrix out(p, RingTag::G1, src.rows, src.cols);
        for (std::size_t i = 0; i < src.entries.size(); ++i) {
            RingElement e = ring_zero(p, RingTag::G1);
            for (const auto& [g, coeff] : src.entries[i].terms) {
                NormalForm conj = nf_multiply(nf_multiply(t_neg, g), t_pos);
                e = ring_add(e, ring_term(p, RingTag::G1, coeff, conj));
            }
            out.entries[i] = std::move(e);
        }
        diffs.push_back(std::move(out));
    }
    return make_complex(p, RingTag::G1, d.ranks, std::move(diffs));
}

MVSplitting build_splitting(const ChainComplex& c, const SubtreeSequence& seq) {
    const PresentationPtr& p = c.pres;
    if (c.tag != RingTag::G) throw std::invalid_argument("split complexes live over Z[G]");
    if (seq.top() != c.top())
        throw std::invalid_argument("sequence degrees do not match the complex");
    for (int r = 0; r <= seq.top(); ++r) {
        SubtreeReport sr = validate_subtree(seq.at(r));
        if (!sr.pass)
            throw std::invalid_argument("subtree invalid at degree " + std::to_string(r) + ": " +
                                        sr.violation);
    }
    check_realization(c, seq);

    bool amalgam = p->kind == PresentationKind::Amalgam;
    int n = c.top();

    std::vector<std::vector<CosetKey>> edge_keys, g1_keys, g2_keys;
    for (int r = 0; r <= n; ++r) {
        edge_keys.push_back(subtree_edges(seq.at(r)));
        g1_keys.push_back(subtree_vertices(seq.at(r), CosetKind::G1));
        if (amalgam) g2_keys.push_back(subtree_vertices(seq.at(r), CosetKind::G2));
    }

    MVSplitting s;
    s.pres = p;
    s.c = c;
    s.seq = seq;
    s.d = assemble_complex(c, CosetKind::H, edge_keys, s.d_basis);
    s.c1 = assemble_complex(c, CosetKind::G1, g1_keys, s.c1_basis);
    if (amalgam)
        s.c2 = assemble_complex(c, CosetKind::G2, g2_keys, s.c2_basis);
    else
        s.c2 = zero_complex(p, RingTag::G2);

    // e1 and e2
    std::vector<RingMatrix> e1_mats, e2_mats;
    for (int r = 0; r <= n; ++r) {
        e1_mats.push_back(edge_to_vertex_matrix(p, c, r, edge_keys[static_cast<std::size_t>(r)],
                                                g1_keys[static_cast<std::size_t>(r)],
                                                CosetKind::G1, false));
        if (amalgam)
            e2_mats.push_back(edge_to_vertex_matrix(p, c, r,
                                                    edge_keys[static_cast<std::size_t>(r)],
                                                    g2_keys[static_cast<std::size_t>(r)],
                                                    CosetKind::G2, false));
        else
            e2_mats.push_back(edge_to_vertex_matrix(p, c, r,
                                                    edge_keys[static_cast<std::size_t>(r)],
                                                    g1_keys[static_cast<std::size_t>(r)],
                                                    CosetKind::G1, true));
    }
    s.e1 = make_chain_map(s.d, s.c1, RingTag::G1, e1_mats);
    if (amalgam) {
        s.e2 = make_chain_map(s.d, s.c2, RingTag::G2, e2_mats);
    } else {
        // e2 sends y to t^-1 y, which is linear for the i2-induced structure
        // on D; its source therefore carries the t-conjugated differential.
        s.e2 = make_chain_map(twist_by_stable_letter(s.d), s.c1, RingTag::G1, e2_mats);
    }

    // induced sum over Z[G] and the injection e
    ChainComplex c1g = s.c1;
    c1g.tag = RingTag::G;
    for (auto& m : c1g.diffs) m = matrix_retag(m, RingTag::G);
    if (amalgam) {
        ChainComplex c2g = s.c2;
        c2g.tag = RingTag::G;
        for (auto& m : c2g.diffs) m = matrix_retag(m, RingTag::G);
        s.induced_sum = direct_sum(c1g, c2g);
    } else {
        s.induced_sum = c1g;
    }

    std::vector<RingMatrix> mid_mats;
    for (int r = 0; r <= n; ++r) {
        auto ri = static_cast<std::size_t>(r);
        RingMatrix m(p, RingTag::G, s.d.rank_at(r), s.induced_sum.rank_at(r));
        if (amalgam) {
            matrix_emplace(m, matrix_retag(e1_mats[ri], RingTag::G), 0, 0);
            matrix_emplace(m, matrix_retag(e2_mats[ri], RingTag::G), 0, s.c1.rank_at(r));
        } else {
            RingMatrix one = matrix_retag(e1_mats[ri], RingTag::G);
            // 1 (x) e1 - t (x) e2
            RingMatrix te2(p, RingTag::G, s.d.rank_at(r), s.c1.rank_at(r));
            RingElement t_elt = ring_term(p, RingTag::G, 1, nf_stable(p, 1));
            RingMatrix e2g = matrix_retag(e2_mats[ri], RingTag::G);
            for (std::size_t a = 0; a < te2.rows; ++a)
                for (std::size_t b = 0; b < te2.cols; ++b)
                    te2.at(a, b) = ring_multiply(t_elt, e2g.at(a, b));
            m = matrix_sub(one, te2);
        }
        mid_mats.push_back(std::move(m));
    }
    s.middle = make_chain_map(s.d, s.induced_sum, RingTag::G, mid_mats);

    // the surjection f
    std::vector<RingMatrix> f_mats;
    for (int r = 0; r <= n; ++r) {
        auto ri = static_cast<std::size_t>(r);
        RingMatrix m(p, RingTag::G, s.induced_sum.rank_at(r), c.rank_at(r));
        matrix_emplace(m, vertex_to_c_matrix(p, c, r, g1_keys[ri], Int(1)), 0, 0);
        if (amalgam)
            matrix_emplace(m, vertex_to_c_matrix(p, c, r, g2_keys[ri], Int(-1)),
                           s.c1.rank_at(r), 0);
        f_mats.push_back(std::move(m));
    }
    s.assembly = make_chain_map(s.induced_sum, c, RingTag::G, f_mats);
    return s;
}

// ---------------------------------------------------------------------------
// Verification

namespace {

void add_violation(SplitReport& rep, std::string cls, std::string detail) {
    rep.pass = false;
    rep.violations.push_back({std::move(cls), std::move(detail)});
}

}  // namespace

SplitReport verify_splitting(const MVSplitting& s) {
    SplitReport rep;
    const PresentationPtr& p = s.pres;
    bool amalgam = p->kind == PresentationKind::Amalgam;
    int n = s.c.top();

    if (s.seq.top() != n) {
        add_violation(rep, "rank", "sequence degrees do not match the complex");
        return rep;
    }

    for (int r = 0; r <= n; ++r) {
        SubtreeReport sr = validate_subtree(s.seq.at(r));
        if (!sr.pass)
            add_violation(rep, "subtree", "degree " + std::to_string(r) + ": " + sr.violation);
    }
    if (!rep.pass) return rep;

    for (int r = n; r >= 1; --r)
        for (const CosetKey& v : s.seq.at(r).vertices)
            for (const CosetKey& w : diff_support(s.c, r, v))
                if (!s.seq.at(r - 1).contains_vertex(w))
                    add_violation(rep, "realization",
                                  "degree " + std::to_string(r) + ": vertex " + describe_key(v) +
                                      " requires " + describe_key(w));
    if (!rep.pass) return rep;

    // rank accounting
    for (int r = 0; r <= n; ++r) {
        std::size_t cr = s.c.rank_at(r);
        std::size_t edges = s.seq.at(r).edges.size();
        std::size_t v1 = subtree_vertices(s.seq.at(r), CosetKind::G1).size();
        if (s.d.rank_at(r) != cr * edges)
            add_violation(rep, "rank", "D rank at degree " + std::to_string(r));
        if (s.c1.rank_at(r) != cr * v1)
            add_violation(rep, "rank", "C1 rank at degree " + std::to_string(r));
        if (amalgam) {
            std::size_t v2 = subtree_vertices(s.seq.at(r), CosetKind::G2).size();
            if (s.c2.rank_at(r) != cr * v2)
                add_violation(rep, "rank", "C2 rank at degree " + std::to_string(r));
        }
    }
    if (!rep.pass) return rep;

    for (const auto& [name, complex] :
         {std::pair<const char*, const ChainComplex*>{"D", &s.d}, {"C1", &s.c1},
          {"C2", &s.c2}}) {
        ComplexReport cr = validate_complex(*complex);
        if (!cr.pass)
            add_violation(rep, "complex",
                          std::string(name) + " at degree " + std::to_string(cr.degree) + ": " +
                              cr.violation);
    }

    for (const auto& [name, map] : {std::pair<const char*, const ChainMap*>{"e1", &s.e1},
                                    {"e2", &s.e2},
                                    {"e", &s.middle},
                                    {"f", &s.assembly}}) {
        ChainMapReport mr = validate_chain_map(*map);
        if (!mr.pass)
            add_violation(rep, "chain_square",
                          std::string(name) + " at degree " + std::to_string(mr.degree));
    }
    if (!rep.pass) return rep;

    // f o e = 0 exactly
    for (int r = 0; r <= n; ++r) {
        RingMatrix fe = matrix_multiply(s.middle.mat_at(r), s.assembly.mat_at(r));
        if (!fe.is_zero())
            add_violation(rep, "composite", "f o e != 0 at degree " + std::to_string(r));
    }

    // the stored maps must be the canonical ones determined by (C, U)
    for (int r = 0; r <= n; ++r) {
        auto edges = subtree_edges(s.seq.at(r));
        auto v1 = subtree_vertices(s.seq.at(r), CosetKind::G1);
        RingMatrix expect1 = edge_to_vertex_matrix(p, s.c, r, edges, v1, CosetKind::G1, false);
        if (!(s.e1.mat_at(r) == matrix_retag(expect1, s.e1.tag)))
            add_violation(rep, "map_mismatch", "e1 at degree " + std::to_string(r));
        RingMatrix expect2;
        if (amalgam) {
            auto v2 = subtree_vertices(s.seq.at(r), CosetKind::G2);
            expect2 = edge_to_vertex_matrix(p, s.c, r, edges, v2, CosetKind::G2, false);
            if (!(s.e2.mat_at(r) == matrix_retag(expect2, s.e2.tag)))
                add_violation(rep, "map_mismatch", "e2 at degree " + std::to_string(r));
        } else {
            expect2 = edge_to_vertex_matrix(p, s.c, r, edges, v1, CosetKind::G1, true);
            if (!(s.e2.mat_at(r) == matrix_retag(expect2, s.e2.tag)))
                add_violation(rep, "map_mismatch", "e2 at degree " + std::to_string(r));
        }
        RingMatrix expect_mid(p, RingTag::G, s.d.rank_at(r), s.induced_sum.rank_at(r));
        if (amalgam) {
            matrix_emplace(expect_mid, matrix_retag(expect1, RingTag::G), 0, 0);
            matrix_emplace(expect_mid, matrix_retag(expect2, RingTag::G), 0, s.c1.rank_at(r));
        } else {
            RingElement t_elt = ring_term(p, RingTag::G, 1, nf_stable(p, 1));
            RingMatrix te2 = matrix_retag(expect2, RingTag::G);
            for (auto& e : te2.entries) e = ring_multiply(t_elt, e);
            expect_mid = matrix_sub(matrix_retag(expect1, RingTag::G), te2);
        }
        if (!(s.middle.mat_at(r) == expect_mid))
            add_violation(rep, "map_mismatch", "e at degree " + std::to_string(r));
        RingMatrix expect_f(p, RingTag::G, s.induced_sum.rank_at(r), s.c.rank_at(r));
        matrix_emplace(expect_f, vertex_to_c_matrix(p, s.c, r, v1, Int(1)), 0, 0);
        if (amalgam) {
            auto v2 = subtree_vertices(s.seq.at(r), CosetKind::G2);
            matrix_emplace(expect_f, vertex_to_c_matrix(p, s.c, r, v2, Int(-1)),
                           s.c1.rank_at(r), 0);
        }
        if (!(s.assembly.mat_at(r) == expect_f))
            add_violation(rep, "map_mismatch", "f at degree " + std::to_string(r));
    }
    if (!rep.pass) return rep;

    // degreewise exactness: c_r copies of the augmented tree complex
    for (int r = 0; r <= n; ++r) {
        OracleReport er = tree_exactness(s.seq.at(r), s.c.rank_at(r));
        rep.exactness.push_back(er);
        if (!er.pass())
            add_violation(rep, "exactness", "degree " + std::to_string(r) + ": " + er.detail);
    }
    return rep;
}

}  // namespace transv
