#include "transv/cwsplit.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace transv {

// ---------------------------------------------------------------------------
// Equivariant CW data

EquivariantCW make_cw(const PresentationPtr& p, std::vector<std::vector<std::string>> cells,
                      std::vector<RingMatrix> boundaries, std::string base_cell) {
    EquivariantCW w;
    w.pres = p;
    std::vector<std::size_t> ranks;
    for (const auto& layer : cells) ranks.push_back(layer.size());
    w.complex = make_complex(p, RingTag::G, std::move(ranks), std::move(boundaries));
    w.cells = std::move(cells);
    w.base_cell = std::move(base_cell);
    return w;
}

CwReport validate_cw(const EquivariantCW& w) {
    CwReport rep;
    ComplexReport cr = validate_complex(w.complex);
    if (!cr.pass) {
        rep.pass = false;
        rep.violations.push_back("complex: " + cr.violation + " at degree " +
                                 std::to_string(cr.degree));
    }
    if (w.cells.empty() || w.cells[0].empty()) {
        rep.pass = false;
        rep.violations.push_back("no 0-cells");
        return rep;
    }
    bool base_found = false;
    for (const auto& z : w.cells[0])
        if (z == w.base_cell) base_found = true;
    if (!base_found) {
        rep.pass = false;
        rep.violations.push_back("base cell is not a 0-cell");
    }
    // every 1-cell boundary row must augment to zero
    if (w.complex.top() >= 1) {
        RingMatrix d1 = w.complex.diff_at(1);
        for (std::size_t c = 0; c < d1.rows; ++c) {
            Int total = 0;
            for (std::size_t z = 0; z < d1.cols; ++z) total += augmentation(d1.at(c, z));
            if (total != 0) {
                rep.pass = false;
                rep.violations.push_back("boundary of 1-cell " + w.cells[1][c] +
                                         " does not augment to zero");
            }
        }
        // quotient 1-skeleton connectivity on cell names
        std::vector<std::size_t> parent(w.cells[0].size());
        for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
        auto find = [&parent](std::size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (std::size_t c = 0; c < d1.rows; ++c) {
            std::size_t first = w.cells[0].size();
            for (std::size_t z = 0; z < d1.cols; ++z) {
                if (d1.at(c, z).is_zero()) continue;
                if (first == w.cells[0].size())
                    first = z;
                else
                    parent[find(first)] = find(z);
            }
        }
        std::size_t root = find(0);
        for (std::size_t z = 1; z < w.cells[0].size(); ++z)
            if (find(z) != root) {
                rep.pass = false;
                rep.violations.push_back("orbit 1-skeleton is disconnected");
                break;
            }
    } else if (w.cells[0].size() > 1) {
        rep.pass = false;
        rep.violations.push_back("orbit 1-skeleton is disconnected");
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Orbit graphs and certificates

namespace {

struct PieceShape {
    CosetKind kind;    // G1 / G2 for factor pieces, H for the intersection
    GroupPtr group;    // fiber group of the piece
};

PieceShape piece_shape(const PresentationPtr& p, CosetKind kind) {
    switch (kind) {
        case CosetKind::G1: return {kind, p->g1};
        case CosetKind::G2: return {kind, p->g2};
        case CosetKind::H: return {kind, p->h};
    }
    throw std::logic_error("bad piece kind");
}

std::vector<CosetKey> piece_keys(const PresentationPtr&, const FiniteSubtree& tree,
                                 CosetKind kind) {
    std::vector<CosetKey> out;
    if (kind == CosetKind::H) {
        out.assign(tree.edges.begin(), tree.edges.end());
    } else {
        for (const CosetKey& v : tree.vertices)
            if (v.kind == kind) out.push_back(v);
    }
    return out;
}

BaseElement piece_offset(const NormalForm& moved, const CosetKey& key, CosetKind kind) {
    NormalForm gamma = nf_multiply(moved, nf_invert(key.rep));
    if (kind == CosetKind::H) return nf_to_h(gamma);
    return nf_to_factor(gamma, kind == CosetKind::G1 ? Factor::One : Factor::Two);
}

// subgroup generation test per base group class
std::pair<bool, std::string> generates_group(const GroupPtr& g,
                                             const std::vector<BaseElement>& labels) {
    switch (g->kind) {
        case GroupKind::Trivial: return {true, "trivial"};
        case GroupKind::Finite: {
            std::vector<bool> in(g->finite_order(), false);
            in[0] = true;
            std::vector<int> stack = {0};
            while (!stack.empty()) {
                int a = stack.back();
                stack.pop_back();
                for (const BaseElement& l : labels) {
                    for (int b : {g->table[a][l.index], g->table[a][g->inverse_table[l.index]]}) {
                        if (!in[b]) {
                            in[b] = true;
                            stack.push_back(b);
                        }
                    }
                }
            }
            bool all = std::all_of(in.begin(), in.end(), [](bool x) { return x; });
            return {all, "finite-closure"};
        }
        case GroupKind::Free: {
            std::vector<FreeWord> words;
            for (const BaseElement& l : labels) words.push_back(l.word);
            detail::CoreGraph graph = detail::fold_subgroup(g->rank(), words);
            bool full = graph.adj.size() == 1 && graph.adj[0].size() == 2 * g->rank();
            if (g->rank() == 0) full = true;
            return {full, "stallings-fold"};
        }
        case GroupKind::FreeAbelian: {
            const std::size_t n = g->rank();
            if (n == 0) return {true, "lattice-smith"};
            IntegerMatrix m(labels.size(), n);
            for (std::size_t i = 0; i < labels.size(); ++i)
                for (std::size_t j = 0; j < n; ++j) m.at(i, j) = int_from(labels[i].exps[j]);
            SmithResult s = smith(m);
            bool full = s.rank == n &&
                        std::all_of(s.factors.begin(), s.factors.end(),
                                    [](const Int& f) { return f == 1; });
            return {full, "lattice-smith"};
        }
    }
    return {false, "?"};
}

struct IncidenceList {
    // per 1-cell orbit of the piece: the instances it touches
    struct End {
        std::size_t node;
        BaseElement offset;
    };
    std::vector<std::pair<std::pair<CosetKey, std::size_t>, std::vector<End>>> rows;
};

std::vector<OrbitNode> piece_nodes(const EquivariantCW& w, const SubtreeSequence& seq,
                                   CosetKind kind) {
    std::vector<OrbitNode> nodes;
    for (const CosetKey& key : piece_keys(w.pres, seq.at(0), kind))
        for (std::size_t z = 0; z < w.cells[0].size(); ++z) nodes.push_back({key, z});
    return nodes;
}

IncidenceList piece_incidences(const EquivariantCW& w, const SubtreeSequence& seq, CosetKind kind,
                               const std::vector<OrbitNode>& nodes) {
    const PresentationPtr& p = w.pres;
    auto node_index = [&nodes](const CosetKey& key, std::size_t z) {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].cell == z && nodes[i].coset == key) return i;
        throw std::logic_error("incidence outside the domain's 0-cells");
    };
    IncidenceList inc;
    if (w.complex.top() < 1 || seq.top() < 1) return inc;
    RingMatrix d1 = w.complex.diff_at(1);
    for (const CosetKey& key : piece_keys(p, seq.at(1), kind)) {
        for (std::size_t c = 0; c < w.cells[1].size(); ++c) {
            std::vector<IncidenceList::End> ends;
            for (std::size_t z = 0; z < w.cells[0].size(); ++z) {
                for (const auto& [s, coeff] : d1.at(c, z).terms) {
                    NormalForm moved = nf_multiply(key.rep, s);
                    CosetKey target = coset_key(moved, kind);
                    ends.push_back({node_index(target, z), piece_offset(moved, target, kind)});
                }
            }
            inc.rows.push_back({{key, c}, std::move(ends)});
        }
    }
    return inc;
}

ConnectivityCertificate compute_certificate(const EquivariantCW& w, const SubtreeSequence& seq,
                                            CosetKind kind) {
    const PresentationPtr& p = w.pres;
    PieceShape shape = piece_shape(p, kind);
    ConnectivityCertificate cert;
    cert.group = shape.group;
    cert.nodes = piece_nodes(w, seq, kind);
    IncidenceList inc = piece_incidences(w, seq, kind, cert.nodes);
    for (const auto& [cell, ends] : inc.rows) {
        for (std::size_t k = 1; k < ends.size(); ++k) {
            OrbitLink link;
            link.coset = cell.first;
            link.cell = cell.second;
            link.node_a = ends[0].node;
            link.offset_a = ends[0].offset;
            link.node_b = ends[k].node;
            link.offset_b = ends[k].offset;
            cert.links.push_back(std::move(link));
        }
    }

    // spanning structure by breadth-first search with fiber potentials
    std::size_t n = cert.nodes.size();
    cert.parent_link.assign(n, -1);
    cert.potential.assign(n, identity_of(shape.group));
    if (n == 0) {
        cert.connected = true;
    } else {
        std::vector<int> state(n, 0);  // 0 unvisited, 1 visited
        state[0] = 1;
        bool grew = true;
        while (grew) {
            grew = false;
            for (std::size_t li = 0; li < cert.links.size(); ++li) {
                const OrbitLink& l = cert.links[li];
                BaseElement transport = base_op(base_invert(l.offset_a), l.offset_b);
                if (state[l.node_a] == 1 && state[l.node_b] == 0) {
                    state[l.node_b] = 1;
                    cert.parent_link[l.node_b] = static_cast<int>(li);
                    cert.potential[l.node_b] = base_op(cert.potential[l.node_a], transport);
                    grew = true;
                } else if (state[l.node_b] == 1 && state[l.node_a] == 0) {
                    state[l.node_a] = 1;
                    cert.parent_link[l.node_a] = static_cast<int>(li);
                    cert.potential[l.node_a] =
                        base_op(cert.potential[l.node_b], base_invert(transport));
                    grew = true;
                }
            }
        }
        cert.connected = std::all_of(state.begin(), state.end(), [](int s) { return s == 1; });
    }

    if (cert.connected) {
        std::set<std::size_t> tree_links;
        for (int li : cert.parent_link)
            if (li >= 0) tree_links.insert(static_cast<std::size_t>(li));
        for (std::size_t li = 0; li < cert.links.size(); ++li) {
            if (tree_links.count(li)) continue;
            const OrbitLink& l = cert.links[li];
            BaseElement transport = base_op(base_invert(l.offset_a), l.offset_b);
            BaseElement m = base_op(base_op(cert.potential[l.node_a], transport),
                                    base_invert(cert.potential[l.node_b]));
            if (!m.is_identity()) cert.monodromy.push_back(m);
        }
        auto [full, method] = generates_group(shape.group, cert.monodromy);
        cert.generates = full;
        cert.generation_method = method;
    }
    return cert;
}

}  // namespace

bool verify_certificate(const EquivariantCW& w, const SubtreeSequence& seq, CosetKind kind,
                        const ConnectivityCertificate& cert) {
    // the node set must be exactly the one determined by U
    std::vector<OrbitNode> expect_nodes = piece_nodes(w, seq, kind);
    if (expect_nodes.size() != cert.nodes.size()) return false;
    for (std::size_t i = 0; i < expect_nodes.size(); ++i)
        if (!(expect_nodes[i].coset == cert.nodes[i].coset) ||
            expect_nodes[i].cell != cert.nodes[i].cell)
            return false;
    // every stored link must be a genuine incidence pair
    IncidenceList inc = piece_incidences(w, seq, kind, cert.nodes);
    for (const OrbitLink& l : cert.links) {
        bool found = false;
        for (const auto& [cell, ends] : inc.rows) {
            if (!(cell.first == l.coset) || cell.second != l.cell) continue;
            bool has_a = false, has_b = false;
            for (const auto& e : ends) {
                if (e.node == l.node_a && e.offset == l.offset_a) has_a = true;
                if (e.node == l.node_b && e.offset == l.offset_b) has_b = true;
            }
            if (has_a && has_b) found = true;
        }
        if (!found) return false;
    }
    if (!cert.connected) return false;
    // the spanning structure must reach every node with consistent potentials
    if (!cert.nodes.empty()) {
        std::size_t n = cert.nodes.size();
        if (cert.parent_link.size() != n || cert.potential.size() != n) return false;
        for (std::size_t v = 0; v < n; ++v) {
            int li = cert.parent_link[v];
            if (li < 0) {
                if (!cert.potential[v].is_identity()) return false;
                continue;
            }
            const OrbitLink& l = cert.links[static_cast<std::size_t>(li)];
            BaseElement transport = base_op(base_invert(l.offset_a), l.offset_b);
            BaseElement expect;
            if (l.node_b == v)
                expect = base_op(cert.potential[l.node_a], transport);
            else if (l.node_a == v)
                expect = base_op(cert.potential[l.node_b], base_invert(transport));
            else
                return false;
            if (!(expect == cert.potential[v])) return false;
        }
        // walking the parents must terminate at a root (acyclic spanning structure)
        for (std::size_t v = 0; v < n; ++v) {
            std::size_t cur = v;
            std::size_t steps = 0;
            while (cert.parent_link[cur] >= 0) {
                const OrbitLink& l =
                    cert.links[static_cast<std::size_t>(cert.parent_link[cur])];
                cur = l.node_a == cur ? l.node_b : l.node_a;
                if (++steps > n) return false;
            }
        }
    }
    // label generation re-checked by the per-class subgroup test
    auto [full, method] = generates_group(cert.group, cert.monodromy);
    (void)method;
    return full == cert.generates && cert.generates;
}

// ---------------------------------------------------------------------------
// Domains

namespace {

std::vector<std::vector<std::pair<CosetKey, std::size_t>>> domain_cells(
    const EquivariantCW& w, const SubtreeSequence& seq, CosetKind kind) {
    std::vector<std::vector<std::pair<CosetKey, std::size_t>>> out(
        static_cast<std::size_t>(seq.top()) + 1);
    for (int r = 0; r <= seq.top(); ++r) {
        for (const CosetKey& key : piece_keys(w.pres, seq.at(r), kind))
            for (std::size_t c = 0; c < w.cells[static_cast<std::size_t>(r)].size(); ++c)
                out[static_cast<std::size_t>(r)].push_back({key, c});
    }
    return out;
}

}  // namespace

CWDomain domain_from_sequence(const EquivariantCW& w, const SubtreeSequence& seq) {
    CWDomain d;
    d.seq = seq;
    bool amalgam = w.pres->kind == PresentationKind::Amalgam;
    d.w1_cells = domain_cells(w, seq, CosetKind::G1);
    if (amalgam) d.w2_cells = domain_cells(w, seq, CosetKind::G2);
    d.y_cells = domain_cells(w, seq, CosetKind::H);
    d.cert_w1 = compute_certificate(w, seq, CosetKind::G1);
    if (amalgam) d.cert_w2 = compute_certificate(w, seq, CosetKind::G2);
    d.cert_y = compute_certificate(w, seq, CosetKind::H);
    d.fundamental = true;
    for (int r = 0; r <= seq.top(); ++r) {
        const FiniteSubtree& t = seq.at(r);
        bool single_vertex = t.vertices.size() == 1 && t.edges.empty();
        bool single_edge = t.vertices.size() == 2 && t.edges.size() == 1;
        if (!single_vertex && !single_edge) d.fundamental = false;
    }
    return d;
}

bool CWDomain::certified() const {
    bool ok = cert_w1.connected && cert_w1.generates && cert_y.connected && cert_y.generates;
    if (cert_w2.group) ok = ok && cert_w2.connected && cert_w2.generates;
    return ok;
}

// ---------------------------------------------------------------------------
// Realization with connectivity repair

namespace {

struct SkeletonMove {
    std::size_t z_from, z_to;
    NormalForm shift;       // state g at z_from moves to g * shift at z_to
    NormalForm cell_shift;  // the crossing 1-cell instance is (g * cell_shift) * c~
    std::size_t cell;
};

std::vector<SkeletonMove> skeleton_moves(const EquivariantCW& w) {
    std::vector<SkeletonMove> moves;
    if (w.complex.top() < 1) return moves;
    RingMatrix d1 = w.complex.diff_at(1);
    for (std::size_t c = 0; c < w.cells[1].size(); ++c) {
        std::vector<std::pair<NormalForm, std::size_t>> ends;
        for (std::size_t z = 0; z < w.cells[0].size(); ++z)
            for (const auto& [s, coeff] : d1.at(c, z).terms) ends.push_back({s, z});
        for (std::size_t i = 0; i < ends.size(); ++i)
            for (std::size_t j = 0; j < ends.size(); ++j) {
                if (i == j) continue;
                SkeletonMove m;
                m.z_from = ends[i].second;
                m.z_to = ends[j].second;
                NormalForm si_inv = nf_invert(ends[i].first);
                m.shift = nf_multiply(si_inv, ends[j].first);
                m.cell_shift = si_inv;
                m.cell = c;
                moves.push_back(std::move(m));
            }
    }
    return moves;
}

struct SkeletonState {
    NormalForm g;
    std::size_t z;
};

struct SkeletonStateLess {
    bool operator()(const SkeletonState& a, const SkeletonState& b) const {
        if (a.z != b.z) return a.z < b.z;
        return nf_cmp(a.g, b.g) < 0;
    }
};

// breadth-first path search in the 1-skeleton of the universal cover; the
// target predicate sees each reached state. Returns the traversed cells
// (1-cell instances and 0-cell instances) of a shortest path, or nothing.
std::optional<std::vector<std::pair<NormalForm, std::pair<int, std::size_t>>>> skeleton_path(
    const std::vector<SkeletonMove>& moves, const SkeletonState& start,
    const std::function<bool(const SkeletonState&)>& is_target, std::size_t max_states) {
    struct Visit {
        SkeletonState state;
        int parent;
        int via_move;
    };
    std::vector<Visit> visits;
    std::map<SkeletonState, std::size_t, SkeletonStateLess> seen;
    visits.push_back({start, -1, -1});
    seen.emplace(start, 0);
    for (std::size_t qi = 0; qi < visits.size(); ++qi) {
        SkeletonState cur = visits[qi].state;
        if (is_target(cur)) {
            std::vector<std::pair<NormalForm, std::pair<int, std::size_t>>> cells;
            std::size_t at = qi;
            while (true) {
                const Visit& v = visits[at];
                cells.push_back({v.state.g, {0, v.state.z}});  // 0-cell instance
                if (v.parent < 0) break;
                const SkeletonMove& m = moves[static_cast<std::size_t>(v.via_move)];
                NormalForm prev_g = visits[static_cast<std::size_t>(v.parent)].state.g;
                cells.push_back({nf_multiply(prev_g, m.cell_shift), {1, m.cell}});
                at = static_cast<std::size_t>(v.parent);
            }
            return cells;
        }
        if (visits.size() > max_states) break;
        for (std::size_t mi = 0; mi < moves.size(); ++mi) {
            const SkeletonMove& m = moves[mi];
            if (m.z_from != cur.z) continue;
            SkeletonState next{nf_multiply(cur.g, m.shift), m.z_to};
            if (seen.count(next)) continue;
            seen.emplace(next, visits.size());
            visits.push_back({next, static_cast<int>(qi), static_cast<int>(mi)});
        }
    }
    return std::nullopt;
}

// first generator of the piece group missing from the span of the labels
std::optional<BaseElement> missing_generator(const GroupPtr& g,
                                             const std::vector<BaseElement>& labels) {
    switch (g->kind) {
        case GroupKind::Trivial: return std::nullopt;
        case GroupKind::Finite: {
            std::vector<bool> in(g->finite_order(), false);
            in[0] = true;
            std::vector<int> stack = {0};
            while (!stack.empty()) {
                int a = stack.back();
                stack.pop_back();
                for (const BaseElement& l : labels)
                    for (int b : {g->table[a][l.index], g->table[a][g->inverse_table[l.index]]})
                        if (!in[b]) {
                            in[b] = true;
                            stack.push_back(b);
                        }
            }
            for (std::size_t i = 1; i < in.size(); ++i)
                if (!in[i]) {
                    BaseElement e = identity_of(g);
                    e.index = static_cast<int>(i);
                    return e;
                }
            return std::nullopt;
        }
        case GroupKind::Free: {
            std::vector<FreeWord> words;
            for (const BaseElement& l : labels) words.push_back(l.word);
            detail::CoreGraph graph = detail::fold_subgroup(g->rank(), words);
            for (std::size_t i = 0; i < g->rank(); ++i) {
                // generator i lies in the span iff its loop closes at the base
                int v = 0;
                int code = FreeWord::code(static_cast<int>(i), false);
                auto it = graph.adj[static_cast<std::size_t>(v)].find(code);
                if (it != graph.adj[0].end() && it->second == 0) continue;
                BaseElement e = identity_of(g);
                e.word.push(code);
                return e;
            }
            return std::nullopt;
        }
        case GroupKind::FreeAbelian: {
            const std::size_t n = g->rank();
            IntegerMatrix m(labels.size(), n);
            for (std::size_t i = 0; i < labels.size(); ++i)
                for (std::size_t j = 0; j < n; ++j) m.at(i, j) = int_from(labels[i].exps[j]);
            for (std::size_t j = 0; j < n; ++j) {
                std::vector<Int> unit(n, Int(0));
                unit[j] = 1;
                if (!in_row_lattice(m, unit)) {
                    BaseElement e = identity_of(g);
                    e.exps[j] = 1;
                    return e;
                }
            }
            return std::nullopt;
        }
    }
    return std::nullopt;
}

NormalForm embed_piece_element(const PresentationPtr& p, CosetKind kind, const BaseElement& x) {
    if (kind == CosetKind::H) return nf_from_h(p, x);
    return nf_from_factor(p, kind == CosetKind::G1 ? Factor::One : Factor::Two, x);
}

}  // namespace

CWDomain cw_realize(const EquivariantCW& w, const FiniteSubtree& seed, int max_repairs) {
    CwReport cw = validate_cw(w);
    if (!cw.pass)
        throw std::invalid_argument("invalid equivariant CW data: " + cw.violations.front());
    const PresentationPtr& p = w.pres;
    bool amalgam = p->kind == PresentationKind::Amalgam;
    SubtreeSequence seq = realize(w.complex, seed);
    std::vector<SkeletonMove> moves = skeleton_moves(w);

    for (int round = 0; round <= max_repairs; ++round) {
        CWDomain dom = domain_from_sequence(w, seq);
        std::vector<std::pair<CosetKind, const ConnectivityCertificate*>> pieces;
        pieces.push_back({CosetKind::G1, &dom.cert_w1});
        if (amalgam) pieces.push_back({CosetKind::G2, &dom.cert_w2});
        pieces.push_back({CosetKind::H, &dom.cert_y});

        bool deficient = false;
        for (auto& [kind, cert] : pieces) {
            if (cert->connected && cert->generates) continue;
            deficient = true;
            if (round == max_repairs)
                throw std::runtime_error(
                    "certificate not found: connectivity repair bound exceeded");

            std::optional<std::vector<std::pair<NormalForm, std::pair<int, std::size_t>>>> path;
            if (!cert->connected) {
                // connect the component of node 0 to any node outside it
                std::vector<bool> reached(cert->nodes.size(), false);
                {
                    // recompute reachability from the stored spanning data
                    for (std::size_t v = 0; v < cert->nodes.size(); ++v)
                        reached[v] = cert->parent_link[v] >= 0 || v == 0;
                    // parent_link marks visited nodes; roots beyond node 0 are unreached
                }
                const OrbitNode& start_node = cert->nodes[0];
                SkeletonState start{start_node.coset.rep, start_node.cell};
                auto is_target = [&](const SkeletonState& s) {
                    CosetKey key = coset_key(s.g, kind);
                    for (std::size_t v = 0; v < cert->nodes.size(); ++v) {
                        if (reached[v]) continue;
                        if (cert->nodes[v].cell == s.z && cert->nodes[v].coset == key) return true;
                    }
                    return false;
                };
                path = skeleton_path(moves, start, is_target, 20000);
            } else {
                // not generating: realize a missing label as a loop
                auto missing = missing_generator(cert->group, cert->monodromy);
                if (!missing)
                    throw std::logic_error("generation failed with no missing generator");
                if (cert->nodes.empty())
                    throw std::runtime_error(
                        "certificate not found: piece has no 0-cells to anchor a loop");
                const OrbitNode& start_node = cert->nodes[0];
                SkeletonState start{start_node.coset.rep, start_node.cell};
                NormalForm target_g =
                    nf_multiply(embed_piece_element(p, kind, *missing), start_node.coset.rep);
                auto is_target = [&](const SkeletonState& s) {
                    return s.z == start_node.cell && s.g == target_g;
                };
                path = skeleton_path(moves, start, is_target, 20000);
            }
            if (!path)
                throw std::runtime_error(
                    "certificate not found: bounded skeleton search exhausted");

            std::vector<std::vector<CosetKey>> targets(static_cast<std::size_t>(seq.top()) + 1);
            for (const auto& [g, cell] : *path) {
                auto [dim, idx] = cell;
                (void)idx;
                CosetKey key = coset_key(g, kind);
                if (dim <= seq.top()) targets[static_cast<std::size_t>(dim)].push_back(key);
            }
            seq = extend_sequence(w.complex, seq, targets);
            break;  // recompute certificates after each repair
        }
        if (!deficient) return dom;
    }
    throw std::runtime_error("certificate not found: repair loop exhausted");
}

std::string export_domain_dot(const EquivariantCW& w, const CWDomain& domain) {
    std::ostringstream out;
    out << "graph domain {\n  node [style=filled];\n";
    auto emit_piece = [&](const char* prefix, const char* color,
                          const ConnectivityCertificate& cert) {
        for (std::size_t i = 0; i < cert.nodes.size(); ++i) {
            const OrbitNode& n = cert.nodes[i];
            out << "  \"" << prefix << "|" << coset_key_to_string(n.coset) << "|"
                << w.cells[0][n.cell] << "\" [fillcolor=" << color << "];\n";
        }
        for (const OrbitLink& l : cert.links) {
            const OrbitNode& a = cert.nodes[l.node_a];
            const OrbitNode& b = cert.nodes[l.node_b];
            out << "  \"" << prefix << "|" << coset_key_to_string(a.coset) << "|"
                << w.cells[0][a.cell] << "\" -- \"" << prefix << "|"
                << coset_key_to_string(b.coset) << "|" << w.cells[0][b.cell] << "\" [label=\""
                << w.cells[1][l.cell] << "\"];\n";
        }
    };
    emit_piece("W1", "lightblue", domain.cert_w1);
    if (domain.cert_w2.group) emit_piece("W2", "lightpink", domain.cert_w2);
    emit_piece("Y", "lightgray", domain.cert_y);
    out << "}\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Seifert-van Kampen splittings

namespace {

ChainComplex retagged_to_g(const ChainComplex& c) {
    ChainComplex out = c;
    out.tag = RingTag::G;
    for (auto& d : out.diffs) d = matrix_retag(d, RingTag::G);
    return out;
}

}  // namespace

SvKSplitting build_svk(const EquivariantCW& w, const CWDomain& domain, int window) {
    const PresentationPtr& p = w.pres;
    bool amalgam = p->kind == PresentationKind::Amalgam;
    if (!domain.certified())
        throw std::invalid_argument("domain certificates are missing or failed");
    if (!verify_certificate(w, domain.seq, CosetKind::G1, domain.cert_w1) ||
        (amalgam && !verify_certificate(w, domain.seq, CosetKind::G2, domain.cert_w2)) ||
        !verify_certificate(w, domain.seq, CosetKind::H, domain.cert_y))
        throw std::invalid_argument("domain certificate does not re-verify");

    SvKSplitting s;
    s.pres = p;
    s.w = w;
    s.domain = domain;
    s.chain = build_splitting(w.complex, domain.seq);

    ChainComplex dg = retagged_to_g(s.chain.d);
    ChainComplex c1g = retagged_to_g(s.chain.c1);
    if (amalgam) {
        ChainComplex c2g = retagged_to_g(s.chain.c2);
        std::vector<RingMatrix> m1, m2;
        for (int r = 0; r <= s.chain.d.top(); ++r) {
            m1.push_back(matrix_retag(s.chain.e1.mat_at(r), RingTag::G));
            m2.push_back(matrix_retag(s.chain.e2.mat_at(r), RingTag::G));
        }
        ChainMap me1 = make_chain_map(dg, c1g, RingTag::G, m1);
        ChainMap me2 = make_chain_map(dg, c2g, RingTag::G, m2);
        s.x_complex = double_mapping_cylinder(me1, me2).complex;
    } else {
        s.x_complex = mapping_cone(s.chain.middle);
    }

    // projection f~: X~(U) -> W~. On the factor blocks it is the assembly
    // map (which already carries the f1 - f2 signs); cylinder cells map to 0.
    std::vector<RingMatrix> mats;
    int topx = s.x_complex.top();
    for (int r = 0; r <= topx; ++r) {
        RingMatrix m(p, RingTag::G, s.x_complex.rank_at(r), w.complex.rank_at(r));
        RingMatrix f = s.chain.assembly.mat_at(r);
        std::size_t c1r = s.chain.c1.rank_at(r);
        std::size_t dr1 = s.chain.d.rank_at(r - 1);
        for (std::size_t i = 0; i < c1r; ++i)
            for (std::size_t j = 0; j < m.cols; ++j) m.at(i, j) = f.at(i, j);
        if (amalgam) {
            std::size_t c2r = s.chain.c2.rank_at(r);
            for (std::size_t i = 0; i < c2r; ++i)
                for (std::size_t j = 0; j < m.cols; ++j)
                    m.at(c1r + dr1 + i, j) = f.at(c1r + i, j);
        }
        mats.push_back(std::move(m));
    }
    s.f_tilde = make_chain_map(s.x_complex, w.complex, RingTag::G, std::move(mats));
    s.cone_certificate = acyclic_cone(s.f_tilde, window);

    // quotient cell inventories
    int n = s.chain.c.top();
    s.x1_cells = s.chain.c1_basis;
    s.x2_cells = s.chain.c2_basis;
    s.y_cells = s.chain.d_basis;
    s.cylinder_cells.assign(static_cast<std::size_t>(n) + 2, {});
    for (int r = 0; r <= n; ++r)
        s.cylinder_cells[static_cast<std::size_t>(r) + 1] = s.chain.d_basis[static_cast<std::size_t>(r)];
    return s;
}

// ---------------------------------------------------------------------------
// Plus construction

ChainComplex push_complex(const ChainComplex& c, const Homomorphism& phi,
                          const PresentationPtr& target_ring) {
    if (target_ring->g1 != phi.target)
        throw std::invalid_argument("target ring does not wrap the homomorphism target");
    std::vector<RingMatrix> diffs;
    for (int r = 1; r <= c.top(); ++r) {
        RingMatrix src = c.diff_at(r);
        RingMatrix out(target_ring, RingTag::G, src.rows, src.cols);
        for (std::size_t i = 0; i < src.entries.size(); ++i) {
            RingElement e = ring_zero(target_ring, RingTag::G);
            for (const auto& [g, coeff] : src.entries[i].terms) {
                BaseElement a = nf_to_factor(g, Factor::One);
                NormalForm image = nf_from_factor(target_ring, Factor::One, phi.apply(a));
                e = ring_add(e, ring_term(target_ring, RingTag::G, coeff, image));
            }
            out.entries[i] = std::move(e);
        }
        diffs.push_back(std::move(out));
    }
    return make_complex(target_ring, RingTag::G, c.ranks, std::move(diffs));
}

namespace {

std::vector<std::string> class_generators(const GroupPtr& g) {
    // letters that must be hit by surjectivity witnesses
    std::vector<std::string> out;
    if (g->kind == GroupKind::Finite) {
        for (std::size_t i = 1; i < g->finite_order(); ++i) out.push_back(g->symbols[i]);
    } else {
        out = g->symbols;
    }
    return out;
}

}  // namespace

PlusConstructionData plus_construction(const PlusInput& in, int window) {
    if (in.k.pres->g1 != in.pi)
        throw std::invalid_argument("input complex is not over the wrapped source group");
    if (in.phi.source != in.pi || in.phi.target != in.big_pi)
        throw std::invalid_argument("homomorphism endpoints do not match the plus data");

    PlusConstructionData out;
    out.source_ring = in.k.pres;
    out.target_ring = Presentation::wrap_base(in.big_pi);
    out.n = in.x_words.size();

    // witness verification in the word problem of big_pi
    std::vector<std::string> big_gens = class_generators(in.big_pi);
    if (in.h_words.size() != big_gens.size())
        throw std::invalid_argument("need one preimage witness per target generator");
    for (std::size_t j = 0; j < big_gens.size(); ++j) {
        BaseElement hj = parse_element(in.pi, in.h_words[j]);
        if (!(in.phi.apply(hj) == parse_element(in.big_pi, big_gens[j])))
            throw std::invalid_argument("witness failed: h'(" + big_gens[j] + ") = " +
                                        in.h_words[j]);
    }
    std::vector<std::string> small_gens = class_generators(in.pi);
    if (in.v_words.size() != small_gens.size())
        throw std::invalid_argument("need one image word per source generator");
    for (std::size_t i = 0; i < small_gens.size(); ++i) {
        BaseElement gi = parse_element(in.pi, small_gens[i]);
        if (!(in.phi.apply(gi) == parse_element(in.big_pi, in.v_words[i])))
            throw std::invalid_argument("witness failed: v(" + small_gens[i] + ") = " +
                                        in.v_words[i]);
    }
    for (const std::string& wword : in.w_words)
        if (!parse_element(in.big_pi, wword).is_identity())
            throw std::invalid_argument("witness failed: relator " + wword);
    for (const std::string& xword : in.x_words)
        if (!in.phi.apply(parse_element(in.pi, xword)).is_identity())
            throw std::invalid_argument("witness failed: kernel word " + xword);

    out.k_pushed = push_complex(in.k, in.phi, out.target_ring);

    const std::size_t n = out.n;
    std::vector<RingMatrix> rel_diffs;
    rel_diffs.emplace_back(out.target_ring, RingTag::G, 0, 0);  // d1
    rel_diffs.emplace_back(out.target_ring, RingTag::G, n, 0);  // d2
    rel_diffs.push_back(matrix_identity(out.target_ring, RingTag::G, n));  // d3
    out.relative =
        make_complex(out.target_ring, RingTag::G, {0, 0, n, n}, std::move(rel_diffs));

    out.k_prime = n == 0 ? out.k_pushed : direct_sum(out.k_pushed, out.relative);
    std::vector<RingMatrix> incl;
    for (int r = 0; r <= out.k_pushed.top(); ++r) {
        RingMatrix m(out.target_ring, RingTag::G, out.k_pushed.rank_at(r),
                     out.k_prime.rank_at(r));
        matrix_emplace(m, matrix_identity(out.target_ring, RingTag::G, out.k_pushed.rank_at(r)),
                       0, 0);
        incl.push_back(std::move(m));
    }
    out.inclusion = make_chain_map(out.k_pushed, out.k_prime, RingTag::G, std::move(incl));
    out.cone_certificate = acyclic_cone(out.inclusion, window);
    return out;
}

// ---------------------------------------------------------------------------
// Injective refinement

namespace {

// converts a complex over wrap_base(B) into the main presentation's subring
ChainComplex main_from_wrapped(const ChainComplex& k, const PresentationPtr& main, RingTag tag) {
    std::vector<RingMatrix> diffs;
    for (int r = 1; r <= k.top(); ++r) {
        RingMatrix src = k.diff_at(r);
        RingMatrix out(main, tag, src.rows, src.cols);
        for (std::size_t i = 0; i < src.entries.size(); ++i) {
            RingElement e = ring_zero(main, tag);
            for (const auto& [g, coeff] : src.entries[i].terms) {
                BaseElement a = nf_to_factor(g, Factor::One);
                NormalForm image;
                if (tag == RingTag::H)
                    image = nf_from_h(main, a);
                else
                    image = nf_from_factor(main, tag == RingTag::G1 ? Factor::One : Factor::Two,
                                           a);
                e = ring_add(e, ring_term(main, tag, coeff, image));
            }
            out.entries[i] = std::move(e);
        }
        diffs.push_back(std::move(out));
    }
    return make_complex(main, tag, k.ranks, std::move(diffs));
}

// converts a main-presentation subring complex into wrap_base coordinates
ChainComplex wrapped_from_main(const ChainComplex& c, const PresentationPtr& ring) {
    std::vector<RingMatrix> diffs;
    for (int r = 1; r <= c.top(); ++r) {
        RingMatrix src = c.diff_at(r);
        RingMatrix out(ring, RingTag::G, src.rows, src.cols);
        for (std::size_t i = 0; i < src.entries.size(); ++i) {
            RingElement e = ring_zero(ring, RingTag::G);
            for (const auto& [g, coeff] : src.entries[i].terms) {
                BaseElement a;
                if (c.tag == RingTag::H)
                    a = nf_to_h(g);
                else
                    a = nf_to_factor(g, c.tag == RingTag::G1 ? Factor::One : Factor::Two);
                e = ring_add(e, ring_term(ring, RingTag::G, coeff,
                                          nf_from_factor(ring, Factor::One, a)));
            }
            out.entries[i] = std::move(e);
        }
        diffs.push_back(std::move(out));
    }
    return make_complex(ring, RingTag::G, c.ranks, std::move(diffs));
}

bool complexes_equal(const ChainComplex& a, const ChainComplex& b) {
    if (a.ranks != b.ranks) return false;
    for (int r = 1; r <= a.top(); ++r)
        if (!(a.diff_at(r).entries == b.diff_at(r).entries)) return false;
    return true;
}

// extends a splitting map by unit blocks pairing new degree-2/3 cells
RingMatrix extended_map_matrix(const PresentationPtr& p, RingTag tag, const RingMatrix& old,
                               int degree, std::size_t n_src, std::size_t n_dst,
                               const std::vector<std::size_t>& pairing) {
    bool extended_degree = degree == 2 || degree == 3;
    std::size_t extra_rows = extended_degree ? n_src : 0;
    std::size_t extra_cols = extended_degree ? n_dst : 0;
    RingMatrix m(p, tag, old.rows + extra_rows, old.cols + extra_cols);
    matrix_emplace(m, old, 0, 0);
    if (extended_degree)
        for (std::size_t k = 0; k < n_src; ++k)
            m.at(old.rows + k, old.cols + pairing[k]) = ring_one(p, tag);
    return m;
}

}  // namespace

RefinedSplitting injective_refine(const SvKSplitting& s, const RefineInput& in, int window) {
    const PresentationPtr& p = s.pres;
    bool amalgam = p->kind == PresentationKind::Amalgam;

    if (in.y.big_pi != p->h)
        throw std::invalid_argument("Y refinement data must surject onto H");
    if (in.x1.big_pi != p->g1)
        throw std::invalid_argument("X1 refinement data must surject onto G1");
    if (amalgam && in.x2.big_pi != p->g2)
        throw std::invalid_argument("X2 refinement data must surject onto G2");

    RefinedSplitting out;
    out.y_plus = plus_construction(in.y, window);
    out.x1_plus = plus_construction(in.x1, window);
    if (amalgam) out.x2_plus = plus_construction(in.x2, window);

    // the declared chain data must push forward to the splitting pieces
    if (!complexes_equal(out.y_plus.k_pushed, wrapped_from_main(s.chain.d, out.y_plus.target_ring)))
        throw std::invalid_argument("Y chain data does not push forward to the splitting's D");
    if (!complexes_equal(out.x1_plus.k_pushed,
                         wrapped_from_main(s.chain.c1, out.x1_plus.target_ring)))
        throw std::invalid_argument("X1 chain data does not push forward to C1");
    if (amalgam &&
        !complexes_equal(out.x2_plus.k_pushed,
                         wrapped_from_main(s.chain.c2, out.x2_plus.target_ring)))
        throw std::invalid_argument("X2 chain data does not push forward to C2");

    // compatibility of the declared maps and containment of the y-images
    if (in.psi1.source != in.y.pi || in.psi1.target != in.x1.pi)
        throw std::invalid_argument("psi1 endpoints do not match");
    for (const std::string& gen : class_generators(in.y.pi)) {
        BaseElement z = parse_element(in.y.pi, gen);
        if (!(in.x1.phi.apply(in.psi1.apply(z)) == p->i1.apply(in.y.phi.apply(z))))
            throw std::invalid_argument("psi1 is incompatible with the splitting maps");
    }
    if (in.y_in_x1.size() != in.y.x_words.size())
        throw std::invalid_argument("need an x1 index for every y kernel word");
    for (std::size_t k = 0; k < in.y.x_words.size(); ++k) {
        if (in.y_in_x1[k] >= in.x1.x_words.size())
            throw std::invalid_argument("x1 does not contain the image of y word " +
                                        in.y.x_words[k]);
        BaseElement img = in.psi1.apply(parse_element(in.y.pi, in.y.x_words[k]));
        if (!(parse_element(in.x1.pi, in.x1.x_words[in.y_in_x1[k]]) == img))
            throw std::invalid_argument("x1 does not contain the image of y word " +
                                        in.y.x_words[k]);
    }
    const PlusInput& second = amalgam ? in.x2 : in.x1;
    const Homomorphism& psi2 = in.psi2;
    if (psi2.source != in.y.pi || psi2.target != second.pi)
        throw std::invalid_argument("psi2 endpoints do not match");
    for (const std::string& gen : class_generators(in.y.pi)) {
        BaseElement z = parse_element(in.y.pi, gen);
        if (!(second.phi.apply(psi2.apply(z)) == p->i2.apply(in.y.phi.apply(z))))
            throw std::invalid_argument("psi2 is incompatible with the splitting maps");
    }
    if (in.y_in_x2.size() != in.y.x_words.size())
        throw std::invalid_argument("need a second-side index for every y kernel word");
    for (std::size_t k = 0; k < in.y.x_words.size(); ++k) {
        if (in.y_in_x2[k] >= second.x_words.size())
            throw std::invalid_argument("x2 does not contain the image of y word " +
                                        in.y.x_words[k]);
        BaseElement img = psi2.apply(parse_element(in.y.pi, in.y.x_words[k]));
        if (!(parse_element(second.pi, second.x_words[in.y_in_x2[k]]) == img))
            throw std::invalid_argument("x2 does not contain the image of y word " +
                                        in.y.x_words[k]);
    }

    std::size_t ny = out.y_plus.n;
    std::size_t n1 = out.x1_plus.n;
    std::size_t n2 = amalgam ? out.x2_plus.n : out.x1_plus.n;
    out.identity_refinement = ny == 0 && n1 == 0 && (!amalgam || out.x2_plus.n == 0);

    // refined complexes back in the main presentation's subrings
    ChainComplex y_ref = main_from_wrapped(out.y_plus.k_prime, p, RingTag::H);
    ChainComplex x1_ref = main_from_wrapped(out.x1_plus.k_prime, p, RingTag::G1);
    ChainComplex x2_ref = amalgam ? main_from_wrapped(out.x2_plus.k_prime, p, RingTag::G2)
                                  : ChainComplex{};

    // refined splitting maps over Z[G]
    ChainComplex y_ref_g = retagged_to_g(y_ref);
    ChainComplex x1_ref_g = retagged_to_g(x1_ref);
    int reftop = std::max(y_ref_g.top(), x1_ref_g.top());
    std::vector<RingMatrix> e1_mats, e2_mats;
    for (int r = 0; r <= reftop; ++r) {
        RingMatrix old1 = matrix_retag(s.chain.e1.mat_at(r), RingTag::G);
        e1_mats.push_back(
            extended_map_matrix(p, RingTag::G, old1, r, ny, n1, in.y_in_x1));
        RingMatrix old2 = matrix_retag(s.chain.e2.mat_at(r), RingTag::G);
        e2_mats.push_back(
            extended_map_matrix(p, RingTag::G, old2, r, ny, n2, in.y_in_x2));
    }

    if (amalgam) {
        ChainComplex x2_ref_g = retagged_to_g(x2_ref);
        ChainMap me1 = make_chain_map(y_ref_g, x1_ref_g, RingTag::G, e1_mats);
        ChainMap me2 = make_chain_map(y_ref_g, x2_ref_g, RingTag::G, e2_mats);
        out.x_refined = double_mapping_cylinder(me1, me2).complex;
    } else {
        // middle' = 1 (x) e1' - t (x) e2'
        RingElement t_elt = ring_term(p, RingTag::G, 1, nf_stable(p, 1));
        std::vector<RingMatrix> mid;
        for (int r = 0; r <= reftop; ++r) {
            RingMatrix te2(p, RingTag::G, e2_mats[static_cast<std::size_t>(r)].rows,
                           e2_mats[static_cast<std::size_t>(r)].cols);
            for (std::size_t a = 0; a < te2.rows; ++a)
                for (std::size_t b = 0; b < te2.cols; ++b)
                    te2.at(a, b) =
                        ring_multiply(t_elt, e2_mats[static_cast<std::size_t>(r)].at(a, b));
            mid.push_back(matrix_sub(e1_mats[static_cast<std::size_t>(r)], te2));
        }
        ChainMap middle = make_chain_map(y_ref_g, x1_ref_g, RingTag::G, mid);
        out.x_refined = mapping_cone(middle);
    }

    // the old X complex includes into the refined one blockwise
    std::vector<RingMatrix> incl;
    for (int r = 0; r <= out.x_refined.top(); ++r) {
        RingMatrix m(p, RingTag::G, s.x_complex.rank_at(r), out.x_refined.rank_at(r));
        std::size_t old_c1 = s.chain.c1.rank_at(r);
        std::size_t old_d = s.chain.d.rank_at(r - 1);
        std::size_t new_c1 = x1_ref_g.rank_at(r);
        std::size_t new_d = y_ref_g.rank_at(r - 1);
        for (std::size_t i = 0; i < old_c1; ++i) m.at(i, i) = ring_one(p, RingTag::G);
        for (std::size_t i = 0; i < old_d; ++i)
            m.at(old_c1 + i, new_c1 + i) = ring_one(p, RingTag::G);
        if (amalgam) {
            std::size_t old_c2 = s.chain.c2.rank_at(r);
            for (std::size_t i = 0; i < old_c2; ++i)
                m.at(old_c1 + old_d + i, new_c1 + new_d + i) = ring_one(p, RingTag::G);
        }
        incl.push_back(std::move(m));
    }
    out.x_inclusion = make_chain_map(s.x_complex, out.x_refined, RingTag::G, std::move(incl));

    out.y_cone = out.y_plus.cone_certificate;
    out.x1_cone = out.x1_plus.cone_certificate;
    if (amalgam) out.x2_cone = out.x2_plus.cone_certificate;
    out.x_cone = acyclic_cone(out.x_inclusion, window);
    return out;
}

}  // namespace transv
