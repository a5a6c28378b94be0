#include "transv/tree.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace transv {

bool FiniteSubtree::contains(const FiniteSubtree& other) const {
    for (const auto& v : other.vertices)
        if (!contains_vertex(v)) return false;
    for (const auto& e : other.edges)
        if (!contains_edge(e)) return false;
    return true;
}

CosetKey base_vertex(const PresentationPtr& p, CosetKind kind) {
    if (p->kind == PresentationKind::Hnn && kind == CosetKind::G2)
        throw std::invalid_argument("G2 vertices only exist for amalgams");
    return coset_key(nf_identity(p), kind);
}

CosetKey base_edge(const PresentationPtr& p) {
    return coset_key(nf_identity(p), CosetKind::H);
}

std::pair<CosetKey, CosetKey> endpoints(const CosetKey& edge) {
    if (edge.kind != CosetKind::H) throw std::invalid_argument("edges are H-cosets");
    const PresentationPtr& p = edge.rep.pres;
    if (p->kind == PresentationKind::Amalgam)
        return {coset_key(edge.rep, CosetKind::G1), coset_key(edge.rep, CosetKind::G2)};
    NormalForm shifted = nf_multiply(nf_stable(p, -1), edge.rep);
    return {coset_key(edge.rep, CosetKind::G1), coset_key(shifted, CosetKind::G1)};
}

CosetKey act(const CosetKey& x, const NormalForm& g) {
    return coset_key(nf_multiply(x.rep, g), x.kind);
}

namespace {

Factor syllable_factor(const Syllable& s) { return s.factor; }

// path from a vertex down to the base vertex of whichever kind the descent
// ends at, read off the syllable structure of the key
TreePath descend_to_base(const CosetKey& v) {
    const PresentationPtr& p = v.rep.pres;
    TreePath path;
    path.vertices.push_back(v);
    if (p->kind == PresentationKind::Amalgam) {
        CosetKind kind = v.kind;
        std::vector<Syllable> tail = v.rep.syllables;
        while (!tail.empty()) {
            NormalForm cur = nf_identity(p);
            cur.syllables = tail;
            CosetKey edge{CosetKind::H, cur};
            Factor f = syllable_factor(tail.front());
            CosetKind next_kind = f == Factor::One ? CosetKind::G1 : CosetKind::G2;
            if ((next_kind == CosetKind::G1 && kind == CosetKind::G1) ||
                (next_kind == CosetKind::G2 && kind == CosetKind::G2))
                throw std::logic_error("malformed coset key: leading syllable not stripped");
            tail.erase(tail.begin());
            NormalForm next = nf_identity(p);
            next.syllables = tail;
            CosetKey vtx{next_kind, next};
            path.edges.push_back(edge);
            path.vertices.push_back(vtx);
            kind = next_kind;
        }
        return path;
    }
    std::vector<HnnChunk> tail = v.rep.chunks;
    while (!tail.empty()) {
        HnnChunk first = tail.front();
        NormalForm edge_rep = nf_identity(p);
        if (first.sign > 0) {
            edge_rep.chunks = tail;
        } else {
            edge_rep.g0 = first.rep;
            edge_rep.chunks.assign(tail.begin() + 1, tail.end());
        }
        CosetKey edge{CosetKind::H, edge_rep};
        tail.erase(tail.begin());
        NormalForm next = nf_identity(p);
        next.chunks = tail;
        CosetKey vtx{CosetKind::G1, next};
        path.edges.push_back(edge);
        path.vertices.push_back(vtx);
    }
    return path;
}

TreePath translate(const TreePath& path, const NormalForm& g) {
    TreePath out;
    for (const auto& v : path.vertices) out.vertices.push_back(act(v, g));
    for (const auto& e : path.edges) out.edges.push_back(act(e, g));
    return out;
}

TreePath reversed(const TreePath& path) {
    TreePath out;
    out.vertices.assign(path.vertices.rbegin(), path.vertices.rend());
    out.edges.assign(path.edges.rbegin(), path.edges.rend());
    return out;
}

}  // namespace

TreePath geodesic(const CosetKey& u, const CosetKey& v) {
    if (u.kind == CosetKind::H || v.kind == CosetKind::H)
        throw std::invalid_argument("geodesic endpoints must be vertices");
    const PresentationPtr& p = u.rep.pres;
    if (p != v.rep.pres)
        throw std::invalid_argument("vertices from different presentations");
    if (u == v) {
        TreePath path;
        path.vertices.push_back(u);
        return path;
    }
    // translate u to the base vertex of its kind, read v's key, translate back
    NormalForm gu = u.rep;
    NormalForm gu_inv = nf_invert(gu);
    CosetKey v_shifted = act(v, gu_inv);
    TreePath down = descend_to_base(v_shifted);  // v' .. base of some kind
    // join to the base vertex of u's kind if the descent ends elsewhere
    CosetKind end_kind = down.vertices.back().kind;
    if (end_kind != u.kind) {
        down.edges.push_back(base_edge(p));
        down.vertices.push_back(base_vertex(p, u.kind));
    }
    return translate(reversed(down), gu);
}

FiniteSubtree hull(const std::vector<CosetKey>& items) {
    if (items.empty()) throw std::invalid_argument("hull of an empty item set");
    FiniteSubtree out;
    std::vector<CosetKey> vertices;
    for (const CosetKey& item : items) {
        if (item.kind == CosetKind::H) {
            auto [a, b] = endpoints(item);
            out.edges.insert(item);
            out.vertices.insert(a);
            out.vertices.insert(b);
            vertices.push_back(a);
            vertices.push_back(b);
        } else {
            out.vertices.insert(item);
            vertices.push_back(item);
        }
    }
    // anchor at the canonically smallest vertex so the result is deterministic
    const CosetKey* anchor = &vertices.front();
    for (const CosetKey& v : vertices)
        if (coset_key_cmp(v, *anchor) < 0) anchor = &v;
    for (const CosetKey& v : vertices) {
        TreePath path = geodesic(*anchor, v);
        for (const auto& pv : path.vertices) out.vertices.insert(pv);
        for (const auto& pe : path.edges) out.edges.insert(pe);
    }
    return out;
}

SubtreeReport validate_subtree(const FiniteSubtree& s) {
    SubtreeReport rep;
    if (s.vertices.empty()) {
        rep.pass = false;
        rep.violation = "empty vertex set";
        return rep;
    }
    std::map<CosetKey, std::vector<CosetKey>, CosetKeyLess> adj;
    for (const CosetKey& e : s.edges) {
        auto [a, b] = endpoints(e);
        if (!s.contains_vertex(a) || !s.contains_vertex(b)) {
            rep.pass = false;
            rep.violation = "edge endpoint missing: " + coset_key_to_string(e);
            return rep;
        }
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    // connectivity first, then acyclicity via the count
    KeySet seen;
    std::vector<CosetKey> stack = {*s.vertices.begin()};
    seen.insert(stack.back());
    while (!stack.empty()) {
        CosetKey v = stack.back();
        stack.pop_back();
        for (const CosetKey& w : adj[v])
            if (seen.insert(w).second) stack.push_back(w);
    }
    if (seen.size() != s.vertices.size()) {
        rep.pass = false;
        rep.violation = "disconnected";
        return rep;
    }
    if (s.vertices.size() != s.edges.size() + 1) {
        rep.pass = false;
        rep.violation = "|V| != |E| + 1";
        return rep;
    }
    return rep;
}

bool edge_closure_holds(const FiniteSubtree& s) {
    for (auto it = s.vertices.begin(); it != s.vertices.end(); ++it) {
        for (auto jt = std::next(it); jt != s.vertices.end(); ++jt) {
            TreePath path = geodesic(*it, *jt);
            if (path.edges.size() == 1 && !s.contains_edge(path.edges.front())) return false;
        }
    }
    return true;
}

std::string export_dot(const FiniteSubtree& s) {
    std::ostringstream out;
    out << "graph tree {\n";
    for (const CosetKey& v : s.vertices)
        out << "  \"" << coset_key_to_string(v) << "\";\n";
    for (const CosetKey& e : s.edges) {
        auto [a, b] = endpoints(e);
        out << "  \"" << coset_key_to_string(a) << "\" -- \"" << coset_key_to_string(b)
            << "\" [label=\"" << coset_key_to_string(e) << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace transv
