#pragma once

#include <set>
#include <string>
#include <vector>

#include "transv/presentation.hpp"

namespace transv {

// The Bass-Serre tree T of a presentation: vertices are the right cosets
// G1*g (and G2*g for amalgams), edges the right cosets k(H)*g. The edge
// k(H)*g joins G1*g and G2*g (amalgam), respectively G1*g and G1*t^-1*g
// (HNN). G acts on the right; the quotient is an interval or a circle.

using KeySet = std::set<CosetKey, CosetKeyLess>;

struct FiniteSubtree {
    KeySet vertices;
    KeySet edges;

    bool contains_vertex(const CosetKey& v) const { return vertices.count(v) > 0; }
    bool contains_edge(const CosetKey& e) const { return edges.count(e) > 0; }
    bool contains(const FiniteSubtree& other) const;
    bool operator==(const FiniteSubtree& o) const {
        return vertices == o.vertices && edges == o.edges;
    }
};

struct TreePath {
    std::vector<CosetKey> vertices;  // length n+1
    std::vector<CosetKey> edges;     // length n
};

CosetKey base_vertex(const PresentationPtr& p, CosetKind kind = CosetKind::G1);
CosetKey base_edge(const PresentationPtr& p);

std::pair<CosetKey, CosetKey> endpoints(const CosetKey& edge);
CosetKey act(const CosetKey& x, const NormalForm& g);

// unique reduced path; length equals the syllable distance
TreePath geodesic(const CosetKey& u, const CosetKey& v);

// smallest subtree containing the items (vertex or edge keys); computed as
// the union of geodesics from a canonical anchor item
FiniteSubtree hull(const std::vector<CosetKey>& items);

struct SubtreeReport {
    bool pass = true;
    std::string violation;  // first failure, empty when pass
};

SubtreeReport validate_subtree(const FiniteSubtree& s);

// on-demand closure check: any two subtree vertices joined by a tree edge
// must be joined inside the subtree
bool edge_closure_holds(const FiniteSubtree& s);

// DOT output, lexicographic on coset keys so output is reproducible
std::string export_dot(const FiniteSubtree& s);

}  // namespace transv
