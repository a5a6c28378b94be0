#pragma once

#include <optional>
#include <string>
#include <vector>

#include "transv/algsplit.hpp"

namespace transv {

// G-equivariant finite CW structure, given as the cellular chain complex of
// the universal cover with one chosen lift per cell of the quotient.
struct EquivariantCW {
    PresentationPtr pres;
    std::vector<std::vector<std::string>> cells;  // names per degree
    ChainComplex complex;                         // over Z[G]
    std::string base_cell;                        // a 0-cell
};

EquivariantCW make_cw(const PresentationPtr& p, std::vector<std::vector<std::string>> cells,
                      std::vector<RingMatrix> boundaries, std::string base_cell);

struct CwReport {
    bool pass = true;
    std::vector<std::string> violations;
};

CwReport validate_cw(const EquivariantCW& w);

// ---------------------------------------------------------------------------
// Domains and their connectivity certificates

// one 0-cell orbit of a translated piece
struct OrbitNode {
    CosetKey coset;
    std::size_t cell;
};

// one incidence of a 1-cell orbit: it joins node a at fiber offset a.offset
// to node b at fiber offset b.offset (offsets in the piece's group)
struct OrbitLink {
    CosetKey coset;
    std::size_t cell;
    std::size_t node_a = 0, node_b = 0;
    BaseElement offset_a, offset_b;
};

struct ConnectivityCertificate {
    GroupPtr group;  // G1, G2 or H
    std::vector<OrbitNode> nodes;
    std::vector<OrbitLink> links;
    std::vector<int> parent_link;        // spanning structure; -1 for the root
    std::vector<BaseElement> potential;  // fiber transport from the root
    std::vector<BaseElement> monodromy;  // labels of the non-tree links
    bool connected = false;
    bool generates = false;
    std::string generation_method;
};

// cell sets W(U)_1, W(U)_2 (amalgam) / W(U)_1 (hnn) and the intersection
// piece, together with their certificatesors
struct CWDomain {
    SubtreeSequence seq;
    // per degree: (coset key, cell index) of each translated cell
    std::vector<std::vector<std::pair<CosetKey, std::size_t>>> w1_cells, w2_cells, y_cells;
    ConnectivityCertificate cert_w1, cert_w2, cert_y;
    bool fundamental = false;  // every U_r a single vertex or single edge

    bool certified() const;
};

// the cell sets determined by a sequence, before any connectivity repair
CWDomain domain_from_sequence(const EquivariantCW& w, const SubtreeSequence& seq);

// recompute and re-check a stored certificate against the cell data
bool verify_certificate(const EquivariantCW& w, const SubtreeSequence& seq, CosetKind kind,
                        const ConnectivityCertificate& cert);

// realize + connectivity repair; throws "certificate not found" when the
// bounded search cannot connect a piece or realize a generating set
CWDomain cw_realize(const EquivariantCW& w, const FiniteSubtree& seed, int max_repairs = 32);

// DOT view of the domain's 0/1-skeleton, cells colored by factor
std::string export_domain_dot(const EquivariantCW& w, const CWDomain& domain);

// ---------------------------------------------------------------------------
// Seifert-van Kampen splittings

struct SvKSplitting {
    PresentationPtr pres;
    EquivariantCW w;
    CWDomain domain;
    MVSplitting chain;        // the induced Mayer-Vietoris splitting of C(W~)
    ChainComplex x_complex;   // C(X~(U)): double cylinder (amalgam) / cone (hnn)
    ChainMap f_tilde;         // projection C(X~(U)) -> C(W~)
    OracleReport cone_certificate;
    // quotient cell inventories: X(U) = X1 u cylinder cells u X2, Y(U)
    std::vector<std::vector<std::pair<CosetKey, std::size_t>>> x1_cells, x2_cells, y_cells;
    std::vector<std::vector<std::pair<CosetKey, std::size_t>>> cylinder_cells;  // degree r+1
};

SvKSplitting build_svk(const EquivariantCW& w, const CWDomain& domain, int window = 6);

// ---------------------------------------------------------------------------
// Chain-level plus construction and injective refinement

struct PlusInput {
    GroupPtr pi;
    GroupPtr big_pi;
    Homomorphism phi;  // pi -> big_pi, surjective (checked on witnesses)
    ChainComplex k;    // over wrap_base(pi)
    std::vector<std::string> x_words;  // kernel normal generators, in pi's letters
    std::vector<std::string> h_words;  // preimage witness per big_pi generator
    std::vector<std::string> v_words;  // image word (in big_pi letters) per pi generator
    std::vector<std::string> w_words;  // relator words of big_pi
};

struct PlusConstructionData {
    PresentationPtr source_ring;  // wrap_base(pi)
    PresentationPtr target_ring;  // wrap_base(big_pi)
    ChainComplex k_pushed;        // phi_! k
    ChainComplex k_prime;         // k_pushed + Z[Pi]^n in degree 2 + degree 3
    ChainComplex relative;        // Z[Pi]^n --1--> Z[Pi]^n in degrees 3, 2
    ChainMap inclusion;           // k_pushed -> k_prime
    OracleReport cone_certificate;
    std::size_t n = 0;
};

PlusConstructionData plus_construction(const PlusInput& in, int window = 6);

// base change along a homomorphism of wrapped base groups, termwise
ChainComplex push_complex(const ChainComplex& c, const Homomorphism& phi,
                          const PresentationPtr& target_ring);

struct RefineInput {
    PlusInput y;   // phi: pi_Y -> H
    PlusInput x1;  // phi: pi_1 -> G1
    PlusInput x2;  // amalgam only: phi: pi_2 -> G2
    Homomorphism psi1, psi2;              // pi_Y -> pi_i, compatibility maps
    std::vector<std::size_t> y_in_x1;     // index of psi1(y_k) among x1.x_words
    std::vector<std::size_t> y_in_x2;
};

struct RefinedSplitting {
    PlusConstructionData y_plus, x1_plus, x2_plus;
    ChainComplex x_refined;  // over Z[G]
    ChainMap x_inclusion;    // old X complex -> refined
    OracleReport x_cone, x1_cone, x2_cone, y_cone;
    bool identity_refinement = false;
};

RefinedSplitting injective_refine(const SvKSplitting& s, const RefineInput& in, int window = 6);

}  // namespace transv
