#pragma once

#include <string>
#include <vector>

#include "transv/groupring.hpp"

namespace transv {

// Finite based free chain complex over a tagged group ring. Module elements
// are rows; differentials act by right multiplication, so d then d is the
// matrix product d_r * d_{r-1}.
struct ChainComplex {
    PresentationPtr pres;
    RingTag tag = RingTag::G;
    std::vector<std::size_t> ranks;  // degree 0..top
    std::vector<RingMatrix> diffs;   // diffs[r]: rank(r) x rank(r-1), diffs[0] unused

    int top() const { return static_cast<int>(ranks.size()) - 1; }
    std::size_t rank_at(int r) const {
        return (r < 0 || r > top()) ? 0 : ranks[static_cast<std::size_t>(r)];
    }
    RingMatrix diff_at(int r) const;  // zero matrix outside the stored range
};

ChainComplex make_complex(const PresentationPtr& p, RingTag tag, std::vector<std::size_t> ranks,
                          std::vector<RingMatrix> diffs);
ChainComplex zero_complex(const PresentationPtr& p, RingTag tag);

struct ComplexReport {
    bool pass = true;
    int degree = -1;
    std::string violation;
};

ComplexReport validate_complex(const ChainComplex& c);

// Chain map f: source -> target with per-degree matrices over `tag`, which
// must contain both complexes' rings (ring extension along an inclusion).
struct ChainMap {
    ChainComplex source;
    ChainComplex target;
    RingTag tag = RingTag::G;
    std::vector<RingMatrix> mats;  // degree r: source.rank(r) x target.rank(r)

    RingMatrix mat_at(int r) const;
};

ChainMap make_chain_map(ChainComplex source, ChainComplex target, RingTag tag,
                        std::vector<RingMatrix> mats);
ChainMap identity_chain_map(const ChainComplex& c);
ChainMap zero_chain_map(ChainComplex source, ChainComplex target, RingTag tag);

struct ChainMapReport {
    bool pass = true;
    int degree = -1;
    std::string violation;
};

ChainMapReport validate_chain_map(const ChainMap& f);

ChainMap compose(const ChainMap& f, const ChainMap& g);  // apply f, then g

// Algebraic mapping cylinder of e: V -> W, with
//   M(e)_r = W_r + V_{r-1} + V_r
// and the block differential carrying signs (-1)^r e and (-1)^{r-1}. The
// projection p = (1 0 e), the inclusion W -> M(e), and the explicit
// degree +1 homotopy h with d h + h d = incl p - 1 are part of the data.
struct CylinderData {
    ChainComplex cylinder;
    ChainMap incl;                    // W -> M(e)
    ChainMap proj;                    // M(e) -> W
    std::vector<RingMatrix> homotopy;  // h_r : M(e)_r -> M(e)_{r+1}
};

CylinderData mapping_cylinder(const ChainMap& e);

// Double mapping cylinder of e1: V -> W1, e2: V -> W2:
//   M(e1,e2)_r = W1_r + V_{r-1} + W2_r,
// the chain-level homotopy pushout. Block offsets expose the cell structure.
struct DoubleCylinder {
    ChainComplex complex;
    // per degree r: offsets of the three blocks (W1_r, V_{r-1}, W2_r)
    std::size_t block_w1(int /*r*/) const { return 0; }
    std::size_t block_v(int r) const { return w1_ranks[static_cast<std::size_t>(r)]; }
    std::size_t block_w2(int r) const {
        return w1_ranks[static_cast<std::size_t>(r)] + v_shift_ranks[static_cast<std::size_t>(r)];
    }
    std::vector<std::size_t> w1_ranks, v_shift_ranks, w2_ranks;  // per degree of the cylinder
};

DoubleCylinder double_mapping_cylinder(const ChainMap& e1, const ChainMap& e2);

// Algebraic mapping cone of f: V -> W: C(f)_r = W_r + V_{r-1} with blocks
// d_W, (-1)^r f, d_V. Acyclic exactly when f is a homology equivalence.
ChainComplex mapping_cone(const ChainMap& f);

// direct sum, used by the chain-level plus construction
ChainComplex direct_sum(const ChainComplex& a, const ChainComplex& b);

}  // namespace transv
