#pragma once

#include <string>
#include <utility>
#include <vector>

#include "transv/chain.hpp"
#include "transv/oracle.hpp"
#include "transv/tree.hpp"

namespace transv {

// Graded sequence U = {U_n, ..., U_0} of finite subtrees; realized by a
// complex C when d(C_r(U_r)_i) lands in C_{r-1}(U_{r-1})_i.
struct SubtreeSequence {
    std::vector<FiniteSubtree> trees;  // trees[r] = U_r

    int top() const { return static_cast<int>(trees.size()) - 1; }
    const FiniteSubtree& at(int r) const { return trees[static_cast<std::size_t>(r)]; }
    FiniteSubtree& at(int r) { return trees[static_cast<std::size_t>(r)]; }
};

// ordered basis (coset key, input basis index) of an assembled module
using SplitBasis = std::vector<std::vector<std::pair<CosetKey, std::size_t>>>;

// The data of a finite Mayer-Vietoris splitting of C:
//   amalgam: 0 -> k_! D -> (j1)_! C1 (+) (j2)_! C2 -> C -> 0
//   hnn:     0 -> k_! D -> (j1)_! C1 -> C -> 0 with middle map 1(x)e1 - t(x)e2
struct MVSplitting {
    PresentationPtr pres;
    ChainComplex c;  // the split complex over Z[G]
    SubtreeSequence seq;

    ChainComplex d;   // over Z[H], basis (edge of U_r, i)
    ChainComplex c1;  // over Z[G1], basis (G1 vertex of U_r, i)
    ChainComplex c2;  // over Z[G2], amalgam only (empty complex for hnn)

    ChainMap e1;        // (i1)_! D -> C1, entries over Z[G1]
    ChainMap e2;        // amalgam: (i2)_! D -> C2; hnn: y -> t^-1 y into C1
    ChainMap middle;    // over Z[G]: the injection e of the splitting
    ChainMap assembly;  // over Z[G]: the surjection f of the splitting

    ChainComplex induced_sum;  // middle's target: induced C1 (+) C2 over Z[G]

    SplitBasis d_basis, c1_basis, c2_basis;
};

// Coset support of right multiplication by the entries of d_r, seen from the
// factor vertex v: the set of keys of (rep of v) * s over the entry supports.
std::vector<CosetKey> diff_support(const ChainComplex& c, int r, const CosetKey& v);

// amalgam: the base edge; hnn: base vertex plus base edge
FiniteSubtree default_seed(const PresentationPtr& p);

// U_n = hull(seed); downward sweep U_{r-1} = hull(U_r and all diff supports).
// The result is realized by C and monotone in the seed.
SubtreeSequence realize(const ChainComplex& c, const FiniteSubtree& seed);

// Enlarges a realized sequence so that degree r contains targets[r], then
// re-sweeps downward. Idempotent when the targets are already contained.
SubtreeSequence extend_sequence(const ChainComplex& c, const SubtreeSequence& seq,
                                const std::vector<std::vector<CosetKey>>& targets);

// Assembles the splitting; throws naming degree, vertex and coset when the
// sequence is not realized by C.
MVSplitting build_splitting(const ChainComplex& c, const SubtreeSequence& seq);

// the i2-induced module structure on D written inside Z[G1]: differential
// entries conjugated by the stable letter. hnn e2 is a chain map from this.
ChainComplex twist_by_stable_letter(const ChainComplex& d);

struct SplitViolation {
    std::string cls;  // subtree | realization | rank | complex | chain_square |
                      // composite | map_mismatch | exactness
    std::string detail;
};

struct SplitReport {
    bool pass = true;
    std::vector<SplitViolation> violations;
    std::vector<OracleReport> exactness;  // per degree, tree_exactness(U_r, c_r)
};

// Structural checks plus degreewise integer exactness; independent of the
// builder in that every canonical matrix is recomputed and compared and the
// final exactness delegation is pure integer linear algebra.
SplitReport verify_splitting(const MVSplitting& s);

}  // namespace transv
