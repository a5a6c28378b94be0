#pragma once

#include <string>
#include <vector>

#include "transv/chain.hpp"
#include "transv/tree.hpp"

namespace transv {

struct IntegerMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<Int> entries;  // row-major

    IntegerMatrix() = default;
    IntegerMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r * c, Int(0)) {}
    Int& at(std::size_t r, std::size_t c) { return entries[r * cols + c]; }
    const Int& at(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }
};

struct SmithResult {
    std::size_t rank = 0;
    std::vector<Int> factors;  // d1 | d2 | ... (positive, nonzero)
};

// Smith normal form; the recorded unimodular transforms are re-multiplied
// against the input before returning, so a wrong reduction cannot escape.
SmithResult smith(const IntegerMatrix& m);

// rank over Q by exact integer elimination
std::size_t integer_rank(IntegerMatrix m);

// left kernel { x : x m = 0 } as a lattice basis
std::vector<std::vector<Int>> left_kernel_basis(const IntegerMatrix& m);
// is v in the lattice spanned by the rows of m?
bool in_row_lattice(const IntegerMatrix& m, const std::vector<Int>& v);

enum class Verdict { Pass, Fail, Inconclusive };

struct OracleReport {
    Verdict verdict = Verdict::Pass;
    std::string detail;
    int window_used = 0;
    bool pass() const { return verdict == Verdict::Pass; }
};

// Exactness of 0 -> Z^{|E|c} -> Z^{|V|c} -> Z^c -> 0 for the augmented
// simplicial chain complex of a finite subtree, with multiplicity c.
OracleReport tree_exactness(const FiniteSubtree& u, std::size_t multiplicity);

// Window-truncated acyclicity of the mapping cone of f. Basis elements are
// restricted to group elements in the word ball of the given radius; the
// verdict is Pass only when every interior cycle is an interior boundary,
// and Inconclusive whenever the window cannot support the check.
OracleReport acyclic_cone(const ChainMap& f, int window);

// exact checks p o incl = 1 and d h + h d = incl o p - 1
OracleReport homotopy_identities(const CylinderData& c);

// word length of a normal form over the presentation alphabet (used to
// derive the interaction radius of a complex)
std::size_t nf_word_length(const NormalForm& nf);

}  // namespace transv
