#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "transv/integer.hpp"

namespace transv {

// Base groups are restricted to classes with solvable word and coset
// problems: trivial, finite (explicit multiplication table), finitely
// generated free, finitely generated free-abelian. Everything downstream
// (normal forms, trees, splittings) terminates exactly because of this.

enum class GroupKind { Trivial, Finite, Free, FreeAbelian };

class BaseGroup;
using GroupPtr = std::shared_ptr<const BaseGroup>;

// A freely reduced word, stored as letters. Letter code 2*g is generator g,
// 2*g+1 its inverse, so ascending codes give the shortlex letter order
// x < x^-1 < y < y^-1 < ...
struct FreeWord {
    std::vector<int> letters;

    static int code(int gen, bool inverse) { return 2 * gen + (inverse ? 1 : 0); }
    static int inverse_code(int c) { return c ^ 1; }
    static int gen_of(int c) { return c / 2; }
    static bool is_inverse(int c) { return (c & 1) != 0; }

    bool empty() const { return letters.empty(); }
    void push(int c);  // appends with free cancellation at the seam
    FreeWord concat(const FreeWord& other) const;
    FreeWord inverse() const;

    bool operator==(const FreeWord& o) const { return letters == o.letters; }
    // Shortlex: by length, then by letter codes.
    static int cmp(const FreeWord& a, const FreeWord& b);
};

class BaseGroup : public std::enable_shared_from_this<BaseGroup> {
public:
    GroupKind kind;
    std::string name;
    // Free / free-abelian: generator names. Finite: names of *all* elements,
    // index 0 being the identity. Trivial: empty.
    std::vector<std::string> symbols;
    // Finite only: table[i][j] = index of element i * element j.
    std::vector<std::vector<int>> table;
    std::vector<int> inverse_table;  // finite only

    static GroupPtr trivial(std::string name);
    static GroupPtr finite(std::string name, std::vector<std::string> element_names,
                           std::vector<std::vector<int>> table);
    static GroupPtr free_group(std::string name, std::vector<std::string> generators);
    static GroupPtr free_abelian(std::string name, std::vector<std::string> generators);

    std::size_t rank() const { return symbols.size(); }
    bool is_trivial_class() const { return kind == GroupKind::Trivial; }
    std::size_t finite_order() const { return table.size(); }

private:
    BaseGroup() = default;
};

// An element in canonical form. Two elements are equal iff their group and
// canonical payload are identical.
struct BaseElement {
    GroupPtr group;
    int index = 0;                 // finite
    FreeWord word;                 // free
    std::vector<long long> exps;   // free-abelian

    bool is_identity() const;
    bool operator==(const BaseElement& o) const;
    bool operator!=(const BaseElement& o) const { return !(*this == o); }
};

BaseElement identity_of(const GroupPtr& g);
BaseElement base_op(const BaseElement& a, const BaseElement& b);
BaseElement base_invert(const BaseElement& a);
BaseElement base_pow(const BaseElement& a, long long k);

// Canonical total order within one group: finite by index, free by shortlex,
// free-abelian lexicographic on exponents. Used for deterministic keys.
int base_cmp(const BaseElement& a, const BaseElement& b);

// Word syntax: whitespace-separated letters with optional ^k suffix,
// e.g. "x^2 y^-1 x". The empty string (or "1") is the identity.
BaseElement parse_element(const GroupPtr& g, const std::string& word);
std::string element_to_word(const BaseElement& e);

struct Homomorphism {
    enum class Injectivity { Verified, UserAsserted };

    GroupPtr source;
    GroupPtr target;
    // Free / free-abelian sources: one image per generator.
    // Finite sources: one image per element. Trivial: empty.
    std::vector<BaseElement> images;
    Injectivity injectivity = Injectivity::UserAsserted;

    BaseElement apply(const BaseElement& g) const;
};

// Builds and checks a homomorphism. Finite sources are fully verified
// against the table (and the injectivity flag upgraded to Verified when the
// kernel is trivial); infinite sources keep the caller's assertion.
Homomorphism make_hom(const GroupPtr& source, const GroupPtr& target,
                      std::vector<BaseElement> generator_images,
                      bool assert_injective);

Homomorphism identity_hom(const GroupPtr& g);

namespace detail {

// Folded Stallings graph of a finitely generated subgroup of a free group.
struct CoreGraph {
    // adjacency: per vertex, letter code -> target vertex; vertex 0 is base
    std::vector<std::map<int, int>> adj;
    std::vector<int> parent_vertex;   // BFS tree toward base
    std::vector<int> parent_letter;   // letter read from parent to vertex
    std::vector<FreeWord> tree_word;  // tree path word base -> v
    struct BasisEdge {
        int from;
        int letter;
        int to;
    };
    std::vector<BasisEdge> basis;          // non-tree edges, one per subgroup basis elt
    std::map<std::pair<int, int>, std::pair<int, int>> basis_lookup;
    // basis_lookup[(v,letter)] = (basis index, +1/-1 direction)
};

CoreGraph fold_subgroup(std::size_t ambient_rank, const std::vector<FreeWord>& generators);

}  // namespace detail

// Deterministic right-coset representatives of an embedded subgroup
// image(i) <= target, for i injective. rep() is idempotent, rep(identity
// coset) = identity, and rep(g) = rep(g') iff image(i)*g = image(i)*g'.
class Transversal {
public:
    explicit Transversal(Homomorphism embedding);

    const Homomorphism& embedding() const { return emb_; }
    const GroupPtr& ambient() const { return emb_.target; }

    // g = i(h) * rep, rep canonical
    std::pair<BaseElement, BaseElement> factor(const BaseElement& g) const;
    BaseElement representative(const BaseElement& g) const;
    bool in_subgroup(const BaseElement& g) const;

    // Index [target : image] when finite.
    std::optional<long long> index() const;
    // All representatives, when the index is finite.
    std::vector<BaseElement> representatives() const;

private:
    Homomorphism emb_;

    // finite ambient
    std::vector<int> coset_rep_;        // element index -> rep index
    std::vector<int> subgroup_elems_;   // image as element indices

    // free ambient
    detail::CoreGraph graph_;
    std::vector<FreeWord> basis_in_source_;  // basis elt -> source word mapping it

    // free-abelian ambient
    std::vector<std::vector<Int>> hnf_;       // row HNF of image lattice
    std::vector<std::vector<Int>> hnf_u_;     // transform: hnf = u * images
    std::vector<int> pivot_col_;              // per HNF row

    BaseElement rep_free(const BaseElement& g) const;
    BaseElement preimage(const BaseElement& subgroup_elt) const;
};

}  // namespace transv
