#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "transv/groups.hpp"

namespace transv {

enum class PresentationKind { Amalgam, Hnn };
enum class Factor { One = 1, Two = 2 };

inline Factor other_factor(Factor f) { return f == Factor::One ? Factor::Two : Factor::One; }

class Presentation;
using PresentationPtr = std::shared_ptr<const Presentation>;

// An injective generalized free product: G1 *_H G2 determined by embeddings
// i1: H -> G1, i2: H -> G2, or the HNN extension G1 *_H {t} determined by
// i1, i2: H -> G1 with i1(h) t = t i2(h). Transversals of the right cosets
// i1(H)\G1 and i2(H)\G2 (resp. i2(H)\G1) fix all normal forms.
class Presentation : public std::enable_shared_from_this<Presentation> {
public:
    PresentationKind kind;
    std::string name;
    GroupPtr g1, g2, h;   // hnn: g2 == g1
    Homomorphism i1, i2;
    std::shared_ptr<const Transversal> t1, t2;
    std::string stable_letter;  // hnn only

    static PresentationPtr amalgam(std::string name, GroupPtr g1, GroupPtr g2, GroupPtr h,
                                   Homomorphism i1, Homomorphism i2);
    static PresentationPtr hnn(std::string name, GroupPtr g1, GroupPtr h, Homomorphism i1,
                               Homomorphism i2, std::string stable_letter = "t");
    // Views a base group B as the degenerate amalgam B *_1 1, so the chain
    // and ring layers can work over Z[B] with the same machinery.
    static PresentationPtr wrap_base(const GroupPtr& b);

    const GroupPtr& factor_group(Factor f) const { return f == Factor::One ? g1 : g2; }
    const Homomorphism& embedding(Factor f) const { return f == Factor::One ? i1 : i2; }
    const Transversal& transversal(Factor f) const { return f == Factor::One ? *t1 : *t2; }

    // resolves a word symbol to a factor element; stable letter handled by caller
    struct Letter {
        Factor factor;
        BaseElement element;
    };
    Letter resolve(const std::string& symbol) const;

private:
    Presentation() = default;
    std::map<std::string, Letter> letters_;
    friend PresentationPtr finish_presentation(std::shared_ptr<Presentation>);
};

// amalgam: g = k(head) * s1 ... sn, alternating nontrivial right-coset
// representatives; hnn: Britton form g = g0 * t^e1 s1 * ... * t^en sn with
// s_k a representative of i2(H)\G1 after t^+1 and of i1(H)\G1 after t^-1,
// pinch-free relative to the chosen transversals.
struct Syllable {
    Factor factor;
    BaseElement rep;
    bool operator==(const Syllable& o) const { return factor == o.factor && rep == o.rep; }
};

struct HnnChunk {
    int sign;  // +1 or -1
    BaseElement rep;
    bool operator==(const HnnChunk& o) const { return sign == o.sign && rep == o.rep; }
};

class NormalForm {
public:
    PresentationPtr pres;
    BaseElement head;                 // amalgam: element of H
    std::vector<Syllable> syllables;  // amalgam
    BaseElement g0;                   // hnn: element of G1
    std::vector<HnnChunk> chunks;     // hnn

    bool is_identity() const;
    std::size_t length() const;  // syllable / chunk count
    bool operator==(const NormalForm& o) const;
    bool operator!=(const NormalForm& o) const { return !(*this == o); }
};

NormalForm nf_identity(const PresentationPtr& p);
NormalForm nf_from_factor(const PresentationPtr& p, Factor f, const BaseElement& x);
NormalForm nf_from_h(const PresentationPtr& p, const BaseElement& h);
NormalForm nf_stable(const PresentationPtr& p, int sign);  // t^{sign}, hnn

// right-multiplication by a factor element / stable letter; the workhorses
NormalForm nf_mul_factor(const NormalForm& a, Factor f, const BaseElement& x);
NormalForm nf_mul_t(const NormalForm& a, int sign);

NormalForm nf_multiply(const NormalForm& a, const NormalForm& b);
NormalForm nf_invert(const NormalForm& a);

// Total order on normal forms: by syllable length, then structurally.
// Fixes term order in group rings and all serialization.
int nf_cmp(const NormalForm& a, const NormalForm& b);

struct NfLess {
    bool operator()(const NormalForm& a, const NormalForm& b) const { return nf_cmp(a, b) < 0; }
};

// Words over the factor generators and the stable letter, e.g. "x^2 t^-1 y".
// reduce folds letters left to right through nf_mul_*; reduce_rightmost is an
// independent word-rewriting strategy used to cross-check confluence.
NormalForm reduce(const PresentationPtr& p, const std::string& word);
NormalForm reduce_rightmost(const PresentationPtr& p, const std::string& word);

std::string nf_to_word(const NormalForm& nf);  // parses back through reduce

// Is the element in the image of j1 (resp. j2, k)? Exact membership tests.
bool nf_in_factor(const NormalForm& nf, Factor f);
bool nf_in_h(const NormalForm& nf);
// inverse of nf_from_factor / nf_from_h on their images
BaseElement nf_to_factor(const NormalForm& nf, Factor f);
BaseElement nf_to_h(const NormalForm& nf);

enum class CosetKind { G1, G2, H };

// Canonical key of a right coset G1*g, G2*g or k(H)*g, stored as the normal
// form of the minimal coset representative.
struct CosetKey {
    CosetKind kind;
    NormalForm rep;
    bool operator==(const CosetKey& o) const { return kind == o.kind && rep == o.rep; }
    bool operator!=(const CosetKey& o) const { return !(*this == o); }
};

CosetKey coset_key(const NormalForm& g, CosetKind kind);
int coset_key_cmp(const CosetKey& a, const CosetKey& b);
std::string coset_key_to_string(const CosetKey& k);

struct CosetKeyLess {
    bool operator()(const CosetKey& a, const CosetKey& b) const {
        return coset_key_cmp(a, b) < 0;
    }
};

// All distinct elements spelled by words of length <= radius over the
// presentation alphabet (factor generators, their inverses, t^{+-1};
// finite factors contribute each nontrivial element as a letter).
std::vector<NormalForm> word_ball(const PresentationPtr& p, int radius);

}  // namespace transv
