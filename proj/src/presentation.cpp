#include "transv/presentation.hpp"

#include <algorithm>
#include <sstream>

namespace transv {

// ---------------------------------------------------------------------------
// Presentation

PresentationPtr finish_presentation(std::shared_ptr<Presentation> p) {
    auto add_letters = [&p](const GroupPtr& g, Factor f) {
        if (g->kind == GroupKind::Finite) {
            for (std::size_t i = 0; i < g->finite_order(); ++i) {
                BaseElement e = identity_of(g);
                e.index = static_cast<int>(i);
                auto [it, fresh] = p->letters_.emplace(g->symbols[i], Presentation::Letter{f, e});
                if (!fresh && !(it->second.element.is_identity() && e.is_identity()))
                    throw std::invalid_argument("generator name clash: " + g->symbols[i]);
            }
        } else {
            for (std::size_t i = 0; i < g->rank(); ++i) {
                BaseElement e = identity_of(g);
                if (g->kind == GroupKind::Free)
                    e.word.push(FreeWord::code(static_cast<int>(i), false));
                else
                    e.exps[i] = 1;
                auto [it, fresh] = p->letters_.emplace(g->symbols[i], Presentation::Letter{f, e});
                if (!fresh) throw std::invalid_argument("generator name clash: " + g->symbols[i]);
            }
        }
    };
    add_letters(p->g1, Factor::One);
    if (p->kind == PresentationKind::Amalgam) add_letters(p->g2, Factor::Two);
    if (p->kind == PresentationKind::Hnn && p->letters_.count(p->stable_letter))
        throw std::invalid_argument("stable letter collides with a generator name");
    return p;
}

PresentationPtr Presentation::amalgam(std::string name, GroupPtr g1, GroupPtr g2, GroupPtr h,
                                      Homomorphism i1, Homomorphism i2) {
    if (i1.source != h || i1.target != g1 || i2.source != h || i2.target != g2)
        throw std::invalid_argument("embeddings do not match the amalgam data");
    auto p = std::shared_ptr<Presentation>(new Presentation());
    p->kind = PresentationKind::Amalgam;
    p->name = std::move(name);
    p->g1 = std::move(g1);
    p->g2 = std::move(g2);
    p->h = std::move(h);
    p->i1 = std::move(i1);
    p->i2 = std::move(i2);
    p->t1 = std::make_shared<Transversal>(p->i1);
    p->t2 = std::make_shared<Transversal>(p->i2);
    return finish_presentation(p);
}

PresentationPtr Presentation::hnn(std::string name, GroupPtr g1, GroupPtr h, Homomorphism i1,
                                  Homomorphism i2, std::string stable_letter) {
    if (i1.source != h || i1.target != g1 || i2.source != h || i2.target != g1)
        throw std::invalid_argument("embeddings do not match the HNN data");
    auto p = std::shared_ptr<Presentation>(new Presentation());
    p->kind = PresentationKind::Hnn;
    p->name = std::move(name);
    p->g1 = std::move(g1);
    p->g2 = p->g1;
    p->h = std::move(h);
    p->i1 = std::move(i1);
    p->i2 = std::move(i2);
    p->stable_letter = std::move(stable_letter);
    p->t1 = std::make_shared<Transversal>(p->i1);
    p->t2 = std::make_shared<Transversal>(p->i2);
    return finish_presentation(p);
}

PresentationPtr Presentation::wrap_base(const GroupPtr& b) {
    auto triv = BaseGroup::trivial("1");
    return amalgam("Z[" + b->name + "]", b, triv, triv, make_hom(triv, b, {}, true),
                   make_hom(triv, triv, {}, true));
}

Presentation::Letter Presentation::resolve(const std::string& symbol) const {
    auto it = letters_.find(symbol);
    if (it == letters_.end())
        throw std::invalid_argument("unknown generator symbol '" + symbol + "'");
    return it->second;
}

// ---------------------------------------------------------------------------
// NormalForm basics

bool NormalForm::is_identity() const {
    if (pres->kind == PresentationKind::Amalgam)
        return head.is_identity() && syllables.empty();
    return g0.is_identity() && chunks.empty();
}

std::size_t NormalForm::length() const {
    return pres->kind == PresentationKind::Amalgam ? syllables.size() : chunks.size();
}

bool NormalForm::operator==(const NormalForm& o) const {
    if (pres != o.pres) return false;
    if (pres->kind == PresentationKind::Amalgam)
        return head == o.head && syllables == o.syllables;
    return g0 == o.g0 && chunks == o.chunks;
}

NormalForm nf_identity(const PresentationPtr& p) {
    NormalForm nf;
    nf.pres = p;
    if (p->kind == PresentationKind::Amalgam) {
        nf.head = identity_of(p->h);
    } else {
        nf.g0 = identity_of(p->g1);
    }
    return nf;
}

NormalForm nf_from_factor(const PresentationPtr& p, Factor f, const BaseElement& x) {
    return nf_mul_factor(nf_identity(p), f, x);
}

NormalForm nf_from_h(const PresentationPtr& p, const BaseElement& hel) {
    if (hel.group != p->h) throw std::invalid_argument("element is not in H");
    if (p->kind == PresentationKind::Amalgam) {
        NormalForm nf = nf_identity(p);
        nf.head = hel;
        return nf;
    }
    return nf_from_factor(p, Factor::One, p->i1.apply(hel));
}

NormalForm nf_stable(const PresentationPtr& p, int sign) {
    return nf_mul_t(nf_identity(p), sign);
}

// ---------------------------------------------------------------------------
// Right multiplication

namespace {

// amalgam: pass k(h) leftwards through syllables [0, upto]; returns the
// H-element that emerges at the front
BaseElement push_left_amalgam(const PresentationPtr& p, std::vector<Syllable>& syl, int upto,
                              BaseElement h) {
    for (int q = upto; q >= 0; --q) {
        if (h.is_identity()) return h;
        const auto& emb = p->embedding(syl[q].factor);
        BaseElement y = base_op(syl[q].rep, emb.apply(h));
        auto [h2, r2] = p->transversal(syl[q].factor).factor(y);
        if (r2.is_identity())
            throw std::logic_error("nontrivial representative became trivial in a push");
        syl[q].rep = r2;
        h = h2;
    }
    return h;
}

}  // namespace

NormalForm nf_mul_factor(const NormalForm& a, Factor f, const BaseElement& x) {
    const PresentationPtr& p = a.pres;
    if (p->kind == PresentationKind::Hnn && f == Factor::Two)
        throw std::invalid_argument("HNN extensions have a single factor");
    if (x.group != p->factor_group(f))
        throw std::invalid_argument("element is not in the named factor");
    if (x.is_identity()) return a;
    NormalForm r = a;

    if (p->kind == PresentationKind::Amalgam) {
        auto& syl = r.syllables;
        if (syl.empty()) {
            BaseElement y = base_op(p->embedding(f).apply(r.head), x);
            auto [h2, rep] = p->transversal(f).factor(y);
            r.head = h2;
            if (!rep.is_identity()) syl.push_back({f, rep});
            return r;
        }
        BaseElement h;
        int push_from;
        if (syl.back().factor == f) {
            BaseElement y = base_op(syl.back().rep, x);
            auto [h2, rep] = p->transversal(f).factor(y);
            h = h2;
            if (rep.is_identity()) {
                syl.pop_back();
                push_from = static_cast<int>(syl.size()) - 1;
            } else {
                syl.back().rep = rep;
                push_from = static_cast<int>(syl.size()) - 2;
            }
        } else {
            auto [h2, rep] = p->transversal(f).factor(x);
            h = h2;
            push_from = static_cast<int>(syl.size()) - 1;
            if (!rep.is_identity()) syl.push_back({f, rep});
        }
        BaseElement front = push_left_amalgam(p, syl, push_from, h);
        r.head = base_op(r.head, front);
        return r;
    }

    // hnn
    auto& ch = r.chunks;
    if (ch.empty()) {
        r.g0 = base_op(r.g0, x);
        return r;
    }
    auto transversal_for = [&p](int sign) -> const Transversal& {
        return sign > 0 ? *p->t2 : *p->t1;
    };
    auto emergent = [&p](int sign, const BaseElement& hel) {
        // t i2(h) = i1(h) t  and  t^-1 i1(h) = i2(h) t^-1
        return sign > 0 ? p->i1.apply(hel) : p->i2.apply(hel);
    };
    int n = static_cast<int>(ch.size());
    auto [h, rep] = transversal_for(ch[n - 1].sign).factor(base_op(ch[n - 1].rep, x));
    ch[n - 1].rep = rep;
    for (int q = n - 1; q >= 1; --q) {
        if (h.is_identity()) return r;
        BaseElement elem = emergent(ch[q].sign, h);
        auto [h2, rep2] = transversal_for(ch[q - 1].sign).factor(base_op(ch[q - 1].rep, elem));
        ch[q - 1].rep = rep2;
        h = h2;
    }
    if (!h.is_identity()) r.g0 = base_op(r.g0, emergent(ch[0].sign, h));
    return r;
}

NormalForm nf_mul_t(const NormalForm& a, int sign) {
    const PresentationPtr& p = a.pres;
    if (p->kind != PresentationKind::Hnn)
        throw std::invalid_argument("stable letter only exists in HNN extensions");
    if (sign != 1 && sign != -1) throw std::invalid_argument("stable letter power must be +-1");
    NormalForm r = a;
    if (!r.chunks.empty() && r.chunks.back().rep.is_identity() &&
        r.chunks.back().sign == -sign) {
        r.chunks.pop_back();  // t^e * 1 * t^-e pinches away
        return r;
    }
    r.chunks.push_back({sign, identity_of(p->g1)});
    return r;
}

NormalForm nf_multiply(const NormalForm& a, const NormalForm& b) {
    if (a.pres != b.pres) throw std::invalid_argument("normal forms over different presentations");
    NormalForm r = a;
    if (a.pres->kind == PresentationKind::Amalgam) {
        if (!b.head.is_identity())
            r = nf_mul_factor(r, Factor::One, a.pres->i1.apply(b.head));
        for (const Syllable& s : b.syllables) r = nf_mul_factor(r, s.factor, s.rep);
        return r;
    }
    if (!b.g0.is_identity()) r = nf_mul_factor(r, Factor::One, b.g0);
    for (const HnnChunk& c : b.chunks) {
        r = nf_mul_t(r, c.sign);
        if (!c.rep.is_identity()) r = nf_mul_factor(r, Factor::One, c.rep);
    }
    return r;
}

NormalForm nf_invert(const NormalForm& a) {
    NormalForm r = nf_identity(a.pres);
    if (a.pres->kind == PresentationKind::Amalgam) {
        for (auto it = a.syllables.rbegin(); it != a.syllables.rend(); ++it)
            r = nf_mul_factor(r, it->factor, base_invert(it->rep));
        if (!a.head.is_identity())
            r = nf_mul_factor(r, Factor::One, a.pres->i1.apply(base_invert(a.head)));
        return r;
    }
    for (auto it = a.chunks.rbegin(); it != a.chunks.rend(); ++it) {
        if (!it->rep.is_identity()) r = nf_mul_factor(r, Factor::One, base_invert(it->rep));
        r = nf_mul_t(r, -it->sign);
    }
    if (!a.g0.is_identity()) r = nf_mul_factor(r, Factor::One, base_invert(a.g0));
    return r;
}

int nf_cmp(const NormalForm& a, const NormalForm& b) {
    if (a.pres != b.pres) throw std::invalid_argument("normal forms over different presentations");
    if (a.length() != b.length()) return a.length() < b.length() ? -1 : 1;
    if (a.pres->kind == PresentationKind::Amalgam) {
        for (std::size_t i = 0; i < a.syllables.size(); ++i) {
            const auto& sa = a.syllables[i];
            const auto& sb = b.syllables[i];
            if (sa.factor != sb.factor) return sa.factor == Factor::One ? -1 : 1;
            int c = base_cmp(sa.rep, sb.rep);
            if (c != 0) return c;
        }
        return base_cmp(a.head, b.head);
    }
    for (std::size_t i = 0; i < a.chunks.size(); ++i) {
        const auto& ca = a.chunks[i];
        const auto& cb = b.chunks[i];
        if (ca.sign != cb.sign) return ca.sign > cb.sign ? -1 : 1;
        int c = base_cmp(ca.rep, cb.rep);
        if (c != 0) return c;
    }
    return base_cmp(a.g0, b.g0);
}

// ---------------------------------------------------------------------------
// Words

namespace {

struct WordToken {
    bool stable = false;
    Factor factor = Factor::One;
    BaseElement element;  // with exponent applied
    int t_sign = 0;
    long long t_count = 0;
};

std::vector<WordToken> parse_word(const PresentationPtr& p, const std::string& word) {
    std::vector<WordToken> out;
    std::istringstream in(word);
    std::string tok;
    while (in >> tok) {
        if (tok == "1") continue;
        long long exp = 1;
        std::string sym = tok;
        auto caret = tok.find('^');
        if (caret != std::string::npos) {
            sym = tok.substr(0, caret);
            std::string e = tok.substr(caret + 1);
            try {
                std::size_t used = 0;
                exp = std::stoll(e, &used);
                if (used != e.size()) throw std::invalid_argument(e);
            } catch (const std::exception&) {
                throw std::invalid_argument("bad exponent in token '" + tok + "'");
            }
        }
        if (sym.empty()) throw std::invalid_argument("empty symbol in word");
        WordToken t;
        if (p->kind == PresentationKind::Hnn && sym == p->stable_letter) {
            if (exp == 0) continue;
            t.stable = true;
            t.t_sign = exp > 0 ? 1 : -1;
            t.t_count = std::llabs(exp);
        } else {
            auto letter = p->resolve(sym);
            t.factor = letter.factor;
            t.element = base_pow(letter.element, exp);
        }
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace

NormalForm reduce(const PresentationPtr& p, const std::string& word) {
    NormalForm r = nf_identity(p);
    for (const WordToken& t : parse_word(p, word)) {
        if (t.stable) {
            for (long long i = 0; i < t.t_count; ++i) r = nf_mul_t(r, t.t_sign);
        } else {
            r = nf_mul_factor(r, t.factor, t.element);
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Independent rightmost rewriting strategy

namespace {

struct Piece {
    bool stable = false;
    int t_sign = 0;
    Factor factor = Factor::One;
    BaseElement element;
};

NormalForm assemble_amalgam(const PresentationPtr& p, std::vector<Piece> pieces) {
    // merge rightmost-first until stable
    bool changed = true;
    while (changed) {
        changed = false;
        // drop identities
        for (int i = static_cast<int>(pieces.size()) - 1; i >= 0; --i) {
            if (pieces[i].element.is_identity()) {
                pieces.erase(pieces.begin() + i);
                changed = true;
            }
        }
        // rightmost merge of same-factor neighbours, converting through H
        for (int i = static_cast<int>(pieces.size()) - 2; i >= 0; --i) {
            Piece& a = pieces[i];
            Piece& b = pieces[i + 1];
            Factor fa = a.factor, fb = b.factor;
            if (fa != fb) {
                // convert b through the subgroup when possible
                if (p->transversal(fb).in_subgroup(b.element)) {
                    auto [hb, rb] = p->transversal(fb).factor(b.element);
                    b.factor = fa;
                    b.element = p->embedding(fa).apply(hb);
                    fb = fa;
                } else if (p->transversal(fa).in_subgroup(a.element)) {
                    auto [ha, ra] = p->transversal(fa).factor(a.element);
                    a.factor = fb;
                    a.element = p->embedding(fb).apply(ha);
                    fa = fb;
                }
            }
            if (fa == fb) {
                a.element = base_op(a.element, b.element);
                pieces.erase(pieces.begin() + i + 1);
                changed = true;
                break;
            }
        }
    }
    NormalForm nf = nf_identity(p);
    if (pieces.empty()) return nf;
    if (pieces.size() == 1 && p->transversal(pieces[0].factor).in_subgroup(pieces[0].element)) {
        auto [h, r] = p->transversal(pieces[0].factor).factor(pieces[0].element);
        nf.head = h;
        return nf;
    }
    // extract transversal representatives right to left
    std::vector<Syllable> syl(pieces.size());
    BaseElement h = identity_of(p->h);
    for (int q = static_cast<int>(pieces.size()) - 1; q >= 0; --q) {
        Factor f = pieces[q].factor;
        BaseElement y = base_op(pieces[q].element, p->embedding(f).apply(h));
        auto [h2, rep] = p->transversal(f).factor(y);
        if (rep.is_identity())
            throw std::logic_error("rightmost extraction produced a trivial syllable");
        syl[q] = {f, rep};
        h = h2;
    }
    nf.head = h;
    nf.syllables = std::move(syl);
    return nf;
}

NormalForm assemble_hnn(const PresentationPtr& p, std::vector<Piece> pieces) {
    bool changed = true;
    while (changed) {
        changed = false;
        // rightmost merge of adjacent factor elements
        for (int i = static_cast<int>(pieces.size()) - 2; i >= 0; --i) {
            if (!pieces[i].stable && !pieces[i + 1].stable) {
                pieces[i].element = base_op(pieces[i].element, pieces[i + 1].element);
                pieces.erase(pieces.begin() + i + 1);
                changed = true;
            }
        }
        if (changed) continue;
        // rightmost pinch t^e a t^-e with a in the matching subgroup image
        for (int i = static_cast<int>(pieces.size()) - 1; i >= 0; --i) {
            if (!pieces[i].stable) continue;
            int j = i + 1;
            bool has_mid = j < static_cast<int>(pieces.size()) && !pieces[j].stable;
            int k = has_mid ? j + 1 : j;
            if (k >= static_cast<int>(pieces.size()) || !pieces[k].stable) continue;
            if (pieces[k].t_sign != -pieces[i].t_sign) continue;
            BaseElement mid = has_mid ? pieces[j].element : identity_of(p->g1);
            const Transversal& tr = pieces[i].t_sign > 0 ? *p->t2 : *p->t1;
            if (!tr.in_subgroup(mid)) continue;
            auto [hm, rm] = tr.factor(mid);
            Piece repl;
            repl.stable = false;
            repl.factor = Factor::One;
            repl.element = pieces[i].t_sign > 0 ? p->i1.apply(hm) : p->i2.apply(hm);
            pieces.erase(pieces.begin() + i, pieces.begin() + k + 1);
            pieces.insert(pieces.begin() + i, repl);
            changed = true;
            break;
        }
    }
    // split into g0 and chunks, then extract representatives right to left
    NormalForm nf = nf_identity(p);
    std::size_t pos = 0;
    if (pos < pieces.size() && !pieces[pos].stable) {
        nf.g0 = pieces[pos].element;
        ++pos;
    }
    std::vector<HnnChunk> chunks;
    while (pos < pieces.size()) {
        int sign = pieces[pos].t_sign;
        ++pos;
        BaseElement content = identity_of(p->g1);
        if (pos < pieces.size() && !pieces[pos].stable) {
            content = pieces[pos].element;
            ++pos;
        }
        chunks.push_back({sign, content});
    }
    BaseElement h = identity_of(p->h);
    bool have_h = false;
    for (int q = static_cast<int>(chunks.size()) - 1; q >= 0; --q) {
        BaseElement content = chunks[q].rep;
        if (have_h) {
            // element emerging left of chunk q+1 joins this chunk's content
            BaseElement elem = chunks[q + 1].sign > 0 ? p->i1.apply(h) : p->i2.apply(h);
            content = base_op(content, elem);
        }
        const Transversal& tr = chunks[q].sign > 0 ? *p->t2 : *p->t1;
        auto [h2, rep] = tr.factor(content);
        chunks[q].rep = rep;
        h = h2;
        have_h = true;
    }
    if (have_h) {
        BaseElement elem = chunks[0].sign > 0 ? p->i1.apply(h) : p->i2.apply(h);
        nf.g0 = base_op(nf.g0, elem);
    }
    nf.chunks = std::move(chunks);
    return nf;
}

}  // namespace

NormalForm reduce_rightmost(const PresentationPtr& p, const std::string& word) {
    std::vector<Piece> pieces;
    for (const WordToken& t : parse_word(p, word)) {
        if (t.stable) {
            for (long long i = 0; i < t.t_count; ++i) {
                Piece q;
                q.stable = true;
                q.t_sign = t.t_sign;
                pieces.push_back(q);
            }
        } else {
            Piece q;
            q.factor = t.factor;
            q.element = t.element;
            pieces.push_back(q);
        }
    }
    if (p->kind == PresentationKind::Amalgam) return assemble_amalgam(p, std::move(pieces));
    return assemble_hnn(p, std::move(pieces));
}

// ---------------------------------------------------------------------------
// Printing, membership, coset keys

std::string nf_to_word(const NormalForm& nf) {
    const PresentationPtr& p = nf.pres;
    std::vector<std::string> parts;
    if (p->kind == PresentationKind::Amalgam) {
        if (!nf.head.is_identity()) parts.push_back(element_to_word(p->i1.apply(nf.head)));
        for (const Syllable& s : nf.syllables) parts.push_back(element_to_word(s.rep));
    } else {
        if (!nf.g0.is_identity()) parts.push_back(element_to_word(nf.g0));
        for (const HnnChunk& c : nf.chunks) {
            parts.push_back(c.sign > 0 ? p->stable_letter : p->stable_letter + "^-1");
            if (!c.rep.is_identity()) parts.push_back(element_to_word(c.rep));
        }
    }
    if (parts.empty()) return "1";
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ' ';
        out += parts[i];
    }
    return out;
}

bool nf_in_factor(const NormalForm& nf, Factor f) {
    if (nf.pres->kind == PresentationKind::Hnn) {
        if (f == Factor::Two) throw std::invalid_argument("HNN extensions have a single factor");
        return nf.chunks.empty();
    }
    if (nf.syllables.empty()) return true;
    return nf.syllables.size() == 1 && nf.syllables[0].factor == f;
}

bool nf_in_h(const NormalForm& nf) {
    if (nf.pres->kind == PresentationKind::Hnn)
        return nf.chunks.empty() && nf.pres->t1->in_subgroup(nf.g0);
    return nf.syllables.empty();
}

BaseElement nf_to_factor(const NormalForm& nf, Factor f) {
    const PresentationPtr& p = nf.pres;
    if (!nf_in_factor(nf, f)) throw std::invalid_argument("element is not in the factor");
    if (p->kind == PresentationKind::Hnn) return nf.g0;
    BaseElement r = p->embedding(f).apply(nf.head);
    if (!nf.syllables.empty()) r = base_op(r, nf.syllables[0].rep);
    return r;
}

BaseElement nf_to_h(const NormalForm& nf) {
    if (!nf_in_h(nf)) throw std::invalid_argument("element is not in H");
    if (nf.pres->kind == PresentationKind::Hnn) return nf.pres->t1->factor(nf.g0).first;
    return nf.head;
}

CosetKey coset_key(const NormalForm& g, CosetKind kind) {
    const PresentationPtr& p = g.pres;
    CosetKey key;
    key.kind = kind;
    if (p->kind == PresentationKind::Amalgam) {
        if (kind == CosetKind::H) {
            key.rep = g;
            key.rep.head = identity_of(p->h);
            return key;
        }
        Factor f = kind == CosetKind::G1 ? Factor::One : Factor::Two;
        key.rep = g;
        key.rep.head = identity_of(p->h);
        if (!key.rep.syllables.empty() && key.rep.syllables.front().factor == f)
            key.rep.syllables.erase(key.rep.syllables.begin());
        return key;
    }
    if (kind == CosetKind::G2)
        throw std::invalid_argument("G2 cosets only exist for amalgams");
    if (kind == CosetKind::G1) {
        key.rep = g;
        key.rep.g0 = identity_of(p->g1);
        return key;
    }
    key.rep = g;
    key.rep.g0 = p->t1->representative(g.g0);
    return key;
}

int coset_key_cmp(const CosetKey& a, const CosetKey& b) {
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind) ? -1 : 1;
    return nf_cmp(a.rep, b.rep);
}

std::string coset_key_to_string(const CosetKey& k) {
    const char* prefix = k.kind == CosetKind::G1 ? "G1|" : k.kind == CosetKind::G2 ? "G2|" : "H|";
    return prefix + nf_to_word(k.rep);
}

// ---------------------------------------------------------------------------
// Bounded enumeration

std::vector<NormalForm> word_ball(const PresentationPtr& p, int radius) {
    std::vector<std::pair<Factor, BaseElement>> letters;
    auto add_factor_letters = [&letters](const GroupPtr& g, Factor f) {
        switch (g->kind) {
            case GroupKind::Trivial: break;
            case GroupKind::Finite:
                for (std::size_t i = 1; i < g->finite_order(); ++i) {
                    BaseElement e = identity_of(g);
                    e.index = static_cast<int>(i);
                    letters.push_back({f, e});
                }
                break;
            case GroupKind::Free:
            case GroupKind::FreeAbelian:
                for (std::size_t i = 0; i < g->rank(); ++i) {
                    BaseElement e = identity_of(g);
                    if (g->kind == GroupKind::Free)
                        e.word.push(FreeWord::code(static_cast<int>(i), false));
                    else
                        e.exps[i] = 1;
                    letters.push_back({f, e});
                    letters.push_back({f, base_invert(e)});
                }
                break;
        }
    };
    add_factor_letters(p->g1, Factor::One);
    if (p->kind == PresentationKind::Amalgam) add_factor_letters(p->g2, Factor::Two);

    std::set<NormalForm, NfLess> seen;
    std::vector<NormalForm> frontier = {nf_identity(p)};
    seen.insert(frontier[0]);
    for (int step = 0; step < radius; ++step) {
        std::vector<NormalForm> next;
        for (const NormalForm& nf : frontier) {
            std::vector<NormalForm> images;
            for (const auto& [f, e] : letters) images.push_back(nf_mul_factor(nf, f, e));
            if (p->kind == PresentationKind::Hnn) {
                images.push_back(nf_mul_t(nf, 1));
                images.push_back(nf_mul_t(nf, -1));
            }
            for (auto& im : images) {
                if (seen.insert(im).second) next.push_back(im);
            }
        }
        frontier = std::move(next);
    }
    return std::vector<NormalForm>(seen.begin(), seen.end());
}

}  // namespace transv
