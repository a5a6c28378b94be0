#include "transv/groups.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace transv {

// ---------------------------------------------------------------------------
// FreeWord

void FreeWord::push(int c) {
    if (!letters.empty() && letters.back() == inverse_code(c))
        letters.pop_back();
    else
        letters.push_back(c);
}

FreeWord FreeWord::concat(const FreeWord& other) const {
    FreeWord r = *this;
    for (int c : other.letters) r.push(c);
    return r;
}

FreeWord FreeWord::inverse() const {
    FreeWord r;
    r.letters.reserve(letters.size());
    for (auto it = letters.rbegin(); it != letters.rend(); ++it)
        r.letters.push_back(inverse_code(*it));
    return r;
}

int FreeWord::cmp(const FreeWord& a, const FreeWord& b) {
    if (a.letters.size() != b.letters.size())
        return a.letters.size() < b.letters.size() ? -1 : 1;
    if (a.letters < b.letters) return -1;
    if (b.letters < a.letters) return 1;
    return 0;
}

// ---------------------------------------------------------------------------
// BaseGroup

GroupPtr BaseGroup::trivial(std::string name) {
    auto g = std::shared_ptr<BaseGroup>(new BaseGroup());
    g->kind = GroupKind::Trivial;
    g->name = std::move(name);
    return g;
}

GroupPtr BaseGroup::finite(std::string name, std::vector<std::string> element_names,
                           std::vector<std::vector<int>> table) {
    const std::size_t n = element_names.size();
    if (n == 0) throw std::invalid_argument("finite group needs at least the identity");
    if (table.size() != n)
        throw std::invalid_argument("multiplication table size mismatch");
    for (const auto& row : table) {
        if (row.size() != n) throw std::invalid_argument("multiplication table not square");
        for (int v : row)
            if (v < 0 || static_cast<std::size_t>(v) >= n)
                throw std::invalid_argument("multiplication table entry out of range");
    }
    // identity at index 0
    for (std::size_t i = 0; i < n; ++i)
        if (table[0][i] != static_cast<int>(i) || table[i][0] != static_cast<int>(i))
            throw std::invalid_argument("element 0 is not an identity");
    // associativity by full enumeration
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c)
                if (table[table[a][b]][c] != table[a][table[b][c]])
                    throw std::invalid_argument("multiplication table is not associative");
    std::vector<int> inv(n, -1);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b)
            if (table[a][b] == 0 && table[b][a] == 0) inv[a] = static_cast<int>(b);
        if (inv[a] < 0) throw std::invalid_argument("element without inverse");
    }
    auto g = std::shared_ptr<BaseGroup>(new BaseGroup());
    g->kind = GroupKind::Finite;
    g->name = std::move(name);
    g->symbols = std::move(element_names);
    g->table = std::move(table);
    g->inverse_table = std::move(inv);
    return g;
}

GroupPtr BaseGroup::free_group(std::string name, std::vector<std::string> generators) {
    auto g = std::shared_ptr<BaseGroup>(new BaseGroup());
    g->kind = GroupKind::Free;
    g->name = std::move(name);
    g->symbols = std::move(generators);
    return g;
}

GroupPtr BaseGroup::free_abelian(std::string name, std::vector<std::string> generators) {
    auto g = std::shared_ptr<BaseGroup>(new BaseGroup());
    g->kind = GroupKind::FreeAbelian;
    g->name = std::move(name);
    g->symbols = std::move(generators);
    return g;
}

// ---------------------------------------------------------------------------
// BaseElement

bool BaseElement::is_identity() const {
    switch (group->kind) {
        case GroupKind::Trivial: return true;
        case GroupKind::Finite: return index == 0;
        case GroupKind::Free: return word.empty();
        case GroupKind::FreeAbelian:
            return std::all_of(exps.begin(), exps.end(), [](long long e) { return e == 0; });
    }
    return true;
}

bool BaseElement::operator==(const BaseElement& o) const {
    if (group != o.group) return false;
    switch (group->kind) {
        case GroupKind::Trivial: return true;
        case GroupKind::Finite: return index == o.index;
        case GroupKind::Free: return word == o.word;
        case GroupKind::FreeAbelian: return exps == o.exps;
    }
    return false;
}

BaseElement identity_of(const GroupPtr& g) {
    BaseElement e;
    e.group = g;
    if (g->kind == GroupKind::FreeAbelian) e.exps.assign(g->rank(), 0);
    return e;
}

static void require_same_group(const BaseElement& a, const BaseElement& b) {
    if (a.group != b.group)
        throw std::invalid_argument("elements belong to different groups");
}

BaseElement base_op(const BaseElement& a, const BaseElement& b) {
    require_same_group(a, b);
    BaseElement r = identity_of(a.group);
    switch (a.group->kind) {
        case GroupKind::Trivial: break;
        case GroupKind::Finite: r.index = a.group->table[a.index][b.index]; break;
        case GroupKind::Free: r.word = a.word.concat(b.word); break;
        case GroupKind::FreeAbelian:
            for (std::size_t i = 0; i < r.exps.size(); ++i) r.exps[i] = a.exps[i] + b.exps[i];
            break;
    }
    return r;
}

BaseElement base_invert(const BaseElement& a) {
    BaseElement r = identity_of(a.group);
    switch (a.group->kind) {
        case GroupKind::Trivial: break;
        case GroupKind::Finite: r.index = a.group->inverse_table[a.index]; break;
        case GroupKind::Free: r.word = a.word.inverse(); break;
        case GroupKind::FreeAbelian:
            for (std::size_t i = 0; i < r.exps.size(); ++i) r.exps[i] = -a.exps[i];
            break;
    }
    return r;
}

BaseElement base_pow(const BaseElement& a, long long k) {
    BaseElement base = k < 0 ? base_invert(a) : a;
    long long reps = std::llabs(k);
    BaseElement r = identity_of(a.group);
    for (long long i = 0; i < reps; ++i) r = base_op(r, base);
    return r;
}

int base_cmp(const BaseElement& a, const BaseElement& b) {
    require_same_group(a, b);
    switch (a.group->kind) {
        case GroupKind::Trivial: return 0;
        case GroupKind::Finite: return a.index < b.index ? -1 : (a.index > b.index ? 1 : 0);
        case GroupKind::Free: return FreeWord::cmp(a.word, b.word);
        case GroupKind::FreeAbelian:
            if (a.exps < b.exps) return -1;
            if (b.exps < a.exps) return 1;
            return 0;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Word syntax

namespace {

struct Token {
    std::string symbol;
    long long exponent;
};

std::vector<Token> tokenize(const std::string& word) {
    std::vector<Token> out;
    std::istringstream in(word);
    std::string tok;
    while (in >> tok) {
        if (tok == "1") continue;
        long long exp = 1;
        auto caret = tok.find('^');
        std::string sym = tok;
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
        out.push_back({sym, exp});
    }
    return out;
}

int symbol_index(const GroupPtr& g, const std::string& sym) {
    for (std::size_t i = 0; i < g->symbols.size(); ++i)
        if (g->symbols[i] == sym) return static_cast<int>(i);
    throw std::invalid_argument("unknown symbol '" + sym + "' in group " + g->name);
}

}  // namespace

BaseElement parse_element(const GroupPtr& g, const std::string& word) {
    BaseElement r = identity_of(g);
    for (const Token& t : tokenize(word)) {
        switch (g->kind) {
            case GroupKind::Trivial:
                throw std::invalid_argument("unknown symbol '" + t.symbol +
                                            "' in trivial group " + g->name);
            case GroupKind::Finite: {
                int idx = symbol_index(g, t.symbol);
                BaseElement e = identity_of(g);
                e.index = idx;
                r = base_op(r, base_pow(e, t.exponent));
                break;
            }
            case GroupKind::Free: {
                int gen = symbol_index(g, t.symbol);
                bool inv = t.exponent < 0;
                long long reps = std::llabs(t.exponent);
                for (long long i = 0; i < reps; ++i)
                    r.word.push(FreeWord::code(gen, inv));
                break;
            }
            case GroupKind::FreeAbelian: {
                int gen = symbol_index(g, t.symbol);
                r.exps[gen] += t.exponent;
                break;
            }
        }
    }
    return r;
}

std::string element_to_word(const BaseElement& e) {
    const GroupPtr& g = e.group;
    std::ostringstream out;
    switch (g->kind) {
        case GroupKind::Trivial: return "1";
        case GroupKind::Finite:
            if (e.index == 0) return g->symbols[0];
            return g->symbols[e.index];
        case GroupKind::Free: {
            if (e.word.empty()) return "1";
            bool first = true;
            std::size_t i = 0;
            const auto& ls = e.word.letters;
            while (i < ls.size()) {
                std::size_t j = i;
                while (j < ls.size() && ls[j] == ls[i]) ++j;
                long long exp = static_cast<long long>(j - i);
                if (FreeWord::is_inverse(ls[i])) exp = -exp;
                if (!first) out << ' ';
                first = false;
                out << g->symbols[FreeWord::gen_of(ls[i])];
                if (exp != 1) out << '^' << exp;
                i = j;
            }
            return out.str();
        }
        case GroupKind::FreeAbelian: {
            bool first = true;
            for (std::size_t i = 0; i < e.exps.size(); ++i) {
                if (e.exps[i] == 0) continue;
                if (!first) out << ' ';
                first = false;
                out << g->symbols[i];
                if (e.exps[i] != 1) out << '^' << e.exps[i];
            }
            if (first) return "1";
            return out.str();
        }
    }
    return "1";
}

// ---------------------------------------------------------------------------
// Homomorphism

BaseElement Homomorphism::apply(const BaseElement& g) const {
    if (g.group != source)
        throw std::invalid_argument("element is not in the source of the homomorphism");
    switch (source->kind) {
        case GroupKind::Trivial: return identity_of(target);
        case GroupKind::Finite: return images[g.index];
        case GroupKind::Free: {
            BaseElement r = identity_of(target);
            for (int c : g.word.letters) {
                const BaseElement& im = images[FreeWord::gen_of(c)];
                r = base_op(r, FreeWord::is_inverse(c) ? base_invert(im) : im);
            }
            return r;
        }
        case GroupKind::FreeAbelian: {
            BaseElement r = identity_of(target);
            for (std::size_t i = 0; i < g.exps.size(); ++i)
                if (g.exps[i] != 0) r = base_op(r, base_pow(images[i], g.exps[i]));
            return r;
        }
    }
    return identity_of(target);
}

Homomorphism make_hom(const GroupPtr& source, const GroupPtr& target,
                      std::vector<BaseElement> generator_images, bool assert_injective) {
    Homomorphism f;
    f.source = source;
    f.target = target;
    std::size_t expected = 0;
    switch (source->kind) {
        case GroupKind::Trivial: expected = 0; break;
        case GroupKind::Finite: expected = source->finite_order(); break;
        case GroupKind::Free:
        case GroupKind::FreeAbelian: expected = source->rank(); break;
    }
    if (generator_images.size() != expected)
        throw std::invalid_argument("wrong number of generator images");
    for (const auto& im : generator_images)
        if (im.group != target)
            throw std::invalid_argument("generator image lies outside the target group");
    f.images = std::move(generator_images);

    if (source->kind == GroupKind::Finite) {
        if (!f.images.empty() && !f.images[0].is_identity())
            throw std::invalid_argument("homomorphism does not preserve the identity");
        const auto& tbl = source->table;
        for (std::size_t a = 0; a < tbl.size(); ++a)
            for (std::size_t b = 0; b < tbl.size(); ++b)
                if (!(base_op(f.images[a], f.images[b]) == f.images[tbl[a][b]]))
                    throw std::invalid_argument("images do not respect the multiplication table");
        bool injective = true;
        for (std::size_t a = 1; a < tbl.size(); ++a)
            if (f.images[a].is_identity()) injective = false;
        if (injective)
            f.injectivity = Homomorphism::Injectivity::Verified;
        else if (assert_injective)
            throw std::invalid_argument("homomorphism asserted injective but has nontrivial kernel");
    } else if (source->kind == GroupKind::FreeAbelian) {
        for (std::size_t i = 0; i < f.images.size(); ++i)
            for (std::size_t j = i + 1; j < f.images.size(); ++j)
                if (!(base_op(f.images[i], f.images[j]) == base_op(f.images[j], f.images[i])))
                    throw std::invalid_argument(
                        "images of free-abelian generators must commute");
    }
    if (source->kind == GroupKind::Trivial)
        f.injectivity = Homomorphism::Injectivity::Verified;
    return f;
}

Homomorphism identity_hom(const GroupPtr& g) {
    std::vector<BaseElement> images;
    switch (g->kind) {
        case GroupKind::Trivial: break;
        case GroupKind::Finite:
            for (std::size_t i = 0; i < g->finite_order(); ++i) {
                BaseElement e = identity_of(g);
                e.index = static_cast<int>(i);
                images.push_back(e);
            }
            break;
        case GroupKind::Free:
            for (std::size_t i = 0; i < g->rank(); ++i) {
                BaseElement e = identity_of(g);
                e.word.push(FreeWord::code(static_cast<int>(i), false));
                images.push_back(e);
            }
            break;
        case GroupKind::FreeAbelian:
            for (std::size_t i = 0; i < g->rank(); ++i) {
                BaseElement e = identity_of(g);
                e.exps[i] = 1;
                images.push_back(e);
            }
            break;
    }
    return make_hom(g, g, std::move(images), true);
}

// ---------------------------------------------------------------------------
// Stallings folding

namespace detail {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
    }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

CoreGraph fold_subgroup(std::size_t ambient_rank, const std::vector<FreeWord>& generators) {
    // Build petals on a wedge, then fold until edge-deterministic.
    // Edges stored both ways: adding letter c from u to v also adds c^-1 from v to u.
    std::vector<std::multimap<int, int>> raw;
    raw.emplace_back();  // base
    auto add_edge = [&raw](int u, int c, int v) {
        raw[u].emplace(c, v);
        raw[v].emplace(FreeWord::inverse_code(c), u);
    };
    for (const FreeWord& w : generators) {
        if (w.empty()) continue;
        int cur = 0;
        for (std::size_t i = 0; i < w.letters.size(); ++i) {
            int next;
            if (i + 1 == w.letters.size()) {
                next = 0;
            } else {
                raw.emplace_back();
                next = static_cast<int>(raw.size()) - 1;
            }
            add_edge(cur, w.letters[i], next);
            cur = next;
        }
    }

    UnionFind uf(raw.size());
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t v = 0; v < raw.size(); ++v) {
            if (uf.find(static_cast<int>(v)) != static_cast<int>(v)) continue;
            // collect edges of the class representative
            std::map<int, int> first_target;
            for (std::size_t u = 0; u < raw.size(); ++u) {
                if (uf.find(static_cast<int>(u)) != static_cast<int>(v)) continue;
                for (const auto& [c, t] : raw[u]) {
                    int tt = uf.find(t);
                    auto it = first_target.find(c);
                    if (it == first_target.end()) {
                        first_target[c] = tt;
                    } else if (it->second != tt) {
                        uf.unite(it->second, tt);
                        changed = true;
                    }
                }
            }
        }
    }

    // compact
    std::vector<int> label(raw.size(), -1);
    int base_root = uf.find(0);
    label[base_root] = 0;
    int next_label = 1;
    for (std::size_t v = 0; v < raw.size(); ++v) {
        int r = uf.find(static_cast<int>(v));
        if (label[r] < 0) label[r] = next_label++;
    }
    CoreGraph g;
    g.adj.assign(next_label, {});
    for (std::size_t u = 0; u < raw.size(); ++u)
        for (const auto& [c, t] : raw[u])
            g.adj[label[uf.find(static_cast<int>(u))]][c] = label[uf.find(t)];

    (void)ambient_rank;

    // BFS tree from base, then the non-tree edges give the subgroup basis.
    g.parent_vertex.assign(next_label, -1);
    g.parent_letter.assign(next_label, -1);
    g.tree_word.assign(next_label, {});
    std::vector<bool> seen(next_label, false);
    std::vector<int> queue = {0};
    seen[0] = true;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        int v = queue[qi];
        for (const auto& [c, t] : g.adj[v]) {
            if (seen[t]) continue;
            seen[t] = true;
            g.parent_vertex[t] = v;
            g.parent_letter[t] = c;
            g.tree_word[t] = g.tree_word[v];
            g.tree_word[t].letters.push_back(c);
            queue.push_back(t);
        }
    }

    std::map<std::pair<int, int>, bool> is_tree;
    for (int v = 0; v < next_label; ++v) {
        if (g.parent_vertex[v] < 0) continue;
        is_tree[{g.parent_vertex[v], g.parent_letter[v]}] = true;
        is_tree[{v, FreeWord::inverse_code(g.parent_letter[v])}] = true;
    }
    for (int v = 0; v < next_label; ++v) {
        for (const auto& [c, t] : g.adj[v]) {
            if (is_tree.count({v, c})) continue;
            auto rev = std::make_pair(t, FreeWord::inverse_code(c));
            if (g.basis_lookup.count({v, c})) continue;
            int idx = static_cast<int>(g.basis.size());
            g.basis.push_back({v, c, t});
            g.basis_lookup[{v, c}] = {idx, +1};
            if (std::make_pair(v, c) != rev) g.basis_lookup[rev] = {idx, -1};
        }
    }
    return g;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Transversal

namespace {

// Shortlex-minimal reduced words from the base vertex to every (vertex,
// last-letter) state of a folded graph. last = -1 encodes the empty word.
struct ReducedBfs {
    std::map<std::pair<int, int>, FreeWord> best;

    explicit ReducedBfs(const detail::CoreGraph& g) {
        best[{0, -1}] = FreeWord{};
        std::map<std::pair<int, int>, FreeWord> frontier = best;
        while (!frontier.empty()) {
            std::map<std::pair<int, int>, FreeWord> next;
            for (const auto& [state, word] : frontier) {
                auto [v, last] = state;
                for (const auto& [c, t] : g.adj[v]) {
                    if (last >= 0 && c == FreeWord::inverse_code(last)) continue;
                    auto key = std::make_pair(t, c);
                    if (best.count(key)) continue;
                    FreeWord w = word;
                    w.letters.push_back(c);
                    auto it = next.find(key);
                    if (it == next.end() || FreeWord::cmp(w, it->second) < 0) next[key] = w;
                }
            }
            best.insert(next.begin(), next.end());
            frontier = std::move(next);
        }
    }

    // minimal word reaching `vertex`; a nonnegative `banned_last` excludes
    // words ending in that letter (used when a tail continues the word)
    std::optional<FreeWord> to_vertex(int vertex, int banned_last) const {
        std::optional<FreeWord> r;
        for (const auto& [state, word] : best) {
            if (state.first != vertex) continue;
            if (banned_last >= 0 && state.second == banned_last) continue;
            if (!r || FreeWord::cmp(word, *r) < 0) r = word;
        }
        return r;
    }
};

FreeWord substitute_basis(const FreeWord& basis_word,
                          const std::vector<FreeWord>& basis_in_source) {
    FreeWord out;
    for (int c : basis_word.letters) {
        const FreeWord& w = basis_in_source[FreeWord::gen_of(c)];
        if (FreeWord::is_inverse(c))
            out = out.concat(w.inverse());
        else
            out = out.concat(w);
    }
    return out;
}

}  // namespace

Transversal::Transversal(Homomorphism embedding) : emb_(std::move(embedding)) {
    const GroupPtr& tgt = emb_.target;
    const GroupPtr& src = emb_.source;

    bool src_infinite = (src->kind == GroupKind::Free || src->kind == GroupKind::FreeAbelian) &&
                        src->rank() > 0;
    if (tgt->kind == GroupKind::Finite && src_infinite)
        throw std::invalid_argument("no injection of an infinite group into a finite group");

    switch (tgt->kind) {
        case GroupKind::Trivial:
            break;
        case GroupKind::Finite: {
            std::size_t n = tgt->finite_order();
            std::vector<bool> in_sub(n, false);
            in_sub[0] = true;
            // orbit closure of generator images under multiplication
            std::vector<int> stack = {0};
            std::vector<int> gens;
            for (const auto& im : emb_.images)
                gens.push_back(im.index);
            while (!stack.empty()) {
                int a = stack.back();
                stack.pop_back();
                for (int b : gens) {
                    int p = tgt->table[a][b];
                    if (!in_sub[p]) {
                        in_sub[p] = true;
                        stack.push_back(p);
                    }
                }
            }
            for (std::size_t i = 0; i < n; ++i)
                if (in_sub[i]) subgroup_elems_.push_back(static_cast<int>(i));
            if (src->kind == GroupKind::Finite && subgroup_elems_.size() != src->finite_order())
                throw std::invalid_argument("embedding is not injective");
            coset_rep_.assign(n, -1);
            for (std::size_t gidx = 0; gidx < n; ++gidx) {
                int best = static_cast<int>(n);
                for (int s : subgroup_elems_) best = std::min(best, tgt->table[s][gidx]);
                coset_rep_[gidx] = best;
            }
            break;
        }
        case GroupKind::Free: {
            std::vector<FreeWord> gen_words;
            for (std::size_t i = 0; i < emb_.images.size(); ++i) {
                BaseElement im = emb_.apply([&] {
                    BaseElement z = identity_of(src);
                    if (src->kind == GroupKind::Free)
                        z.word.push(FreeWord::code(static_cast<int>(i), false));
                    else if (src->kind == GroupKind::FreeAbelian)
                        z.exps[i] = 1;
                    else if (src->kind == GroupKind::Finite)
                        z.index = static_cast<int>(i);
                    return z;
                }());
                gen_words.push_back(im.word);
            }
            if (src->kind == GroupKind::Finite && src->finite_order() > 1)
                throw std::invalid_argument("free groups are torsion-free");
            graph_ = detail::fold_subgroup(tgt->rank(), gen_words);

            std::size_t source_rank =
                (src->kind == GroupKind::Free || src->kind == GroupKind::FreeAbelian)
                    ? src->rank()
                    : 0;
            if (graph_.basis.size() != source_rank)
                throw std::invalid_argument(
                    "embedding is not injective: subgroup rank differs from source rank");
            if (src->kind == GroupKind::FreeAbelian && source_rank > 1)
                throw std::invalid_argument(
                    "free-abelian group of rank > 1 does not embed in a free group");

            if (source_rank > 0) {
                // Express the graph basis in terms of the source generators:
                // Nielsen-reduce the tuple of generator images written in the
                // graph basis, tracking the same moves on source letters.
                std::vector<FreeWord> w(source_rank), p(source_rank);
                for (std::size_t j = 0; j < source_rank; ++j) {
                    // trace image word, recording basis crossings
                    FreeWord expr;
                    int v = 0;
                    for (int c : gen_words[j].letters) {
                        auto it = graph_.adj[v].find(c);
                        if (it == graph_.adj[v].end())
                            throw std::logic_error("image word leaves its own core graph");
                        auto bl = graph_.basis_lookup.find({v, c});
                        if (bl != graph_.basis_lookup.end())
                            expr.push(FreeWord::code(bl->second.first, bl->second.second < 0));
                        v = it->second;
                    }
                    if (v != 0) throw std::logic_error("image word is not closed");
                    w[j] = expr;
                    p[j].push(FreeWord::code(static_cast<int>(j), false));
                }
                bool moved = true;
                int guard = 0;
                while (moved && guard++ < 10000) {
                    moved = false;
                    for (std::size_t i = 0; i < w.size() && !moved; ++i) {
                        if (w[i].empty())
                            throw std::invalid_argument("embedding is not injective");
                        for (std::size_t j = 0; j < w.size() && !moved; ++j) {
                            if (i == j) continue;
                            const FreeWord cands[4] = {
                                w[i].concat(w[j]), w[i].concat(w[j].inverse()),
                                w[j].concat(w[i]), w[j].inverse().concat(w[i])};
                            const FreeWord pcands[4] = {
                                p[i].concat(p[j]), p[i].concat(p[j].inverse()),
                                p[j].concat(p[i]), p[j].inverse().concat(p[i])};
                            for (int k = 0; k < 4; ++k) {
                                if (cands[k].letters.size() < w[i].letters.size()) {
                                    w[i] = cands[k];
                                    p[i] = pcands[k];
                                    moved = true;
                                    break;
                                }
                            }
                        }
                    }
                }
                basis_in_source_.assign(graph_.basis.size(), {});
                std::vector<bool> covered(graph_.basis.size(), false);
                for (std::size_t i = 0; i < w.size(); ++i) {
                    if (w[i].letters.size() != 1)
                        throw std::invalid_argument(
                            "cannot invert the embedding onto its image; "
                            "injectivity assertion is unverifiable here");
                    int c = w[i].letters[0];
                    int b = FreeWord::gen_of(c);
                    if (covered[b]) throw std::invalid_argument("embedding is not injective");
                    covered[b] = true;
                    basis_in_source_[b] = FreeWord::is_inverse(c) ? p[i].inverse() : p[i];
                }
            }
            break;
        }
        case GroupKind::FreeAbelian: {
            if (src->kind == GroupKind::Free && src->rank() > 1)
                throw std::invalid_argument(
                    "free group of rank > 1 does not embed in a free-abelian group");
            const std::size_t n = tgt->rank();
            std::vector<std::vector<Int>> m;
            for (const auto& im : emb_.images) {
                std::vector<Int> row(n);
                for (std::size_t c = 0; c < n; ++c) row[c] = int_from(im.exps[c]);
                m.push_back(std::move(row));
            }
            if (src->kind == GroupKind::Finite && src->finite_order() > 1)
                throw std::invalid_argument("free-abelian groups are torsion-free");
            const std::size_t rows = m.size();
            hnf_ = m;
            hnf_u_.assign(rows, std::vector<Int>(rows, 0));
            for (std::size_t i = 0; i < rows; ++i) hnf_u_[i][i] = 1;
            std::size_t r = 0;
            for (std::size_t col = 0; col < n && r < rows; ++col) {
                while (true) {
                    std::size_t piv = rows;
                    for (std::size_t i = r; i < rows; ++i) {
                        if (hnf_[i][col] == 0) continue;
                        if (piv == rows || abs(hnf_[i][col]) < abs(hnf_[piv][col])) piv = i;
                    }
                    if (piv == rows) break;
                    std::swap(hnf_[r], hnf_[piv]);
                    std::swap(hnf_u_[r], hnf_u_[piv]);
                    bool others = false;
                    for (std::size_t i = r + 1; i < rows; ++i) {
                        if (hnf_[i][col] == 0) continue;
                        Int q = int_fdiv_q(hnf_[i][col], hnf_[r][col]);
                        for (std::size_t c = 0; c < n; ++c) hnf_[i][c] -= q * hnf_[r][c];
                        for (std::size_t c = 0; c < rows; ++c) hnf_u_[i][c] -= q * hnf_u_[r][c];
                        if (hnf_[i][col] != 0) others = true;
                    }
                    if (!others) break;
                }
                if (hnf_[r][col] == 0) continue;
                if (hnf_[r][col] < 0) {
                    for (std::size_t c = 0; c < n; ++c) hnf_[r][c] = -hnf_[r][c];
                    for (std::size_t c = 0; c < rows; ++c) hnf_u_[r][c] = -hnf_u_[r][c];
                }
                for (std::size_t i = 0; i < r; ++i) {
                    Int q = int_fdiv_q(hnf_[i][col], hnf_[r][col]);
                    if (q == 0) continue;
                    for (std::size_t c = 0; c < n; ++c) hnf_[i][c] -= q * hnf_[r][c];
                    for (std::size_t c = 0; c < rows; ++c) hnf_u_[i][c] -= q * hnf_u_[r][c];
                }
                pivot_col_.push_back(static_cast<int>(col));
                ++r;
            }
            hnf_.resize(r);
            hnf_u_.resize(r);
            std::size_t source_rank = src->kind == GroupKind::FreeAbelian ? src->rank()
                                      : src->kind == GroupKind::Free      ? src->rank()
                                                                          : 0;
            if (r != source_rank)
                throw std::invalid_argument(
                    "embedding is not injective: image lattice rank differs from source rank");
            break;
        }
    }
}

BaseElement Transversal::rep_free(const BaseElement& g) const {
    const detail::CoreGraph& gr = graph_;
    int v = 0;
    std::size_t pos = 0;
    const auto& ls = g.word.letters;
    while (pos < ls.size()) {
        auto it = gr.adj[v].find(ls[pos]);
        if (it == gr.adj[v].end()) break;
        v = it->second;
        ++pos;
    }
    ReducedBfs bfs(gr);
    BaseElement r = identity_of(emb_.target);
    if (pos == ls.size()) {
        auto w = bfs.to_vertex(v, -1);
        r.word = *w;
        return r;
    }
    // left the core: the coset hangs on a fresh tail spelling the suffix
    int banned = FreeWord::inverse_code(ls[pos]);
    auto head = bfs.to_vertex(v, banned);
    r.word = *head;
    for (std::size_t i = pos; i < ls.size(); ++i) r.word.letters.push_back(ls[i]);
    return r;
}

BaseElement Transversal::preimage(const BaseElement& u) const {
    const GroupPtr& src = emb_.source;
    switch (emb_.target->kind) {
        case GroupKind::Trivial: return identity_of(src);
        case GroupKind::Finite: {
            switch (src->kind) {
                case GroupKind::Trivial: return identity_of(src);
                case GroupKind::Finite: {
                    for (std::size_t i = 0; i < src->finite_order(); ++i)
                        if (emb_.images[i] == u) {
                            BaseElement h = identity_of(src);
                            h.index = static_cast<int>(i);
                            return h;
                        }
                    throw std::logic_error("element not in subgroup image");
                }
                default: return identity_of(src);
            }
        }
        case GroupKind::Free: {
            if (basis_in_source_.empty()) {
                if (!u.is_identity()) throw std::logic_error("element not in subgroup image");
                return identity_of(src);
            }
            // write u in the graph basis, then substitute source expressions
            FreeWord expr;
            int v = 0;
            for (int c : u.word.letters) {
                auto it = graph_.adj[v].find(c);
                if (it == graph_.adj[v].end())
                    throw std::logic_error("element not in subgroup image");
                auto bl = graph_.basis_lookup.find({v, c});
                if (bl != graph_.basis_lookup.end())
                    expr.push(FreeWord::code(bl->second.first, bl->second.second < 0));
                v = it->second;
            }
            if (v != 0) throw std::logic_error("element not in subgroup image");
            FreeWord srcw = substitute_basis(expr, basis_in_source_);
            BaseElement h = identity_of(src);
            if (src->kind == GroupKind::Free) {
                h.word = srcw;
            } else if (src->kind == GroupKind::FreeAbelian) {
                for (int c : srcw.letters)
                    h.exps[FreeWord::gen_of(c)] += FreeWord::is_inverse(c) ? -1 : 1;
            }
            return h;
        }
        case GroupKind::FreeAbelian: {
            const std::size_t n = emb_.target->rank();
            std::vector<Int> d(n);
            for (std::size_t c = 0; c < n; ++c) d[c] = int_from(u.exps[c]);
            std::vector<Int> y(hnf_.size(), 0);
            for (std::size_t i = 0; i < hnf_.size(); ++i) {
                Int q = int_divexact(d[pivot_col_[i]], hnf_[i][pivot_col_[i]]);
                y[i] = q;
                for (std::size_t c = 0; c < n; ++c) d[c] -= q * hnf_[i][c];
            }
            for (std::size_t c = 0; c < n; ++c)
                if (d[c] != 0) throw std::logic_error("element not in subgroup image");
            BaseElement h = identity_of(src);
            std::size_t m = hnf_u_.empty() ? 0 : hnf_u_[0].size();
            for (std::size_t j = 0; j < m; ++j) {
                Int a = 0;
                for (std::size_t i = 0; i < y.size(); ++i) a += y[i] * hnf_u_[i][j];
                if (!a.fits_slong_p()) throw std::overflow_error("exponent too large");
                if (src->kind == GroupKind::FreeAbelian) h.exps[j] = a.get_si();
                else if (src->kind == GroupKind::Free) {
                    // rank-1 free source embedded in an abelian group
                    long long k = a.get_si();
                    bool inv = k < 0;
                    for (long long t = 0; t < std::llabs(k); ++t)
                        h.word.push(FreeWord::code(static_cast<int>(j), inv));
                }
            }
            return h;
        }
    }
    return identity_of(src);
}

BaseElement Transversal::representative(const BaseElement& g) const {
    if (g.group != emb_.target)
        throw std::invalid_argument("element is not in the ambient group of the transversal");
    switch (emb_.target->kind) {
        case GroupKind::Trivial: return identity_of(emb_.target);
        case GroupKind::Finite: {
            BaseElement r = identity_of(emb_.target);
            r.index = coset_rep_[g.index];
            return r;
        }
        case GroupKind::Free: return rep_free(g);
        case GroupKind::FreeAbelian: {
            const std::size_t n = emb_.target->rank();
            std::vector<Int> v(n);
            for (std::size_t c = 0; c < n; ++c) v[c] = int_from(g.exps[c]);
            for (std::size_t i = 0; i < hnf_.size(); ++i) {
                Int q = int_fdiv_q(v[pivot_col_[i]], hnf_[i][pivot_col_[i]]);
                if (q == 0) continue;
                for (std::size_t c = 0; c < n; ++c) v[c] -= q * hnf_[i][c];
            }
            BaseElement r = identity_of(emb_.target);
            for (std::size_t c = 0; c < n; ++c) {
                if (!v[c].fits_slong_p()) throw std::overflow_error("exponent too large");
                r.exps[c] = v[c].get_si();
            }
            return r;
        }
    }
    return identity_of(emb_.target);
}

std::pair<BaseElement, BaseElement> Transversal::factor(const BaseElement& g) const {
    BaseElement r = representative(g);
    BaseElement u = base_op(g, base_invert(r));
    return {preimage(u), r};
}

bool Transversal::in_subgroup(const BaseElement& g) const {
    return representative(g).is_identity();
}

std::optional<long long> Transversal::index() const {
    switch (emb_.target->kind) {
        case GroupKind::Trivial: return 1;
        case GroupKind::Finite:
            return static_cast<long long>(emb_.target->finite_order() / subgroup_elems_.size());
        case GroupKind::Free: {
            if (emb_.target->rank() == 0) return 1;
            for (const auto& m : graph_.adj)
                if (m.size() != 2 * emb_.target->rank()) return std::nullopt;
            return static_cast<long long>(graph_.adj.size());
        }
        case GroupKind::FreeAbelian: {
            if (hnf_.size() != emb_.target->rank()) {
                if (emb_.target->rank() == 0) return 1;
                return std::nullopt;
            }
            Int det = 1;
            for (std::size_t i = 0; i < hnf_.size(); ++i) det *= hnf_[i][pivot_col_[i]];
            if (!det.fits_slong_p()) return std::nullopt;
            return det.get_si();
        }
    }
    return std::nullopt;
}

std::vector<BaseElement> Transversal::representatives() const {
    auto idx = index();
    if (!idx) throw std::invalid_argument("subgroup has infinite index");
    std::vector<BaseElement> out;
    switch (emb_.target->kind) {
        case GroupKind::Trivial: out.push_back(identity_of(emb_.target)); break;
        case GroupKind::Finite: {
            std::vector<bool> seen(emb_.target->finite_order(), false);
            for (std::size_t gi = 0; gi < emb_.target->finite_order(); ++gi) {
                int r = coset_rep_[gi];
                if (!seen[r]) {
                    seen[r] = true;
                    BaseElement e = identity_of(emb_.target);
                    e.index = r;
                    out.push_back(e);
                }
            }
            break;
        }
        case GroupKind::Free: {
            ReducedBfs bfs(graph_);
            for (std::size_t v = 0; v < graph_.adj.size(); ++v) {
                BaseElement e = identity_of(emb_.target);
                e.word = *bfs.to_vertex(static_cast<int>(v), -1);
                out.push_back(e);
            }
            break;
        }
        case GroupKind::FreeAbelian: {
            const std::size_t n = emb_.target->rank();
            std::vector<long long> bounds(n, 1);
            for (std::size_t i = 0; i < hnf_.size(); ++i)
                bounds[pivot_col_[i]] = hnf_[i][pivot_col_[i]].get_si();
            std::vector<long long> cur(n, 0);
            while (true) {
                BaseElement e = identity_of(emb_.target);
                e.exps = cur;
                out.push_back(representative(e));
                std::size_t c = 0;
                while (c < n) {
                    if (++cur[c] < bounds[c]) break;
                    cur[c] = 0;
                    ++c;
                }
                if (c == n) break;
            }
            break;
        }
    }
    return out;
}

}  // namespace transv
