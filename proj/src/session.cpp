#include "transv/session.hpp"

#include <fstream>
#include <sstream>

namespace transv {

// ---------------------------------------------------------------------------
// Small JSON helpers

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw std::invalid_argument(where + ": " + what);
}

const Json& need(const Json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) fail(where, "missing key '" + key + "'");
    return j.at(key);
}

std::string need_string(const Json& j, const std::string& key, const std::string& where) {
    const Json& v = need(j, key, where);
    if (!v.is_string()) fail(where + "." + key, "expected a string");
    return v.get<std::string>();
}

Json int_to_json(const Int& v) {
    if (v.fits_slong_p()) return Json(v.get_si());
    return Json(v.get_str());
}

Int int_from_json(const Json& j, const std::string& where) {
    if (j.is_number_integer()) return int_from(j.get<long long>());
    if (j.is_string()) return Int(j.get<std::string>());
    fail(where, "expected an integer");
}

}  // namespace

// ---------------------------------------------------------------------------
// Element / matrix / complex serialization

Json ring_element_to_json(const RingElement& x) {
    Json out = Json::array();
    for (const auto& [g, c] : x.terms) {
        Json term = Json::array();
        term.push_back(int_to_json(c));
        term.push_back(nf_to_word(g));
        out.push_back(std::move(term));
    }
    return out;
}

RingElement ring_element_from_json(const PresentationPtr& p, RingTag tag, const Json& j) {
    if (!j.is_array()) fail("ring element", "expected an array of [coeff, word] pairs");
    RingElement x = ring_zero(p, tag);
    for (const Json& term : j) {
        if (!term.is_array() || term.size() != 2) fail("ring element", "bad term");
        Int c = int_from_json(term[0], "ring element coefficient");
        NormalForm g = reduce(p, term[1].get<std::string>());
        x = ring_add(x, ring_term(p, tag, c, g));
    }
    return x;
}

Json matrix_to_json(const RingMatrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows; ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols; ++j) row.push_back(ring_element_to_json(m.at(i, j)));
        rows.push_back(std::move(row));
    }
    Json out;
    out["rows"] = m.rows;
    out["cols"] = m.cols;
    out["entries"] = std::move(rows);
    return out;
}

namespace {

RingMatrix matrix_from_json(const PresentationPtr& p, RingTag tag, const Json& j,
                            const std::string& where) {
    RingMatrix m(p, tag, need(j, "rows", where).get<std::size_t>(),
                 need(j, "cols", where).get<std::size_t>());
    const Json& rows = need(j, "entries", where);
    if (rows.size() != m.rows) fail(where, "row count mismatch");
    for (std::size_t i = 0; i < m.rows; ++i) {
        if (rows[i].size() != m.cols) fail(where, "column count mismatch");
        for (std::size_t c = 0; c < m.cols; ++c)
            m.at(i, c) = ring_element_from_json(p, tag, rows[i][c]);
    }
    return m;
}

}  // namespace

Json complex_to_json(const ChainComplex& c) {
    Json out;
    out["ring"] = ring_tag_name(c.tag);
    out["ranks"] = c.ranks;
    Json diffs = Json::array();
    for (int r = 1; r <= c.top(); ++r) diffs.push_back(matrix_to_json(c.diff_at(r)));
    out["differentials"] = std::move(diffs);
    return out;
}

namespace {

RingTag tag_from_name(const std::string& name) {
    if (name == "Z[G]") return RingTag::G;
    if (name == "Z[G1]") return RingTag::G1;
    if (name == "Z[G2]") return RingTag::G2;
    if (name == "Z[H]") return RingTag::H;
    fail("ring", "unknown ring tag " + name);
}

}  // namespace

ChainComplex complex_from_json(const PresentationPtr& p, RingTag tag, const Json& j) {
    if (j.contains("ring")) tag = tag_from_name(j.at("ring").get<std::string>());
    std::vector<std::size_t> ranks = need(j, "ranks", "complex").get<std::vector<std::size_t>>();
    std::vector<RingMatrix> diffs;
    const Json& dl = need(j, "differentials", "complex");
    for (std::size_t r = 0; r < dl.size(); ++r) {
        const Json& dj = dl[r];
        if (dj.is_object()) {
            diffs.push_back(matrix_from_json(p, tag, dj, "differential"));
        } else {
            // compact form: array of rows of entries
            std::size_t rows = r + 1 < ranks.size() ? ranks[r + 1] : 0;
            std::size_t cols = ranks[r];
            RingMatrix m(p, tag, rows, cols);
            if (dj.size() != rows) fail("differential", "row count mismatch");
            for (std::size_t i = 0; i < rows; ++i) {
                if (dj[i].size() != cols) fail("differential", "column count mismatch");
                for (std::size_t c = 0; c < cols; ++c)
                    m.at(i, c) = ring_element_from_json(p, tag, dj[i][c]);
            }
            diffs.push_back(std::move(m));
        }
    }
    return make_complex(p, tag, std::move(ranks), std::move(diffs));
}

namespace {

std::string kind_name(CosetKind k) {
    switch (k) {
        case CosetKind::G1: return "g1";
        case CosetKind::G2: return "g2";
        case CosetKind::H: return "h";
    }
    return "?";
}

CosetKind kind_from_name(const std::string& s) {
    if (s == "g1") return CosetKind::G1;
    if (s == "g2") return CosetKind::G2;
    if (s == "h") return CosetKind::H;
    fail("coset kind", "unknown kind " + s);
}

Json key_to_json(const CosetKey& k) {
    Json out;
    out["kind"] = kind_name(k.kind);
    out["word"] = nf_to_word(k.rep);
    return out;
}

CosetKey key_from_json(const PresentationPtr& p, const Json& j) {
    CosetKind kind = kind_from_name(need_string(j, "kind", "coset key"));
    return coset_key(reduce(p, need_string(j, "word", "coset key")), kind);
}

}  // namespace

Json subtree_to_json(const FiniteSubtree& t) {
    Json out;
    Json verts = Json::array();
    for (const CosetKey& v : t.vertices) verts.push_back(key_to_json(v));
    Json edges = Json::array();
    for (const CosetKey& e : t.edges) edges.push_back(key_to_json(e));
    out["vertices"] = std::move(verts);
    out["edges"] = std::move(edges);
    return out;
}

FiniteSubtree subtree_from_json(const PresentationPtr& p, const Json& j) {
    FiniteSubtree t;
    for (const Json& v : need(j, "vertices", "subtree")) t.vertices.insert(key_from_json(p, v));
    for (const Json& e : need(j, "edges", "subtree")) t.edges.insert(key_from_json(p, e));
    return t;
}

// ---------------------------------------------------------------------------
// Session parsing

namespace {

GroupPtr group_from_json(const Json& j, const std::string& where) {
    std::string kind = need_string(j, "kind", where);
    std::string name = need_string(j, "name", where);
    if (kind == "trivial") return BaseGroup::trivial(name);
    if (kind == "finite") {
        auto names = need(j, "elements", where).get<std::vector<std::string>>();
        auto table = need(j, "table", where).get<std::vector<std::vector<int>>>();
        return BaseGroup::finite(name, std::move(names), std::move(table));
    }
    if (kind == "free")
        return BaseGroup::free_group(name,
                                     need(j, "generators", where).get<std::vector<std::string>>());
    if (kind == "free_abelian")
        return BaseGroup::free_abelian(
            name, need(j, "generators", where).get<std::vector<std::string>>());
    fail(where, "unknown group kind '" + kind + "'");
}

}  // namespace

SessionDocument parse_session(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const std::exception& e) {
        fail("session", std::string("invalid JSON: ") + e.what());
    }
    SessionDocument doc;
    doc.raw = j;

    if (j.contains("groups")) {
        const Json& groups = j.at("groups");
        for (std::size_t i = 0; i < groups.size(); ++i) {
            std::string where = "groups[" + std::to_string(i) + "]";
            GroupPtr g = group_from_json(groups[i], where);
            if (!doc.groups.emplace(g->name, g).second) fail(where, "duplicate group name");
        }
    }
    auto find_group = [&doc](const std::string& name, const std::string& where) {
        auto it = doc.groups.find(name);
        if (it == doc.groups.end()) fail(where, "unknown group '" + name + "'");
        return it->second;
    };
    if (j.contains("homomorphisms")) {
        const Json& homs = j.at("homomorphisms");
        for (std::size_t i = 0; i < homs.size(); ++i) {
            std::string where = "homomorphisms[" + std::to_string(i) + "]";
            const Json& hj = homs[i];
            std::string name = need_string(hj, "name", where);
            GroupPtr src = find_group(need_string(hj, "source", where), where);
            GroupPtr tgt = find_group(need_string(hj, "target", where), where);
            std::vector<BaseElement> images;
            for (const Json& w : need(hj, "images", where))
                images.push_back(parse_element(tgt, w.get<std::string>()));
            bool inj = hj.value("injective", std::string("asserted")) != "no";
            doc.homs.emplace(name, make_hom(src, tgt, std::move(images), inj));
        }
    }
    auto find_hom = [&doc](const std::string& name, const std::string& where) {
        auto it = doc.homs.find(name);
        if (it == doc.homs.end()) fail(where, "unknown homomorphism '" + name + "'");
        return it->second;
    };

    if (j.contains("presentation")) {
        const Json& pj = j.at("presentation");
        std::string kind = need_string(pj, "kind", "presentation");
        std::string name = pj.value("name", std::string("G"));
        if (kind == "amalgam") {
            doc.presentation = Presentation::amalgam(
                name, find_group(need_string(pj, "g1", "presentation"), "presentation"),
                find_group(need_string(pj, "g2", "presentation"), "presentation"),
                find_group(need_string(pj, "h", "presentation"), "presentation"),
                find_hom(need_string(pj, "i1", "presentation"), "presentation"),
                find_hom(need_string(pj, "i2", "presentation"), "presentation"));
        } else if (kind == "hnn") {
            doc.presentation = Presentation::hnn(
                name, find_group(need_string(pj, "g1", "presentation"), "presentation"),
                find_group(need_string(pj, "h", "presentation"), "presentation"),
                find_hom(need_string(pj, "i1", "presentation"), "presentation"),
                find_hom(need_string(pj, "i2", "presentation"), "presentation"),
                pj.value("stable_letter", std::string("t")));
        } else {
            fail("presentation", "unknown kind '" + kind + "'");
        }
    }

    if (j.contains("complexes")) {
        if (!doc.presentation) fail("complexes", "no presentation declared");
        const Json& cl = j.at("complexes");
        for (std::size_t i = 0; i < cl.size(); ++i) {
            std::string where = "complexes[" + std::to_string(i) + "]";
            std::string name = need_string(cl[i], "name", where);
            doc.complexes.emplace(name,
                                  complex_from_json(doc.presentation, RingTag::G, cl[i]));
        }
    }
    if (j.contains("cw_complexes")) {
        if (!doc.presentation) fail("cw_complexes", "no presentation declared");
        const Json& wl = j.at("cw_complexes");
        for (std::size_t i = 0; i < wl.size(); ++i) {
            std::string where = "cw_complexes[" + std::to_string(i) + "]";
            const Json& wj = wl[i];
            std::string name = need_string(wj, "name", where);
            auto cells = need(wj, "cells", where).get<std::vector<std::vector<std::string>>>();
            ChainComplex c = complex_from_json(doc.presentation, RingTag::G, wj);
            std::vector<RingMatrix> diffs;
            for (int r = 1; r <= c.top(); ++r) diffs.push_back(c.diff_at(r));
            EquivariantCW w = make_cw(doc.presentation, cells, std::move(diffs),
                                      need_string(wj, "base", where));
            CwReport rep = validate_cw(w);
            if (!rep.pass) fail(where, rep.violations.front());
            doc.cw_complexes.emplace(name, std::move(w));
        }
    }
    return doc;
}

SessionDocument load_session_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("session", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_session(buf.str());
}

FiniteSubtree parse_seed(const PresentationPtr& p, const std::string& spec) {
    if (spec.empty()) return default_seed(p);
    std::vector<CosetKey> items;
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ';')) {
        if (item.empty()) continue;
        auto colon = item.find(':');
        if (colon == std::string::npos) fail("seed", "expected kind:word in '" + item + "'");
        CosetKind kind = kind_from_name(item.substr(0, colon));
        items.push_back(coset_key(reduce(p, item.substr(colon + 1)), kind));
    }
    if (items.empty()) return default_seed(p);
    return hull(items);
}

// ---------------------------------------------------------------------------
// Splitting (de)serialization

namespace {

Json chain_map_mats_to_json(const ChainMap& f, int degrees) {
    Json out = Json::array();
    for (int r = 0; r < degrees; ++r) out.push_back(matrix_to_json(f.mat_at(r)));
    return out;
}

std::vector<RingMatrix> mats_from_json(const PresentationPtr& p, RingTag tag, const Json& j,
                                       const std::string& where) {
    std::vector<RingMatrix> mats;
    for (const Json& mj : j) mats.push_back(matrix_from_json(p, tag, mj, where));
    return mats;
}

// builds a chain map without validating squares; the verifier owns the checks
ChainMap raw_chain_map(ChainComplex source, ChainComplex target, RingTag tag,
                       std::vector<RingMatrix> mats) {
    ChainMap f;
    f.source = std::move(source);
    f.target = std::move(target);
    f.tag = tag;
    f.mats = std::move(mats);
    return f;
}

}  // namespace

Json splitting_to_json(const MVSplitting& s) {
    int degrees = s.c.top() + 1;
    Json out;
    out["complex"] = complex_to_json(s.c);
    Json seq = Json::array();
    for (int r = 0; r <= s.seq.top(); ++r) seq.push_back(subtree_to_json(s.seq.at(r)));
    out["sequence"] = std::move(seq);
    out["d"] = complex_to_json(s.d);
    out["c1"] = complex_to_json(s.c1);
    out["c2"] = complex_to_json(s.c2);
    out["e1"] = chain_map_mats_to_json(s.e1, degrees);
    out["e2"] = chain_map_mats_to_json(s.e2, degrees);
    out["e"] = chain_map_mats_to_json(s.middle, degrees);
    out["f"] = chain_map_mats_to_json(s.assembly, degrees);
    return out;
}

MVSplitting splitting_from_json(const SessionDocument& doc, const Json& j) {
    const PresentationPtr& p = doc.presentation;
    if (!p) fail("splitting", "no presentation declared");
    bool amalgam = p->kind == PresentationKind::Amalgam;
    MVSplitting s;
    s.pres = p;
    s.c = complex_from_json(p, RingTag::G, need(j, "complex", "splitting"));
    for (const Json& tj : need(j, "sequence", "splitting"))
        s.seq.trees.push_back(subtree_from_json(p, tj));
    s.d = complex_from_json(p, RingTag::H, need(j, "d", "splitting"));
    s.c1 = complex_from_json(p, RingTag::G1, need(j, "c1", "splitting"));
    s.c2 = complex_from_json(p, RingTag::G2, need(j, "c2", "splitting"));

    ChainComplex c1g = s.c1;
    c1g.tag = RingTag::G;
    for (auto& m : c1g.diffs) m = matrix_retag(m, RingTag::G);
    if (amalgam) {
        ChainComplex c2g = s.c2;
        c2g.tag = RingTag::G;
        for (auto& m : c2g.diffs) m = matrix_retag(m, RingTag::G);
        s.induced_sum = direct_sum(c1g, c2g);
    } else {
        s.induced_sum = c1g;
    }
    s.e1 = raw_chain_map(s.d, s.c1, RingTag::G1,
                         mats_from_json(p, RingTag::G1, need(j, "e1", "splitting"), "e1"));
    if (amalgam)
        s.e2 = raw_chain_map(s.d, s.c2, RingTag::G2,
                             mats_from_json(p, RingTag::G2, need(j, "e2", "splitting"), "e2"));
    else
        s.e2 = raw_chain_map(twist_by_stable_letter(s.d), s.c1, RingTag::G1,
                             mats_from_json(p, RingTag::G1, need(j, "e2", "splitting"), "e2"));
    s.middle = raw_chain_map(s.d, s.induced_sum, RingTag::G,
                             mats_from_json(p, RingTag::G, need(j, "e", "splitting"), "e"));
    s.assembly = raw_chain_map(s.induced_sum, s.c, RingTag::G,
                               mats_from_json(p, RingTag::G, need(j, "f", "splitting"), "f"));
    return s;
}

// ---------------------------------------------------------------------------
// Commands

namespace {

Json verdict_json(const OracleReport& r) {
    Json out;
    out["verdict"] = r.verdict == Verdict::Pass          ? "pass"
                     : r.verdict == Verdict::Fail        ? "fail"
                                                         : "inconclusive";
    if (!r.detail.empty()) out["detail"] = r.detail;
    if (r.window_used > 0) out["window"] = r.window_used;
    return out;
}

Json split_report_json(const SplitReport& rep) {
    Json out;
    out["verdict"] = rep.pass ? "pass" : "fail";
    Json viols = Json::array();
    for (const auto& v : rep.violations) {
        Json vj;
        vj["class"] = v.cls;
        vj["detail"] = v.detail;
        viols.push_back(std::move(vj));
    }
    out["violations"] = std::move(viols);
    Json ex = Json::array();
    for (const auto& e : rep.exactness) ex.push_back(verdict_json(e));
    out["exactness"] = std::move(ex);
    return out;
}

Json sequence_report(const SubtreeSequence& seq) {
    Json out = Json::array();
    for (int r = 0; r <= seq.top(); ++r) {
        Json tj;
        tj["degree"] = r;
        tj["vertices"] = seq.at(r).vertices.size();
        tj["edges"] = seq.at(r).edges.size();
        tj["subtree"] = subtree_to_json(seq.at(r));
        out.push_back(std::move(tj));
    }
    return out;
}

Json certificate_report(const ConnectivityCertificate& cert) {
    Json out;
    out["nodes"] = cert.nodes.size();
    out["links"] = cert.links.size();
    out["connected"] = cert.connected;
    out["generates"] = cert.generates;
    out["method"] = cert.generation_method;
    Json labels = Json::array();
    for (const BaseElement& m : cert.monodromy) labels.push_back(element_to_word(m));
    out["monodromy"] = std::move(labels);
    return out;
}

const ChainComplex& pick_complex(const SessionDocument& doc, const CommandOptions& opts) {
    if (doc.complexes.empty()) fail("command", "session declares no complexes");
    if (opts.complex_name.empty()) {
        if (doc.complexes.size() > 1)
            fail("command", "several complexes declared; pass --complex");
        return doc.complexes.begin()->second;
    }
    auto it = doc.complexes.find(opts.complex_name);
    if (it == doc.complexes.end()) fail("command", "unknown complex " + opts.complex_name);
    return it->second;
}

const EquivariantCW& pick_cw(const SessionDocument& doc, const CommandOptions& opts) {
    if (doc.cw_complexes.empty()) fail("command", "session declares no cw complexes");
    if (opts.cw_name.empty()) {
        if (doc.cw_complexes.size() > 1)
            fail("command", "several cw complexes declared; pass --cw");
        return doc.cw_complexes.begin()->second;
    }
    auto it = doc.cw_complexes.find(opts.cw_name);
    if (it == doc.cw_complexes.end()) fail("command", "unknown cw complex " + opts.cw_name);
    return it->second;
}

PlusInput plus_input_from_json(const SessionDocument& doc, const Json& block,
                               const std::string& where) {
    PlusInput in;
    auto git = doc.groups.find(need_string(block, "pi", where));
    if (git == doc.groups.end()) fail(where, "unknown group");
    in.pi = git->second;
    auto tit = doc.groups.find(need_string(block, "target", where));
    if (tit == doc.groups.end()) fail(where, "unknown target group");
    in.big_pi = tit->second;
    auto hit = doc.homs.find(need_string(block, "phi", where));
    if (hit == doc.homs.end()) fail(where, "unknown homomorphism");
    in.phi = hit->second;
    auto ring = Presentation::wrap_base(in.pi);
    in.k = complex_from_json(ring, RingTag::G, need(block, "complex", where));
    auto words = [&block](const char* key) {
        std::vector<std::string> out;
        if (block.contains(key)) out = block.at(key).get<std::vector<std::string>>();
        return out;
    };
    in.x_words = words("x_words");
    in.h_words = words("h_words");
    in.v_words = words("v_words");
    in.w_words = words("w_words");
    return in;
}

}  // namespace

CommandResult run_command(const SessionDocument& doc, const CommandOptions& opts) {
    CommandResult res;
    Json& report = res.report;
    report["command"] = opts.command;
    const PresentationPtr& p = doc.presentation;
    if (!p) fail("command", "session declares no presentation");
    report["presentation"] = p->name;

    if (opts.command == "realize") {
        const ChainComplex& c = pick_complex(doc, opts);
        SubtreeSequence seq = realize(c, parse_seed(p, opts.seed));
        report["sequence"] = sequence_report(seq);
        report["verdict"] = "pass";
        return res;
    }
    if (opts.command == "split") {
        const ChainComplex& c = pick_complex(doc, opts);
        SubtreeSequence seq = realize(c, parse_seed(p, opts.seed));
        MVSplitting s = build_splitting(c, seq);
        SplitReport rep = verify_splitting(s);
        Json ranks = Json::array();
        for (int r = 0; r <= s.c.top(); ++r) {
            Json rj;
            rj["degree"] = r;
            rj["d"] = s.d.rank_at(r);
            rj["induced"] = s.induced_sum.rank_at(r);
            rj["c"] = s.c.rank_at(r);
            ranks.push_back(std::move(rj));
        }
        report["ranks"] = std::move(ranks);
        report["verification"] = split_report_json(rep);
        report["splitting"] = splitting_to_json(s);
        report["verdict"] = rep.pass ? "pass" : "fail";
        res.exit_code = rep.pass ? 0 : 1;
        return res;
    }
    if (opts.command == "verify") {
        if (opts.splitting_path.empty()) fail("verify", "pass --splitting <file>");
        std::ifstream in(opts.splitting_path);
        if (!in) fail("verify", "cannot open " + opts.splitting_path);
        Json stored = Json::parse(in, nullptr, true);
        const Json& sj = stored.contains("splitting") ? stored.at("splitting") : stored;
        SplitReport rep;
        try {
            MVSplitting s = splitting_from_json(doc, sj);
            rep = verify_splitting(s);
        } catch (const std::exception& e) {
            rep.pass = false;
            rep.violations.push_back({"malformed", e.what()});
        }
        report["verification"] = split_report_json(rep);
        report["verdict"] = rep.pass ? "pass" : "fail";
        res.exit_code = rep.pass ? 0 : 1;
        return res;
    }
    if (opts.command == "cw-realize" || opts.command == "cw-split") {
        const EquivariantCW& w = pick_cw(doc, opts);
        CWDomain dom = cw_realize(w, parse_seed(p, opts.seed));
        report["sequence"] = sequence_report(dom.seq);
        report["fundamental"] = dom.fundamental;
        Json certs;
        certs["w1"] = certificate_report(dom.cert_w1);
        if (p->kind == PresentationKind::Amalgam)
            certs["w2"] = certificate_report(dom.cert_w2);
        certs["y"] = certificate_report(dom.cert_y);
        report["certificates"] = std::move(certs);
        bool reverified =
            verify_certificate(w, dom.seq, CosetKind::G1, dom.cert_w1) &&
            (p->kind != PresentationKind::Amalgam ||
             verify_certificate(w, dom.seq, CosetKind::G2, dom.cert_w2)) &&
            verify_certificate(w, dom.seq, CosetKind::H, dom.cert_y);
        report["certificates_reverified"] = reverified;
        if (opts.command == "cw-realize") {
            report["verdict"] = dom.certified() && reverified ? "pass" : "fail";
            res.exit_code = report["verdict"] == "pass" ? 0 : 1;
            return res;
        }
        SvKSplitting s = build_svk(w, dom, opts.window);
        SplitReport rep = verify_splitting(s.chain);
        report["verification"] = split_report_json(rep);
        report["x_ranks"] = s.x_complex.ranks;
        report["cone_certificate"] = verdict_json(s.cone_certificate);
        report["splitting"] = splitting_to_json(s.chain);
        bool pass = rep.pass && reverified && s.cone_certificate.pass();
        report["verdict"] = pass ? "pass" : "fail";
        res.exit_code = pass ? 0 : 1;
        return res;
    }
    if (opts.command == "plus") {
        if (!doc.raw.contains("plus")) fail("plus", "session has no plus block");
        PlusInput in = plus_input_from_json(doc, doc.raw.at("plus"), "plus");
        PlusConstructionData out = plus_construction(in, opts.window);
        report["n"] = out.n;
        report["relative_ranks"] = out.relative.ranks;
        report["k_prime_ranks"] = out.k_prime.ranks;
        report["cone_certificate"] = verdict_json(out.cone_certificate);
        bool pass = out.cone_certificate.pass();
        report["verdict"] = pass ? "pass" : "fail";
        res.exit_code = pass ? 0 : 1;
        return res;
    }
    if (opts.command == "refine") {
        if (!doc.raw.contains("refine")) fail("refine", "session has no refine block");
        const Json& rj = doc.raw.at("refine");
        CommandOptions svk_opts = opts;
        svk_opts.cw_name = rj.value("cw", std::string());
        const EquivariantCW& w = pick_cw(doc, svk_opts);
        CWDomain dom = cw_realize(w, parse_seed(p, rj.value("seed", std::string())));
        SvKSplitting s = build_svk(w, dom, opts.window);
        RefineInput in;
        in.y = plus_input_from_json(doc, need(rj, "y", "refine"), "refine.y");
        in.x1 = plus_input_from_json(doc, need(rj, "x1", "refine"), "refine.x1");
        if (p->kind == PresentationKind::Amalgam)
            in.x2 = plus_input_from_json(doc, need(rj, "x2", "refine"), "refine.x2");
        auto hom_ref = [&doc, &rj](const char* key) {
            auto it = doc.homs.find(need_string(rj, key, "refine"));
            if (it == doc.homs.end()) fail("refine", std::string("unknown hom ") + key);
            return it->second;
        };
        in.psi1 = hom_ref("psi1");
        in.psi2 = hom_ref("psi2");
        in.y_in_x1 = rj.value("y_in_x1", std::vector<std::size_t>{});
        in.y_in_x2 = rj.value("y_in_x2", std::vector<std::size_t>{});
        RefinedSplitting ref = injective_refine(s, in, opts.window);
        report["identity_refinement"] = ref.identity_refinement;
        report["attached"] = Json::array({ref.y_plus.n, ref.x1_plus.n,
                                          p->kind == PresentationKind::Amalgam ? ref.x2_plus.n
                                                                               : ref.x1_plus.n});
        report["y_cone"] = verdict_json(ref.y_cone);
        report["x1_cone"] = verdict_json(ref.x1_cone);
        if (p->kind == PresentationKind::Amalgam) report["x2_cone"] = verdict_json(ref.x2_cone);
        report["x_cone"] = verdict_json(ref.x_cone);
        bool pass = ref.y_cone.pass() && ref.x1_cone.pass() &&
                    (p->kind != PresentationKind::Amalgam || ref.x2_cone.pass()) &&
                    ref.x_cone.verdict != Verdict::Fail;
        report["verdict"] = pass ? "pass" : "fail";
        res.exit_code = pass ? 0 : 1;
        return res;
    }
    if (opts.command == "export-dot") {
        if (!opts.cw_name.empty() || (doc.complexes.empty() && !doc.cw_complexes.empty())) {
            const EquivariantCW& w = pick_cw(doc, opts);
            CWDomain dom = cw_realize(w, parse_seed(p, opts.seed));
            res.text = export_domain_dot(w, dom);
            report["verdict"] = "pass";
            return res;
        }
        const ChainComplex& c = pick_complex(doc, opts);
        SubtreeSequence seq = realize(c, parse_seed(p, opts.seed));
        if (opts.degree < 0 || opts.degree > seq.top()) fail("export-dot", "degree out of range");
        res.text = export_dot(seq.at(opts.degree));
        report["verdict"] = "pass";
        return res;
    }
    if (opts.command == "run") {
        if (!doc.raw.contains("commands")) fail("run", "session has no commands block");
        Json reports = Json::array();
        int exit_code = 0;
        for (const Json& cj : doc.raw.at("commands")) {
            CommandOptions inner;
            inner.command = need_string(cj, "command", "commands");
            inner.complex_name = cj.value("complex", std::string());
            inner.cw_name = cj.value("cw", std::string());
            inner.seed = cj.value("seed", std::string());
            inner.window = cj.value("window", opts.window);
            inner.degree = cj.value("degree", 0);
            CommandResult r = run_command(doc, inner);
            reports.push_back(r.text.empty() ? r.report : Json(r.text));
            exit_code = std::max(exit_code, r.exit_code);
        }
        report["reports"] = std::move(reports);
        report["verdict"] = exit_code == 0 ? "pass" : "fail";
        res.exit_code = exit_code;
        return res;
    }
    fail("command", "unknown command '" + opts.command + "'");
}

}  // namespace transv
