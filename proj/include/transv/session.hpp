#pragma once

#include <json.hpp>

#include <map>
#include <string>

#include "transv/cwsplit.hpp"

namespace transv {

// Reports use insertion-ordered JSON so identical sessions print
// byte-identical documents.
using Json = nlohmann::ordered_json;

struct SessionDocument {
    std::map<std::string, GroupPtr> groups;
    std::map<std::string, Homomorphism> homs;
    PresentationPtr presentation;
    std::map<std::string, ChainComplex> complexes;
    std::map<std::string, EquivariantCW> cw_complexes;
    Json raw;  // original document (plus/refine blocks, commands)
};

// Parses and validates a session; throws std::invalid_argument with the
// offending path on schema violations or unresolved references.
SessionDocument parse_session(const std::string& text);
SessionDocument load_session_file(const std::string& path);

// Seed grammar: semicolon-separated items "g1:<word>", "g2:<word>", "h:<word>"
// naming vertex and edge cosets; an empty spec is the presentation's default.
FiniteSubtree parse_seed(const PresentationPtr& p, const std::string& spec);

struct CommandOptions {
    std::string command;  // realize | split | verify | cw-realize | cw-split |
                          // plus | refine | export-dot
    std::string complex_name;
    std::string cw_name;
    std::string seed;
    int window = 6;
    int degree = 0;
    std::string splitting_path;  // verify: file written by split --out
};

struct CommandResult {
    Json report;
    std::string text;  // non-JSON output (DOT)
    int exit_code = 0;
};

// Exit codes: 0 pass, 1 verification failure, 2 usage error (also thrown as
// std::invalid_argument by parsing).
CommandResult run_command(const SessionDocument& doc, const CommandOptions& opts);

// serialization pieces, also used by the tests
Json ring_element_to_json(const RingElement& x);
RingElement ring_element_from_json(const PresentationPtr& p, RingTag tag, const Json& j);
Json matrix_to_json(const RingMatrix& m);
Json complex_to_json(const ChainComplex& c);
ChainComplex complex_from_json(const PresentationPtr& p, RingTag tag, const Json& j);
Json subtree_to_json(const FiniteSubtree& t);
FiniteSubtree subtree_from_json(const PresentationPtr& p, const Json& j);
Json splitting_to_json(const MVSplitting& s);
MVSplitting splitting_from_json(const SessionDocument& doc, const Json& j);

}  // namespace transv
