#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "transv/session.hpp"

using namespace transv;

namespace {

int execute(const std::string& session_path, CommandOptions opts, const std::string& out_path) {
    try {
        SessionDocument doc = load_session_file(session_path);
        CommandResult res = run_command(doc, opts);
        std::string payload = res.text.empty() ? res.report.dump(2) + "\n" : res.text;
        if (!out_path.empty()) {
            std::ofstream out(out_path);
            if (!out) {
                std::cerr << "cannot write " << out_path << "\n";
                return 2;
            }
            out << payload;
        }
        std::cout << payload;
        return res.exit_code;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"algebraic and combinatorial codimension-1 transversality"};
    app.require_subcommand(1);

    std::string session, seed, out, complex_name, cw_name, splitting;
    int window = 6, degree = 0;

    auto add_common = [&](CLI::App* cmd, bool needs_session = true) {
        if (needs_session) cmd->add_option("--session", session, "session file")->required();
        cmd->add_option("--out", out, "write the report to a file");
    };

    auto* realize_cmd = app.add_subcommand("realize", "realize a subtree sequence");
    add_common(realize_cmd);
    realize_cmd->add_option("--seed", seed, "seed subtree, e.g. \"g1:1;h:1\"");
    realize_cmd->add_option("--complex", complex_name, "complex name");

    auto* split_cmd = app.add_subcommand("split", "build and verify a Mayer-Vietoris splitting");
    add_common(split_cmd);
    split_cmd->add_option("--seed", seed, "seed subtree");
    split_cmd->add_option("--complex", complex_name, "complex name");

    auto* verify_cmd = app.add_subcommand("verify", "re-verify a stored splitting");
    add_common(verify_cmd);
    verify_cmd->add_option("--splitting", splitting, "splitting report file")->required();

    auto* cwr_cmd = app.add_subcommand("cw-realize", "realize a CW domain with certificates");
    add_common(cwr_cmd);
    cwr_cmd->add_option("--seed", seed, "seed subtree");
    cwr_cmd->add_option("--cw", cw_name, "cw complex name");

    auto* cws_cmd = app.add_subcommand("cw-split", "build a Seifert-van Kampen splitting");
    add_common(cws_cmd);
    cws_cmd->add_option("--seed", seed, "seed subtree");
    cws_cmd->add_option("--cw", cw_name, "cw complex name");
    cws_cmd->add_option("--window", window, "oracle window");

    auto* plus_cmd = app.add_subcommand("plus", "chain-level plus construction");
    add_common(plus_cmd);
    plus_cmd->add_option("--window", window, "oracle window");

    auto* refine_cmd = app.add_subcommand("refine", "injective refinement of a splitting");
    add_common(refine_cmd);
    refine_cmd->add_option("--window", window, "oracle window");

    auto* dot_cmd = app.add_subcommand("export-dot", "DOT graph of a realized subtree");
    add_common(dot_cmd);
    dot_cmd->add_option("--seed", seed, "seed subtree");
    dot_cmd->add_option("--complex", complex_name, "complex name");
    dot_cmd->add_option("--degree", degree, "sequence degree to export");

    CLI11_PARSE(app, argc, argv);

    CommandOptions opts;
    opts.seed = seed;
    opts.complex_name = complex_name;
    opts.cw_name = cw_name;
    opts.window = window;
    opts.degree = degree;
    opts.splitting_path = splitting;
    opts.command = app.get_subcommands().front()->get_name();
    return execute(session, opts, out);
}
