#include "divforge/divforge.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#ifndef DIVFORGE_CORPUS_DIR
#define DIVFORGE_CORPUS_DIR "corpus"
#endif

namespace fs = std::filesystem;
using namespace divforge;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool full_trace_requested() {
    const char* v = std::getenv("DIVFORGE_TRACE");
    return v && std::string(v) == "1";
}

dsl::Report run_script(const fs::path& path) {
    dsl::Script script = dsl::parse_script(read_file(path));
    return dsl::evaluate(script, path.filename().string(), {full_trace_requested()});
}

int emit(const dsl::Report& rep, const std::string& format, const std::string& out_file) {
    std::string text = format == "text" ? dsl::emit_text(rep) : dsl::emit_json(rep);
    if (out_file.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_file, std::ios::binary);
        if (!out) throw Error("cannot write " + out_file);
        out << text;
    }
    return rep.success() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact divisor calculus on rational and ruled surfaces"};
    app.require_subcommand(1);

    std::string script_path, format = "json", out_file, graph_path, corpus_dir = DIVFORGE_CORPUS_DIR;

    auto* run = app.add_subcommand("run", "Evaluate a surface script");
    run->add_option("script", script_path, "Script file (.srf)")->required();
    run->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "text"}));
    run->add_option("--out", out_file, "Write the report to FILE");

    auto* corpus = app.add_subcommand("corpus", "Evaluate every bundled script");
    corpus->add_option("--dir", corpus_dir, "Corpus directory");
    corpus->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "text"}));

    auto* fund = app.add_subcommand("fundcycle", "Fundamental cycle of a dual graph");
    fund->add_option("graph", graph_path, "Dual graph file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return emit(run_script(script_path), format, out_file);

        if (corpus->parsed()) {
            std::vector<fs::path> scripts;
            for (const auto& e : fs::directory_iterator(corpus_dir))
                if (e.path().extension() == ".srf") scripts.push_back(e.path());
            std::sort(scripts.begin(), scripts.end());
            if (scripts.empty()) throw Error("no .srf scripts in " + corpus_dir);
            int status = 0;
            for (const auto& p : scripts) {
                dsl::Report rep = run_script(p);
                if (format == "text") {
                    std::cout << dsl::emit_text(rep);
                } else {
                    std::cout << p.filename().string() << ": " << rep.pass << " passed, " << rep.fail << " failed, "
                              << rep.errors << " errored\n";
                }
                if (!rep.success()) status = 1;
            }
            return status;
        }

        if (fund->parsed()) {
            std::ifstream in(graph_path);
            if (!in) throw Error("cannot open " + graph_path);
            ExceptionalConfig cfg = parse_dual_graph(in);
            DefinitenessResult nd = is_negative_definite(cfg);
            if (!nd.negative_definite) {
                std::cout << "not negative definite; witness";
                for (std::size_t i = 0; i < cfg.size(); ++i) std::cout << " " << cfg.names()[i] << "=" << nd.witness[i];
                std::cout << "\n";
                return 1;
            }
            FundamentalCycleResult z = fundamental_cycle(cfg);
            std::cout << "Z0 =";
            for (std::size_t i = 0; i < cfg.size(); ++i) std::cout << " " << z.cycle[i] << "*" << cfg.names()[i];
            std::cout << "\nsteps " << z.steps << "\nZ0^2 " << cfg.pair(z.cycle, z.cycle) << "\np_a(Z0) "
                      << pa_cycle(cfg, z.cycle) << "\nclass " << to_string(classify_singularity(cfg)) << "\n";
            return 0;
        }
    } catch (const dsl::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
