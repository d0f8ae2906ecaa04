#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cool/bench.hpp"
#include "cool/compiler.hpp"
#include "cool/corpus.hpp"
#include "cool/exec.hpp"
#include "cool/printer.hpp"

namespace {

cool::Config load_config(const std::string& config_path) {
    if (!config_path.empty()) return cool::Config::from_file(config_path);
    cool::Config cfg;
    cfg.apply_env();
    return cfg;
}

struct CompileArgs {
    std::string file;
    std::string config_path;
    std::string collect = "on";
    std::string dump_ir;
    bool no_agent = false;
    bool no_pcp = false;
    bool stats = false;
};

void add_compile_flags(CLI::App* cmd, CompileArgs& args) {
    cmd->add_option("file", args.file, "source file")->required();
    cmd->add_option("--config", args.config_path, "configuration file (key = value lines)");
    cmd->add_flag("--no-agent", args.no_agent, "disable neural guidance");
    cmd->add_flag("--no-pcp", args.no_pcp, "disable process-control prompts (uniform rewards)");
    cmd->add_option("--collect", args.collect, "trace collection: on|off")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--dump-ir", args.dump_ir, "write the lowered instruction table to a file");
    cmd->add_flag("--stats", args.stats, "print grounding statistics");
}

int do_compile(const CompileArgs& args, bool execute_after) {
    cool::Config cfg = load_config(args.config_path);
    cool::CompilerSession session(cfg);
    cool::CompileFlags flags;
    flags.agent = !args.no_agent;
    flags.pcp = !args.no_pcp;
    flags.collect = args.collect == "on";
    try {
        cool::Compiled compiled = session.compile_file(args.file, flags);
        if (!args.dump_ir.empty()) {
            std::ofstream out(args.dump_ir, std::ios::trunc);
            bool header = true;
            for (const auto& fn : compiled.ir.funcs) {
                const auto& info = compiled.analysis.registry[fn.fn_id];
                if (info.is_query_component) continue; // shares the group rows
                out << "# function " << info.display << "\n"
                    << cool::dump_segment(fn.rows, header);
                header = false;
            }
            out << "# main\n" << cool::dump_segment(compiled.ir.main.instrs, header);
            for (const auto& [name, unit] : compiled.ir.class_units) {
                out << "# class " << name << "\n" << cool::dump_segment(unit.instrs, false);
            }
        }
        if (args.stats) {
            for (const auto& seg : compiled.report.segments) {
                std::cerr << "query at line " << seg.loc.line << ": " << seg.expanded
                          << " states, depth " << seg.max_depth << ", "
                          << cool::format_screen_value(seg.wall_ms) << " ms\n";
            }
        }
        if (execute_after) {
            auto out = session.run(compiled);
            for (double v : out.screen) std::cout << cool::format_screen_value(v) << "\n";
        }
        return 0;
    } catch (const cool::CoolError& e) {
        std::cerr << cool::format_diagnostic(args.file, e) << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"compiler and runtime for constraint object-oriented logic programs"};
    app.require_subcommand(1);

    CompileArgs compile_args, run_args;
    auto* cmd_compile = app.add_subcommand("compile", "ground a source file");
    add_compile_flags(cmd_compile, compile_args);
    auto* cmd_run = app.add_subcommand("run", "ground and execute a source file");
    add_compile_flags(cmd_run, run_args);

    auto* cmd_agent = app.add_subcommand("agent", "manage the neural agent");
    std::string agent_action, agent_config;
    cmd_agent->add_option("action", agent_action, "train | cycle | stats")
        ->required()
        ->check(CLI::IsMember({"train", "cycle", "stats"}));
    cmd_agent->add_option("--config", agent_config, "configuration file");

    auto* cmd_bench = app.add_subcommand("bench", "run a measurement suite");
    std::string bench_suite, bench_out, bench_config;
    std::vector<std::string> bench_configs{"pcp", "bfs", "dfs"};
    int learn_k = 0;
    cmd_bench->add_option("suite", bench_suite, "directory of .cool files")->required();
    cmd_bench->add_option("--out", bench_out, "report CSV path")->required();
    cmd_bench->add_option("--configs", bench_configs,
                          "configurations to measure (pcp bfs dfs mdp agent)");
    cmd_bench->add_option("--learn", learn_k, "learning-mode compilations before measuring");
    cmd_bench->add_option("--config", bench_config, "configuration file");

    auto* cmd_corpus = app.add_subcommand("corpus", "generate drill problems");
    std::string corpus_dir, corpus_family = "mixed";
    int corpus_count = 20;
    uint64_t corpus_seed = 7;
    cmd_corpus->add_option("dir", corpus_dir, "output directory")->required();
    cmd_corpus->add_option("--family", corpus_family,
                           "linear | loglaw | quadratic | projectile | mixed");
    cmd_corpus->add_option("--count", corpus_count, "number of files");
    cmd_corpus->add_option("--seed", corpus_seed, "generator seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_compile->parsed()) return do_compile(compile_args, false);
        if (cmd_run->parsed()) return do_compile(run_args, true);
        if (cmd_agent->parsed()) {
            cool::Config cfg = load_config(agent_config);
            cfg.agent = true;
            cool::CompilerSession session(cfg);
            auto* agent = session.agent();
            if (agent_action == "cycle") {
                std::cout << "collection cycle advanced to " << agent->advance_cycle() << "\n";
            } else if (agent_action == "train") {
                auto s = agent->train_pending();
                std::cout << "trained " << s.domains_trained << " domain(s), created "
                          << s.models_created << " model(s)";
                if (s.domains_trained) {
                    std::cout << ", mean accuracy pi=" << cool::format_screen_value(s.mean_a_pi)
                              << " indom=" << cool::format_screen_value(s.mean_a_indom);
                }
                std::cout << "\n";
            } else {
                std::cout << "cycle " << agent->store().cycle() << "\n";
                for (const auto& d : agent->model_domains()) {
                    auto m = agent->model_for(d);
                    if (!m) continue;
                    std::cout << d.key() << ": a_pi=" << cool::format_screen_value(m->a_pi())
                              << " a_indom=" << cool::format_screen_value(m->a_indom())
                              << (m->indom_valid() ? "" : " (indom invalid)") << "\n";
                }
            }
            return 0;
        }
        if (cmd_bench->parsed()) {
            cool::Config cfg = load_config(bench_config);
            std::ofstream out(bench_out, std::ios::trunc);
            if (!out) throw cool::CoolError("cannot write report " + bench_out);
            if (learn_k > 0) {
                auto points = cool::run_learning_experiment(bench_suite, learn_k, cfg);
                out << cool::learning_csv(points);
            } else {
                auto rows = cool::run_experiment(bench_suite, bench_configs, cfg);
                out << cool::report_csv(rows);
            }
            return 0;
        }
        if (cmd_corpus->parsed()) {
            cool::write_corpus(corpus_dir, corpus_family, corpus_count, corpus_seed);
            std::cout << "wrote " << corpus_count << " files to " << corpus_dir << "\n";
            return 0;
        }
    } catch (const cool::CoolError& e) {
        std::cerr << cool::format_diagnostic("cool", e) << "\n";
        return 1;
    }
    return 0;
}
