#include "cool/bench.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>

#include "cool/printer.hpp"

namespace fs = std::filesystem;

namespace cool {

namespace {

Config config_for(const std::string& name, const Config& base) {
    Config cfg = base;
    cfg.agent = false;
    if (name == "pcp") {
        // prompts on, defaults
    } else if (name == "bfs" || name == "dfs") {
        cfg.pcp = false;
        cfg.uniform_reward = name == "bfs" ? -1.0 : 1.0;
        cfg.lambda = 1.0;
        cfg.k_o0 = 0.0;
        cfg.k_o1 = 0.0;
    } else if (name == "mdp") {
        cfg.lambda = 0.0;
    } else if (name == "agent") {
        cfg.agent = true;
    } else {
        throw CoolError("unknown bench configuration '" + name + "'");
    }
    return cfg;
}

struct Aggregate {
    int files = 0, succeeded = 0;
    double states = 0.0, ground_ms = 0.0, exec_ms = 0.0;
};

void measure_file(CompilerSession& session, const std::string& path, CompileFlags flags,
                  Aggregate& agg) {
    ++agg.files;
    try {
        Compiled c = session.compile_file(path, flags);
        long states = c.report.total_expanded;
        auto out = session.run(c);
        ++agg.succeeded;
        agg.states += double(states);
        agg.ground_ms += c.report.total_ms;
        agg.exec_ms += out.wall_ms;
    } catch (const CoolError&) {
        // failed compilations count against p_suc only
    }
}

} // namespace

std::vector<std::string> list_suite_files(const std::string& suite_dir) {
    std::vector<std::string> files;
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(suite_dir, ec)) {
        if (e.is_regular_file() && e.path().extension() == ".cool")
            files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw CoolError("suite directory has no .cool files: " + suite_dir);
    return files;
}

std::vector<BenchRow> run_experiment(const std::string& suite_dir,
                                     const std::vector<std::string>& config_names,
                                     const Config& base) {
    auto files = list_suite_files(suite_dir);
    std::string suite = fs::path(suite_dir).filename().string();

    std::vector<BenchRow> rows;
    for (const auto& name : config_names) {
        Config cfg = config_for(name, base);
        cfg.collect = false; // measurement passes never write traces
        CompilerSession session(cfg);

        Aggregate agg;
        CompileFlags flags;
        flags.agent = cfg.agent;
        flags.collect = false;
        for (const auto& f : files) measure_file(session, f, flags, agg);

        BenchRow row;
        row.suite = suite;
        row.config = name;
        row.p_suc = agg.files ? double(agg.succeeded) / double(agg.files) : 0.0;
        if (agg.succeeded > 0) {
            row.mean_states = agg.states / double(agg.succeeded);
            row.mean_ground_ms = agg.ground_ms / double(agg.succeeded);
            row.mean_exec_ms = agg.exec_ms / double(agg.succeeded);
        }
        if (auto* a = session.agent()) {
            double api = 0.0, aid = 0.0;
            int n = 0;
            for (const auto& d : a->model_domains()) {
                if (auto m = a->model_for(d)) {
                    api += m->a_pi();
                    aid += m->a_indom();
                    ++n;
                }
            }
            if (n) {
                row.a_pi = api / n;
                row.a_indom = aid / n;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<LearningPoint> run_learning_experiment(const std::string& suite_dir, int k,
                                                   const Config& base) {
    auto files = list_suite_files(suite_dir);
    Config cfg = base;
    cfg.agent = true;
    cfg.collect = true;
    CompilerSession session(cfg);

    std::vector<LearningPoint> points;
    for (int i = 0; i < k; ++i) {
        const std::string& file = files[size_t(i) % files.size()];
        CompileFlags flags;
        flags.learn = true;
        long states = 0;
        bool ok = true;
        try {
            Compiled c = session.compile_file(file, flags);
            states = c.report.total_expanded;
        } catch (const CoolError&) {
            ok = false;
        }
        LearningPoint p;
        p.k = i + 1;
        p.p_suc = ok ? 1.0 : 0.0;
        p.mean_states = double(states);
        if (auto* a = session.agent()) {
            double api = 0.0, aid = 0.0;
            int n = 0;
            for (const auto& d : a->model_domains()) {
                if (auto m = a->model_for(d)) {
                    api += m->a_pi();
                    aid += m->a_indom();
                    ++n;
                }
            }
            if (n) {
                p.a_pi = api / n;
                p.a_indom = aid / n;
            }
        }
        points.push_back(p);
    }
    return points;
}

std::string report_csv(const std::vector<BenchRow>& rows) {
    std::string out = "suite,config,p_suc,mean_states,mean_ground_ms,mean_exec_ms,a_pi,a_indom\n";
    for (const auto& r : rows) {
        out += r.suite + "," + r.config + "," + format_number(r.p_suc) + "," +
               format_number(r.mean_states) + "," + format_number(r.mean_ground_ms) + "," +
               format_number(r.mean_exec_ms) + "," + format_number(r.a_pi) + "," +
               format_number(r.a_indom) + "\n";
    }
    return out;
}

std::string learning_csv(const std::vector<LearningPoint>& points) {
    std::string out = "k,a_pi,a_indom,p_suc,mean_states\n";
    for (const auto& p : points) {
        out += std::to_string(p.k) + "," + format_number(p.a_pi) + "," +
               format_number(p.a_indom) + "," + format_number(p.p_suc) + "," +
               format_number(p.mean_states) + "\n";
    }
    return out;
}

} // namespace cool
