#ifndef COOL_BENCH_HPP
#define COOL_BENCH_HPP

#include <string>
#include <vector>

#include "cool/compiler.hpp"

namespace cool {

struct BenchRow {
    std::string suite;
    std::string config;
    double p_suc = 0.0;
    double mean_states = 0.0;
    double mean_ground_ms = 0.0;
    double mean_exec_ms = 0.0;
    double a_pi = 0.0;
    double a_indom = 0.0;
};

// CSV schema: suite,config,p_suc,mean_states,mean_ground_ms,mean_exec_ms,a_pi,a_indom
std::string report_csv(const std::vector<BenchRow>& rows);

// Named measurement configurations over one suite directory:
//   pcp    - prompts on, agent off
//   bfs    - prompts off, uniform -1 rewards, lambda=1, offsets zeroed
//   dfs    - prompts off, uniform +1 rewards, lambda=1, offsets zeroed
//   mdp    - prompts on, lambda=0
//   agent  - prompts on, agent predictions on
std::vector<BenchRow> run_experiment(const std::string& suite_dir,
                                     const std::vector<std::string>& config_names,
                                     const Config& base);

struct LearningPoint {
    int k = 0;
    double a_pi = 0.0;
    double a_indom = 0.0;
    double p_suc = 0.0;
    double mean_states = 0.0;
};

// k learning-mode compilations (collect + train) over the suite, recording
// the accuracy trajectory; CSV schema: k,a_pi,a_indom,p_suc,mean_states
std::vector<LearningPoint> run_learning_experiment(const std::string& suite_dir, int k,
                                                   const Config& base);
std::string learning_csv(const std::vector<LearningPoint>& points);

std::vector<std::string> list_suite_files(const std::string& suite_dir);

} // namespace cool

#endif
