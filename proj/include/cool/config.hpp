#ifndef COOL_CONFIG_HPP
#define COOL_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>

#include "cool/agent.hpp"
#include "cool/bddb.hpp"
#include "cool/ground.hpp"

namespace cool {

// Flat key=value configuration. Unknown keys are rejected; every key can be
// overridden by an environment variable COOL_<KEY> (upper-cased).
struct Config {
    uint64_t seed = 42;

    // search
    double gamma = 0.0;
    double lambda = 0.8;
    double q_base = 0.0;
    double k_ra = 0.5;
    double r_a_base = 0.1;
    double k_o0 = 0.5;
    double k_o1 = 0.1;
    double k_o2 = 1.5;
    int lookahead = 0;
    long budget = 10000;

    // grounding
    bool pcp = true;
    double default_reward = 1.0;
    double uniform_reward = -1.0;

    // agent & data
    bool agent = true;
    bool collect = true;
    std::string data_dir = "data";
    std::string model_dir = "models";
    double split_ratio = 0.8;
    int n_max = 5;
    double delta_tolerance = 0.1;
    int window = 4;
    double psi = 0.5;
    double phi = 0.3;
    double epsilon = 0.3;
    double eta = 0.8;
    double skl_max = 1.0;
    double zeta = 0.0;
    int pool_capacity = 8;
    int pool_grace = 3;
    int epochs = 10;
    double learning_rate = 0.02;
    int hidden = 64;
    int embed = 8;
    int vocab = 256;

    void set(const std::string& key, const std::string& value);
    static Config from_file(const std::string& path);
    void apply_env();

    SearchParams search_params() const;
    GroundOptions ground_options() const;
    AgentParams agent_params() const;
};

} // namespace cool

#endif
