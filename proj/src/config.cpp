#include "cool/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

namespace cool {

namespace {

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw CoolError("config key '" + key + "' expects on/off, got '" + v + "'");
}

double parse_real(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        throw CoolError("config key '" + key + "' expects a number, got '" + v + "'");
    }
}

long parse_int(const std::string& v, const std::string& key) {
    double d = parse_real(v, key);
    long l = long(d);
    if (double(l) != d) throw CoolError("config key '" + key + "' expects an integer");
    return l;
}

void check_range(bool ok, const std::string& key, const char* what) {
    if (!ok) throw CoolError("config key '" + key + "' out of range: " + what);
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    size_t b = s.find_last_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

} // namespace

void Config::set(const std::string& key, const std::string& value) {
    if (key == "seed") seed = uint64_t(parse_int(value, key));
    else if (key == "gamma") {
        gamma = parse_real(value, key);
        check_range(gamma >= 0 && gamma <= 1, key, "[0,1]");
    } else if (key == "lambda") {
        lambda = parse_real(value, key);
        check_range(lambda >= 0 && lambda <= 1, key, "[0,1]");
    } else if (key == "q_base") q_base = parse_real(value, key);
    else if (key == "k_ra") {
        k_ra = parse_real(value, key);
        check_range(k_ra > 0 && k_ra <= 1, key, "(0,1]");
    } else if (key == "r_a_base") {
        r_a_base = parse_real(value, key);
        check_range(r_a_base >= 0, key, ">= 0");
    } else if (key == "k_o0") k_o0 = parse_real(value, key);
    else if (key == "k_o1") k_o1 = parse_real(value, key);
    else if (key == "k_o2") k_o2 = parse_real(value, key);
    else if (key == "lookahead") lookahead = int(parse_int(value, key));
    else if (key == "budget") {
        budget = parse_int(value, key);
        check_range(budget >= 1, key, ">= 1");
    } else if (key == "pcp") pcp = parse_bool(value, key);
    else if (key == "default_reward") default_reward = parse_real(value, key);
    else if (key == "uniform_reward") uniform_reward = parse_real(value, key);
    else if (key == "agent") agent = parse_bool(value, key);
    else if (key == "collect") collect = parse_bool(value, key);
    else if (key == "data_dir") data_dir = value;
    else if (key == "model_dir") model_dir = value;
    else if (key == "split_ratio") {
        split_ratio = parse_real(value, key);
        check_range(split_ratio > 0 && split_ratio < 1, key, "(0,1)");
    } else if (key == "n_max") {
        n_max = int(parse_int(value, key));
        check_range(n_max >= 0, key, ">= 0");
    } else if (key == "delta_tolerance") {
        delta_tolerance = parse_real(value, key);
        check_range(delta_tolerance >= 0 && delta_tolerance < 1, key, "[0,1)");
    } else if (key == "window") {
        window = int(parse_int(value, key));
        check_range(window >= 0, key, ">= 0");
    } else if (key == "psi") {
        psi = parse_real(value, key);
        check_range(psi >= 0 && psi <= 1, key, "[0,1]");
    } else if (key == "phi") {
        phi = parse_real(value, key);
        check_range(phi >= 0, key, ">= 0");
    } else if (key == "epsilon") {
        epsilon = parse_real(value, key);
        check_range(epsilon > 0 && epsilon < 1, key, "(0,1)");
    } else if (key == "eta") {
        eta = parse_real(value, key);
        check_range(eta > 0 && eta <= 1, key, "(0,1]");
    } else if (key == "skl_max") {
        skl_max = parse_real(value, key);
        check_range(skl_max >= 0, key, ">= 0");
    } else if (key == "zeta") {
        zeta = parse_real(value, key);
        check_range(zeta >= -1 && zeta <= 1, key, "[-1,1]");
    } else if (key == "pool_capacity") {
        pool_capacity = int(parse_int(value, key));
        check_range(pool_capacity >= 1, key, ">= 1");
    } else if (key == "pool_grace") {
        pool_grace = int(parse_int(value, key));
        check_range(pool_grace >= 0, key, ">= 0");
    } else if (key == "epochs") {
        epochs = int(parse_int(value, key));
        check_range(epochs >= 0, key, ">= 0");
    } else if (key == "learning_rate") {
        learning_rate = parse_real(value, key);
        check_range(learning_rate > 0, key, "> 0");
    } else if (key == "hidden") {
        hidden = int(parse_int(value, key));
        check_range(hidden >= 1, key, ">= 1");
    } else if (key == "embed") {
        embed = int(parse_int(value, key));
        check_range(embed >= 1, key, ">= 1");
    } else if (key == "vocab") {
        vocab = int(parse_int(value, key));
        check_range(vocab >= 256, key, ">= 256");
    } else {
        throw CoolError("unknown config key '" + key + "'");
    }
}

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CoolError("cannot read config file " + path);
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw CoolError("config line " + std::to_string(lineno) + " is not 'key = value'");
        }
        cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    cfg.apply_env();
    return cfg;
}

void Config::apply_env() {
    static const char* keys[] = {
        "seed", "gamma", "lambda", "q_base", "k_ra", "r_a_base", "k_o0", "k_o1", "k_o2",
        "lookahead", "budget", "pcp", "default_reward", "uniform_reward", "agent", "collect",
        "data_dir", "model_dir", "split_ratio", "n_max", "delta_tolerance", "window", "psi",
        "phi", "epsilon", "eta", "skl_max", "zeta", "pool_capacity", "pool_grace", "epochs",
        "learning_rate", "hidden", "embed", "vocab"};
    for (const char* key : keys) {
        std::string env = "COOL_";
        for (const char* p = key; *p; ++p) env += char(std::toupper(*p));
        if (const char* v = std::getenv(env.c_str())) set(key, v);
    }
}

SearchParams Config::search_params() const {
    SearchParams p;
    p.gamma = gamma;
    p.lambda = lambda;
    p.q_base = q_base;
    p.k_ra = k_ra;
    p.r_a_base = r_a_base;
    p.k_o0 = k_o0;
    p.k_o1 = k_o1;
    p.k_o2 = k_o2;
    p.lookahead = lookahead;
    p.budget = budget;
    return p;
}

GroundOptions Config::ground_options() const {
    GroundOptions o;
    o.pcp_enabled = pcp;
    o.default_reward = default_reward;
    o.uniform_reward = uniform_reward;
    return o;
}

AgentParams Config::agent_params() const {
    AgentParams a;
    a.data.n_max = n_max;
    a.data.delta_tolerance = delta_tolerance;
    a.data.window = window;
    a.data.psi = psi;
    a.data.phi = phi;
    a.data.split_ratio = split_ratio;
    a.train.epsilon = epsilon;
    a.train.lr = learning_rate;
    a.train.epochs = epochs;
    a.net.vocab = vocab;
    a.net.embed = embed;
    a.net.hidden = hidden;
    a.eta = eta;
    a.skl_max = skl_max;
    a.zeta = zeta;
    a.pool_capacity = pool_capacity;
    a.pool_grace = pool_grace;
    return a;
}

} // namespace cool
