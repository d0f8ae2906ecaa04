#ifndef COOL_NN_HPP
#define COOL_NN_HPP

#include <cstdint>
#include <vector>

#include "cool/encode.hpp"
#include "cool/rng.hpp"

namespace cool {

struct NetConfig {
    int vocab = 256;
    int embed = 8;
    int hidden = 64;
    bool operator==(const NetConfig& o) const {
        return vocab == o.vocab && embed == o.embed && hidden == o.hidden;
    }
};

// Dual-head sequence model over encoded instruction groups: a bidirectional
// LSTM whose per-position output feeds a softmax policy head (one score per
// instruction) and whose end states feed a sigmoid in-domain head.
class SeqNet {
public:
    SeqNet() = default;
    SeqNet(NetConfig cfg, Rng& rng);

    struct Output {
        std::vector<double> pi; // softmax over instruction positions
        double indom = 0.5;
    };
    Output forward(const std::vector<int>& tokens) const;

    // Combined loss: epsilon * L_indom + (1-epsilon) * L_pi for samples with a
    // root label, epsilon * L_indom otherwise. Returns the loss and adds the
    // gradient into `grad` (same layout as params()).
    double loss_and_grad(const std::vector<int>& tokens, int root, bool indom_label,
                         double epsilon, std::vector<double>& grad) const;

    std::vector<double>& params() { return theta_; }
    const std::vector<double>& params() const { return theta_; }
    const NetConfig& config() const { return cfg_; }
    size_t param_count() const { return theta_.size(); }

    static size_t param_count_for(const NetConfig& cfg);

private:
    NetConfig cfg_;
    std::vector<double> theta_;

    struct Layout {
        size_t emb, w_f, u_f, b_f, w_b, u_b, b_b, pi_w, pi_b, id_w, id_b, total;
    };
    Layout layout() const;

    struct Trace; // forward caches for backprop
    void run_forward(const std::vector<int>& tokens, Trace& tr) const;
};

// Adam over a flat parameter vector.
class Adam {
public:
    Adam(size_t n, double lr) : lr_(lr), m_(n, 0.0), v_(n, 0.0) {}
    void step(std::vector<double>& theta, const std::vector<double>& grad);
    double lr() const { return lr_; }

private:
    double lr_, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
    long t_ = 0;
    std::vector<double> m_, v_;
};

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

// Symmetric Kullback-Leibler divergence between two distributions (natural
// log; zero mass on the reference side is clamped).
double symmetric_kl(const std::vector<double>& p, const std::vector<double>& q);

} // namespace cool

#endif
