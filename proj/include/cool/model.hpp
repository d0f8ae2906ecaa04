#ifndef COOL_MODEL_HPP
#define COOL_MODEL_HPP

#include <memory>
#include <string>

#include "cool/datasets.hpp"
#include "cool/nn.hpp"

namespace cool {

struct TrainParams {
    double epsilon = 0.3; // weight of the in-domain loss
    double lr = 0.02;
    int epochs = 10;
};

// A dual-head model bound to one knowledge domain, carrying its latest test
// accuracies. The in-domain head stays invalid until the model has been
// trained with at least one negative sample.
class Model {
public:
    Model() = default;
    Model(DomainSet domain, NetConfig cfg, Rng& rng);

    const DomainSet& domain() const { return domain_; }
    double a_pi() const { return a_pi_; }
    double a_indom() const { return a_indom_; }
    bool indom_valid() const { return indom_valid_; }

    SeqNet& net() { return net_; }
    const SeqNet& net() const { return net_; }

    SeqNet::Output infer(const std::vector<int>& tokens) const { return net_.forward(tokens); }

    // Mean-loss gradient descent over the dataset; returns per-epoch mean
    // losses. Empty dataset is a warned no-op.
    std::vector<double> train(const Dataset& g, const TrainParams& p, Rng& rng);

    // Updates stored accuracies. A_InDom is skipped (kept) when the dataset
    // has no negatives.
    void evaluate(const Dataset& g);

    void save(const std::string& path) const;
    static Model load(const std::string& path);

    void set_accuracies(double a_pi, double a_indom, bool indom_valid) {
        a_pi_ = a_pi;
        a_indom_ = a_indom;
        indom_valid_ = indom_valid;
    }

private:
    DomainSet domain_;
    SeqNet net_;
    double a_pi_ = 0.0;
    double a_indom_ = 0.0;
    bool indom_valid_ = false;
    std::unique_ptr<Adam> opt_; // persists across incremental training calls
};

} // namespace cool

#endif
