#ifndef COOL_AGENT_HPP
#define COOL_AGENT_HPP

#include <functional>
#include <list>
#include <memory>
#include <mutex>

#include "cool/ground.hpp"
#include "cool/model.hpp"
#include "cool/policy.hpp"

namespace cool {

struct AgentParams {
    DatasetParams data;
    TrainParams train;
    NetConfig net;
    double eta = 0.8;       // retained fraction when ranking collaborators
    double skl_max = 1.0;   // symmetric-KL elimination threshold
    double zeta = 0.0;      // donor cosine-similarity threshold
    int pool_capacity = 8;
    int pool_grace = 3;     // accesses during which a new entry cannot be evicted
    int pretrain_epochs = 4;
    size_t pretrain_cap = 512;
    size_t exhaustive_cap = 16; // exhaustive subset search bound
};

// LRU-managed cache of loaded models. Entries newer than the grace window are
// never evicted; among the rest the least recently used goes first.
class ModelPool {
public:
    ModelPool(size_t capacity, int grace) : capacity_(capacity), grace_(grace) {}

    std::shared_ptr<Model> get(const std::string& key,
                               const std::function<std::shared_ptr<Model>()>& loader);
    bool cached(const std::string& key) const { return entries_.count(key) > 0; }
    size_t size() const { return entries_.size(); }
    std::vector<std::string> keys_by_recency() const; // oldest first, for tests

private:
    struct Entry {
        std::shared_ptr<Model> model;
        long last_access = 0;
        long added_at = 0;
    };
    mutable std::mutex mu_;
    std::map<std::string, Entry> entries_;
    size_t capacity_;
    int grace_;
    long clock_ = 0;

    void evict_if_needed();
};

// One collaborator's contribution entering outlier elimination.
struct PolicyContribution {
    DomainSet domain;
    std::vector<double> pi;
    double a_pi = 0.0;
    double indom = 0.0;
    double a_indom = 0.0;
};

// Lexicographic collaborator choice over an explicit registry: minimal
// uncovered remainder of d, then maximal subset fraction, then minimal count.
// The empty set is a legal optimum (vacuous fraction 1).
std::vector<DomainSet> select_collaborators_from(const std::vector<DomainSet>& registry,
                                                 const DomainSet& d, size_t exhaustive_cap = 20);

// Ranking, top-eta retention and iterated symmetric-KL elimination of
// contributions whose domain is not covered by the request. Runs the KL
// stage to a fixed point, so re-running on the survivors removes nothing.
std::vector<PolicyContribution> eliminate_outliers(std::vector<PolicyContribution> contributions,
                                                   const DomainSet& d, double eta, double skl_max);

// Weighted synthesis of the final (pi, ci, ac) from the surviving
// contributions; empty input yields an empty policy with zero coefficients.
PolicyReply synthesize_policy(const std::vector<PolicyContribution>& survivors);

// The self-managing neural subsystem: persists grounding traces per
// knowledge domain, constructs contrastive datasets, trains and updates
// models in the background, and answers policy requests by multi-model
// collaboration.
class NeuralAgent : public PolicySource {
public:
    NeuralAgent(const std::string& data_dir, const std::string& model_dir, AgentParams params,
                uint64_t seed, bool collect = true);

    void record_batch(const ModelingBatch& batch);
    int advance_cycle();

    struct TrainSummary {
        int domains_trained = 0;
        int models_created = 0;
        double mean_a_pi = 0.0;
        double mean_a_indom = 0.0;
    };
    TrainSummary train_pending();

    std::vector<DomainSet> select_collaborators(const DomainSet& d) const;
    std::shared_ptr<Model> expand_model(const DomainSet& d);

    std::vector<DomainSet> model_domains() const;
    std::shared_ptr<Model> model_for(const DomainSet& d); // loads via the pool
    bool has_model(const DomainSet& d) const { return model_index_.count(d.key()) > 0; }

    DataStore& store() { return store_; }
    const AgentParams& params() const { return params_; }
    ModelPool& pool() { return pool_; }

protected:
    PolicyReply predict_impl(const std::vector<int>& state_tokens, const DomainSet& d,
                             int positions) override;

private:
    AgentParams params_;
    std::mutex mu_; // serializes training, storage and pool access
    DataStore store_;
    std::string model_dir_;
    ModelPool pool_;
    Rng rng_;
    std::map<std::string, DomainSet> model_index_; // key -> members, mirrors model_dir

    std::string model_path(const std::string& key) const { return model_dir_ + "/" + key + ".bin"; }
    void scan_model_dir();
    void save_model(Model& m);
};

} // namespace cool

#endif
