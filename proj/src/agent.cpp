#include "cool/agent.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;

namespace cool {

// ---- ModelPool ----------------------------------------------------------------

std::shared_ptr<Model> ModelPool::get(const std::string& key,
                                      const std::function<std::shared_ptr<Model>()>& loader) {
    std::lock_guard<std::mutex> lock(mu_);
    ++clock_;
    auto it = entries_.find(key);
    if (it != entries_.end()) {
        it->second.last_access = clock_;
        return it->second.model;
    }
    auto model = loader();
    if (!model) return nullptr;
    Entry e;
    e.model = model;
    e.last_access = clock_;
    e.added_at = clock_;
    entries_[key] = std::move(e);
    evict_if_needed();
    return model;
}

void ModelPool::evict_if_needed() {
    while (entries_.size() > capacity_) {
        const std::string* victim = nullptr;
        long best = 0;
        for (const auto& [key, e] : entries_) {
            bool in_grace = clock_ - e.added_at < long(grace_);
            if (in_grace) continue;
            if (!victim || e.last_access < best) {
                victim = &key;
                best = e.last_access;
            }
        }
        if (!victim) {
            // everything is inside its grace window; evict the oldest entry
            for (const auto& [key, e] : entries_) {
                if (!victim || e.added_at < best) {
                    victim = &key;
                    best = e.added_at;
                }
            }
        }
        if (!victim) return;
        entries_.erase(*victim);
    }
}

std::vector<std::string> ModelPool::keys_by_recency() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<std::pair<long, std::string>> v;
    for (const auto& [key, e] : entries_) v.emplace_back(e.last_access, key);
    std::sort(v.begin(), v.end());
    std::vector<std::string> out;
    for (auto& [_, k] : v) out.push_back(k);
    return out;
}

// ---- outlier elimination & synthesis -----------------------------------------

std::vector<PolicyContribution> eliminate_outliers(std::vector<PolicyContribution> contributions,
                                                   const DomainSet& d, double eta,
                                                   double skl_max) {
    if (contributions.empty()) return contributions;
    std::stable_sort(contributions.begin(), contributions.end(),
                     [](const PolicyContribution& a, const PolicyContribution& b) {
                         double ka = a.indom * a.a_indom, kb = b.indom * b.a_indom;
                         if (ka != kb) return ka > kb;
                         return a.domain.key() < b.domain.key();
                     });
    size_t keep = size_t(std::ceil(eta * double(contributions.size()) - 1e-12));
    keep = std::clamp<size_t>(keep, 1, contributions.size());
    contributions.resize(keep);

    // iterated elimination: recompute the weighted mean until stable
    while (true) {
        double wsum = 0.0;
        size_t len = 0;
        for (const auto& c : contributions) len = std::max(len, c.pi.size());
        std::vector<double> mean(len, 0.0);
        for (const auto& c : contributions) {
            double w = c.a_pi * c.indom * c.a_indom;
            wsum += w;
            for (size_t k = 0; k < c.pi.size(); ++k) mean[k] += w * c.pi[k];
        }
        if (wsum <= 0.0) break;
        for (auto& m : mean) m /= wsum;

        bool removed = false;
        for (size_t k = 0; k < contributions.size(); ++k) {
            const auto& c = contributions[k];
            if (c.domain.subset_of(d)) continue;
            if (c.pi.size() != mean.size()) continue;
            if (symmetric_kl(c.pi, mean) > skl_max) {
                contributions.erase(contributions.begin() + long(k));
                removed = true;
                break;
            }
        }
        if (!removed) break;
    }
    return contributions;
}

PolicyReply synthesize_policy(const std::vector<PolicyContribution>& survivors) {
    PolicyReply reply;
    if (survivors.empty()) return reply;
    size_t len = 0;
    for (const auto& c : survivors) len = std::max(len, c.pi.size());

    double w_pi = 0.0, w_id = 0.0, sum_a_indom = 0.0;
    std::vector<double> pi(len, 0.0);
    for (const auto& c : survivors) {
        double w = c.a_pi * c.indom * c.a_indom;
        w_pi += w;
        for (size_t k = 0; k < c.pi.size(); ++k) pi[k] += w * c.pi[k];
        w_id += c.indom * c.a_indom;
        sum_a_indom += c.a_indom;
    }
    if (w_pi <= 0.0 || w_id <= 0.0 || sum_a_indom <= 0.0) return reply;
    for (auto& p : pi) p /= w_pi;
    reply.pi = std::move(pi);
    reply.ci = w_id / sum_a_indom;
    reply.ac = w_pi / w_id;
    return reply;
}

// ---- NeuralAgent --------------------------------------------------------------

NeuralAgent::NeuralAgent(const std::string& data_dir, const std::string& model_dir,
                         AgentParams params, uint64_t seed, bool collect)
    : params_(params), store_(data_dir, seed, collect), model_dir_(model_dir),
      pool_(size_t(params.pool_capacity), params.pool_grace), rng_(seed ^ 0xa5a5a5a5ull) {
    scan_model_dir();
}

void NeuralAgent::scan_model_dir() {
    model_index_.clear();
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(model_dir_, ec)) {
        if (!e.is_regular_file() || e.path().extension() != ".bin") continue;
        std::string key = e.path().stem().string();
        model_index_[key] = DomainSet::from_key(key);
    }
}

void NeuralAgent::record_batch(const ModelingBatch& batch) {
    if (batch.records.empty()) return;
    std::lock_guard<std::mutex> lock(mu_);
    store_.append_batch(batch.effective, batch.records);
}

int NeuralAgent::advance_cycle() {
    std::lock_guard<std::mutex> lock(mu_);
    return store_.advance_cycle();
}

std::shared_ptr<Model> NeuralAgent::model_for(const DomainSet& d) {
    std::string key = d.key();
    if (!model_index_.count(key)) return nullptr;
    return pool_.get(key, [&]() -> std::shared_ptr<Model> {
        try {
            return std::make_shared<Model>(Model::load(model_path(key)));
        } catch (const CoolError& e) {
            std::cerr << "warning: " << e.what() << "\n";
            return nullptr;
        }
    });
}

std::vector<DomainSet> NeuralAgent::model_domains() const {
    std::vector<DomainSet> out;
    for (const auto& [key, members] : model_index_) out.push_back(members);
    return out;
}

void NeuralAgent::save_model(Model& m) {
    std::string key = m.domain().key();
    m.save(model_path(key));
    model_index_[key] = m.domain();
}

// Lexicographic optimization over (coverage of d, subset fraction, set size).
std::vector<DomainSet> select_collaborators_from(const std::vector<DomainSet>& domains,
                                                 const DomainSet& d, size_t exhaustive_cap) {
    std::vector<const DomainSet*> registry;
    for (const auto& m : domains) registry.push_back(&m);

    struct Score {
        size_t uncovered;
        double fraction; // maximized
        size_t count;
        bool better_than(const Score& o) const {
            if (uncovered != o.uncovered) return uncovered < o.uncovered;
            if (fraction != o.fraction) return fraction > o.fraction;
            return count < o.count;
        }
    };
    auto score_of = [&](const std::vector<const DomainSet*>& subset) {
        DomainSet covered;
        size_t subsets_of_d = 0;
        for (const auto* m : subset) {
            covered = covered.unite(m->intersect(d));
            if (m->subset_of(d)) ++subsets_of_d;
        }
        Score s;
        s.uncovered = d.size() - covered.size();
        s.fraction = subset.empty() ? 1.0 : double(subsets_of_d) / double(subset.size());
        s.count = subset.size();
        return s;
    };

    std::vector<const DomainSet*> best; // empty set is a legal answer
    Score best_score = score_of(best);

    if (registry.size() <= exhaustive_cap) {
        for (uint64_t mask = 1; mask < (1ull << registry.size()); ++mask) {
            std::vector<const DomainSet*> subset;
            for (size_t k = 0; k < registry.size(); ++k)
                if (mask & (1ull << k)) subset.push_back(registry[k]);
            Score s = score_of(subset);
            if (s.better_than(best_score)) {
                best_score = s;
                best = subset;
            }
        }
    } else {
        // greedy fallback for large registries: grow coverage, then prune
        std::vector<const DomainSet*> subset;
        DomainSet covered;
        bool progress = true;
        while (progress) {
            progress = false;
            const DomainSet* pick = nullptr;
            size_t gain_best = 0;
            for (const auto* m : registry) {
                if (std::find(subset.begin(), subset.end(), m) != subset.end()) continue;
                size_t gain = m->intersect(d).unite(covered).size() - covered.size();
                if (gain > gain_best) {
                    gain_best = gain;
                    pick = m;
                }
            }
            if (pick) {
                subset.push_back(pick);
                covered = covered.unite(pick->intersect(d));
                progress = true;
            }
        }
        Score s = score_of(subset);
        if (s.better_than(best_score)) best = subset;
    }

    std::vector<DomainSet> out;
    for (const auto* m : best) out.push_back(*m);
    return out;
}

std::vector<DomainSet> NeuralAgent::select_collaborators(const DomainSet& d) const {
    std::vector<DomainSet> registry;
    for (const auto& [key, members] : model_index_) registry.push_back(members);
    return select_collaborators_from(registry, d, 20);
}

std::shared_ptr<Model> NeuralAgent::expand_model(const DomainSet& d) {
    auto fresh = [&]() { return std::make_shared<Model>(d, params_.net, rng_); };

    // donor selection: minimize |d (symmetric difference) union(set)|, then set size
    std::vector<DomainSet> registry = model_domains();
    std::vector<size_t> best_mask_members;
    bool have_best = false;
    size_t best_sym = d.size(); // empty donor set
    size_t best_count = 0;
    if (!registry.empty() && registry.size() <= params_.exhaustive_cap) {
        for (uint64_t mask = 1; mask < (1ull << registry.size()); ++mask) {
            DomainSet u;
            size_t count = 0;
            std::vector<size_t> members;
            for (size_t k = 0; k < registry.size(); ++k) {
                if (mask & (1ull << k)) {
                    u = u.unite(registry[k]);
                    ++count;
                    members.push_back(k);
                }
            }
            size_t sym = d.symmetric_difference_size(u);
            if (sym < best_sym || (sym == best_sym && (!have_best || count < best_count))) {
                best_sym = sym;
                best_count = count;
                best_mask_members = members;
                have_best = true;
            }
        }
    }

    std::shared_ptr<Model> model;
    if (!have_best || best_mask_members.empty()) {
        model = fresh(); // no donors: random initialization
    } else {
        struct Donor {
            DomainSet domain;
            std::shared_ptr<Model> model;
            double cj;
        };
        std::vector<Donor> donors;
        for (size_t k : best_mask_members) {
            auto m = model_for(registry[k]);
            if (!m) continue;
            donors.push_back(Donor{registry[k], m, registry[k].jaccard(d)});
        }
        std::stable_sort(donors.begin(), donors.end(), [](const Donor& a, const Donor& b) {
            if (a.cj != b.cj) return a.cj > b.cj;
            return a.domain.key() < b.domain.key();
        });
        model = fresh();
        bool averaged = false;
        if (!donors.empty()) {
            const auto& top = donors.front();
            std::vector<double> acc(model->net().param_count(), 0.0);
            double cj_sum = 0.0;
            bool shape_ok = true;
            for (const auto& dn : donors) {
                if (dn.model->net().param_count() != acc.size()) {
                    shape_ok = false;
                    break;
                }
                if (cosine_similarity(dn.model->net().params(), top.model->net().params()) <
                    params_.zeta)
                    continue;
                for (size_t k = 0; k < acc.size(); ++k)
                    acc[k] += dn.cj * dn.model->net().params()[k];
                cj_sum += dn.cj;
            }
            if (shape_ok && cj_sum > 0.0) {
                for (size_t k = 0; k < acc.size(); ++k) model->net().params()[k] = acc[k] / cj_sum;
                averaged = true;
            } else if (!shape_ok) {
                std::cerr << "warning: donor model shapes mismatch; falling back to random "
                             "initialization\n";
            }
        }

        if (averaged) {
            // pretraining on records of contributing sub-domains
            Dataset pre;
            for (const auto& e : model_domains()) {
                if (!e.subset_of(d)) continue;
                for (const auto& rec : store_.all_records(e)) {
                    if (pre.samples.size() >= params_.pretrain_cap) break;
                    pre.samples.push_back(DatasetSample{rec.tokens, rec.root, true});
                }
            }
            if (!pre.empty()) {
                TrainParams tp = params_.train;
                tp.epochs = params_.pretrain_epochs;
                model->train(pre, tp, rng_);
            }
        }
    }
    save_model(*model);
    return pool_.get(d.key(), [&] { return model; });
}

NeuralAgent::TrainSummary NeuralAgent::train_pending() {
    std::lock_guard<std::mutex> lock(mu_);
    TrainSummary summary;
    for (const auto& d : store_.pending_domains()) {
        std::shared_ptr<Model> model = model_for(d);
        if (!model) {
            model = expand_model(d);
            ++summary.models_created;
        }
        if (!model) continue;

        auto input = store_.gather(d, params_.data);
        Rng build_rng = rng_.fork(fnv1a(d.key()));
        Dataset train = build_training_dataset(input.new_train, input.old_train,
                                               input.neg_pool_train, params_.data, build_rng);
        Dataset test = build_testing_dataset(input.new_test, input.old_test, input.neg_pool_test,
                                             params_.data, build_rng);
        // a well-predicted batch can oversample to nothing; that is not an error
        if (!train.empty()) model->train(train, params_.train, build_rng);
        model->evaluate(test);
        save_model(*model);
        store_.mark_consumed(d);
        ++summary.domains_trained;
        summary.mean_a_pi += model->a_pi();
        summary.mean_a_indom += model->a_indom();
    }
    if (summary.domains_trained > 0) {
        summary.mean_a_pi /= double(summary.domains_trained);
        summary.mean_a_indom /= double(summary.domains_trained);
    }
    return summary;
}

PolicyReply NeuralAgent::predict_impl(const std::vector<int>& state_tokens, const DomainSet& d,
                                      int positions) {
    std::lock_guard<std::mutex> lock(mu_);
    auto collaborators = select_collaborators(d);
    if (collaborators.empty()) return {};

    std::vector<PolicyContribution> contributions;
    for (const auto& cd : collaborators) {
        auto model = model_for(cd);
        if (!model) continue;
        auto out = model->infer(state_tokens);
        PolicyContribution c;
        c.domain = cd;
        c.pi = std::move(out.pi);
        c.a_pi = model->a_pi();
        if (model->indom_valid()) {
            c.indom = out.indom;
            c.a_indom = model->a_indom();
        } else {
            double jac = cd.jaccard(d);
            c.indom = jac;
            c.a_indom = jac;
        }
        if (int(c.pi.size()) != positions) continue; // stale-length guard
        contributions.push_back(std::move(c));
    }
    auto survivors = eliminate_outliers(std::move(contributions), d, params_.eta, params_.skl_max);
    return synthesize_policy(survivors);
}

} // namespace cool
