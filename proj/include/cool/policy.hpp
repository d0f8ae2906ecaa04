#ifndef COOL_POLICY_HPP
#define COOL_POLICY_HPP

#include <atomic>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "cool/bddb.hpp"
#include "cool/domains.hpp"

namespace cool {

// Synchronous request/response contract between a grounding search and
// whatever supplies policy guidance. Implementations must be safe for
// concurrent callers.
class PolicySource {
public:
    virtual ~PolicySource() = default;

    PolicyReply predict(const std::vector<int>& state_tokens, const DomainSet& d, int positions) {
        prediction_count_.fetch_add(1, std::memory_order_relaxed);
        return predict_impl(state_tokens, d, positions);
    }

    long prediction_count() const { return prediction_count_.load(std::memory_order_relaxed); }

protected:
    virtual PolicyReply predict_impl(const std::vector<int>& state_tokens, const DomainSet& d,
                                     int positions) = 0;

private:
    std::atomic<long> prediction_count_{0};
};

// Guidance disabled: empty policy, zero coefficients.
class NullPolicy : public PolicySource {
protected:
    PolicyReply predict_impl(const std::vector<int>&, const DomainSet&, int) override {
        return {};
    }
};

// Deterministic table-lookup baseline used by tests: maps a state-token hash
// to a preferred root and answers with a concentrated policy there.
class TablePolicy : public PolicySource {
public:
    TablePolicy(double ac, double ci) : ac_(ac), ci_(ci) {}

    void remember(const std::vector<int>& state_tokens, int root) {
        table_[hash_tokens(state_tokens)] = root;
    }

    static uint64_t hash_tokens(const std::vector<int>& tokens);

protected:
    PolicyReply predict_impl(const std::vector<int>& state_tokens, const DomainSet&,
                             int positions) override;

private:
    std::unordered_map<uint64_t, int> table_;
    double ac_, ci_;
};

} // namespace cool

#endif
