#include "cool/policy.hpp"

#include "cool/rng.hpp"

namespace cool {

uint64_t TablePolicy::hash_tokens(const std::vector<int>& tokens) {
    uint64_t h = 0x9ae16a3b2f90404full;
    for (int t : tokens) h = hash_mix(h, uint64_t(t) + 1);
    return h;
}

PolicyReply TablePolicy::predict_impl(const std::vector<int>& state_tokens, const DomainSet&,
                                      int positions) {
    PolicyReply r;
    if (positions <= 0) return r;
    auto it = table_.find(hash_tokens(state_tokens));
    if (it == table_.end()) return r;
    int root = it->second;
    if (root < 0 || root >= positions) return r;
    r.pi.assign(size_t(positions), 0.05 / std::max(1, positions - 1));
    r.pi[size_t(root)] = 0.95;
    r.ac = ac_;
    r.ci = ci_;
    return r;
}

} // namespace cool
