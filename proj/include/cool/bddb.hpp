#ifndef COOL_BDDB_HPP
#define COOL_BDDB_HPP

#include <atomic>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <queue>
#include <unordered_set>
#include <vector>

#include "cool/source.hpp"

namespace cool {

// Best-first exploration over an action-value space with decayed past value
// and full backtracking. The action value of a pair combines the immediate
// reward with the lambda-decayed value of its predecessor; gamma (future
// rewards) is fixed to zero because successor rewards cannot be observed
// before expansion.
struct SearchParams {
    double gamma = 0.0;
    double lambda = 0.8;
    double q_base = 0.0;
    double k_ra = 0.5;      // scale of the agent counter-reward vs |r_p|
    double r_a_base = 0.1;  // floor of the agent counter-reward
    double k_o0 = 0.5;      // offset bonus at depth 0
    double k_o1 = 0.1;      // stagnation penalty scale
    double k_o2 = 1.5;      // stagnation penalty growth
    int lookahead = 0;      // inert while gamma == 0
    long budget = 10000;    // maximum expanded states

    void validate() const {
        if (gamma != 0.0) {
            throw CoolError("gamma > 0 is unsupported: future rewards cannot be observed "
                            "before expansion");
        }
        if (budget < 1) throw CoolError("search budget must be >= 1");
        if (lambda < 0.0 || lambda > 1.0) throw CoolError("lambda must lie in [0,1]");
    }
};

// r = (1-ac*ci) * ((r_p - r_a) * (1-ac*ci) + r_a) + ac*ci*pi*r_a + o
// with r_a = max(k_ra*|r_p|, r_a_base) and o = k_o0 at depth 0, else
// -k_o1 * k_o2^t. Pure; evaluated exactly as written.
inline double compute_reward(double r_p, double pi, double ac, double ci, long t,
                             const SearchParams& p) {
    double r_a = std::max(p.k_ra * std::fabs(r_p), p.r_a_base);
    double u = ac * ci;
    double o = t == 0 ? p.k_o0 : -p.k_o1 * std::pow(p.k_o2, double(t));
    return (1.0 - u) * ((r_p - r_a) * (1.0 - u) + r_a) + u * pi * r_a + o;
}

// q = r + lambda * q_prev for t >= 1; q = r + lambda * q_base at t = 0.
inline double compute_action_value(double r, double q_prev, long t, const SearchParams& p) {
    return r + p.lambda * (t == 0 ? p.q_base : q_prev);
}

// Modeling data describing one step of a successful grounding.
struct ModelingRecord {
    std::vector<int> state_tokens;
    int root = -1;          // instruction index the chosen action operated on
    double delta_pi = 1.0;  // 1 - pi, the policy error
};

struct SearchStats {
    long expanded = 0;
    int max_depth = 0;
    double wall_ms = 0.0;
    bool success = false;
};

// Global expansion counter; the executor asserts it does not move during
// execution.
std::atomic<long>& search_expansion_counter();

// The driving problem supplies:
//   struct Candidate { Act action; double r_p; int root; };
//   State initial();  bool success(const State&);
//   std::vector<Candidate> candidates(const State&);
//   State apply(const State&, const Act&);
//   uint64_t state_hash(const State&);  int depth(const State&);
//   Policy policy(const State&): { std::vector<double> pi; double ac, ci; }
//     (pi empty when no agent guidance is available)
struct PolicyReply {
    std::vector<double> pi;
    double ac = 0.0;
    double ci = 0.0;
};

template <class Space>
struct SearchOutcome {
    using Act = typename Space::Act;
    bool success = false;
    typename Space::State final_state;
    std::vector<Act> actions;           // successful action sequence from s0
    std::vector<ModelingRecord> trail;  // per step of the successful path
    SearchStats stats;
    std::vector<typename Space::State> expansion_order; // states in expansion order
};

template <class Space>
SearchOutcome<Space> bddb_search(Space& space, const SearchParams& params,
                                 bool record_order = false) {
    params.validate();
    using State = typename Space::State;
    using Act = typename Space::Act;

    struct PathNode {
        State state;
        Act action;
        int root = -1;
        double pi = 0.0;
        double q = 0.0;
        std::shared_ptr<const PathNode> parent;
    };
    struct Entry {
        double q;
        long seq;
        std::shared_ptr<const PathNode> node;
    };
    struct Cmp {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.q != b.q) return a.q < b.q; // max-heap on q
            return a.seq > b.seq;             // FIFO among equal q
        }
    };

    SearchOutcome<Space> out;
    auto t0 = std::chrono::steady_clock::now();
    auto finish = [&](bool ok) {
        out.stats.success = ok;
        out.success = ok;
        out.stats.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        return out;
    };

    State s0 = space.initial();
    if (space.success(s0)) {
        out.final_state = s0;
        return finish(true);
    }

    std::priority_queue<Entry, std::vector<Entry>, Cmp> queue;
    std::unordered_set<uint64_t> seen;
    seen.insert(space.state_hash(s0));
    long seq = 0;

    auto push_candidates = [&](const State& s, const std::shared_ptr<const PathNode>& parent,
                               double q_prev) {
        PolicyReply reply = space.policy(s);
        long t = space.depth(s);
        for (auto& cand : space.candidates(s)) {
            double pi = 0.0;
            if (cand.root >= 0 && size_t(cand.root) < reply.pi.size())
                pi = reply.pi[size_t(cand.root)];
            double r = compute_reward(cand.r_p, pi, reply.ac, reply.ci, t, params);
            double q = compute_action_value(r, q_prev, t, params);
            auto node = std::make_shared<PathNode>();
            node->state = s;
            node->action = cand.action;
            node->root = cand.root;
            node->pi = pi;
            node->q = q;
            node->parent = parent;
            queue.push(Entry{q, seq++, node});
        }
    };

    push_candidates(s0, nullptr, 0.0);

    long expanded = 0;
    while (!queue.empty()) {
        if (expanded >= params.budget) return finish(false);
        Entry e = queue.top();
        queue.pop();

        State next = space.apply(e.node->state, e.node->action);
        ++expanded;
        out.stats.expanded = expanded;
        out.stats.max_depth = std::max(out.stats.max_depth, int(space.depth(next)));
        search_expansion_counter().fetch_add(1, std::memory_order_relaxed);
        if (record_order) out.expansion_order.push_back(next);

        if (space.success(next)) {
            // reconstruct [a_0 .. a_t] and the per-step modeling trail
            std::vector<const PathNode*> chain;
            for (const PathNode* n = e.node.get(); n; n = n->parent.get()) chain.push_back(n);
            std::reverse(chain.begin(), chain.end());
            for (const PathNode* n : chain) {
                out.actions.push_back(n->action);
                ModelingRecord rec;
                rec.root = n->root;
                rec.delta_pi = 1.0 - n->pi;
                rec.state_tokens = space.encode(n->state);
                out.trail.push_back(std::move(rec));
            }
            out.final_state = next;
            return finish(true);
        }

        uint64_t h = space.state_hash(next);
        if (!seen.insert(h).second) continue; // revisited states are not reinserted
        push_candidates(next, e.node, e.node->q);
    }
    return finish(false);
}

} // namespace cool

#endif
