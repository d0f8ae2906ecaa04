#ifndef COOL_GROUND_HPP
#define COOL_GROUND_HPP

#include <memory>
#include <optional>
#include <vector>

#include "cool/bddb.hpp"
#include "cool/encode.hpp"
#include "cool/lower.hpp"
#include "cool/match.hpp"
#include "cool/policy.hpp"

namespace cool {

// One node of the grounding search: a persistent segment plus the prompt step
// position and depth. States are immutable; applying an action produces a new
// state and never touches ancestors, which is what makes backtracking sound.
struct GroundingState {
    std::shared_ptr<const IrSegment> seg;
    int step = 1;
    int depth = 0;
    int last_pcp_max = 0; // terminal step owed by the most recent prompt-fired action
    uint64_t hash = 0;
};

struct Action {
    bool is_rule = false;
    int fn_id = -1;
    int root = -1;     // instruction index of the target sub-segment
    int fired_step = 1;
    double r_p = 0.0;  // prompt reward at the fired step
    Match match;
};

struct GroundOptions {
    bool pcp_enabled = true;
    double default_reward = 1.0;  // prompt-less functions
    double uniform_reward = -1.0; // reward when prompts are disabled
};

// Evaluation-order deduction for a mixed call sequence: the forward calls in
// original order, then the inverse calls reversed.
template <class Item, class IsInverse>
std::vector<Item> deduce_eval_order(const std::vector<Item>& calls, IsInverse&& is_inverse) {
    std::vector<Item> forward, inverse;
    for (const auto& c : calls) (is_inverse(c) ? inverse : forward).push_back(c);
    std::vector<Item> out = std::move(forward);
    out.insert(out.end(), inverse.rbegin(), inverse.rend());
    return out;
}

uint64_t segment_state_hash(const IrSegment& seg, int step, int last_pcp_max);

GroundingState make_initial_state(const IrSegment& seg);

bool is_ground(const IrSegment& seg);

std::vector<Action> enumerate_actions(const GroundingState& s, const DomainSet& d,
                                      const FnRegistry& registry, const GroundOptions& opts);

GroundingState apply_action(const GroundingState& s, const Action& a, const FnRegistry& registry,
                            const GroundOptions& opts);

// Search-space adapter plugging one query segment into the best-first search.
class GroundProblem {
public:
    using State = GroundingState;
    using Act = Action;
    struct Candidate {
        Action action;
        double r_p;
        int root;
    };

    GroundProblem(const IrSegment& seg, const DomainSet& d, const FnRegistry& registry,
                  PolicySource* agent, const Vocabulary& vocab, const GroundOptions& opts)
        : seg_(seg), domain_(d), registry_(registry), agent_(agent), vocab_(vocab), opts_(opts) {}

    State initial() const { return make_initial_state(seg_); }
    bool success(const State& s) const {
        return s.seg->ground() && (s.last_pcp_max == 0 || s.step == s.last_pcp_max);
    }
    std::vector<Candidate> candidates(const State& s) const {
        std::vector<Candidate> out;
        for (auto& a : enumerate_actions(s, domain_, registry_, opts_)) {
            Candidate c{a, a.r_p, a.root};
            out.push_back(std::move(c));
        }
        return out;
    }
    State apply(const State& s, const Act& a) const {
        return apply_action(s, a, registry_, opts_);
    }
    uint64_t state_hash(const State& s) const { return s.hash; }
    long depth(const State& s) const { return s.depth; }
    std::vector<int> encode(const State& s) const { return encode_state(*s.seg, vocab_); }
    PolicyReply policy(const State& s) const {
        if (!agent_) return {};
        return agent_->predict(encode(s), domain_, int(s.seg->instrs.size()));
    }

private:
    const IrSegment& seg_;
    const DomainSet& domain_;
    const FnRegistry& registry_;
    PolicySource* agent_;
    const Vocabulary& vocab_;
    GroundOptions opts_;
};

struct ModelingBatch {
    std::vector<ModelingRecord> records;
    DomainSet effective; // union of domains of the functions actually used
};

struct SegmentReport {
    bool success = false;
    long expanded = 0;
    int max_depth = 0;
    double wall_ms = 0.0;
    int path_len = 0;
    SourceLoc loc;
    std::string context;
};

struct GroundReport {
    std::vector<SegmentReport> segments;
    std::vector<ModelingBatch> batches;
    long total_expanded = 0;
    double total_ms = 0.0;
};

// Runs the search over every query segment (in source order), splicing each
// ground result back into its unit. Throws CoolError identifying the query
// when a segment cannot be ground within budget.
GroundReport ground_program(IrProgram& ir, const Analysis& analysis, PolicySource* agent,
                            const SearchParams& params, const GroundOptions& opts,
                            const Vocabulary& vocab);

} // namespace cool

#endif
