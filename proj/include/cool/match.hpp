#ifndef COOL_MATCH_HPP
#define COOL_MATCH_HPP

#include <map>
#include <optional>
#include <vector>

#include "cool/registry.hpp"
#include "cool/tac.hpp"

namespace cool {

// A value captured by a pattern variable: either an inline operand or the
// root instruction of a sub-segment.
struct MatchedVal {
    bool is_instr = false;
    Operand op;
    int instr = -1;
};

struct Match {
    int root = -1;                            // root instruction index
    std::map<std::string, MatchedVal> binds;  // pattern variable -> value
    std::vector<int> covered;                 // ascending instruction indexes of the subtree
    std::optional<MatchedVal> ans;            // equation RHS for ans-form inverse matches
};

// Derived navigation over one segment: temp definitions, children, and which
// subtrees contain logic variables.
class SegmentView {
public:
    explicit SegmentView(const IrSegment& seg);

    const IrSegment& seg() const { return *seg_; }
    int instr_of_temp(int temp) const; // -1 when not defined in segment
    bool subtree_has_logic(int instr) const { return has_logic_[size_t(instr)]; }
    bool operand_has_logic(const Operand& o) const;
    std::vector<int> subtree(int root) const;
    bool subtree_unbound(int root) const;

private:
    const IrSegment* seg_;
    std::vector<int> temp_def_;
    std::vector<bool> has_logic_;
};

// Attempts to match function `fn` with its subtree rooted at instruction
// `instr`. Facts additionally require every '$' slot to capture a bare logic
// variable; rules allow '$' slots to capture any logic-carrying subtree.
std::optional<Match> match_function_at(const SegmentView& view, int instr, const FnInfo& fn);

} // namespace cool

#endif
