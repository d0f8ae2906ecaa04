#ifndef COOL_TAC_HPP
#define COOL_TAC_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cool/source.hpp"

namespace cool {

// Hierarchical instruction address: a nonempty component sequence ordered
// lexicographically (a proper prefix sorts first). Components are generated
// nonnegative except the leading one; the scheme guarantees that a fresh
// address exists strictly between any two distinct addresses, so splices
// never need to renumber instructions outside the replaced range.
struct HierAddr {
    std::vector<int> comps;

    static HierAddr of(std::initializer_list<int> c) { return HierAddr{std::vector<int>(c)}; }

    int compare(const HierAddr& o) const {
        size_t n = std::min(comps.size(), o.comps.size());
        for (size_t i = 0; i < n; ++i) {
            if (comps[i] != o.comps[i]) return comps[i] < o.comps[i] ? -1 : 1;
        }
        if (comps.size() == o.comps.size()) return 0;
        return comps.size() < o.comps.size() ? -1 : 1;
    }
    bool operator<(const HierAddr& o) const { return compare(o) < 0; }
    bool operator==(const HierAddr& o) const { return comps == o.comps; }
    bool operator!=(const HierAddr& o) const { return comps != o.comps; }
    bool operator<=(const HierAddr& o) const { return compare(o) <= 0; }

    std::string str() const;
};

// An address strictly between a and b (requires a < b). Midpoint of the first
// differing component when there is room, otherwise descends one level.
HierAddr address_between(const HierAddr& a, const HierAddr& b);

// n fresh strictly increasing addresses in the open interval (lo, hi); either
// bound may be absent (open end).
std::vector<HierAddr> alloc_addresses(const std::optional<HierAddr>& lo,
                                      const std::optional<HierAddr>& hi, size_t n);

enum class OperandKind { None, Const, Var, Temp, Sig, Label };

struct Operand {
    OperandKind kind = OperandKind::None;
    double value = 0.0;   // Const
    std::string name;     // Var / Sig
    int id = -1;          // Temp / Label
    bool logic = false;   // Var only: undetermined in its segment

    static Operand none() { return {}; }
    static Operand constant(double v) {
        Operand o;
        o.kind = OperandKind::Const;
        o.value = v;
        return o;
    }
    static Operand var(std::string n, bool logic_var = false) {
        Operand o;
        o.kind = OperandKind::Var;
        o.name = std::move(n);
        o.logic = logic_var;
        return o;
    }
    static Operand temp(int t) {
        Operand o;
        o.kind = OperandKind::Temp;
        o.id = t;
        return o;
    }
    static Operand sig(std::string s) {
        Operand o;
        o.kind = OperandKind::Sig;
        o.name = std::move(s);
        return o;
    }
    static Operand label(int l) {
        Operand o;
        o.kind = OperandKind::Label;
        o.id = l;
        return o;
    }
    bool is(OperandKind k) const { return kind == k; }
    std::string str() const;
    bool equal(const Operand& o) const;
};

// Attribute flag per operand column: 0 unused/temp/label, 1 constant,
// 2 variable, 3 signature.
int operand_flag(const Operand& o);

// Code types follow the observed numbering: 1 block begin, 2 block end,
// 4 operation, 5 return, 6 call/jump.
struct TacInstr {
    int code = 4;
    Operand lhs, rhs, result;
    std::string op; // "+", "==", "COMMA", "CALL", "=", "neg", "@", "@new", "-->screen", builtin names
    std::array<int, 4> flags = {0, 0, 0, 0}; // lhs, rhs, operator, result
    HierAddr addr;
    int bound_fn = -1; // fact function id once ground
    SourceLoc loc;

    void refresh_flags() {
        flags[0] = operand_flag(lhs);
        flags[1] = operand_flag(rhs);
        flags[2] = op.empty() ? 0 : 2;
        flags[3] = operand_flag(result);
    }
};

// One matched argument of a bound fact function: either an inline operand or
// the address of a sub-instruction whose subtree produces the value.
struct ArgRef {
    bool is_addr = false;
    Operand op;
    HierAddr addr;
};

// Execution record attached to a ground region: which function was bound at
// which root, its matched arguments, the optional equation right-hand side
// feeding 'ans', and the undetermined variable it must bind.
struct RegionBinding {
    int fn_id = -1;
    HierAddr root;
    std::vector<std::pair<std::string, ArgRef>> args; // parameter name -> matched value
    std::optional<ArgRef> ans;
    std::vector<std::pair<std::string, std::string>> out_vars; // param name -> caller variable
};

struct IrSegment {
    std::vector<TacInstr> instrs; // strictly increasing addresses
    std::vector<RegionBinding> regions;
    int next_temp = 0;
    std::string context;   // "" top level, otherwise class name
    int origin_stmt = -1;  // statement ordinal, for diagnostics
    SourceLoc loc;
    // Open interval available for splicing at the segment edges.
    std::optional<HierAddr> bound_lo, bound_hi;

    bool ground() const {
        for (const auto& i : instrs)
            if (i.bound_fn < 0) return false;
        return true;
    }
};

// Tab-separated dump, one instruction per line, columns matching the IR
// table layout (code type, operands, operator, result, four flags).
std::string dump_instr(const TacInstr& i);
std::string dump_segment(const std::vector<TacInstr>& instrs, bool header = true);

} // namespace cool

#endif
