#include "cool/tac.hpp"

#include <algorithm>

#include "cool/printer.hpp"

namespace cool {

namespace {
constexpr int kSpread = 1 << 20; // virtual ceiling when a bound is exhausted
}

std::string HierAddr::str() const {
    std::string s = "{";
    for (size_t i = 0; i < comps.size(); ++i) {
        if (i) s += ".";
        s += std::to_string(comps[i]);
    }
    return s + "}";
}

namespace {

// First index at which the zero-padded component sequences differ. For a < b
// that index always exists and carries floor < ceiling.
size_t first_padded_difference(const HierAddr& a, const HierAddr& b, int& av, int& bv) {
    size_t limit = std::max(a.comps.size(), b.comps.size());
    for (size_t i = 0; i <= limit; ++i) {
        av = i < a.comps.size() ? a.comps[i] : 0;
        bv = i < b.comps.size() ? b.comps[i] : 0;
        if (av != bv) return i;
    }
    throw CoolError("addresses are equal under padding");
}

std::vector<int> padded_prefix(const HierAddr& a, size_t i) {
    std::vector<int> out(a.comps.begin(), a.comps.begin() + long(std::min(i, a.comps.size())));
    while (out.size() < i) out.push_back(0);
    return out;
}

} // namespace

// Comparison treats missing components as zero, so the first differing
// (padded) index of a < b always has floor < ceiling.
HierAddr address_between(const HierAddr& a, const HierAddr& b) {
    if (!(a < b)) throw CoolError("address_between requires a < b");
    int av = 0, bv = 0;
    size_t i = first_padded_difference(a, b, av, bv);
    if (av > bv) throw CoolError("address_between requires a < b");

    HierAddr c;
    c.comps = padded_prefix(a, i);
    if (bv - av > 1) {
        c.comps.push_back(av + (bv - av) / 2); // integer midpoint
        return c;
    }
    // Adjacent at this level: pin the floor component and descend with a
    // child suffix that exceeds whatever remains of a.
    c.comps.push_back(av);
    if (i + 1 < a.comps.size()) {
        c.comps.insert(c.comps.end(), a.comps.begin() + long(i) + 1, a.comps.end());
    }
    c.comps.push_back(1); // adjacent integers force descent: {1},{2} -> {1,1}
    return c;
}

std::vector<HierAddr> alloc_addresses(const std::optional<HierAddr>& lo,
                                      const std::optional<HierAddr>& hi, size_t n) {
    std::vector<HierAddr> out;
    if (n == 0) return out;
    HierAddr floor = lo ? *lo : HierAddr{{0}};
    HierAddr ceil;
    if (hi) {
        ceil = *hi;
    } else {
        int base = floor.comps.empty() ? 0 : floor.comps[0];
        ceil = HierAddr{{base + int(n) * 2 + 2}};
    }
    if (!(floor < ceil)) throw CoolError("alloc_addresses requires lo < hi");

    int av = 0, bv = 0;
    size_t i = first_padded_difference(floor, ceil, av, bv);
    std::vector<int> prefix = padded_prefix(floor, i);

    auto even_space = [&out](std::vector<int> pre, long lo_v, long hi_v, size_t count) {
        long prev = lo_v;
        for (size_t j = 1; j <= count; ++j) {
            long c = lo_v + long((double(j) * double(hi_v - lo_v)) / double(count + 1));
            if (c <= prev) c = prev + 1;
            prev = c;
            HierAddr h;
            h.comps = pre;
            h.comps.push_back(int(c));
            out.push_back(std::move(h));
        }
    };

    if (long(bv) - long(av) - 1 >= long(n)) {
        even_space(prefix, av, bv, n);
        return out;
    }
    if (i + 1 >= floor.comps.size()) {
        // floor has no tail: use children of prefix+[av]; all of them sort after
        // floor (proper extensions) and before ceil (differ at index i).
        prefix.push_back(av);
        even_space(prefix, 0, kSpread, n);
        return out;
    }
    // General fallback: chain forward one at a time.
    HierAddr cur = floor;
    for (size_t j = 0; j < n; ++j) {
        cur = address_between(cur, ceil);
        out.push_back(cur);
    }
    return out;
}

std::string Operand::str() const {
    switch (kind) {
        case OperandKind::None: return "";
        case OperandKind::Const: return format_number(value);
        case OperandKind::Var: return (logic ? "$" : "") + name;
        case OperandKind::Temp: return std::to_string(id);
        case OperandKind::Sig: return name;
        case OperandKind::Label: return std::to_string(id);
    }
    return "";
}

bool Operand::equal(const Operand& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
        case OperandKind::None: return true;
        case OperandKind::Const: return value == o.value;
        case OperandKind::Var: return name == o.name && logic == o.logic;
        case OperandKind::Temp: return id == o.id;
        case OperandKind::Sig: return name == o.name;
        case OperandKind::Label: return id == o.id;
    }
    return false;
}

int operand_flag(const Operand& o) {
    switch (o.kind) {
        case OperandKind::Const: return 1;
        case OperandKind::Var: return 2;
        case OperandKind::Sig: return 3;
        default: return 0;
    }
}

std::string dump_instr(const TacInstr& i) {
    std::string s;
    s += std::to_string(i.code);
    s += "\t" + i.lhs.str();
    s += "\t" + i.rhs.str();
    s += "\t" + i.op;
    s += "\t" + i.result.str();
    for (int f : i.flags) s += "\t" + std::to_string(f);
    return s;
}

std::string dump_segment(const std::vector<TacInstr>& instrs, bool header) {
    std::string out;
    if (header) {
        out += "Code Type\tLHS\tRHS\tOperator\tResult\tLHS Flag\tRHS Flag\tOperator Flag\tResult "
               "Flag\n";
    }
    for (const auto& i : instrs) out += dump_instr(i) + "\n";
    return out;
}

} // namespace cool
