#include "cool/encode.hpp"

#include <algorithm>
#include <unordered_map>

#include "cool/rng.hpp"

namespace cool {

namespace {
// token bands within the vocabulary (asserted <= 256)
constexpr int kVarBase = 8;       // determined variables
constexpr int kLogicBase = 72;    // logic variables
constexpr int kTempBase = 136;    // temps, by def-use distance
constexpr int kSigBase = 168;     // call signatures
constexpr int kBandVar = 56;      // hash band width for var names
constexpr int kBandSig = 80;
constexpr int kTempSpan = 31;
} // namespace

int Vocabulary::operand_token(const Operand& o, int use_index,
                              const std::vector<int>& temp_def) const {
    switch (o.kind) {
        case OperandKind::None: return kNone;
        case OperandKind::Const: return kConst;
        case OperandKind::Var: {
            int band = o.logic ? kLogicBase : kVarBase;
            return band + int(fnv1a(o.name) % kBandVar);
        }
        case OperandKind::Temp: {
            int def = o.id >= 0 && o.id < int(temp_def.size()) ? temp_def[size_t(o.id)] : -1;
            int dist = def >= 0 ? use_index - def : 0;
            dist = std::clamp(dist, 1, kTempSpan);
            return kTempBase + dist;
        }
        case OperandKind::Sig: return kSigBase + int(fnv1a(o.name) % kBandSig);
        case OperandKind::Label: return kTempBase; // label refs encode as distance-0 temps
    }
    return kUnk;
}

int Vocabulary::op_token(const std::string& op) const {
    if (op.empty()) return kNone;
    return 8 + int(fnv1a(op) % 248);
}

std::vector<int> encode_state(const std::vector<TacInstr>& instrs, const Vocabulary& vocab) {
    // map temp id -> defining instruction index
    int max_temp = -1;
    for (const auto& i : instrs)
        if (i.result.kind == OperandKind::Temp) max_temp = std::max(max_temp, i.result.id);
    std::vector<int> temp_def(size_t(max_temp + 1), -1);
    for (size_t k = 0; k < instrs.size(); ++k) {
        const auto& r = instrs[k].result;
        if (r.kind == OperandKind::Temp && r.id >= 0) temp_def[size_t(r.id)] = int(k);
    }

    std::vector<int> tokens;
    tokens.reserve(instrs.size() * kTokensPerInstr);
    for (size_t k = 0; k < instrs.size(); ++k) {
        const auto& i = instrs[k];
        tokens.push_back(i.code);
        tokens.push_back(vocab.operand_token(i.lhs, int(k), temp_def));
        tokens.push_back(vocab.operand_token(i.rhs, int(k), temp_def));
        tokens.push_back(vocab.op_token(i.op));
        tokens.push_back(Vocabulary::flags_token(i));
    }
    return tokens;
}

} // namespace cool
