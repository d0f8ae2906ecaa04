#ifndef COOL_ENCODE_HPP
#define COOL_ENCODE_HPP

#include <cstdint>
#include <vector>

#include "cool/tac.hpp"

namespace cool {

// Fixed hashed vocabulary for the sequence model. Every instruction encodes
// to one 5-token group: code type, lhs class token, rhs class token, operator
// token and the packed attribute flags. Symbols are hashed into the
// vocabulary; constants encode by class alone; temps encode by the distance
// to their defining instruction so structurally identical segments encode
// identically regardless of temp numbering.
struct Vocabulary {
    int size = 256;

    static constexpr int kUnk = 0;
    static constexpr int kNone = 1;
    static constexpr int kConst = 2;

    int operand_token(const Operand& o, int use_index, const std::vector<int>& temp_def) const;
    int op_token(const std::string& op) const;
    static int flags_token(const TacInstr& i) {
        return ((i.flags[0] & 3) << 6) | ((i.flags[1] & 3) << 4) | ((i.flags[2] & 3) << 2) |
               (i.flags[3] & 3);
    }
};

constexpr int kTokensPerInstr = 5;

std::vector<int> encode_state(const std::vector<TacInstr>& instrs, const Vocabulary& vocab);
inline std::vector<int> encode_state(const IrSegment& seg, const Vocabulary& vocab) {
    return encode_state(seg.instrs, vocab);
}

} // namespace cool

#endif
