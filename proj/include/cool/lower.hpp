#ifndef COOL_LOWER_HPP
#define COOL_LOWER_HPP

#include <map>
#include <string>
#include <vector>

#include "cool/registry.hpp"
#include "cool/tac.hpp"

namespace cool {

// Address-delimited statement extent inside a unit. Extents are recorded by
// address so splicing a ground query back in never invalidates them.
struct StmtSpan {
    HierAddr first, last;
    StmtKind kind;
    SourceLoc loc;
    bool is_query = false;
};

// A straight-line instruction sequence: the top level or one class body.
struct IrUnit {
    std::string context; // "" for top level, else class name
    std::vector<TacInstr> instrs;
    std::vector<StmtSpan> stmts;
    std::vector<RegionBinding> regions; // populated when queries are ground
    int next_temp = 0;
};

// Lowered declaration rows (signature block, dispatch rows, body block).
struct IrFunction {
    int fn_id = -1;
    std::vector<TacInstr> rows;
    size_t body_first = 0, body_last = 0; // index range of body statements in rows
};

struct IrProgram {
    IrUnit main;
    std::map<std::string, IrUnit> class_units;
    std::vector<IrFunction> funcs;      // indexed by fn id (query components share the group rows)
    std::vector<IrSegment> queries;     // extracted query segments (copies of unit ranges)
    std::string source_name;
};

IrProgram lower(const Program& prog, const Analysis& analysis);

// The query segments of a lowered program (already maximal per statement).
const std::vector<IrSegment>& extract_query_segments(const IrProgram& ir);

IrUnit& unit_for(IrProgram& ir, const std::string& context);
const IrUnit& unit_for(const IrProgram& ir, const std::string& context);

} // namespace cool

#endif
