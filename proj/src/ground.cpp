#include "cool/ground.hpp"

#include <algorithm>
#include <cassert>
#include <cstring>

#include "cool/rng.hpp"

namespace cool {

namespace {

uint64_t operand_hash(const Operand& o, const SegmentView& view) {
    uint64_t h = uint64_t(o.kind) * 0x9ddfea08eb382d69ull;
    switch (o.kind) {
        case OperandKind::Const: {
            uint64_t bits;
            static_assert(sizeof(bits) == sizeof(o.value));
            std::memcpy(&bits, &o.value, sizeof(bits));
            h = hash_mix(h, bits);
            break;
        }
        case OperandKind::Var:
            h = hash_mix(h, fnv1a(o.name));
            h = hash_mix(h, o.logic ? 7 : 3);
            break;
        case OperandKind::Temp:
            // normalize by defining position so renumbered copies hash equal
            h = hash_mix(h, uint64_t(view.instr_of_temp(o.id)) + 11);
            break;
        case OperandKind::Sig:
            h = hash_mix(h, fnv1a(o.name) ^ 0x5851f42d4c957f2dull);
            break;
        case OperandKind::Label:
            h = hash_mix(h, uint64_t(o.id) + 29);
            break;
        case OperandKind::None:
            break;
    }
    return h;
}

} // namespace

uint64_t segment_state_hash(const IrSegment& seg, int step, int last_pcp_max) {
    SegmentView view(seg);
    uint64_t h = 0x2545f4914f6cdd1dull;
    for (const auto& i : seg.instrs) {
        h = hash_mix(h, uint64_t(i.code));
        h = hash_mix(h, fnv1a(i.op));
        h = hash_mix(h, operand_hash(i.lhs, view));
        h = hash_mix(h, operand_hash(i.rhs, view));
        h = hash_mix(h, uint64_t(i.bound_fn + 2));
    }
    h = hash_mix(h, uint64_t(step));
    h = hash_mix(h, uint64_t(last_pcp_max + 1));
    return h;
}

GroundingState make_initial_state(const IrSegment& seg) {
    GroundingState s;
    s.seg = std::make_shared<IrSegment>(seg);
    s.step = 1;
    s.depth = 0;
    s.last_pcp_max = 0;
    s.hash = segment_state_hash(seg, s.step, s.last_pcp_max);
    return s;
}

bool is_ground(const IrSegment& seg) { return seg.ground(); }

namespace {

// Principle-1 admissibility: a prompted function fires at the smallest step
// i >= current with a nonzero entry; prompt-less functions fire at the
// current step. Returns (fired_step, reward) or nothing when inadmissible.
std::optional<std::pair<int, double>> admissible_at(const FnInfo& fn, int step,
                                                    const GroundOptions& opts) {
    if (!opts.pcp_enabled) return std::make_pair(step, opts.uniform_reward);
    if (!fn.pcp) return std::make_pair(step, opts.default_reward);
    const auto& e = fn.pcp->entries;
    for (int i = step; i <= int(e.size()); ++i) {
        if (e[size_t(i - 1)] != 0.0) return std::make_pair(i, e[size_t(i - 1)]);
    }
    return std::nullopt;
}

} // namespace

std::vector<Action> enumerate_actions(const GroundingState& s, const DomainSet& d,
                                      const FnRegistry& registry, const GroundOptions& opts) {
    std::vector<Action> out;
    const IrSegment& seg = *s.seg;
    if (seg.ground()) return out;
    SegmentView view(seg);

    for (int idx = 0; idx < int(seg.instrs.size()); ++idx) {
        for (const auto& fn : registry.fns) {
            if (!d.contains(fn.domain)) continue;
            auto fired = admissible_at(fn, s.step, opts);
            if (!fired) continue;
            auto m = match_function_at(view, idx, fn);
            if (!m) continue;
            bool clean = true;
            for (int k : m->covered) clean &= seg.instrs[size_t(k)].bound_fn < 0;
            if (!clean) continue;

            Action a;
            a.is_rule = fn.kind == FunctionKind::Rule;
            a.fn_id = fn.id;
            a.root = idx;
            a.fired_step = fired->first;
            a.r_p = fired->second;
            a.match = std::move(*m);
            out.push_back(std::move(a));
        }
    }
    return out;
}

namespace {

ArgRef arg_ref(const IrSegment& seg, const MatchedVal& v) {
    ArgRef r;
    if (v.is_instr) {
        r.is_addr = true;
        r.addr = seg.instrs[size_t(v.instr)].addr;
    } else {
        r.op = v.op;
    }
    return r;
}

GroundingState bind_fact(const GroundingState& s, const Action& a, const FnInfo& fn) {
    auto next = std::make_shared<IrSegment>(*s.seg);
    for (int k : a.match.covered) next->instrs[size_t(k)].bound_fn = a.fn_id;

    RegionBinding region;
    region.fn_id = a.fn_id;
    region.root = next->instrs[size_t(a.root)].addr;
    for (const auto& [name, val] : a.match.binds) {
        region.args.emplace_back(name, arg_ref(*s.seg, val));
        char mode = fn.decl->param_modes.count(name) ? fn.decl->param_modes.at(name) : 0;
        if (mode == '$') {
            // matcher guarantees a bare logic variable here
            region.out_vars.emplace_back(name, val.op.name);
        }
    }
    if (a.match.ans) region.ans = arg_ref(*s.seg, *a.match.ans);
    next->regions.push_back(std::move(region));

    GroundingState r;
    r.seg = std::move(next);
    r.step = a.fired_step;
    r.depth = s.depth + 1;
    r.last_pcp_max = s.last_pcp_max;
    return r;
}

// Builds replacement instructions for a rule's return expression.
class RuleBuilder {
public:
    RuleBuilder(const IrSegment& seg, const SegmentView& view, const Match& match, int* next_temp)
        : seg_(seg), view_(view), match_(match), next_temp_(next_temp) {}

    std::vector<TacInstr> rows;

    Operand gen(const Expr& e) {
        switch (e.kind) {
            case ExprKind::Number:
                return Operand::constant(e.number);
            case ExprKind::VarRef: {
                auto it = match_.binds.find(e.name);
                if (it == match_.binds.end()) return Operand::var(e.name);
                if (!it->second.is_instr) return it->second.op;
                return copy_subtree(it->second.instr);
            }
            case ExprKind::Member:
                return Operand::var(e.name + "." + e.field);
            case ExprKind::Unary: {
                Operand v = gen(*e.args[0]);
                if (v.kind == OperandKind::Const) return Operand::constant(-v.value);
                return emit(4, "neg", v, Operand::none(), e.loc);
            }
            case ExprKind::Binary: {
                Operand l = gen(*e.args[0]);
                Operand r = gen(*e.args[1]);
                return emit(4, e.op, l, r, e.loc);
            }
            case ExprKind::Builtin: {
                Operand v = gen(*e.args[0]);
                return emit(4, e.name, v, Operand::none(), e.loc);
            }
            case ExprKind::Call: {
                std::vector<Operand> args;
                for (const auto& a : e.args) args.push_back(gen(*a));
                Operand tuple = Operand::none();
                if (!args.empty()) {
                    tuple = args[0];
                    for (size_t k = 1; k < args.size(); ++k)
                        tuple = emit(4, "COMMA", tuple, args[k], e.loc);
                }
                TacInstr i;
                i.code = 6;
                i.op = "@";
                i.lhs = Operand::sig(normalize_signature(e.parts));
                i.rhs = tuple;
                i.result = Operand::temp((*next_temp_)++);
                i.loc = e.loc;
                i.refresh_flags();
                rows.push_back(i);
                return rows.back().result;
            }
        }
        throw CoolError("unreachable rule expression");
    }

private:
    const IrSegment& seg_;
    const SegmentView& view_;
    const Match& match_;
    int* next_temp_;

    Operand emit(int code, const std::string& op, const Operand& l, const Operand& r,
                 SourceLoc loc) {
        TacInstr i;
        i.code = code;
        i.op = op;
        i.lhs = l;
        i.rhs = r;
        i.result = Operand::temp((*next_temp_)++);
        i.loc = loc;
        i.refresh_flags();
        rows.push_back(i);
        return rows.back().result;
    }

    Operand copy_subtree(int root) {
        const auto& node = seg_.instrs[size_t(root)];
        Operand l = copy_operand(node.lhs);
        Operand r = copy_operand(node.rhs);
        TacInstr i = node;
        i.lhs = l;
        i.rhs = r;
        if (i.result.kind == OperandKind::Temp) i.result = Operand::temp((*next_temp_)++);
        i.refresh_flags();
        rows.push_back(i);
        return rows.back().result;
    }

    Operand copy_operand(const Operand& o) {
        if (o.kind == OperandKind::Temp) {
            int d = view_.instr_of_temp(o.id);
            if (d >= 0) return copy_subtree(d);
        }
        return o;
    }
};

GroundingState apply_rule(const GroundingState& s, const Action& a, const FnInfo& fn) {
    const IrSegment& seg = *s.seg;
    SegmentView view(seg);

    const auto& covered = a.match.covered;
    int lo = covered.front();
    int hi = covered.back();
    if (hi - lo + 1 != int(covered.size())) {
        throw CoolError("internal: matched subtree is not a contiguous instruction range");
    }

    auto next = std::make_shared<IrSegment>(seg);
    RuleBuilder builder(seg, view, a.match, &next->next_temp);
    const Stmt& ret = fn.decl->body.front(); // validated: single return statement
    Operand result = builder.gen(*ret.value);

    Operand old_root_temp = seg.instrs[size_t(hi)].result;

    std::optional<HierAddr> bound_lo =
        lo > 0 ? std::optional<HierAddr>(seg.instrs[size_t(lo - 1)].addr) : seg.bound_lo;
    std::optional<HierAddr> bound_hi = hi + 1 < int(seg.instrs.size())
                                           ? std::optional<HierAddr>(seg.instrs[size_t(hi + 1)].addr)
                                           : seg.bound_hi;
    auto addrs = alloc_addresses(bound_lo, bound_hi, builder.rows.size());
    for (size_t k = 0; k < builder.rows.size(); ++k) builder.rows[k].addr = addrs[k];

    std::vector<TacInstr> merged;
    merged.reserve(seg.instrs.size() - covered.size() + builder.rows.size());
    merged.insert(merged.end(), next->instrs.begin(), next->instrs.begin() + lo);
    merged.insert(merged.end(), builder.rows.begin(), builder.rows.end());
    merged.insert(merged.end(), next->instrs.begin() + hi + 1, next->instrs.end());

    // Re-point the parent of the replaced subtree (if any) at the new result.
    if (old_root_temp.kind == OperandKind::Temp) {
        for (auto& instr : merged) {
            for (Operand* o : {&instr.lhs, &instr.rhs}) {
                if (o->kind == OperandKind::Temp && o->id == old_root_temp.id) {
                    *o = result;
                    instr.refresh_flags();
                }
            }
        }
    }
    next->instrs = std::move(merged);

    GroundingState r;
    r.seg = std::move(next);
    r.step = a.fired_step;
    r.depth = s.depth + 1;
    r.last_pcp_max = s.last_pcp_max;
    return r;
}

} // namespace

GroundingState apply_action(const GroundingState& s, const Action& a, const FnRegistry& registry,
                            const GroundOptions& opts) {
    const FnInfo& fn = registry[a.fn_id];
    GroundingState next = a.is_rule ? apply_rule(s, a, fn) : bind_fact(s, a, fn);
    if (opts.pcp_enabled && fn.pcp) next.last_pcp_max = fn.pcp->max_step();
    next.hash = segment_state_hash(*next.seg, next.step, next.last_pcp_max);
    return next;
}

GroundReport ground_program(IrProgram& ir, const Analysis& analysis, PolicySource* agent,
                            const SearchParams& params, const GroundOptions& opts,
                            const Vocabulary& vocab) {
    GroundReport report;
    for (auto& seg : ir.queries) {
        auto dom_it = analysis.domains.find(seg.context);
        static const DomainSet kEmpty;
        const DomainSet& d = dom_it == analysis.domains.end() ? kEmpty : dom_it->second;

        GroundProblem problem(seg, d, analysis.registry, agent, vocab, opts);
        auto outcome = bddb_search(problem, params);

        SegmentReport sr;
        sr.success = outcome.success;
        sr.expanded = outcome.stats.expanded;
        sr.max_depth = outcome.stats.max_depth;
        sr.wall_ms = outcome.stats.wall_ms;
        sr.path_len = int(outcome.actions.size());
        sr.loc = seg.loc;
        sr.context = seg.context;
        report.segments.push_back(sr);
        report.total_expanded += sr.expanded;
        report.total_ms += sr.wall_ms;

        if (!outcome.success) {
            throw CoolError("unable to ground query (" + std::to_string(outcome.stats.expanded) +
                                " states explored)",
                            seg.loc);
        }

        ModelingBatch batch;
        batch.records = std::move(outcome.trail);
        for (const auto& act : outcome.actions) {
            batch.effective.add(analysis.registry[act.fn_id].domain);
        }
        report.batches.push_back(std::move(batch));

        // Splice the ground segment back over the original address range.
        IrUnit& unit = unit_for(ir, seg.context);
        const IrSegment& g = *outcome.final_state.seg;
        size_t lo = 0;
        while (lo < unit.instrs.size() && unit.instrs[lo].addr < seg.instrs.front().addr) ++lo;
        size_t hi = lo;
        while (hi < unit.instrs.size() && unit.instrs[hi].addr <= seg.instrs.back().addr) ++hi;
        std::vector<TacInstr> merged;
        merged.reserve(unit.instrs.size() - (hi - lo) + g.instrs.size());
        merged.insert(merged.end(), unit.instrs.begin(), unit.instrs.begin() + long(lo));
        merged.insert(merged.end(), g.instrs.begin(), g.instrs.end());
        merged.insert(merged.end(), unit.instrs.begin() + long(hi), unit.instrs.end());
        unit.instrs = std::move(merged);
        unit.next_temp = std::max(unit.next_temp, g.next_temp);
        for (const auto& region : g.regions) unit.regions.push_back(region);
        if (!g.instrs.empty()) {
            for (auto& span : unit.stmts) {
                if (span.is_query && span.first == seg.instrs.front().addr) {
                    span.first = g.instrs.front().addr;
                    span.last = g.instrs.back().addr;
                    break;
                }
            }
        }
        // the stored segment now reflects the ground form
        seg = g;
    }
    return report;
}

} // namespace cool
