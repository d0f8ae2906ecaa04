#include "cool/match.hpp"

#include <algorithm>
#include <cmath>

namespace cool {

namespace {

// Match target: either an inline operand or an instruction of the segment.
struct Tgt {
    bool is_instr = false;
    Operand op;
    int instr = -1;
};

Tgt target_of_operand(const SegmentView& view, const Operand& o) {
    if (o.kind == OperandKind::Temp) {
        int idx = view.instr_of_temp(o.id);
        if (idx >= 0) return Tgt{true, {}, idx};
    }
    return Tgt{false, o, -1};
}

bool target_has_logic(const SegmentView& view, const Tgt& t) {
    if (t.is_instr) return view.subtree_has_logic(t.instr);
    return t.op.kind == OperandKind::Var && t.op.logic;
}

bool targets_equal(const SegmentView& view, const Tgt& a, const Tgt& b);

bool instrs_equal(const SegmentView& view, int ia, int ib) {
    const auto& a = view.seg().instrs[size_t(ia)];
    const auto& b = view.seg().instrs[size_t(ib)];
    if (a.code != b.code || a.op != b.op) return false;
    return targets_equal(view, target_of_operand(view, a.lhs), target_of_operand(view, b.lhs)) &&
           targets_equal(view, target_of_operand(view, a.rhs), target_of_operand(view, b.rhs));
}

bool targets_equal(const SegmentView& view, const Tgt& a, const Tgt& b) {
    if (a.is_instr != b.is_instr) return false;
    if (!a.is_instr) return a.op.equal(b.op);
    return instrs_equal(view, a.instr, b.instr);
}

class Matcher {
public:
    Matcher(const SegmentView& view, const FnInfo& fn)
        : view_(view), fn_(fn),
          dollar_needs_bare_(fn.kind != FunctionKind::Rule) {}

    std::optional<Match> run(int instr) {
        const auto& node = view_.seg().instrs[size_t(instr)];
        const FunctionDecl& decl = *fn_.decl;

        if (fn_.kind == FunctionKind::Rule) {
            if (!match_pattern_root(decl, instr)) return std::nullopt;
            return finish(instr);
        }
        if (fn_.kind == FunctionKind::ForwardFact) {
            if (view_.subtree_has_logic(instr)) return std::nullopt;
            if (!match_pattern_root(decl, instr)) return std::nullopt;
            return finish(instr);
        }
        // Inverse facts. Patterns whose root is an equation bind directly at
        // '=='; otherwise they bind at an equation whose left side matches the
        // pattern and whose determined right side supplies 'ans'.
        bool pattern_has_eq =
            !decl.has_name_pattern && decl.pattern->kind == ExprKind::Binary &&
            decl.pattern->op == "==";
        if (node.code != 4 || node.op != "==") return std::nullopt;
        if (pattern_has_eq) {
            if (!match_pattern_root(decl, instr)) return std::nullopt;
            return finish(instr);
        }
        Tgt lhs = target_of_operand(view_, node.lhs);
        Tgt rhs = target_of_operand(view_, node.rhs);
        if (target_has_logic(view_, rhs)) return std::nullopt; // 'ans' side must be determined
        if (!match_target(decl, lhs)) return std::nullopt;
        ans_ = to_val(rhs);
        return finish(instr);
    }

private:
    const SegmentView& view_;
    const FnInfo& fn_;
    bool dollar_needs_bare_;
    std::map<std::string, MatchedVal> binds_;
    std::optional<MatchedVal> ans_;

    static MatchedVal to_val(const Tgt& t) {
        MatchedVal v;
        v.is_instr = t.is_instr;
        v.op = t.op;
        v.instr = t.instr;
        return v;
    }
    static Tgt to_tgt(const MatchedVal& v) { return Tgt{v.is_instr, v.op, v.instr}; }

    bool match_pattern_root(const FunctionDecl& decl, int instr) {
        if (decl.has_name_pattern) return match_call_instr(decl, instr);
        return match_expr(*decl.pattern, Tgt{true, {}, instr});
    }

    bool match_target(const FunctionDecl& decl, const Tgt& t) {
        if (decl.has_name_pattern) {
            if (!t.is_instr) return false;
            return match_call_instr(decl, t.instr);
        }
        return match_expr(*decl.pattern, t);
    }

    // mixfix name applied to a call instruction
    bool match_call_instr(const FunctionDecl& decl, int instr) {
        const auto& node = view_.seg().instrs[size_t(instr)];
        if (node.code != 6 || node.op != "@") return false;
        if (node.lhs.kind != OperandKind::Sig || node.lhs.name != fn_.signature) return false;
        std::vector<Tgt> args;
        flatten_args(node.rhs, args);
        std::vector<ParamSlot> slots;
        for (const auto& group : decl.arg_slots)
            for (const auto& s : group) slots.push_back(s);
        if (slots.size() != args.size()) return false;
        for (size_t k = 0; k < slots.size(); ++k) {
            char mode = decl.param_modes.count(slots[k].name)
                            ? decl.param_modes.at(slots[k].name)
                            : slots[k].prefix;
            if (!bind_var(slots[k].name, mode, args[k])) return false;
        }
        return true;
    }

    void flatten_args(const Operand& o, std::vector<Tgt>& out) {
        if (o.kind == OperandKind::None) return;
        if (o.kind == OperandKind::Temp) {
            int idx = view_.instr_of_temp(o.id);
            if (idx >= 0 && view_.seg().instrs[size_t(idx)].op == "COMMA") {
                flatten_args(view_.seg().instrs[size_t(idx)].lhs, out);
                flatten_args(view_.seg().instrs[size_t(idx)].rhs, out);
                return;
            }
        }
        out.push_back(target_of_operand(view_, o));
    }

    bool bind_var(const std::string& name, char mode, const Tgt& t) {
        auto it = binds_.find(name);
        if (it != binds_.end()) return targets_equal(view_, to_tgt(it->second), t);
        bool logic = target_has_logic(view_, t);
        if (mode == '$') {
            if (dollar_needs_bare_) {
                if (t.is_instr || t.op.kind != OperandKind::Var || !t.op.logic) return false;
            } else if (!logic) {
                return false;
            }
        } else if (mode == '#') {
            // matches either
        } else {
            if (logic) return false;
        }
        binds_[name] = to_val(t);
        return true;
    }

    bool match_expr(const Expr& p, const Tgt& t) {
        switch (p.kind) {
            case ExprKind::Number:
                return !t.is_instr && t.op.kind == OperandKind::Const &&
                       std::fabs(t.op.value - p.number) < 1e-12;
            case ExprKind::VarRef: {
                char mode = 0;
                if (fn_.decl->param_modes.count(p.name)) mode = fn_.decl->param_modes.at(p.name);
                return bind_var(p.name, mode, t);
            }
            case ExprKind::Member:
                return !t.is_instr && t.op.kind == OperandKind::Var &&
                       t.op.name == p.name + "." + p.field;
            case ExprKind::Unary: {
                // negative literal patterns fold like the lowering does
                if (p.args[0]->kind == ExprKind::Number) {
                    return !t.is_instr && t.op.kind == OperandKind::Const &&
                           std::fabs(t.op.value + p.args[0]->number) < 1e-12;
                }
                if (!t.is_instr) return false;
                const auto& node = view_.seg().instrs[size_t(t.instr)];
                if (node.code != 4 || node.op != "neg") return false;
                return match_expr(*p.args[0], target_of_operand(view_, node.lhs));
            }
            case ExprKind::Binary: {
                if (!t.is_instr) return false;
                const auto& node = view_.seg().instrs[size_t(t.instr)];
                if (node.code != 4 || node.op != p.op) return false;
                return match_expr(*p.args[0], target_of_operand(view_, node.lhs)) &&
                       match_expr(*p.args[1], target_of_operand(view_, node.rhs));
            }
            case ExprKind::Builtin: {
                if (!t.is_instr) return false;
                const auto& node = view_.seg().instrs[size_t(t.instr)];
                if (node.code != 4 || node.op != p.name) return false;
                return match_expr(*p.args[0], target_of_operand(view_, node.lhs));
            }
            case ExprKind::Call: {
                if (!t.is_instr) return false;
                const auto& node = view_.seg().instrs[size_t(t.instr)];
                if (node.code != 6 || node.op != "@") return false;
                if (node.lhs.kind != OperandKind::Sig ||
                    node.lhs.name != normalize_signature(p.parts))
                    return false;
                std::vector<Tgt> args;
                flatten_args(node.rhs, args);
                if (args.size() != p.args.size()) return false;
                for (size_t k = 0; k < args.size(); ++k) {
                    if (!match_expr(*p.args[k], args[k])) return false;
                }
                return true;
            }
        }
        return false;
    }

    std::optional<Match> finish(int root) {
        Match m;
        m.root = root;
        m.binds = std::move(binds_);
        m.ans = ans_;
        m.covered = view_.subtree(root);
        return m;
    }
};

} // namespace

SegmentView::SegmentView(const IrSegment& seg) : seg_(&seg) {
    int max_temp = -1;
    for (const auto& i : seg.instrs)
        if (i.result.kind == OperandKind::Temp) max_temp = std::max(max_temp, i.result.id);
    temp_def_.assign(size_t(max_temp + 1), -1);
    for (size_t k = 0; k < seg.instrs.size(); ++k) {
        const auto& r = seg.instrs[k].result;
        if (r.kind == OperandKind::Temp && r.id >= 0) temp_def_[size_t(r.id)] = int(k);
    }
    has_logic_.assign(seg.instrs.size(), false);
    auto operand_logic = [&](const Operand& o) {
        if (o.kind == OperandKind::Var && o.logic) return true;
        if (o.kind == OperandKind::Temp) {
            int d = instr_of_temp(o.id);
            if (d >= 0) return bool(has_logic_[size_t(d)]);
        }
        return false;
    };
    for (size_t k = 0; k < seg.instrs.size(); ++k) {
        // operand subtrees always precede their node, so one pass suffices
        has_logic_[k] = operand_logic(seg.instrs[k].lhs) || operand_logic(seg.instrs[k].rhs);
    }
}

int SegmentView::instr_of_temp(int temp) const {
    if (temp < 0 || temp >= int(temp_def_.size())) return -1;
    return temp_def_[size_t(temp)];
}

bool SegmentView::operand_has_logic(const Operand& o) const {
    if (o.kind == OperandKind::Var) return o.logic;
    if (o.kind == OperandKind::Temp) {
        int d = instr_of_temp(o.id);
        return d >= 0 && has_logic_[size_t(d)];
    }
    return false;
}

std::vector<int> SegmentView::subtree(int root) const {
    std::vector<int> out;
    std::vector<int> stack{root};
    while (!stack.empty()) {
        int k = stack.back();
        stack.pop_back();
        out.push_back(k);
        const auto& i = seg_->instrs[size_t(k)];
        for (const Operand* o : {&i.lhs, &i.rhs}) {
            if (o->kind == OperandKind::Temp) {
                int d = instr_of_temp(o->id);
                if (d >= 0) stack.push_back(d);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool SegmentView::subtree_unbound(int root) const {
    for (int k : subtree(root))
        if (seg_->instrs[size_t(k)].bound_fn >= 0) return false;
    return true;
}

std::optional<Match> match_function_at(const SegmentView& view, int instr, const FnInfo& fn) {
    Matcher m(view, fn);
    return m.run(instr);
}

} // namespace cool
