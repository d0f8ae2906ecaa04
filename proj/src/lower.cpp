#include "cool/lower.hpp"

#include <functional>
#include <set>

#include "cool/printer.hpp"

namespace cool {

namespace {

class Lowerer {
public:
    Lowerer(const Program& prog, const Analysis& analysis) : prog_(prog), analysis_(analysis) {}

    IrProgram run() {
        IrProgram ir;
        ir.source_name = prog_.source_name;
        collect_declared_names();

        for (const auto& info : analysis_.registry.fns) {
            if (info.is_query_component) {
                // shares the group's lowered rows
                ir.funcs.push_back(ir.funcs.back());
                ir.funcs.back().fn_id = info.id;
                continue;
            }
            ir.funcs.push_back(lower_function(*info.decl, info.id));
        }

        ir.main = lower_unit("", prog_.statements, ir);
        for (const auto& cls : prog_.classes) {
            ir.class_units[cls.name] = lower_unit(cls.name, cls.body, ir);
        }
        return ir;
    }

private:
    const Program& prog_;
    const Analysis& analysis_;
    std::set<std::string> declared_;

    void collect_declared_names() {
        auto walk_stmts = [&](const std::vector<Stmt>& stmts) {
            for (const auto& st : stmts) {
                if (st.kind == StmtKind::New || st.kind == StmtKind::Assign ||
                    st.kind == StmtKind::Instantiate) {
                    declared_.insert(st.target);
                }
            }
        };
        walk_stmts(prog_.statements);
        for (const auto& cls : prog_.classes) walk_stmts(cls.body);
        for (const auto& info : analysis_.registry.fns) {
            for (const auto& [name, mode] : info.decl->param_modes) declared_.insert(name);
            if (info.group)
                for (const auto& [name, mode] : info.group->param_modes) declared_.insert(name);
            const FunctionDecl* body_owner = info.group ? info.group : info.decl;
            walk_stmts(body_owner->body);
        }
        declared_.insert("ans");
    }

    void check_declared(const Expr& e, const std::set<std::string>* extra) const {
        if (e.kind == ExprKind::VarRef) {
            if (!declared_.count(e.name) && (!extra || !extra->count(e.name))) {
                throw CoolError("use of undeclared identifier '" + e.name + "'", e.loc);
            }
        } else if (e.kind == ExprKind::Member) {
            if (!declared_.count(e.name)) {
                throw CoolError("use of undeclared identifier '" + e.name + "'", e.loc);
            }
        }
        for (const auto& a : e.args) check_declared(*a, extra);
    }

    // ---- expression lowering -------------------------------------------------

    struct Ctx {
        std::vector<TacInstr>* out;
        int* next_temp;
        const std::set<std::string>* logic_vars; // names undetermined in this statement
        int* next_label = nullptr;               // 1-based row number source (function units)
    };

    TacInstr& emit(Ctx& c, TacInstr instr) {
        instr.refresh_flags();
        c.out->push_back(std::move(instr));
        return c.out->back();
    }

    Operand gen_expr(Ctx& c, const Expr& e) {
        switch (e.kind) {
            case ExprKind::Number:
                return Operand::constant(e.number);
            case ExprKind::VarRef: {
                bool logic = c.logic_vars && c.logic_vars->count(e.name);
                return Operand::var(e.name, logic);
            }
            case ExprKind::Member:
                return Operand::var(e.name + "." + e.field);
            case ExprKind::Unary: {
                Operand v = gen_expr(c, *e.args[0]);
                // constant-fold a literal negation so patterns like (-b) stay leaves
                if (v.kind == OperandKind::Const) return Operand::constant(-v.value);
                TacInstr i;
                i.code = 4;
                i.op = "neg";
                i.lhs = v;
                i.result = Operand::temp((*c.next_temp)++);
                i.loc = e.loc;
                emit(c, i);
                return c.out->back().result;
            }
            case ExprKind::Binary: {
                Operand l = gen_expr(c, *e.args[0]);
                Operand r = gen_expr(c, *e.args[1]);
                TacInstr i;
                i.code = 4;
                i.op = e.op;
                i.lhs = l;
                i.rhs = r;
                i.result = Operand::temp((*c.next_temp)++);
                i.loc = e.loc;
                emit(c, i);
                return c.out->back().result;
            }
            case ExprKind::Builtin: {
                Operand v = gen_expr(c, *e.args[0]);
                TacInstr i;
                i.code = 4;
                i.op = e.name;
                i.lhs = v;
                i.result = Operand::temp((*c.next_temp)++);
                i.loc = e.loc;
                emit(c, i);
                return c.out->back().result;
            }
            case ExprKind::Call: {
                std::vector<Operand> args;
                for (const auto& a : e.args) args.push_back(gen_expr(c, *a));
                Operand tuple = gen_tuple(c, args, e.loc);
                TacInstr i;
                i.code = 6;
                i.op = "@";
                i.lhs = Operand::sig(normalize_signature(e.parts));
                i.rhs = tuple;
                i.result = Operand::temp((*c.next_temp)++);
                i.loc = e.loc;
                emit(c, i);
                return c.out->back().result;
            }
        }
        throw CoolError("unreachable expression kind");
    }

    Operand gen_tuple(Ctx& c, const std::vector<Operand>& args, SourceLoc loc) {
        if (args.empty()) return Operand::none();
        Operand acc = args[0];
        for (size_t k = 1; k < args.size(); ++k) {
            TacInstr i;
            i.code = 4;
            i.op = "COMMA";
            i.lhs = acc;
            i.rhs = args[k];
            i.result = Operand::temp((*c.next_temp)++);
            i.loc = loc;
            emit(c, i);
            acc = c.out->back().result;
        }
        return acc;
    }

    void gen_stmt(Ctx& c, const Stmt& st, const std::set<std::string>* locals) {
        check_declared_stmt(st, locals);
        switch (st.kind) {
            case StmtKind::New:
            case StmtKind::Assign: {
                Operand v = gen_expr(c, *st.value);
                TacInstr i;
                i.code = 4;
                i.op = "=";
                i.lhs = Operand::var(st.target);
                i.rhs = v;
                i.result = Operand::var(st.target);
                i.loc = st.loc;
                emit(c, i);
                return;
            }
            case StmtKind::Return: {
                Operand v = gen_expr(c, *st.value);
                TacInstr i;
                i.code = 5;
                i.lhs = v;
                i.loc = st.loc;
                emit(c, i);
                return;
            }
            case StmtKind::ExprStmt: {
                gen_expr(c, *st.value);
                return;
            }
            case StmtKind::Output: {
                Operand v = gen_expr(c, *st.value);
                TacInstr i;
                i.code = 6;
                i.op = "-->screen";
                i.lhs = v;
                i.loc = st.loc;
                emit(c, i);
                return;
            }
            case StmtKind::Instantiate: {
                TacInstr i;
                i.code = 6;
                i.op = "@new";
                i.lhs = Operand::sig(st.class_name);
                i.result = Operand::var(st.target);
                i.loc = st.loc;
                emit(c, i);
                return;
            }
        }
    }

    void check_declared_stmt(const Stmt& st, const std::set<std::string>* locals) const {
        if (st.value) check_declared(*st.value, locals);
        if (st.kind == StmtKind::Instantiate) {
            bool known = false;
            for (const auto& cls : prog_.classes) known |= cls.name == st.class_name;
            if (!known)
                throw CoolError("instantiation of unknown class '" + st.class_name + "'", st.loc);
        }
    }

    static void collect_logic_vars(const Expr& e, std::set<std::string>& out) {
        if (e.kind == ExprKind::VarRef && e.prefix == '$') out.insert(e.name);
        for (const auto& a : e.args) collect_logic_vars(*a, out);
    }

    // ---- units -----------------------------------------------------------------

    IrUnit lower_unit(const std::string& context, const std::vector<Stmt>& stmts, IrProgram& ir) {
        IrUnit unit;
        unit.context = context;
        int stmt_id = 0;
        for (const auto& st : stmts) {
            std::set<std::string> logic;
            if (st.value) collect_logic_vars(*st.value, logic);
            if (!logic.empty() && st.kind != StmtKind::ExprStmt) {
                throw CoolError("logic variables are only allowed in query statements", st.loc);
            }

            size_t first = unit.instrs.size();
            Ctx c{&unit.instrs, &unit.next_temp, logic.empty() ? nullptr : &logic};
            gen_stmt(c, st, nullptr);
            size_t last = unit.instrs.size();
            if (last == first) continue; // value folded away entirely
            // every statement owns an address prefix {s, .}, so later splices
            // inside one query can never collide with a neighboring statement
            for (size_t k = first; k < last; ++k) {
                unit.instrs[k].addr = HierAddr{{stmt_id + 1, int(k - first) + 1}};
            }
            StmtSpan span;
            span.first = unit.instrs[first].addr;
            span.last = unit.instrs[last - 1].addr;
            span.kind = st.kind;
            span.loc = st.loc;
            span.is_query = !logic.empty();
            unit.stmts.push_back(span);

            if (!logic.empty()) {
                IrSegment seg;
                seg.instrs.assign(unit.instrs.begin() + long(first), unit.instrs.begin() + long(last));
                seg.next_temp = unit.next_temp;
                seg.context = context;
                seg.origin_stmt = stmt_id;
                seg.loc = st.loc;
                seg.bound_lo = HierAddr{{stmt_id + 1}};     // the bare statement prefix
                seg.bound_hi = HierAddr{{stmt_id + 2}};     // the next statement's prefix
                ir.queries.push_back(std::move(seg));
            }
            ++stmt_id;
        }
        return unit;
    }

    // ---- function declarations ---------------------------------------------------

    IrFunction lower_function(const FunctionDecl& fn, int fn_id) {
        IrFunction f;
        f.fn_id = fn_id;
        int next_temp = 0;
        Ctx c{&f.rows, &next_temp, nullptr};

        auto row_label = [&]() { return int(f.rows.size()) + 1; };

        // signature block
        int sig_label = row_label();
        {
            TacInstr i;
            i.code = 1;
            i.result = Operand::label(sig_label);
            i.loc = fn.loc;
            emit(c, i);
        }
        std::vector<Operand> params;
        for (const auto& name : param_order(fn)) params.push_back(Operand::var(name));
        Operand tuple = gen_tuple(c, params, fn.loc);
        {
            TacInstr i;
            i.code = 4;
            i.op = "CALL";
            i.lhs = Operand::sig(fn.has_name_pattern ? fn.signature
                                                     : "{" + print_expr(*fn.pattern) + "}");
            i.rhs = tuple;
            i.result = Operand::var("ans");
            i.loc = fn.loc;
            emit(c, i);
        }
        {
            TacInstr i;
            i.code = 2;
            i.result = Operand::label(sig_label);
            i.loc = fn.loc;
            emit(c, i);
        }
        size_t dispatch_row = f.rows.size();
        {
            TacInstr i; // dispatch edge; body label patched below
            i.code = 6;
            i.op = "@";
            i.lhs = Operand::label(sig_label);
            i.result = Operand::label(sig_label);
            i.loc = fn.loc;
            emit(c, i);
        }
        int body_label = row_label();
        {
            TacInstr i;
            i.code = 1;
            i.result = Operand::label(body_label);
            i.loc = fn.loc;
            emit(c, i);
        }
        f.body_first = f.rows.size();
        std::set<std::string> locals;
        for (const auto& [name, mode] : fn.param_modes) locals.insert(name);
        for (const auto& st : fn.body) {
            if (st.kind == StmtKind::New || st.kind == StmtKind::Assign) locals.insert(st.target);
            gen_stmt(c, st, &locals);
        }
        bool has_return = !fn.body.empty() && fn.body.back().kind == StmtKind::Return;
        if (!has_return) {
            TacInstr i;
            i.code = 5;
            i.loc = fn.loc;
            emit(c, i);
        }
        f.body_last = f.rows.size();
        {
            TacInstr i;
            i.code = 2;
            i.result = Operand::label(body_label);
            i.loc = fn.loc;
            emit(c, i);
        }
        {
            TacInstr i;
            i.code = 6;
            i.lhs = Operand::label(sig_label);
            i.rhs = Operand::label(body_label);
            i.result = Operand::label(sig_label);
            i.loc = fn.loc;
            emit(c, i);
        }
        f.rows[dispatch_row].rhs = Operand::label(body_label);
        f.rows[dispatch_row].refresh_flags();

        for (size_t k = 0; k < f.rows.size(); ++k) f.rows[k].addr = HierAddr{{int(k) + 1}};
        return f;
    }

    static std::vector<std::string> param_order(const FunctionDecl& fn) {
        std::vector<std::string> order;
        std::set<std::string> seen;
        auto add = [&](const std::string& n) {
            if (seen.insert(n).second) order.push_back(n);
        };
        if (fn.has_name_pattern) {
            for (const auto& group : fn.arg_slots)
                for (const auto& s : group) add(s.name);
        } else {
            std::function<void(const Expr&)> walk = [&](const Expr& e) {
                if (e.kind == ExprKind::VarRef) add(e.name);
                for (const auto& a : e.args) walk(*a);
            };
            walk(*fn.pattern);
        }
        return order;
    }
};

} // namespace

IrProgram lower(const Program& prog, const Analysis& analysis) {
    return Lowerer(prog, analysis).run();
}

const std::vector<IrSegment>& extract_query_segments(const IrProgram& ir) { return ir.queries; }

IrUnit& unit_for(IrProgram& ir, const std::string& context) {
    if (context.empty()) return ir.main;
    auto it = ir.class_units.find(context);
    if (it == ir.class_units.end()) throw CoolError("unknown unit '" + context + "'");
    return it->second;
}

const IrUnit& unit_for(const IrProgram& ir, const std::string& context) {
    return unit_for(const_cast<IrProgram&>(ir), context);
}

} // namespace cool
