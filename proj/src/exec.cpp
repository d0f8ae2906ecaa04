#include "cool/exec.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "cool/ground.hpp"

namespace cool {

namespace {

constexpr double kEqTolerance = 1e-9;

bool near_integer(double v) { return std::fabs(v - std::round(v)) < 1e-9; }

double apply_binary(const std::string& op, double l, double r, SourceLoc loc) {
    if (op == "+") return l + r;
    if (op == "-") return l - r;
    if (op == "*") return l * r;
    if (op == "/") {
        if (r == 0.0) throw CoolError("division by zero", loc);
        return l / r;
    }
    if (op == "^") {
        if (l < 0.0 && !near_integer(r)) {
            throw CoolError("even root of a negative number (negative base with fractional "
                            "exponent)",
                            loc);
        }
        if (l == 0.0 && r < 0.0) throw CoolError("zero raised to a negative power", loc);
        return std::pow(l, r);
    }
    if (op == "==") return std::fabs(l - r) <= kEqTolerance * std::max(1.0, std::fabs(r)) ? 1.0 : 0.0;
    if (op == "&&") return (l != 0.0 && r != 0.0) ? 1.0 : 0.0;
    throw CoolError("unknown operator '" + op + "'", loc);
}

double apply_unary(const std::string& op, double v, SourceLoc loc) {
    if (op == "neg") return -v;
    if (op == "ln") {
        if (v <= 0.0) throw CoolError("logarithm of a non-positive number", loc);
        return std::log(v);
    }
    if (op == "sin") return std::sin(v);
    if (op == "cos") return std::cos(v);
    if (op == "tan") return std::tan(v);
    throw CoolError("unknown operator '" + op + "'", loc);
}

bool is_unary_op(const std::string& op) {
    return op == "neg" || op == "ln" || op == "sin" || op == "cos" || op == "tan";
}

struct Frame {
    std::map<std::string, double>* primary = nullptr; // writes land here
    bool has_return = false;
    double ret_value = 0.0;
    bool has_assign = false;
    double last_assign = 0.0;
};

class Interp {
public:
    Interp(const IrProgram& ir, const Analysis& analysis, Environment& env)
        : ir_(ir), analysis_(analysis), env_(env) {}

    ExecOutputs run() {
        auto t0 = std::chrono::steady_clock::now();
        Frame top;
        top.primary = &env_.globals;
        run_unit(ir_.main, top);
        out_.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        return out_;
    }

    double call_by_id(int fn_id, const std::vector<double>& args,
                      const std::optional<double>& ans) {
        const FnInfo& fn = analysis_.registry[fn_id];
        std::map<std::string, double> locals;
        std::vector<std::string> order = param_order(*fn.decl);
        // bind positionally, skipping the undetermined slot of inverse facts
        size_t ai = 0;
        for (const auto& name : order) {
            char mode = fn.decl->param_modes.count(name) ? fn.decl->param_modes.at(name) : 0;
            if (mode == '$') continue;
            if (ai >= args.size())
                throw CoolError("missing argument for parameter '" + name + "'", fn.decl->loc);
            locals[name] = args[ai++];
        }
        if (ans) locals["ans"] = *ans;
        Frame frame;
        frame.primary = &locals;
        run_function_body(fn_id, frame);
        if (frame.has_return) return frame.ret_value;

        // inverse facts: surface the bound unknown instead of a return value
        for (const auto& [name, mode] : fn.decl->param_modes) {
            if (mode == '$') {
                auto it = locals.find(name);
                if (it == locals.end())
                    throw CoolError("inverse body did not bind '" + name + "'", fn.decl->loc);
                return it->second;
            }
        }
        if (frame.has_assign) return frame.last_assign;
        return 0.0;
    }

private:
    const IrProgram& ir_;
    const Analysis& analysis_;
    Environment& env_;
    ExecOutputs out_;

    // ---- name resolution -----------------------------------------------------

    double read_var(const Frame& f, const std::string& name, SourceLoc loc) const {
        auto dot = name.find('.');
        if (dot != std::string::npos) {
            std::string obj = name.substr(0, dot), field = name.substr(dot + 1);
            auto io = env_.instances.find(obj);
            if (io == env_.instances.end())
                throw CoolError("unknown instance '" + obj + "'", loc);
            auto iv = io->second.find(field);
            if (iv == io->second.end())
                throw CoolError("instance '" + obj + "' has no field '" + field + "'", loc);
            return iv->second;
        }
        if (f.primary) {
            auto it = f.primary->find(name);
            if (it != f.primary->end()) return it->second;
        }
        auto ig = env_.globals.find(name);
        if (ig != env_.globals.end()) return ig->second;
        throw CoolError("read of unbound variable '" + name + "'", loc);
    }

    void write_var(Frame& f, const std::string& name, double v) {
        (*f.primary)[name] = v;
        f.has_assign = true;
        f.last_assign = v;
    }

    // ---- straight-line unit execution ------------------------------------------

    struct UnitExec {
        const std::vector<TacInstr>* instrs;
        std::map<int, size_t> temp_def;  // temp id -> instruction index
        std::map<int, double> temps;     // computed temp values
        const IrUnit* unit = nullptr;    // for regions (null inside function bodies)
        std::string context;
    };

    static void index_temps(UnitExec& ue) {
        for (size_t k = 0; k < ue.instrs->size(); ++k) {
            const auto& r = (*ue.instrs)[k].result;
            if (r.kind == OperandKind::Temp) ue.temp_def[r.id] = k;
        }
    }

    double operand_value(UnitExec& ue, Frame& f, const Operand& o, SourceLoc loc) {
        switch (o.kind) {
            case OperandKind::Const: return o.value;
            case OperandKind::Var: return read_var(f, o.name, loc);
            case OperandKind::Temp: {
                auto it = ue.temps.find(o.id);
                if (it != ue.temps.end()) return it->second;
                auto def = ue.temp_def.find(o.id);
                if (def == ue.temp_def.end())
                    throw CoolError("read of uncomputed temporary", loc);
                double v = eval_instr(ue, f, def->second);
                return v;
            }
            default:
                throw CoolError("operand has no run-time value", loc);
        }
    }

    // Evaluates one expression instruction (recursively via operands).
    double eval_instr(UnitExec& ue, Frame& f, size_t idx) {
        const TacInstr& i = (*ue.instrs)[idx];
        double v = 0.0;
        if (i.code == 6 && i.op == "@") {
            v = dispatch_call(ue, f, i);
        } else if (i.code == 4 && is_unary_op(i.op)) {
            v = apply_unary(i.op, operand_value(ue, f, i.lhs, i.loc), i.loc);
        } else if (i.code == 4 && i.op == "COMMA") {
            v = 0.0; // tuples are materialized structurally at call sites
        } else if (i.code == 4) {
            v = apply_binary(i.op, operand_value(ue, f, i.lhs, i.loc),
                             operand_value(ue, f, i.rhs, i.loc), i.loc);
        } else {
            throw CoolError("instruction has no value", i.loc);
        }
        if (i.result.kind == OperandKind::Temp) ue.temps[i.result.id] = v;
        return v;
    }

    void flatten_call_args(UnitExec& ue, const Operand& o, std::vector<Operand>& out) {
        if (o.kind == OperandKind::None) return;
        if (o.kind == OperandKind::Temp) {
            auto def = ue.temp_def.find(o.id);
            if (def != ue.temp_def.end() && (*ue.instrs)[def->second].op == "COMMA") {
                flatten_call_args(ue, (*ue.instrs)[def->second].lhs, out);
                flatten_call_args(ue, (*ue.instrs)[def->second].rhs, out);
                return;
            }
        }
        out.push_back(o);
    }

    int resolve_forward(const std::string& sig, const std::string& context, SourceLoc loc) {
        const DomainSet& d = analysis_.domains.count(context) ? analysis_.domains.at(context)
                                                              : analysis_.domains.at("");
        int found = -1;
        for (const auto& fn : analysis_.registry.fns) {
            if (fn.kind != FunctionKind::ForwardFact || fn.is_query_component) continue;
            if (fn.signature != sig || !d.contains(fn.domain)) continue;
            if (found >= 0)
                throw CoolError("ambiguous call: multiple functions match '" + sig + "'", loc);
            found = fn.id;
        }
        if (found < 0) throw CoolError("no function matches call '" + sig + "'", loc);
        return found;
    }

    double dispatch_call(UnitExec& ue, Frame& f, const TacInstr& call) {
        std::vector<Operand> arg_ops;
        flatten_call_args(ue, call.rhs, arg_ops);
        std::vector<double> args;
        for (const auto& o : arg_ops) args.push_back(operand_value(ue, f, o, call.loc));
        int fn_id = call.bound_fn >= 0 ? call.bound_fn
                                       : resolve_forward(call.lhs.name, ue.context, call.loc);
        return call_forward(fn_id, args, call.loc);
    }

    double call_forward(int fn_id, const std::vector<double>& args, SourceLoc loc) {
        const FnInfo& fn = analysis_.registry[fn_id];
        std::map<std::string, double> locals;
        std::vector<std::string> order = param_order(*fn.decl);
        if (order.size() != args.size()) {
            throw CoolError("call to '" + fn.display + "' expects " +
                                std::to_string(order.size()) + " arguments, got " +
                                std::to_string(args.size()),
                            loc);
        }
        for (size_t k = 0; k < order.size(); ++k) locals[order[k]] = args[k];
        Frame frame;
        frame.primary = &locals;
        run_function_body(fn_id, frame);
        if (frame.has_return) return frame.ret_value;
        if (frame.has_assign) return frame.last_assign; // implicit return
        return 0.0;
    }

    void run_function_body(int fn_id, Frame& frame) {
        const IrFunction& irf = ir_.funcs[size_t(fn_id)];
        UnitExec ue;
        ue.instrs = &irf.rows;
        ue.context = analysis_.registry[fn_id].domain;
        index_temps(ue);
        for (size_t k = irf.body_first; k < irf.body_last && !frame.has_return; ++k) {
            step_instr(ue, frame, k);
        }
    }

    // Executes one statement-level instruction (assignment, return, output...).
    void step_instr(UnitExec& ue, Frame& f, size_t idx) {
        const TacInstr& i = (*ue.instrs)[idx];
        switch (i.code) {
            case 1:
            case 2:
                return; // block markers
            case 4:
                if (i.op == "=") {
                    write_var(f, i.lhs.name, operand_value(ue, f, i.rhs, i.loc));
                    return;
                }
                eval_instr(ue, f, idx);
                return;
            case 5:
                f.has_return = true;
                f.ret_value = i.lhs.kind == OperandKind::None
                                  ? (f.has_assign ? f.last_assign : 0.0)
                                  : operand_value(ue, f, i.lhs, i.loc);
                return;
            case 6:
                if (i.op == "@new") {
                    instantiate(i.lhs.name, i.result.name, i.loc);
                    return;
                }
                if (i.op == "-->screen") {
                    out_.screen.push_back(operand_value(ue, f, i.lhs, i.loc));
                    return;
                }
                if (i.op == "@") {
                    eval_instr(ue, f, idx);
                    return;
                }
                return; // dispatch-edge rows in declaration units
            default:
                throw CoolError("unknown code type " + std::to_string(i.code), i.loc);
        }
    }

    void instantiate(const std::string& class_name, const std::string& var, SourceLoc loc) {
        auto it = ir_.class_units.find(class_name);
        if (it == ir_.class_units.end())
            throw CoolError("instantiation of unknown class '" + class_name + "'", loc);
        auto& fields = env_.instances[var];
        fields.clear();
        Frame frame;
        frame.primary = &fields;
        run_unit(it->second, frame);
    }

    void run_unit(const IrUnit& unit, Frame& frame) {
        UnitExec ue;
        ue.instrs = &unit.instrs;
        ue.unit = &unit;
        ue.context = unit.context;
        index_temps(ue);

        size_t cursor = 0;
        for (const auto& span : unit.stmts) {
            // locate the instruction range of this span
            while (cursor < unit.instrs.size() && unit.instrs[cursor].addr < span.first) ++cursor;
            size_t first = cursor;
            size_t last = first;
            while (last < unit.instrs.size() && unit.instrs[last].addr <= span.last) ++last;
            cursor = last;
            if (span.is_query) {
                exec_query_span(ue, frame, unit, span);
            } else {
                for (size_t k = first; k < last; ++k) step_instr(ue, frame, k);
            }
        }
    }

    // Ground query statements execute region by region following the deduced
    // evaluation order (forward regions first, inverse regions reversed).
    void exec_query_span(UnitExec& ue, Frame& frame, const IrUnit& unit, const StmtSpan& span) {
        std::vector<const RegionBinding*> regions;
        for (const auto& r : unit.regions) {
            if (span.first <= r.root && r.root <= span.last) regions.push_back(&r);
        }
        std::sort(regions.begin(), regions.end(),
                  [](const RegionBinding* a, const RegionBinding* b) { return a->root < b->root; });
        auto ordered = deduce_eval_order(regions, [&](const RegionBinding* r) {
            return analysis_.registry[r->fn_id].kind == FunctionKind::InverseFact;
        });
        for (const RegionBinding* r : ordered) exec_region(ue, frame, *r);
    }

    double argref_value(UnitExec& ue, Frame& f, const ArgRef& ref, SourceLoc loc) {
        if (!ref.is_addr) return operand_value(ue, f, ref.op, loc);
        for (size_t k = 0; k < ue.instrs->size(); ++k) {
            if ((*ue.instrs)[k].addr == ref.addr) return eval_instr(ue, f, k);
        }
        throw CoolError("stale instruction reference in ground region", loc);
    }

    void exec_region(UnitExec& ue, Frame& frame, const RegionBinding& region) {
        const FnInfo& fn = analysis_.registry[region.fn_id];
        SourceLoc loc = fn.decl->loc;

        std::map<std::string, double> det_args;
        for (const auto& [name, ref] : region.args) {
            char mode = fn.decl->param_modes.count(name) ? fn.decl->param_modes.at(name) : 0;
            if (mode == '$') continue;
            det_args[name] = argref_value(ue, frame, ref, loc);
        }
        std::optional<double> ans;
        if (region.ans) ans = argref_value(ue, frame, *region.ans, loc);

        size_t root_idx = 0;
        while (root_idx < ue.instrs->size() && !((*ue.instrs)[root_idx].addr == region.root))
            ++root_idx;
        const TacInstr& root = (*ue.instrs)[root_idx];

        if (fn.kind == FunctionKind::ForwardFact) {
            std::vector<double> args;
            for (const auto& name : param_order(*fn.decl)) args.push_back(det_args.at(name));
            double v = call_forward(region.fn_id, args, loc);
            if (root.result.kind == OperandKind::Temp) ue.temps[root.result.id] = v;
            return;
        }

        // inverse region
        if (region.out_vars.empty())
            throw CoolError("inverse region has no output variable", loc);
        const auto& [unknown_param, caller_var] = region.out_vars.front();

        double solved;
        if (fn.is_query_component) {
            // solve constraint(args..., u) == ans numerically
            if (!ans) throw CoolError("query component call without a determined result", loc);
            const FnInfo* constraint = nullptr;
            for (const auto& g : analysis_.registry.fns) {
                if (fn.group && g.decl == fn.group) constraint = &g;
            }
            if (!constraint) throw CoolError("query component lost its constraint", loc);
            std::vector<std::string> order = param_order(*constraint->decl);
            double guess = 0.0;
            if (frame.primary->count(caller_var)) guess = (*frame.primary)[caller_var];
            else if (env_.globals.count(caller_var)) guess = env_.globals[caller_var];
            auto f = [&](double u) {
                std::vector<double> args;
                for (const auto& name : order)
                    args.push_back(name == unknown_param ? u : det_args.at(name));
                return call_forward(constraint->id, args, loc);
            };
            solved = solve_scalar(f, *ans, guess, loc);
        } else {
            // the body computes the unknown itself (possibly from 'ans')
            std::map<std::string, double> locals = det_args;
            if (ans) locals["ans"] = *ans;
            Frame body;
            body.primary = &locals;
            run_function_body(region.fn_id, body);
            auto it = locals.find(unknown_param);
            if (it == locals.end())
                throw CoolError("inverse body did not bind '" + unknown_param + "'", loc);
            solved = it->second;
        }

        write_var(frame, caller_var, solved);

        // Equation residual assertion: with the unknown bound, the equation
        // itself must hold. Skipped when the subtree cannot be re-evaluated
        // standalone (solver-backed regions check their own residual).
        if (root.code == 4 && root.op == "==" && !fn.is_query_component) {
            try {
                double l = operand_value(ue, frame, root.lhs, loc);
                double r = operand_value(ue, frame, root.rhs, loc);
                if (std::fabs(l - r) > kEqTolerance * std::max(1.0, std::fabs(r))) {
                    throw CoolError("equation does not hold after binding (residual " +
                                        format_screen_value(l - r) + ")",
                                    loc);
                }
            } catch (const CoolError& e) {
                std::string what = e.what();
                if (what.rfind("equation does not hold", 0) == 0) throw;
            }
        }
        if (root.result.kind == OperandKind::Temp) ue.temps[root.result.id] = 1.0;
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

ExecOutputs execute(const IrProgram& ir, const Analysis& analysis, Environment& env) {
    Interp interp(ir, analysis, env);
    return interp.run();
}

double call_fact_function(const IrProgram& ir, const Analysis& analysis, int fn_id,
                          const std::vector<double>& args, Environment& env) {
    Interp interp(ir, analysis, env);
    std::optional<double> ans;
    std::vector<double> positional = args;
    const FnInfo& fn = analysis.registry[fn_id];
    // bodies that solve an explicit equation name both sides; others take the
    // determined result as a trailing 'ans' argument
    bool uses_ans = false;
    if (fn.kind == FunctionKind::InverseFact) {
        const FunctionDecl& decl = *fn.decl;
        bool eq_pattern = !decl.has_name_pattern && decl.pattern &&
                          decl.pattern->kind == ExprKind::Binary && decl.pattern->op == "==";
        uses_ans = !eq_pattern;
    }
    if (uses_ans && !positional.empty()) {
        ans = positional.back();
        positional.pop_back();
    }
    return interp.call_by_id(fn_id, positional, ans);
}

double solve_scalar(const std::function<double(double)>& f, double target, double x0,
                    SourceLoc loc) {
    auto g = [&](double x) -> double {
        try {
            return f(x) - target;
        } catch (const CoolError&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    double tol = 1e-11 * std::max(1.0, std::fabs(target));

    double g0 = g(x0);
    if (std::isfinite(g0) && std::fabs(g0) <= tol) return x0;

    double a = 0, b = 0, fa = 0, fb = 0;
    bool bracketed = false;
    for (int dir = 0; dir < 2 && !bracketed; ++dir) {
        double sign = dir == 0 ? 1.0 : -1.0;
        double prev_x = x0, prev_g = g0;
        for (int k = 0; k <= 60; ++k) {
            double x = x0 + sign * std::ldexp(1.0, k);
            double gx = g(x);
            if (!std::isfinite(gx)) break;
            if (std::isfinite(prev_g) && prev_g * gx <= 0.0) {
                a = std::min(prev_x, x);
                b = std::max(prev_x, x);
                fa = g(a);
                fb = g(b);
                bracketed = true;
                break;
            }
            prev_x = x;
            prev_g = gx;
        }
    }
    if (!bracketed) throw CoolError("cannot invert function numerically (no sign change found)", loc);

    // secant step inside a maintained bisection bracket
    for (int it = 0; it < 200; ++it) {
        if (std::fabs(fa) <= tol) return a;
        if (std::fabs(fb) <= tol) return b;
        double m;
        if (std::isfinite(fa) && std::isfinite(fb) && fb != fa) {
            m = b - fb * (b - a) / (fb - fa);
            if (!(m > a && m < b)) m = 0.5 * (a + b);
        } else {
            m = 0.5 * (a + b);
        }
        double fm = g(m);
        if (!std::isfinite(fm)) fm = std::numeric_limits<double>::infinity();
        if (std::fabs(fm) <= tol) return m;
        if (fa * fm <= 0.0) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
        if (b - a < 1e-15 * std::max(1.0, std::fabs(m))) return 0.5 * (a + b);
    }
    return 0.5 * (a + b);
}

std::string format_screen_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

} // namespace cool
