#include "cool/printer.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace cool {

namespace {

int precedence(const std::string& op) {
    if (op == "&&") return 1;
    if (op == "==") return 2;
    if (op == "+" || op == "-") return 3;
    if (op == "*" || op == "/") return 4;
    if (op == "^") return 6;
    return 7;
}

void print_expr_prec(const Expr& e, int parent_prec, std::string& out);

void print_call(const Expr& e, std::string& out) {
    size_t arg_i = 0;
    bool prev_word = false;
    bool first = true;
    for (const auto& p : e.parts) {
        if (p.is_arg) {
            // consecutive arg parts belong to one parenthesized group
            if (!first && prev_word) out += " ";
            out += "(";
            print_expr_prec(*e.args[arg_i++], 0, out);
            while (arg_i < e.args.size()) {
                // peek: next part also an arg with no separating word?
                break;
            }
            out += ")";
            prev_word = false;
        } else {
            if (!first) out += " ";
            out += p.word;
            prev_word = true;
        }
        first = false;
    }
}

// Calls need their argument grouping reconstructed: runs of consecutive
// is_arg parts print as one (a,b,...) group.
void print_call_grouped(const Expr& e, std::string& out) {
    size_t i = 0, arg_i = 0;
    bool first = true;
    while (i < e.parts.size()) {
        if (!e.parts[i].is_arg) {
            if (!first) out += " ";
            out += e.parts[i].word;
            ++i;
        } else {
            out += "(";
            bool inner_first = true;
            while (i < e.parts.size() && e.parts[i].is_arg) {
                if (!inner_first) out += ",";
                print_expr_prec(*e.args[arg_i++], 0, out);
                inner_first = false;
                ++i;
            }
            out += ")";
        }
        first = false;
    }
}

void print_expr_prec(const Expr& e, int parent_prec, std::string& out) {
    switch (e.kind) {
        case ExprKind::Number:
            out += format_number(e.number);
            return;
        case ExprKind::VarRef:
            if (e.prefix) out += e.prefix;
            out += e.name;
            return;
        case ExprKind::Member:
            out += e.name;
            out += ".";
            out += e.field;
            return;
        case ExprKind::Unary: {
            bool paren = parent_prec > 5;
            if (paren) out += "(";
            out += "-";
            print_expr_prec(*e.args[0], 5, out);
            if (paren) out += ")";
            return;
        }
        case ExprKind::Binary: {
            int prec = precedence(e.op);
            bool paren = prec < parent_prec || (e.op == "^" && parent_prec == prec);
            if (paren) out += "(";
            print_expr_prec(*e.args[0], prec, out);
            out += e.op;
            print_expr_prec(*e.args[1], prec + 1, out);
            if (paren) out += ")";
            return;
        }
        case ExprKind::Builtin:
            out += e.name;
            out += "(";
            print_expr_prec(*e.args[0], 0, out);
            out += ")";
            return;
        case ExprKind::Call: {
            bool paren = parent_prec > 0;
            if (paren) out += "(";
            print_call_grouped(e, out);
            if (paren) out += ")";
            (void)print_call;
            return;
        }
    }
}

void print_pattern_decl(const FunctionDecl& fn, std::string& out) {
    out += "@";
    if (fn.pcp) {
        out += "(";
        for (size_t i = 0; i < fn.pcp->entries.size(); ++i) {
            if (i) out += ",";
            out += format_number(fn.pcp->entries[i]);
        }
        out += ")";
    }
    if (fn.has_name_pattern) {
        size_t group_i = 0, part_i = 0;
        bool first = true;
        while (part_i < fn.name_parts.size()) {
            if (!fn.name_parts[part_i].is_arg) {
                if (!first) out += " ";
                out += fn.name_parts[part_i].word;
                ++part_i;
            } else {
                const auto& group = fn.arg_slots[group_i++];
                out += "(";
                for (size_t k = 0; k < group.size(); ++k) {
                    if (k) out += ",";
                    if (group[k].prefix) out += group[k].prefix;
                    out += group[k].name;
                }
                out += ")";
                part_i += group.size();
            }
            first = false;
        }
    } else {
        out += "{";
        print_expr_prec(*fn.pattern, 0, out);
        out += "}";
    }
}

std::string indent_str(int n) { return std::string(size_t(n) * 4, ' '); }

} // namespace

std::string format_number(double v) {
    char buf[64];
    if (std::fabs(v) < 1e15 && v == double((long long)(v))) {
        std::snprintf(buf, sizeof(buf), "%.0f", v);
        return buf;
    }
    // shortest representation that parses back exactly
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::string print_expr(const Expr& e) {
    std::string out;
    print_expr_prec(e, 0, out);
    return out;
}

std::string print_stmt(const Stmt& s, int indent) {
    std::string out = indent_str(indent);
    switch (s.kind) {
        case StmtKind::New:
            out += "new:" + s.target + "=" + print_expr(*s.value) + ";";
            break;
        case StmtKind::Assign:
            out += s.target + "=" + print_expr(*s.value) + ";";
            break;
        case StmtKind::Return:
            out += "return:" + print_expr(*s.value) + ";";
            break;
        case StmtKind::ExprStmt:
            out += print_expr(*s.value) + ";";
            break;
        case StmtKind::Output:
            out += print_expr(*s.value) + "-->screen;";
            break;
        case StmtKind::Instantiate:
            out += s.class_name + ":" + s.target + ";";
            break;
    }
    out += "\n";
    return out;
}

std::string print_function(const FunctionDecl& fn, int indent) {
    std::string out = indent_str(indent);
    if (fn.is_expr) out += "expr:";
    print_pattern_decl(fn, out);
    out += "{\n";
    for (const auto& st : fn.body) out += print_stmt(st, indent + 1);
    out += indent_str(indent) + "}";
    for (const auto& qc : fn.query_components) {
        out += "=>";
        print_pattern_decl(qc, out);
        out += ";";
    }
    out += "\n";
    return out;
}

std::string print_program(const Program& prog) {
    std::string out;
    for (const auto& l : prog.loads) out += "#load(" + l + ");\n";
    for (const auto& fn : prog.functions) out += print_function(fn);
    for (const auto& cls : prog.classes) {
        out += "class: " + cls.name;
        for (size_t i = 0; i < cls.parents.size(); ++i) {
            out += i == 0 ? " << " : ", ";
            out += cls.parents[i];
        }
        out += "{\n";
        for (const auto& fn : cls.functions) out += print_function(fn, 1);
        for (const auto& st : cls.body) out += print_stmt(st, 1);
        out += "}\n";
    }
    for (const auto& st : prog.statements) out += print_stmt(st);
    return out;
}

} // namespace cool
