#ifndef COOL_AST_HPP
#define COOL_AST_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cool/source.hpp"

namespace cool {

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

enum class ExprKind {
    Number,  // numeric literal
    VarRef,  // identifier, optionally $- or #-prefixed
    Member,  // instance.field
    Unary,   // -x
    Binary,  // + - * / ^ == &&
    Builtin, // ln / sin / cos
    Call,    // mixfix call: words and argument groups
};

// One piece of a mixfix name: either a literal word or an argument position.
struct NamePart {
    bool is_arg = false;
    std::string word; // literal text when !is_arg
};

struct Expr {
    ExprKind kind;
    SourceLoc loc;
    double number = 0.0;
    std::string name;  // VarRef name / Member "obj" / Builtin name
    std::string field; // Member field
    char prefix = 0;   // VarRef: 0, '$' or '#'
    std::string op;    // Unary/Binary operator symbol
    std::vector<ExprPtr> args;   // operands or call arguments (in slot order)
    std::vector<NamePart> parts; // Call: the mixfix shape
};

enum class StmtKind {
    New,         // new:x = expr;
    Assign,      // x = expr;
    Return,      // return: expr;
    ExprStmt,    // expr;  (queries live here)
    Output,      // expr --> screen;
    Instantiate, // ClassName : var;
};

struct Stmt {
    StmtKind kind;
    SourceLoc loc;
    std::string target;     // New/Assign/Instantiate variable
    std::string class_name; // Instantiate
    ExprPtr value;
};

enum class FunctionKind { ForwardFact, InverseFact, Rule, ConstraintQueryGroup };

// Per-step invocation rewards; entry i is the reward when fired at step i+1,
// zero meaning "not invokable at that step".
struct Pcp {
    std::vector<double> entries;
    int max_step() const { // last 1-based step with a nonzero entry, 0 if none
        for (int i = int(entries.size()) - 1; i >= 0; --i)
            if (entries[i] != 0.0) return i + 1;
        return 0;
    }
};

struct ParamSlot {
    std::string name;
    char prefix = 0; // 0, '$', '#'
};

struct FunctionDecl {
    SourceLoc loc;
    bool is_expr = false; // 'expr'/'exp' modifier
    std::optional<Pcp> pcp;

    // Exactly one of the two pattern forms is populated.
    bool has_name_pattern = false;
    std::vector<NamePart> name_parts;              // mixfix shape
    std::vector<std::vector<ParamSlot>> arg_slots; // per is_arg part: its parameters
    ExprPtr pattern;                               // @{expr} form

    std::vector<Stmt> body;
    std::vector<FunctionDecl> query_components; // nonempty => constraint-query group

    FunctionKind kind = FunctionKind::ForwardFact;
    std::string signature;                  // normalized mixfix signature ("" for expr patterns)
    std::map<std::string, char> param_modes; // identifier -> 0/'#'/'$'
};

struct ClassDecl {
    SourceLoc loc;
    std::string name;
    std::vector<std::string> parents; // '<<' names
    std::vector<FunctionDecl> functions;
    std::vector<Stmt> body;
};

struct Program {
    std::string source_name;
    std::vector<std::string> loads; // #load(...) domains
    std::vector<ClassDecl> classes;
    std::vector<FunctionDecl> functions; // top-level declarations
    std::vector<Stmt> statements;        // top-level statements
};

// Normalized signature of a mixfix shape, e.g. add(a)to(b) -> "add_ARG_to_ARG_".
std::string normalize_signature(const std::vector<NamePart>& parts);

} // namespace cool

#endif
