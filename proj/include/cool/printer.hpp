#ifndef COOL_PRINTER_HPP
#define COOL_PRINTER_HPP

#include <string>

#include "cool/ast.hpp"

namespace cool {

// Canonical source renderings. Parsing the printed form yields a structurally
// equal AST (used by the round-trip tests).
std::string print_program(const Program& prog);
std::string print_expr(const Expr& e);
std::string print_stmt(const Stmt& s, int indent = 0);
std::string print_function(const FunctionDecl& fn, int indent = 0);

// Shortest decimal rendering that round-trips through strtod.
std::string format_number(double v);

} // namespace cool

#endif
