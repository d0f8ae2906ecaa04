#ifndef COOL_PARSER_HPP
#define COOL_PARSER_HPP

#include "cool/ast.hpp"

namespace cool {

// Parses a source file into a Program. Throws CoolError with source
// location on malformed input.
Program parse_program(const std::string& source, const std::string& source_name = "<input>");

// Classification is derived from the declaration shape; exposed separately so
// callers can classify synthesized declarations.
FunctionKind classify_function(const FunctionDecl& decl);

} // namespace cool

#endif
