#ifndef COOL_EXEC_HPP
#define COOL_EXEC_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cool/lower.hpp"
#include "cool/registry.hpp"

namespace cool {

// Run-time variable store. Instance fields live under their instance name;
// reads fall back from frame locals through the instance to globals.
struct Environment {
    std::map<std::string, double> globals;
    std::map<std::string, std::map<std::string, double>> instances;
};

struct ExecOutputs {
    std::vector<double> screen;
    double wall_ms = 0.0;
};

// Interprets a fully ground program: instructions in address order, calls
// dispatched by bound function or by signature, inverse regions solved with
// zero search or agent involvement.
ExecOutputs execute(const IrProgram& ir, const Analysis& analysis, Environment& env);

// Direct invocation of a fact function (used by tests and the inverse
// round-trip checks). `args` are bound positionally to the declaration's
// parameter order; for inverse facts the undetermined parameter is skipped
// and `ans` supplies the determined result.
double call_fact_function(const IrProgram& ir, const Analysis& analysis, int fn_id,
                          const std::vector<double>& args, Environment& env);

// Deterministic scalar root finder: solves f(x) == target starting the
// bracket expansion at x0. Throws CoolError when no bracket is found.
double solve_scalar(const std::function<double(double)>& f, double target, double x0,
                    SourceLoc loc);

// Output formatting used by the CLI: 10 significant digits.
std::string format_screen_value(double v);

} // namespace cool

#endif
