#ifndef COOL_TESTS_HELPERS_HPP
#define COOL_TESTS_HELPERS_HPP

#include <filesystem>
#include <string>

#include "cool/compiler.hpp"
#include "cool/ground.hpp"

namespace cool::testing {

// Canonical example programs exercised throughout the suites.

// Four fact functions (two forward, two inverse) and a single-step query.
inline const char* kFactFunctions = R"(@add(a)to(b){
    b=b+a;
}
@add(a,b){
    return:a+b;
}
@{a+$x==b}{
    x=b-a;
}
@{a+$x}{
    x=ans-a;
}
new:x=0;
1+$x==2;
)";

// Rewrite rules with the three slot modes and a recursive relational rule.
inline const char* kRuleFunctions = R"(expr:@{ln(a*b)}{
    return:ln(a)+ln(b);
}
expr:@{ln(a*$b)}{
    return:ln(a)+ln(b);
}
expr:@{ln(a*#b)}{
    return:ln(a)+ln(b);
}
expr:@{(a) is the parent of (b) && (b) is the parent of (c)}{
    return:(a) is the parent of (b) && (b) is the parent of (c) && (a) is the grandparent of (c);
}
)";

// Two constraint-query groups: unit pricing and projectile range.
inline const char* kConstraintGroups = R"(@(a) kg of apples at (b) per kg costs{
    return:a*b;
}=>@($a) kg of apples at (b) per kg given costs;
new:w = 0;
($w) kg of apples at (3) per kg given costs == 50;

new:g=9.8;
new:pi=3.141592653589793;
@projectile distance with speed (v0) and angle (t){
     v0x=v0*cos(t);
     v0y=v0*sin(t);
     tf=2*v0y/g;
     return:v0y*tf;
}=>@speed ($v0) at angle (t) given distance;
new:v=0;
speed ($v) at angle (pi/3) given distance == 1000;
)";

// Two classes with prompts and inheritance; solves a quadratic equation.
inline const char* kQuadraticSolver = R"(#load(io);
class: Quadratic Equation Solver{
    expr:@(-2,0,0){$a==b}{
        return:a-b==0;
    }
    expr:@(0,1,0){#a-b}{
        return:a+(-b);
    }
    @(0,0,2){a*$x^2+b*x+c==0}{
        x=(-b+(b^2-4*a*c)^0.5)/(2*a);
    }
}
class: Main << Quadratic Equation Solver{
    new:x=1;
    1*$x^2+4*x==100;
};
Main:m;
m.x-->screen;
)";

inline Config test_config(const std::string& tag) {
    Config cfg;
    cfg.agent = false;
    cfg.collect = false;
    auto base = std::filesystem::temp_directory_path() / ("cool-tests-" + tag);
    cfg.data_dir = (base / "data").string();
    cfg.model_dir = (base / "models").string();
    return cfg;
}

struct CompiledRun {
    Compiled compiled;
    ExecOutputs out;
};

inline CompiledRun compile_and_run(const std::string& source, const std::string& name,
                                   Config cfg = test_config("run")) {
    CompilerSession session(cfg);
    CompileFlags flags;
    flags.agent = false;
    flags.collect = false;
    CompiledRun r{session.compile_source(source, name, flags), {}};
    r.out = session.run(r.compiled);
    return r;
}

} // namespace cool::testing

#endif
