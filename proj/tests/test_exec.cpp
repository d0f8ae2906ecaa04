#include <doctest.h>

#include "cool/bddb.hpp"
#include "cool/exec.hpp"
#include "cool/parser.hpp"
#include "cool/policy.hpp"
#include "cool/rng.hpp"
#include "helpers.hpp"

using namespace cool;

namespace {

testing::CompiledRun run_src(const std::string& src, const std::string& name) {
    return testing::compile_and_run(src, name);
}

Compiled compile_src(const std::string& src, const std::string& name, Environment& env) {
    CompilerSession session(testing::test_config("exec"));
    CompileFlags flags;
    flags.agent = false;
    flags.collect = false;
    Compiled c = session.compile_source(src, name, flags);
    execute(c.ir, c.analysis, env);
    return c;
}

} // namespace

TEST_CASE("forward call through the two-parameter declaration computes 101") {
    auto r = run_src("@add(a)to(b){\n    b=b+a;\n}\nadd(1)to(100)-->screen;", "table");
    REQUIRE(r.out.screen.size() == 1);
    CHECK(r.out.screen[0] == 101.0); // hand-executed: b = 100 + 1
}

TEST_CASE("single-step inverse query binds x = 1 exactly") {
    Environment env;
    compile_src(testing::kFactFunctions, "facts", env);
    CHECK(env.globals.at("x") == 1.0);
}

TEST_CASE("unit-price and projectile queries solve to their closed forms") {
    Environment env;
    compile_src(testing::kConstraintGroups, "groups", env);
    CHECK(env.globals.at("w") == doctest::Approx(50.0 / 3.0).epsilon(1e-10));
    // v = sqrt(distance * g / (2 sin^2 theta))
    double oracle = std::sqrt(1000.0 * 9.8 / (2.0 * std::pow(std::sin(M_PI / 3.0), 2.0)));
    CHECK(env.globals.at("v") == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(std::fabs(env.globals.at("v") - 80.8290) < 1e-4);
}

TEST_CASE("quadratic program prints the positive root") {
    auto r = run_src(testing::kQuadraticSolver, "quad");
    REQUIRE(r.out.screen.size() == 1);
    CHECK(r.out.screen[0] == doctest::Approx((-4.0 + std::sqrt(416.0)) / 2.0).epsilon(1e-12));
    CHECK(format_screen_value(r.out.screen[0]) == "8.198039027");
}

TEST_CASE("division by zero reports a runtime error with a location") {
    try {
        run_src("new:x=1;\nnew:y=x/0;", "div0");
        FAIL("expected a runtime error");
    } catch (const CoolError& e) {
        CHECK(doctest::String(e.what()) == "division by zero");
        CHECK(e.loc().line == 2);
    }
}

TEST_CASE("even roots of negative numbers are runtime errors") {
    CHECK_THROWS_WITH_AS(run_src("new:x=0-4;\nnew:y=x^0.5;", "root"),
                         doctest::Contains("negative"), CoolError);
}

TEST_CASE("logarithms of non-positive values are runtime errors") {
    CHECK_THROWS_AS(run_src("new:y=ln(0);", "ln0"), CoolError);
}

TEST_CASE("execution is deterministic") {
    auto a = run_src(testing::kQuadraticSolver, "quad");
    auto b = run_src(testing::kQuadraticSolver, "quad");
    REQUIRE(a.out.screen.size() == b.out.screen.size());
    for (size_t k = 0; k < a.out.screen.size(); ++k) CHECK(a.out.screen[k] == b.out.screen[k]);
}

TEST_CASE("execution performs no searches and no agent predictions") {
    Config cfg = testing::test_config("sep");
    cfg.agent = false;
    CompilerSession session(cfg);
    CompileFlags flags;
    flags.agent = false;
    flags.collect = false;
    Compiled c = session.compile_source(testing::kQuadraticSolver, "quad", flags);

    long before = search_expansion_counter().load();
    Environment env;
    execute(c.ir, c.analysis, env);
    CHECK(search_expansion_counter().load() == before);
}

TEST_CASE("direct fact-function calls: forward and inverse") {
    Program p = parse_program(testing::kFactFunctions, "facts");
    Analysis analysis = analyze(p);
    IrProgram ir = lower(p, analysis);
    Environment env;
    // forward: add(a,b) with explicit return
    CHECK(call_fact_function(ir, analysis, 1, {2.0, 3.0}, env) == 5.0);
    // inverse {a+$x==b}: the body names both equation sides
    CHECK(call_fact_function(ir, analysis, 2, {1.0, 2.0}, env) == 1.0);
    // inverse {a+$x}: the determined result arrives as the trailing 'ans'
    CHECK(call_fact_function(ir, analysis, 3, {1.0, 2.0}, env) == 1.0);
}

TEST_CASE("scalar solver inverts monotone maps to tight tolerance") {
    SourceLoc loc{1, 1};
    double root = solve_scalar([](double x) { return 3.0 * x; }, 50.0, 0.0, loc);
    CHECK(root == doctest::Approx(50.0 / 3.0).epsilon(1e-12));
    root = solve_scalar([](double x) { return x * x * 0.153061224489796; }, 1000.0, 0.0, loc);
    CHECK(root == doctest::Approx(80.829037).epsilon(1e-6));
    CHECK_THROWS_AS(solve_scalar([](double) { return 1.0; }, 2.0, 0.0, loc), CoolError);
}

TEST_CASE("property: forward and inverse stay consistent on random instances") {
    // families: linear offset, scaling, quadratic branch, projectile range
    const char* src = R"(new:g=9.8;
@{a+$x==b}{
    x=b-a;
}
@shift(a)by(x){
    return:a+x;
}
@(a) kg of apples at (b) per kg costs{
    return:a*b;
}=>@($a) kg of apples at (b) per kg given costs;
@projectile distance with speed (v0) and angle (t){
    v0y=v0*sin(t);
    tf=2*v0y/g;
    return:v0y*tf;
}=>@speed ($v0) at angle (t) given distance;
)";
    Program p = parse_program(src, "pairs");
    Analysis analysis = analyze(p);
    IrProgram ir = lower(p, analysis);
    Environment env;
    env.globals["g"] = 9.8;

    Rng rng(555);
    for (int trial = 0; trial < 100; ++trial) {
        // linear: x = f^-1(b; a), then a + x must reproduce b
        double a = rng.uniform(-50, 50), b = rng.uniform(-50, 50);
        double x = call_fact_function(ir, analysis, 0, {a, b}, env);
        double fwd = call_fact_function(ir, analysis, 1, {a, x}, env);
        CHECK(fwd == doctest::Approx(b).epsilon(1e-9));

        // pricing: w solves w*price == cost
        double price = rng.uniform(0.5, 20), cost = rng.uniform(1, 500);
        SourceLoc loc{1, 1};
        double w = solve_scalar(
            [&](double u) { return call_fact_function(ir, analysis, 2, {u, price}, env); }, cost,
            0.0, loc);
        CHECK(call_fact_function(ir, analysis, 2, {w, price}, env) ==
              doctest::Approx(cost).epsilon(1e-9));

        // projectile: v solves range(v, angle) == dist
        double angle = rng.uniform(0.2, 1.3), dist = rng.uniform(10, 3000);
        double v = solve_scalar(
            [&](double u) { return call_fact_function(ir, analysis, 4, {u, angle}, env); }, dist,
            1.0, loc);
        CHECK(call_fact_function(ir, analysis, 4, {v, angle}, env) ==
              doctest::Approx(dist).epsilon(1e-9));
    }
}

TEST_CASE("instances keep separate fields") {
    const char* src = R"(class: Box{
    new:x=7;
}
Box:a;
Box:b;
a.x-->screen;
b.x-->screen;
)";
    auto r = run_src(src, "boxes");
    REQUIRE(r.out.screen.size() == 2);
    CHECK(r.out.screen[0] == 7.0);
    CHECK(r.out.screen[1] == 7.0);
}

TEST_CASE("screen output is formatted with ten significant digits") {
    CHECK(format_screen_value(8.19803902718557) == "8.198039027");
    CHECK(format_screen_value(101.0) == "101");
    CHECK(format_screen_value(16.666666666666668) == "16.66666667");
}
