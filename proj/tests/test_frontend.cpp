#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cool/parser.hpp"
#include "cool/printer.hpp"
#include "helpers.hpp"

using namespace cool;

TEST_CASE("fact-function example parses into the expected shape") {
    Program p = parse_program(testing::kFactFunctions, "facts");
    CHECK(p.functions.size() == 4);
    CHECK(p.statements.size() == 2);
    CHECK(p.statements[0].kind == StmtKind::New);
    CHECK(p.statements[1].kind == StmtKind::ExprStmt);
    CHECK(p.classes.empty());

    CHECK(p.functions[0].kind == FunctionKind::ForwardFact);
    CHECK(p.functions[0].signature == "add_ARG_to_ARG_");
    CHECK(p.functions[1].kind == FunctionKind::ForwardFact);
    CHECK(p.functions[2].kind == FunctionKind::InverseFact);
    CHECK(p.functions[3].kind == FunctionKind::InverseFact);
}

TEST_CASE("empty source parses to an empty program") {
    Program p = parse_program("", "empty");
    CHECK(p.functions.empty());
    CHECK(p.classes.empty());
    CHECK(p.statements.empty());
}

TEST_CASE("inverse declaration carries exactly one undetermined slot") {
    Program p = parse_program("@{a+$x==b}{x=b-a;}", "one");
    REQUIRE(p.functions.size() == 1);
    const auto& fn = p.functions[0];
    CHECK(fn.kind == FunctionKind::InverseFact);
    int dollars = 0;
    for (const auto& [name, mode] : fn.param_modes) dollars += mode == '$' ? 1 : 0;
    CHECK(dollars == 1);
}

TEST_CASE("rule functions and slot modes classify as rules") {
    Program p = parse_program(testing::kRuleFunctions, "rules");
    REQUIRE(p.functions.size() == 4);
    for (const auto& fn : p.functions) CHECK(fn.kind == FunctionKind::Rule);
    CHECK(p.functions[1].param_modes.at("b") == '$');
    CHECK(p.functions[2].param_modes.at("b") == '#');
}

TEST_CASE("constraint-query groups classify and validate") {
    Program p = parse_program(testing::kConstraintGroups, "groups");
    REQUIRE(p.functions.size() == 2);
    for (const auto& fn : p.functions) {
        CHECK(fn.kind == FunctionKind::ConstraintQueryGroup);
        REQUIRE(fn.query_components.size() == 1);
        CHECK(fn.query_components[0].kind == FunctionKind::InverseFact);
    }
}

TEST_CASE("classification is total and deterministic") {
    Program p = parse_program(testing::kQuadraticSolver, "quad");
    for (const auto& cls : p.classes) {
        for (const auto& fn : cls.functions) {
            CHECK(classify_function(fn) == fn.kind);
            CHECK(classify_function(fn) == classify_function(fn));
        }
    }
}

TEST_CASE("parse errors carry source positions") {
    CHECK_THROWS_AS(parse_program("new:x=;", "bad"), CoolError);
    try {
        parse_program("\n\nnew:x=;", "bad");
        FAIL("expected a parse error");
    } catch (const CoolError& e) {
        CHECK(e.loc().line == 3);
    }
}

TEST_CASE("all-zero prompt vectors are rejected") {
    CHECK_THROWS_WITH_AS(parse_program("@(0,0,0){a+$x==b}{x=b-a;}", "zero"),
                         doctest::Contains("never be invokable"), CoolError);
}

TEST_CASE("rules must consist of a single return expression") {
    CHECK_THROWS_AS(parse_program("expr:@{a+b}{x=a;}", "badrule"), CoolError);
}

TEST_CASE("contradictory markers: a rule name with an undetermined slot") {
    CHECK_THROWS_WITH_AS(parse_program("expr:@solve($x)with(a){return:a;}", "contra"),
                         doctest::Contains("contradictory"), CoolError);
}

TEST_CASE("multiple undetermined slots in one inverse name are rejected") {
    CHECK_THROWS_AS(parse_program("@{$x+$y==b}{x=b;}", "multi"), CoolError);
}

TEST_CASE("domain resolution: inheritance plus loads") {
    Program p = parse_program(testing::kQuadraticSolver, "quad");
    auto domains = resolve_domains(p);
    const DomainSet& main = domains.at("Main");
    CHECK(main.size() == 3);
    CHECK(main.contains("io"));
    CHECK(main.contains("Quadratic Equation Solver"));
    CHECK(main.contains("Main"));
}

TEST_CASE("domain resolution: class without parents") {
    Program p = parse_program("#load(io);\nclass: Solo{ new:x=0; }", "solo");
    auto domains = resolve_domains(p);
    CHECK(domains.at("Solo").size() == 2);
    CHECK(domains.at("Solo").contains("Solo"));
    CHECK(domains.at("Solo").contains("io"));
}

TEST_CASE("domain resolution is transitive and monotone") {
    const char* base = "class: C{ new:z=0; }\nclass: B << C{ new:y=0; }\nclass: A << B{ new:x=0; }";
    Program p = parse_program(base, "t");
    auto domains = resolve_domains(p);
    CHECK(domains.at("A").contains("A"));
    CHECK(domains.at("A").contains("B"));
    CHECK(domains.at("A").contains("C"));

    // adding an inheritance edge only grows every context's set
    const char* more = "class: D{ new:w=0; }\nclass: C << D{ new:z=0; }\nclass: B << C{ new:y=0; "
                       "}\nclass: A << B{ new:x=0; }";
    auto domains2 = resolve_domains(parse_program(more, "t"));
    for (const auto& [ctx, d] : domains) {
        if (ctx == "") continue;
        for (const auto& n : d.names) CHECK(domains2.at(ctx).contains(n));
    }
}

TEST_CASE("inheritance cycles and unknown parents are rejected") {
    CHECK_THROWS_WITH_AS(
        resolve_domains(parse_program("class: A << B{ new:x=0; }\nclass: B << A{ new:y=0; }", "c")),
        doctest::Contains("cycle"), CoolError);
    CHECK_THROWS_WITH_AS(resolve_domains(parse_program("class: A << Nowhere{ new:x=0; }", "u")),
                         doctest::Contains("unknown parent"), CoolError);
}

TEST_CASE("duplicate class names are rejected") {
    CHECK_THROWS_AS(parse_program("class: A{ new:x=0; }\nclass: A{ new:y=0; }", "dup"), CoolError);
}

TEST_CASE("parse-print-parse reaches a fixpoint on all example programs") {
    for (const char* src : {testing::kFactFunctions, testing::kRuleFunctions,
                            testing::kConstraintGroups, testing::kQuadraticSolver}) {
        Program once = parse_program(src, "fix");
        std::string printed = print_program(once);
        Program twice = parse_program(printed, "fix");
        CHECK(print_program(twice) == printed);
    }
}

TEST_CASE("mixfix calls parse with literal words and argument groups") {
    Program p = parse_program("new:y=0;\nnew:x = speed (y) at angle (3/2) given distance;", "mix");
    REQUIRE(p.statements.size() == 2);
    const Expr& e = *p.statements[1].value;
    CHECK(e.kind == ExprKind::Call);
    CHECK(normalize_signature(e.parts) == "speed_ARG_at angle_ARG_given distance");
    CHECK(e.args.size() == 2);
}
