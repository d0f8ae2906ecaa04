#include <doctest.h>

#include <set>

#include "cool/ground.hpp"
#include "cool/parser.hpp"
#include "cool/printer.hpp"
#include "helpers.hpp"
#include "synthetic.hpp"

using namespace cool;

namespace {

struct GroundFixture {
    Program program;
    Analysis analysis;
    IrProgram ir;
    Vocabulary vocab;
    GroundOptions opts;

    explicit GroundFixture(const std::string& src) {
        program = parse_program(src, "g");
        analysis = analyze(program);
        ir = lower(program, analysis);
    }
    const IrSegment& segment(size_t k = 0) const { return ir.queries.at(k); }
    const DomainSet& domain(const std::string& ctx) const { return analysis.domains.at(ctx); }
};

std::vector<std::string> action_names(const GroundFixture& fx, const std::vector<Action>& actions) {
    std::vector<std::string> out;
    for (const auto& a : actions) out.push_back(fx.analysis.registry[a.fn_id].display);
    return out;
}

} // namespace

// ---- evaluation-order deduction ---------------------------------------------------

namespace {
struct CallTag {
    bool inverse;
    int id;
    bool operator==(const CallTag& o) const { return inverse == o.inverse && id == o.id; }
};
auto is_inv = [](const CallTag& c) { return c.inverse; };
} // namespace

TEST_CASE("evaluation order: forwards keep order, inverses reverse") {
    std::vector<CallTag> calls{{false, 0}, {true, 1}, {false, 2}, {true, 3}};
    auto out = deduce_eval_order(calls, is_inv);
    CHECK(out == std::vector<CallTag>{{false, 0}, {false, 2}, {true, 3}, {true, 1}});
}

TEST_CASE("evaluation order: all-forward input is unchanged") {
    std::vector<CallTag> calls{{false, 0}, {false, 1}, {false, 2}};
    CHECK(deduce_eval_order(calls, is_inv) == calls);
}

TEST_CASE("evaluation order: all-inverse input is reversed") {
    std::vector<CallTag> calls{{true, 0}, {true, 1}, {true, 2}};
    CHECK(deduce_eval_order(calls, is_inv) == std::vector<CallTag>{{true, 2}, {true, 1}, {true, 0}});
}

// ---- groundness ----------------------------------------------------------------------

TEST_CASE("fresh segments are not ground; empty segments are") {
    GroundFixture fx(testing::kFactFunctions);
    CHECK_FALSE(is_ground(fx.segment()));
    IrSegment empty;
    CHECK(is_ground(empty));
}

// ---- action enumeration under prompt admissibility -------------------------------------

TEST_CASE("quadratic query: only the transpose rule matches initially") {
    GroundFixture fx(testing::kQuadraticSolver);
    GroundingState s0 = make_initial_state(fx.segment());
    auto actions = enumerate_actions(s0, fx.domain("Main"), fx.analysis.registry, fx.opts);
    REQUIRE(actions.size() == 1);
    CHECK(actions[0].is_rule);
    CHECK(actions[0].r_p == -2.0);      // prompt entry at step 1
    CHECK(actions[0].fired_step == 1);
}

TEST_CASE("quadratic query: prompts gate admissibility as the step advances") {
    GroundFixture fx(testing::kQuadraticSolver);
    GroundingState s0 = make_initial_state(fx.segment());
    auto a0 = enumerate_actions(s0, fx.domain("Main"), fx.analysis.registry, fx.opts);
    REQUIRE(a0.size() == 1);

    GroundingState s1 = apply_action(s0, a0[0], fx.analysis.registry, fx.opts);
    auto a1 = enumerate_actions(s1, fx.domain("Main"), fx.analysis.registry, fx.opts);
    // transpose may fire again (step still 1) and the subtraction rewrite fires at step 2
    REQUIRE(a1.size() == 2);
    CHECK(a1[0].fired_step == 2); // subtraction rewrite listed at its minimal step
    CHECK(a1[0].r_p == 1.0);
    CHECK(a1[1].fired_step == 1);
    CHECK(a1[1].r_p == -2.0);

    GroundingState s2 = apply_action(s1, a1[0], fx.analysis.registry, fx.opts);
    CHECK(s2.step == 2);
    auto a2 = enumerate_actions(s2, fx.domain("Main"), fx.analysis.registry, fx.opts);
    // at step 2 the transpose prompt [-2,0,0] has no nonzero entry left
    REQUIRE(a2.size() == 1);
    CHECK_FALSE(a2[0].is_rule);
    CHECK(a2[0].fired_step == 3);
    CHECK(a2[0].r_p == 2.0);
}

TEST_CASE("empty domain set yields no actions") {
    GroundFixture fx(testing::kQuadraticSolver);
    GroundingState s0 = make_initial_state(fx.segment());
    DomainSet empty;
    CHECK(enumerate_actions(s0, empty, fx.analysis.registry, fx.opts).empty());
}

TEST_CASE("binding prefers functions in declaration order under equal prompts") {
    GroundFixture fx(testing::kFactFunctions);
    GroundingState s0 = make_initial_state(fx.segment());
    auto actions = enumerate_actions(s0, fx.domain(""), fx.analysis.registry, fx.opts);
    // both inverse declarations match the equation root
    REQUIRE(actions.size() == 2);
    auto names = action_names(fx, actions);
    CHECK(names[0] == "{a+$x==b}");
    CHECK(names[1] == "{a+$x}");
}

// ---- action application ------------------------------------------------------------------

TEST_CASE("binding a fact marks every covered instruction and advances the step") {
    GroundFixture fx(testing::kFactFunctions);
    GroundingState s0 = make_initial_state(fx.segment());
    auto actions = enumerate_actions(s0, fx.domain(""), fx.analysis.registry, fx.opts);
    GroundingState s1 = apply_action(s0, actions[0], fx.analysis.registry, fx.opts);
    CHECK(is_ground(*s1.seg));
    CHECK(s1.depth == 1);
    for (const auto& i : s1.seg->instrs) CHECK(i.bound_fn == actions[0].fn_id);
    REQUIRE(s1.seg->regions.size() == 1);
    CHECK(s1.seg->regions[0].out_vars.size() == 1);
    CHECK(s1.seg->regions[0].out_vars[0].second == "x");
}

TEST_CASE("applying a rule grows the node count by the rewrite expansion") {
    // ln(a*b) -> ln(a)+ln(b): 2 instructions become 3
    GroundFixture fx("expr:@{ln(a*#b)}{\n    return:ln(a)+ln(b);\n}\nnew:x=0;\nln(4*$x)==3;");
    GroundingState s0 = make_initial_state(fx.segment());
    CHECK(s0.seg->instrs.size() == 3); // '*', 'ln', '=='
    auto actions = enumerate_actions(s0, fx.domain(""), fx.analysis.registry, fx.opts);
    REQUIRE(actions.size() == 1);
    GroundingState s1 = apply_action(s0, actions[0], fx.analysis.registry, fx.opts);
    CHECK(s1.seg->instrs.size() == 4); // 'ln','ln','+','=='
}

TEST_CASE("action application is deterministic") {
    GroundFixture fx(testing::kQuadraticSolver);
    GroundingState s0 = make_initial_state(fx.segment());
    auto actions = enumerate_actions(s0, fx.domain("Main"), fx.analysis.registry, fx.opts);
    GroundingState a = apply_action(s0, actions[0], fx.analysis.registry, fx.opts);
    GroundingState b = apply_action(s0, actions[0], fx.analysis.registry, fx.opts);
    CHECK(a.hash == b.hash);
    CHECK(dump_segment(a.seg->instrs) == dump_segment(b.seg->instrs));
}

TEST_CASE("persistence: applying actions never mutates ancestors") {
    GroundFixture fx(testing::kQuadraticSolver);
    GroundingState s0 = make_initial_state(fx.segment());
    uint64_t h0 = s0.hash;
    std::string d0 = dump_segment(s0.seg->instrs);

    auto a0 = enumerate_actions(s0, fx.domain("Main"), fx.analysis.registry, fx.opts);
    GroundingState s1 = apply_action(s0, a0[0], fx.analysis.registry, fx.opts);
    uint64_t h1 = s1.hash;
    auto a1 = enumerate_actions(s1, fx.domain("Main"), fx.analysis.registry, fx.opts);
    apply_action(s1, a1[0], fx.analysis.registry, fx.opts);

    CHECK(s0.hash == h0);
    CHECK(dump_segment(s0.seg->instrs) == d0);
    CHECK(segment_state_hash(*s0.seg, s0.step, s0.last_pcp_max) == h0);
    CHECK(segment_state_hash(*s1.seg, s1.step, s1.last_pcp_max) == h1);
}

TEST_CASE("splice locality: addresses outside the rewritten subtree are untouched") {
    // rewrite targets the subtraction below the equation root
    GroundFixture fx("expr:@{#a-b}{\n    return:a+(-b);\n}\n@{a+$x+c==b}{\n    x=b-a-c;\n}\n"
                     "new:x=0;\n2+$x-5==9;");
    GroundingState s0 = make_initial_state(fx.segment());
    auto actions = enumerate_actions(s0, fx.domain(""), fx.analysis.registry, fx.opts);
    REQUIRE(!actions.empty());
    REQUIRE(actions[0].is_rule);
    const auto& covered = actions[0].match.covered;
    // the equation root lies outside the matched subtree
    std::set<int> covered_set(covered.begin(), covered.end());
    std::vector<HierAddr> outside_before;
    for (int k = 0; k < int(s0.seg->instrs.size()); ++k)
        if (!covered_set.count(k)) outside_before.push_back(s0.seg->instrs[size_t(k)].addr);
    REQUIRE(!outside_before.empty());

    HierAddr lo = s0.seg->instrs[size_t(covered.front())].addr;
    HierAddr hi = s0.seg->instrs[size_t(covered.back())].addr;

    GroundingState s1 = apply_action(s0, actions[0], fx.analysis.registry, fx.opts);
    std::vector<HierAddr> outside_after;
    for (const auto& i : s1.seg->instrs) {
        if (i.addr < lo || hi < i.addr) {
            bool was_outside = false;
            for (const auto& o : outside_before) was_outside |= o == i.addr;
            if (was_outside) outside_after.push_back(i.addr);
        }
    }
    CHECK(outside_after.size() == outside_before.size());
}

// ---- whole-program grounding ---------------------------------------------------------------

TEST_CASE("quadratic program grounds and executes to the closed-form root") {
    auto r = testing::compile_and_run(testing::kQuadraticSolver, "quad");
    REQUIRE(r.out.screen.size() == 1);
    double oracle = (-4.0 + std::sqrt(416.0)) / 2.0; // closed-form quadratic root
    CHECK(r.out.screen[0] == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("unit-price query grounds and executes to the linear-equation solution") {
    auto r = testing::compile_and_run(testing::kConstraintGroups, "groups");
    REQUIRE(r.out.screen.size() == 0); // no output statements in this fixture
    CompilerSession session(testing::test_config("g1"));
    CompileFlags flags;
    flags.agent = false;
    flags.collect = false;
    auto compiled = session.compile_source(testing::kConstraintGroups, "groups", flags);
    Environment env;
    execute(compiled.ir, compiled.analysis, env);
    CHECK(env.globals.at("w") == doctest::Approx(50.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("a query with no matching function reports a grounding failure") {
    CHECK_THROWS_WITH_AS(
        testing::compile_and_run("new:x=0;\n1+$x==2;", "nomatch"),
        doctest::Contains("unable to ground"), CoolError);
}

TEST_CASE("grounding failures identify the query location") {
    try {
        testing::compile_and_run("new:x=0;\n\n\n7*$x==21;", "loc");
        FAIL("expected failure");
    } catch (const CoolError& e) {
        CHECK(e.loc().line == 4);
    }
}

// ---- prompt-step soundness property ----------------------------------------------------------

TEST_CASE("property: prompt firing is sound on random chain systems") {
    Rng rng(31337);
    int successes = 0;
    const int trials = 1500; // the acceptance suite runs the full 10k
    for (int trial = 0; trial < trials; ++trial) {
        std::string chain_src = cool::testing::random_chain_program(rng);
        Program prog;
        Analysis analysis;
        IrProgram ir;
        try {
            prog = parse_program(chain_src, "chain");
            analysis = analyze(prog);
            ir = lower(prog, analysis);
        } catch (const CoolError&) {
            continue; // a rejected random program is fine
        }
        REQUIRE(ir.queries.size() == 1);

        GroundOptions opts;
        SearchParams params;
        params.budget = 200;
        Vocabulary vocab;
        GroundProblem problem(ir.queries[0], analysis.domains.at(""), analysis.registry, nullptr,
                              vocab, opts);
        auto outcome = bddb_search(problem, params);
        if (!outcome.success) continue;
        ++successes;

        // replay the action sequence, checking the prompt-soundness conditions
        GroundingState s = make_initial_state(ir.queries[0]);
        int prev_step = s.step;
        for (const auto& act : outcome.actions) {
            const FnInfo& fn = analysis.registry[act.fn_id];
            if (fn.pcp) {
                REQUIRE(act.fired_step >= prev_step);
                REQUIRE(fn.pcp->entries.at(size_t(act.fired_step - 1)) != 0.0);
                REQUIRE(fn.pcp->entries.at(size_t(act.fired_step - 1)) == act.r_p);
            } else {
                REQUIRE(act.fired_step == prev_step);
            }
            s = apply_action(s, act, analysis.registry, opts);
            prev_step = s.step;
        }
        REQUIRE(is_ground(*s.seg));
        // terminal-step completeness
        if (s.last_pcp_max != 0) REQUIRE(s.step == s.last_pcp_max);
    }
    CHECK(successes > trials / 10); // the generator must produce solvable systems
}

TEST_CASE("the effective domain covers only the functions actually used") {
    // the class context also contains 'io', but every applied function lives
    // in the solver class
    Program prog = parse_program(testing::kQuadraticSolver, "quad");
    Analysis analysis = analyze(prog);
    IrProgram ir = lower(prog, analysis);
    GroundReport report = ground_program(ir, analysis, nullptr, SearchParams{}, GroundOptions{},
                                         Vocabulary{});
    REQUIRE(report.batches.size() == 1);
    const DomainSet& effective = report.batches[0].effective;
    CHECK(effective.size() == 1);
    CHECK(effective.contains("Quadratic Equation Solver"));
    CHECK(effective.subset_of(analysis.domains.at("Main")));
    REQUIRE(report.batches[0].records.size() == 3);
    for (const auto& rec : report.batches[0].records) CHECK(rec.delta_pi == 1.0);
}
