#include "cool/parser.hpp"

#include <algorithm>
#include <set>

#include "cool/lexer.hpp"

namespace cool {

namespace {

const std::set<std::string> kBuiltins = {"ln", "sin", "cos", "tan"};

bool is_keyword(const std::string& w) {
    return w == "new" || w == "return" || w == "class" || w == "expr" || w == "exp" ||
           w == "load" || w == "screen";
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Program parse(const std::string& source_name) {
        Program prog;
        prog.source_name = source_name;
        while (!at(Tok::End)) {
            parse_top_item(prog);
        }
        finalize(prog);
        return prog;
    }

private:
    std::vector<Token> toks_;
    size_t pos_ = 0;

    const Token& cur() const { return toks_[pos_]; }
    const Token& peek(size_t n = 1) const {
        size_t k = pos_ + n;
        return toks_[std::min(k, toks_.size() - 1)];
    }
    bool at(Tok t) const { return cur().kind == t; }
    bool at_word(const char* w) const { return at(Tok::Word) && cur().text == w; }
    Token take() { return toks_[pos_++]; }
    Token expect(Tok t, const char* what) {
        if (!at(t)) {
            throw CoolError(std::string("expected ") + what + ", found " + tok_name(cur().kind),
                            cur().loc);
        }
        return take();
    }

    [[noreturn]] void fail(const std::string& msg) { throw CoolError(msg, cur().loc); }
    [[noreturn]] void fail(const std::string& msg, SourceLoc loc) { throw CoolError(msg, loc); }

    // ---- items ------------------------------------------------------------

    void parse_top_item(Program& prog) {
        if (at(Tok::Hash)) {
            parse_load(prog);
        } else if (at_word("class") && (peek().kind == Tok::Colon || peek().kind == Tok::Word)) {
            prog.classes.push_back(parse_class());
        } else if (starts_function()) {
            prog.functions.push_back(parse_function_group());
        } else {
            prog.statements.push_back(parse_stmt());
        }
    }

    void parse_load(Program& prog) {
        expect(Tok::Hash, "'#'");
        if (!at_word("load")) fail("expected 'load' after '#'");
        take();
        expect(Tok::LParen, "'('");
        std::string name = expect(Tok::Word, "domain name").text;
        expect(Tok::RParen, "')'");
        expect(Tok::Semi, "';'");
        prog.loads.push_back(name);
    }

    bool starts_function() const {
        if (at(Tok::At)) return true;
        if ((at_word("expr") || at_word("exp")) && peek().kind == Tok::Colon &&
            peek(2).kind == Tok::At)
            return true;
        return false;
    }

    std::string parse_multiword_name() {
        std::string name = expect(Tok::Word, "name").text;
        while (at(Tok::Word)) {
            name += " " + take().text;
        }
        return name;
    }

    ClassDecl parse_class() {
        ClassDecl cls;
        cls.loc = cur().loc;
        take(); // 'class'
        expect(Tok::Colon, "':'");
        cls.name = parse_multiword_name();
        if (at(Tok::LtLt)) {
            take();
            cls.parents.push_back(parse_multiword_name());
            while (at(Tok::Comma)) {
                take();
                cls.parents.push_back(parse_multiword_name());
            }
        }
        expect(Tok::LBrace, "'{'");
        while (!at(Tok::RBrace)) {
            if (at(Tok::End)) fail("unterminated class body", cls.loc);
            if (starts_function()) {
                cls.functions.push_back(parse_function_group());
            } else {
                cls.body.push_back(parse_stmt());
            }
        }
        take(); // '}'
        if (at(Tok::Semi)) take();
        return cls;
    }

    // ---- function declarations --------------------------------------------

    FunctionDecl parse_function_group() {
        FunctionDecl fn = parse_function_decl(/*component=*/false);
        while (at(Tok::FatArrow)) {
            take();
            fn.query_components.push_back(parse_function_decl(/*component=*/true));
        }
        validate_function(fn);
        return fn;
    }

    FunctionDecl parse_function_decl(bool component) {
        FunctionDecl fn;
        fn.loc = cur().loc;
        if (!component && (at_word("expr") || at_word("exp"))) {
            take();
            expect(Tok::Colon, "':'");
            fn.is_expr = true;
        }
        expect(Tok::At, "'@'");
        fn.loc = toks_[pos_ - 1].loc;

        if (at(Tok::LParen)) {
            size_t save = pos_;
            if (auto pcp = try_parse_pcp()) {
                fn.pcp = std::move(*pcp);
            } else {
                pos_ = save; // leading argument slot of a mixfix name
            }
        }

        if (at(Tok::LBrace)) {
            // expression pattern: @{expr}
            take();
            fn.pattern = parse_expr();
            expect(Tok::RBrace, "'}'");
        } else {
            parse_name_pattern(fn);
            fn.has_name_pattern = true;
        }

        if (component) {
            expect(Tok::Semi, "';'");
        } else {
            expect(Tok::LBrace, "'{' (function body)");
            while (!at(Tok::RBrace)) {
                if (at(Tok::End)) fail("unterminated function body", fn.loc);
                fn.body.push_back(parse_stmt());
            }
            take();
        }
        derive_param_modes(fn);
        fn.signature = fn.has_name_pattern ? normalize_signature(fn.name_parts) : "";
        return fn;
    }

    std::optional<Pcp> try_parse_pcp() {
        // A '(' group is a process-control prompt only when every element is a
        // signed number; otherwise it is the leading slot of a mixfix name.
        expect(Tok::LParen, "'('");
        Pcp pcp;
        while (true) {
            double sign = 1.0;
            if (at(Tok::Minus)) { take(); sign = -1.0; }
            else if (at(Tok::Plus)) { take(); }
            if (!at(Tok::Number)) return std::nullopt;
            pcp.entries.push_back(sign * take().number);
            if (at(Tok::Comma)) { take(); continue; }
            break;
        }
        if (!at(Tok::RParen)) return std::nullopt;
        SourceLoc loc = take().loc;
        if (pcp.entries.empty()) return std::nullopt;
        if (pcp.max_step() == 0) {
            fail("process-control prompt has no nonzero entry; the function would never be invokable",
                 loc);
        }
        return pcp;
    }

    void parse_name_pattern(FunctionDecl& fn) {
        bool any = false;
        while (true) {
            if (at(Tok::Word)) {
                fn.name_parts.push_back(NamePart{false, take().text});
                any = true;
            } else if (at(Tok::LParen)) {
                take();
                std::vector<ParamSlot> slots;
                slots.push_back(parse_param_slot());
                while (at(Tok::Comma)) {
                    take();
                    slots.push_back(parse_param_slot());
                }
                expect(Tok::RParen, "')'");
                for (size_t k = 0; k < slots.size(); ++k)
                    fn.name_parts.push_back(NamePart{true, ""});
                fn.arg_slots.push_back(std::move(slots));
                any = true;
            } else {
                break;
            }
        }
        if (!any) fail("expected a function name pattern after '@'");
    }

    ParamSlot parse_param_slot() {
        ParamSlot s;
        if (at(Tok::Dollar)) { take(); s.prefix = '$'; }
        else if (at(Tok::Hash)) { take(); s.prefix = '#'; }
        s.name = expect(Tok::Word, "parameter name").text;
        return s;
    }

    void derive_param_modes(FunctionDecl& fn) {
        auto bump = [&](const std::string& name, char prefix) {
            char& mode = fn.param_modes[name];
            auto rank = [](char m) { return m == '$' ? 2 : m == '#' ? 1 : 0; };
            if (rank(prefix) > rank(mode)) mode = prefix;
        };
        if (fn.has_name_pattern) {
            for (const auto& group : fn.arg_slots)
                for (const auto& s : group) bump(s.name, s.prefix);
        } else if (fn.pattern) {
            scan_expr_vars(fn.pattern, bump);
        }
    }

    template <class F>
    void scan_expr_vars(const ExprPtr& e, F&& bump) {
        if (!e) return;
        if (e->kind == ExprKind::VarRef) bump(e->name, e->prefix);
        for (const auto& a : e->args) scan_expr_vars(a, bump);
    }

    void validate_function(FunctionDecl& fn) {
        fn.kind = classify_function(fn);
        int dollar_slots = 0;
        for (const auto& [name, mode] : fn.param_modes)
            if (mode == '$') ++dollar_slots;

        if (fn.is_expr) {
            if (fn.has_name_pattern && dollar_slots > 0) {
                fail("contradictory markers: 'expr' rule with an undetermined slot in its name",
                     fn.loc);
            }
            if (fn.body.size() != 1 || fn.body[0].kind != StmtKind::Return) {
                fail("'expr' function must have a body consisting of a single return expression",
                     fn.loc);
            }
            if (!fn.query_components.empty()) {
                fail("'expr' function cannot declare query components", fn.loc);
            }
        } else if (dollar_slots > 1) {
            fail("inverse function declares more than one undetermined name slot", fn.loc);
        }

        if (!fn.query_components.empty()) {
            if (dollar_slots != 0) {
                fail("constraint component must have fully determined parameters", fn.loc);
            }
            for (auto& qc : fn.query_components) {
                int qdollar = 0;
                for (const auto& [name, mode] : qc.param_modes) {
                    if (mode == '$') ++qdollar;
                    if (!fn.param_modes.count(name)) {
                        fail("query component parameter '" + name +
                             "' does not appear in the constraint component", qc.loc);
                    }
                }
                if (qdollar == 0) fail("query component has no undetermined slot", qc.loc);
                if (qdollar > 1)
                    fail("query component declares more than one undetermined slot", qc.loc);
                qc.kind = FunctionKind::InverseFact;
            }
        }
    }

    // ---- statements ---------------------------------------------------------

    bool lookahead_instantiation() const {
        // words... ':' word ';'
        size_t k = pos_;
        if (toks_[k].kind != Tok::Word || is_keyword(toks_[k].text)) return false;
        while (toks_[k].kind == Tok::Word) ++k;
        if (toks_[k].kind != Tok::Colon) return false;
        ++k;
        if (toks_[k].kind != Tok::Word) return false;
        ++k;
        return toks_[k].kind == Tok::Semi;
    }

    Stmt parse_stmt() {
        Stmt st;
        st.loc = cur().loc;
        if (at_word("new") && peek().kind == Tok::Colon) {
            take();
            take();
            st.kind = StmtKind::New;
            st.target = expect(Tok::Word, "variable name").text;
            expect(Tok::Assign, "'='");
            st.value = parse_expr();
            expect(Tok::Semi, "';'");
            return st;
        }
        if (at_word("return") && peek().kind == Tok::Colon) {
            take();
            take();
            st.kind = StmtKind::Return;
            st.value = parse_expr();
            expect(Tok::Semi, "';'");
            return st;
        }
        if (lookahead_instantiation()) {
            st.kind = StmtKind::Instantiate;
            st.class_name = parse_multiword_name();
            expect(Tok::Colon, "':'");
            st.target = expect(Tok::Word, "instance name").text;
            expect(Tok::Semi, "';'");
            return st;
        }
        if (at(Tok::Word) && !is_keyword(cur().text) && peek().kind == Tok::Assign) {
            st.kind = StmtKind::Assign;
            st.target = take().text;
            take(); // '='
            st.value = parse_expr();
            expect(Tok::Semi, "';'");
            return st;
        }
        // expression statement or screen output
        ExprPtr e = parse_expr();
        if (at(Tok::Arrow)) {
            take();
            if (!at_word("screen")) fail("expected 'screen' after '-->'");
            take();
            expect(Tok::Semi, "';'");
            st.kind = StmtKind::Output;
            st.value = e;
            return st;
        }
        expect(Tok::Semi, "';'");
        st.kind = StmtKind::ExprStmt;
        st.value = e;
        return st;
    }

    // ---- expressions ----------------------------------------------------------
    //
    //   andexpr := eqexpr { '&&' eqexpr }
    //   eqexpr  := addexpr [ '==' addexpr ]
    //   addexpr := mulexpr { ('+'|'-') mulexpr }
    //   mulexpr := unary { ('*'|'/') unary }
    //   unary   := '-' unary | powexpr
    //   powexpr := postfix [ '^' unary ]
    //   postfix := primary [ '.' word ]

    ExprPtr parse_expr() { return parse_and(); }

    ExprPtr mk(ExprKind k, SourceLoc loc) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->loc = loc;
        return e;
    }

    ExprPtr binary(const std::string& op, ExprPtr l, ExprPtr r, SourceLoc loc) {
        auto e = mk(ExprKind::Binary, loc);
        e->op = op;
        e->args = {std::move(l), std::move(r)};
        return e;
    }

    ExprPtr parse_and() {
        ExprPtr e = parse_eq();
        while (at(Tok::AndAnd)) {
            SourceLoc loc = take().loc;
            e = binary("&&", e, parse_eq(), loc);
        }
        return e;
    }

    ExprPtr parse_eq() {
        ExprPtr e = parse_add();
        if (at(Tok::EqEq)) {
            SourceLoc loc = take().loc;
            e = binary("==", e, parse_add(), loc);
        }
        return e;
    }

    ExprPtr parse_add() {
        ExprPtr e = parse_mul();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            bool plus = at(Tok::Plus);
            SourceLoc loc = take().loc;
            e = binary(plus ? "+" : "-", e, parse_mul(), loc);
        }
        return e;
    }

    ExprPtr parse_mul() {
        ExprPtr e = parse_unary();
        while (at(Tok::Star) || at(Tok::Slash)) {
            bool mul = at(Tok::Star);
            SourceLoc loc = take().loc;
            e = binary(mul ? "*" : "/", e, parse_unary(), loc);
        }
        return e;
    }

    ExprPtr parse_unary() {
        if (at(Tok::Minus)) {
            SourceLoc loc = take().loc;
            auto e = mk(ExprKind::Unary, loc);
            e->op = "-";
            e->args = {parse_unary()};
            return e;
        }
        return parse_pow();
    }

    ExprPtr parse_pow() {
        ExprPtr base = parse_postfix();
        if (at(Tok::Caret)) {
            SourceLoc loc = take().loc;
            return binary("^", base, parse_unary(), loc);
        }
        return base;
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_primary();
        if (at(Tok::Dot) && e->kind == ExprKind::VarRef && e->prefix == 0) {
            take();
            auto m = mk(ExprKind::Member, e->loc);
            m->name = e->name;
            m->field = expect(Tok::Word, "member name").text;
            return m;
        }
        return e;
    }

    ExprPtr parse_primary() {
        SourceLoc loc = cur().loc;
        if (at(Tok::Number)) {
            auto e = mk(ExprKind::Number, loc);
            e->number = take().number;
            return e;
        }
        if (at(Tok::Dollar) || at(Tok::Hash)) {
            char prefix = at(Tok::Dollar) ? '$' : '#';
            take();
            auto e = mk(ExprKind::VarRef, loc);
            e->prefix = prefix;
            e->name = expect(Tok::Word, "variable name").text;
            return maybe_mixfix_from(e, loc);
        }
        if (at(Tok::LParen)) {
            take();
            ExprPtr inner = parse_expr();
            if (at(Tok::Comma)) {
                // argument group of a mixfix call, e.g. add(2,3)
                std::vector<ExprPtr> args{inner};
                while (at(Tok::Comma)) {
                    take();
                    args.push_back(parse_expr());
                }
                expect(Tok::RParen, "')'");
                return parse_mixfix(loc, {}, std::move(args), /*arg_counts=*/{args.size()});
            }
            expect(Tok::RParen, "')'");
            if (at(Tok::Word) && !is_keyword(cur().text)) {
                // leading-argument mixfix call: (w) kg of apples ...
                return parse_mixfix(loc, {}, {inner}, {1});
            }
            return inner;
        }
        if (at(Tok::Word)) {
            if (is_keyword(cur().text)) fail("unexpected keyword '" + cur().text + "'");
            auto e = mk(ExprKind::VarRef, loc);
            e->name = take().text;
            return maybe_mixfix_from(e, loc);
        }
        fail(std::string("expected an expression, found ") + tok_name(cur().kind));
    }

    // Continue collecting a mixfix call after an initial variable reference if
    // the next tokens extend it (another word, or an argument group).
    ExprPtr maybe_mixfix_from(ExprPtr first, SourceLoc loc) {
        bool extends = at(Tok::LParen) || (at(Tok::Word) && !is_keyword(cur().text));
        if (!extends) return first;
        if (first->prefix != 0) {
            // $x / #x never begins a mixfix name
            return first;
        }
        // builtin math call: ln(x)
        if (kBuiltins.count(first->name) && at(Tok::LParen)) {
            take();
            auto e = mk(ExprKind::Builtin, loc);
            e->name = first->name;
            e->args.push_back(parse_expr());
            expect(Tok::RParen, "')'");
            return e;
        }
        std::vector<NamePart> parts{NamePart{false, first->name}};
        return parse_mixfix(loc, std::move(parts), {}, {});
    }

    ExprPtr parse_mixfix(SourceLoc loc, std::vector<NamePart> parts, std::vector<ExprPtr> args,
                         std::vector<size_t> arg_counts) {
        for (size_t n : arg_counts)
            for (size_t k = 0; k < n; ++k) parts.push_back(NamePart{true, ""});
        while (true) {
            if (at(Tok::Word) && !is_keyword(cur().text)) {
                parts.push_back(NamePart{false, take().text});
                continue;
            }
            if (at(Tok::LParen)) {
                take();
                args.push_back(parse_expr());
                parts.push_back(NamePart{true, ""});
                while (at(Tok::Comma)) {
                    take();
                    args.push_back(parse_expr());
                    parts.push_back(NamePart{true, ""});
                }
                expect(Tok::RParen, "')'");
                continue;
            }
            break;
        }
        bool any_word = false;
        for (const auto& p : parts) any_word |= !p.is_arg;
        if (!any_word) fail("call is missing a function name", loc);
        auto e = mk(ExprKind::Call, loc);
        e->parts = std::move(parts);
        e->args = std::move(args);
        return e;
    }

    // ---- program-level validation ------------------------------------------

    void finalize(Program& prog) {
        std::set<std::string> class_names;
        for (const auto& c : prog.classes) {
            if (!class_names.insert(c.name).second) {
                fail("duplicate class name '" + c.name + "'", c.loc);
            }
        }
    }
};

} // namespace

std::string normalize_signature(const std::vector<NamePart>& parts) {
    std::string sig;
    bool prev_word = false;
    for (const auto& p : parts) {
        if (p.is_arg) {
            sig += "_ARG_";
            prev_word = false;
        } else {
            if (prev_word) sig += " ";
            sig += p.word;
            prev_word = true;
        }
    }
    return sig;
}

FunctionKind classify_function(const FunctionDecl& decl) {
    if (!decl.query_components.empty()) return FunctionKind::ConstraintQueryGroup;
    if (decl.is_expr) return FunctionKind::Rule;
    for (const auto& [name, mode] : decl.param_modes)
        if (mode == '$') return FunctionKind::InverseFact;
    return FunctionKind::ForwardFact;
}

Program parse_program(const std::string& source, const std::string& source_name) {
    Parser p(lex(source));
    return p.parse(source_name);
}

} // namespace cool
