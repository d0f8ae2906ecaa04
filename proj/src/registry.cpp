#include "cool/registry.hpp"

#include "cool/printer.hpp"

namespace cool {

namespace {

std::string display_name(const FunctionDecl& fn) {
    if (fn.has_name_pattern) return normalize_signature(fn.name_parts);
    return "{" + print_expr(*fn.pattern) + "}";
}

void register_decl(FnRegistry& reg, const FunctionDecl& fn, const std::string& domain) {
    FnInfo info;
    info.id = reg.size();
    info.decl = &fn;
    info.kind = fn.kind == FunctionKind::ConstraintQueryGroup ? FunctionKind::ForwardFact : fn.kind;
    info.domain = domain;
    info.signature = fn.signature;
    info.pcp = fn.pcp;
    info.display = display_name(fn);
    reg.fns.push_back(info);

    for (const auto& qc : fn.query_components) {
        FnInfo q;
        q.id = reg.size();
        q.decl = &qc;
        q.group = &fn;
        q.kind = FunctionKind::InverseFact;
        q.is_query_component = true;
        q.domain = domain;
        q.signature = qc.signature;
        q.pcp = fn.pcp; // components share the group's prompt
        q.display = display_name(qc);
        reg.fns.push_back(q);
    }
}

} // namespace

Analysis analyze(const Program& prog) {
    Analysis a;
    a.domains = resolve_domains(prog);
    for (const auto& fn : prog.functions) register_decl(a.registry, fn, prog.source_name);
    for (const auto& cls : prog.classes)
        for (const auto& fn : cls.functions) register_decl(a.registry, fn, cls.name);
    return a;
}

} // namespace cool
