#ifndef COOL_REGISTRY_HPP
#define COOL_REGISTRY_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cool/ast.hpp"
#include "cool/domains.hpp"

namespace cool {

// Flattened view of one invokable function. Constraint-query groups register
// the constraint component as a forward fact and each query component as an
// inverse fact pointing back at the constraint body.
struct FnInfo {
    int id = -1;
    const FunctionDecl* decl = nullptr;  // pattern source
    const FunctionDecl* group = nullptr; // owning constraint component for query components
    FunctionKind kind = FunctionKind::ForwardFact;
    bool is_query_component = false;
    std::string domain;    // declaring domain name
    std::string signature; // "" for expression patterns
    std::optional<Pcp> pcp;
    std::string display;   // for diagnostics and reports
};

struct FnRegistry {
    std::vector<FnInfo> fns;
    const FnInfo& operator[](int id) const { return fns[size_t(id)]; }
    int size() const { return int(fns.size()); }
};

struct Analysis {
    std::map<std::string, DomainSet> domains; // context -> invokable domain set
    FnRegistry registry;
};

Analysis analyze(const Program& prog);

} // namespace cool

#endif
