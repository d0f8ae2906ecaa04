#include "cool/domains.hpp"

#include <functional>

namespace cool {

std::string DomainSet::key() const {
    std::string out;
    for (const auto& n : names) {
        if (!out.empty()) out += "+";
        for (char c : n) out += (c == ' ' || c == '/' || c == '\\') ? '_' : c;
    }
    return out.empty() ? "_empty" : out;
}

DomainSet DomainSet::from_key(const std::string& key) {
    DomainSet d;
    if (key == "_empty") return d;
    std::string cur;
    for (char c : key) {
        if (c == '+') {
            if (!cur.empty()) d.add(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) d.add(cur);
    return d;
}

std::map<std::string, DomainSet> resolve_domains(const Program& prog) {
    std::map<std::string, const ClassDecl*> classes;
    for (const auto& c : prog.classes) classes[c.name] = &c;

    DomainSet loads;
    for (const auto& l : prog.loads) loads.add(l);

    std::map<std::string, DomainSet> result;
    DomainSet top = loads;
    top.add(prog.source_name);
    result[""] = top;

    // Transitive closure over inheritance, with cycle detection.
    std::map<std::string, int> state; // 0 unvisited, 1 in progress, 2 done
    std::map<std::string, DomainSet> closure;

    std::function<const DomainSet&(const ClassDecl&)> visit =
        [&](const ClassDecl& cls) -> const DomainSet& {
        int& st = state[cls.name];
        if (st == 1) throw CoolError("inheritance cycle through class '" + cls.name + "'", cls.loc);
        if (st == 2) return closure[cls.name];
        st = 1;
        DomainSet d = loads;
        d.add(cls.name);
        for (const auto& parent : cls.parents) {
            auto it = classes.find(parent);
            if (it != classes.end()) {
                d = d.unite(visit(*it->second));
            } else if (loads.contains(parent)) {
                d.add(parent);
            } else {
                throw CoolError("unknown parent '" + parent + "' of class '" + cls.name +
                                    "': not a declared class or loaded domain",
                                cls.loc);
            }
        }
        st = 2;
        closure[cls.name] = std::move(d);
        return closure[cls.name];
    };

    for (const auto& c : prog.classes) result[c.name] = visit(c);
    return result;
}

} // namespace cool
