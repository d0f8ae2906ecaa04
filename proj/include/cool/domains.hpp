#ifndef COOL_DOMAINS_HPP
#define COOL_DOMAINS_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cool/ast.hpp"

namespace cool {

// A set of knowledge-domain names (file domains from #load, class names from
// inheritance). Canonically ordered so it can serve as a persistence key.
struct DomainSet {
    std::set<std::string> names;

    bool contains(const std::string& n) const { return names.count(n) > 0; }
    bool empty() const { return names.empty(); }
    size_t size() const { return names.size(); }
    void add(const std::string& n) { names.insert(n); }

    bool subset_of(const DomainSet& other) const {
        for (const auto& n : names)
            if (!other.contains(n)) return false;
        return true;
    }

    DomainSet unite(const DomainSet& other) const {
        DomainSet r = *this;
        r.names.insert(other.names.begin(), other.names.end());
        return r;
    }

    DomainSet intersect(const DomainSet& other) const {
        DomainSet r;
        for (const auto& n : names)
            if (other.contains(n)) r.add(n);
        return r;
    }

    size_t symmetric_difference_size(const DomainSet& other) const {
        size_t d = 0;
        for (const auto& n : names) d += other.contains(n) ? 0 : 1;
        for (const auto& n : other.names) d += contains(n) ? 0 : 1;
        return d;
    }

    double jaccard(const DomainSet& other) const {
        if (names.empty() && other.names.empty()) return 1.0;
        size_t inter = intersect(other).size();
        size_t uni = size() + other.size() - inter;
        return uni == 0 ? 0.0 : double(inter) / double(uni);
    }

    // Filesystem-safe canonical key: sorted names joined by '+', spaces
    // mapped to '_'.
    std::string key() const;
    static DomainSet from_key(const std::string& key);

    bool operator==(const DomainSet& o) const { return names == o.names; }
    bool operator<(const DomainSet& o) const { return names < o.names; }
};

// Context name -> invokable domains. "" is the top level; classes appear
// under their own names. The set of a class is the transitive closure of its
// inheritance chain plus all #load domains; the top level carries the source
// file's own domain.
std::map<std::string, DomainSet> resolve_domains(const Program& prog);

} // namespace cool

#endif
