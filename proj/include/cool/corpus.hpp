#ifndef COOL_CORPUS_HPP
#define COOL_CORPUS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace cool {

// Generated drill problems, one solvable program per file. Families share a
// class name so every file in a family exercises the same knowledge domain.
struct CorpusFile {
    std::string name;
    std::string source;
    double expected; // value the program prints
};

// family: linear | loglaw | quadratic | projectile | mixed
std::vector<CorpusFile> generate_corpus(const std::string& family, int count, uint64_t seed);

void write_corpus(const std::string& dir, const std::string& family, int count, uint64_t seed);

} // namespace cool

#endif
