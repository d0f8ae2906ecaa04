#ifndef COOL_COMPILER_HPP
#define COOL_COMPILER_HPP

#include <memory>
#include <optional>

#include "cool/agent.hpp"
#include "cool/config.hpp"
#include "cool/exec.hpp"
#include "cool/parser.hpp"

namespace cool {

struct CompileFlags {
    bool agent = true;   // effective only when the session has an agent
    bool pcp = true;
    bool collect = true;
    bool learn = false;  // trigger background training after compilation
};

struct Compiled {
    Program ast;
    Analysis analysis;
    IrProgram ir; // ground after compilation
    GroundReport report;
    Vocabulary vocab;
};

// Owns the neural agent (when enabled) across compilations, giving collected
// traces and trained models a consistent home.
class CompilerSession {
public:
    explicit CompilerSession(Config cfg);

    Compiled compile_source(const std::string& text, const std::string& name, CompileFlags flags);
    Compiled compile_file(const std::string& path, CompileFlags flags);

    ExecOutputs run(const Compiled& compiled, Environment* env = nullptr);

    NeuralAgent* agent() { return agent_.get(); }
    const Config& config() const { return cfg_; }

private:
    Config cfg_;
    std::unique_ptr<NeuralAgent> agent_;
};

std::string read_text_file(const std::string& path);

} // namespace cool

#endif
