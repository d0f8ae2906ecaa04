#include "cool/compiler.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace cool {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CoolError("file not found: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CompilerSession::CompilerSession(Config cfg) : cfg_(std::move(cfg)) {
    if (cfg_.agent || cfg_.collect) {
        agent_ = std::make_unique<NeuralAgent>(cfg_.data_dir, cfg_.model_dir,
                                               cfg_.agent_params(), cfg_.seed, cfg_.collect);
    }
}

Compiled CompilerSession::compile_source(const std::string& text, const std::string& name,
                                         CompileFlags flags) {
    Compiled c;
    c.ast = parse_program(text, name);
    c.analysis = analyze(c.ast);
    c.ir = lower(c.ast, c.analysis);
    c.vocab.size = cfg_.vocab;

    GroundOptions opts = cfg_.ground_options();
    opts.pcp_enabled = cfg_.pcp && flags.pcp;
    PolicySource* policy = (flags.agent && cfg_.agent) ? agent_.get() : nullptr;

    c.report = ground_program(c.ir, c.analysis, policy, cfg_.search_params(), opts, c.vocab);

    if (flags.collect && cfg_.collect && agent_) {
        for (const auto& batch : c.report.batches) agent_->record_batch(batch);
        if (flags.learn) agent_->train_pending();
    }
    return c;
}

Compiled CompilerSession::compile_file(const std::string& path, CompileFlags flags) {
    std::string text = read_text_file(path);
    std::string name = std::filesystem::path(path).stem().string();
    return compile_source(text, name, flags);
}

ExecOutputs CompilerSession::run(const Compiled& compiled, Environment* env) {
    Environment local;
    Environment& e = env ? *env : local;
    return execute(compiled.ir, compiled.analysis, e);
}

} // namespace cool
