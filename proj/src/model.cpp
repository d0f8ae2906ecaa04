#include "cool/model.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace cool {

namespace {
constexpr uint8_t kFormatVersion = 1;

template <class T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}
void write_str(std::ostream& out, const std::string& s) {
    write_pod(out, uint32_t(s.size()));
    out.write(s.data(), long(s.size()));
}
std::string read_str(std::istream& in) {
    uint32_t n = read_pod<uint32_t>(in);
    std::string s(n, '\0');
    in.read(s.data(), long(n));
    return s;
}
} // namespace

Model::Model(DomainSet domain, NetConfig cfg, Rng& rng)
    : domain_(std::move(domain)), net_(cfg, rng) {}

std::vector<double> Model::train(const Dataset& g, const TrainParams& p, Rng& rng) {
    std::vector<double> epoch_losses;
    if (g.empty()) {
        std::cerr << "warning: empty training dataset for domain '" << domain_.key()
                  << "'; skipping\n";
        return epoch_losses;
    }
    if (!opt_ || opt_->lr() != p.lr) opt_ = std::make_unique<Adam>(net_.param_count(), p.lr);

    std::vector<size_t> order(g.samples.size());
    for (size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::vector<double> grad;
    bool saw_negative = false;
    for (int epoch = 0; epoch < p.epochs; ++epoch) {
        rng.shuffle(order);
        double total = 0.0;
        for (size_t k : order) {
            const auto& s = g.samples[k];
            grad.assign(net_.param_count(), 0.0);
            double loss = net_.loss_and_grad(s.tokens, s.indom ? s.root : -1, s.indom, p.epsilon,
                                             grad);
            opt_->step(net_.params(), grad);
            total += loss;
            saw_negative |= !s.indom;
        }
        epoch_losses.push_back(total / double(g.samples.size()));
    }
    if (saw_negative) indom_valid_ = true;
    return epoch_losses;
}

void Model::evaluate(const Dataset& g) {
    if (g.empty()) return;
    long pi_hits = 0, pi_total = 0, id_hits = 0, id_total = 0;
    bool has_negative = g.negatives() > 0;
    for (const auto& s : g.samples) {
        auto out = net_.forward(s.tokens);
        if (has_negative) {
            double label = s.indom ? 1.0 : 0.0;
            if (std::fabs(label - out.indom) < 0.5) ++id_hits;
            ++id_total;
        }
        if (s.indom && s.root >= 0 && !out.pi.empty()) {
            size_t argmax = 0;
            for (size_t k = 1; k < out.pi.size(); ++k)
                if (out.pi[k] > out.pi[argmax]) argmax = k;
            if (int(argmax) == s.root) ++pi_hits;
            ++pi_total;
        }
    }
    if (pi_total > 0) a_pi_ = double(pi_hits) / double(pi_total);
    if (has_negative && id_total > 0) a_indom_ = double(id_hits) / double(id_total);
}

void Model::save(const std::string& path) const {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CoolError("cannot write model file " + path);
    write_pod(out, kFormatVersion);
    write_pod(out, int32_t(net_.config().vocab));
    write_pod(out, int32_t(net_.config().embed));
    write_pod(out, int32_t(net_.config().hidden));
    write_pod(out, double(a_pi_));
    write_pod(out, double(a_indom_));
    write_pod(out, uint8_t(indom_valid_ ? 1 : 0));
    write_pod(out, uint32_t(domain_.names.size()));
    for (const auto& n : domain_.names) write_str(out, n);
    write_pod(out, uint64_t(net_.params().size()));
    out.write(reinterpret_cast<const char*>(net_.params().data()),
              long(net_.params().size() * sizeof(double)));
}

Model Model::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CoolError("cannot read model file " + path);
    uint8_t version = read_pod<uint8_t>(in);
    if (version != kFormatVersion)
        throw CoolError("unsupported model format version " + std::to_string(int(version)));
    NetConfig cfg;
    cfg.vocab = read_pod<int32_t>(in);
    cfg.embed = read_pod<int32_t>(in);
    cfg.hidden = read_pod<int32_t>(in);
    Model m;
    m.a_pi_ = read_pod<double>(in);
    m.a_indom_ = read_pod<double>(in);
    m.indom_valid_ = read_pod<uint8_t>(in) != 0;
    uint32_t names = read_pod<uint32_t>(in);
    for (uint32_t k = 0; k < names; ++k) m.domain_.add(read_str(in));
    uint64_t nparam = read_pod<uint64_t>(in);
    Rng dummy(1);
    m.net_ = SeqNet(cfg, dummy);
    if (nparam != m.net_.param_count())
        throw CoolError("model file parameter count mismatch");
    in.read(reinterpret_cast<char*>(m.net_.params().data()), long(nparam * sizeof(double)));
    if (!in) throw CoolError("truncated model file " + path);
    return m;
}

} // namespace cool
