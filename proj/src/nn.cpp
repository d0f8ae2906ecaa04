#include "cool/nn.hpp"

#include <cmath>
#include <cstring>

#include "cool/source.hpp"

namespace cool {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y += M x, M is rows x cols row-major
inline void matvec_acc(const double* M, const double* x, double* y, int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        const double* row = M + size_t(r) * size_t(cols);
        double acc = 0.0;
        for (int c = 0; c < cols; ++c) acc += row[c] * x[c];
        y[r] += acc;
    }
}

// x += M^T d
inline void matvec_t_acc(const double* M, const double* d, double* x, int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        const double* row = M + size_t(r) * size_t(cols);
        double dr = d[r];
        for (int c = 0; c < cols; ++c) x[c] += row[c] * dr;
    }
}

// M += d (outer) x
inline void outer_acc(double* M, const double* d, const double* x, int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        double* row = M + size_t(r) * size_t(cols);
        double dr = d[r];
        for (int c = 0; c < cols; ++c) row[c] += dr * x[c];
    }
}

} // namespace

SeqNet::Layout SeqNet::layout() const {
    Layout L;
    size_t vocab = size_t(cfg_.vocab), embed = size_t(cfg_.embed), hidden = size_t(cfg_.hidden);
    size_t input = embed * kTokensPerInstr;
    size_t off = 0;
    L.emb = off;
    off += vocab * embed * kTokensPerInstr; // one table per token field
    L.w_f = off;
    off += 4 * hidden * input;
    L.u_f = off;
    off += 4 * hidden * hidden;
    L.b_f = off;
    off += 4 * hidden;
    L.w_b = off;
    off += 4 * hidden * input;
    L.u_b = off;
    off += 4 * hidden * hidden;
    L.b_b = off;
    off += 4 * hidden;
    L.pi_w = off;
    off += 2 * hidden;
    L.pi_b = off;
    off += 1;
    L.id_w = off;
    off += 2 * hidden;
    L.id_b = off;
    off += 1;
    L.total = off;
    return L;
}

size_t SeqNet::param_count_for(const NetConfig& cfg) {
    SeqNet tmp;
    tmp.cfg_ = cfg;
    return tmp.layout().total;
}

SeqNet::SeqNet(NetConfig cfg, Rng& rng) : cfg_(cfg) {
    Layout L = layout();
    theta_.assign(L.total, 0.0);
    int hidden = cfg_.hidden;
    int input = cfg_.embed * kTokensPerInstr;

    auto xavier = [&](size_t off, int rows, int cols) {
        double s = std::sqrt(6.0 / double(rows + cols));
        for (size_t k = 0; k < size_t(rows) * size_t(cols); ++k)
            theta_[off + k] = rng.uniform(-s, s);
    };
    for (size_t k = 0; k < size_t(cfg_.vocab) * size_t(cfg_.embed) * kTokensPerInstr; ++k)
        theta_[L.emb + k] = rng.uniform(-0.08, 0.08);
    xavier(L.w_f, 4 * hidden, input);
    xavier(L.u_f, 4 * hidden, hidden);
    xavier(L.w_b, 4 * hidden, input);
    xavier(L.u_b, 4 * hidden, hidden);
    // forget-gate bias starts positive
    for (int k = 0; k < hidden; ++k) {
        theta_[L.b_f + size_t(hidden) + size_t(k)] = 1.0;
        theta_[L.b_b + size_t(hidden) + size_t(k)] = 1.0;
    }
    xavier(L.pi_w, 1, 2 * hidden);
    xavier(L.id_w, 1, 2 * hidden);
}

struct SeqNet::Trace {
    int n = 0;
    std::vector<std::vector<double>> x;            // per position: embedded input
    std::vector<std::vector<double>> z_f, z_g;     // gate pre-activations per dir
    std::vector<std::vector<double>> c_f, h_f, c_b, h_b;
    std::vector<double> scores, probs;             // policy head
    double id_u = 0.0, indom = 0.5;
};

void SeqNet::run_forward(const std::vector<int>& tokens, Trace& tr) const {
    if (tokens.size() % kTokensPerInstr != 0)
        throw CoolError("token stream is not a whole number of instruction groups");
    int n = int(tokens.size()) / kTokensPerInstr;
    tr.n = n;
    if (n == 0) return;

    const Layout L = layout();
    const int H = cfg_.hidden, E = cfg_.embed, In = E * kTokensPerInstr;
    const double* th = theta_.data();

    tr.x.assign(size_t(n), std::vector<double>(size_t(In), 0.0));
    for (int t = 0; t < n; ++t) {
        for (int f = 0; f < kTokensPerInstr; ++f) {
            int tok = tokens[size_t(t * kTokensPerInstr + f)];
            if (tok < 0 || tok >= cfg_.vocab) tok = 0;
            const double* e =
                th + L.emb + (size_t(f) * size_t(cfg_.vocab) + size_t(tok)) * size_t(E);
            std::memcpy(tr.x[size_t(t)].data() + size_t(f) * size_t(E), e,
                        size_t(E) * sizeof(double));
        }
    }

    auto run_dir = [&](bool fwd, std::vector<std::vector<double>>& zs,
                       std::vector<std::vector<double>>& cs, std::vector<std::vector<double>>& hs) {
        const double* W = th + (fwd ? L.w_f : L.w_b);
        const double* U = th + (fwd ? L.u_f : L.u_b);
        const double* B = th + (fwd ? L.b_f : L.b_b);
        zs.assign(size_t(n), std::vector<double>(size_t(4 * H), 0.0));
        cs.assign(size_t(n), std::vector<double>(size_t(H), 0.0));
        hs.assign(size_t(n), std::vector<double>(size_t(H), 0.0));
        std::vector<double> h_prev(size_t(H), 0.0), c_prev(size_t(H), 0.0);
        for (int step = 0; step < n; ++step) {
            int t = fwd ? step : n - 1 - step;
            auto& z = zs[size_t(t)];
            for (int k = 0; k < 4 * H; ++k) z[size_t(k)] = B[k];
            matvec_acc(W, tr.x[size_t(t)].data(), z.data(), 4 * H, In);
            matvec_acc(U, h_prev.data(), z.data(), 4 * H, H);
            auto& c = cs[size_t(t)];
            auto& h = hs[size_t(t)];
            for (int k = 0; k < H; ++k) {
                double gi = sigmoid(z[size_t(k)]);
                double gf = sigmoid(z[size_t(H + k)]);
                double gg = std::tanh(z[size_t(2 * H + k)]);
                double go = sigmoid(z[size_t(3 * H + k)]);
                c[size_t(k)] = gf * c_prev[size_t(k)] + gi * gg;
                h[size_t(k)] = go * std::tanh(c[size_t(k)]);
            }
            h_prev = h;
            c_prev = c;
        }
    };
    run_dir(true, tr.z_f, tr.c_f, tr.h_f);
    run_dir(false, tr.z_g, tr.c_b, tr.h_b);

    // policy head: score per position from [h_f[t]; h_b[t]]
    const double* pw = th + L.pi_w;
    tr.scores.assign(size_t(n), 0.0);
    for (int t = 0; t < n; ++t) {
        double s = theta_[L.pi_b];
        for (int k = 0; k < H; ++k) {
            s += pw[k] * tr.h_f[size_t(t)][size_t(k)] + pw[H + k] * tr.h_b[size_t(t)][size_t(k)];
        }
        tr.scores[size_t(t)] = s;
    }
    double mx = tr.scores[0];
    for (double s : tr.scores) mx = std::max(mx, s);
    double sum = 0.0;
    tr.probs.assign(size_t(n), 0.0);
    for (int t = 0; t < n; ++t) {
        tr.probs[size_t(t)] = std::exp(tr.scores[size_t(t)] - mx);
        sum += tr.probs[size_t(t)];
    }
    for (auto& p : tr.probs) p /= sum;

    // in-domain head from the two end states
    const double* iw = th + L.id_w;
    double u = theta_[L.id_b];
    for (int k = 0; k < H; ++k) {
        u += iw[k] * tr.h_f[size_t(n - 1)][size_t(k)] + iw[H + k] * tr.h_b[0][size_t(k)];
    }
    tr.id_u = u;
    tr.indom = sigmoid(u);
}

SeqNet::Output SeqNet::forward(const std::vector<int>& tokens) const {
    Trace tr;
    run_forward(tokens, tr);
    Output out;
    out.pi = tr.probs;
    out.indom = tr.indom;
    return out;
}

double SeqNet::loss_and_grad(const std::vector<int>& tokens, int root, bool indom_label,
                             double epsilon, std::vector<double>& grad) const {
    Trace tr;
    run_forward(tokens, tr);
    const int n = tr.n;
    if (n == 0) return 0.0;
    const Layout L = layout();
    const int H = cfg_.hidden, E = cfg_.embed, In = E * kTokensPerInstr;
    const double* th = theta_.data();
    if (grad.size() != theta_.size()) grad.assign(theta_.size(), 0.0);
    double* gr = grad.data();

    bool has_root = root >= 0;
    if (has_root && root >= n) throw CoolError("root label outside the instruction range");

    double y = indom_label ? 1.0 : 0.0;
    double p_in = std::min(std::max(tr.indom, 1e-12), 1.0 - 1e-12);
    double loss_id = -(y * std::log(p_in) + (1.0 - y) * std::log(1.0 - p_in));
    double loss_pi = 0.0;
    if (has_root) loss_pi = -std::log(std::max(tr.probs[size_t(root)], 1e-300));
    double loss = has_root ? epsilon * loss_id + (1.0 - epsilon) * loss_pi : epsilon * loss_id;

    // head gradients -> per-position dh for both directions
    std::vector<std::vector<double>> dh_f(size_t(n), std::vector<double>(size_t(H), 0.0));
    std::vector<std::vector<double>> dh_b(size_t(n), std::vector<double>(size_t(H), 0.0));

    double du = epsilon * (tr.indom - y); // dL/d(id_u)
    gr[L.id_b] += du;
    for (int k = 0; k < H; ++k) {
        gr[L.id_w + size_t(k)] += du * tr.h_f[size_t(n - 1)][size_t(k)];
        gr[L.id_w + size_t(H + k)] += du * tr.h_b[0][size_t(k)];
        dh_f[size_t(n - 1)][size_t(k)] += du * th[L.id_w + size_t(k)];
        dh_b[0][size_t(k)] += du * th[L.id_w + size_t(H + k)];
    }
    if (has_root) {
        for (int t = 0; t < n; ++t) {
            double ds = (1.0 - epsilon) * (tr.probs[size_t(t)] - (t == root ? 1.0 : 0.0));
            gr[L.pi_b] += ds;
            for (int k = 0; k < H; ++k) {
                gr[L.pi_w + size_t(k)] += ds * tr.h_f[size_t(t)][size_t(k)];
                gr[L.pi_w + size_t(H + k)] += ds * tr.h_b[size_t(t)][size_t(k)];
                dh_f[size_t(t)][size_t(k)] += ds * th[L.pi_w + size_t(k)];
                dh_b[size_t(t)][size_t(k)] += ds * th[L.pi_w + size_t(H + k)];
            }
        }
    }

    std::vector<std::vector<double>> dx(size_t(n), std::vector<double>(size_t(In), 0.0));

    auto back_dir = [&](bool fwd, const std::vector<std::vector<double>>& zs,
                        const std::vector<std::vector<double>>& cs,
                        const std::vector<std::vector<double>>& hs,
                        std::vector<std::vector<double>>& dhs) {
        const double* W = th + (fwd ? L.w_f : L.w_b);
        const double* U = th + (fwd ? L.u_f : L.u_b);
        double* gW = gr + (fwd ? L.w_f : L.w_b);
        double* gU = gr + (fwd ? L.u_f : L.u_b);
        double* gB = gr + (fwd ? L.b_f : L.b_b);

        std::vector<double> dh_next(size_t(H), 0.0), dc_next(size_t(H), 0.0);
        std::vector<double> dz(size_t(4 * H), 0.0);
        for (int step = n - 1; step >= 0; --step) {
            int t = fwd ? step : n - 1 - step;
            int t_prev = fwd ? t - 1 : t + 1; // sequence predecessor in this direction
            const auto& z = zs[size_t(t)];
            std::vector<double> dh = dhs[size_t(t)];
            for (int k = 0; k < H; ++k) dh[size_t(k)] += dh_next[size_t(k)];

            for (int k = 0; k < H; ++k) {
                double gi = sigmoid(z[size_t(k)]);
                double gf = sigmoid(z[size_t(H + k)]);
                double gg = std::tanh(z[size_t(2 * H + k)]);
                double go = sigmoid(z[size_t(3 * H + k)]);
                double c = cs[size_t(t)][size_t(k)];
                double tc = std::tanh(c);
                double c_prev = (fwd ? t > 0 : t < n - 1) ? cs[size_t(t_prev)][size_t(k)] : 0.0;

                double dgo = dh[size_t(k)] * tc;
                double dc = dc_next[size_t(k)] + dh[size_t(k)] * go * (1.0 - tc * tc);
                double dgi = dc * gg;
                double dgg = dc * gi;
                double dgf = dc * c_prev;
                dc_next[size_t(k)] = dc * gf;

                dz[size_t(k)] = dgi * gi * (1.0 - gi);
                dz[size_t(H + k)] = dgf * gf * (1.0 - gf);
                dz[size_t(2 * H + k)] = dgg * (1.0 - gg * gg);
                dz[size_t(3 * H + k)] = dgo * go * (1.0 - go);
            }
            const double* h_prev =
                (fwd ? t > 0 : t < n - 1) ? hs[size_t(t_prev)].data() : nullptr;
            outer_acc(gW, dz.data(), tr.x[size_t(t)].data(), 4 * H, In);
            if (h_prev) outer_acc(gU, dz.data(), h_prev, 4 * H, H);
            for (int k = 0; k < 4 * H; ++k) gB[k] += dz[size_t(k)];
            matvec_t_acc(W, dz.data(), dx[size_t(t)].data(), 4 * H, In);
            std::fill(dh_next.begin(), dh_next.end(), 0.0);
            if (h_prev) matvec_t_acc(U, dz.data(), dh_next.data(), 4 * H, H);
        }
    };
    back_dir(true, tr.z_f, tr.c_f, tr.h_f, dh_f);
    back_dir(false, tr.z_g, tr.c_b, tr.h_b, dh_b);

    // scatter input gradients into the embedding tables
    for (int t = 0; t < n; ++t) {
        for (int f = 0; f < kTokensPerInstr; ++f) {
            int tok = tokens[size_t(t * kTokensPerInstr + f)];
            if (tok < 0 || tok >= cfg_.vocab) tok = 0;
            double* e = gr + L.emb + (size_t(f) * size_t(cfg_.vocab) + size_t(tok)) * size_t(E);
            const double* d = dx[size_t(t)].data() + size_t(f) * size_t(E);
            for (int k = 0; k < E; ++k) e[k] += d[k];
        }
    }
    return loss;
}

void Adam::step(std::vector<double>& theta, const std::vector<double>& grad) {
    ++t_;
    double b1t = 1.0 - std::pow(beta1_, double(t_));
    double b2t = 1.0 - std::pow(beta2_, double(t_));
    for (size_t k = 0; k < theta.size(); ++k) {
        m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * grad[k];
        v_[k] = beta2_ * v_[k] + (1.0 - beta2_) * grad[k] * grad[k];
        double mhat = m_[k] / b1t;
        double vhat = v_[k] / b2t;
        theta[k] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.empty()) return 0.0;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t k = 0; k < a.size(); ++k) {
        dot += a[k] * b[k];
        na += a[k] * a[k];
        nb += b[k] * b[k];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double symmetric_kl(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size())
        throw CoolError("symmetric KL requires equal-length distributions");
    auto dkl = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (size_t k = 0; k < a.size(); ++k) {
            if (a[k] <= 0.0) continue;
            s += a[k] * std::log(a[k] / std::max(b[k], 1e-12));
        }
        return s;
    };
    return 0.5 * (dkl(p, q) + dkl(q, p));
}

} // namespace cool
