#include <doctest.h>

#include <cmath>

#include "cool/model.hpp"
#include "cool/nn.hpp"

using namespace cool;

namespace {

std::vector<int> toks(std::initializer_list<int> groups) {
    // expands instruction ids into 5-token groups deterministically
    std::vector<int> out;
    for (int g : groups) {
        out.push_back(4);
        out.push_back(8 + (g % 40));
        out.push_back(8 + ((g * 7) % 40));
        out.push_back(16 + (g % 20));
        out.push_back((g * 37) % 256);
    }
    return out;
}

NetConfig tiny() {
    NetConfig cfg;
    cfg.vocab = 64;
    cfg.embed = 3;
    cfg.hidden = 4;
    return cfg;
}

} // namespace

TEST_CASE("policy head emits a valid distribution over instruction positions") {
    Rng rng(5);
    SeqNet net(tiny(), rng);
    for (int n : {1, 2, 5, 9}) {
        std::vector<int> tokens;
        for (int k = 0; k < n; ++k) {
            auto g = toks({k});
            tokens.insert(tokens.end(), g.begin(), g.end());
        }
        auto out = net.forward(tokens);
        REQUIRE(int(out.pi.size()) == n);
        double sum = 0.0;
        for (double p : out.pi) {
            CHECK(p >= 0.0);
            sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(out.indom > 0.0);
        CHECK(out.indom < 1.0);
    }
}

TEST_CASE("malformed token streams are rejected") {
    Rng rng(5);
    SeqNet net(tiny(), rng);
    CHECK_THROWS_AS(net.forward({1, 2, 3}), CoolError);
}

TEST_CASE("same seed builds identical parameters") {
    Rng a(123), b(123);
    SeqNet na(tiny(), a), nb(tiny(), b);
    CHECK(na.params() == nb.params());
}

TEST_CASE("backpropagation matches finite differences on both heads") {
    Rng rng(17);
    NetConfig cfg;
    cfg.vocab = 32;
    cfg.embed = 2;
    cfg.hidden = 3;
    SeqNet net(cfg, rng);
    auto tokens = toks({1, 5, 9});

    for (auto [root, indom] : std::vector<std::pair<int, bool>>{{1, true}, {-1, false}}) {
        std::vector<double> grad(net.param_count(), 0.0);
        double loss = net.loss_and_grad(tokens, root, indom, 0.3, grad);
        CHECK(loss > 0.0);

        // probe a spread of parameter indices with central differences
        Rng pick(33);
        double max_rel = 0.0;
        for (int probe = 0; probe < 60; ++probe) {
            size_t k = size_t(pick.below(net.param_count()));
            double eps = 1e-6;
            double saved = net.params()[k];
            std::vector<double> dummy;
            net.params()[k] = saved + eps;
            dummy.assign(net.param_count(), 0.0);
            double up = net.loss_and_grad(tokens, root, indom, 0.3, dummy);
            net.params()[k] = saved - eps;
            dummy.assign(net.param_count(), 0.0);
            double down = net.loss_and_grad(tokens, root, indom, 0.3, dummy);
            net.params()[k] = saved;

            double numeric = (up - down) / (2.0 * eps);
            double denom = std::max({1e-6, std::fabs(numeric), std::fabs(grad[k])});
            double rel = std::fabs(numeric - grad[k]) / denom;
            if (std::fabs(numeric) > 1e-10 || std::fabs(grad[k]) > 1e-10) {
                max_rel = std::max(max_rel, rel);
            }
        }
        CHECK(max_rel < 1e-4);
    }
}

TEST_CASE("training on separable data drives the mean loss down") {
    Rng rng(2);
    DomainSet d;
    d.add("T");
    Model model(d, tiny(), rng);

    Dataset g;
    for (int k = 0; k < 10; ++k) {
        g.samples.push_back(DatasetSample{toks({1, 2, 3}), 0, true});
        g.samples.push_back(DatasetSample{toks({9, 8, 7}), 2, true});
    }
    TrainParams p;
    p.epochs = 25;
    p.lr = 0.02;
    Rng train_rng(3);
    auto losses = model.train(g, p, train_rng);
    REQUIRE(losses.size() == 25);
    // non-increasing over every 5-epoch window
    for (size_t k = 5; k < losses.size(); ++k) CHECK(losses[k] <= losses[k - 5] + 1e-9);
    CHECK(losses.back() < losses.front());
}

TEST_CASE("training with negatives separates the in-domain score") {
    Rng rng(7);
    DomainSet d;
    d.add("T");
    Model model(d, tiny(), rng);
    CHECK_FALSE(model.indom_valid());

    Dataset g;
    for (int k = 0; k < 12; ++k) {
        g.samples.push_back(DatasetSample{toks({1, 2}), 0, true});
        g.samples.push_back(DatasetSample{toks({30, 31}), -1, false});
    }
    TrainParams p;
    p.epochs = 40;
    Rng train_rng(8);
    model.train(g, p, train_rng);
    CHECK(model.indom_valid());

    double in = model.infer(toks({1, 2})).indom;
    double out = model.infer(toks({30, 31})).indom;
    CHECK(in > out); // contrastive separation
    CHECK(in > 0.5);
    CHECK(out < 0.5);
}

TEST_CASE("empty datasets are a warned no-op") {
    Rng rng(9);
    DomainSet d;
    d.add("T");
    Model model(d, tiny(), rng);
    Dataset g;
    TrainParams p;
    auto losses = model.train(g, p, rng);
    CHECK(losses.empty());
}

TEST_CASE("evaluation scores both heads and skips in-domain accuracy without negatives") {
    Rng rng(10);
    DomainSet d;
    d.add("T");
    Model model(d, tiny(), rng);

    Dataset train;
    for (int k = 0; k < 15; ++k) {
        train.samples.push_back(DatasetSample{toks({1, 2}), 1, true});
        train.samples.push_back(DatasetSample{toks({20, 21}), -1, false});
    }
    TrainParams p;
    p.epochs = 40;
    model.train(train, p, rng);

    Dataset test;
    test.samples.push_back(DatasetSample{toks({1, 2}), 1, true});
    test.samples.push_back(DatasetSample{toks({20, 21}), -1, false});
    model.evaluate(test);
    CHECK(model.a_pi() == 1.0);
    CHECK(model.a_indom() == 1.0);

    // a positives-only dataset must not move the stored in-domain accuracy
    double kept = model.a_indom();
    Dataset pos_only;
    pos_only.samples.push_back(DatasetSample{toks({1, 2}), 1, true});
    model.evaluate(pos_only);
    CHECK(model.a_indom() == kept);
}

TEST_CASE("models round-trip through their binary files") {
    Rng rng(11);
    DomainSet d;
    d.add("A");
    d.add("B");
    Model model(d, tiny(), rng);
    model.set_accuracies(0.75, 0.5, true);
    auto path = std::string("/tmp/cool-model-roundtrip.bin");
    model.save(path);
    Model loaded = Model::load(path);
    CHECK(loaded.domain().key() == "A+B");
    CHECK(loaded.a_pi() == 0.75);
    CHECK(loaded.a_indom() == 0.5);
    CHECK(loaded.indom_valid());
    CHECK(loaded.net().params() == model.net().params());
}

TEST_CASE("symmetric KL matches a direct summation oracle") {
    std::vector<double> p{0.5, 0.5}, q{0.9, 0.1};
    // 0.5*(D(p||q) + D(q||p)) computed termwise
    double d_pq = 0.5 * std::log(0.5 / 0.9) + 0.5 * std::log(0.5 / 0.1);
    double d_qp = 0.9 * std::log(0.9 / 0.5) + 0.1 * std::log(0.1 / 0.5);
    double oracle = 0.5 * (d_pq + d_qp);
    CHECK(symmetric_kl(p, q) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(symmetric_kl(p, q) == doctest::Approx(0.43945).epsilon(1e-4));
    CHECK(symmetric_kl(p, p) == 0.0);
}

TEST_CASE("cosine similarity behaves on the standard cases") {
    std::vector<double> a{1, 0}, b{0, 1}, c{2, 0};
    CHECK(cosine_similarity(a, b) == 0.0);
    CHECK(cosine_similarity(a, c) == doctest::Approx(1.0));
    CHECK(cosine_similarity(a, a) == doctest::Approx(1.0));
}

TEST_CASE("accuracy is the argmax hit fraction: eight of ten scores 0.8") {
    Rng rng(21);
    DomainSet d;
    d.add("T");
    Model model(d, tiny(), rng);
    Dataset train;
    for (int k = 0; k < 20; ++k) train.samples.push_back(DatasetSample{toks({3, 1, 4}), 1, true});
    TrainParams p;
    p.epochs = 30;
    model.train(train, p, rng);

    // ten positives on the learned pattern, two labeled elsewhere on purpose
    Dataset test;
    for (int k = 0; k < 8; ++k) test.samples.push_back(DatasetSample{toks({3, 1, 4}), 1, true});
    for (int k = 0; k < 2; ++k) test.samples.push_back(DatasetSample{toks({3, 1, 4}), 0, true});
    model.evaluate(test);
    CHECK(model.a_pi() == 0.8);
}
