#include <doctest.h>

#include <filesystem>

#include "cool/agent.hpp"

using namespace cool;
namespace fs = std::filesystem;

namespace {

DomainSet ds(std::initializer_list<const char*> names) {
    DomainSet d;
    for (const char* n : names) d.add(n);
    return d;
}

struct AgentFixture {
    std::string data_dir, model_dir;
    AgentParams params;

    explicit AgentFixture(const std::string& tag) {
        auto base = fs::temp_directory_path() / ("cool-agent-" + tag);
        fs::remove_all(base);
        data_dir = (base / "data").string();
        model_dir = (base / "models").string();
        params.net.vocab = 64;
        params.net.embed = 3;
        params.net.hidden = 6;
        params.train.epochs = 20;
    }

    NeuralAgent make(uint64_t seed = 21) const {
        return NeuralAgent(data_dir, model_dir, params, seed);
    }

    static ModelingRecord rec(int salt, int root) {
        ModelingRecord r;
        r.state_tokens = {4, 8 + salt % 40, 9, 16 + salt % 10, 168};
        r.root = root;
        r.delta_pi = 1.0;
        return r;
    }

    static ModelingBatch batch(const DomainSet& d, int salt, int root, int n = 6) {
        ModelingBatch b;
        b.effective = d;
        for (int k = 0; k < n; ++k) b.records.push_back(rec(salt + k, root));
        return b;
    }
};

} // namespace

// ---- model pool ----------------------------------------------------------------------

TEST_CASE("pool evicts the least recently used entry") {
    ModelPool pool(2, /*grace=*/0);
    Rng rng(1);
    NetConfig cfg{64, 2, 2};
    auto mk = [&]() { return std::make_shared<Model>(ds({"X"}), cfg, rng); };
    pool.get("A", mk);
    pool.get("B", mk);
    pool.get("A", mk);
    pool.get("C", mk); // evicts B, the least recently used
    CHECK(pool.cached("A"));
    CHECK(pool.cached("C"));
    CHECK_FALSE(pool.cached("B"));
}

TEST_CASE("entries inside their grace window are not evicted") {
    ModelPool pool(2, /*grace=*/3);
    Rng rng(1);
    NetConfig cfg{64, 2, 2};
    auto mk = [&]() { return std::make_shared<Model>(ds({"X"}), cfg, rng); };
    pool.get("A", mk); // clock 1
    pool.get("B", mk); // clock 2
    pool.get("C", mk); // clock 3: C newest, inside grace; A is the oldest non-grace entry
    CHECK(pool.cached("C"));
    CHECK(pool.cached("B"));
    CHECK_FALSE(pool.cached("A"));
}

TEST_CASE("repeatedly accessed entries are never evicted") {
    ModelPool pool(2, 0);
    Rng rng(1);
    NetConfig cfg{64, 2, 2};
    auto mk = [&]() { return std::make_shared<Model>(ds({"X"}), cfg, rng); };
    pool.get("A", mk);
    for (int k = 0; k < 10; ++k) {
        pool.get("A", mk);
        pool.get("fresh" + std::to_string(k), mk);
    }
    CHECK(pool.cached("A"));
}

// ---- collaborator selection ----------------------------------------------------------

TEST_CASE("collaborator selection favors exact coverage with fewer models") {
    AgentFixture fx("collab");
    auto agent = fx.make();
    agent.record_batch(AgentFixture::batch(ds({"A"}), 0, 0));
    agent.record_batch(AgentFixture::batch(ds({"B"}), 10, 0));
    agent.record_batch(AgentFixture::batch(ds({"A", "B"}), 20, 0));
    agent.train_pending();
    REQUIRE(agent.model_domains().size() == 3);

    auto picked = agent.select_collaborators(ds({"A", "B"}));
    REQUIRE(picked.size() == 1);
    CHECK(picked[0] == ds({"A", "B"}));
}

TEST_CASE("a partially covering model is still selected when it is all there is") {
    AgentFixture fx("partial");
    auto agent = fx.make();
    agent.record_batch(AgentFixture::batch(ds({"A"}), 0, 0));
    agent.train_pending();
    auto picked = agent.select_collaborators(ds({"A", "B"}));
    REQUIRE(picked.size() == 1);
    CHECK(picked[0] == ds({"A"}));
}

TEST_CASE("an empty registry selects nothing and predicts an empty policy") {
    AgentFixture fx("empty");
    auto agent = fx.make();
    CHECK(agent.select_collaborators(ds({"A"})).empty());
    auto reply = agent.predict({4, 8, 9, 16, 168}, ds({"A"}), 1);
    CHECK(reply.pi.empty());
    CHECK(reply.ac == 0.0);
    CHECK(reply.ci == 0.0);
}

TEST_CASE("irrelevant models are not selected") {
    AgentFixture fx("irrelevant");
    auto agent = fx.make();
    agent.record_batch(AgentFixture::batch(ds({"Z"}), 0, 0));
    agent.train_pending();
    CHECK(agent.select_collaborators(ds({"A"})).empty());
}

// ---- outlier elimination and synthesis --------------------------------------------------

namespace {

PolicyContribution contrib(const DomainSet& d, std::vector<double> pi, double a_pi, double indom,
                           double a_indom) {
    PolicyContribution c;
    c.domain = d;
    c.pi = std::move(pi);
    c.a_pi = a_pi;
    c.indom = indom;
    c.a_indom = a_indom;
    return c;
}

} // namespace

TEST_CASE("single-model synthesis passes the model through") {
    std::vector<PolicyContribution> xs{contrib(ds({"A"}), {0.1, 0.9}, 0.8, 0.9, 1.0)};
    auto reply = synthesize_policy(xs);
    REQUIRE(reply.pi.size() == 2);
    CHECK(reply.pi[0] == doctest::Approx(0.1));
    CHECK(reply.pi[1] == doctest::Approx(0.9));
    CHECK(reply.ci == doctest::Approx(0.9));
    CHECK(reply.ac == doctest::Approx(0.8));
}

TEST_CASE("two identical models synthesize to the same policy") {
    auto one = contrib(ds({"A"}), {0.3, 0.7}, 0.8, 0.9, 0.95);
    std::vector<PolicyContribution> xs{one, one};
    auto reply = synthesize_policy(xs);
    CHECK(reply.pi[0] == doctest::Approx(0.3));
    CHECK(reply.pi[1] == doctest::Approx(0.7));
}

TEST_CASE("the symmetric-KL filter eliminates off-domain outliers") {
    DomainSet d = ds({"A", "B"});
    std::vector<PolicyContribution> xs{
        contrib(ds({"A"}), {0.5, 0.5}, 0.9, 0.95, 0.95),
        contrib(ds({"B"}), {0.5, 0.5}, 0.9, 0.95, 0.95),
        contrib(ds({"A", "Z"}), {0.98, 0.02}, 0.9, 0.95, 0.95), // not a subset of d
    };
    auto survivors = eliminate_outliers(xs, d, /*eta=*/1.0, /*skl_max=*/0.3);
    REQUIRE(survivors.size() == 2);
    for (const auto& s : survivors) CHECK(s.domain.subset_of(d));
}

TEST_CASE("subset-of-request contributions are exempt from the KL filter") {
    DomainSet d = ds({"A", "B"});
    std::vector<PolicyContribution> xs{
        contrib(ds({"A"}), {0.5, 0.5}, 0.9, 0.95, 0.95),
        contrib(ds({"B"}), {0.9, 0.1}, 0.9, 0.95, 0.95), // divergent but in-domain
    };
    auto survivors = eliminate_outliers(xs, d, 1.0, 0.1);
    CHECK(survivors.size() == 2);
}

TEST_CASE("elimination is idempotent on its own survivors") {
    Rng rng(99);
    DomainSet d = ds({"A", "B"});
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<PolicyContribution> xs;
        int n = rng.range(1, 6);
        for (int k = 0; k < n; ++k) {
            std::vector<double> pi(4);
            double sum = 0;
            for (auto& p : pi) {
                p = rng.uniform(0.01, 1.0);
                sum += p;
            }
            for (auto& p : pi) p /= sum;
            DomainSet dom = rng.chance(0.5) ? ds({"A"}) : ds({"A", "Z"});
            xs.push_back(contrib(dom, pi, rng.uniform(0.3, 1), rng.uniform(0.3, 1),
                                 rng.uniform(0.3, 1)));
        }
        auto once = eliminate_outliers(xs, d, 0.8, 0.4);
        auto twice = eliminate_outliers(once, d, 1.0, 0.4);
        CHECK(once.size() == twice.size());
    }
}

TEST_CASE("invalid in-domain heads substitute the Jaccard coefficient") {
    AgentFixture fx("jac");
    // a stored model that was never trained with negatives
    Rng rng(3);
    Model m(ds({"A", "B"}), fx.params.net, rng);
    m.set_accuracies(/*a_pi=*/0.8, /*a_indom=*/0.9, /*indom_valid=*/false);
    fs::create_directories(fx.model_dir);
    m.save(fx.model_dir + "/" + m.domain().key() + ".bin");

    auto agent = fx.make();
    auto model = agent.model_for(ds({"A", "B"}));
    REQUIRE(model);
    CHECK_FALSE(model->indom_valid());

    // with d = {A}: jaccard({A,B},{A}) = 1/2 replaces both InDom and A_InDom,
    // so ci = sum(indom*a_indom)/sum(a_indom) = jaccard exactly
    auto reply = agent.predict(AgentFixture::rec(0, 0).state_tokens, ds({"A"}), 1);
    CHECK(reply.ci == doctest::Approx(0.5));
    // and the effective sort key is its square
    CHECK(0.5 * 0.5 == doctest::Approx(ds({"A", "B"}).jaccard(ds({"A"})) *
                                       ds({"A", "B"}).jaccard(ds({"A"}))));
}

// ---- model expansion ----------------------------------------------------------------------

TEST_CASE("a single donor initializes the new model to its parameters") {
    AgentFixture fx("donor1");
    auto agent = fx.make();
    agent.record_batch(AgentFixture::batch(ds({"A"}), 0, 0));
    agent.train_pending();
    auto donor = agent.model_for(ds({"A"}));
    REQUIRE(donor);

    auto grown = agent.expand_model(ds({"A", "B"}));
    REQUIRE(grown);
    // pretraining follows initialization, so parameters need not stay equal;
    // verify the initialization path via a domain with no stored records
    auto grown2 = agent.expand_model(ds({"A", "C"}));
    (void)grown2;
    CHECK(agent.has_model(ds({"A", "B"})));
    CHECK(agent.has_model(ds({"A", "C"})));
}

TEST_CASE("weighted parameter averaging follows the Jaccard weights") {
    // two donors with known parameters and known weights
    Rng rng(5);
    NetConfig cfg{64, 2, 2};
    Model donor_ab(ds({"A", "B"}), cfg, rng);   // cj with {A,B,C,D}: 2/4 = 0.5
    Model donor_c(ds({"C"}), cfg, rng);         // cj: 1/4 = 0.25
    for (auto& v : donor_ab.net().params()) v = 2.0;
    for (auto& v : donor_c.net().params()) v = -1.0;

    AgentFixture fx("avg");
    fs::create_directories(fx.model_dir);
    donor_ab.save(fx.model_dir + "/" + donor_ab.domain().key() + ".bin");
    donor_c.save(fx.model_dir + "/" + donor_c.domain().key() + ".bin");

    AgentParams params = fx.params;
    params.net = cfg;
    params.zeta = -1.0; // keep both donors regardless of direction
    NeuralAgent agent(fx.data_dir, fx.model_dir, params, 21);
    auto grown = agent.expand_model(ds({"A", "B", "C", "D"}));
    REQUIRE(grown);
    double expected = (0.5 * 2.0 + 0.25 * -1.0) / 0.75;
    for (size_t k = 0; k < 8; ++k) {
        CHECK(grown->net().params()[k] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("donor sets prefer exact coverage with fewer members") {
    // registry {A,B}, {A}, {B}: for a new domain {A,B} the union {A,B} ties on
    // coverage, so the single two-domain donor wins on set size.
    Rng rng(6);
    NetConfig cfg{64, 2, 2};
    AgentFixture fx("Dsel");
    fs::create_directories(fx.model_dir);
    for (auto d : {ds({"A", "B"}), ds({"A"}), ds({"B"})}) {
        Model m(d, cfg, rng);
        double mark = d.size() == 2 ? 7.0 : 1.0;
        for (auto& v : m.net().params()) v = mark;
        m.save(fx.model_dir + "/" + d.key() + ".bin");
    }
    AgentParams params = fx.params;
    params.net = cfg;
    NeuralAgent agent(fx.data_dir, fx.model_dir, params, 21);

    // exhaustive oracle over donor subsets
    std::vector<DomainSet> registry{ds({"A", "B"}), ds({"A"}), ds({"B"})};
    DomainSet target = ds({"A", "B"});
    size_t best_sym = target.size();
    size_t best_count = 0;
    bool found = false;
    for (int mask = 1; mask < 8; ++mask) {
        DomainSet u;
        size_t count = 0;
        for (int k = 0; k < 3; ++k)
            if (mask & (1 << k)) {
                u = u.unite(registry[size_t(k)]);
                ++count;
            }
        size_t sym = target.symmetric_difference_size(u);
        if (!found || sym < best_sym || (sym == best_sym && count < best_count)) {
            best_sym = sym;
            best_count = count;
            found = true;
        }
    }
    CHECK(best_sym == 0);
    CHECK(best_count == 1); // oracle agrees: {A,B} alone

    auto grown = agent.expand_model(target);
    REQUIRE(grown);
    // initialized from the single donor marked with 7s (no pretraining data)
    CHECK(grown->net().params()[0] == doctest::Approx(7.0));
}

TEST_CASE("expansion with an empty registry falls back to fresh parameters") {
    AgentFixture fx("fresh");
    auto agent = fx.make();
    auto grown = agent.expand_model(ds({"New"}));
    REQUIRE(grown);
    CHECK(agent.has_model(ds({"New"})));
}
