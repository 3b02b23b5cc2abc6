#include "support.hpp"

#include <fedgp/federation.hpp>
#include <fedgp/synth.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <numeric>

using namespace fedgp;

namespace {

const KernelSpec kSpec{KernelFamily::RBF, LengthscaleMode::Isotropic};

ParamBox wide_box() {
    ParamBox box;
    box.lower = GPParams{0.01, 0.01, Vector::Constant(1, 0.01)};
    box.upper = GPParams{20.0, 20.0, Vector::Constant(1, 20.0)};
    return box;
}

GPParams params_at(double t1, double t2, double ell = 1.0) {
    return GPParams{t1, t2, Vector::Constant(1, ell)};
}

ClientState make_client(int id, const Dataset& data, const GPParams& init, double weight,
                        int batch) {
    ClientState c;
    c.id = id;
    c.data = data;
    c.params = init;
    c.weight = weight;
    c.batch_size = batch;
    return c;
}

FederationConfig basic_config(int rounds, int steps) {
    FederationConfig cfg;
    cfg.rounds = rounds;
    cfg.local_steps = steps;
    cfg.box = wide_box();
    cfg.lr_schedule = {ScheduleSpec::Kind::Constant, 0.05};
    cfg.seed = 7;
    return cfg;
}

}  // namespace

TEST_CASE("client_weights", "[federation]") {
    CHECK(client_weights({100, 100}) == std::vector<double>{0.5, 0.5});

    const auto hf_lf = client_weights({40, 200});
    CHECK_THAT(hf_lf[0], Catch::Matchers::WithinAbs(1.0 / 6.0, 1e-15));
    CHECK_THAT(hf_lf[1], Catch::Matchers::WithinAbs(5.0 / 6.0, 1e-15));

    const auto three = client_weights({10, 20, 30});
    CHECK_THAT(three[0], Catch::Matchers::WithinAbs(1.0 / 6.0, 1e-15));
    CHECK_THAT(three[1], Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-15));
    CHECK_THAT(three[2], Catch::Matchers::WithinAbs(0.5, 1e-15));
    CHECK_THAT(std::accumulate(three.begin(), three.end(), 0.0),
               Catch::Matchers::WithinAbs(1.0, 1e-12));

    CHECK_THROWS_AS(client_weights({}), InputError);
    CHECK_THROWS_AS(client_weights({5, 0}), InputError);
}

TEST_CASE("local_update steps", "[federation]") {
    std::mt19937_64 rng(41);
    const Dataset data = testsupport::random_dataset(rng, 8, 1);

    // E = 0 leaves parameters untouched
    ClientState c = make_client(0, data, params_at(1.2, 0.8), 1.0, 4);
    c.rng = rng::stream(1, {rng::kLocal});
    const GPParams before = c.params;
    local_update(kSpec, c, 0, {ScheduleSpec::Kind::Constant, 0.1}, {}, wide_box(),
                 std::nullopt, false);
    CHECK(c.params.to_vector() == before.to_vector());

    // eta = 0 leaves parameters untouched over any number of steps
    local_update(kSpec, c, 5, {ScheduleSpec::Kind::Constant, 0.0}, {}, wide_box(),
                 std::nullopt, false);
    CHECK(c.params.to_vector() == before.to_vector());

    // single full-batch step on the N=1 oracle dataset: grad = (0.25, 0.25, g_l)
    Dataset single;
    single.inputs = Matrix::Zero(1, 1);
    single.outputs = Vector::Ones(1);
    ClientState s = make_client(0, single, params_at(1.0, 1.0), 1.0, 1);
    s.rng = rng::stream(1, {rng::kLocal});
    local_update(kSpec, s, 1, {ScheduleSpec::Kind::Constant, 0.1}, {}, wide_box(),
                 std::nullopt, false);
    CHECK_THAT(s.params.theta1, Catch::Matchers::WithinAbs(0.975, 1e-12));
    CHECK_THAT(s.params.theta2, Catch::Matchers::WithinAbs(0.975, 1e-12));
}

TEST_CASE("local_update honors clip, freeze, box and the step counter", "[federation]") {
    std::mt19937_64 rng(42);
    const Dataset data = testsupport::random_dataset(rng, 12, 1);

    // freeze: length-scales never move
    ClientState c = make_client(0, data, params_at(1.0, 1.0, 0.7), 1.0, 6);
    c.rng = rng::stream(2, {rng::kLocal});
    local_update(kSpec, c, 10, {ScheduleSpec::Kind::Constant, 0.05}, {}, wide_box(),
                 std::nullopt, true);
    CHECK(c.params.lengthscales(0) == 0.7);

    // clip: the applied step never exceeds eta * G
    ClientState d2 = make_client(0, data, params_at(5.0, 0.05), 1.0, 6);
    d2.rng = rng::stream(3, {rng::kLocal});
    GPParams prev = d2.params;
    const double G = 0.5, eta = 0.01;
    for (int step = 0; step < 5; ++step) {
        local_update(kSpec, d2, 1, {ScheduleSpec::Kind::Constant, eta}, {}, wide_box(),
                     G, false);
        // projection can only shrink the step, never grow it
        CHECK((d2.params.to_vector() - prev.to_vector()).norm() <= eta * G + 1e-15);
        prev = d2.params;
    }

    // box: iterates are always projected back in
    ParamBox tight;
    tight.lower = GPParams{0.9, 0.9, Vector::Constant(1, 0.9)};
    tight.upper = GPParams{1.1, 1.1, Vector::Constant(1, 1.1)};
    ClientState e = make_client(0, data, params_at(1.0, 1.0), 1.0, 6);
    e.rng = rng::stream(4, {rng::kLocal});
    local_update(kSpec, e, 20, {ScheduleSpec::Kind::Constant, 0.5}, {}, tight,
                 std::nullopt, false);
    CHECK(tight.contains(e.params));

    // InverseTime schedule decays over the global counter: starting at t0 the
    // first step uses beta1 / (1 + t0)
    ScheduleSpec sched{ScheduleSpec::Kind::InverseTime, 1.0};
    CHECK(sched.rate(0) == 1.0);
    CHECK(sched.rate(9) == 0.1);
    ClientState f1 = make_client(0, data, params_at(1.0, 1.0), 1.0, 12);
    ClientState f2 = make_client(0, data, params_at(1.0, 1.0), 1.0, 12);
    f1.rng = rng::stream(5, {rng::kLocal});
    f2.rng = rng::stream(5, {rng::kLocal});
    local_update(kSpec, f1, 1, sched, {}, wide_box(), std::nullopt, false, 9);
    local_update(kSpec, f2, 1, {ScheduleSpec::Kind::Constant, 0.1}, {}, wide_box(),
                 std::nullopt, false);
    CHECK(f1.params.to_vector() == f2.params.to_vector());
}

TEST_CASE("select_clients sampling behavior", "[federation]") {
    std::mt19937_64 rng(43);

    // K = 1: always client 0
    for (int k_sample : {1, 3, 7}) {
        const auto sel = select_clients({1.0}, k_sample, rng);
        CHECK(static_cast<int>(sel.size()) == k_sample);
        for (int id : sel) CHECK(id == 0);
    }

    // overwhelming weight on client 0
    int zero_slots = 0;
    for (int trial = 0; trial < 1000; ++trial)
        for (int id : select_clients({0.999999, 1e-6}, 3, rng))
            if (id == 0) ++zero_slots;
    CHECK(zero_slots >= 2990);

    // empirical slot frequency matches p_k
    int ones = 0;
    const int draws = 60000;
    for (int i = 0; i < draws; ++i)
        if (select_clients({1.0 / 6.0, 5.0 / 6.0}, 1, rng)[0] == 1) ++ones;
    const double freq = static_cast<double>(ones) / draws;
    CHECK(freq >= 5.0 / 6.0 - 0.01);
    CHECK(freq <= 5.0 / 6.0 + 0.01);

    // determinism
    std::mt19937_64 a(5), b(5);
    CHECK(select_clients({0.3, 0.7}, 10, a) == select_clients({0.3, 0.7}, 10, b));

    CHECK_THROWS_AS(select_clients({0.5, 0.5}, 0, rng), InputError);
    CHECK_THROWS_AS(select_clients({}, 1, rng), InputError);
}

TEST_CASE("aggregation identities", "[federation]") {
    const ParamBox box = wide_box();

    // convexity fixed point
    const GPParams theta = params_at(2.0, 0.3, 0.5);
    const GPParams same = aggregate_full({theta, theta, theta}, {0.2, 0.3, 0.5}, box);
    CHECK(same.to_vector() == theta.to_vector());

    // weighted average
    const GPParams avg =
        aggregate_full({params_at(1.0, 0.1), params_at(2.0, 0.2)}, {0.25, 0.75}, box);
    CHECK_THAT(avg.theta1, Catch::Matchers::WithinAbs(1.75, 1e-15));

    const GPParams third = aggregate_full(
        {params_at(1.0, 0.1), params_at(1.0, 0.2), params_at(1.0, 0.6)},
        {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, box);
    CHECK_THAT(third.theta2, Catch::Matchers::WithinAbs(0.3, 1e-15));

    // permutation invariance
    const std::vector<GPParams> ps{params_at(1.0, 0.5), params_at(3.0, 0.2), params_at(0.5, 0.9)};
    const std::vector<double> ws{0.2, 0.5, 0.3};
    const GPParams fwd = aggregate_full(ps, ws, box);
    const GPParams perm = aggregate_full({ps[2], ps[0], ps[1]}, {ws[2], ws[0], ws[1]}, box);
    CHECK_THAT((fwd.to_vector() - perm.to_vector()).cwiseAbs().maxCoeff(),
               Catch::Matchers::WithinAbs(0.0, 1e-15));

    // sampled aggregation: plain slot mean, duplicates count per slot
    const GPParams one = aggregate_sampled({theta});
    CHECK(one.to_vector() == theta.to_vector());
    const GPParams mean3 =
        aggregate_sampled({params_at(1.0, 0.1), params_at(1.0, 0.1), params_at(4.0, 0.1)});
    CHECK_THAT(mean3.theta1, Catch::Matchers::WithinAbs(2.0, 1e-15));
    const GPParams dup = aggregate_sampled({params_at(3.0, 0.3), params_at(3.0, 0.3),
                                            params_at(6.0, 0.6)});
    CHECK_THAT(dup.theta1, Catch::Matchers::WithinAbs(4.0, 1e-15));
    CHECK_THAT(dup.theta2, Catch::Matchers::WithinAbs(0.4, 1e-15));

    CHECK_THROWS_AS(aggregate_sampled({}), InputError);
    CHECK_THROWS_AS(aggregate_full({theta}, {0.5, 0.5}, box), InputError);
}

TEST_CASE("run_federation basics", "[federation]") {
    std::mt19937_64 rng(44);
    const Dataset d0 = testsupport::random_dataset(rng, 10, 1);
    const Dataset d1 = testsupport::random_dataset(rng, 30, 1);

    // R=1, E=0: aggregate of the initial params
    {
        std::vector<ClientState> clients;
        clients.push_back(make_client(0, d0, params_at(1.0, 0.5), 0.25, 5));
        clients.push_back(make_client(1, d1, params_at(3.0, 0.7), 0.75, 5));
        auto traces = run_federation(kSpec, clients, basic_config(1, 0));
        REQUIRE(traces.size() == 1);
        CHECK_THAT(traces[0].aggregated.theta1, Catch::Matchers::WithinAbs(2.5, 1e-15));
        CHECK_THAT(traces[0].aggregated.theta2, Catch::Matchers::WithinAbs(0.65, 1e-15));
        CHECK(clients[0].params.to_vector() == traces[0].aggregated.to_vector());
        CHECK(clients[1].params.to_vector() == traces[0].aggregated.to_vector());
    }

    // identical datasets with identical rng streams: both clients produce
    // identical local params, so the weighted average equals either
    {
        ClientState a = make_client(0, d0, params_at(1.0, 0.5), 0.5, 5);
        ClientState b = make_client(1, d0, params_at(1.0, 0.5), 0.5, 5);
        for (int round = 0; round < 4; ++round) {
            a.rng = rng::stream(7, {rng::kLocal, 9, static_cast<std::uint64_t>(round)});
            b.rng = rng::stream(7, {rng::kLocal, 9, static_cast<std::uint64_t>(round)});
            const ScheduleSpec sched{ScheduleSpec::Kind::Constant, 0.05};
            local_update(kSpec, a, 3, sched, {}, wide_box(), std::nullopt, false, round * 3);
            local_update(kSpec, b, 3, sched, {}, wide_box(), std::nullopt, false, round * 3);
            CHECK(a.params.to_vector() == b.params.to_vector());
            const GPParams agg = aggregate_full({a.params, b.params}, {0.5, 0.5}, wide_box());
            CHECK(agg.to_vector() == a.params.to_vector());
            a.params = agg;
            b.params = agg;
        }
    }
}

TEST_CASE("synchronous K=1 federation is centralized SGD bitwise", "[federation]") {
    std::mt19937_64 rng(45);
    const Dataset data = testsupport::random_dataset(rng, 20, 1);
    const GPParams init = params_at(1.5, 0.6);
    FederationConfig cfg = basic_config(5, 4);
    cfg.lr_schedule = {ScheduleSpec::Kind::InverseTime, 0.3};
    cfg.seed = 99;

    std::vector<ClientState> clients;
    clients.push_back(make_client(0, data, init, 1.0, 8));
    const auto traces = run_federation(kSpec, clients, cfg);

    // centralized reference: same per-round stream derivation, no aggregation
    ClientState central = make_client(0, data, init, 1.0, 8);
    for (int round = 0; round < cfg.rounds; ++round) {
        central.rng = rng::stream(cfg.seed, {rng::kLocal, 0, static_cast<std::uint64_t>(round)});
        local_update(kSpec, central, cfg.local_steps, cfg.lr_schedule, cfg.scaling, cfg.box,
                     cfg.clip_norm, cfg.freeze_lengthscales,
                     static_cast<std::int64_t>(round) * cfg.local_steps);
    }
    CHECK(traces.back().aggregated.to_vector() == central.params.to_vector());
}

TEST_CASE("clients hold bitwise-equal params at round starts", "[federation]") {
    std::mt19937_64 rng(46);
    std::vector<ClientState> clients;
    std::vector<Eigen::Index> sizes{12, 20, 16};
    const auto weights = client_weights(sizes);
    for (int k = 0; k < 3; ++k)
        clients.push_back(make_client(k, testsupport::random_dataset(rng, sizes[static_cast<std::size_t>(k)], 1),
                                      params_at(1.0, 0.5), weights[static_cast<std::size_t>(k)], 6));

    FederationConfig cfg = basic_config(6, 2);
    std::vector<GPParams> broadcasts;
    run_federation(kSpec, clients, cfg, [&](RoundTrace& t, const std::vector<ClientState>&) {
        broadcasts.push_back(t.aggregated);
    });
    // After the run every client holds the last broadcast.
    for (const auto& c : clients)
        CHECK(c.params.to_vector() == broadcasts.back().to_vector());
}

TEST_CASE("asynchronous mode aggregates sampled slots only", "[federation]") {
    std::mt19937_64 rng(47);
    std::vector<ClientState> clients;
    std::vector<Eigen::Index> sizes{15, 15, 15, 15};
    const auto weights = client_weights(sizes);
    for (int k = 0; k < 4; ++k)
        clients.push_back(make_client(k, testsupport::random_dataset(rng, 15, 1),
                                      params_at(1.0, 0.5), weights[static_cast<std::size_t>(k)], 5));

    FederationConfig cfg = basic_config(5, 2);
    cfg.participation = Participation::Asynchronous;
    cfg.k_sample = 2;
    const auto traces = run_federation(kSpec, clients, cfg);
    for (const auto& t : traces) {
        REQUIRE(t.selected.size() == 2);
        std::vector<GPParams> slots;
        for (int id : t.selected) slots.push_back(t.client_params[static_cast<std::size_t>(id)]);
        CHECK(t.aggregated.to_vector() == aggregate_sampled(slots).to_vector());
    }

    cfg.k_sample = 4;  // must be < K
    std::vector<ClientState> fresh;
    for (int k = 0; k < 4; ++k)
        fresh.push_back(make_client(k, clients[static_cast<std::size_t>(k)].data,
                                    params_at(1.0, 0.5), weights[static_cast<std::size_t>(k)], 5));
    CHECK_THROWS_AS(run_federation(kSpec, fresh, cfg), InputError);
}

TEST_CASE("full runs are deterministic given the seed", "[federation]") {
    auto build = [](std::uint64_t data_seed) {
        std::mt19937_64 rng(data_seed);
        std::vector<ClientState> clients;
        std::vector<Eigen::Index> sizes{18, 24};
        const auto weights = client_weights(sizes);
        for (int k = 0; k < 2; ++k) {
            ClientState c;
            c.id = k;
            c.data = testsupport::random_dataset(rng, sizes[static_cast<std::size_t>(k)], 2);
            c.params = GPParams{1.0, 0.5, Vector::Constant(1, 0.5)};
            c.weight = weights[static_cast<std::size_t>(k)];
            c.batch_size = 8;
            clients.push_back(std::move(c));
        }
        return clients;
    };

    FederationConfig cfg;
    cfg.rounds = 8;
    cfg.local_steps = 3;
    cfg.box = wide_box();
    cfg.lr_schedule = {ScheduleSpec::Kind::InverseTime, 0.2};
    cfg.scaling = {1.0, true};
    cfg.participation = Participation::Asynchronous;
    cfg.k_sample = 1;
    cfg.seed = 1234;

    auto c1 = build(7);
    auto c2 = build(7);
    const auto t1 = run_federation(kSpec, c1, cfg);
    const auto t2 = run_federation(kSpec, c2, cfg);
    REQUIRE(t1.size() == t2.size());
    for (std::size_t i = 0; i < t1.size(); ++i) {
        CHECK(t1[i].selected == t2[i].selected);
        CHECK(t1[i].aggregated.to_vector() == t2[i].aggregated.to_vector());
    }
}

TEST_CASE("box invariance across a whole run", "[federation]") {
    std::mt19937_64 rng(48);
    ParamBox box;
    box.lower = GPParams{0.5, 0.3, Vector::Constant(1, 0.2)};
    box.upper = GPParams{2.0, 1.0, Vector::Constant(1, 2.0)};

    std::vector<ClientState> clients;
    const auto weights = client_weights({25, 25});
    for (int k = 0; k < 2; ++k)
        clients.push_back(make_client(k, testsupport::random_dataset(rng, 25, 1),
                                      params_at(1.0, 0.5), weights[static_cast<std::size_t>(k)], 10));

    FederationConfig cfg = basic_config(10, 4);
    cfg.box = box;
    cfg.lr_schedule = {ScheduleSpec::Kind::Constant, 0.3};
    run_federation(kSpec, clients, cfg, [&](RoundTrace& t, const std::vector<ClientState>& cs) {
        CHECK(box.contains(t.aggregated));
        for (const auto& c : cs) CHECK(box.contains(c.params));
    });
}

TEST_CASE("clipped gradients bound every applied step", "[federation]") {
    std::mt19937_64 rng(49);
    const Dataset data = testsupport::random_dataset(rng, 30, 1);
    const double G = 1.0;

    // direct check at the gradient level: stochastic_grad norms after clipping
    ClientState c = make_client(0, data, params_at(4.0, 0.05), 1.0, 10);
    c.rng = rng::stream(50, {rng::kLocal});
    for (int step = 0; step < 20; ++step) {
        const auto batch = sample_batch(30, 10, c.rng);
        Vector g = stochastic_grad(kSpec, c.params, data, batch, {});
        if (g.norm() > G) g *= G / g.norm();
        CHECK(g.norm() <= G * (1.0 + 1e-12));
    }
}
