#include "support.hpp"

#include <fedgp/experiment.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

using namespace fedgp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("load_config applies defaults and validates", "[cli]") {
    TempDir dir("fedgp_cfg_test");
    const fs::path cfg_path = dir.path / "cfg.json";

    write_file(cfg_path, R"({"scenario": "sin-mirror"})");
    const ExperimentConfig cfg = load_config(cfg_path.string());
    CHECK(cfg.scenario == "sin-mirror");
    CHECK(cfg.federation.rounds == 300);        // recipe default
    CHECK(cfg.federation.local_steps == 5);     // global default
    CHECK(cfg.metrics.rmse);
    CHECK(cfg.repeats == 10);

    // user values win over recipe and global defaults
    write_file(cfg_path, R"({"scenario": "sin-mirror",
                             "federation": {"rounds": 7},
                             "repeats": 2})");
    const ExperimentConfig over = load_config(cfg_path.string());
    CHECK(over.federation.rounds == 7);
    CHECK(over.repeats == 2);

    // unknown keys are rejected with a suggestion
    write_file(cfg_path, R"({"scenario": "sin-mirror",
                             "federation": {"learningrate": 0.1}})");
    try {
        load_config(cfg_path.string());
        FAIL("expected ConfigError");
    } catch (const ConfigError& err) {
        const std::string msg = err.what();
        CHECK(msg.find("learningrate") != std::string::npos);
        CHECK(msg.find("lr_schedule") != std::string::npos);
    }

    // k_sample >= K is a validation error
    write_file(cfg_path, R"({"scenario": "gp-homogeneous",
                             "scenario_params": {"clients": 4},
                             "federation": {"participation": {"asynchronous": {"k_sample": 4}}}})");
    CHECK_THROWS_AS(load_config(cfg_path.string()), ConfigError);

    write_file(cfg_path, R"({"scenario": "no-such-thing"})");
    CHECK_THROWS_AS(load_config(cfg_path.string()), ConfigError);

    write_file(cfg_path, R"({"scenario": "sin-mirror", "federation": {"rounds": 0}})");
    CHECK_THROWS_AS(load_config(cfg_path.string()), ConfigError);

    write_file(cfg_path, "{ not json");
    CHECK_THROWS_AS(load_config(cfg_path.string()), ConfigError);
}

TEST_CASE("config round trip", "[cli]") {
    TempDir dir("fedgp_cfg_rt");
    const fs::path cfg_path = dir.path / "cfg.json";
    write_file(cfg_path, R"({"scenario": "currin",
                             "federation": {"participation": {"asynchronous": {"k_sample": 1}},
                                            "clip_norm": 3.5},
                             "seed": 99})");
    const ExperimentConfig cfg = load_config(cfg_path.string());

    const fs::path echo_path = dir.path / "echo.json";
    write_file(echo_path, cfg.to_json().dump(2));
    const ExperimentConfig reloaded = load_config(echo_path.string());
    CHECK(reloaded == cfg);
}

TEST_CASE("load_csv_dataset", "[cli]") {
    TempDir dir("fedgp_csv_test");
    const fs::path csv = dir.path / "data.csv";

    write_file(csv, "x1,y\n0.5,1.0\n");
    const Dataset one = load_csv_dataset(csv.string());
    CHECK(one.n() == 1);
    CHECK(one.dim() == 1);
    CHECK(one.inputs(0, 0) == 0.5);
    CHECK(one.outputs(0) == 1.0);

    write_file(csv, "x1,x2,y\n1,2,3\n4,5,6\n7,8,9\n");
    const Dataset three = load_csv_dataset(csv.string());
    CHECK(three.n() == 3);
    CHECK(three.dim() == 2);
    CHECK(three.inputs(2, 1) == 8.0);
    CHECK(three.outputs(2) == 9.0);

    write_file(csv, "x1,x2\n1,2\n");  // missing y column
    CHECK_THROWS_AS(load_csv_dataset(csv.string()), InputError);

    write_file(csv, "x1,y\n1,nan\n");
    CHECK_THROWS_AS(load_csv_dataset(csv.string()), InputError);

    write_file(csv, "x1,y\n1,inf\n");
    CHECK_THROWS_AS(load_csv_dataset(csv.string()), InputError);

    write_file(csv, "x1,y\n1,2,3\n");
    CHECK_THROWS_AS(load_csv_dataset(csv.string()), InputError);

    write_file(csv, "x1,y\n1,abc\n");
    CHECK_THROWS_AS(load_csv_dataset(csv.string()), InputError);

    write_file(csv, "x1,y\n");
    CHECK_THROWS_AS(load_csv_dataset(csv.string()), InputError);
}

TEST_CASE("run_experiment writes deterministic outputs", "[cli]") {
    TempDir dir("fedgp_run_test");

    json user = {
        {"scenario", "sin-mirror"},
        {"federation", {{"rounds", 5}, {"local_steps", 2}}},
        {"scenario_params", {{"test_points", 20}}},
        {"repeats", 2},
        {"seed", 42},
        {"out_dir", (dir.path / "a").string()}};
    ExperimentConfig cfg = config_from_json(user);
    run_experiment(cfg);

    CHECK(fs::exists(dir.path / "a" / "trace.csv"));
    CHECK(fs::exists(dir.path / "a" / "summary.csv"));
    CHECK(fs::exists(dir.path / "a" / "config.echo"));
    CHECK_FALSE(fs::exists(dir.path / "a" / ".failed"));

    user["out_dir"] = (dir.path / "b").string();
    run_experiment(config_from_json(user));
    CHECK(read_file(dir.path / "a" / "trace.csv") == read_file(dir.path / "b" / "trace.csv"));
    CHECK(read_file(dir.path / "a" / "summary.csv") == read_file(dir.path / "b" / "summary.csv"));

    // trace parses back with one row per (repeat, round 0..R)
    std::ifstream in(dir.path / "a" / "trace.csv");
    std::string line;
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 1 + 2 * (5 + 1));

    // config echo round-trips to the same config
    const ExperimentConfig echoed = load_config((dir.path / "a" / "config.echo").string());
    ExperimentConfig expect = cfg;
    CHECK(echoed == expect);
}

TEST_CASE("separate baseline is a K=1 federation on the HF client", "[cli]") {
    json user = {
        {"scenario", "currin"},
        {"federation", {{"rounds", 4}, {"local_steps", 2}, {"batch_size", 16}}},
        {"scenario_params", {{"hf", 10}, {"lf", 30}, {"test_points", 10}}},
        {"repeats", 1},
        {"seed", 7}};
    const ExperimentConfig cfg = config_from_json(user);

    const RepeatResult separate = run_repeat(cfg, 0, true);

    // reference: hand-built K=1 federation on the same HF data and init
    const std::uint64_t seed_r = cfg.seed;
    ScenarioBundle bundle = fedgp::detail::build_scenario(cfg, seed_r);
    const ParamBox box = cfg.federation.box.realize(bundle.ell_count);
    std::mt19937_64 init_rng = rng::stream(seed_r, {rng::kInit});
    const GPParams init = box.sample_uniform(init_rng);

    std::vector<ClientState> clients;
    ClientState c;
    c.id = 0;
    c.data = bundle.train.back();  // HF client is last (Low..High order)
    c.params = init;
    c.weight = 1.0;
    c.batch_size = std::min<int>(cfg.federation.batch_size, static_cast<int>(c.data.n()));
    clients.push_back(std::move(c));

    FederationConfig fed;
    fed.rounds = cfg.federation.rounds;
    fed.local_steps = cfg.federation.local_steps;
    fed.lr_schedule = cfg.federation.lr_schedule;
    fed.scaling = cfg.federation.scaling;
    fed.box = box;
    fed.clip_norm = cfg.federation.clip_norm;
    fed.seed = seed_r;
    const auto traces = run_federation(cfg.kernel, clients, fed);

    REQUIRE(separate.rounds.size() == traces.size());
    for (std::size_t i = 0; i < traces.size(); ++i)
        CHECK(separate.rounds[i].aggregated.to_vector() == traces[i].aggregated.to_vector());
}

TEST_CASE("failed runs leave a marker", "[cli]") {
    TempDir dir("fedgp_fail_test");
    json user = {
        {"scenario", "sin-mirror"},
        {"federation", {{"rounds", 2},
                        {"box", {{"theta2", {5.0, 6.0}}}}}},  // box excludes workable noise
        {"repeats", 1},
        {"seed", 1},
        {"out_dir", (dir.path / "out").string()}};
    // theta2 box far above the data scale is fine numerically; force a real
    // failure instead: dataset mode with a vanished file
    json bad = {{"dataset", {{"train_csvs", {"/nonexistent/never.csv"}}}},
                {"out_dir", (dir.path / "out2").string()}};
    CHECK_THROWS_AS(config_from_json(bad), ConfigError);

    // build a valid config pointing at a file that disappears before run time
    TempDir data_dir("fedgp_fail_data");
    const fs::path csv = data_dir.path / "c.csv";
    write_file(csv, "x1,y\n0.1,1.0\n0.2,2.0\n0.3,1.5\n0.4,0.5\n");
    json cfg_json = {{"dataset", {{"train_csvs", {csv.string()}}, {"test_split", 0.25}}},
                     {"federation", {{"rounds", 1}, {"local_steps", 1}}},
                     {"repeats", 1},
                     {"out_dir", (dir.path / "out3").string()}};
    ExperimentConfig cfg = config_from_json(cfg_json);
    fs::remove(csv);
    CHECK_THROWS(run_experiment(cfg));
    CHECK(fs::exists(dir.path / "out3" / ".failed"));
}

TEST_CASE("csv dataset mode trains end to end", "[cli]") {
    TempDir dir("fedgp_csv_run");
    std::mt19937_64 rng(90);
    for (int k = 0; k < 2; ++k) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::string body = "x1,y\n";
        for (int i = 0; i < 40; ++i) {
            const double x = u(rng);
            body += format_full(x) + "," + format_full(std::sin(6.0 * x) + 0.1 * u(rng)) + "\n";
        }
        write_file(dir.path / ("client" + std::to_string(k) + ".csv"), body);
    }
    json user = {
        {"dataset", {{"train_csvs", {(dir.path / "client0.csv").string(),
                                     (dir.path / "client1.csv").string()}},
                     {"test_split", 0.25}}},
        {"kernel", {{"family", "rbf"}, {"lengthscales", "isotropic"}}},
        {"federation", {{"rounds", 10}, {"local_steps", 2}, {"batch_size", 16},
                        {"box", {{"theta1", {0.05, 5.0}}, {"theta2", {0.01, 2.0}},
                                 {"lengthscales", {0.01, 5.0}}}}}},
        {"metrics", {{"rmse", true}}},
        {"repeats", 1},
        {"seed", 5},
        {"out_dir", (dir.path / "out").string()}};
    const ExperimentConfig cfg = config_from_json(user);
    run_experiment(cfg);
    CHECK(fs::exists(dir.path / "out" / "summary.csv"));

    const std::string summary = read_file(dir.path / "out" / "summary.csv");
    CHECK(summary.find("avg_rmse") != std::string::npos);
    CHECK(summary.find("mean") != std::string::npos);
}

TEST_CASE("scenario keys are served", "[cli]") {
    const auto& keys = scenario_keys();
    CHECK(keys.size() == 12);
    for (const auto& key : {"currin", "park", "branin", "hartmann3", "borehole", "linear",
                            "nonlinear", "sin-mirror", "bad-init", "gp-homogeneous",
                            "gp-imbalanced", "gp-heterogeneous"})
        CHECK(std::find(keys.begin(), keys.end(), key) != keys.end());
}
