#ifndef FEDGP_CONFIG_HPP
#define FEDGP_CONFIG_HPP

#include <fedgp/federation.hpp>

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fedgp {

using json = nlohmann::json;

struct DatasetSourceConfig {
    std::vector<std::string> train_csvs;
    double test_split = 0.5;
    bool standardize = true;
};

struct MetricsConfig {
    int cadence = 1;
    bool param_error = false;
    bool rmse = false;
    bool global_grad = false;
    bool nll = false;
    bool latent_truth = true;
};

struct RangeConfig {
    double lo = 0.0;
    double hi = 1.0;
};

/// Box ranges as written in config files; the length-scale range applies to
/// every length-scale component once the dimension is known.
struct BoxConfig {
    RangeConfig theta1{0.1, 10.0};
    RangeConfig theta2{0.01, 1.0};
    RangeConfig lengthscales{0.01, 1.0};

    ParamBox realize(Eigen::Index n_ell) const {
        ParamBox box;
        box.lower = GPParams{theta1.lo, theta2.lo, Vector::Constant(n_ell, lengthscales.lo)};
        box.upper = GPParams{theta1.hi, theta2.hi, Vector::Constant(n_ell, lengthscales.hi)};
        box.validate();
        return box;
    }
};

struct FederationFileConfig {
    int rounds = 200;
    int local_steps = 5;
    bool asynchronous = false;
    int k_sample = 1;
    ScheduleSpec lr_schedule{ScheduleSpec::Kind::InverseTime, 0.05};
    GradScaling scaling{1.0, true};
    BoxConfig box;
    std::optional<double> clip_norm;
    bool freeze_lengthscales = false;
    int batch_size = 64;
};

/// Fixed shared initial parameter; the length-scale value broadcasts over
/// however many length-scale components the fitted model has.
struct InitConfig {
    double theta1 = 1.0;
    double theta2 = 1.0;
    double lengthscale = 1.0;
};

struct ScenarioParams {
    int clients = 2;
    long total_points = 500;
    std::optional<int> dim;        // empty: drawn per repeat
    bool noise_is_std = false;
    bool shared_draw = false;
    long size_min = 10;            // gp-imbalanced log-uniform range
    long size_max = 10000;
    long client_points = 200;      // gp-heterogeneous per-client size
    long hf = 0, mf = 0, lf = 0;   // multi-fidelity sample sizes
    long test_points = 1000;
    std::optional<InitConfig> init;  // empty: uniform draw over the box
};

struct ExperimentConfig {
    std::string scenario;  // empty in dataset mode
    std::optional<DatasetSourceConfig> dataset;
    KernelSpec kernel;
    FederationFileConfig federation;
    ScenarioParams scenario_params;
    MetricsConfig metrics;
    int repeats = 1;
    std::uint64_t seed = 1234;
    std::string out_dir = "out";

    json to_json() const;
    bool operator==(const ExperimentConfig& other) const {
        return to_json() == other.to_json();
    }
};

inline const std::vector<std::string>& scenario_keys() {
    static const std::vector<std::string> keys = {
        "currin", "park", "branin", "hartmann3", "borehole", "linear", "nonlinear",
        "sin-mirror", "bad-init", "gp-homogeneous", "gp-imbalanced", "gp-heterogeneous"};
    return keys;
}

inline bool is_fidelity_scenario(const std::string& key) {
    static const std::set<std::string> mf = {"currin", "park", "branin", "hartmann3",
                                             "borehole", "linear", "nonlinear"};
    return mf.count(key) > 0;
}

namespace detail {

inline int levenshtein(const std::string& a, const std::string& b) {
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

inline std::string normalized(const std::string& s) {
    std::string out;
    for (char c : s)
        if (c != '_' && c != '-') out.push_back(static_cast<char>(std::tolower(c)));
    return out;
}

inline std::string suggest_key(const std::string& unknown, const std::set<std::string>& known) {
    static const std::map<std::string, std::string> synonyms = {
        {"learningrate", "lr_schedule"}, {"learning_rate", "lr_schedule"},
        {"lr", "lr_schedule"},           {"eta", "lr_schedule"},
        {"epochs", "rounds"},            {"iterations", "rounds"},
        {"minibatch", "batch_size"},     {"batch", "batch_size"}};
    if (auto it = synonyms.find(normalized(unknown));
        it != synonyms.end() && known.count(it->second))
        return it->second;
    std::string best;
    int best_dist = 1 << 20;
    for (const auto& k : known) {
        const int d = levenshtein(normalized(unknown), normalized(k));
        if (d < best_dist) {
            best_dist = d;
            best = k;
        }
    }
    return best;
}

inline void check_keys(const json& obj, const std::set<std::string>& allowed,
                       const std::string& where) {
    if (!obj.is_object())
        throw ConfigError("config section '" + where + "' must be an object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            const std::string hint = suggest_key(key, allowed);
            throw ConfigError("unknown key '" + key + "' in " + where
                              + (hint.empty() ? "" : "; did you mean '" + hint + "'?"));
        }
    }
}

inline double require_positive(const json& v, const std::string& name) {
    if (!v.is_number())
        throw ConfigError(name + " must be a number");
    const double x = v.get<double>();
    if (!(x > 0.0))
        throw ConfigError(name + " must be > 0");
    return x;
}

inline long require_int_at_least(const json& v, long min, const std::string& name) {
    if (!v.is_number_integer())
        throw ConfigError(name + " must be an integer");
    const long x = v.get<long>();
    if (x < min)
        throw ConfigError(name + " must be >= " + std::to_string(min));
    return x;
}

/// Required-field access; merge_patch drops keys a user sets to null, so any
/// missing field must surface as a config error, not UB.
inline const json& req(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end())
        throw ConfigError(std::string("missing required config key '") + key + "'");
    return *it;
}

inline RangeConfig parse_range(const json& v, const std::string& name) {
    if (!v.is_array() || v.size() != 2)
        throw ConfigError(name + " must be a [lower, upper] pair");
    RangeConfig r{require_positive(v[0], name + "[0]"), require_positive(v[1], name + "[1]")};
    if (!(r.lo < r.hi))
        throw ConfigError(name + " needs lower < upper");
    return r;
}

/// Defaults shared by all scenarios; scenario recipes and then the user file
/// override these (spelled out in README).
inline json default_config_json() {
    return json{
        {"kernel", {{"family", "rbf"}, {"lengthscales", "isotropic"}}},
        {"federation",
         {{"rounds", 200},
          {"local_steps", 5},
          {"participation", "synchronous"},
          {"lr_schedule", {{"kind", "inverse_time"}, {"value", 0.05}}},
          {"scaling", {{"enabled", true}, {"tau", 1.0}}},
          {"box",
           {{"theta1", {0.1, 10.0}}, {"theta2", {0.01, 1.0}}, {"lengthscales", {0.01, 1.0}}}},
          {"clip_norm", nullptr},
          {"freeze_lengthscales", false},
          {"batch_size", 64}}},
        {"scenario_params",
         {{"clients", 2},       {"total_points", 500}, {"dim", nullptr},
          {"noise_is_std", false}, {"shared_draw", false}, {"size_min", 10},
          {"size_max", 10000},  {"client_points", 200}, {"hf", 0},
          {"mf", 0},            {"lf", 0},             {"test_points", 1000},
          {"init", nullptr}}},
        {"metrics",
         {{"cadence", 1},
          {"param_error", false},
          {"rmse", false},
          {"global_grad", false},
          {"nll", false},
          {"latent_truth", true}}},
        {"repeats", 1},
        {"seed", 1234},
        {"out_dir", "out"}};
}

/// Per-scenario recipe overrides (experiment defaults; user config wins).
inline json scenario_recipe(const std::string& key) {
    json r = json::object();
    auto mf_common = [&](long hf, long mf, long lf) {
        r["kernel"] = {{"family", "rbf"}, {"lengthscales", "ard"}};
        r["federation"] = {
            {"rounds", 300},
            {"batch_size", 256},
            {"lr_schedule", {{"kind", "inverse_time"}, {"value", 0.5}}},
            {"clip_norm", 20.0},
            {"box", {{"theta1", {0.05, 5.0}}, {"theta2", {0.001, 2.0}},
                     {"lengthscales", {0.01, 5.0}}}}};
        r["scenario_params"] = {{"hf", hf}, {"mf", mf}, {"lf", lf}, {"test_points", 1000}};
        r["metrics"] = {{"rmse", true}};
        r["repeats"] = 10;
    };

    if (key == "gp-homogeneous" || key == "gp-imbalanced" || key == "gp-heterogeneous") {
        r["kernel"] = {{"family", "rbf"}, {"lengthscales", "ard"}};
        r["federation"] = {
            {"rounds", 300},
            {"local_steps", 10},
            {"lr_schedule", {{"kind", "constant"}, {"value", 0.05}}},
            {"clip_norm", 0.5}};
        r["metrics"] = {{"param_error", true}};
        r["repeats"] = 10;
        // convergence runs start from a far corner of the box so the traced
        // error has room to decay over the whole run
        const json far_init = {{"theta1", 0.1}, {"theta2", 1.0}, {"lengthscale", 0.5}};
        if (key == "gp-homogeneous")
            r["scenario_params"] = {{"clients", 20}, {"total_points", 5000}, {"init", far_init}};
        if (key == "gp-imbalanced")
            r["scenario_params"] = {{"clients", 20}, {"size_min", 10}, {"size_max", 10000},
                                    {"init", far_init}};
        if (key == "gp-heterogeneous") {
            // no slope is traced here, so anneal hard: the iterate freezes at
            // a stationary point of the mixed loss and the gradient collapses
            r["federation"] = {
                {"rounds", 200},
                {"local_steps", 25},
                {"lr_schedule", {{"kind", "inverse_time"}, {"value", 4.0}}},
                {"clip_norm", 2.0}};
            r["scenario_params"] = {{"clients", 10}, {"client_points", 200}, {"init", far_init}};
            r["metrics"] = {{"param_error", false}, {"global_grad", true}, {"cadence", 5}};
        }
    } else if (key == "bad-init") {
        r["federation"] = {
            {"rounds", 300},
            {"lr_schedule", {{"kind", "inverse_time"}, {"value", 0.5}}},
            {"scaling", {{"enabled", false}}},
            {"clip_norm", 10.0},
            {"box", {{"theta1", {0.05, 5.0}}, {"theta2", {0.005, 12.0}},
                     {"lengthscales", {0.05, 5.0}}}}};
        r["scenario_params"] = {{"test_points", 200}};
        r["metrics"] = {{"rmse", true}};
        r["repeats"] = 10;
    } else if (key == "sin-mirror") {
        r["federation"] = {
            {"rounds", 300},
            {"lr_schedule", {{"kind", "inverse_time"}, {"value", 1.0}}},
            {"clip_norm", 10.0},
            {"box", {{"theta1", {0.05, 5.0}}, {"theta2", {0.001, 2.0}},
                     {"lengthscales", {0.05, 5.0}}}}};
        r["scenario_params"] = {{"test_points", 200}};
        r["metrics"] = {{"rmse", true}};
        r["repeats"] = 10;
    } else if (key == "currin") {
        mf_common(40, 0, 200);
    } else if (key == "park") {
        mf_common(50, 0, 300);
    } else if (key == "branin") {
        mf_common(20, 40, 200);
    } else if (key == "hartmann3") {
        mf_common(50, 100, 200);
    } else if (key == "borehole") {
        mf_common(50, 0, 200);
    } else if (key == "linear") {
        mf_common(20, 0, 100);
    } else if (key == "nonlinear") {
        mf_common(20, 0, 100);
    }
    return r;
}

inline void validate_user_keys(const json& user) {
    check_keys(user, {"scenario", "dataset", "kernel", "federation", "scenario_params",
                      "metrics", "repeats", "seed", "out_dir"},
               "the top level");
    if (user.contains("dataset"))
        check_keys(user["dataset"], {"train_csvs", "test_split", "standardize"}, "dataset");
    if (user.contains("kernel"))
        check_keys(user["kernel"], {"family", "lengthscales"}, "kernel");
    if (user.contains("federation")) {
        const json& fed = user["federation"];
        check_keys(fed,
                   {"rounds", "local_steps", "participation", "lr_schedule", "scaling", "box",
                    "clip_norm", "freeze_lengthscales", "batch_size"},
                   "federation");
        if (fed.contains("lr_schedule"))
            check_keys(fed["lr_schedule"], {"kind", "value"}, "federation.lr_schedule");
        if (fed.contains("scaling"))
            check_keys(fed["scaling"], {"enabled", "tau"}, "federation.scaling");
        if (fed.contains("box"))
            check_keys(fed["box"], {"theta1", "theta2", "lengthscales"}, "federation.box");
        if (fed.contains("participation") && fed["participation"].is_object()) {
            check_keys(fed["participation"], {"asynchronous"}, "federation.participation");
            if (fed["participation"].contains("asynchronous"))
                check_keys(fed["participation"]["asynchronous"], {"k_sample"},
                           "federation.participation.asynchronous");
        }
    }
    if (user.contains("scenario_params"))
        check_keys(user["scenario_params"],
                   {"clients", "total_points", "dim", "noise_is_std", "shared_draw", "size_min",
                    "size_max", "client_points", "hf", "mf", "lf", "test_points", "init"},
                   "scenario_params");
    if (user.contains("scenario_params") && user["scenario_params"].contains("init")
        && user["scenario_params"]["init"].is_object())
        check_keys(user["scenario_params"]["init"], {"theta1", "theta2", "lengthscale"},
                   "scenario_params.init");
    if (user.contains("metrics"))
        check_keys(user["metrics"],
                   {"cadence", "param_error", "rmse", "global_grad", "nll", "latent_truth"},
                   "metrics");
}

inline int expected_client_count(const ExperimentConfig& cfg) {
    if (cfg.dataset) return static_cast<int>(cfg.dataset->train_csvs.size());
    if (cfg.scenario == "sin-mirror" || cfg.scenario == "bad-init") return 2;
    if (is_fidelity_scenario(cfg.scenario))
        return (cfg.scenario == "branin" || cfg.scenario == "hartmann3") ? 3 : 2;
    return cfg.scenario_params.clients;
}

}  // namespace detail

/// Builds a fully resolved config from a user JSON document: user keys are
/// validated fail-closed, then merged over the scenario recipe and the global
/// defaults.
inline ExperimentConfig config_from_json(const json& user) {
    detail::validate_user_keys(user);

    const bool has_scenario = user.contains("scenario");
    const bool has_dataset = user.contains("dataset");
    if (has_scenario == has_dataset)
        throw ConfigError("exactly one of 'scenario' or 'dataset' is required");

    std::string scenario;
    if (has_scenario) {
        if (!user["scenario"].is_string())
            throw ConfigError("scenario must be a string");
        scenario = user["scenario"].get<std::string>();
        const auto& keys = scenario_keys();
        if (std::find(keys.begin(), keys.end(), scenario) == keys.end())
            throw ConfigError("unknown scenario '" + scenario + "'; see `fedgp list-scenarios`");
    }

    json resolved = detail::default_config_json();
    if (has_scenario) resolved.merge_patch(detail::scenario_recipe(scenario));
    resolved.merge_patch(user);

    ExperimentConfig cfg;
    cfg.scenario = scenario;

    if (has_dataset) {
        const json& ds = detail::req(resolved, "dataset");
        DatasetSourceConfig src;
        if (!ds.contains("train_csvs") || !ds["train_csvs"].is_array()
            || ds["train_csvs"].empty())
            throw ConfigError("dataset.train_csvs must be a non-empty array of paths");
        for (const auto& p : ds["train_csvs"]) {
            if (!p.is_string())
                throw ConfigError("dataset.train_csvs entries must be strings");
            src.train_csvs.push_back(p.get<std::string>());
            if (!std::filesystem::exists(src.train_csvs.back()))
                throw ConfigError("dataset file does not exist: " + src.train_csvs.back());
        }
        if (ds.contains("test_split") && !ds["test_split"].is_null()) {
            src.test_split = ds["test_split"].get<double>();
            if (!(src.test_split > 0.0 && src.test_split < 1.0))
                throw ConfigError("dataset.test_split must lie in (0, 1)");
        }
        if (ds.contains("standardize") && !ds["standardize"].is_null())
            src.standardize = ds["standardize"].get<bool>();
        cfg.dataset = std::move(src);
    }

    {
        const json& k = detail::req(resolved, "kernel");
        const std::string family = detail::req(k, "family").get<std::string>();
        if (family == "rbf") cfg.kernel.family = KernelFamily::RBF;
        else if (family == "matern12") cfg.kernel.family = KernelFamily::Matern12;
        else if (family == "matern32") cfg.kernel.family = KernelFamily::Matern32;
        else if (family == "matern52") cfg.kernel.family = KernelFamily::Matern52;
        else throw ConfigError("kernel.family must be rbf|matern12|matern32|matern52");
        const std::string mode = detail::req(k, "lengthscales").get<std::string>();
        if (mode == "isotropic") cfg.kernel.lengthscale_mode = LengthscaleMode::Isotropic;
        else if (mode == "ard") cfg.kernel.lengthscale_mode = LengthscaleMode::ARD;
        else throw ConfigError("kernel.lengthscales must be isotropic|ard");
    }

    {
        const json& f = detail::req(resolved, "federation");
        cfg.federation.rounds =
            static_cast<int>(detail::require_int_at_least(detail::req(f, "rounds"), 1, "federation.rounds"));
        cfg.federation.local_steps = static_cast<int>(
            detail::require_int_at_least(detail::req(f, "local_steps"), 1, "federation.local_steps"));
        cfg.federation.batch_size = static_cast<int>(
            detail::require_int_at_least(detail::req(f, "batch_size"), 1, "federation.batch_size"));

        const json& part = detail::req(f, "participation");
        if (part.is_string()) {
            if (part.get<std::string>() != "synchronous")
                throw ConfigError("participation must be \"synchronous\" or "
                                  "{\"asynchronous\": {\"k_sample\": n}}");
            cfg.federation.asynchronous = false;
        } else if (part.is_object() && part.contains("asynchronous")) {
            cfg.federation.asynchronous = true;
            cfg.federation.k_sample = static_cast<int>(detail::require_int_at_least(
                detail::req(part["asynchronous"], "k_sample"), 1, "k_sample"));
        } else {
            throw ConfigError("participation must be \"synchronous\" or "
                              "{\"asynchronous\": {\"k_sample\": n}}");
        }

        const json& lr = detail::req(f, "lr_schedule");
        const std::string kind = detail::req(lr, "kind").get<std::string>();
        if (kind == "constant") cfg.federation.lr_schedule.kind = ScheduleSpec::Kind::Constant;
        else if (kind == "inverse_time")
            cfg.federation.lr_schedule.kind = ScheduleSpec::Kind::InverseTime;
        else throw ConfigError("lr_schedule.kind must be constant|inverse_time");
        cfg.federation.lr_schedule.value =
            detail::require_positive(detail::req(lr, "value"), "lr_schedule.value");

        const json& sc = detail::req(f, "scaling");
        cfg.federation.scaling.enabled = detail::req(sc, "enabled").get<bool>();
        cfg.federation.scaling.tau =
            detail::require_positive(detail::req(sc, "tau"), "scaling.tau");

        const json& bx = detail::req(f, "box");
        cfg.federation.box.theta1 = detail::parse_range(detail::req(bx, "theta1"), "box.theta1");
        cfg.federation.box.theta2 = detail::parse_range(detail::req(bx, "theta2"), "box.theta2");
        cfg.federation.box.lengthscales =
            detail::parse_range(detail::req(bx, "lengthscales"), "box.lengthscales");

        if (f.contains("clip_norm") && !f["clip_norm"].is_null())
            cfg.federation.clip_norm = detail::require_positive(f["clip_norm"], "clip_norm");
        cfg.federation.freeze_lengthscales = detail::req(f, "freeze_lengthscales").get<bool>();
    }

    {
        const json& s = detail::req(resolved, "scenario_params");
        cfg.scenario_params.clients =
            static_cast<int>(detail::require_int_at_least(detail::req(s, "clients"), 1, "clients"));
        cfg.scenario_params.total_points =
            detail::require_int_at_least(detail::req(s, "total_points"), 1, "total_points");
        if (s.contains("dim") && !s["dim"].is_null())
            cfg.scenario_params.dim =
                static_cast<int>(detail::require_int_at_least(s["dim"], 1, "dim"));
        cfg.scenario_params.noise_is_std = detail::req(s, "noise_is_std").get<bool>();
        cfg.scenario_params.shared_draw = detail::req(s, "shared_draw").get<bool>();
        cfg.scenario_params.size_min = detail::require_int_at_least(detail::req(s, "size_min"), 1, "size_min");
        cfg.scenario_params.size_max =
            detail::require_int_at_least(detail::req(s, "size_max"), cfg.scenario_params.size_min, "size_max");
        cfg.scenario_params.client_points =
            detail::require_int_at_least(detail::req(s, "client_points"), 1, "client_points");
        cfg.scenario_params.hf = detail::require_int_at_least(detail::req(s, "hf"), 0, "hf");
        cfg.scenario_params.mf = detail::require_int_at_least(detail::req(s, "mf"), 0, "mf");
        cfg.scenario_params.lf = detail::require_int_at_least(detail::req(s, "lf"), 0, "lf");
        cfg.scenario_params.test_points =
            detail::require_int_at_least(detail::req(s, "test_points"), 1, "test_points");
        if (s.contains("init") && !s["init"].is_null()) {
            const json& ini = s["init"];
            if (!ini.is_object())
                throw ConfigError("scenario_params.init must be an object or null");
            InitConfig ic;
            ic.theta1 = detail::require_positive(detail::req(ini, "theta1"), "init.theta1");
            ic.theta2 = detail::require_positive(detail::req(ini, "theta2"), "init.theta2");
            ic.lengthscale =
                detail::require_positive(detail::req(ini, "lengthscale"), "init.lengthscale");
            cfg.scenario_params.init = ic;
        }
    }

    {
        const json& m = detail::req(resolved, "metrics");
        cfg.metrics.cadence =
            static_cast<int>(detail::require_int_at_least(detail::req(m, "cadence"), 1, "metrics.cadence"));
        cfg.metrics.param_error = detail::req(m, "param_error").get<bool>();
        cfg.metrics.rmse = detail::req(m, "rmse").get<bool>();
        cfg.metrics.global_grad = detail::req(m, "global_grad").get<bool>();
        cfg.metrics.nll = detail::req(m, "nll").get<bool>();
        cfg.metrics.latent_truth = detail::req(m, "latent_truth").get<bool>();
    }

    cfg.repeats = static_cast<int>(detail::require_int_at_least(detail::req(resolved, "repeats"), 1, "repeats"));
    cfg.seed = detail::req(resolved, "seed").get<std::uint64_t>();
    cfg.out_dir = detail::req(resolved, "out_dir").get<std::string>();

    if (cfg.federation.asynchronous) {
        const int K = detail::expected_client_count(cfg);
        if (cfg.federation.k_sample >= K)
            throw ConfigError("asynchronous k_sample must be < the client count ("
                              + std::to_string(K) + ")");
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    json user;
    try {
        user = json::parse(in);
    } catch (const json::parse_error& err) {
        throw ConfigError(path + ": " + err.what());
    }
    return config_from_json(user);
}

inline json ExperimentConfig::to_json() const {
    json j;
    if (!scenario.empty()) j["scenario"] = scenario;
    if (dataset) {
        j["dataset"] = {{"train_csvs", dataset->train_csvs},
                        {"test_split", dataset->test_split},
                        {"standardize", dataset->standardize}};
    }
    const char* family = kernel.family == KernelFamily::RBF ? "rbf"
        : kernel.family == KernelFamily::Matern12 ? "matern12"
        : kernel.family == KernelFamily::Matern32 ? "matern32" : "matern52";
    j["kernel"] = {{"family", family},
                   {"lengthscales",
                    kernel.lengthscale_mode == LengthscaleMode::ARD ? "ard" : "isotropic"}};

    json fed = {{"rounds", federation.rounds},
                {"local_steps", federation.local_steps},
                {"lr_schedule",
                 {{"kind", federation.lr_schedule.kind == ScheduleSpec::Kind::Constant
                               ? "constant" : "inverse_time"},
                  {"value", federation.lr_schedule.value}}},
                {"scaling", {{"enabled", federation.scaling.enabled},
                             {"tau", federation.scaling.tau}}},
                {"box", {{"theta1", {federation.box.theta1.lo, federation.box.theta1.hi}},
                         {"theta2", {federation.box.theta2.lo, federation.box.theta2.hi}},
                         {"lengthscales", {federation.box.lengthscales.lo,
                                           federation.box.lengthscales.hi}}}},
                {"freeze_lengthscales", federation.freeze_lengthscales},
                {"batch_size", federation.batch_size}};
    if (federation.asynchronous)
        fed["participation"] = {{"asynchronous", {{"k_sample", federation.k_sample}}}};
    else
        fed["participation"] = "synchronous";
    if (federation.clip_norm) fed["clip_norm"] = *federation.clip_norm;
    else fed["clip_norm"] = nullptr;
    j["federation"] = std::move(fed);

    j["scenario_params"] = {{"clients", scenario_params.clients},
                            {"total_points", scenario_params.total_points},
                            {"dim", scenario_params.dim ? json(*scenario_params.dim) : json()},
                            {"noise_is_std", scenario_params.noise_is_std},
                            {"shared_draw", scenario_params.shared_draw},
                            {"size_min", scenario_params.size_min},
                            {"size_max", scenario_params.size_max},
                            {"client_points", scenario_params.client_points},
                            {"hf", scenario_params.hf},
                            {"mf", scenario_params.mf},
                            {"lf", scenario_params.lf},
                            {"test_points", scenario_params.test_points},
                            {"init", scenario_params.init
                                 ? json{{"theta1", scenario_params.init->theta1},
                                        {"theta2", scenario_params.init->theta2},
                                        {"lengthscale", scenario_params.init->lengthscale}}
                                 : json()}};
    j["metrics"] = {{"cadence", metrics.cadence},
                    {"param_error", metrics.param_error},
                    {"rmse", metrics.rmse},
                    {"global_grad", metrics.global_grad},
                    {"nll", metrics.nll},
                    {"latent_truth", metrics.latent_truth}};
    j["repeats"] = repeats;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    return j;
}

}  // namespace fedgp

#endif  // FEDGP_CONFIG_HPP
