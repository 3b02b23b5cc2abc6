#ifndef FEDGP_EXPERIMENT_HPP
#define FEDGP_EXPERIMENT_HPP

#include <fedgp/config.hpp>
#include <fedgp/csv.hpp>
#include <fedgp/federation.hpp>
#include <fedgp/metrics.hpp>
#include <fedgp/synth.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace fedgp {

/// Everything one repeat trains and evaluates on. Test outputs are stored in
/// the same (possibly standardized) scale the model sees.
struct ScenarioBundle {
    std::vector<Dataset> train;
    std::vector<std::optional<Dataset>> tests;
    std::optional<GPParams> theta_star;
    std::optional<GPParams> init_override;
    Eigen::Index ell_count = 1;
    int hf_index = -1;
};

struct RepeatResult {
    int repeat = 0;
    RoundTrace initial;  // round 0: shared initial parameter + its metrics
    std::vector<RoundTrace> rounds;
    int hf_index = -1;
    Eigen::Index ell_count = 1;
    int n_clients = 0;
};

namespace detail {

inline synth::FidelityName fidelity_from_key(const std::string& key) {
    if (key == "currin") return synth::FidelityName::Currin;
    if (key == "park") return synth::FidelityName::Park;
    if (key == "branin") return synth::FidelityName::Branin;
    if (key == "hartmann3") return synth::FidelityName::Hartmann3;
    if (key == "borehole") return synth::FidelityName::Borehole;
    if (key == "linear") return synth::FidelityName::Linear;
    if (key == "nonlinear") return synth::FidelityName::Nonlinear;
    throw ConfigError("not a multi-fidelity scenario: " + key);
}

inline std::vector<Eigen::Index> balanced_sizes(long total, int clients) {
    std::vector<Eigen::Index> sizes(static_cast<std::size_t>(clients), total / clients);
    for (long r = 0; r < total % clients; ++r) ++sizes[static_cast<std::size_t>(r)];
    for (Eigen::Index n : sizes)
        if (n < 1) throw ConfigError("total_points too small for the client count");
    return sizes;
}

inline Matrix to_unit_cube(const Matrix& X, const Vector& lo, const Vector& hi) {
    Matrix out = X;
    for (Eigen::Index j = 0; j < X.cols(); ++j)
        out.col(j) = (X.col(j).array() - lo(j)) / (hi(j) - lo(j));
    return out;
}

inline Eigen::Index fitted_ell_count(const KernelSpec& kernel, Eigen::Index d) {
    return kernel.lengthscale_mode == LengthscaleMode::ARD ? d : 1;
}

/// theta_star padded or cut to the fitted layout; only valid for the theta1 /
/// theta2 selectors, which never read the length-scale block.
inline GPParams layout_matched(const GPParams& star, Eigen::Index ell_count) {
    GPParams out = star;
    out.lengthscales = Vector::Ones(ell_count);
    return out;
}

inline ScenarioBundle build_gp_scenario(const ExperimentConfig& cfg, std::uint64_t seed_r) {
    ScenarioBundle bundle;
    const auto& sp = cfg.scenario_params;
    std::mt19937_64 world_rng = rng::stream(seed_r, {rng::kWorld});
    std::mt19937_64 data_rng = rng::stream(seed_r, {rng::kData});

    if (cfg.scenario == "gp-heterogeneous") {
        // one shared dimension, distinct true parameters per client
        const synth::GPWorld first =
            synth::draw_world(world_rng, cfg.kernel.family, sp.dim);
        const int d = first.dim;
        std::vector<synth::GPWorld> worlds{first};
        for (int k = 1; k < sp.clients; ++k)
            worlds.push_back(synth::draw_world(world_rng, cfg.kernel.family, d));
        for (const auto& w : worlds) {
            auto ds = synth::make_clients(w, {sp.client_points}, data_rng, false);
            bundle.train.push_back(std::move(ds.front()));
        }
        bundle.ell_count = fitted_ell_count(cfg.kernel, d);
    } else {
        const synth::GPWorld world = synth::draw_world(world_rng, cfg.kernel.family, sp.dim);
        std::vector<Eigen::Index> sizes;
        if (cfg.scenario == "gp-imbalanced") {
            std::uniform_real_distribution<double> lu(std::log(static_cast<double>(sp.size_min)),
                                                      std::log(static_cast<double>(sp.size_max)));
            for (int k = 0; k < sp.clients; ++k) {
                const auto n = static_cast<Eigen::Index>(std::llround(std::exp(lu(world_rng))));
                sizes.push_back(std::clamp<Eigen::Index>(n, sp.size_min, sp.size_max));
            }
        } else {
            sizes = balanced_sizes(sp.total_points, sp.clients);
        }
        bundle.train = synth::make_clients(world, sizes, data_rng, sp.shared_draw);
        bundle.theta_star = world.true_params;
        bundle.ell_count = fitted_ell_count(cfg.kernel, world.dim);
    }
    bundle.tests.assign(bundle.train.size(), std::nullopt);
    return bundle;
}

inline ScenarioBundle build_stylized_scenario(const ExperimentConfig& cfg, std::uint64_t seed_r) {
    ScenarioBundle bundle;
    std::mt19937_64 data_rng = rng::stream(seed_r, {rng::kData});
    std::mt19937_64 test_rng = rng::stream(seed_r, {rng::kTest});
    const long n_test = cfg.scenario_params.test_points;

    if (cfg.scenario == "sin-mirror") {
        bundle.train = synth::sin_mirror_clients(data_rng);
        std::uniform_real_distribution<double> u(0.0, 10.0);
        for (int k = 0; k < 2; ++k) {
            Dataset test;
            test.inputs.resize(n_test, 1);
            test.outputs.resize(n_test);
            const double sign = k == 0 ? 1.0 : -1.0;
            for (long i = 0; i < n_test; ++i) {
                const double x = u(test_rng);
                test.inputs(i, 0) = x;
                test.outputs(i) = sign * std::sin(x);
            }
            bundle.tests.emplace_back(std::move(test));
        }
    } else {  // bad-init
        auto scenario = synth::bad_init_scenario(data_rng, cfg.scenario_params.noise_is_std);
        bundle.train = std::move(scenario.clients);
        bundle.init_override = scenario.init;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::normal_distribution<double> gauss;
        for (int k = 0; k < 2; ++k) {
            Dataset test;
            test.inputs.resize(n_test, 1);
            test.outputs.resize(n_test);
            for (long i = 0; i < n_test; ++i) {
                const double x = u(test_rng);
                test.inputs(i, 0) = x;
                test.outputs(i) = std::sin(x)
                    + (cfg.metrics.latent_truth ? 0.0 : scenario.noise_sd * gauss(test_rng));
            }
            bundle.tests.emplace_back(std::move(test));
        }
    }
    bundle.ell_count = fitted_ell_count(cfg.kernel, 1);
    return bundle;
}

inline ScenarioBundle build_fidelity_scenario(const ExperimentConfig& cfg, std::uint64_t seed_r) {
    ScenarioBundle bundle;
    const auto name = fidelity_from_key(cfg.scenario);
    const auto& sp = cfg.scenario_params;
    std::mt19937_64 data_rng = rng::stream(seed_r, {rng::kData});
    std::mt19937_64 test_rng = rng::stream(seed_r, {rng::kTest});

    auto raw = synth::make_fidelity_clients(name, sp.hf, sp.mf, sp.lf, std::nullopt, data_rng);
    const auto [lo, hi] = synth::fidelity_box(name);

    // inputs mapped onto the unit cube, outputs standardized per client
    for (auto& c : raw) c.inputs = to_unit_cube(c.inputs, lo, hi);
    auto [standardized, transforms] = synth::standardize(raw);
    bundle.train = std::move(standardized);
    bundle.hf_index = static_cast<int>(bundle.train.size()) - 1;  // Low..High order

    std::vector<synth::FidelityLevel> levels{synth::FidelityLevel::Low};
    if (synth::fidelity_has_mid(name)) levels.push_back(synth::FidelityLevel::Mid);
    levels.push_back(synth::FidelityLevel::High);

    for (std::size_t k = 0; k < levels.size(); ++k) {
        Dataset test;
        test.inputs = synth::fidelity_inputs(name, sp.test_points, test_rng);
        test.outputs.resize(sp.test_points);
        for (long i = 0; i < sp.test_points; ++i)
            test.outputs(i) = transforms[k].apply(
                synth::fidelity_eval({name, levels[k]}, test.inputs.row(i).transpose()));
        test.inputs = to_unit_cube(test.inputs, lo, hi);
        bundle.tests.emplace_back(std::move(test));
    }
    bundle.ell_count = fitted_ell_count(cfg.kernel, synth::fidelity_dim(name));
    return bundle;
}

inline ScenarioBundle build_csv_scenario(const ExperimentConfig& cfg, std::uint64_t seed_r) {
    ScenarioBundle bundle;
    const auto& src = *cfg.dataset;
    std::mt19937_64 split_rng = rng::stream(seed_r, {rng::kData});

    std::vector<Dataset> trains;
    std::vector<Dataset> tests;
    for (const auto& path : src.train_csvs) {
        const Dataset full = load_csv_dataset(path);
        if (!trains.empty() && full.dim() != trains.front().dim())
            throw ConfigError("all dataset files must share one input dimension");
        const auto n = static_cast<int>(full.n());
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        for (int i = n - 1; i > 0; --i) {
            std::uniform_int_distribution<int> pick(0, i);
            std::swap(order[static_cast<std::size_t>(i)],
                      order[static_cast<std::size_t>(pick(split_rng))]);
        }
        const int n_test = std::max(1, static_cast<int>(std::floor(
            static_cast<double>(n) * src.test_split)));
        if (n_test >= n)
            throw ConfigError("test_split leaves no training data for " + path);
        std::vector<int> test_rows(order.begin(), order.begin() + n_test);
        std::vector<int> train_rows(order.begin() + n_test, order.end());
        trains.push_back(subset(full, train_rows));
        tests.push_back(subset(full, test_rows));
    }

    if (src.standardize) {
        auto [standardized, transforms] = synth::standardize(trains);
        bundle.train = std::move(standardized);
        for (std::size_t k = 0; k < tests.size(); ++k)
            tests[k].outputs = transforms[k].apply(tests[k].outputs);
    } else {
        bundle.train = std::move(trains);
    }
    for (auto& t : tests) bundle.tests.emplace_back(std::move(t));
    bundle.ell_count = fitted_ell_count(cfg.kernel, bundle.train.front().dim());
    return bundle;
}

inline ScenarioBundle build_scenario(const ExperimentConfig& cfg, std::uint64_t seed_r) {
    if (cfg.dataset) return build_csv_scenario(cfg, seed_r);
    if (cfg.scenario == "sin-mirror" || cfg.scenario == "bad-init")
        return build_stylized_scenario(cfg, seed_r);
    if (is_fidelity_scenario(cfg.scenario)) return build_fidelity_scenario(cfg, seed_r);
    return build_gp_scenario(cfg, seed_r);
}

inline MetricReport compute_metrics(const ExperimentConfig& cfg, const ScenarioBundle& bundle,
                                    const GPParams& theta_bar,
                                    const std::vector<double>& weights) {
    MetricReport report;
    if (cfg.metrics.param_error && bundle.theta_star) {
        const GPParams star = layout_matched(*bundle.theta_star, theta_bar.lengthscales.size());
        report.param_sq_error = param_sq_error(theta_bar, star, ErrorComponents::Theta1Theta2);
        report.theta2_sq_error = param_sq_error(theta_bar, star, ErrorComponents::Theta2Only);
    }
    if (cfg.metrics.global_grad)
        report.global_grad_sq_norm =
            global_grad_sq_norm(cfg.kernel, theta_bar, bundle.train, weights);
    if (cfg.metrics.nll) {
        double acc = 0.0;
        for (std::size_t k = 0; k < bundle.train.size(); ++k)
            acc += weights[k] * nll(cfg.kernel, theta_bar, bundle.train[k]);
        report.global_nll = acc;
    }
    if (cfg.metrics.rmse) {
        std::vector<double> values;
        for (std::size_t k = 0; k < bundle.train.size(); ++k) {
            if (!bundle.tests[k]) continue;
            const Prediction pred =
                predict(cfg.kernel, theta_bar, bundle.train[k], bundle.tests[k]->inputs);
            if (pred.max_variance_clamp > 1e-6 * theta_bar.theta1 * theta_bar.theta1)
                std::cerr << "warning: predictive variance clamped by "
                          << pred.max_variance_clamp << " on client " << k << "\n";
            values.push_back(rmse(pred.mean, bundle.tests[k]->outputs));
        }
        if (!values.empty()) {
            report.per_client_rmse = values;
            const double mean = std::accumulate(values.begin(), values.end(), 0.0)
                / static_cast<double>(values.size());
            double sq = 0.0;
            for (double v : values) sq += (v - mean) * (v - mean);
            report.avg_rmse = mean;
            report.std_rmse = values.size() > 1
                ? std::sqrt(sq / static_cast<double>(values.size() - 1)) : 0.0;
        }
    }
    return report;
}

}  // namespace detail

/// Runs one repeat end to end; `hf_only` reduces the federation to the
/// high-fidelity client (the Separate baseline).
inline RepeatResult run_repeat(const ExperimentConfig& cfg, int repeat, bool hf_only = false) {
    const std::uint64_t seed_r = cfg.seed + static_cast<std::uint64_t>(repeat);
    ScenarioBundle bundle = detail::build_scenario(cfg, seed_r);

    if (hf_only) {
        if (bundle.hf_index < 0)
            throw ConfigError("the separate baseline needs a multi-fidelity scenario");
        bundle.train = {bundle.train[static_cast<std::size_t>(bundle.hf_index)]};
        bundle.tests = {bundle.tests[static_cast<std::size_t>(bundle.hf_index)]};
        bundle.hf_index = 0;
    }

    const ParamBox box = cfg.federation.box.realize(bundle.ell_count);
    GPParams init;
    if (bundle.init_override) {
        init = *bundle.init_override;
    } else if (cfg.scenario_params.init) {
        init.theta1 = cfg.scenario_params.init->theta1;
        init.theta2 = cfg.scenario_params.init->theta2;
        init.lengthscales = Vector::Constant(bundle.ell_count,
                                             cfg.scenario_params.init->lengthscale);
    } else {
        std::mt19937_64 init_rng = rng::stream(seed_r, {rng::kInit});
        init = box.sample_uniform(init_rng);
    }
    if (!box.contains(init))
        throw ConfigError("scenario initial parameters fall outside the configured box");

    std::vector<Eigen::Index> sizes;
    for (const auto& d : bundle.train) sizes.push_back(d.n());
    const std::vector<double> weights = client_weights(sizes);

    std::vector<ClientState> clients;
    for (std::size_t k = 0; k < bundle.train.size(); ++k) {
        ClientState c;
        c.id = static_cast<int>(k);
        c.data = bundle.train[k];
        c.params = init;
        c.weight = weights[k];
        c.batch_size = static_cast<int>(std::min<Eigen::Index>(cfg.federation.batch_size,
                                                               bundle.train[k].n()));
        clients.push_back(std::move(c));
    }

    FederationConfig fed;
    fed.rounds = cfg.federation.rounds;
    fed.local_steps = cfg.federation.local_steps;
    fed.participation = cfg.federation.asynchronous && !hf_only
        ? Participation::Asynchronous : Participation::Synchronous;
    fed.k_sample = cfg.federation.k_sample;
    fed.lr_schedule = cfg.federation.lr_schedule;
    fed.scaling = cfg.federation.scaling;
    fed.box = box;
    fed.clip_norm = cfg.federation.clip_norm;
    fed.freeze_lengthscales = cfg.federation.freeze_lengthscales;
    fed.seed = seed_r;

    RepeatResult result;
    result.repeat = repeat;
    result.hf_index = bundle.hf_index;
    result.ell_count = bundle.ell_count;
    result.n_clients = static_cast<int>(clients.size());

    result.initial.round = 0;
    result.initial.aggregated = init;
    result.initial.metrics = detail::compute_metrics(cfg, bundle, init, weights);

    const int R = fed.rounds, cadence = cfg.metrics.cadence;
    const auto observer = [&](RoundTrace& trace, const std::vector<ClientState>&) {
        if (trace.round == 1 || trace.round == R || trace.round % cadence == 0)
            trace.metrics = detail::compute_metrics(cfg, bundle, trace.aggregated, weights);
    };
    result.rounds = run_federation(cfg.kernel, clients, fed, observer);
    return result;
}

/// Runs all repeats, in parallel up to FEDGP_THREADS (unset: machine default).
inline std::vector<RepeatResult> run_repeats(const ExperimentConfig& cfg, bool hf_only = false) {
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FEDGP_THREADS")) {
        threads = std::max(1, std::atoi(env));
    }
    threads = std::clamp(threads, 1, cfg.repeats);

    std::vector<RepeatResult> results(static_cast<std::size_t>(cfg.repeats));
    if (threads == 1) {
        for (int r = 0; r < cfg.repeats; ++r) results[static_cast<std::size_t>(r)] =
            run_repeat(cfg, r, hf_only);
        return results;
    }

    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        while (true) {
            const int r = next.fetch_add(1);
            if (r >= cfg.repeats) return;
            try {
                results[static_cast<std::size_t>(r)] = run_repeat(cfg, r, hf_only);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return results;
}

namespace detail {

struct LabeledResults {
    std::string label;
    std::vector<RepeatResult> repeats;
};

inline void write_outputs(const ExperimentConfig& cfg,
                          const std::vector<LabeledResults>& runs) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);

    Eigen::Index max_ell = 1;
    int max_clients = 1;
    for (const auto& run : runs)
        for (const auto& rep : run.repeats) {
            max_ell = std::max(max_ell, rep.ell_count);
            max_clients = std::max(max_clients, rep.n_clients);
        }

    const bool track_rmse = cfg.metrics.rmse;
    const bool track_param = cfg.metrics.param_error;
    const bool track_grad = cfg.metrics.global_grad;
    const bool track_nll = cfg.metrics.nll;
    const bool fidelity = !cfg.scenario.empty() && is_fidelity_scenario(cfg.scenario);

    std::vector<std::string> header{"label", "repeat", "round", "theta1", "theta2"};
    for (Eigen::Index j = 0; j < max_ell; ++j) header.push_back("ell_" + std::to_string(j));
    if (track_param) {
        header.push_back("param_sq_error");
        header.push_back("theta2_sq_error");
    }
    if (track_grad) header.push_back("global_grad_sq_norm");
    if (track_nll) header.push_back("global_nll");
    if (track_rmse) {
        header.push_back("avg_rmse");
        header.push_back("std_rmse");
        for (int k = 0; k < max_clients; ++k) header.push_back("rmse_c" + std::to_string(k));
    }

    auto metric_cells = [&](const RoundTrace& t, std::vector<std::string>& cells) {
        const auto put = [&](const std::optional<double>& v) {
            cells.push_back(v ? format_full(*v) : "");
        };
        if (track_param) {
            put(t.metrics.param_sq_error);
            put(t.metrics.theta2_sq_error);
        }
        if (track_grad) put(t.metrics.global_grad_sq_norm);
        if (track_nll) put(t.metrics.global_nll);
        if (track_rmse) {
            put(t.metrics.avg_rmse);
            put(t.metrics.std_rmse);
            for (int k = 0; k < max_clients; ++k) {
                if (k < static_cast<int>(t.metrics.per_client_rmse.size()))
                    cells.push_back(format_full(t.metrics.per_client_rmse[static_cast<std::size_t>(k)]));
                else
                    cells.push_back("");
            }
        }
    };

    CsvWriter trace(cfg.out_dir + "/trace.csv");
    trace.row(header);
    for (const auto& run : runs) {
        for (const auto& rep : run.repeats) {
            auto emit = [&](const RoundTrace& t) {
                std::vector<std::string> cells{run.label, std::to_string(rep.repeat),
                                               std::to_string(t.round),
                                               format_full(t.aggregated.theta1),
                                               format_full(t.aggregated.theta2)};
                for (Eigen::Index j = 0; j < max_ell; ++j)
                    cells.push_back(j < t.aggregated.lengthscales.size()
                                        ? format_full(t.aggregated.lengthscales(j)) : "");
                metric_cells(t, cells);
                trace.row(cells);
            };
            emit(rep.initial);
            for (const auto& t : rep.rounds) emit(t);
        }
    }

    // summary: final-round metrics per repeat plus mean/std across repeats
    std::vector<std::string> sheader{"label", "repeat"};
    if (track_param) {
        sheader.push_back("param_sq_error");
        sheader.push_back("theta2_sq_error");
    }
    if (track_grad) sheader.push_back("global_grad_sq_norm");
    if (track_nll) sheader.push_back("global_nll");
    if (track_rmse) {
        sheader.push_back("avg_rmse");
        sheader.push_back("std_rmse");
        if (fidelity) sheader.push_back("hf_rmse");
    }

    CsvWriter summary(cfg.out_dir + "/summary.csv");
    summary.row(sheader);
    for (const auto& run : runs) {
        std::vector<std::vector<double>> columns(sheader.size() - 2);
        auto final_values = [&](const RepeatResult& rep) {
            const MetricReport& m = rep.rounds.back().metrics;
            std::vector<std::optional<double>> vals;
            if (track_param) {
                vals.push_back(m.param_sq_error);
                vals.push_back(m.theta2_sq_error);
            }
            if (track_grad) vals.push_back(m.global_grad_sq_norm);
            if (track_nll) vals.push_back(m.global_nll);
            if (track_rmse) {
                vals.push_back(m.avg_rmse);
                vals.push_back(m.std_rmse);
                if (fidelity) {
                    std::optional<double> hf;
                    if (rep.hf_index >= 0
                        && rep.hf_index < static_cast<int>(m.per_client_rmse.size()))
                        hf = m.per_client_rmse[static_cast<std::size_t>(rep.hf_index)];
                    vals.push_back(hf);
                }
            }
            return vals;
        };

        for (const auto& rep : run.repeats) {
            const auto vals = final_values(rep);
            std::vector<std::string> cells{run.label, std::to_string(rep.repeat)};
            for (std::size_t i = 0; i < vals.size(); ++i) {
                cells.push_back(vals[i] ? format_full(*vals[i]) : "");
                if (vals[i]) columns[i].push_back(*vals[i]);
            }
            summary.row(cells);
        }

        std::vector<std::string> mean_row{run.label, "mean"}, std_row{run.label, "std"};
        for (const auto& col : columns) {
            if (col.empty()) {
                mean_row.emplace_back();
                std_row.emplace_back();
                continue;
            }
            const double mean = std::accumulate(col.begin(), col.end(), 0.0)
                / static_cast<double>(col.size());
            double sq = 0.0;
            for (double v : col) sq += (v - mean) * (v - mean);
            const double sd = col.size() > 1
                ? std::sqrt(sq / static_cast<double>(col.size() - 1)) : 0.0;
            mean_row.push_back(format_full(mean));
            std_row.push_back(format_full(sd));
        }
        summary.row(mean_row);
        summary.row(std_row);
    }

    std::ofstream echo(cfg.out_dir + "/config.echo");
    echo << cfg.to_json().dump(2) << "\n";
}

}  // namespace detail

/// `fedgp run`: trains the federation and writes trace.csv, summary.csv and
/// config.echo into cfg.out_dir. Failures leave a .failed marker behind.
inline void run_experiment(const ExperimentConfig& cfg) {
    try {
        std::vector<detail::LabeledResults> runs;
        runs.push_back({"fgpr", run_repeats(cfg, false)});
        detail::write_outputs(cfg, runs);
    } catch (const std::exception& err) {
        std::filesystem::create_directories(cfg.out_dir);
        std::ofstream marker(cfg.out_dir + "/.failed");
        marker << err.what() << "\n";
        throw;
    }
}

/// `fedgp eval --baseline separate`: FGPR plus the HF-only baseline, emitted
/// side by side in the same outputs.
inline void run_experiment_with_separate(const ExperimentConfig& cfg) {
    try {
        std::vector<detail::LabeledResults> runs;
        runs.push_back({"fgpr", run_repeats(cfg, false)});
        runs.push_back({"separate", run_repeats(cfg, true)});
        detail::write_outputs(cfg, runs);
    } catch (const std::exception& err) {
        std::filesystem::create_directories(cfg.out_dir);
        std::ofstream marker(cfg.out_dir + "/.failed");
        marker << err.what() << "\n";
        throw;
    }
}

}  // namespace fedgp

#endif  // FEDGP_EXPERIMENT_HPP
