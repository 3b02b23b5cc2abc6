#ifndef FEDGP_FEDERATION_HPP
#define FEDGP_FEDERATION_HPP

#include <fedgp/gp.hpp>
#include <fedgp/metrics.hpp>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace fedgp {

/// Learning-rate schedule over the global local-step counter t (t starts at 0
/// and keeps advancing across communication rounds).
struct ScheduleSpec {
    enum class Kind { Constant, InverseTime };
    Kind kind = Kind::InverseTime;
    double value = 0.05;  // eta for Constant, beta1 for InverseTime

    double rate(std::int64_t t) const {
        return kind == Kind::Constant ? value : value / (1.0 + static_cast<double>(t));
    }
};

enum class Participation { Synchronous, Asynchronous };

struct FederationConfig {
    int rounds = 1;
    int local_steps = 1;
    Participation participation = Participation::Synchronous;
    int k_sample = 1;  // only read under Asynchronous
    ScheduleSpec lr_schedule;
    GradScaling scaling;
    ParamBox box;
    std::optional<double> clip_norm;
    bool freeze_lengthscales = false;
    std::uint64_t seed = 0;
};

struct ClientState {
    int id = 0;
    Dataset data;
    GPParams params;
    double weight = 1.0;
    int batch_size = 1;
    std::mt19937_64 rng;
};

struct RoundTrace {
    int round = 0;
    GPParams aggregated;
    std::vector<GPParams> client_params;
    std::vector<int> selected;
    MetricReport metrics;
};

/// Called after each round's aggregation, before broadcast; fills
/// trace.metrics. Must not touch client rng streams.
using RoundObserver = std::function<void(RoundTrace&, const std::vector<ClientState>&)>;

/// p_k = N_k / sum_j N_j.
inline std::vector<double> client_weights(const std::vector<Eigen::Index>& sizes) {
    if (sizes.empty())
        throw InputError("client_weights needs at least one size");
    double total = 0.0;
    for (Eigen::Index n : sizes) {
        if (n < 1) throw InputError("client sizes must be >= 1");
        total += static_cast<double>(n);
    }
    std::vector<double> weights(sizes.size());
    for (std::size_t k = 0; k < sizes.size(); ++k)
        weights[k] = static_cast<double>(sizes[k]) / total;
    return weights;
}

/// E steps of projected SGD on one client (Algorithm 2). t0 is the global
/// step counter at entry, so eta follows eta(t0), eta(t0+1), ...
inline GPParams local_update(const KernelSpec& spec, ClientState& client, int steps,
                             const ScheduleSpec& schedule, const GradScaling& scaling,
                             const ParamBox& box, std::optional<double> clip_norm,
                             bool freeze_lengthscales, std::int64_t t0 = 0) {
    if (!box.contains(client.params))
        throw ParamDomainError("client " + std::to_string(client.id)
                               + " entered local_update outside the parameter box");
    for (int s = 0; s < steps; ++s) {
        const std::vector<int> batch =
            sample_batch(static_cast<int>(client.data.n()), client.batch_size, client.rng);
        Vector g;
        try {
            g = stochastic_grad(spec, client.params, client.data, batch, scaling);
        } catch (const NumericalError& err) {
            throw NumericalError("client " + std::to_string(client.id) + ": " + err.what(),
                                 err.attempted_jitters);
        }
        if (clip_norm) {
            const double norm = g.norm();
            if (norm > *clip_norm && norm > 0.0) g *= *clip_norm / norm;
        }
        if (freeze_lengthscales) g.tail(g.size() - 2).setZero();

        const double eta = schedule.rate(t0 + s);
        client.params = box.project(
            GPParams::from_vector(client.params.to_vector() - eta * g));
        assert(box.contains(client.params));
    }
    return client.params;
}

/// K_sample categorical draws (with replacement) from the weights p_k;
/// duplicates are kept, one per slot.
inline std::vector<int> select_clients(const std::vector<double>& weights, int k_sample,
                                       std::mt19937_64& rng) {
    if (weights.empty())
        throw InputError("select_clients needs a non-empty weight list");
    if (k_sample < 1)
        throw InputError("k_sample must be >= 1");
    std::vector<double> cumulative(weights.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        acc += weights[k];
        cumulative[k] = acc;
    }
    std::uniform_real_distribution<double> u(0.0, acc);
    std::vector<int> out(static_cast<std::size_t>(k_sample));
    for (int s = 0; s < k_sample; ++s) {
        const double v = u(rng);
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), v);
        out[static_cast<std::size_t>(s)] =
            static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                      static_cast<std::ptrdiff_t>(weights.size()) - 1));
    }
    return out;
}

/// theta_bar = sum_k p_k theta_k, re-projected onto the box (a no-op for
/// in-box inputs since the box is convex). Accumulated as deviations from the
/// first entry, so identical inputs aggregate to themselves bitwise for any
/// weights summing to 1.
inline GPParams aggregate_full(const std::vector<GPParams>& params_list,
                               const std::vector<double>& weights, const ParamBox& box) {
    if (params_list.empty() || params_list.size() != weights.size())
        throw InputError("aggregate_full needs matching params and weights");
    const Vector anchor = params_list.front().to_vector();
    Vector acc = Vector::Zero(anchor.size());
    for (std::size_t k = 0; k < params_list.size(); ++k) {
        if (!params_list[k].same_layout(params_list.front()))
            throw InputError("aggregate_full: mismatched parameter layouts");
        acc += weights[k] * (params_list[k].to_vector() - anchor);
    }
    const GPParams avg = GPParams::from_vector(anchor + acc);
    const GPParams projected = box.project(avg);
    assert((projected.to_vector() - avg.to_vector()).cwiseAbs().maxCoeff() <= 1e-12);
    return projected;
}

/// Unweighted mean over the selected slots (asynchronous aggregation).
inline GPParams aggregate_sampled(const std::vector<GPParams>& slots) {
    if (slots.empty())
        throw InputError("aggregate_sampled needs at least one slot");
    const Vector anchor = slots.front().to_vector();
    Vector acc = Vector::Zero(anchor.size());
    for (const GPParams& p : slots) {
        if (!p.same_layout(slots.front()))
            throw InputError("aggregate_sampled: mismatched parameter layouts");
        acc += p.to_vector() - anchor;
    }
    return GPParams::from_vector(anchor + acc / static_cast<double>(slots.size()));
}

/// Algorithm 1. Clients must arrive holding a common initial parameter; each
/// round derives per-(client, round) rng streams from config.seed, so the
/// whole run is deterministic and client updates are schedule-independent.
inline std::vector<RoundTrace> run_federation(const KernelSpec& spec,
                                              std::vector<ClientState>& clients,
                                              const FederationConfig& config,
                                              const RoundObserver& observer = {}) {
    if (clients.empty())
        throw InputError("run_federation needs at least one client");
    if (config.rounds < 1)
        throw InputError("rounds must be >= 1");
    if (config.local_steps < 0)
        throw InputError("local_steps must be >= 0");
    config.box.validate();

    const auto K = static_cast<int>(clients.size());
    if (config.participation == Participation::Asynchronous
        && (config.k_sample < 1 || config.k_sample >= K))
        throw InputError("asynchronous mode requires 1 <= k_sample < K");

    std::vector<double> weights(clients.size());
    double weight_sum = 0.0;
    for (std::size_t k = 0; k < clients.size(); ++k) {
        if (clients[k].id != static_cast<int>(k))
            throw InputError("client ids must equal their federation positions");
        weights[k] = clients[k].weight;
        weight_sum += weights[k];
        validate_dataset(clients[k].data);
        if (clients[k].batch_size < 1 || clients[k].batch_size > clients[k].data.n())
            throw InputError("client batch size must lie in [1, N_k]");
        if (!config.box.contains(clients[k].params))
            throw ParamDomainError("initial client params lie outside the box");
    }
    if (std::abs(weight_sum - 1.0) > 1e-12)
        throw InputError("client weights must sum to 1");

    std::mt19937_64 select_rng = rng::stream(config.seed, {rng::kSelect});
    std::vector<RoundTrace> traces;
    traces.reserve(static_cast<std::size_t>(config.rounds));

    for (int round = 0; round < config.rounds; ++round) {
        RoundTrace trace;
        trace.round = round + 1;

        if (config.participation == Participation::Synchronous) {
            trace.selected.resize(clients.size());
            for (std::size_t k = 0; k < clients.size(); ++k)
                trace.selected[k] = clients[k].id;
        } else {
            trace.selected = select_clients(weights, config.k_sample, select_rng);
        }

        // Update each distinct selected client once; duplicated selections
        // reuse the result, one copy per slot.
        std::vector<char> updated(clients.size(), 0);
        const std::int64_t t0 =
            static_cast<std::int64_t>(round) * static_cast<std::int64_t>(config.local_steps);
        for (int id : trace.selected) {
            auto& client = clients[static_cast<std::size_t>(id)];
            if (updated[static_cast<std::size_t>(id)]) continue;
            client.rng = rng::stream(config.seed,
                                     {rng::kLocal, static_cast<std::uint64_t>(id),
                                      static_cast<std::uint64_t>(round)});
            try {
                local_update(spec, client, config.local_steps, config.lr_schedule,
                             config.scaling, config.box, config.clip_norm,
                             config.freeze_lengthscales, t0);
            } catch (const NumericalError& err) {
                throw NumericalError("round " + std::to_string(round + 1) + ", "
                                     + err.what(), err.attempted_jitters);
            }
            updated[static_cast<std::size_t>(id)] = 1;
        }

        if (config.participation == Participation::Synchronous) {
            std::vector<GPParams> locals(clients.size());
            for (std::size_t k = 0; k < clients.size(); ++k)
                locals[k] = clients[k].params;
            trace.aggregated = aggregate_full(locals, weights, config.box);
        } else {
            std::vector<GPParams> slots;
            slots.reserve(trace.selected.size());
            for (int id : trace.selected)
                slots.push_back(clients[static_cast<std::size_t>(id)].params);
            trace.aggregated = aggregate_sampled(slots);
        }

        trace.client_params.resize(clients.size());
        for (std::size_t k = 0; k < clients.size(); ++k)
            trace.client_params[k] = clients[k].params;

        if (observer) observer(trace, clients);

        // Broadcast: every client (sampled or not) starts the next round
        // from the aggregated parameter.
        for (auto& client : clients)
            client.params = trace.aggregated;

        traces.push_back(std::move(trace));
    }
    return traces;
}

}  // namespace fedgp

#endif  // FEDGP_FEDERATION_HPP
