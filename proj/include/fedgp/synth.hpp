#ifndef FEDGP_SYNTH_HPP
#define FEDGP_SYNTH_HPP

#include <fedgp/gp.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace fedgp::synth {

/// A data-generating GP world: kernel, true parameters, input cube dimension.
struct GPWorld {
    KernelSpec spec;
    GPParams true_params;
    int dim = 1;
};

/// Samples theta1 ~ U[0.1, 10], theta2 ~ U[0.01, 1], l ~ U[0.01, 1]^d and,
/// unless fixed by the caller, d ~ U{1..10}. Draw order: d, theta1, theta2, l.
inline GPWorld draw_world(std::mt19937_64& rng, KernelFamily family = KernelFamily::RBF,
                          std::optional<int> fixed_dim = std::nullopt) {
    GPWorld world;
    if (fixed_dim) {
        if (*fixed_dim < 1 || *fixed_dim > 10)
            throw InputError("world dimension must lie in {1..10}");
        world.dim = *fixed_dim;
    } else {
        std::uniform_int_distribution<int> d(1, 10);
        world.dim = d(rng);
    }
    world.spec.family = family;
    world.spec.lengthscale_mode =
        world.dim == 1 ? LengthscaleMode::Isotropic : LengthscaleMode::ARD;

    std::uniform_real_distribution<double> u1(0.1, 10.0), u2(0.01, 1.0), ul(0.01, 1.0);
    world.true_params.theta1 = u1(rng);
    world.true_params.theta2 = u2(rng);
    const Eigen::Index n_ell =
        world.spec.lengthscale_mode == LengthscaleMode::ARD ? world.dim : 1;
    world.true_params.lengthscales.resize(n_ell);
    for (Eigen::Index j = 0; j < n_ell; ++j)
        world.true_params.lengthscales(j) = ul(rng);
    return world;
}

inline Matrix uniform_inputs(Eigen::Index n, int dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix X(n, dim);
    for (Eigen::Index i = 0; i < n; ++i)
        for (int j = 0; j < dim; ++j)
            X(i, j) = u(rng);
    return X;
}

/// One dataset per requested size, inputs uniform on the unit cube. By
/// default each client is an independent function draw from the shared prior;
/// with shared_draw all clients observe one jointly sampled draw.
inline std::vector<Dataset> make_clients(const GPWorld& world,
                                         const std::vector<Eigen::Index>& sizes,
                                         std::mt19937_64& rng, bool shared_draw = false) {
    if (sizes.empty())
        throw InputError("make_clients needs at least one size");
    for (Eigen::Index n : sizes)
        if (n < 1) throw InputError("client sizes must be >= 1");

    std::vector<Dataset> clients(sizes.size());
    for (std::size_t k = 0; k < sizes.size(); ++k)
        clients[k].inputs = uniform_inputs(sizes[k], world.dim, rng);

    if (shared_draw) {
        Eigen::Index total = 0;
        for (Eigen::Index n : sizes) total += n;
        Matrix stacked(total, world.dim);
        Eigen::Index at = 0;
        for (const auto& c : clients) {
            stacked.middleRows(at, c.n()) = c.inputs;
            at += c.n();
        }
        const Vector y = sample_prior(world.spec, world.true_params, stacked, rng);
        at = 0;
        for (auto& c : clients) {
            c.outputs = y.segment(at, c.n());
            at += c.n();
        }
    } else {
        for (auto& c : clients)
            c.outputs = sample_prior(world.spec, world.true_params, c.inputs, rng);
    }
    return clients;
}

// ---------------------------------------------------------------------------
// Multi-fidelity benchmark functions
// ---------------------------------------------------------------------------

enum class FidelityName { Linear, Nonlinear, Currin, Park, Branin, Hartmann3, Borehole };
enum class FidelityLevel { Low, Mid, High };

struct FidelityFunction {
    FidelityName name;
    FidelityLevel level;
};

inline int fidelity_dim(FidelityName name) {
    switch (name) {
        case FidelityName::Linear:
        case FidelityName::Nonlinear: return 1;
        case FidelityName::Currin:
        case FidelityName::Branin: return 2;
        case FidelityName::Park: return 4;
        case FidelityName::Hartmann3: return 3;
        case FidelityName::Borehole: return 8;
    }
    throw InputError("unknown fidelity function");
}

inline bool fidelity_has_mid(FidelityName name) {
    return name == FidelityName::Branin || name == FidelityName::Hartmann3;
}

/// Per-dimension input box of a benchmark. Lower bounds are open for PARK
/// (domain (0,1]^4); everything else is closed.
inline std::pair<Vector, Vector> fidelity_box(FidelityName name) {
    const int d = fidelity_dim(name);
    Vector lo = Vector::Zero(d), hi = Vector::Ones(d);
    switch (name) {
        case FidelityName::Nonlinear: hi(0) = 2.0; break;
        case FidelityName::Branin: lo << -5.0, 0.0; hi << 10.0, 15.0; break;
        case FidelityName::Borehole:
            lo << 0.05, 100.0, 63070.0, 990.0, 63.1, 700.0, 1120.0, 9855.0;
            hi << 0.15, 50000.0, 115600.0, 1110.0, 115.0, 820.0, 1680.0, 12045.0;
            break;
        default: break;
    }
    return {lo, hi};
}

namespace detail {

inline double linear_high(double x) {
    const double a = 6.0 * x - 2.0;
    return a * a * std::sin(12.0 * x - 4.0);
}

inline double currin_high(double x1, double x2) {
    const double damp = x2 == 0.0 ? 1.0 : 1.0 - std::exp(-1.0 / (2.0 * x2));
    const double num = 2300.0 * x1 * x1 * x1 + 1900.0 * x1 * x1 + 2092.0 * x1 + 60.0;
    const double den = 100.0 * x1 * x1 * x1 + 500.0 * x1 * x1 + 4.0 * x1 + 20.0;
    return damp * num / den;
}

inline double park_high(const Vector& x) {
    const double root = std::sqrt(1.0 + (x(1) + x(2) * x(2)) * x(3) / (x(0) * x(0)));
    return 0.5 * x(0) * (root - 1.0) + (x(0) + 3.0 * x(3)) * std::exp(1.0 + std::sin(x(2)));
}

inline double branin_high(const Vector& x) {
    constexpr double pi = std::numbers::pi;
    const double a = -1.275 * x(0) * x(0) / (pi * pi) + 5.0 * x(0) / pi + x(1) - 6.0;
    return a * a + (10.0 - 5.0 / (4.0 * pi)) * std::cos(x(0)) + 10.0;
}

inline double branin_mid(const Vector& x) {
    const double inner = branin_high(Vector(x.array() - 2.0));
    if (inner < 0.0)
        throw ParamDomainError("BRANIN mid fidelity undefined: y_h(x-2) < 0");
    return 10.0 * std::sqrt(inner) + 2.0 * (x(0) - 0.5) - 3.0 * (3.0 * x(1) - 1.0) - 1.0;
}

inline double hartmann3(const Vector& x, int t) {
    static constexpr std::array<std::array<double, 3>, 4> A{{
        {3.0, 10.0, 30.0}, {0.1, 10.0, 35.0}, {3.0, 10.0, 30.0}, {0.1, 10.0, 35.0}}};
    static constexpr std::array<std::array<double, 3>, 4> P{{
        {0.3689, 0.1170, 0.2673}, {0.4699, 0.4387, 0.7470},
        {0.1091, 0.8732, 0.5547}, {0.0381, 0.5743, 0.8828}}};
    static constexpr std::array<double, 4> alpha{1.0, 1.2, 3.0, 3.2};
    static constexpr std::array<double, 4> delta{0.01, -0.01, -0.1, 0.1};
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        double expo = 0.0;
        for (int j = 0; j < 3; ++j) {
            const double diff = x(j) - P[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            expo += A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * diff * diff;
        }
        const double ai = alpha[static_cast<std::size_t>(i)]
            + static_cast<double>(3 - t) * delta[static_cast<std::size_t>(i)];
        sum += ai * std::exp(-expo);
    }
    return sum;
}

inline double borehole(const Vector& x, bool high) {
    constexpr double pi = std::numbers::pi;
    const double lnr = std::log(x(1) / x(0));
    const double mid = 2.0 * x(6) * x(2) / (lnr * x(0) * x(0) * x(7));
    const double offset = high ? 1.0 : 1.5;
    const double scale = high ? 2.0 : 5.0;
    return scale * pi * x(2) * (x(3) - x(5)) / (lnr * (offset + mid + x(2) / x(4)));
}

}  // namespace detail

/// Exact closed-form evaluation of a benchmark at one in-box point. Internal
/// compositions (shifted/rescaled arguments) are evaluated without box checks,
/// exactly as the definitions compose.
inline double fidelity_eval(const FidelityFunction& f, const Vector& x) {
    const int d = fidelity_dim(f.name);
    if (x.size() != d)
        throw ShapeError("fidelity input has dimension " + std::to_string(x.size())
                         + ", expected " + std::to_string(d));
    if (f.level == FidelityLevel::Mid && !fidelity_has_mid(f.name))
        throw InputError("mid fidelity only exists for BRANIN and Hartmann-3D");
    const auto [lo, hi] = fidelity_box(f.name);
    for (int j = 0; j < d; ++j) {
        const bool open_low = f.name == FidelityName::Park;
        if (x(j) > hi(j) || x(j) < lo(j) || (open_low && x(j) == lo(j)))
            throw InputError("fidelity input outside the function box at coordinate "
                             + std::to_string(j));
    }

    switch (f.name) {
        case FidelityName::Linear: {
            const double yh = detail::linear_high(x(0));
            return f.level == FidelityLevel::High ? yh : 0.5 * yh + 10.0 * (x(0) - 0.5) + 5.0;
        }
        case FidelityName::Nonlinear: {
            if (f.level == FidelityLevel::Low) return std::cos(15.0 * x(0));
            return x(0) * std::exp(std::cos(15.0 * (2.0 * x(0) - 0.2))) - 1.0;
        }
        case FidelityName::Currin: {
            if (f.level == FidelityLevel::High) return detail::currin_high(x(0), x(1));
            const double up = x(1) + 0.05, down = std::max(0.0, x(1) - 0.05);
            return 0.25 * (detail::currin_high(x(0) + 0.05, up)
                           + detail::currin_high(x(0) + 0.05, down)
                           + detail::currin_high(x(0) - 0.05, up)
                           + detail::currin_high(x(0) - 0.05, down));
        }
        case FidelityName::Park: {
            const double yh = detail::park_high(x);
            if (f.level == FidelityLevel::High) return yh;
            return (1.0 + std::sin(x(0)) / 10.0) * yh - 2.0 * x(0) + x(1) * x(1)
                + x(2) * x(2) + 0.5;
        }
        case FidelityName::Branin: {
            if (f.level == FidelityLevel::High) return detail::branin_high(x);
            if (f.level == FidelityLevel::Mid) return detail::branin_mid(x);
            return detail::branin_mid(Vector(1.2 * (x.array() + 2.0))) - 3.0 * x(1) + 1.0;
        }
        case FidelityName::Hartmann3: {
            const int t = f.level == FidelityLevel::Low ? 1
                : f.level == FidelityLevel::Mid ? 2 : 3;
            return detail::hartmann3(x, t);
        }
        case FidelityName::Borehole:
            return detail::borehole(x, f.level == FidelityLevel::High);
    }
    throw InputError("unknown fidelity function");
}

inline Matrix fidelity_inputs(FidelityName name, Eigen::Index n, std::mt19937_64& rng) {
    const auto [lo, hi] = fidelity_box(name);
    const int d = fidelity_dim(name);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix X(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) {
            // 1 - u keeps the draw inside half-open (lo, hi] boxes (PARK).
            const double frac = name == FidelityName::Park ? 1.0 - u(rng) : u(rng);
            X(i, j) = lo(j) + frac * (hi(j) - lo(j));
        }
    return X;
}

/// One client per fidelity level, ordered Low, [Mid,] High with the given
/// sizes (hf/mf/lf follow Table-style "HF/MF/LF" counts). Outputs are exact
/// function values plus optional i.i.d. Gaussian noise.
inline std::vector<Dataset> make_fidelity_clients(FidelityName name, Eigen::Index hf,
                                                  Eigen::Index mf, Eigen::Index lf,
                                                  std::optional<double> noise_sd,
                                                  std::mt19937_64& rng) {
    if (mf > 0 && !fidelity_has_mid(name))
        throw ConfigError("mid-fidelity sample size given for a 2-level function");
    if (hf < 1 || lf < 1 || (fidelity_has_mid(name) && mf < 1))
        throw InputError("each fidelity level needs at least one sample");

    std::vector<std::pair<FidelityLevel, Eigen::Index>> plan;
    plan.emplace_back(FidelityLevel::Low, lf);
    if (fidelity_has_mid(name)) plan.emplace_back(FidelityLevel::Mid, mf);
    plan.emplace_back(FidelityLevel::High, hf);

    std::normal_distribution<double> gauss;
    std::vector<Dataset> clients;
    clients.reserve(plan.size());
    for (const auto& [level, count] : plan) {
        Dataset d;
        d.inputs = fidelity_inputs(name, count, rng);
        d.outputs.resize(count);
        for (Eigen::Index i = 0; i < count; ++i)
            d.outputs(i) = fidelity_eval({name, level}, d.inputs.row(i).transpose());
        if (noise_sd)
            for (Eigen::Index i = 0; i < count; ++i)
                d.outputs(i) += *noise_sd * gauss(rng);
        clients.push_back(std::move(d));
    }
    return clients;
}

// ---------------------------------------------------------------------------
// Output standardization
// ---------------------------------------------------------------------------

/// Affine output transform y' = (y - mean) / sd with the client's own sample
/// statistics (1/(N-1) estimator).
struct Standardization {
    double mean = 0.0;
    double sd = 1.0;

    double apply(double y) const { return (y - mean) / sd; }
    double invert(double y) const { return y * sd + mean; }
    Vector apply(const Vector& y) const { return (y.array() - mean) / sd; }
    Vector invert(const Vector& y) const { return y.array() * sd + mean; }
};

inline std::pair<std::vector<Dataset>, std::vector<Standardization>>
standardize(const std::vector<Dataset>& datasets) {
    std::vector<Dataset> out = datasets;
    std::vector<Standardization> transforms(datasets.size());
    for (std::size_t k = 0; k < datasets.size(); ++k) {
        const Vector& y = datasets[k].outputs;
        if (y.size() < 2)
            throw ConfigError("standardize needs at least 2 points per client");
        const double m = y.mean();
        const double var = (y.array() - m).square().sum() / static_cast<double>(y.size() - 1);
        if (var <= 0.0)
            throw ConfigError("cannot standardize a zero-variance client");
        transforms[k] = {m, std::sqrt(var)};
        out[k].outputs = transforms[k].apply(y);
    }
    return {std::move(out), std::move(transforms)};
}

// ---------------------------------------------------------------------------
// Named stylized scenarios
// ---------------------------------------------------------------------------

/// Two mirrored clients: y = sin(x) and y = -sin(x), 100 points each,
/// uniform on [0, 10], no noise.
inline std::vector<Dataset> sin_mirror_clients(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::vector<Dataset> clients(2);
    for (int k = 0; k < 2; ++k) {
        const double sign = k == 0 ? 1.0 : -1.0;
        clients[static_cast<std::size_t>(k)].inputs.resize(100, 1);
        clients[static_cast<std::size_t>(k)].outputs.resize(100);
        for (int i = 0; i < 100; ++i) {
            const double x = u(rng);
            clients[static_cast<std::size_t>(k)].inputs(i, 0) = x;
            clients[static_cast<std::size_t>(k)].outputs(i) = sign * std::sin(x);
        }
    }
    return clients;
}

struct BadInitScenario {
    std::vector<Dataset> clients;
    GPParams init;       // theta = (1, 10, 1)
    double noise_sd;     // noise standard deviation actually used
};

/// Two clients with y = sin(x) + eps on [0, 1], 100 points each;
/// eps ~ N(0, 0.2) read as variance 0.2 unless noise_is_std is set.
inline BadInitScenario bad_init_scenario(std::mt19937_64& rng, bool noise_is_std = false) {
    BadInitScenario scenario;
    scenario.noise_sd = noise_is_std ? 0.2 : std::sqrt(0.2);
    scenario.init.theta1 = 1.0;
    scenario.init.theta2 = 10.0;
    scenario.init.lengthscales = Vector::Ones(1);

    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> gauss;
    scenario.clients.resize(2);
    for (auto& c : scenario.clients) {
        c.inputs.resize(100, 1);
        c.outputs.resize(100);
        for (int i = 0; i < 100; ++i) {
            const double x = u(rng);
            c.inputs(i, 0) = x;
            c.outputs(i) = std::sin(x) + scenario.noise_sd * gauss(rng);
        }
    }
    return scenario;
}

}  // namespace fedgp::synth

#endif  // FEDGP_SYNTH_HPP
