#ifndef FEDGP_GP_HPP
#define FEDGP_GP_HPP

#include <fedgp/kernels.hpp>
#include <fedgp/linalg.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace fedgp {

/// One client's training data: N x d inputs, length-N outputs.
struct Dataset {
    Matrix inputs;
    Vector outputs;

    Eigen::Index n() const { return inputs.rows(); }
    Eigen::Index dim() const { return inputs.cols(); }
};

inline void validate_dataset(const Dataset& data) {
    if (data.inputs.rows() != data.outputs.size())
        throw ShapeError("dataset input rows and output length differ");
    if (data.n() < 1)
        throw InputError("dataset must contain at least one observation");
    if (!data.inputs.allFinite() || !data.outputs.allFinite())
        throw InputError("dataset contains non-finite entries");
}

inline Dataset subset(const Dataset& data, const std::vector<int>& rows) {
    Dataset out;
    out.inputs.resize(static_cast<Eigen::Index>(rows.size()), data.dim());
    out.outputs.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.inputs.row(static_cast<Eigen::Index>(i)) = data.inputs.row(rows[i]);
        out.outputs(static_cast<Eigen::Index>(i)) = data.outputs(rows[i]);
    }
    return out;
}

struct Prediction {
    Vector mean;
    Vector latent_variance;       // variance of f, noise-free, clamped at 0
    Vector observation_variance;  // latent_variance + theta2^2
    double max_variance_clamp = 0.0;  // largest negative variance rounded up
};

/// Mini-batch gradient scaling from the convergence analysis: component 1 is
/// divided by tau * log M and component 2 by M; length-scales stay unscaled.
struct GradScaling {
    double tau = 1.0;
    bool enabled = false;
};

/// Negative log marginal likelihood
///   (1/2) [ y' K^-1 y + log|K| + N log 2pi ],  K = theta1^2 K_f + theta2^2 I,
/// computed through one Cholesky factorization.
inline double nll(const KernelSpec& spec, const GPParams& params, const Dataset& data) {
    validate_dataset(data);
    const Matrix K = cov_matrix(spec, params, data.inputs, data.inputs, true);
    const JitteredLLT chol = jittered_llt(K, "noise-augmented covariance");
    const double quad = data.outputs.dot(chol.llt.solve(data.outputs));
    const double n = static_cast<double>(data.n());
    return 0.5 * (quad + chol.log_det() + n * std::log(2.0 * std::numbers::pi));
}

/// Analytic gradient of nll, one component per GPParams entry:
///   g_i = (1/2) Tr[ K^-1 (I - y y' K^-1) dK/dtheta_i ]
///       = (1/2) ( Tr[K^-1 dK_i] - a' dK_i a ),  a = K^-1 y.
inline Vector full_grad(const KernelSpec& spec, const GPParams& params, const Dataset& data) {
    validate_dataset(data);
    const Eigen::Index n = data.n();
    const Matrix K = cov_matrix(spec, params, data.inputs, data.inputs, true);
    const JitteredLLT chol = jittered_llt(K, "noise-augmented covariance");
    const Vector alpha = chol.llt.solve(data.outputs);
    const Matrix Kinv = chol.llt.solve(Matrix::Identity(n, n));
    const std::vector<Matrix> grads = cov_grads(spec, params, data.inputs);

    Vector g(params.size());
    for (std::size_t i = 0; i < grads.size(); ++i) {
        const double trace_term = Kinv.cwiseProduct(grads[i]).sum();
        const double quad_term = alpha.dot(grads[i] * alpha);
        g(static_cast<Eigen::Index>(i)) = 0.5 * (trace_term - quad_term);
    }
    return g;
}

/// Uniform batch of `batch_size` distinct indices from [0, n_total).
inline std::vector<int> sample_batch(int n_total, int batch_size, std::mt19937_64& rng) {
    if (batch_size < 1 || batch_size > n_total)
        throw InputError("batch_size must lie in [1, n_total]");
    std::vector<int> idx(static_cast<std::size_t>(n_total));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < batch_size; ++i) {
        std::uniform_int_distribution<int> pick(i, n_total - 1);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
    }
    idx.resize(static_cast<std::size_t>(batch_size));
    return idx;
}

/// Stochastic gradient: full_grad restricted to the rows in `batch`, then
/// rescaled per GradScaling.
inline Vector stochastic_grad(const KernelSpec& spec, const GPParams& params,
                              const Dataset& data, const std::vector<int>& batch,
                              const GradScaling& scaling) {
    if (batch.empty())
        throw InputError("batch must be non-empty");
    std::vector<bool> seen(static_cast<std::size_t>(data.n()), false);
    for (int i : batch) {
        if (i < 0 || i >= data.n())
            throw InputError("batch index " + std::to_string(i) + " out of range");
        if (seen[static_cast<std::size_t>(i)])
            throw InputError("batch contains duplicate index " + std::to_string(i));
        seen[static_cast<std::size_t>(i)] = true;
    }
    const auto m = static_cast<double>(batch.size());
    if (scaling.enabled && batch.size() < 2)
        throw ConfigError("gradient scaling requires batch size >= 2");

    Vector g = full_grad(spec, params, subset(data, batch));
    if (scaling.enabled) {
        g(0) /= scaling.tau * std::log(m);
        g(1) /= m;
    }
    return g;
}

/// Posterior predictive distribution at the rows of X_star, conditioning on
/// the training set through one Cholesky of K(X,X) + theta2^2 I.
inline Prediction predict(const KernelSpec& spec, const GPParams& params,
                          const Dataset& train, const Matrix& X_star) {
    validate_dataset(train);
    if (X_star.cols() != train.dim())
        throw ShapeError("test inputs have a different dimension than training inputs");

    const Matrix K = cov_matrix(spec, params, train.inputs, train.inputs, true);
    const JitteredLLT chol = jittered_llt(K, "noise-augmented covariance");
    const Matrix cross = cov_matrix(spec, params, X_star, train.inputs, false);

    Prediction out;
    out.mean = cross * chol.llt.solve(train.outputs);

    const Matrix solved = chol.llt.solve(cross.transpose());  // N x N*
    const double prior_var = params.theta1 * params.theta1;
    const double noise_var = params.theta2 * params.theta2;
    out.latent_variance.resize(X_star.rows());
    for (Eigen::Index i = 0; i < X_star.rows(); ++i) {
        double v = prior_var - cross.row(i).dot(solved.col(i));
        if (v < 0.0) {
            out.max_variance_clamp = std::max(out.max_variance_clamp, -v);
            v = 0.0;
        }
        out.latent_variance(i) = v;
    }
    out.observation_variance = out.latent_variance.array() + noise_var;
    return out;
}

/// One draw y = L z + theta2 w from the prior, with L the Cholesky factor of
/// theta1^2 K_f (+ jitter) and z, w independent standard normal vectors.
inline Vector sample_prior(const KernelSpec& spec, const GPParams& params,
                           const Matrix& X, std::mt19937_64& rng) {
    const Matrix Kf = cov_matrix(spec, params, X, X, false);
    const JitteredLLT chol = jittered_llt(Kf, "prior covariance");
    std::normal_distribution<double> gauss;
    Vector z(X.rows()), w(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) z(i) = gauss(rng);
    for (Eigen::Index i = 0; i < X.rows(); ++i) w(i) = gauss(rng);
    return chol.llt.matrixL() * z + params.theta2 * w;
}

}  // namespace fedgp

#endif  // FEDGP_GP_HPP
