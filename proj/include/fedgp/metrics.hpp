#ifndef FEDGP_METRICS_HPP
#define FEDGP_METRICS_HPP

#include <fedgp/gp.hpp>

#include <cmath>
#include <optional>
#include <vector>

namespace fedgp {

enum class ErrorComponents { Theta1Theta2, Theta2Only, All };

struct MetricReport {
    std::optional<double> param_sq_error;
    std::optional<double> theta2_sq_error;
    std::optional<double> global_grad_sq_norm;
    std::optional<double> global_nll;
    std::vector<double> per_client_rmse;
    std::optional<double> avg_rmse;
    std::optional<double> std_rmse;
};

/// Sum of squared componentwise differences over the selected components
/// (length-scales enter only under All).
inline double param_sq_error(const GPParams& theta_bar, const GPParams& theta_star,
                             ErrorComponents components) {
    if (!theta_bar.same_layout(theta_star))
        throw ShapeError("param_sq_error arguments have mismatched layouts");
    const double d1 = theta_bar.theta1 - theta_star.theta1;
    const double d2 = theta_bar.theta2 - theta_star.theta2;
    switch (components) {
        case ErrorComponents::Theta2Only:
            return d2 * d2;
        case ErrorComponents::Theta1Theta2:
            return d1 * d1 + d2 * d2;
        case ErrorComponents::All:
            return d1 * d1 + d2 * d2
                + (theta_bar.lengthscales - theta_star.lengthscales).squaredNorm();
    }
    throw InputError("unknown component selector");
}

inline double rmse(const Vector& pred_mean, const Vector& truth) {
    if (pred_mean.size() != truth.size())
        throw InputError("rmse arguments have different lengths");
    if (pred_mean.size() < 1)
        throw InputError("rmse needs at least one entry");
    return std::sqrt((pred_mean - truth).squaredNorm() / static_cast<double>(truth.size()));
}

/// || sum_k p_k grad L_k(theta_bar) ||^2 over the full datasets (no batching).
inline double global_grad_sq_norm(const KernelSpec& spec, const GPParams& theta_bar,
                                  const std::vector<Dataset>& datasets,
                                  const std::vector<double>& weights) {
    if (datasets.empty() || datasets.size() != weights.size())
        throw InputError("global_grad_sq_norm needs matching datasets and weights");
    Vector acc = Vector::Zero(theta_bar.size());
    for (std::size_t k = 0; k < datasets.size(); ++k)
        acc += weights[k] * full_grad(spec, theta_bar, datasets[k]);
    return acc.squaredNorm();
}

}  // namespace fedgp

#endif  // FEDGP_METRICS_HPP
