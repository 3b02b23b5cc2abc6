#ifndef FEDGP_TESTS_SUPPORT_HPP
#define FEDGP_TESTS_SUPPORT_HPP

// Test-only oracles, kept independent of the library code paths they check:
// finite differences for gradients and an explicit-inverse multivariate
// normal density for the marginal likelihood.

#include <fedgp/gp.hpp>

#include <Eigen/LU>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace testsupport {

using fedgp::Dataset;
using fedgp::GPParams;
using fedgp::KernelSpec;
using fedgp::Matrix;
using fedgp::Vector;

// |a - b| / max(1, |b|): relative error with an absolute floor so entries
// near zero do not blow up the ratio.
inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max(1.0, std::abs(b));
}

inline GPParams perturb(const GPParams& p, Eigen::Index comp, double delta) {
    Vector v = p.to_vector();
    v(comp) += delta;
    return GPParams::from_vector(v);
}

// Central finite difference of a scalar function of the parameters, step
// 1e-5 * max(1, |p_i|) per component.
inline Vector fd_grad(const std::function<double(const GPParams&)>& f, const GPParams& at) {
    Vector g(at.size());
    const Vector v = at.to_vector();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double h = 1e-5 * std::max(1.0, std::abs(v(i)));
        g(i) = (f(perturb(at, i, h)) - f(perturb(at, i, -h))) / (2.0 * h);
    }
    return g;
}

// Central finite difference of the full covariance matrix per parameter.
inline std::vector<Matrix> fd_cov_grads(const KernelSpec& spec, const GPParams& params,
                                        const Matrix& X, double step = 1e-5) {
    std::vector<Matrix> out;
    const Vector v = params.to_vector();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double h = step * std::max(1.0, std::abs(v(i)));
        const Matrix up = fedgp::cov_matrix(spec, perturb(params, i, h), X, X, true);
        const Matrix dn = fedgp::cov_matrix(spec, perturb(params, i, -h), X, X, true);
        out.push_back((up - dn) / (2.0 * h));
    }
    return out;
}

// Log density of N(0, K) at y through an explicit LU inverse and determinant;
// no Cholesky anywhere, so it is an independent route to the same number.
inline double mvn_nll_oracle(const Matrix& K, const Vector& y) {
    const Eigen::FullPivLU<Matrix> lu(K);
    const Matrix Kinv = lu.inverse();
    const double quad = y.dot(Kinv * y);
    const double logdet = std::log(lu.determinant());
    const double n = static_cast<double>(y.size());
    return 0.5 * (quad + logdet + n * std::log(2.0 * std::atan(1.0) * 4.0));
}

inline GPParams random_params(std::mt19937_64& rng, Eigen::Index n_ell) {
    std::uniform_real_distribution<double> u1(0.3, 3.0), u2(0.2, 1.5), ul(0.3, 2.0);
    GPParams p;
    p.theta1 = u1(rng);
    p.theta2 = u2(rng);
    p.lengthscales.resize(n_ell);
    for (Eigen::Index j = 0; j < n_ell; ++j) p.lengthscales(j) = ul(rng);
    return p;
}

inline Dataset random_dataset(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d) {
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    std::normal_distribution<double> gauss;
    Dataset data;
    data.inputs.resize(n, d);
    data.outputs.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) data.inputs(i, j) = ux(rng);
        data.outputs(i) = gauss(rng);
    }
    return data;
}

inline const std::vector<fedgp::KernelFamily>& all_families() {
    static const std::vector<fedgp::KernelFamily> families = {
        fedgp::KernelFamily::RBF, fedgp::KernelFamily::Matern12,
        fedgp::KernelFamily::Matern32, fedgp::KernelFamily::Matern52};
    return families;
}

}  // namespace testsupport

#endif  // FEDGP_TESTS_SUPPORT_HPP
