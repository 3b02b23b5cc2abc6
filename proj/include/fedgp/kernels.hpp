#ifndef FEDGP_KERNELS_HPP
#define FEDGP_KERNELS_HPP

#include <fedgp/common.hpp>

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace fedgp {

enum class KernelFamily { RBF, Matern12, Matern32, Matern52 };
enum class LengthscaleMode { Isotropic, ARD };

struct KernelSpec {
    KernelFamily family = KernelFamily::RBF;
    LengthscaleMode lengthscale_mode = LengthscaleMode::Isotropic;
};

/// Model parameters in the fixed layout [theta1, theta2, lengthscales...].
/// theta1 is the signal amplitude, theta2 the noise standard deviation; the
/// length-scale block has 1 entry (isotropic) or d entries (ARD).
struct GPParams {
    double theta1 = 1.0;
    double theta2 = 1.0;
    Vector lengthscales = Vector::Ones(1);

    Eigen::Index size() const { return 2 + lengthscales.size(); }

    Vector to_vector() const {
        Vector v(size());
        v(0) = theta1;
        v(1) = theta2;
        v.tail(lengthscales.size()) = lengthscales;
        return v;
    }

    static GPParams from_vector(const Vector& v) {
        if (v.size() < 3)
            throw ShapeError("GPParams vector needs at least 3 entries");
        GPParams p;
        p.theta1 = v(0);
        p.theta2 = v(1);
        p.lengthscales = v.tail(v.size() - 2);
        return p;
    }

    bool same_layout(const GPParams& other) const {
        return lengthscales.size() == other.lengthscales.size();
    }
};

/// Componentwise box [lower, upper] in GPParams layout (compact parameter set;
/// SGD iterates are projected back onto it after every step).
struct ParamBox {
    GPParams lower;
    GPParams upper;

    void validate() const {
        if (!lower.same_layout(upper))
            throw ShapeError("ParamBox bounds have mismatched layouts");
        const Vector lo = lower.to_vector(), hi = upper.to_vector();
        for (Eigen::Index i = 0; i < lo.size(); ++i) {
            if (!(lo(i) > 0.0))
                throw ParamDomainError("ParamBox lower bounds must be strictly positive");
            if (!(lo(i) < hi(i)))
                throw ParamDomainError("ParamBox requires lower < upper componentwise");
        }
    }

    bool contains(const GPParams& p) const {
        if (!p.same_layout(lower)) return false;
        const Vector v = p.to_vector(), lo = lower.to_vector(), hi = upper.to_vector();
        return (v.array() >= lo.array()).all() && (v.array() <= hi.array()).all();
    }

    GPParams project(const GPParams& p) const {
        if (!p.same_layout(lower))
            throw ShapeError("cannot project params with a different layout");
        const Vector v = p.to_vector(), lo = lower.to_vector(), hi = upper.to_vector();
        return GPParams::from_vector(v.cwiseMax(lo).cwiseMin(hi));
    }

    /// Uniform draw over the box; component order theta1, theta2, l_0, l_1, ...
    GPParams sample_uniform(std::mt19937_64& rng) const {
        const Vector lo = lower.to_vector(), hi = upper.to_vector();
        Vector v(lo.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            std::uniform_real_distribution<double> u(lo(i), hi(i));
            v(i) = u(rng);
        }
        return GPParams::from_vector(v);
    }
};

namespace detail {

inline void check_lengthscales(const KernelSpec& spec, const Vector& ell, Eigen::Index d) {
    const Eigen::Index want = spec.lengthscale_mode == LengthscaleMode::ARD ? d : 1;
    if (ell.size() != want)
        throw ShapeError("length-scale vector has size " + std::to_string(ell.size())
                         + ", expected " + std::to_string(want));
    if (!(ell.array() > 0.0).all())
        throw ParamDomainError("length-scales must be strictly positive");
}

/// Unit-amplitude correlation as a function of the scaled squared distance
/// r2 = sum_j (x_j - x'_j)^2 / l_j^2.
inline double corr_from_r2(KernelFamily family, double r2) {
    switch (family) {
        case KernelFamily::RBF:
            return std::exp(-0.5 * r2);
        case KernelFamily::Matern12:
            return std::exp(-std::sqrt(r2));
        case KernelFamily::Matern32: {
            const double a = std::sqrt(3.0 * r2);
            return (1.0 + a) * std::exp(-a);
        }
        case KernelFamily::Matern52: {
            const double a = std::sqrt(5.0 * r2);
            return (1.0 + a + 5.0 * r2 / 3.0) * std::exp(-a);
        }
    }
    throw ParamDomainError("unknown kernel family");
}

/// Rows of X divided componentwise by the length-scales (broadcast if isotropic).
inline Matrix scale_inputs(const Matrix& X, const Vector& ell) {
    if (ell.size() == 1) return X / ell(0);
    return X * ell.cwiseInverse().asDiagonal();
}

/// Scaled squared distances between row sets. When `symmetric`, X1s and X2s
/// alias the same data and the result is mirrored, so it is exactly symmetric
/// with an exactly zero diagonal.
inline Matrix scaled_sq_dist(const Matrix& X1s, const Matrix& X2s, bool symmetric) {
    Matrix r2(X1s.rows(), X2s.rows());
    if (symmetric) {
        for (Eigen::Index i = 0; i < X1s.rows(); ++i) {
            r2(i, i) = 0.0;
            for (Eigen::Index j = 0; j < i; ++j)
                r2(i, j) = r2(j, i) = (X1s.row(i) - X2s.row(j)).squaredNorm();
        }
    } else {
        for (Eigen::Index i = 0; i < X1s.rows(); ++i)
            for (Eigen::Index j = 0; j < X2s.rows(); ++j)
                r2(i, j) = (X1s.row(i) - X2s.row(j)).squaredNorm();
    }
    return r2;
}

}  // namespace detail

/// k_f(x1, x2): unit-amplitude, noise-free correlation in (0, 1].
/// RBF: exp(-sum_j D_j/(2 l_j^2)); Matern uses the half-integer closed forms
/// on r = sqrt(sum_j D_j / l_j^2), with D_j = (x1_j - x2_j)^2.
inline double base_kernel(const KernelSpec& spec, const Vector& lengthscales,
                          const Vector& x1, const Vector& x2) {
    if (x1.size() != x2.size())
        throw ShapeError("base_kernel inputs have different dimensions");
    detail::check_lengthscales(spec, lengthscales, x1.size());
    double r2 = 0.0;
    for (Eigen::Index j = 0; j < x1.size(); ++j) {
        const double lj = lengthscales.size() == 1 ? lengthscales(0) : lengthscales(j);
        const double dj = (x1(j) - x2(j)) / lj;
        r2 += dj * dj;
    }
    return detail::corr_from_r2(spec.family, r2);
}

/// Covariance matrix with entries theta1^2 * k_f(X1_i, X2_j). When add_noise
/// is set and X1, X2 are the same matrix, theta2^2 is added on the diagonal.
inline Matrix cov_matrix(const KernelSpec& spec, const GPParams& params,
                         const Matrix& X1, const Matrix& X2, bool add_noise) {
    if (X1.cols() != X2.cols())
        throw ShapeError("cov_matrix inputs have different dimensions");
    detail::check_lengthscales(spec, params.lengthscales, X1.cols());
    if (!(params.theta1 > 0.0) || !(params.theta2 > 0.0))
        throw ParamDomainError("theta1 and theta2 must be strictly positive");

    const bool same = (&X1 == &X2)
        || (X1.rows() == X2.rows() && X1.cols() == X2.cols() && X1 == X2);
    const Matrix X1s = detail::scale_inputs(X1, params.lengthscales);
    const Matrix r2 = same ? detail::scaled_sq_dist(X1s, X1s, true)
                           : detail::scaled_sq_dist(X1s, detail::scale_inputs(X2, params.lengthscales), false);

    const double amp2 = params.theta1 * params.theta1;
    Matrix K = r2.unaryExpr([&](double v) { return amp2 * detail::corr_from_r2(spec.family, v); });
    if (add_noise && same)
        K.diagonal().array() += params.theta2 * params.theta2;
    return K;
}

/// Derivatives of K(X, X) = theta1^2 K_f + theta2^2 I with respect to every
/// parameter, in GPParams layout order:
///   [0] dK/dtheta1 = 2 theta1 K_f
///   [1] dK/dtheta2 = 2 theta2 I
///   [2..] dK/dl_j  = theta1^2 dK_f/dl_j
inline std::vector<Matrix> cov_grads(const KernelSpec& spec, const GPParams& params,
                                     const Matrix& X) {
    detail::check_lengthscales(spec, params.lengthscales, X.cols());
    const Eigen::Index n = X.rows();
    const Matrix Xs = detail::scale_inputs(X, params.lengthscales);
    const Matrix r2 = detail::scaled_sq_dist(Xs, Xs, true);
    const Matrix Kf = r2.unaryExpr([&](double v) { return detail::corr_from_r2(spec.family, v); });

    std::vector<Matrix> grads;
    grads.reserve(static_cast<std::size_t>(params.size()));
    grads.push_back(2.0 * params.theta1 * Kf);
    grads.push_back(2.0 * params.theta2 * Matrix::Identity(n, n));

    // dk/dl_j = c(r) * D_j / l_j^3 with the family factor c(r) below; the
    // isotropic case sums over dimensions, which collapses to c(r) * r2 / l.
    const double amp2 = params.theta1 * params.theta1;
    const Matrix c = r2.unaryExpr([&](double v) -> double {
        const double r = std::sqrt(v);
        switch (spec.family) {
            case KernelFamily::RBF:
                return std::exp(-0.5 * v);
            case KernelFamily::Matern12:
                return r > 0.0 ? std::exp(-r) / r : 0.0;
            case KernelFamily::Matern32:
                return 3.0 * std::exp(-std::sqrt(3.0) * r);
            case KernelFamily::Matern52: {
                const double a = std::sqrt(5.0) * r;
                return (5.0 / 3.0) * (1.0 + a) * std::exp(-a);
            }
        }
        return 0.0;
    });

    if (spec.lengthscale_mode == LengthscaleMode::Isotropic) {
        const double ell = params.lengthscales(0);
        grads.push_back(amp2 / ell * c.cwiseProduct(r2));
    } else {
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            const double lj = params.lengthscales(j);
            Matrix Dj(n, n);
            for (Eigen::Index a = 0; a < n; ++a) {
                Dj(a, a) = 0.0;
                for (Eigen::Index b = 0; b < a; ++b) {
                    const double diff = X(a, j) - X(b, j);
                    Dj(a, b) = Dj(b, a) = diff * diff;
                }
            }
            grads.push_back(amp2 / (lj * lj * lj) * c.cwiseProduct(Dj));
        }
    }
    return grads;
}

}  // namespace fedgp

#endif  // FEDGP_KERNELS_HPP
