#ifndef FEDGP_LINALG_HPP
#define FEDGP_LINALG_HPP

#include <fedgp/common.hpp>

#include <Eigen/Cholesky>

#include <string>
#include <utility>
#include <vector>

namespace fedgp {

/// Cholesky factorization with the retry policy: plain attempt first, then
/// 1e-8 * mean(diag) added to the diagonal, doubled up to 6 times. Failure
/// after the last retry throws NumericalError listing the attempted jitters.
struct JitteredLLT {
    Eigen::LLT<Matrix> llt;
    double jitter = 0.0;  // amount actually applied, 0 if none was needed

    double log_det() const {
        return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    }
};

inline JitteredLLT jittered_llt(const Matrix& K, const std::string& context = "matrix") {
    JitteredLLT out;
    out.llt.compute(K);
    if (out.llt.info() == Eigen::Success) return out;

    std::vector<double> attempts;
    const double base = 1e-8 * K.diagonal().mean();
    double jitter = base;
    for (int retry = 0; retry <= 6; ++retry, jitter *= 2.0) {
        attempts.push_back(jitter);
        Matrix Kj = K;
        Kj.diagonal().array() += jitter;
        out.llt.compute(Kj);
        if (out.llt.info() == Eigen::Success) {
            out.jitter = jitter;
            return out;
        }
    }
    throw NumericalError("Cholesky factorization of " + context + " failed after jitter retries",
                         std::move(attempts));
}

}  // namespace fedgp

#endif  // FEDGP_LINALG_HPP
