#ifndef FEDGP_COMMON_HPP
#define FEDGP_COMMON_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedgp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Shape/dimension mismatch between arguments.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A parameter left its admissible domain (nonpositive length-scale, ...).
struct ParamDomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Bad caller-supplied data (indices out of range, empty lists, ...).
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Invalid configuration (schema violations, impossible settings).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical failure; carries the jitter levels that were attempted.
struct NumericalError : std::runtime_error {
    std::vector<double> attempted_jitters;

    NumericalError(const std::string& msg, std::vector<double> jitters)
        : std::runtime_error(msg), attempted_jitters(std::move(jitters)) {}
};

namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent engine from (seed, path...). Streams with distinct
/// paths are uncorrelated, so per-(client, round) streams can be handed to
/// parallel workers and still reproduce the serial run bit for bit.
inline std::mt19937_64 stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t state = splitmix64(seed);
    for (std::uint64_t id : path)
        state = splitmix64(state ^ splitmix64(id));
    return std::mt19937_64(state);
}

// Stream tags, one per independent purpose.
inline constexpr std::uint64_t kInit = 0x01;
inline constexpr std::uint64_t kWorld = 0x02;
inline constexpr std::uint64_t kData = 0x03;
inline constexpr std::uint64_t kTest = 0x04;
inline constexpr std::uint64_t kSelect = 0x05;
inline constexpr std::uint64_t kLocal = 0x06;

}  // namespace rng

}  // namespace fedgp

#endif  // FEDGP_COMMON_HPP
