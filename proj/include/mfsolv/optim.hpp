#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

#include "mfsolv/tolerances.hpp"

namespace mfs {

// Deterministic counter-based random stream (splitmix64).
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline double uniform_unit(std::uint64_t& state) {
    return static_cast<double>(splitmix64_next(state) >> 11) * 0x1.0p-53;
}

inline double uniform_angle(std::uint64_t& state) {
    return (2.0 * uniform_unit(state) - 1.0) * 3.14159265358979323846;
}

inline std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b) {
    return a ^ (b + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2));
}

struct OptResult {
    Eigen::VectorXd x;
    double f = 0.0;
    int iters = 0;
    int evals = 0;
};

struct BfgsOptions {
    int max_iters = 200;
    double fd_step = tol::kFdStep;   // central-difference step
    double grad_tol = 1e-12;         // stop on small gradient (inf norm)
    double f_target = -1.0;          // stop once f <= f_target (negative: off)
    // Early exit on stalled progress well above the target:
    double plateau_rel = 0.0;        // relative improvement per window
    int plateau_window = 0;
    double plateau_above = 0.0;      // only bail out while f stays above this
};

OptResult bfgs_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                        Eigen::VectorXd x0, const BfgsOptions& opts = {});

struct GdOptions {
    int max_iters = 3000;
    double grad_tol = 1e-13;
    double f_target = -1.0;
};

// Gradient descent with Barzilai-Borwein step lengths and a backtracking
// safeguard; used where an analytic gradient is available.
OptResult gradient_descent_bb(const std::function<double(const Eigen::VectorXd&)>& f,
                              const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
                              Eigen::VectorXd x0, const GdOptions& opts = {});

}
