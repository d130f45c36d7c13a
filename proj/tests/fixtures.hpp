#pragma once

// Deterministic streams shared by unit and acceptance tests.

#include <cmath>
#include <random>

#include "egoseg/types.hpp"

namespace fixture {

using egoseg::Matrix;

/// 200 one-dimensional frames: 100 near 0.1, then 100 near 0.9.
inline Matrix mean_shift_200() {
    Matrix m(200, 1);
    for (Eigen::Index i = 0; i < 200; ++i) {
        const double wiggle = 0.05 * std::sin(0.7 * static_cast<double>(i) + 0.3);
        m(i, 0) = (i < 100 ? 0.1 : 0.9) + wiggle;
    }
    return m;
}

/// Three plateaus 0.2 / 0.8 / 0.5 of 60 frames each, small deterministic ripple.
inline Matrix three_plateaus() {
    Matrix m(180, 2);
    for (Eigen::Index i = 0; i < 180; ++i) {
        const double level = i < 60 ? 0.2 : (i < 120 ? 0.8 : 0.5);
        m(i, 0) = level + 0.04 * std::cos(1.3 * static_cast<double>(i));
        m(i, 1) = 1.0 - level + 0.04 * std::sin(0.9 * static_cast<double>(i));
    }
    return m;
}

/// Uniform noise in [0,1] with no change.
inline Matrix uniform_stream(std::uint64_t seed, Eigen::Index n, Eigen::Index k) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix m(n, k);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < k; ++j) m(i, j) = u(rng);
    return m;
}

}  // namespace fixture
