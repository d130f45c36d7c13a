#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "egoseg/types.hpp"

namespace egoseg {

struct AdwinParams {
    double delta = 0.1;
    int p = 2;
    std::size_t min_subwindow = 1;
};

void validate(const AdwinParams& params);

/// Hoeffding-style cut threshold for a k-dimensional stream:
///   k^(1/p) * sqrt( ln(4 / (k * delta_prime)) / (2 m) )
/// where m is the harmonic mean of the two sub-window lengths.
double cut_threshold(std::size_t k, int p, double m, double delta_prime);

/// Harmonic mean 2ab / (a + b) of two sub-window lengths.
double harmonic_mean(std::size_t a, std::size_t b);

/// Adaptive-window mean change detector over a k-dimensional stream with
/// entries in [0,1]. After every frame all splits of the current window are
/// tested; while any split fires, the split with the largest gap/threshold
/// ratio becomes a boundary and the older sub-window is dropped.
class AdwinDetector {
public:
    AdwinDetector(std::size_t dimension, AdwinParams params);

    /// Returns the number of boundaries recorded by this update.
    std::size_t update(std::span<const double> row);

    std::size_t frames_seen() const { return frames_; }
    std::size_t window_start() const { return window_start_; }
    const std::vector<std::size_t>& boundaries() const { return boundaries_; }

private:
    double mean_gap(std::size_t split) const;

    std::size_t dim_;
    AdwinParams params_;
    std::size_t frames_ = 0;
    std::size_t window_start_ = 0;
    // prefix sums over the whole stream, (frames_ + 1) x dim_, flattened
    std::vector<double> prefix_;
    std::vector<std::size_t> boundaries_;
};

/// Runs the detector over every row; throws on entries outside [0,1] or an
/// empty stream.
Segmentation detect_changes(const Matrix& stream, const AdwinParams& params);

/// Per-column min-max rescale to [0,1]; constant columns map to 0.5.
Matrix rescale_to_unit(const Matrix& stream);

}  // namespace egoseg
