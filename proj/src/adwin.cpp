#include "egoseg/adwin.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "egoseg/error.hpp"

namespace egoseg {

void validate(const AdwinParams& params) {
    if (!(params.delta > 0.0 && params.delta < 1.0)) throw ValidationError("ADWIN delta must lie in (0,1)");
    if (params.p < 1) throw ValidationError("ADWIN norm order p must be at least 1");
    if (params.min_subwindow < 1) throw ValidationError("ADWIN min_subwindow must be at least 1");
}

double harmonic_mean(std::size_t a, std::size_t b) {
    const auto x = static_cast<double>(a);
    const auto y = static_cast<double>(b);
    return 2.0 * x * y / (x + y);
}

double cut_threshold(std::size_t k, int p, double m, double delta_prime) {
    const auto kd = static_cast<double>(k);
    const double log_term = std::log(4.0 / (kd * delta_prime));
    // A non-positive log term leaves the bound undefined; no cut is allowed.
    if (!(log_term > 0.0)) return std::numeric_limits<double>::infinity();
    return std::pow(kd, 1.0 / p) * std::sqrt(log_term / (2.0 * m));
}

AdwinDetector::AdwinDetector(std::size_t dimension, AdwinParams params)
    : dim_(dimension), params_(params), prefix_(dimension, 0.0) {
    if (dim_ == 0) throw ValidationError("ADWIN needs a stream of dimension at least 1");
    validate(params_);
}

double AdwinDetector::mean_gap(std::size_t split) const {
    const double n1 = static_cast<double>(split - window_start_);
    const double n2 = static_cast<double>(frames_ - split);
    const double* s0 = &prefix_[window_start_ * dim_];
    const double* s1 = &prefix_[split * dim_];
    const double* s2 = &prefix_[frames_ * dim_];
    double acc = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
        const double diff = std::abs((s1[j] - s0[j]) / n1 - (s2[j] - s1[j]) / n2);
        acc += params_.p == 2 ? diff * diff : std::pow(diff, params_.p);
    }
    return params_.p == 2 ? std::sqrt(acc) : std::pow(acc, 1.0 / params_.p);
}

std::size_t AdwinDetector::update(std::span<const double> row) {
    if (row.size() != dim_)
        throw ValidationError("ADWIN row has dimension " + std::to_string(row.size()) + ", expected " +
                              std::to_string(dim_));
    const std::size_t base = prefix_.size() - dim_;
    prefix_.resize(prefix_.size() + dim_);
    for (std::size_t j = 0; j < dim_; ++j) {
        if (!(row[j] >= 0.0 && row[j] <= 1.0))
            throw ValidationError("ADWIN input at frame " + std::to_string(frames_) + " is outside [0,1]");
        prefix_[base + dim_ + j] = prefix_[base + j] + row[j];
    }
    ++frames_;

    std::size_t fired = 0;
    const std::size_t minsub = params_.min_subwindow;
    while (frames_ - window_start_ >= 2 * minsub) {
        const std::size_t width = frames_ - window_start_;
        const double delta_prime = params_.delta / static_cast<double>(width);
        std::size_t best_split = 0;
        double best_ratio = 1.0;
        for (std::size_t s = window_start_ + minsub; s + minsub <= frames_; ++s) {
            const double eps = cut_threshold(dim_, params_.p, harmonic_mean(s - window_start_, frames_ - s),
                                             delta_prime);
            const double gap = mean_gap(s);
            if (gap > eps && gap / eps > best_ratio) {
                best_ratio = gap / eps;
                best_split = s;
            }
        }
        if (best_split == 0) break;
        boundaries_.push_back(best_split);
        window_start_ = best_split;
        ++fired;
    }
    return fired;
}

Segmentation detect_changes(const Matrix& stream, const AdwinParams& params) {
    if (stream.rows() == 0) throw ValidationError("ADWIN input stream is empty");
    AdwinDetector detector(static_cast<std::size_t>(stream.cols()), params);
    for (Eigen::Index i = 0; i < stream.rows(); ++i)
        detector.update({stream.row(i).data(), static_cast<std::size_t>(stream.cols())});
    return Segmentation::from_boundaries(static_cast<std::size_t>(stream.rows()), detector.boundaries());
}

Matrix rescale_to_unit(const Matrix& stream) {
    if (stream.rows() == 0) throw ValidationError("cannot rescale an empty stream");
    Matrix out(stream.rows(), stream.cols());
    for (Eigen::Index c = 0; c < stream.cols(); ++c) {
        const double lo = stream.col(c).minCoeff();
        const double hi = stream.col(c).maxCoeff();
        if (hi > lo)
            out.col(c) = ((stream.col(c).array() - lo) / (hi - lo)).cwiseMax(0.0).cwiseMin(1.0);
        else
            out.col(c).setConstant(0.5);
    }
    return out;
}

}  // namespace egoseg
