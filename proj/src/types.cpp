#include "egoseg/types.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "egoseg/error.hpp"

namespace egoseg {

void validate_detections(const ConceptDetections& det) {
    for (std::size_t i = 0; i < det.frames.size(); ++i) {
        std::set<std::string> seen;
        for (const auto& tc : det.frames[i].tags) {
            if (!(tc.confidence >= 0.0 && tc.confidence <= 1.0))
                throw ValidationError("frame " + std::to_string(i) + ": confidence " +
                                      std::to_string(tc.confidence) + " of tag '" + tc.tag +
                                      "' is outside [0,1]");
            if (!seen.insert(tc.tag).second)
                throw ValidationError("frame " + std::to_string(i) + ": duplicate tag '" + tc.tag + "'");
        }
    }
}

void validate_stream(const FeatureStream& stream) {
    const auto n = static_cast<Eigen::Index>(stream.frames.size());
    for (std::size_t i = 0; i < stream.frames.size(); ++i) {
        const auto& f = stream.frames[i];
        if (f.index != i)
            throw ValidationError("frame indices must be consecutive from 0 (frame " +
                                  std::to_string(i) + " has index " + std::to_string(f.index) + ")");
        if (i > 0 && f.timestamp && stream.frames[i - 1].timestamp &&
            *f.timestamp < *stream.frames[i - 1].timestamp)
            throw ValidationError("timestamps decrease at frame " + std::to_string(i));
    }
    if (stream.contextual.rows() != n)
        throw ValidationError("contextual block has " + std::to_string(stream.contextual.rows()) +
                              " rows for " + std::to_string(n) + " frames");
    if (stream.semantic.size() > 0 && stream.semantic.rows() != n)
        throw ValidationError("semantic block row count does not match frame count");
    if (stream.fused && stream.fused->rows() != n)
        throw ValidationError("fused block row count does not match frame count");
}

Segmentation::Segmentation(std::size_t n, std::vector<std::size_t> starts)
    : n_(n), starts_(std::move(starts)) {
    validate(n_, starts_);
}

void Segmentation::validate(std::size_t n, const std::vector<std::size_t>& starts) {
    if (n == 0) throw ValidationError("segmentation must cover at least one frame");
    if (starts.empty() || starts.front() != 0)
        throw ValidationError("first segment must start at frame 0");
    for (std::size_t k = 1; k < starts.size(); ++k)
        if (starts[k] <= starts[k - 1])
            throw ValidationError("segment starts must be strictly increasing (position " +
                                  std::to_string(k) + ")");
    if (starts.back() >= n)
        throw ValidationError("segment start " + std::to_string(starts.back()) +
                              " is not below n = " + std::to_string(n));
}

Segmentation Segmentation::from_boundaries(std::size_t n, std::vector<std::size_t> boundaries) {
    boundaries.push_back(0);
    std::sort(boundaries.begin(), boundaries.end());
    boundaries.erase(std::unique(boundaries.begin(), boundaries.end()), boundaries.end());
    return Segmentation(n, std::move(boundaries));
}

std::vector<std::size_t> Segmentation::boundaries() const {
    return {starts_.begin() + 1, starts_.end()};
}

std::size_t Segmentation::segment_of(std::size_t i) const {
    if (i >= n_) throw ValidationError("frame " + std::to_string(i) + " out of range");
    auto it = std::upper_bound(starts_.begin(), starts_.end(), i);
    return static_cast<std::size_t>(it - starts_.begin()) - 1;
}

std::vector<std::size_t> Segmentation::labels() const {
    std::vector<std::size_t> out(n_);
    for (std::size_t k = 0; k < starts_.size(); ++k)
        std::fill(out.begin() + static_cast<std::ptrdiff_t>(segment_begin(k)),
                  out.begin() + static_cast<std::ptrdiff_t>(segment_end(k)), k);
    return out;
}

}  // namespace egoseg
