#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace egoseg {

/// Dense row-per-frame matrix used for every feature block.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

struct Frame {
    std::size_t index = 0;
    std::optional<double> timestamp;
    std::string id;
};

struct TagConfidence {
    std::string tag;
    double confidence = 0.0;

    bool operator==(const TagConfidence&) const = default;
};

struct FrameTags {
    std::string id;
    std::vector<TagConfidence> tags;

    bool operator==(const FrameTags&) const = default;
};

/// Per-frame concept detections as produced by an external tagger.
struct ConceptDetections {
    std::vector<FrameTags> frames;

    std::size_t size() const { return frames.size(); }
    bool operator==(const ConceptDetections&) const = default;
};

/// Checks confidence range and per-frame tag uniqueness; throws ValidationError.
void validate_detections(const ConceptDetections& det);

/// Ordered per-frame features of one day-long sequence.
struct FeatureStream {
    std::vector<Frame> frames;
    Matrix contextual;
    Matrix semantic;
    std::optional<Matrix> fused;

    std::size_t size() const { return frames.size(); }
};

/// Checks frame indexing, timestamp ordering and block shapes.
void validate_stream(const FeatureStream& stream);

/// An ordered partition of {0,...,n-1} into contiguous segments, stored as
/// segment start indices. Every constructor runs the same validator.
class Segmentation {
public:
    Segmentation(std::size_t n, std::vector<std::size_t> starts);

    /// One boundary wherever consecutive labels differ.
    template <typename Label>
    static Segmentation from_labels(const std::vector<Label>& labels) {
        std::vector<std::size_t> starts{0};
        for (std::size_t i = 1; i < labels.size(); ++i)
            if (labels[i] != labels[i - 1]) starts.push_back(i);
        return Segmentation(labels.size(), std::move(starts));
    }

    /// Builds from an unordered set of boundary indices; 0 is implied.
    static Segmentation from_boundaries(std::size_t n, std::vector<std::size_t> boundaries);

    static void validate(std::size_t n, const std::vector<std::size_t>& starts);

    std::size_t size() const noexcept { return n_; }
    std::size_t segment_count() const noexcept { return starts_.size(); }
    const std::vector<std::size_t>& starts() const noexcept { return starts_; }

    /// Non-zero starts, i.e. the detectable boundaries.
    std::vector<std::size_t> boundaries() const;

    /// Index of the segment containing frame i.
    std::size_t segment_of(std::size_t i) const;

    /// Half-open frame range [first, last) of segment k.
    std::size_t segment_begin(std::size_t k) const { return starts_.at(k); }
    std::size_t segment_end(std::size_t k) const {
        return k + 1 < starts_.size() ? starts_[k + 1] : n_;
    }

    std::vector<std::size_t> labels() const;

    bool operator==(const Segmentation&) const = default;

private:
    std::size_t n_;
    std::vector<std::size_t> starts_;
};

/// Boundary F-Measure and consistency errors for one pair of segmentations.
struct EvalReport {
    double precision = 0.0;
    double recall = 0.0;
    double fmeasure = 0.0;
    double gce = 0.0;
    double lce = 0.0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
};

}  // namespace egoseg
