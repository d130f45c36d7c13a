#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "egoseg/semantic.hpp"
#include "egoseg/types.hpp"

namespace egoseg {

struct SynthSegment {
    std::size_t length = 0;
    std::vector<double> mean;
    std::vector<std::pair<std::string, double>> concepts;  // (tag, base confidence)
};

struct SynthSpec {
    std::size_t n = 0;
    std::vector<SynthSegment> segments;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
    static SynthSpec from_json(const nlohmann::json& doc);
};

void validate(const SynthSpec& spec);
SynthSpec load_synth_spec(const std::filesystem::path& path);

struct SynthData {
    FeatureStream features;
    ConceptDetections detections;
    Segmentation gt;
};

/// Contextual rows are segment means plus seeded Gaussian noise; each frame
/// detects its segment's concepts with base confidence plus noise, clamped.
SynthData generate(const SynthSpec& spec);

/// Random fixture with `segments` blocks of `length` frames. Means are drawn
/// from a non-negative distribution of dimension `dim`; each segment owns
/// `concepts_per_segment` tags of its own.
SynthSpec random_synth_spec(std::size_t segments, std::size_t length, std::size_t dim,
                            std::size_t concepts_per_segment, double noise_sigma,
                            std::uint64_t seed);

/// Similarity table for a spec's tags: one meaning per tag, 0.8 between tags
/// of the same segment.
TableSimilarityProvider synth_similarity(const SynthSpec& spec);

}  // namespace egoseg
