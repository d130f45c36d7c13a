#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "egoseg/types.hpp"

namespace egoseg {

/// Source of word meanings and meaning-level similarity in [0,1].
class SimilarityProvider {
public:
    virtual ~SimilarityProvider() = default;

    /// Meaning identifiers of a tag; empty when the tag is unknown.
    virtual std::vector<std::string> meanings(const std::string& tag) const = 0;

    /// Symmetric, with similarity(m, m) == 1.
    virtual double similarity(const std::string& meaning_a, const std::string& meaning_b) const = 0;
};

/// Table-backed provider. File format:
///   {"meanings": {tag: [meaning, ...]}, "sims": [[meaning, meaning, value], ...]}
/// Pairs absent from "sims" have similarity 0.
class TableSimilarityProvider : public SimilarityProvider {
public:
    TableSimilarityProvider() = default;

    static TableSimilarityProvider from_json(const nlohmann::json& doc);
    static TableSimilarityProvider load(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    void add_tag(const std::string& tag, std::vector<std::string> meanings);
    void set_similarity(const std::string& a, const std::string& b, double value);

    std::vector<std::string> meanings(const std::string& tag) const override;
    double similarity(const std::string& a, const std::string& b) const override;

private:
    static std::pair<std::string, std::string> key(const std::string& a, const std::string& b);

    std::map<std::string, std::vector<std::string>> meanings_;
    std::map<std::pair<std::string, std::string>, double> sims_;
};

/// Every tag is its own single meaning and unrelated to every other tag.
class IdentitySimilarityProvider : public SimilarityProvider {
public:
    std::vector<std::string> meanings(const std::string& tag) const override { return {tag}; }
    double similarity(const std::string& a, const std::string& b) const override {
        return a == b ? 1.0 : 0.0;
    }
};

/// Complete weighted graph over the unique tags of one day.
struct ConceptGraph {
    std::vector<std::string> tags;  // sorted
    Matrix weights;                 // symmetric, zero diagonal

    std::size_t size() const { return tags.size(); }
};

struct ConceptCluster {
    std::string representative;
    std::vector<std::string> members;  // sorted

    bool operator==(const ConceptCluster&) const = default;
};

struct SemanticVocabulary {
    std::vector<ConceptCluster> clusters;
    std::unordered_map<std::string, std::size_t> tag_to_cluster;

    std::size_t size() const { return clusters.size(); }

    static SemanticVocabulary from_clusters(std::vector<ConceptCluster> clusters);
    nlohmann::json to_json() const;
    static SemanticVocabulary from_json(const nlohmann::json& doc);
};

void save_vocabulary(const SemanticVocabulary& vocab, const std::filesystem::path& path);
SemanticVocabulary load_vocabulary(const std::filesystem::path& path);

/// w_ij is the maximum similarity over all meaning pairs of tags i and j.
/// Throws UnknownTagError for a tag without meanings.
ConceptGraph build_concept_graph(const ConceptDetections& det, const SimilarityProvider& prov);

struct SpectralOptions {
    std::uint64_t seed = 0;
    int restarts = 10;
    int max_iterations = 300;
};

/// Normalized-Laplacian spectral clustering of the concept graph into at most
/// min(k, |V|) clusters. Representatives maximize the within-cluster
/// similarity sum, ties broken by tag order.
SemanticVocabulary cluster_concepts(const ConceptGraph& graph, std::size_t k,
                                    const SpectralOptions& options = {});

/// Member of `members` (indices into graph.tags) with the largest similarity sum.
std::size_t pick_representative(const ConceptGraph& graph, const std::vector<std::size_t>& members);

/// Per-frame cluster confidence sums, divided by the global maximum entry.
Matrix assemble_semantic_features(const ConceptDetections& det, const SemanticVocabulary& vocab);

/// Column-wise Gaussian (Parzen) smoothing along time with sigma = bandwidth
/// frames, truncated at +-3 sigma and renormalized at every position.
Matrix smooth_temporal(const Matrix& m, double bandwidth);

struct PrunedMatrix {
    Matrix values;
    std::vector<std::size_t> kept;  // surviving column indices, ascending
};

/// Drops columns whose population standard deviation is below threshold.
PrunedMatrix prune_low_variance(const Matrix& m, double threshold);

}  // namespace egoseg
