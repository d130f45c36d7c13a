#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "egoseg/adwin.hpp"
#include "egoseg/agglo.hpp"
#include "egoseg/evaluate.hpp"
#include "egoseg/graphcut.hpp"
#include "egoseg/semantic.hpp"
#include "egoseg/types.hpp"

namespace egoseg {

/// Lists of values to sweep. An empty list means "use the base value".
/// Evaluation order is row-major in the declared member order.
struct ParameterGrid {
    std::vector<Linkage> linkage;
    std::vector<double> cutoff;
    std::vector<double> delta;
    std::vector<double> omega1;
    std::vector<double> omega2;
    std::vector<double> softmax_temp;
    std::vector<std::size_t> radius;
    std::vector<double> blend;

    bool empty() const;
};

struct PipelineConfig {
    AggloParams agglo;
    AdwinParams adwin;
    GcParams gc;
    double bandwidth = 3.0;
    double variance_threshold = 0.05;
    double blend = 0.5;
    std::size_t vocab_size = 100;
    std::uint64_t seed = 0;
    bool use_semantic = true;
    ParameterGrid grid;

    nlohmann::json to_json() const;
    static PipelineConfig from_json(const nlohmann::json& doc);
};

void validate(const PipelineConfig& config);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Everything the segmenter consumes. Detections are optional; without them
/// (or with use_semantic = false) segmentation runs on contextual features alone.
struct PipelineInputs {
    FeatureStream features;
    std::optional<ConceptDetections> detections;
    const SimilarityProvider* similarity = nullptr;  // identity provider when null
};

/// Stage outputs up to (and including) the fused representation. They do not
/// depend on the clustering, detector or graph-cut parameters.
struct FeatureArtifacts {
    std::optional<SemanticVocabulary> vocabulary;
    Matrix semantic_raw;
    Matrix semantic_smoothed;
    PrunedMatrix semantic_pruned;
    Matrix contextual_normalized;
    Matrix fused;
};

struct PipelineResult {
    FeatureArtifacts features;
    Segmentation seg_ac;
    Segmentation seg_adw;
    LabelSpace label_space;
    GcResult gc;

    const Segmentation& segmentation() const { return gc.segmentation; }
};

FeatureArtifacts build_features(const PipelineInputs& inputs, const PipelineConfig& config);

/// AC and ADWIN proposals (run concurrently), label space, energy minimization.
PipelineResult segment_features(FeatureArtifacts features, const PipelineConfig& config);

PipelineResult run_pipeline(const PipelineInputs& inputs, const PipelineConfig& config);

/// Writes versioned JSON dumps of every stage into `dir`.
void dump_intermediates(const PipelineResult& result, const std::filesystem::path& dir);

/// Matrix as {"version": 1, "rows": r, "cols": c, "data": [[...], ...]}.
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& doc);

struct GridRow {
    PipelineConfig config;
    EvalReport report;
};

/// The Cartesian product of the grid, expanded in declared order.
std::vector<PipelineConfig> expand_grid(const PipelineConfig& config);

/// Evaluates every grid configuration against gt; rows sorted by F-Measure
/// descending, ties by the configuration's parameter tuple ascending.
/// Throws ValidationError when the grid is empty.
std::vector<GridRow> grid_search(const PipelineInputs& inputs, const Segmentation& gt,
                                 const PipelineConfig& config, const MatchParams& match = {},
                                 unsigned threads = 0);

std::string grid_csv_header();
std::string grid_csv_row(const GridRow& row);

}  // namespace egoseg
