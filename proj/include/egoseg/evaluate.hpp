#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>

#include <json.hpp>

#include "egoseg/types.hpp"

namespace egoseg {

struct MatchParams {
    std::size_t tolerance = 5;
};

/// Boundary precision/recall/F-Measure. Boundaries are the non-zero segment
/// starts. Predictions are visited in increasing order and each one takes the
/// earliest unmatched ground-truth boundary within the tolerance.
/// Only the FM fields of the report are filled.
EvalReport f_measure(const Segmentation& pred, const Segmentation& gt, const MatchParams& params = {});

/// |R_A(i) \ R_B(i)| / |R_A(i)| where R_X(i) is the segment of X containing frame i.
double local_refinement_error(const Segmentation& a, const Segmentation& b, std::size_t i);

double gce(const Segmentation& a, const Segmentation& b);
double lce(const Segmentation& a, const Segmentation& b);

/// f_measure plus gce/lce.
EvalReport evaluate(const Segmentation& pred, const Segmentation& gt, const MatchParams& params = {});

/// All frames in one segment, and one frame per segment.
std::pair<Segmentation, Segmentation> trivial_segmentations(std::size_t n);

/// Unweighted mean of the per-sequence F-Measures.
double average_fmeasure(std::span<const EvalReport> reports);

nlohmann::json to_json(const EvalReport& report);
std::string csv_header();
std::string csv_row(const EvalReport& report);

}  // namespace egoseg
