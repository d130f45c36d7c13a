#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "egoseg/types.hpp"

namespace egoseg {

enum class StreamFormat { Csv, JsonLines };

/// Picks the format from the file extension (.csv, otherwise JSON-lines).
StreamFormat guess_stream_format(const std::filesystem::path& path);

/// Contextual features: CSV with one numeric row per frame, or JSON-lines with
/// {"id": ..., "vector": [...], "timestamp": optional}. Row order is frame order.
FeatureStream load_feature_stream(const std::filesystem::path& path, StreamFormat format);
FeatureStream parse_feature_stream(std::istream& in, StreamFormat format);
void save_feature_stream(const FeatureStream& stream, const std::filesystem::path& path);

/// JSON-lines, one {"id": ..., "tags": [{"tag": ..., "confidence": ...}]} per frame.
ConceptDetections load_concept_detections(const std::filesystem::path& path);
ConceptDetections parse_concept_detections(std::istream& in);
void save_concept_detections(const ConceptDetections& det, const std::filesystem::path& path);

/// JSON {"n": ..., "starts": [...]}.
Segmentation load_segmentation(const std::filesystem::path& path);
Segmentation parse_segmentation(std::string_view text);
std::string serialize_segmentation(const Segmentation& seg);
void save_segmentation(const Segmentation& seg, const std::filesystem::path& path);

/// Truncates and writes; throws ValidationError if the file cannot be opened.
/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace egoseg
