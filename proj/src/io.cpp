#include "egoseg/io.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "egoseg/error.hpp"

namespace egoseg {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    const std::string t = trim(cell);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
        throw ValidationError("row " + std::to_string(row + 1) + ", column " + std::to_string(col + 1) +
                              ": non-numeric cell '" + t + "'");
    return v;
}

json parse_json_line(const std::string& line, std::size_t lineno) {
    try {
        return json::parse(line);
    } catch (const json::exception& e) {
        throw ValidationError("line " + std::to_string(lineno) + ": " + e.what());
    }
}

Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows) {
    const std::size_t d = rows.empty() ? 0 : rows.front().size();
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < d; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

void check_dimension(std::size_t expected, std::size_t got, std::size_t row) {
    if (expected != got)
        throw ValidationError("dimension mismatch: row " + std::to_string(row + 1) + " has " +
                              std::to_string(got) + " values, expected " + std::to_string(expected));
}

}  // namespace

StreamFormat guess_stream_format(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? StreamFormat::Csv : StreamFormat::JsonLines;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << text;
}

FeatureStream parse_feature_stream(std::istream& in, StreamFormat format) {
    FeatureStream stream;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const std::size_t row = rows.size();
        Frame frame;
        frame.index = row;
        std::vector<double> values;
        if (format == StreamFormat::Csv) {
            std::stringstream cells(line);
            std::string cell;
            while (std::getline(cells, cell, ',')) values.push_back(parse_cell(cell, row, values.size()));
            if (!line.empty() && trim(line).back() == ',') parse_cell("", row, values.size());
            frame.id = std::to_string(row);
        } else {
            const json obj = parse_json_line(line, lineno);
            if (!obj.is_object() || !obj.contains("vector") || !obj["vector"].is_array())
                throw ValidationError("line " + std::to_string(lineno) + ": expected an object with a \"vector\" array");
            for (const auto& x : obj["vector"]) {
                if (!x.is_number())
                    throw ValidationError("row " + std::to_string(row + 1) + ": non-numeric vector entry");
                values.push_back(x.get<double>());
            }
            frame.id = obj.contains("id") ? (obj["id"].is_string() ? obj["id"].get<std::string>() : obj["id"].dump())
                                          : std::to_string(row);
            if (obj.contains("timestamp") && !obj["timestamp"].is_null()) {
                if (!obj["timestamp"].is_number())
                    throw ValidationError("row " + std::to_string(row + 1) + ": timestamp must be numeric");
                frame.timestamp = obj["timestamp"].get<double>();
            }
        }
        if (!rows.empty()) check_dimension(rows.front().size(), values.size(), row);
        rows.push_back(std::move(values));
        stream.frames.push_back(std::move(frame));
    }
    if (rows.empty()) throw ValidationError("empty input: no feature rows");
    stream.contextual = rows_to_matrix(rows);
    validate_stream(stream);
    return stream;
}

FeatureStream load_feature_stream(const std::filesystem::path& path, StreamFormat format) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    return parse_feature_stream(in, format);
}

void save_feature_stream(const FeatureStream& stream, const std::filesystem::path& path) {
    std::string out;
    for (std::size_t i = 0; i < stream.size(); ++i) {
        json obj;
        obj["id"] = stream.frames[i].id;
        if (stream.frames[i].timestamp) obj["timestamp"] = *stream.frames[i].timestamp;
        const auto row = stream.contextual.row(static_cast<Eigen::Index>(i));
        obj["vector"] = std::vector<double>(row.begin(), row.end());
        out += obj.dump();
        out += '\n';
    }
    write_text_file(path, out);
}

ConceptDetections parse_concept_detections(std::istream& in) {
    ConceptDetections det;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const json obj = parse_json_line(line, lineno);
        if (!obj.is_object() || !obj.contains("tags") || !obj["tags"].is_array())
            throw ValidationError("line " + std::to_string(lineno) + ": expected an object with a \"tags\" array");
        FrameTags frame;
        frame.id = obj.contains("id") ? (obj["id"].is_string() ? obj["id"].get<std::string>() : obj["id"].dump())
                                      : std::to_string(det.frames.size());
        for (const auto& t : obj["tags"]) {
            if (!t.is_object() || !t.contains("tag") || !t["tag"].is_string() || !t.contains("confidence") ||
                !t["confidence"].is_number())
                throw ValidationError("line " + std::to_string(lineno) + ": malformed tag entry " + t.dump());
            frame.tags.push_back({t["tag"].get<std::string>(), t["confidence"].get<double>()});
        }
        det.frames.push_back(std::move(frame));
    }
    validate_detections(det);
    return det;
}

ConceptDetections load_concept_detections(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    return parse_concept_detections(in);
}

void save_concept_detections(const ConceptDetections& det, const std::filesystem::path& path) {
    std::string out;
    for (const auto& frame : det.frames) {
        json tags = json::array();
        for (const auto& tc : frame.tags) tags.push_back({{"tag", tc.tag}, {"confidence", tc.confidence}});
        out += json{{"id", frame.id}, {"tags", std::move(tags)}}.dump();
        out += '\n';
    }
    write_text_file(path, out);
}

Segmentation parse_segmentation(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("segmentation: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("n") || !doc.contains("starts") || !doc["starts"].is_array())
        throw ValidationError("segmentation: expected {\"n\": ..., \"starts\": [...]}");
    if (!doc["n"].is_number_unsigned()) throw ValidationError("segmentation: n must be a non-negative integer");
    std::vector<std::size_t> starts;
    for (const auto& s : doc["starts"]) {
        if (!s.is_number_unsigned()) throw ValidationError("segmentation: starts must be non-negative integers");
        starts.push_back(s.get<std::size_t>());
    }
    return Segmentation(doc["n"].get<std::size_t>(), std::move(starts));
}

std::string serialize_segmentation(const Segmentation& seg) {
    return json{{"n", seg.size()}, {"starts", seg.starts()}}.dump() + "\n";
}

Segmentation load_segmentation(const std::filesystem::path& path) {
    return parse_segmentation(read_text_file(path));
}

void save_segmentation(const Segmentation& seg, const std::filesystem::path& path) {
    write_text_file(path, serialize_segmentation(seg));
}

std::string format_number(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return {buf, res.ptr};
}

}  // namespace egoseg
