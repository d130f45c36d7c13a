#include "egoseg/evaluate.hpp"
#include "egoseg/io.hpp"

#include <algorithm>
#include <string>

#include "egoseg/error.hpp"

namespace egoseg {

namespace {

void require_same_length(const Segmentation& a, const Segmentation& b) {
    if (a.size() != b.size())
        throw ValidationError("segmentations cover different frame counts (" + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + ")");
}

std::size_t abs_diff(std::size_t a, std::size_t b) { return a > b ? a - b : b - a; }

// Directed sum over frames of E(a, b, i).
double directed_error_sum(const Segmentation& a, const Segmentation& b) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) total += local_refinement_error(a, b, i);
    return total;
}

}  // namespace

EvalReport f_measure(const Segmentation& pred, const Segmentation& gt, const MatchParams& params) {
    require_same_length(pred, gt);
    const auto p = pred.boundaries();
    const auto g = gt.boundaries();
    std::vector<bool> used(g.size(), false);
    std::size_t first_open = 0;  // GT boundaries before this index are used or out of reach
    std::size_t tp = 0;
    for (auto b : p) {
        while (first_open < g.size() && (used[first_open] || g[first_open] + params.tolerance < b)) ++first_open;
        for (std::size_t k = first_open; k < g.size() && g[k] <= b + params.tolerance; ++k) {
            if (!used[k] && abs_diff(g[k], b) <= params.tolerance) {
                used[k] = true;
                ++tp;
                break;
            }
        }
    }
    EvalReport r;
    r.tp = tp;
    r.fp = p.size() - tp;
    r.fn = g.size() - tp;
    r.precision = p.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(p.size());
    r.recall = g.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(g.size());
    r.fmeasure = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    return r;
}

double local_refinement_error(const Segmentation& a, const Segmentation& b, std::size_t i) {
    require_same_length(a, b);
    if (i >= a.size()) throw ValidationError("frame " + std::to_string(i) + " out of range");
    const auto ka = a.segment_of(i);
    const auto kb = b.segment_of(i);
    const std::size_t a0 = a.segment_begin(ka), a1 = a.segment_end(ka);
    const std::size_t b0 = b.segment_begin(kb), b1 = b.segment_end(kb);
    const std::size_t overlap = std::min(a1, b1) - std::max(a0, b0);
    return static_cast<double>(a1 - a0 - overlap) / static_cast<double>(a1 - a0);
}

double gce(const Segmentation& a, const Segmentation& b) {
    require_same_length(a, b);
    return std::min(directed_error_sum(a, b), directed_error_sum(b, a)) / static_cast<double>(a.size());
}

double lce(const Segmentation& a, const Segmentation& b) {
    require_same_length(a, b);
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        total += std::min(local_refinement_error(a, b, i), local_refinement_error(b, a, i));
    return total / static_cast<double>(a.size());
}

EvalReport evaluate(const Segmentation& pred, const Segmentation& gt, const MatchParams& params) {
    EvalReport r = f_measure(pred, gt, params);
    r.gce = gce(pred, gt);
    r.lce = lce(pred, gt);
    return r;
}

std::pair<Segmentation, Segmentation> trivial_segmentations(std::size_t n) {
    if (n == 0) throw ValidationError("trivial segmentations need at least one frame");
    std::vector<std::size_t> every(n);
    for (std::size_t i = 0; i < n; ++i) every[i] = i;
    return {Segmentation(n, {0}), Segmentation(n, std::move(every))};
}

double average_fmeasure(std::span<const EvalReport> reports) {
    if (reports.empty()) return 0.0;
    double total = 0.0;
    for (const auto& r : reports) total += r.fmeasure;
    return total / static_cast<double>(reports.size());
}

nlohmann::json to_json(const EvalReport& r) {
    return {{"precision", r.precision}, {"recall", r.recall}, {"fmeasure", r.fmeasure}, {"tp", r.tp},
            {"fp", r.fp},               {"fn", r.fn},         {"gce", r.gce},           {"lce", r.lce}};
}

std::string csv_header() { return "precision,recall,fmeasure,tp,fp,fn,gce,lce"; }

std::string csv_row(const EvalReport& r) {
    return format_number(r.precision) + "," + format_number(r.recall) + "," + format_number(r.fmeasure) + "," +
           std::to_string(r.tp) + "," + std::to_string(r.fp) + "," + std::to_string(r.fn) + "," + format_number(r.gce) +
           "," + format_number(r.lce);
}

}  // namespace egoseg
