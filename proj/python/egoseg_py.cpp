// Python bindings for the egoseg core.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "egoseg/adwin.hpp"
#include "egoseg/agglo.hpp"
#include "egoseg/error.hpp"
#include "egoseg/evaluate.hpp"
#include "egoseg/fusion.hpp"
#include "egoseg/graphcut.hpp"
#include "egoseg/io.hpp"
#include "egoseg/pipeline.hpp"
#include "egoseg/semantic.hpp"
#include "egoseg/synth.hpp"

namespace py = pybind11;
using namespace egoseg;
using nlohmann::json;

namespace {

using TagList = std::vector<std::vector<std::pair<std::string, double>>>;

ConceptDetections to_detections(const TagList& frames) {
    ConceptDetections det;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        FrameTags ft{"frame_" + std::to_string(i), {}};
        for (const auto& [tag, conf] : frames[i]) ft.tags.push_back({tag, conf});
        det.frames.push_back(std::move(ft));
    }
    validate_detections(det);
    return det;
}

TagList from_detections(const ConceptDetections& det) {
    TagList out;
    for (const auto& f : det.frames) {
        auto& row = out.emplace_back();
        for (const auto& tc : f.tags) row.emplace_back(tc.tag, tc.confidence);
    }
    return out;
}

FeatureStream to_stream(const Matrix& features) {
    FeatureStream fs;
    fs.contextual = features;
    for (std::size_t i = 0; i < static_cast<std::size_t>(features.rows()); ++i) fs.frames.push_back({i, std::nullopt, ""});
    return fs;
}

py::dict report_dict(const EvalReport& r) {
    py::dict d;
    d["precision"] = r.precision;
    d["recall"] = r.recall;
    d["fmeasure"] = r.fmeasure;
    d["tp"] = r.tp;
    d["fp"] = r.fp;
    d["fn"] = r.fn;
    d["gce"] = r.gce;
    d["lce"] = r.lce;
    return d;
}

py::dict run(const Matrix& features, const std::optional<TagList>& detections,
             const std::optional<std::string>& similarity_json, const std::string& config_json) {
    PipelineConfig config = config_json.empty() ? PipelineConfig{} : PipelineConfig::from_json(json::parse(config_json));
    std::optional<TableSimilarityProvider> table;
    if (similarity_json) table = TableSimilarityProvider::from_json(json::parse(*similarity_json));
    PipelineInputs inputs{to_stream(features), std::nullopt, table ? &*table : nullptr};
    if (detections) inputs.detections = to_detections(*detections);

    PipelineResult r = [&] {
        py::gil_scoped_release release;
        return run_pipeline(inputs, config);
    }();
    py::dict d;
    d["segmentation"] = r.segmentation();
    d["seg_ac"] = r.seg_ac;
    d["seg_adw"] = r.seg_adw;
    d["atoms"] = r.label_space.atoms;
    d["labels"] = r.gc.labels;
    d["energy"] = r.gc.energy;
    d["fused"] = r.features.fused;
    d["semantic"] = r.features.semantic_pruned.values;
    d["kept_concepts"] = r.features.semantic_pruned.kept;
    if (r.features.vocabulary) d["vocabulary"] = r.features.vocabulary->to_json().dump();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Temporal segmentation of egocentric photo streams";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

    py::class_<Segmentation>(m, "Segmentation")
        .def(py::init<std::size_t, std::vector<std::size_t>>(), py::arg("n"), py::arg("starts"))
        .def_static("from_labels", &Segmentation::from_labels<long long>, py::arg("labels"))
        .def_static("from_boundaries", &Segmentation::from_boundaries, py::arg("n"), py::arg("boundaries"))
        .def_property_readonly("n", &Segmentation::size)
        .def_property_readonly("starts", &Segmentation::starts)
        .def_property_readonly("boundaries", &Segmentation::boundaries)
        .def_property_readonly("segment_count", &Segmentation::segment_count)
        .def("labels", &Segmentation::labels)
        .def("segment_of", &Segmentation::segment_of, py::arg("frame"))
        .def("to_json", &serialize_segmentation)
        .def_static("from_json", &parse_segmentation, py::arg("text"))
        .def("__len__", &Segmentation::size)
        .def("__eq__", [](const Segmentation& a, const Segmentation& b) { return a == b; })
        .def("__repr__", [](const Segmentation& s) {
            std::string out = "Segmentation(n=" + std::to_string(s.size()) + ", starts=[";
            for (std::size_t k = 0; k < s.starts().size(); ++k) out += (k ? ", " : "") + std::to_string(s.starts()[k]);
            return out + "])";
        });

    m.def("trivial_segmentations", &trivial_segmentations, py::arg("n"));
    m.def(
        "f_measure",
        [](const Segmentation& pred, const Segmentation& gt, std::size_t tol) {
            return report_dict(f_measure(pred, gt, {tol}));
        },
        py::arg("pred"), py::arg("gt"), py::arg("tolerance") = 5);
    m.def(
        "evaluate",
        [](const Segmentation& pred, const Segmentation& gt, std::size_t tol) {
            return report_dict(evaluate(pred, gt, {tol}));
        },
        py::arg("pred"), py::arg("gt"), py::arg("tolerance") = 5);
    m.def("gce", &gce, py::arg("a"), py::arg("b"));
    m.def("lce", &lce, py::arg("a"), py::arg("b"));
    m.def("local_refinement_error", &local_refinement_error, py::arg("a"), py::arg("b"), py::arg("frame"));

    m.def(
        "signed_root_normalize", [](const std::vector<double>& v) { return signed_root_normalize(v); }, py::arg("v"));
    m.def("signed_root_normalize_rows", &signed_root_normalize_rows, py::arg("m"));
    m.def("fuse", &fuse, py::arg("contextual"), py::arg("semantic"), py::arg("blend"));

    m.def(
        "cut_threshold", &cut_threshold, py::arg("k"), py::arg("p"), py::arg("m"), py::arg("delta_prime"));
    m.def(
        "detect_changes",
        [](const Matrix& stream, double delta, int p, std::size_t min_subwindow) {
            return detect_changes(stream, {delta, p, min_subwindow});
        },
        py::arg("stream"), py::arg("delta") = 0.1, py::arg("p") = 2, py::arg("min_subwindow") = 1);
    m.def("rescale_to_unit", &rescale_to_unit, py::arg("stream"));

    m.attr("LINKAGES") = [] {
        std::vector<std::string> names;
        for (auto l : kAllLinkages) names.emplace_back(to_string(l));
        return names;
    }();
    m.def(
        "cosine_distance",
        [](const std::vector<double>& a, const std::vector<double>& b) { return cosine_distance(a, b); }, py::arg("a"),
        py::arg("b"));
    m.def(
        "agglomerate",
        [](const Matrix& dist, const std::string& linkage) {
            std::vector<std::tuple<std::size_t, std::size_t, double, std::size_t>> out;
            for (const auto& mg : agglomerate(dist, parse_linkage(linkage)))
                out.emplace_back(mg.first, mg.second, mg.distance, mg.size);
            return out;
        },
        py::arg("dist"), py::arg("linkage") = "average");
    m.def(
        "cluster_frames",
        [](const Matrix& stream, const std::string& linkage, double cutoff) {
            return cluster_frames(stream, {parse_linkage(linkage), cutoff});
        },
        py::arg("stream"), py::arg("linkage") = "average", py::arg("cutoff") = 0.4);

    m.def("pairwise_energy",
          [](const std::vector<double>& a, const std::vector<double>& b) { return pairwise_energy(a, b); },
          py::arg("a"), py::arg("b"));

    m.def("smooth_temporal", &smooth_temporal, py::arg("m"), py::arg("bandwidth"));
    m.def(
        "prune_low_variance",
        [](const Matrix& mat, double threshold) {
            auto p = prune_low_variance(mat, threshold);
            return py::make_tuple(p.values, p.kept);
        },
        py::arg("m"), py::arg("threshold"));

    m.def(
        "synth",
        [](std::size_t segments, std::size_t length, std::size_t dim, std::size_t concepts, double noise,
           std::uint64_t seed) {
            const auto spec = random_synth_spec(segments, length, dim, concepts, noise, seed);
            const auto data = generate(spec);
            py::dict d;
            d["features"] = data.features.contextual;
            d["detections"] = from_detections(data.detections);
            d["gt"] = data.gt;
            d["similarity"] = synth_similarity(spec).to_json().dump();
            d["spec"] = spec.to_json().dump();
            return d;
        },
        py::arg("segments") = 5, py::arg("length") = 30, py::arg("dim") = 32, py::arg("concepts") = 4,
        py::arg("noise") = 0.0, py::arg("seed") = 1);

    m.def("_run_pipeline", &run, py::arg("features"), py::arg("detections"), py::arg("similarity_json"),
          py::arg("config_json"));
    m.def("_default_config", [] { return PipelineConfig{}.to_json().dump(); });
}
