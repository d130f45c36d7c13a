#include "egoseg/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <future>
#include <map>
#include <thread>
#include <tuple>

#include "egoseg/error.hpp"
#include "egoseg/fusion.hpp"
#include "egoseg/io.hpp"

namespace egoseg {

using nlohmann::json;

namespace {

template <typename F>
auto in_stage(const char* name, F&& body) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

template <typename T>
void read_list(const json& grid, const char* key, std::vector<T>& out) {
    if (!grid.contains(key)) return;
    if (!grid[key].is_array()) throw ValidationError(std::string("grid.") + key + " must be a list");
    out = grid[key].get<std::vector<T>>();
}

auto sort_key(const PipelineConfig& c) {
    return std::make_tuple(std::string(to_string(c.agglo.linkage)), c.agglo.cutoff, c.adwin.delta, c.gc.omega1,
                           c.gc.omega2, c.gc.softmax_temp, c.gc.radius, c.blend);
}

json segmentation_json(const Segmentation& seg) {
    return {{"version", 1}, {"n", seg.size()}, {"starts", seg.starts()}};
}

}  // namespace

bool ParameterGrid::empty() const {
    return linkage.empty() && cutoff.empty() && delta.empty() && omega1.empty() && omega2.empty() &&
           softmax_temp.empty() && radius.empty() && blend.empty();
}

json PipelineConfig::to_json() const {
    json doc{{"version", 1},
             {"agglo", {{"linkage", std::string(egoseg::to_string(agglo.linkage))}, {"cutoff", agglo.cutoff}}},
             {"adwin", {{"delta", adwin.delta}, {"p", adwin.p}, {"min_subwindow", adwin.min_subwindow}}},
             {"gc",
              {{"omega1", gc.omega1}, {"omega2", gc.omega2}, {"radius", gc.radius}, {"softmax_temp", gc.softmax_temp}}},
             {"bandwidth", bandwidth},
             {"variance_threshold", variance_threshold},
             {"blend", blend},
             {"vocab_size", vocab_size},
             {"seed", seed},
             {"use_semantic", use_semantic}};
    if (!grid.empty()) {
        json g = json::object();
        if (!grid.linkage.empty()) {
            g["linkage"] = json::array();
            for (auto l : grid.linkage) g["linkage"].push_back(std::string(egoseg::to_string(l)));
        }
        if (!grid.cutoff.empty()) g["cutoff"] = grid.cutoff;
        if (!grid.delta.empty()) g["delta"] = grid.delta;
        if (!grid.omega1.empty()) g["omega1"] = grid.omega1;
        if (!grid.omega2.empty()) g["omega2"] = grid.omega2;
        if (!grid.softmax_temp.empty()) g["softmax_temp"] = grid.softmax_temp;
        if (!grid.radius.empty()) g["radius"] = grid.radius;
        if (!grid.blend.empty()) g["blend"] = grid.blend;
        doc["grid"] = std::move(g);
    }
    return doc;
}

PipelineConfig PipelineConfig::from_json(const json& doc) {
    if (!doc.is_object()) throw ValidationError("config must be a JSON object");
    PipelineConfig c;
    try {
        if (doc.contains("agglo")) {
            const auto& a = doc["agglo"];
            if (a.contains("linkage")) c.agglo.linkage = parse_linkage(a["linkage"].get<std::string>());
            c.agglo.cutoff = a.value("cutoff", c.agglo.cutoff);
        }
        if (doc.contains("adwin")) {
            const auto& a = doc["adwin"];
            c.adwin.delta = a.value("delta", c.adwin.delta);
            c.adwin.p = a.value("p", c.adwin.p);
            c.adwin.min_subwindow = a.value("min_subwindow", c.adwin.min_subwindow);
        }
        if (doc.contains("gc")) {
            const auto& g = doc["gc"];
            c.gc.omega1 = g.value("omega1", c.gc.omega1);
            c.gc.omega2 = g.value("omega2", c.gc.omega2);
            c.gc.radius = g.value("radius", c.gc.radius);
            c.gc.softmax_temp = g.value("softmax_temp", c.gc.softmax_temp);
        }
        c.bandwidth = doc.value("bandwidth", c.bandwidth);
        c.variance_threshold = doc.value("variance_threshold", c.variance_threshold);
        c.blend = doc.value("blend", c.blend);
        c.vocab_size = doc.value("vocab_size", c.vocab_size);
        c.seed = doc.value("seed", c.seed);
        c.use_semantic = doc.value("use_semantic", c.use_semantic);
        if (doc.contains("grid")) {
            const auto& g = doc["grid"];
            if (g.contains("linkage"))
                for (const auto& l : g["linkage"]) c.grid.linkage.push_back(parse_linkage(l.get<std::string>()));
            read_list(g, "cutoff", c.grid.cutoff);
            read_list(g, "delta", c.grid.delta);
            read_list(g, "omega1", c.grid.omega1);
            read_list(g, "omega2", c.grid.omega2);
            read_list(g, "softmax_temp", c.grid.softmax_temp);
            read_list(g, "radius", c.grid.radius);
            read_list(g, "blend", c.grid.blend);
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    validate(c);
    return c;
}

void validate(const PipelineConfig& c) {
    validate(c.agglo);
    validate(c.adwin);
    validate(c.gc);
    if (!(c.bandwidth > 0.0) || !std::isfinite(c.bandwidth)) throw ValidationError("bandwidth must be positive");
    if (!(c.variance_threshold >= 0.0)) throw ValidationError("variance_threshold must be non-negative");
    if (!(c.blend >= 0.0 && c.blend <= 1.0)) throw ValidationError("blend must lie in [0,1]");
    if (c.vocab_size < 1) throw ValidationError("vocab_size must be at least 1");
    for (const auto& expanded : expand_grid(c)) {
        validate(expanded.agglo);
        validate(expanded.adwin);
        validate(expanded.gc);
        if (!(expanded.blend >= 0.0 && expanded.blend <= 1.0)) throw ValidationError("grid blend must lie in [0,1]");
    }
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    try {
        return PipelineConfig::from_json(json::parse(read_text_file(path)));
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

FeatureArtifacts build_features(const PipelineInputs& inputs, const PipelineConfig& config) {
    in_stage("config", [&] { validate(config); return 0; });
    const auto n = inputs.features.size();
    in_stage("features", [&] {
        if (n == 0) throw ValidationError("feature stream is empty");
        validate_stream(inputs.features);
        return 0;
    });

    FeatureArtifacts out;
    out.contextual_normalized = in_stage("contextual", [&] { return signed_root_normalize_rows(inputs.features.contextual); });

    const auto rows = static_cast<Eigen::Index>(n);
    if (config.use_semantic && inputs.detections) {
        const auto& det = *inputs.detections;
        in_stage("detections", [&] {
            if (det.size() != n)
                throw ValidationError("frame-count mismatch: " + std::to_string(n) + " feature rows vs " +
                                      std::to_string(det.size()) + " detection rows");
            validate_detections(det);
            return 0;
        });
        out.vocabulary = in_stage("vocabulary", [&] {
            const IdentitySimilarityProvider identity;
            const SimilarityProvider& prov = inputs.similarity ? *inputs.similarity : identity;
            return cluster_concepts(build_concept_graph(det, prov), config.vocab_size, {config.seed});
        });
        in_stage("semantic", [&] {
            out.semantic_raw = assemble_semantic_features(det, *out.vocabulary);
            out.semantic_smoothed = smooth_temporal(out.semantic_raw, config.bandwidth);
            out.semantic_pruned = prune_low_variance(out.semantic_smoothed, config.variance_threshold);
            return 0;
        });
    } else {
        out.semantic_raw = Matrix(rows, 0);
        out.semantic_smoothed = Matrix(rows, 0);
        out.semantic_pruned.values = Matrix(rows, 0);
    }
    out.fused = in_stage("fusion", [&] { return fuse(out.contextual_normalized, out.semantic_pruned.values, config.blend); });
    return out;
}

PipelineResult segment_features(FeatureArtifacts features, const PipelineConfig& config) {
    in_stage("config", [&] { validate(config); return 0; });
    const Matrix& fused = features.fused;

    auto ac = std::async(std::launch::async,
                         [&] { return in_stage("agglomerative", [&] { return cluster_frames(fused, config.agglo); }); });
    Segmentation seg_adw = in_stage("adwin", [&] { return detect_changes(rescale_to_unit(fused), config.adwin); });
    Segmentation seg_ac = ac.get();

    LabelSpace ls = in_stage("label-space", [&] { return build_label_space(seg_ac, seg_adw, fused); });
    GcResult gc = in_stage("graph-cut", [&] {
        const auto unary = unary_energies(ls, fused, config.gc);
        return minimize(ls, unary, fused, config.gc);
    });
    return {std::move(features), std::move(seg_ac), std::move(seg_adw), std::move(ls), std::move(gc)};
}

PipelineResult run_pipeline(const PipelineInputs& inputs, const PipelineConfig& config) {
    return segment_features(build_features(inputs, config), config);
}

json matrix_to_json(const Matrix& m) {
    json data = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const auto row = m.row(i);
        data.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return {{"version", 1}, {"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const json& doc) {
    try {
        const auto rows = doc.at("rows").get<Eigen::Index>();
        const auto cols = doc.at("cols").get<Eigen::Index>();
        const auto& data = doc.at("data");
        if (static_cast<Eigen::Index>(data.size()) != rows) throw ValidationError("matrix: row count mismatch");
        Matrix m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            const auto row = data[static_cast<std::size_t>(i)].get<std::vector<double>>();
            if (static_cast<Eigen::Index>(row.size()) != cols) throw ValidationError("matrix: column count mismatch");
            for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
        }
        return m;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("matrix: ") + e.what());
    }
}

void dump_intermediates(const PipelineResult& r, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create " + dir.string() + ": " + ec.message());
    auto put = [&](const char* name, const json& doc) { write_text_file(dir / name, doc.dump() + "\n"); };

    json manifest{{"version", 1}, {"stages", json::array()}};
    if (r.features.vocabulary) {
        put("vocabulary.json", r.features.vocabulary->to_json());
        manifest["stages"].push_back("vocabulary.json");
    }
    put("semantic_raw.json", matrix_to_json(r.features.semantic_raw));
    put("semantic_smoothed.json", matrix_to_json(r.features.semantic_smoothed));
    json pruned = matrix_to_json(r.features.semantic_pruned.values);
    pruned["kept"] = r.features.semantic_pruned.kept;
    put("semantic_pruned.json", pruned);
    put("fused.json", matrix_to_json(r.features.fused));
    put("seg_ac.json", segmentation_json(r.seg_ac));
    put("seg_adw.json", segmentation_json(r.seg_adw));
    put("atoms.json", segmentation_json(r.label_space.atoms));
    put("segmentation.json", segmentation_json(r.gc.segmentation));
    put("graphcut.json", {{"version", 1}, {"energy", r.gc.energy}, {"labels", r.gc.labels}});
    for (const char* name : {"semantic_raw.json", "semantic_smoothed.json", "semantic_pruned.json", "fused.json",
                             "seg_ac.json", "seg_adw.json", "atoms.json", "segmentation.json", "graphcut.json"})
        manifest["stages"].push_back(name);
    put("manifest.json", manifest);
}

std::vector<PipelineConfig> expand_grid(const PipelineConfig& base) {
    const auto& g = base.grid;
    auto or_base = [](const auto& list, auto value) {
        using T = std::decay_t<decltype(value)>;
        return list.empty() ? std::vector<T>{value} : std::vector<T>(list.begin(), list.end());
    };
    const auto linkages = or_base(g.linkage, base.agglo.linkage);
    const auto cutoffs = or_base(g.cutoff, base.agglo.cutoff);
    const auto deltas = or_base(g.delta, base.adwin.delta);
    const auto omega1s = or_base(g.omega1, base.gc.omega1);
    const auto omega2s = or_base(g.omega2, base.gc.omega2);
    const auto temps = or_base(g.softmax_temp, base.gc.softmax_temp);
    const auto radii = or_base(g.radius, base.gc.radius);
    const auto blends = or_base(g.blend, base.blend);

    std::vector<PipelineConfig> out;
    for (auto linkage : linkages)
        for (auto cutoff : cutoffs)
            for (auto delta : deltas)
                for (auto w1 : omega1s)
                    for (auto w2 : omega2s)
                        for (auto temp : temps)
                            for (auto radius : radii)
                                for (auto blend : blends) {
                                    PipelineConfig c = base;
                                    c.grid = {};
                                    c.agglo.linkage = linkage;
                                    c.agglo.cutoff = cutoff;
                                    c.adwin.delta = delta;
                                    c.gc.omega1 = w1;
                                    c.gc.omega2 = w2;
                                    c.gc.softmax_temp = temp;
                                    c.gc.radius = radius;
                                    c.blend = blend;
                                    out.push_back(std::move(c));
                                }
    return out;
}

std::vector<GridRow> grid_search(const PipelineInputs& inputs, const Segmentation& gt, const PipelineConfig& config,
                                 const MatchParams& match, unsigned threads) {
    if (config.grid.empty()) throw ValidationError("empty grid: no parameter lists to search");
    in_stage("config", [&] { validate(config); return 0; });
    if (gt.size() != inputs.features.size())
        throw StageError("ground-truth", "ground truth covers " + std::to_string(gt.size()) + " frames, stream has " +
                                             std::to_string(inputs.features.size()));
    const auto configs = expand_grid(config);

    // Fusion is the only feature stage that depends on a grid parameter.
    PipelineConfig feature_config = configs.front();
    const FeatureArtifacts base = build_features(inputs, feature_config);
    std::map<double, Matrix> fused_by_blend;
    for (const auto& c : configs)
        if (!fused_by_blend.contains(c.blend))
            fused_by_blend.emplace(c.blend, fuse(base.contextual_normalized, base.semantic_pruned.values, c.blend));

    std::vector<GridRow> rows(configs.size(), GridRow{{}, {}});
    std::vector<std::exception_ptr> errors(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                FeatureArtifacts f;
                f.fused = fused_by_blend.at(configs[i].blend);
                const auto result = segment_features(std::move(f), configs[i]);
                rows[i] = {configs[i], evaluate(result.segmentation(), gt, match)};
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, configs.size()));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::stable_sort(rows.begin(), rows.end(), [](const GridRow& a, const GridRow& b) {
        if (a.report.fmeasure != b.report.fmeasure) return a.report.fmeasure > b.report.fmeasure;
        return sort_key(a.config) < sort_key(b.config);
    });
    return rows;
}

std::string grid_csv_header() {
    return "linkage,cutoff,delta,omega1,omega2,softmax_temp,radius,blend," + csv_header();
}

std::string grid_csv_row(const GridRow& row) {
    const auto& c = row.config;
    std::string out(to_string(c.agglo.linkage));
    for (double v : {c.agglo.cutoff, c.adwin.delta, c.gc.omega1, c.gc.omega2, c.gc.softmax_temp})
        out += "," + format_number(v);
    out += "," + std::to_string(c.gc.radius) + "," + format_number(c.blend) + ",";
    return out + csv_row(row.report);
}

}  // namespace egoseg
