// egoseg command-line tool: vocabulary building, semantic featurization,
// segmentation, evaluation, grid search and synthetic fixtures.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "egoseg/error.hpp"
#include "egoseg/evaluate.hpp"
#include "egoseg/io.hpp"
#include "egoseg/pipeline.hpp"
#include "egoseg/semantic.hpp"
#include "egoseg/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace egoseg;

namespace {

constexpr int kValidationExit = 2;

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-")
        std::cout << text;
    else
        write_text_file(out, text);
}

struct ConfigFlags {
    std::string config_file;
    std::string linkage;
    double cutoff = 0, delta = 0, omega1 = 0, omega2 = 0, softmax_temp = 0;
    double bandwidth = 0, variance_threshold = 0, blend = 0;
    int p = 0;
    std::size_t min_subwindow = 0, radius = 0, vocab_size = 0;
    std::uint64_t seed = 0;
    bool no_semantic = false;

    std::vector<CLI::Option*> opts;
    CLI::Option *o_linkage{}, *o_cutoff{}, *o_delta{}, *o_p{}, *o_min{}, *o_w1{}, *o_w2{}, *o_radius{}, *o_temp{},
        *o_bw{}, *o_var{}, *o_blend{}, *o_vocab{}, *o_seed{};

    void add(CLI::App& app) {
        app.add_option("--config", config_file, "JSON pipeline config")->check(CLI::ExistingFile);
        o_linkage = app.add_option("--linkage", linkage, "AC linkage (ward, centroid, complete, weighted, single, median, average)");
        o_cutoff = app.add_option("--cutoff", cutoff, "AC dendrogram cutoff");
        o_delta = app.add_option("--delta", delta, "ADWIN confidence delta");
        o_p = app.add_option("--p", p, "ADWIN norm order");
        o_min = app.add_option("--min-subwindow", min_subwindow, "ADWIN minimum sub-window length");
        o_w1 = app.add_option("--omega1", omega1, "graph-cut unary mix weight");
        o_w2 = app.add_option("--omega2", omega2, "graph-cut pairwise weight");
        o_radius = app.add_option("--radius", radius, "graph-cut neighborhood half-width");
        o_temp = app.add_option("--softmax-temp", softmax_temp, "unary softmax temperature");
        o_bw = app.add_option("--bandwidth", bandwidth, "temporal smoothing sigma in frames");
        o_var = app.add_option("--variance-threshold", variance_threshold, "minimum concept std to keep");
        o_blend = app.add_option("--blend", blend, "semantic block weight in [0,1]");
        o_vocab = app.add_option("--vocab-size", vocab_size, "number of concept clusters");
        o_seed = app.add_option("--seed", seed, "clustering seed");
        app.add_flag("--no-semantic", no_semantic, "ignore concept detections");
    }

    PipelineConfig resolve() const {
        PipelineConfig c = config_file.empty() ? PipelineConfig{} : load_pipeline_config(config_file);
        if (*o_linkage) c.agglo.linkage = parse_linkage(linkage);
        if (*o_cutoff) c.agglo.cutoff = cutoff;
        if (*o_delta) c.adwin.delta = delta;
        if (*o_p) c.adwin.p = p;
        if (*o_min) c.adwin.min_subwindow = min_subwindow;
        if (*o_w1) c.gc.omega1 = omega1;
        if (*o_w2) c.gc.omega2 = omega2;
        if (*o_radius) c.gc.radius = radius;
        if (*o_temp) c.gc.softmax_temp = softmax_temp;
        if (*o_bw) c.bandwidth = bandwidth;
        if (*o_var) c.variance_threshold = variance_threshold;
        if (*o_blend) c.blend = blend;
        if (*o_vocab) c.vocab_size = vocab_size;
        if (*o_seed) c.seed = seed;
        if (no_semantic) c.use_semantic = false;
        validate(c);
        return c;
    }
};

struct InputFlags {
    std::string features, format = "auto", detections, similarity;

    void add(CLI::App& app, bool need_features) {
        auto* f = app.add_option("--features", features, "contextual features (.csv or JSON-lines)");
        if (need_features) f->required();
        app.add_option("--format", format, "feature format: auto, csv or jsonl")
            ->check(CLI::IsMember({"auto", "csv", "jsonl"}));
        app.add_option("--detections", detections, "concept detections (JSON-lines)");
        app.add_option("--similarity", similarity, "meaning similarity table (JSON)");
    }

    StreamFormat stream_format() const {
        if (format == "csv") return StreamFormat::Csv;
        if (format == "jsonl") return StreamFormat::JsonLines;
        return guess_stream_format(features);
    }
};

struct LoadedInputs {
    PipelineInputs inputs;
    std::optional<TableSimilarityProvider> table;
};

void load_inputs(const InputFlags& flags, const PipelineConfig& config, LoadedInputs& out) {
    out.inputs.features = load_feature_stream(flags.features, flags.stream_format());
    if (config.use_semantic && !flags.detections.empty())
        out.inputs.detections = load_concept_detections(flags.detections);
    if (!flags.similarity.empty()) {
        out.table = TableSimilarityProvider::load(flags.similarity);
        out.inputs.similarity = &*out.table;
    }
}

std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError("not a number list: '" + csv + "'");
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Event segmentation of egocentric photo streams"};
    app.require_subcommand(1);

    // vocab
    auto* vocab_cmd = app.add_subcommand("vocab", "build the day's concept vocabulary");
    std::string v_det, v_sim, v_out;
    std::size_t v_k = 100;
    std::uint64_t v_seed = 0;
    vocab_cmd->add_option("--detections", v_det, "concept detections (JSON-lines)")->required();
    vocab_cmd->add_option("--similarity", v_sim, "meaning similarity table (JSON)");
    vocab_cmd->add_option("-k,--vocab-size", v_k, "number of concept clusters");
    vocab_cmd->add_option("--seed", v_seed, "clustering seed");
    vocab_cmd->add_option("-o,--output", v_out, "output vocabulary JSON (default stdout)");

    // featurize
    auto* feat_cmd = app.add_subcommand("featurize", "semantic feature matrix from concept detections");
    std::string f_det, f_sim, f_vocab, f_out;
    std::size_t f_k = 100;
    std::uint64_t f_seed = 0;
    double f_bw = 3.0, f_var = 0.05;
    bool f_raw = false;
    feat_cmd->add_option("--detections", f_det, "concept detections (JSON-lines)")->required();
    feat_cmd->add_option("--similarity", f_sim, "meaning similarity table (JSON)");
    feat_cmd->add_option("--vocab", f_vocab, "precomputed vocabulary JSON")->check(CLI::ExistingFile);
    feat_cmd->add_option("-k,--vocab-size", f_k, "number of concept clusters");
    feat_cmd->add_option("--seed", f_seed, "clustering seed");
    feat_cmd->add_option("--bandwidth", f_bw, "temporal smoothing sigma in frames");
    feat_cmd->add_option("--variance-threshold", f_var, "minimum concept std to keep");
    feat_cmd->add_flag("--raw", f_raw, "skip smoothing and pruning");
    feat_cmd->add_option("-o,--output", f_out, "output matrix JSON (default stdout)");

    // segment
    auto* seg_cmd = app.add_subcommand("segment", "run the full segmentation pipeline");
    InputFlags s_in;
    ConfigFlags s_cfg;
    std::string s_out, s_dump;
    s_in.add(*seg_cmd, true);
    s_cfg.add(*seg_cmd);
    seg_cmd->add_option("-o,--output", s_out, "output segmentation JSON (default stdout)");
    seg_cmd->add_option("--dump-intermediates", s_dump, "directory for stage artifacts");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "F-Measure, GCE and LCE between segmentations");
    std::vector<std::string> e_pred, e_gt;
    std::size_t e_tol = 5;
    bool e_csv = false;
    std::string e_out;
    eval_cmd->add_option("--pred", e_pred, "predicted segmentation JSON (repeatable)")->required();
    eval_cmd->add_option("--gt", e_gt, "ground-truth segmentation JSON (repeatable, paired with --pred)")->required();
    eval_cmd->add_option("--tolerance", e_tol, "boundary matching tolerance in frames");
    eval_cmd->add_flag("--csv", e_csv, "CSV rows instead of JSON");
    eval_cmd->add_option("-o,--output", e_out, "output file (default stdout)");

    // gridsearch
    auto* grid_cmd = app.add_subcommand("gridsearch", "rank configurations by F-Measure");
    InputFlags g_in;
    ConfigFlags g_cfg;
    std::string g_gt, g_out, g_linkages, g_cutoffs, g_deltas, g_w1, g_w2;
    std::size_t g_tol = 5;
    unsigned g_threads = 0;
    g_in.add(*grid_cmd, true);
    g_cfg.add(*grid_cmd);
    grid_cmd->add_option("--gt", g_gt, "ground-truth segmentation JSON")->required();
    grid_cmd->add_option("--tolerance", g_tol, "boundary matching tolerance in frames");
    grid_cmd->add_option("--threads", g_threads, "worker threads (0 = all cores)");
    grid_cmd->add_option("--grid-linkage", g_linkages, "comma-separated linkages");
    grid_cmd->add_option("--grid-cutoff", g_cutoffs, "comma-separated cutoffs");
    grid_cmd->add_option("--grid-delta", g_deltas, "comma-separated ADWIN deltas");
    grid_cmd->add_option("--grid-omega1", g_w1, "comma-separated omega1 values");
    grid_cmd->add_option("--grid-omega2", g_w2, "comma-separated omega2 values");
    grid_cmd->add_option("-o,--output", g_out, "output CSV (default stdout)");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic fixture");
    std::string y_spec, y_dir;
    std::size_t y_segments = 5, y_length = 30, y_dim = 32, y_concepts = 4;
    double y_noise = 0.0;
    std::uint64_t y_seed = 1;
    synth_cmd->add_option("--spec", y_spec, "SynthSpec JSON (otherwise a random spec is drawn)")->check(CLI::ExistingFile);
    synth_cmd->add_option("--segments", y_segments, "segments in a random spec");
    synth_cmd->add_option("--length", y_length, "frames per segment in a random spec");
    synth_cmd->add_option("--dim", y_dim, "contextual dimension in a random spec");
    synth_cmd->add_option("--concepts", y_concepts, "concepts per segment in a random spec");
    synth_cmd->add_option("--noise", y_noise, "noise sigma");
    synth_cmd->add_option("--seed", y_seed, "random seed");
    synth_cmd->add_option("--out-dir", y_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidationExit;
    }

    try {
        if (*vocab_cmd) {
            const auto det = load_concept_detections(v_det);
            std::optional<TableSimilarityProvider> table;
            if (!v_sim.empty()) table = TableSimilarityProvider::load(v_sim);
            const IdentitySimilarityProvider identity;
            const SimilarityProvider& prov = table ? static_cast<const SimilarityProvider&>(*table) : identity;
            const auto vocab = cluster_concepts(build_concept_graph(det, prov), v_k, {v_seed});
            emit(vocab.to_json().dump(2) + "\n", v_out);
        } else if (*feat_cmd) {
            const auto det = load_concept_detections(f_det);
            SemanticVocabulary vocab;
            if (!f_vocab.empty()) {
                vocab = load_vocabulary(f_vocab);
            } else {
                std::optional<TableSimilarityProvider> table;
                if (!f_sim.empty()) table = TableSimilarityProvider::load(f_sim);
                const IdentitySimilarityProvider identity;
                const SimilarityProvider& prov = table ? static_cast<const SimilarityProvider&>(*table) : identity;
                vocab = cluster_concepts(build_concept_graph(det, prov), f_k, {f_seed});
            }
            Matrix m = assemble_semantic_features(det, vocab);
            std::vector<std::size_t> kept(static_cast<std::size_t>(m.cols()));
            for (std::size_t j = 0; j < kept.size(); ++j) kept[j] = j;
            if (!f_raw) {
                auto pruned = prune_low_variance(smooth_temporal(m, f_bw), f_var);
                m = std::move(pruned.values);
                kept = std::move(pruned.kept);
            }
            json doc = matrix_to_json(m);
            doc["kept"] = kept;
            doc["concepts"] = json::array();
            for (auto j : kept) doc["concepts"].push_back(vocab.clusters[j].representative);
            emit(doc.dump() + "\n", f_out);
        } else if (*seg_cmd) {
            const auto config = s_cfg.resolve();
            LoadedInputs loaded;
            load_inputs(s_in, config, loaded);
            const auto result = run_pipeline(loaded.inputs, config);
            if (!s_dump.empty()) dump_intermediates(result, s_dump);
            emit(serialize_segmentation(result.segmentation()), s_out);
        } else if (*eval_cmd) {
            if (e_pred.size() != e_gt.size())
                throw ValidationError("--pred and --gt must be given the same number of times");
            std::vector<EvalReport> reports;
            for (std::size_t i = 0; i < e_pred.size(); ++i)
                reports.push_back(evaluate(load_segmentation(e_pred[i]), load_segmentation(e_gt[i]), {e_tol}));
            std::string text;
            if (e_csv) {
                text = "pred,gt," + csv_header() + "\n";
                for (std::size_t i = 0; i < reports.size(); ++i)
                    text += e_pred[i] + "," + e_gt[i] + "," + csv_row(reports[i]) + "\n";
            } else if (reports.size() == 1) {
                text = to_json(reports.front()).dump(2) + "\n";
            } else {
                json doc{{"average_fmeasure", average_fmeasure(reports)}, {"reports", json::array()}};
                for (const auto& r : reports) doc["reports"].push_back(to_json(r));
                text = doc.dump(2) + "\n";
            }
            emit(text, e_out);
        } else if (*grid_cmd) {
            auto config = g_cfg.resolve();
            if (!g_linkages.empty()) {
                config.grid.linkage.clear();
                std::stringstream ss(g_linkages);
                std::string item;
                while (std::getline(ss, item, ',')) config.grid.linkage.push_back(parse_linkage(item));
            }
            if (!g_cutoffs.empty()) config.grid.cutoff = parse_doubles(g_cutoffs);
            if (!g_deltas.empty()) config.grid.delta = parse_doubles(g_deltas);
            if (!g_w1.empty()) config.grid.omega1 = parse_doubles(g_w1);
            if (!g_w2.empty()) config.grid.omega2 = parse_doubles(g_w2);
            validate(config);
            LoadedInputs loaded;
            load_inputs(g_in, config, loaded);
            const auto rows = grid_search(loaded.inputs, load_segmentation(g_gt), config, {g_tol}, g_threads);
            std::string text = grid_csv_header() + "\n";
            for (const auto& row : rows) text += grid_csv_row(row) + "\n";
            emit(text, g_out);
        } else if (*synth_cmd) {
            const SynthSpec spec = y_spec.empty()
                                       ? random_synth_spec(y_segments, y_length, y_dim, y_concepts, y_noise, y_seed)
                                       : load_synth_spec(y_spec);
            const auto data = generate(spec);
            std::error_code ec;
            fs::create_directories(y_dir, ec);
            if (ec) throw ValidationError("cannot create " + y_dir + ": " + ec.message());
            const fs::path dir(y_dir);
            save_feature_stream(data.features, dir / "features.jsonl");
            save_concept_detections(data.detections, dir / "detections.jsonl");
            save_segmentation(data.gt, dir / "gt.json");
            write_text_file(dir / "similarity.json", synth_similarity(spec).to_json().dump() + "\n");
            write_text_file(dir / "spec.json", spec.to_json().dump(2) + "\n");
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidationExit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
