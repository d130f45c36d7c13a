#include <doctest.h>

#include <filesystem>

#include "egoseg/error.hpp"
#include "egoseg/evaluate.hpp"
#include "egoseg/io.hpp"
#include "egoseg/pipeline.hpp"
#include "egoseg/synth.hpp"

using namespace egoseg;

namespace {

struct Fixture {
    SynthSpec spec;
    SynthData data;
    TableSimilarityProvider sim;

    PipelineInputs inputs() const { return {data.features, data.detections, &sim}; }
};

Fixture make_fixture(double noise, std::uint64_t seed) {
    auto spec = random_synth_spec(5, 30, 32, 4, noise, seed);
    auto data = generate(spec);
    auto sim = synth_similarity(spec);
    return {std::move(spec), std::move(data), std::move(sim)};
}

}  // namespace

TEST_CASE("zero-noise fixture is recovered exactly") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto fx = make_fixture(0.0, seed);
        const auto r = run_pipeline(fx.inputs(), {});
        CHECK(r.seg_ac == fx.data.gt);
        CHECK(r.seg_adw == fx.data.gt);
        CHECK(r.segmentation() == fx.data.gt);
        CHECK(f_measure(r.segmentation(), fx.data.gt).fmeasure == 1.0);
    }
}

TEST_CASE("contextual-only path") {
    const auto fx = make_fixture(0.0, 4);
    PipelineInputs in{fx.data.features, std::nullopt, nullptr};
    const auto r = run_pipeline(in, {});
    CHECK_FALSE(r.features.vocabulary.has_value());
    CHECK(r.features.fused.cols() == fx.data.features.contextual.cols());
    CHECK(r.segmentation() == fx.data.gt);

    PipelineConfig off;
    off.use_semantic = false;
    const auto r2 = run_pipeline(fx.inputs(), off);
    CHECK(r2.features.fused.cols() == fx.data.features.contextual.cols());
}

TEST_CASE("frame-count mismatch names the stage") {
    auto fx = make_fixture(0.0, 5);
    fx.data.detections.frames.pop_back();
    try {
        (void)run_pipeline(fx.inputs(), {});
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(e.stage() == "detections");
    }
}

TEST_CASE("pipeline is deterministic") {
    const auto fx = make_fixture(0.5, 6);
    const auto a = run_pipeline(fx.inputs(), {});
    const auto b = run_pipeline(fx.inputs(), {});
    CHECK(a.segmentation() == b.segmentation());
    CHECK(a.gc.energy == b.gc.energy);
    CHECK(a.features.fused == b.features.fused);
}

TEST_CASE("config json round trip") {
    PipelineConfig c;
    c.agglo = {Linkage::Ward, 0.8};
    c.gc.omega2 = 0.3;
    c.grid.cutoff = {0.2, 0.4};
    c.grid.linkage = {Linkage::Single};
    const auto back = PipelineConfig::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());
    auto bad = c.to_json();
    bad["gc"]["omega1"] = 2.0;
    CHECK_THROWS_AS(validate(PipelineConfig::from_json(bad)), ValidationError);
}

TEST_CASE("grid expansion order") {
    PipelineConfig c;
    c.grid.cutoff = {0.2, 0.4};
    c.grid.omega2 = {0.0, 0.5, 1.0};
    const auto all = expand_grid(c);
    REQUIRE(all.size() == 6);
    CHECK(all[0].agglo.cutoff == 0.2);
    CHECK(all[0].gc.omega2 == 0.0);
    CHECK(all[1].gc.omega2 == 0.5);
    CHECK(all[3].agglo.cutoff == 0.4);
}

TEST_CASE("grid search") {
    const auto fx = make_fixture(0.0, 7);
    SUBCASE("empty grid is an error") {
        CHECK_THROWS_AS(grid_search(fx.inputs(), fx.data.gt, {}), ValidationError);
    }
    SUBCASE("single row equals a direct run") {
        PipelineConfig c;
        c.grid.cutoff = {0.6};
        const auto rows = grid_search(fx.inputs(), fx.data.gt, c);
        REQUIRE(rows.size() == 1);
        auto direct_cfg = c;
        direct_cfg.agglo.cutoff = 0.6;
        direct_cfg.grid = {};
        const auto direct = evaluate(run_pipeline(fx.inputs(), direct_cfg).segmentation(), fx.data.gt);
        CHECK(rows[0].report.fmeasure == direct.fmeasure);
        CHECK(rows[0].report.gce == direct.gce);
    }
    SUBCASE("the matching config ranks first") {
        PipelineConfig c;
        c.gc.omega1 = 0.0;  // unaries from AC alone
        c.gc.omega2 = 0.0;
        c.grid.cutoff = {2.0, 0.4};  // 2.0 merges everything into one segment
        const auto rows = grid_search(fx.inputs(), fx.data.gt, c, {}, 2);
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].config.agglo.cutoff == 0.4);
        CHECK(rows[0].report.fmeasure == 1.0);
        CHECK(rows[1].report.fmeasure < 1.0);
    }
    SUBCASE("every row equals an independent run") {
        const auto noisy = make_fixture(0.6, 8);
        PipelineConfig c;
        c.grid.cutoff = {0.4, 0.8};
        c.grid.omega2 = {0.0, 1.0};
        const auto rows = grid_search(noisy.inputs(), noisy.data.gt, c, {}, 3);
        REQUIRE(rows.size() == 4);
        for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i - 1].report.fmeasure >= rows[i].report.fmeasure);
        for (const auto& row : rows) {
            auto cfg = row.config;
            cfg.grid = {};
            CHECK(f_measure(run_pipeline(noisy.inputs(), cfg).segmentation(), noisy.data.gt).fmeasure ==
                  row.report.fmeasure);
        }
    }
}

TEST_CASE("pairwise smoothing removes a spurious boundary") {
    // one frame in the middle of segment 1 carries the mean of segment 3
    auto fx = make_fixture(0.0, 9);
    const auto& m3 = fx.spec.segments[3].mean;
    for (std::size_t j = 0; j < m3.size(); ++j) fx.data.features.contextual(45, static_cast<Eigen::Index>(j)) = m3[j];

    PipelineConfig c;
    c.use_semantic = false;
    c.gc.softmax_temp = 1.0;
    c.grid.omega2 = {0.0, 0.5};
    const auto rows = grid_search({fx.data.features, std::nullopt, nullptr}, fx.data.gt, c);
    REQUIRE(rows.size() == 2);
    const auto& smooth = rows[0].config.gc.omega2 == 0.5 ? rows[0] : rows[1];
    const auto& raw = rows[0].config.gc.omega2 == 0.0 ? rows[0] : rows[1];
    CHECK(smooth.report.fmeasure >= raw.report.fmeasure);
    CHECK(smooth.report.fp < raw.report.fp);
}

TEST_CASE("intermediates are dumped per stage") {
    const auto fx = make_fixture(0.0, 10);
    const auto r = run_pipeline(fx.inputs(), {});
    const auto dir = std::filesystem::temp_directory_path() / "egoseg_dump_test";
    std::filesystem::remove_all(dir);
    dump_intermediates(r, dir);
    for (const char* name : {"vocabulary.json", "semantic_raw.json", "fused.json", "seg_ac.json", "seg_adw.json",
                             "segmentation.json", "manifest.json"})
        CHECK(std::filesystem::exists(dir / name));
    CHECK(load_segmentation(dir / "segmentation.json") == r.segmentation());
    CHECK(matrix_from_json(matrix_to_json(r.features.fused)) == r.features.fused);
}
