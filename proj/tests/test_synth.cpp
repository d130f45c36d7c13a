#include <doctest.h>

#include <filesystem>

#include "egoseg/error.hpp"
#include "egoseg/io.hpp"
#include "egoseg/synth.hpp"

using namespace egoseg;

namespace {

std::string bytes_of(const SynthData& d) {
    const auto dir = std::filesystem::temp_directory_path();
    save_feature_stream(d.features, dir / "egoseg_synth_f.jsonl");
    save_concept_detections(d.detections, dir / "egoseg_synth_d.jsonl");
    return read_text_file(dir / "egoseg_synth_f.jsonl") + read_text_file(dir / "egoseg_synth_d.jsonl") +
           serialize_segmentation(d.gt);
}

}  // namespace

TEST_CASE("zero noise reproduces the means") {
    const auto spec = random_synth_spec(4, 10, 6, 3, 0.0, 5);
    const auto d = generate(spec);
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t t = 0; t < 10; ++t)
            for (std::size_t j = 0; j < 6; ++j)
                CHECK(d.features.contextual(static_cast<Eigen::Index>(10 * k + t), static_cast<Eigen::Index>(j)) ==
                      spec.segments[k].mean[j]);
    CHECK(d.gt == Segmentation(40, {0, 10, 20, 30}));
    CHECK(d.detections.frames[0].tags.size() == 4);
}

TEST_CASE("identical adjacent segments keep their boundary") {
    SynthSpec spec;
    spec.n = 6;
    spec.segments = {{3, {1.0, 0.0}, {}}, {3, {1.0, 0.0}, {}}};
    CHECK(generate(spec).gt == Segmentation(6, {0, 3}));
}

TEST_CASE("same seed gives identical bytes and distinct seeds differ") {
    const auto a = bytes_of(generate(random_synth_spec(3, 8, 4, 2, 0.3, 9)));
    const auto b = bytes_of(generate(random_synth_spec(3, 8, 4, 2, 0.3, 9)));
    const auto c = bytes_of(generate(random_synth_spec(3, 8, 4, 2, 0.3, 10)));
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("synth spec validation and json round trip") {
    auto spec = random_synth_spec(3, 5, 4, 2, 0.1, 1);
    const auto back = SynthSpec::from_json(spec.to_json());
    CHECK(back.to_json() == spec.to_json());
    spec.n = 14;
    CHECK_THROWS_WITH_AS(generate(spec), doctest::Contains("sum"), ValidationError);
}

TEST_CASE("similarity table relates tags owned by the same segment") {
    const auto spec = random_synth_spec(2, 5, 4, 2, 0.0, 1);
    const auto sim = synth_similarity(spec);
    CHECK(sim.similarity("s0_c0", "s0_c1") == 0.8);
    CHECK(sim.similarity("s0_c0", "s1_c0") == 0.0);
    CHECK(sim.similarity("common", "s0_c0") == 0.0);
    CHECK(sim.meanings("common").size() == 1);
}
