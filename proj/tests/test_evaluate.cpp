#include <doctest.h>

#include "egoseg/error.hpp"
#include "egoseg/evaluate.hpp"
#include "oracles.hpp"

using namespace egoseg;

TEST_CASE("f-measure on exact match") {
    const Segmentation s(50, {0, 10, 30});
    const auto r = f_measure(s, s);
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 1.0);
    CHECK(r.fmeasure == 1.0);
}

TEST_CASE("f-measure arithmetic with TP=2 FP=1 FN=1") {
    const auto r = f_measure(Segmentation(100, {0, 10, 20, 50}), Segmentation(100, {0, 12, 20, 80}));
    CHECK(r.tp == 2);
    CHECK(r.fp == 1);
    CHECK(r.fn == 1);
    CHECK(r.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(r.recall == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(r.fmeasure == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("f-measure tolerance edge applies on both sides") {
    const Segmentation gt(200, {0, 100});
    CHECK(f_measure(Segmentation(200, {0, 105}), gt).tp == 1);
    CHECK(f_measure(Segmentation(200, {0, 95}), gt).tp == 1);
    const auto miss = f_measure(Segmentation(200, {0, 106}), gt);
    CHECK(miss.tp == 0);
    CHECK(miss.fp == 1);
    CHECK(miss.fn == 1);
}

TEST_CASE("f-measure matching is one-to-one") {
    // two predictions near one GT boundary: only one may match
    const auto r = f_measure(Segmentation(100, {0, 48, 52}), Segmentation(100, {0, 50}));
    CHECK(r.tp == 1);
    CHECK(r.fp == 1);
    CHECK(r.fn == 0);
    // earliest unmatched GT boundary wins the tie
    const auto t = f_measure(Segmentation(100, {0, 50}), Segmentation(100, {0, 47, 53}));
    CHECK(t.tp == 1);
}

TEST_CASE("frame 0 is never a boundary and empty sets give zero") {
    const Segmentation one(20, {0});
    const auto r = f_measure(one, one);
    CHECK(r.tp == 0);
    CHECK(r.fmeasure == 0.0);
    CHECK_THROWS_AS(f_measure(one, Segmentation(21, {0})), ValidationError);
}

TEST_CASE("local refinement error") {
    const Segmentation a(5, {0, 2, 4});  // R_A(2) = {2,3}
    const Segmentation b(5, {0, 3});     // R_B(2) = {0,1,2}
    CHECK(local_refinement_error(a, b, 2) == 0.5);
    CHECK(local_refinement_error(a, a, 3) == 0.0);
    // a refines the all-in-one segmentation
    CHECK(local_refinement_error(a, Segmentation(5, {0}), 1) == 0.0);
    CHECK_THROWS_AS(local_refinement_error(a, b, 5), ValidationError);
}

TEST_CASE("gce and lce fixtures") {
    const Segmentation same(10, {0, 3, 8});
    CHECK(gce(same, same) == 0.0);
    CHECK(lce(same, same) == 0.0);

    const Segmentation halves(10, {0, 5});
    const Segmentation whole(10, {0});
    CHECK(gce(halves, whole) == 0.0);
    CHECK(lce(halves, whole) == 0.0);

    // hand computed, confirmed by the set-based oracle
    const Segmentation a(4, {0, 2});
    const Segmentation b(4, {0, 3});
    CHECK(oracle::gce(a, b) == 0.25);
    CHECK(oracle::lce(a, b) == 0.125);
    CHECK(gce(a, b) == 0.25);
    CHECK(lce(a, b) == 0.125);
}

TEST_CASE("consistency errors agree with the set oracle and obey their identities") {
    auto rng = oracle::rng_for(2);
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t n = 1 + rng() % 40;
        const auto a = oracle::random_segmentation(rng, n, 0.05 + 0.5 * static_cast<double>(rng() % 100) / 100.0);
        const auto b = oracle::random_segmentation(rng, n, 0.05 + 0.5 * static_cast<double>(rng() % 100) / 100.0);
        const double g = gce(a, b), l = lce(a, b);
        CHECK(g == doctest::Approx(oracle::gce(a, b)).epsilon(1e-12));
        CHECK(l == doctest::Approx(oracle::lce(a, b)).epsilon(1e-12));
        CHECK(l <= g + 1e-15);
        CHECK(g == doctest::Approx(gce(b, a)).epsilon(1e-12));
        CHECK(l == doctest::Approx(lce(b, a)).epsilon(1e-12));
        CHECK(g >= 0.0);
        CHECK(g <= 1.0);
        const auto [all, each] = trivial_segmentations(n);
        CHECK(gce(all, a) == 0.0);
        CHECK(gce(each, a) == 0.0);
        CHECK(lce(a, all) == 0.0);
        CHECK(lce(a, each) == 0.0);
    }
}

TEST_CASE("trivial segmentations") {
    const auto [all, each] = trivial_segmentations(5);
    CHECK(all.starts() == std::vector<std::size_t>{0});
    CHECK(each.starts() == std::vector<std::size_t>{0, 1, 2, 3, 4});
    CHECK_THROWS_AS(trivial_segmentations(0), ValidationError);
}

TEST_CASE("tolerance monotonicity") {
    auto rng = oracle::rng_for(3);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 2 + rng() % 150;
        const auto p = oracle::random_segmentation(rng, n, 0.08);
        const auto g = oracle::random_segmentation(rng, n, 0.08);
        std::size_t prev = 0;
        for (std::size_t tol = 0; tol <= 12; ++tol) {
            const auto tp = f_measure(p, g, {tol}).tp;
            CHECK(tp >= prev);
            prev = tp;
        }
    }
}

TEST_CASE("report serialization and averaging") {
    EvalReport a;
    a.fmeasure = 1.0;
    EvalReport b;
    b.fmeasure = 0.5;
    const std::vector<EvalReport> reports{a, b};
    CHECK(average_fmeasure(reports) == 0.75);
    const auto j = to_json(a);
    CHECK(j.at("fmeasure") == 1.0);
    for (const char* key : {"precision", "recall", "tp", "fp", "fn", "gce", "lce"}) CHECK(j.contains(key));
    CHECK(csv_row(a).find(",") != std::string::npos);
}
