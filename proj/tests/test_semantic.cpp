#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "egoseg/error.hpp"
#include "egoseg/semantic.hpp"
#include "oracles.hpp"

using namespace egoseg;

namespace {

ConceptDetections one_frame(std::vector<std::string> tags) {
    FrameTags ft;
    for (auto& t : tags) ft.tags.push_back({t, 1.0});
    return ConceptDetections{{ft}};
}

TableSimilarityProvider single_meaning(const std::vector<std::string>& tags) {
    TableSimilarityProvider p;
    for (const auto& t : tags) p.add_tag(t, {t});
    return p;
}

std::set<std::set<std::string>> as_sets(const SemanticVocabulary& v) {
    std::set<std::set<std::string>> out;
    for (const auto& c : v.clusters) out.insert({c.members.begin(), c.members.end()});
    return out;
}

}  // namespace

TEST_CASE("edge weight is the best meaning pair") {
    TableSimilarityProvider p;
    p.add_tag("a", {"a.1", "a.2"});
    p.add_tag("b", {"b.1"});
    p.set_similarity("a.1", "b.1", 0.2);
    p.set_similarity("a.2", "b.1", 0.7);
    const auto g = build_concept_graph(one_frame({"a", "b"}), p);
    REQUIRE(g.size() == 2);
    CHECK(g.weights(0, 1) == 0.7);
    CHECK(g.weights(1, 0) == 0.7);
    CHECK(g.weights(0, 0) == 0.0);
}

TEST_CASE("concept graph degenerate and error inputs") {
    const auto p = single_meaning({"a"});
    const auto g = build_concept_graph(one_frame({"a"}), p);
    CHECK(g.size() == 1);
    CHECK(g.weights.sum() == 0.0);
    CHECK_THROWS_WITH_AS(build_concept_graph(one_frame({"a", "xyz"}), p), doctest::Contains("xyz"), UnknownTagError);
}

TEST_CASE("k at least the vertex count gives singletons") {
    const std::vector<std::string> tags{"a", "b", "c", "d", "e"};
    auto p = single_meaning(tags);
    p.set_similarity("a", "b", 0.9);
    const auto v = cluster_concepts(build_concept_graph(one_frame(tags), p), 100);
    REQUIRE(v.size() == 5);
    for (const auto& c : v.clusters) {
        CHECK(c.members.size() == 1);
        CHECK(c.representative == c.members[0]);
    }
}

TEST_CASE("two cliques split along the best 2-partition") {
    const std::vector<std::string> tags{"a", "b", "c", "x", "y"};
    auto p = single_meaning(tags);
    for (std::size_t i = 0; i < tags.size(); ++i)
        for (std::size_t j = i + 1; j < tags.size(); ++j) {
            const bool same = (i < 3) == (j < 3);
            p.set_similarity(tags[i], tags[j], same ? 0.9 : 0.05);
        }
    const auto g = build_concept_graph(one_frame(tags), p);

    // brute force: every non-trivial 2-partition, maximize intra minus inter
    double best = -1e300;
    std::set<std::set<std::string>> best_sets;
    for (unsigned mask = 1; mask + 1 < (1u << 5); ++mask) {
        double score = 0.0;
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = i + 1; j < 5; ++j) {
                const bool same = ((mask >> i) & 1u) == ((mask >> j) & 1u);
                score += same ? g.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))
                              : -g.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
        if (score > best) {
            best = score;
            std::set<std::string> s0, s1;
            for (std::size_t i = 0; i < 5; ++i) ((mask >> i) & 1u ? s1 : s0).insert(tags[i]);
            best_sets = {s0, s1};
        }
    }
    const auto v = cluster_concepts(g, 2);
    CHECK(as_sets(v) == best_sets);
    CHECK(as_sets(v) == std::set<std::set<std::string>>{{"a", "b", "c"}, {"x", "y"}});
}

TEST_CASE("representative maximizes the similarity sum") {
    const std::vector<std::string> tags{"a", "b", "c"};
    auto p = single_meaning(tags);
    p.set_similarity("a", "b", 0.9);
    p.set_similarity("a", "c", 0.8);
    p.set_similarity("b", "c", 0.5);
    const auto g = build_concept_graph(one_frame(tags), p);
    CHECK(g.tags[pick_representative(g, {0, 1, 2})] == "a");
    const auto v = cluster_concepts(g, 1);
    REQUIRE(v.size() == 1);
    CHECK(v.clusters[0].representative == "a");
}

TEST_CASE("spectral clustering is deterministic for a seed") {
    auto rng = oracle::rng_for(11);
    std::vector<std::string> tags;
    for (int i = 0; i < 30; ++i) tags.push_back("t" + std::to_string(i));
    auto p = single_meaning(tags);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < tags.size(); ++i)
        for (std::size_t j = i + 1; j < tags.size(); ++j) p.set_similarity(tags[i], tags[j], u(rng));
    const auto g = build_concept_graph(one_frame(tags), p);
    const auto a = cluster_concepts(g, 6, {.seed = 4});
    const auto b = cluster_concepts(g, 6, {.seed = 4});
    CHECK(a.clusters == b.clusters);
    CHECK(a.size() <= 6);
    std::size_t covered = 0;
    for (const auto& c : a.clusters) covered += c.members.size();
    CHECK(covered == tags.size());
}

TEST_CASE("vocabulary json round trip") {
    const auto v = SemanticVocabulary::from_clusters({{"a", {"a", "b"}}, {"x", {"x"}}});
    const auto back = SemanticVocabulary::from_json(v.to_json());
    CHECK(back.clusters == v.clusters);
    CHECK(back.tag_to_cluster.at("b") == 0);
    CHECK_THROWS_AS(SemanticVocabulary::from_clusters({{"a", {"a"}}, {"b", {"a", "b"}}}), ValidationError);
}

TEST_CASE("semantic feature assembly") {
    const auto vocab = SemanticVocabulary::from_clusters({{"a", {"a", "b"}}, {"z", {"z"}}});
    SUBCASE("sum then global rescale") {
        ConceptDetections det{{{"f0", {{"a", 0.6}, {"b", 0.3}}}, {"f1", {}}}};
        const auto m = assemble_semantic_features(det, vocab);
        CHECK(m(0, 0) == doctest::Approx(1.0));
        CHECK(m(0, 1) == 0.0);
        CHECK(m.row(1).isZero());
    }
    SUBCASE("division by the global max") {
        ConceptDetections det{{{"f0", {{"a", 0.9}}}, {"f1", {{"b", 0.45}}}}};
        const auto m = assemble_semantic_features(det, vocab);
        CHECK(m(0, 0) == doctest::Approx(1.0));
        CHECK(m(1, 0) == doctest::Approx(0.5));
    }
    SUBCASE("matches the double-loop oracle") {
        auto rng = oracle::rng_for(12);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const std::vector<std::string> all{"a", "b", "z"};
        for (int rep = 0; rep < 20; ++rep) {
            ConceptDetections det;
            for (int i = 0; i < 15; ++i) {
                FrameTags ft;
                for (const auto& t : all)
                    if (u(rng) < 0.5) ft.tags.push_back({t, u(rng)});
                det.frames.push_back(ft);
            }
            Matrix expected = oracle::semantic_sums(det, vocab);
            if (expected.maxCoeff() > 0) expected /= expected.maxCoeff();
            CHECK((assemble_semantic_features(det, vocab) - expected).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("temporal smoothing") {
    SUBCASE("constants survive") {
        const Matrix m = Matrix::Constant(40, 2, 0.5);
        CHECK((smooth_temporal(m, 3.0) - m).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("interior impulse becomes a symmetric bump of unit mass") {
        Matrix m = Matrix::Zero(41, 1);
        m(20, 0) = 1.0;
        const auto s = smooth_temporal(m, 3.0);
        CHECK(s.sum() == doctest::Approx(1.0).epsilon(1e-12));
        for (int d = 1; d <= 12; ++d) CHECK(s(20 - d, 0) == doctest::Approx(s(20 + d, 0)).epsilon(1e-12));
        CHECK(s.maxCoeff() == s(20, 0));
    }
    SUBCASE("single frame is unchanged") {
        Matrix m(1, 3);
        m << 0.2, 0.0, 1.0;
        CHECK(smooth_temporal(m, 3.0) == m);
    }
}

TEST_CASE("low variance pruning") {
    Matrix m(4, 3);
    m << 0.3, 0, 0.1,  //
        0.3, 1, 0.12,  //
        0.3, 0, 0.1,   //
        0.3, 1, 0.12;
    const auto p = prune_low_variance(m, 0.05);
    CHECK(p.kept == std::vector<std::size_t>{1});
    CHECK(p.values.col(0) == m.col(1));
    CHECK(prune_low_variance(m, 0.0).kept == std::vector<std::size_t>{0, 1, 2});
}
