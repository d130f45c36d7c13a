#include "egoseg/semantic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "egoseg/error.hpp"
#include "egoseg/io.hpp"

namespace egoseg {

using nlohmann::json;

// ---------------------------------------------------------------------------
// similarity providers

std::pair<std::string, std::string> TableSimilarityProvider::key(const std::string& a, const std::string& b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
}

void TableSimilarityProvider::add_tag(const std::string& tag, std::vector<std::string> meanings) {
    meanings_[tag] = std::move(meanings);
}

void TableSimilarityProvider::set_similarity(const std::string& a, const std::string& b, double value) {
    if (!(value >= 0.0 && value <= 1.0))
        throw ValidationError("similarity between '" + a + "' and '" + b + "' is outside [0,1]");
    sims_[key(a, b)] = value;
}

std::vector<std::string> TableSimilarityProvider::meanings(const std::string& tag) const {
    auto it = meanings_.find(tag);
    return it == meanings_.end() ? std::vector<std::string>{} : it->second;
}

double TableSimilarityProvider::similarity(const std::string& a, const std::string& b) const {
    if (a == b) return 1.0;
    auto it = sims_.find(key(a, b));
    return it == sims_.end() ? 0.0 : it->second;
}

TableSimilarityProvider TableSimilarityProvider::from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("meanings") || !doc["meanings"].is_object())
        throw ValidationError("similarity file: expected a \"meanings\" object");
    TableSimilarityProvider prov;
    for (const auto& [tag, list] : doc["meanings"].items()) {
        if (!list.is_array()) throw ValidationError("similarity file: meanings of '" + tag + "' must be a list");
        std::vector<std::string> ms;
        for (const auto& m : list) {
            if (!m.is_string()) throw ValidationError("similarity file: meaning ids must be strings");
            ms.push_back(m.get<std::string>());
        }
        prov.add_tag(tag, std::move(ms));
    }
    if (doc.contains("sims")) {
        for (const auto& row : doc["sims"]) {
            if (!row.is_array() || row.size() != 3 || !row[0].is_string() || !row[1].is_string() ||
                !row[2].is_number())
                throw ValidationError("similarity file: sims entries must be [meaning, meaning, value]");
            prov.set_similarity(row[0].get<std::string>(), row[1].get<std::string>(), row[2].get<double>());
        }
    }
    return prov;
}

TableSimilarityProvider TableSimilarityProvider::load(const std::filesystem::path& path) {
    try {
        return from_json(json::parse(read_text_file(path)));
    } catch (const json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

json TableSimilarityProvider::to_json() const {
    json doc;
    doc["meanings"] = json::object();
    for (const auto& [tag, ms] : meanings_) doc["meanings"][tag] = ms;
    doc["sims"] = json::array();
    for (const auto& [k, v] : sims_) doc["sims"].push_back({k.first, k.second, v});
    return doc;
}

// ---------------------------------------------------------------------------
// vocabulary

SemanticVocabulary SemanticVocabulary::from_clusters(std::vector<ConceptCluster> clusters) {
    SemanticVocabulary vocab;
    for (std::size_t j = 0; j < clusters.size(); ++j) {
        const auto& c = clusters[j];
        if (std::find(c.members.begin(), c.members.end(), c.representative) == c.members.end())
            throw ValidationError("representative '" + c.representative + "' is not a member of its cluster");
        for (const auto& tag : c.members)
            if (!vocab.tag_to_cluster.emplace(tag, j).second)
                throw ValidationError("tag '" + tag + "' belongs to more than one cluster");
    }
    vocab.clusters = std::move(clusters);
    return vocab;
}

json SemanticVocabulary::to_json() const {
    json doc{{"version", 1}, {"clusters", json::array()}};
    for (const auto& c : clusters)
        doc["clusters"].push_back({{"representative", c.representative}, {"members", c.members}});
    return doc;
}

SemanticVocabulary SemanticVocabulary::from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("clusters") || !doc["clusters"].is_array())
        throw ValidationError("vocabulary: expected a \"clusters\" array");
    std::vector<ConceptCluster> clusters;
    for (const auto& c : doc["clusters"]) {
        ConceptCluster cluster;
        cluster.representative = c.at("representative").get<std::string>();
        cluster.members = c.at("members").get<std::vector<std::string>>();
        clusters.push_back(std::move(cluster));
    }
    return from_clusters(std::move(clusters));
}

void save_vocabulary(const SemanticVocabulary& vocab, const std::filesystem::path& path) {
    write_text_file(path, vocab.to_json().dump(2) + "\n");
}

SemanticVocabulary load_vocabulary(const std::filesystem::path& path) {
    try {
        return SemanticVocabulary::from_json(json::parse(read_text_file(path)));
    } catch (const json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// concept graph

ConceptGraph build_concept_graph(const ConceptDetections& det, const SimilarityProvider& prov) {
    if (det.frames.empty()) throw ValidationError("no frames in concept detections");
    std::set<std::string> unique;
    for (const auto& frame : det.frames)
        for (const auto& tc : frame.tags) unique.insert(tc.tag);

    ConceptGraph g;
    g.tags.assign(unique.begin(), unique.end());
    std::vector<std::vector<std::string>> meanings;
    meanings.reserve(g.tags.size());
    for (const auto& tag : g.tags) {
        auto ms = prov.meanings(tag);
        if (ms.empty()) throw UnknownTagError(tag);
        meanings.push_back(std::move(ms));
    }

    const auto v = static_cast<Eigen::Index>(g.tags.size());
    g.weights = Matrix::Zero(v, v);
    for (Eigen::Index i = 0; i < v; ++i) {
        for (Eigen::Index j = i + 1; j < v; ++j) {
            double best = 0.0;
            for (const auto& a : meanings[static_cast<std::size_t>(i)])
                for (const auto& b : meanings[static_cast<std::size_t>(j)])
                    best = std::max(best, prov.similarity(a, b));
            g.weights(i, j) = best;
            g.weights(j, i) = best;
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// spectral clustering

namespace {

struct KMeansResult {
    std::vector<std::size_t> labels;
    double distortion = std::numeric_limits<double>::infinity();
};

double squared_distance(const Matrix& points, Eigen::Index i, const Matrix& centers, Eigen::Index c) {
    return (points.row(i) - centers.row(c)).squaredNorm();
}

// Farthest-point seeding from a random first center, then Lloyd iterations.
KMeansResult kmeans(const Matrix& points, std::size_t k, std::mt19937_64& rng, int max_iterations) {
    const Eigen::Index n = points.rows();
    const auto kk = static_cast<Eigen::Index>(k);
    Matrix centers(kk, points.cols());

    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    centers.row(0) = points.row(pick(rng));
    std::vector<double> nearest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    for (Eigen::Index c = 1; c < kk; ++c) {
        Eigen::Index far = 0;
        double far_d = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            auto& d = nearest[static_cast<std::size_t>(i)];
            d = std::min(d, squared_distance(points, i, centers, c - 1));
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        centers.row(c) = points.row(far);
    }

    KMeansResult result;
    result.labels.assign(static_cast<std::size_t>(n), 0);
    for (int iter = 0; iter < max_iterations; ++iter) {
        bool changed = iter == 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (Eigen::Index c = 0; c < kk; ++c) {
                const double d = squared_distance(points, i, centers, c);
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<std::size_t>(c);
                }
            }
            if (result.labels[static_cast<std::size_t>(i)] != best) changed = true;
            result.labels[static_cast<std::size_t>(i)] = best;
        }
        if (!changed) break;
        Matrix sums = Matrix::Zero(kk, points.cols());
        std::vector<std::size_t> counts(k, 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto c = result.labels[static_cast<std::size_t>(i)];
            sums.row(static_cast<Eigen::Index>(c)) += points.row(i);
            ++counts[c];
        }
        for (std::size_t c = 0; c < k; ++c)  // empty clusters keep their center
            if (counts[c] > 0)
                centers.row(static_cast<Eigen::Index>(c)) =
                    sums.row(static_cast<Eigen::Index>(c)) / static_cast<double>(counts[c]);
    }

    result.distortion = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        result.distortion +=
            squared_distance(points, i, centers, static_cast<Eigen::Index>(result.labels[static_cast<std::size_t>(i)]));
    return result;
}

Matrix spectral_embedding(const Matrix& w, std::size_t k) {
    const Eigen::Index v = w.rows();
    Vector dinv(v);
    for (Eigen::Index i = 0; i < v; ++i) {
        const double d = w.row(i).sum();
        dinv(i) = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
    }
    Eigen::MatrixXd laplacian = Eigen::MatrixXd::Identity(v, v);
    laplacian -= dinv.asDiagonal() * Eigen::MatrixXd(w) * dinv.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian);
    if (solver.info() != Eigen::Success) throw ValidationError("eigendecomposition of the concept Laplacian failed");

    Matrix embedding = solver.eigenvectors().leftCols(static_cast<Eigen::Index>(k));
    for (Eigen::Index i = 0; i < v; ++i) {
        const double norm = embedding.row(i).norm();
        if (norm > 0.0) embedding.row(i) /= norm;
    }
    return embedding;
}

}  // namespace

std::size_t pick_representative(const ConceptGraph& graph, const std::vector<std::size_t>& members) {
    std::size_t best = members.front();
    double best_sum = -1.0;
    for (auto i : members) {
        double sum = 0.0;
        for (auto j : members)
            if (i != j) sum += graph.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (sum > best_sum || (sum == best_sum && graph.tags[i] < graph.tags[best])) {
            best_sum = sum;
            best = i;
        }
    }
    return best;
}

SemanticVocabulary cluster_concepts(const ConceptGraph& graph, std::size_t k, const SpectralOptions& options) {
    if (k == 0) throw ValidationError("target cluster count must be at least 1");
    const std::size_t v = graph.size();
    std::vector<std::size_t> labels(v);

    if (k >= v) {
        for (std::size_t i = 0; i < v; ++i) labels[i] = i;
    } else {
        const Matrix embedding = spectral_embedding(graph.weights, k);
        KMeansResult best;
        for (int r = 0; r < std::max(1, options.restarts); ++r) {
            std::mt19937_64 rng(options.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(r + 1));
            auto candidate = kmeans(embedding, k, rng, options.max_iterations);
            if (candidate.distortion < best.distortion) best = std::move(candidate);
        }
        labels = std::move(best.labels);
    }

    // group, drop empty clusters, order by first member
    std::vector<std::vector<std::size_t>> groups(std::max(k, v));
    for (std::size_t i = 0; i < v; ++i) groups[labels[i]].push_back(i);
    std::erase_if(groups, [](const auto& g) { return g.empty(); });
    std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });

    std::vector<ConceptCluster> clusters;
    clusters.reserve(groups.size());
    for (const auto& members : groups) {
        ConceptCluster c;
        c.representative = graph.tags[pick_representative(graph, members)];
        for (auto i : members) c.members.push_back(graph.tags[i]);
        clusters.push_back(std::move(c));
    }
    return SemanticVocabulary::from_clusters(std::move(clusters));
}

// ---------------------------------------------------------------------------
// per-frame features

Matrix assemble_semantic_features(const ConceptDetections& det, const SemanticVocabulary& vocab) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(det.size()), static_cast<Eigen::Index>(vocab.size()));
    for (std::size_t i = 0; i < det.frames.size(); ++i) {
        for (const auto& tc : det.frames[i].tags) {
            auto it = vocab.tag_to_cluster.find(tc.tag);
            if (it == vocab.tag_to_cluster.end())
                throw ValidationError("frame " + std::to_string(i) + ": tag '" + tc.tag + "' is not in the vocabulary");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(it->second)) += tc.confidence;
        }
    }
    const double peak = m.size() > 0 ? m.maxCoeff() : 0.0;
    if (peak > 0.0) m /= peak;
    return m;
}

Matrix smooth_temporal(const Matrix& m, double bandwidth) {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
        throw ValidationError("smoothing bandwidth must be positive");
    const Eigen::Index n = m.rows();
    const auto radius = static_cast<Eigen::Index>(std::floor(3.0 * bandwidth));
    std::vector<double> kernel(static_cast<std::size_t>(radius) + 1);
    for (Eigen::Index d = 0; d <= radius; ++d)
        kernel[static_cast<std::size_t>(d)] = std::exp(-0.5 * static_cast<double>(d * d) / (bandwidth * bandwidth));

    Matrix out(n, m.cols());
    for (Eigen::Index t = 0; t < n; ++t) {
        const Eigen::Index lo = std::max<Eigen::Index>(0, t - radius);
        const Eigen::Index hi = std::min<Eigen::Index>(n - 1, t + radius);
        double total = 0.0;
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(m.cols());
        for (Eigen::Index j = lo; j <= hi; ++j) {
            const double w = kernel[static_cast<std::size_t>(std::abs(t - j))];
            acc += w * m.row(j);
            total += w;
        }
        out.row(t) = (acc / total).cwiseMax(0.0).cwiseMin(1.0);
    }
    return out;
}

PrunedMatrix prune_low_variance(const Matrix& m, double threshold) {
    if (!(threshold >= 0.0)) throw ValidationError("variance threshold must be non-negative");
    PrunedMatrix out;
    const Eigen::Index n = m.rows();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        double sd = 0.0;
        if (n > 0) {
            const double mean = m.col(c).mean();
            sd = std::sqrt((m.col(c).array() - mean).square().sum() / static_cast<double>(n));
        }
        if (sd >= threshold) out.kept.push_back(static_cast<std::size_t>(c));
    }
    out.values.resize(n, static_cast<Eigen::Index>(out.kept.size()));
    for (std::size_t j = 0; j < out.kept.size(); ++j)
        out.values.col(static_cast<Eigen::Index>(j)) = m.col(static_cast<Eigen::Index>(out.kept[j]));
    return out;
}

}  // namespace egoseg
