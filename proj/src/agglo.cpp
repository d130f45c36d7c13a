#include "egoseg/agglo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "egoseg/error.hpp"

namespace egoseg {

namespace {

constexpr std::array<std::string_view, 7> kLinkageNames{"ward",   "centroid", "complete", "weighted",
                                                        "single", "median",   "average"};

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

}  // namespace

std::string_view to_string(Linkage linkage) { return kLinkageNames[static_cast<std::size_t>(linkage)]; }

Linkage parse_linkage(std::string_view name) {
    for (std::size_t i = 0; i < kLinkageNames.size(); ++i)
        if (kLinkageNames[i] == name) return static_cast<Linkage>(i);
    throw ValidationError("unknown linkage '" + std::string(name) +
                          "' (expected ward, centroid, complete, weighted, single, median or average)");
}

void validate(const AggloParams& params) {
    if (!(params.cutoff > 0.0) || !std::isfinite(params.cutoff))
        throw ValidationError("AC cutoff must be a positive number");
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ValidationError("cosine distance between vectors of different length");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 1.0;
    return std::clamp(1.0 - dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 2.0);
}

Matrix pairwise_cosine_distances(const Matrix& rows) {
    const Eigen::Index n = rows.rows();
    const auto d = static_cast<std::size_t>(rows.cols());
    Matrix dist = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = cosine_distance({rows.row(i).data(), d}, {rows.row(j).data(), d});
            dist(i, j) = v;
            dist(j, i) = v;
        }
    return dist;
}

std::array<double, 4> lance_williams(Linkage linkage, double ni, double nj, double nk) {
    switch (linkage) {
        case Linkage::Single: return {0.5, 0.5, 0.0, -0.5};
        case Linkage::Complete: return {0.5, 0.5, 0.0, 0.5};
        case Linkage::Average: return {ni / (ni + nj), nj / (ni + nj), 0.0, 0.0};
        case Linkage::Weighted: return {0.5, 0.5, 0.0, 0.0};
        case Linkage::Centroid:
            return {ni / (ni + nj), nj / (ni + nj), -ni * nj / ((ni + nj) * (ni + nj)), 0.0};
        case Linkage::Median: return {0.5, 0.5, -0.25, 0.0};
        case Linkage::Ward: {
            const double t = ni + nj + nk;
            return {(ni + nk) / t, (nj + nk) / t, -nk / t, 0.0};
        }
    }
    throw ValidationError("unsupported linkage");
}

std::vector<Merge> agglomerate(const Matrix& input, Linkage linkage) {
    const auto n = static_cast<std::size_t>(input.rows());
    if (input.cols() != input.rows()) throw ValidationError("dissimilarity matrix must be square");
    Matrix dist = input;
    std::vector<bool> active(n, true);
    std::vector<std::size_t> size(n, 1);
    // nearest active partner with a larger index, per row
    std::vector<std::size_t> nn(n, kNone);
    std::vector<double> nn_dist(n, std::numeric_limits<double>::infinity());

    auto refresh = [&](std::size_t i) {
        nn[i] = kNone;
        nn_dist[i] = std::numeric_limits<double>::infinity();
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!active[j]) continue;
            const double d = dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (d < nn_dist[i] || nn[i] == kNone) {
                nn_dist[i] = d;
                nn[i] = j;
            }
        }
    };
    for (std::size_t i = 0; i < n; ++i) refresh(i);

    std::vector<Merge> merges;
    merges.reserve(n > 0 ? n - 1 : 0);
    for (std::size_t step = 0; step + 1 < n; ++step) {
        std::size_t a = kNone;
        for (std::size_t i = 0; i < n; ++i)
            if (active[i] && nn[i] != kNone && (a == kNone || nn_dist[i] < nn_dist[a])) a = i;
        const std::size_t b = nn[a];
        const double dab = nn_dist[a];
        const auto ea = static_cast<Eigen::Index>(a);
        const auto eb = static_cast<Eigen::Index>(b);

        const auto na = static_cast<double>(size[a]);
        const auto nb = static_cast<double>(size[b]);
        for (std::size_t x = 0; x < n; ++x) {
            if (!active[x] || x == a || x == b) continue;
            const auto ex = static_cast<Eigen::Index>(x);
            const double dxa = dist(ex, ea);
            const double dxb = dist(ex, eb);
            double d;
            if (linkage == Linkage::Single) {
                d = std::min(dxa, dxb);
            } else if (linkage == Linkage::Complete) {
                d = std::max(dxa, dxb);
            } else {
                const auto [ai, aj, beta, gamma] = lance_williams(linkage, na, nb, static_cast<double>(size[x]));
                d = ai * dxa + aj * dxb + beta * dab + gamma * std::abs(dxa - dxb);
            }
            dist(ex, ea) = d;
            dist(ea, ex) = d;
        }
        active[b] = false;
        size[a] += size[b];
        merges.push_back({a, b, dab, size[a]});

        for (std::size_t x = 0; x < a; ++x) {
            if (!active[x]) continue;
            if (nn[x] == a || nn[x] == b) {
                refresh(x);
                continue;
            }
            const double d = dist(static_cast<Eigen::Index>(x), ea);
            if (d < nn_dist[x] || (d == nn_dist[x] && a < nn[x])) {
                nn_dist[x] = d;
                nn[x] = a;
            }
        }
        refresh(a);
        for (std::size_t x = a + 1; x < b; ++x)
            if (active[x] && nn[x] == b) refresh(x);
    }
    return merges;
}

std::vector<std::size_t> cut_dendrogram(std::size_t n, const std::vector<Merge>& merges, double cutoff) {
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<double> height(n, -std::numeric_limits<double>::infinity());
    for (const auto& m : merges) {
        const double h = std::max({m.distance, height[m.first], height[m.second]});
        height[m.first] = h;
        if (h < cutoff) parent[find(m.second)] = find(m.first);
    }
    std::vector<std::size_t> labels(n);
    std::vector<std::size_t> compact(n, kNone);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = find(i);
        if (compact[r] == kNone) compact[r] = next++;
        labels[i] = compact[r];
    }
    return labels;
}

Segmentation cluster_frames(const Matrix& stream, const AggloParams& params) {
    validate(params);
    const auto n = static_cast<std::size_t>(stream.rows());
    if (n == 0) throw ValidationError("cannot cluster an empty stream");
    const auto merges = agglomerate(pairwise_cosine_distances(stream), params.linkage);
    return Segmentation::from_labels(cut_dendrogram(n, merges, params.cutoff));
}

}  // namespace egoseg
