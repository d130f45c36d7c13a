#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "egoseg/types.hpp"

namespace egoseg {

enum class Linkage { Ward, Centroid, Complete, Weighted, Single, Median, Average };

inline constexpr std::array<Linkage, 7> kAllLinkages{
    Linkage::Ward,     Linkage::Centroid, Linkage::Complete, Linkage::Weighted,
    Linkage::Single,   Linkage::Median,   Linkage::Average};

std::string_view to_string(Linkage linkage);
Linkage parse_linkage(std::string_view name);

struct AggloParams {
    Linkage linkage = Linkage::Average;
    double cutoff = 0.4;
};

void validate(const AggloParams& params);

/// 1 - cos(a, b); 1 when either vector is zero. Result is clamped to [0, 2].
double cosine_distance(std::span<const double> a, std::span<const double> b);

Matrix pairwise_cosine_distances(const Matrix& rows);

/// One agglomeration step. Clusters are named by their smallest member index,
/// so `first < second` and the merged cluster keeps the name `first`.
struct Merge {
    std::size_t first = 0;
    std::size_t second = 0;
    double distance = 0.0;
    std::size_t size = 0;  // members in the merged cluster
};

/// Lance-Williams coefficients (alpha_i, alpha_j, beta, gamma) for merging
/// clusters of sizes ni and nj, seen from a cluster of size nk.
std::array<double, 4> lance_williams(Linkage linkage, double ni, double nj, double nk);

/// Full agglomeration of a symmetric dissimilarity matrix. The minimum-distance
/// pair merges first; ties go to the lexicographically smallest (first, second).
std::vector<Merge> agglomerate(const Matrix& dist, Linkage linkage);

/// Flat cluster labels: a dendrogram node is kept whole when every merge
/// below it (itself included) is strictly under the cutoff.
std::vector<std::size_t> cut_dendrogram(std::size_t n, const std::vector<Merge>& merges,
                                        double cutoff);

/// Agglomerative clustering of frames by cosine distance; a boundary is placed
/// wherever consecutive frames carry different cluster labels.
Segmentation cluster_frames(const Matrix& stream, const AggloParams& params);

}  // namespace egoseg
