#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "egoseg/types.hpp"

namespace egoseg {

struct GcParams {
    double omega1 = 0.5;  // unary mix: 0 = AC only, 1 = ADWIN only
    double omega2 = 0.5;  // pairwise weight
    std::size_t radius = 1;
    double softmax_temp = 0.1;
};

void validate(const GcParams& params);

/// Labels are the atomic intervals induced by the union of both candidate
/// boundary sets, in temporal order.
struct LabelSpace {
    Segmentation atoms;
    Segmentation seg_ac;
    Segmentation seg_adw;
    Matrix centroids_ac;   // one row per AC segment
    Matrix centroids_adw;  // one row per ADWIN segment
    std::vector<std::size_t> atom_to_ac;
    std::vector<std::size_t> atom_to_adw;

    std::size_t label_count() const { return atoms.segment_count(); }
};

LabelSpace build_label_space(const Segmentation& seg_ac, const Segmentation& seg_adw,
                             const Matrix& stream);

/// -log softmax likelihoods, n x labels, one table per candidate method.
struct UnaryEnergies {
    Matrix ac;
    Matrix adw;
};

UnaryEnergies unary_energies(const LabelSpace& ls, const Matrix& stream, const GcParams& params);

/// exp(-cosine_distance(a, b)).
double pairwise_energy(std::span<const double> a, std::span<const double> b);

/// Total energy of a labeling: mixed unaries plus omega2 times the
/// neighborhood-averaged pairwise cost charged across label disagreements.
double labeling_energy(const UnaryEnergies& unary, const Matrix& stream, const GcParams& params,
                       const std::vector<std::size_t>& labels);

/// Monotone labeling that reproduces a candidate segmentation: every frame
/// takes the first atomic interval of its candidate segment.
std::vector<std::size_t> induced_labeling(const LabelSpace& ls, const Segmentation& candidate);

struct GcResult {
    Segmentation segmentation;
    std::vector<std::size_t> labels;
    double energy = 0.0;
};

/// Minimizes the energy over non-decreasing labelings. Radius 1 is solved
/// exactly by dynamic programming over the chain; larger radii refine that
/// solution with iterated conditional modes.
GcResult minimize(const LabelSpace& ls, const UnaryEnergies& unary, const Matrix& stream,
                  const GcParams& params);

}  // namespace egoseg
