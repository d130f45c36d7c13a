#include "egoseg/graphcut.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "egoseg/agglo.hpp"
#include "egoseg/error.hpp"

namespace egoseg {

namespace {

std::span<const double> row_span(const Matrix& m, std::size_t i) {
    return {m.row(static_cast<Eigen::Index>(i)).data(), static_cast<std::size_t>(m.cols())};
}

Matrix segment_centroids(const Segmentation& seg, const Matrix& stream) {
    Matrix c(static_cast<Eigen::Index>(seg.segment_count()), stream.cols());
    for (std::size_t k = 0; k < seg.segment_count(); ++k) {
        const auto b = static_cast<Eigen::Index>(seg.segment_begin(k));
        const auto e = static_cast<Eigen::Index>(seg.segment_end(k));
        c.row(static_cast<Eigen::Index>(k)) = stream.middleRows(b, e - b).colwise().mean();
    }
    return c;
}

// -log softmax over labels of cos(f_i, centroid(label)) / temp
Matrix method_unary(const Matrix& stream, const Matrix& centroids, const std::vector<std::size_t>& atom_to_seg,
                    double temp) {
    const Eigen::Index n = stream.rows();
    const auto labels = static_cast<Eigen::Index>(atom_to_seg.size());
    Matrix u(n, labels);
    std::vector<double> seg_logit(static_cast<std::size_t>(centroids.rows()));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (std::size_t s = 0; s < seg_logit.size(); ++s)
            seg_logit[s] = (1.0 - cosine_distance(row_span(stream, static_cast<std::size_t>(i)), row_span(centroids, s))) / temp;
        double peak = -std::numeric_limits<double>::infinity();
        for (auto s : atom_to_seg) peak = std::max(peak, seg_logit[s]);
        double total = 0.0;
        for (auto s : atom_to_seg) total += std::exp(seg_logit[s] - peak);
        const double lse = peak + std::log(total);
        for (Eigen::Index l = 0; l < labels; ++l)
            u(i, l) = std::max(0.0, lse - seg_logit[atom_to_seg[static_cast<std::size_t>(l)]]);
    }
    return u;
}

std::size_t neighborhood_size(std::size_t i, std::size_t n, std::size_t radius) {
    const std::size_t lo = i >= radius ? i - radius : 0;
    const std::size_t hi = std::min(n - 1, i + radius);
    return hi - lo;
}

double mixed_unary(const UnaryEnergies& u, const GcParams& p, std::size_t i, std::size_t l) {
    const auto ei = static_cast<Eigen::Index>(i);
    const auto el = static_cast<Eigen::Index>(l);
    return (1.0 - p.omega1) * u.ac(ei, el) + p.omega1 * u.adw(ei, el);
}

}  // namespace

void validate(const GcParams& params) {
    if (!(params.omega1 >= 0.0 && params.omega1 <= 1.0)) throw ValidationError("omega1 must lie in [0,1]");
    if (!(params.omega2 >= 0.0 && params.omega2 <= 1.0)) throw ValidationError("omega2 must lie in [0,1]");
    if (params.radius < 1) throw ValidationError("graph-cut radius must be at least 1");
    if (!(params.softmax_temp > 0.0) || !std::isfinite(params.softmax_temp))
        throw ValidationError("softmax temperature must be positive");
}

LabelSpace build_label_space(const Segmentation& seg_ac, const Segmentation& seg_adw, const Matrix& stream) {
    const auto n = static_cast<std::size_t>(stream.rows());
    if (seg_ac.size() != n || seg_adw.size() != n)
        throw ValidationError("label space: segmentations cover " + std::to_string(seg_ac.size()) + " and " +
                              std::to_string(seg_adw.size()) + " frames, stream has " + std::to_string(n));
    auto bounds = seg_ac.boundaries();
    const auto adw = seg_adw.boundaries();
    bounds.insert(bounds.end(), adw.begin(), adw.end());

    LabelSpace ls{Segmentation::from_boundaries(n, std::move(bounds)), seg_ac, seg_adw,
                  segment_centroids(seg_ac, stream), segment_centroids(seg_adw, stream), {}, {}};
    for (std::size_t l = 0; l < ls.atoms.segment_count(); ++l) {
        ls.atom_to_ac.push_back(seg_ac.segment_of(ls.atoms.segment_begin(l)));
        ls.atom_to_adw.push_back(seg_adw.segment_of(ls.atoms.segment_begin(l)));
    }
    return ls;
}

UnaryEnergies unary_energies(const LabelSpace& ls, const Matrix& stream, const GcParams& params) {
    validate(params);
    return {method_unary(stream, ls.centroids_ac, ls.atom_to_ac, params.softmax_temp),
            method_unary(stream, ls.centroids_adw, ls.atom_to_adw, params.softmax_temp)};
}

double pairwise_energy(std::span<const double> a, std::span<const double> b) {
    return std::exp(-cosine_distance(a, b));
}

double labeling_energy(const UnaryEnergies& unary, const Matrix& stream, const GcParams& params,
                       const std::vector<std::size_t>& labels) {
    const auto n = labels.size();
    if (static_cast<std::size_t>(stream.rows()) != n || static_cast<std::size_t>(unary.ac.rows()) != n)
        throw ValidationError("labeling length does not match the stream");
    double data = 0.0;
    for (std::size_t i = 0; i < n; ++i) data += mixed_unary(unary, params, i, labels[i]);
    double smooth = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t size = neighborhood_size(i, n, params.radius);
        if (size == 0) continue;
        const std::size_t lo = i >= params.radius ? i - params.radius : 0;
        const std::size_t hi = std::min(n - 1, i + params.radius);
        double acc = 0.0;
        for (std::size_t j = lo; j <= hi; ++j)
            if (j != i && labels[j] != labels[i]) acc += pairwise_energy(row_span(stream, i), row_span(stream, j));
        smooth += acc / static_cast<double>(size);
    }
    return data + params.omega2 * smooth;
}

std::vector<std::size_t> induced_labeling(const LabelSpace& ls, const Segmentation& candidate) {
    std::vector<std::size_t> labels(candidate.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        labels[i] = ls.atoms.segment_of(candidate.segment_begin(candidate.segment_of(i)));
    return labels;
}

GcResult minimize(const LabelSpace& ls, const UnaryEnergies& unary, const Matrix& stream, const GcParams& params) {
    validate(params);
    const auto n = static_cast<std::size_t>(stream.rows());
    const std::size_t L = ls.label_count();
    if (ls.atoms.size() != n || static_cast<std::size_t>(unary.ac.rows()) != n ||
        static_cast<std::size_t>(unary.ac.cols()) != L || static_cast<std::size_t>(unary.adw.cols()) != L)
        throw ValidationError("graph-cut inputs disagree on frame or label count");

    // Chain costs between t-1 and t for the radius-1 neighborhood.
    std::vector<double> edge(n, 0.0);
    for (std::size_t t = 1; t < n; ++t)
        edge[t] = params.omega2 * pairwise_energy(row_span(stream, t - 1), row_span(stream, t)) *
                  (1.0 / static_cast<double>(neighborhood_size(t - 1, n, 1)) +
                   1.0 / static_cast<double>(neighborhood_size(t, n, 1)));

    // cost(t, l): best energy of frames 0..t with frame t labeled l
    std::vector<double> cost(n * L);
    std::vector<double> prefix_min(L);
    std::vector<std::size_t> prefix_arg(L);
    auto prefix = [&](std::size_t t) {
        for (std::size_t l = 0; l < L; ++l) {
            const double c = cost[t * L + l];
            if (l == 0 || c < prefix_min[l - 1]) {
                prefix_min[l] = c;
                prefix_arg[l] = l;
            } else {
                prefix_min[l] = prefix_min[l - 1];
                prefix_arg[l] = prefix_arg[l - 1];
            }
        }
    };
    for (std::size_t l = 0; l < L; ++l) cost[l] = mixed_unary(unary, params, 0, l);
    for (std::size_t t = 1; t < n; ++t) {
        prefix(t - 1);
        for (std::size_t l = 0; l < L; ++l) {
            double best = cost[(t - 1) * L + l];
            if (l > 0) best = std::min(best, prefix_min[l - 1] + edge[t]);
            cost[t * L + l] = mixed_unary(unary, params, t, l) + best;
        }
    }

    std::vector<std::size_t> labels(n);
    labels[n - 1] = static_cast<std::size_t>(
        std::min_element(cost.begin() + static_cast<std::ptrdiff_t>((n - 1) * L), cost.end()) - cost.begin() -
        static_cast<std::ptrdiff_t>((n - 1) * L));
    for (std::size_t t = n - 1; t > 0; --t) {
        const std::size_t l = labels[t];
        labels[t - 1] = l;
        if (l == 0) continue;
        prefix(t - 1);
        if (prefix_min[l - 1] + edge[t] < cost[(t - 1) * L + l]) labels[t - 1] = prefix_arg[l - 1];
    }

    if (params.radius > 1) {
        // Start from the cheapest of the chain optimum and the two candidate labelings,
        // then run iterated conditional modes under the monotone constraint.
        double start_e = labeling_energy(unary, stream, params, labels);
        for (const auto* cand : {&ls.seg_ac, &ls.seg_adw}) {
            auto alt = induced_labeling(ls, *cand);
            const double e = labeling_energy(unary, stream, params, alt);
            if (e < start_e) {
                start_e = e;
                labels = std::move(alt);
            }
        }
        auto local = [&](std::size_t t, std::size_t l) {
            double e = mixed_unary(unary, params, t, l);
            const std::size_t lo = t >= params.radius ? t - params.radius : 0;
            const std::size_t hi = std::min(n - 1, t + params.radius);
            const double inv_t = 1.0 / static_cast<double>(neighborhood_size(t, n, params.radius));
            for (std::size_t j = lo; j <= hi; ++j)
                if (j != t && labels[j] != l)
                    e += params.omega2 * pairwise_energy(row_span(stream, t), row_span(stream, j)) *
                         (inv_t + 1.0 / static_cast<double>(neighborhood_size(j, n, params.radius)));
            return e;
        };
        for (int pass = 0; pass < 100; ++pass) {
            bool changed = false;
            for (std::size_t t = 0; t < n; ++t) {
                const std::size_t lo = t > 0 ? labels[t - 1] : 0;
                const std::size_t hi = t + 1 < n ? labels[t + 1] : L - 1;
                std::size_t best = labels[t];
                double best_e = local(t, best);
                for (std::size_t l = lo; l <= hi; ++l) {
                    const double e = local(t, l);
                    if (e < best_e) {
                        best_e = e;
                        best = l;
                    }
                }
                if (best != labels[t]) {
                    labels[t] = best;
                    changed = true;
                }
            }
            if (!changed) break;
        }
    }

    GcResult result{Segmentation::from_labels(labels), labels, 0.0};
    result.energy = labeling_energy(unary, stream, params, labels);
    return result;
}

}  // namespace egoseg
