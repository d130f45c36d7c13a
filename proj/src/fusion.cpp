#include "egoseg/fusion.hpp"

#include <cmath>
#include <string>

#include "egoseg/error.hpp"

namespace egoseg {

std::vector<double> signed_root_normalize(std::span<const double> v) {
    std::vector<double> out(v.size());
    double norm2 = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double r = std::sqrt(std::abs(v[i]));
        out[i] = v[i] < 0.0 ? -r : r;
        norm2 += out[i] * out[i];
    }
    if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& x : out) x *= inv;
    }
    return out;
}

Matrix signed_root_normalize_rows(const Matrix& m) {
    Matrix out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const auto row = signed_root_normalize({m.row(i).data(), static_cast<std::size_t>(m.cols())});
        out.row(i) = Eigen::Map<const Eigen::RowVectorXd>(row.data(), m.cols());
    }
    return out;
}

namespace {

void put_normalized(Matrix& dst, Eigen::Index row, Eigen::Index col0, const Eigen::Ref<const Eigen::RowVectorXd>& src,
                    double weight) {
    const double norm = src.norm();
    if (norm > 0.0)
        dst.block(row, col0, 1, src.size()) = (weight / norm) * src;
    else
        dst.block(row, col0, 1, src.size()).setZero();
}

}  // namespace

Matrix fuse(const Matrix& contextual, const Matrix& semantic, double blend) {
    if (!(blend >= 0.0 && blend <= 1.0)) throw ValidationError("blend must lie in [0,1]");
    const Eigen::Index n = contextual.rows();
    const Eigen::Index ds = semantic.cols();
    if (semantic.rows() != n && !(ds == 0 && semantic.rows() == 0))
        throw ValidationError("row-count mismatch: " + std::to_string(n) + " contextual vs " +
                              std::to_string(semantic.rows()) + " semantic rows");
    const Eigen::Index dc = contextual.cols();
    Matrix out(n, dc + ds);
    for (Eigen::Index i = 0; i < n; ++i) {
        put_normalized(out, i, 0, contextual.row(i), 1.0 - blend);
        if (ds > 0) put_normalized(out, i, dc, semantic.row(i), blend);
    }
    return out;
}

}  // namespace egoseg
