#pragma once

#include <span>
#include <vector>

#include "egoseg/types.hpp"

namespace egoseg {

/// x -> sign(x) * sqrt(|x|), then L2 normalization. Zero maps to zero.
std::vector<double> signed_root_normalize(std::span<const double> v);

/// Row-wise signed_root_normalize.
Matrix signed_root_normalize_rows(const Matrix& m);

/// Per frame: [(1 - blend) * c / |c|, blend * s / |s|]; zero rows stay zero.
/// `semantic` may have zero columns.
Matrix fuse(const Matrix& contextual, const Matrix& semantic, double blend);

}  // namespace egoseg
