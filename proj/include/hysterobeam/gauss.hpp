#pragma once

#include <span>

namespace hysterobeam {

struct GaussPoint {
    double node;    // abscissa in [-1, 1]
    double weight;
};

/// Gauss-Legendre rule on [-1, 1]. Supported orders: 1..10.
/// Throws std::invalid_argument outside that range.
std::span<const GaussPoint> gauss_legendre(int n);

}  // namespace hysterobeam
