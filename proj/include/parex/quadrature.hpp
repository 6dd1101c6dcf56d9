#pragma once

#include <vector>

namespace parex {

struct GaussRule {
    std::vector<double> nodes;    // in (0, 1)
    std::vector<double> weights;  // positive, sum to 1
};

/// Gauss–Legendre rule with n points mapped to [0, 1]. Cached per n.
const GaussRule& gauss_legendre(int n);

/// Per-axis tensor rule: `order` Gauss points in each of `refine` equal cells.
struct QuadratureRule {
    int order = 8;
    int refine = 1;

    const GaussRule& base() const { return gauss_legendre(order); }
    int points_per_axis() const { return order * refine; }
};

}  // namespace parex
