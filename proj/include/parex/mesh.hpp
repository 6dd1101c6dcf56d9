#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "parex/types.hpp"

namespace parex {

/// One axis of a tensor quadrature mesh: consecutive `edges` bound the cells,
/// each cell carries `order` Gauss–Legendre nodes.
struct Axis {
    std::vector<double> edges;
    int order = 8;
    std::vector<double> nodes;
    std::vector<double> weights;

    int cells() const { return static_cast<int>(edges.size()) - 1; }
    int size() const { return static_cast<int>(nodes.size()); }
    double lo() const { return edges.front(); }
    double hi() const { return edges.back(); }
    double max_cell() const;
    /// Cell containing x (half-open), or -1 outside [lo, hi].
    int locate(double x) const;
    /// Whether x coincides with an edge up to a relative tolerance.
    bool has_edge(double x, double tol = 1e-12) const;
};

/// Builds the axis from sorted edges; near-duplicate edges are merged.
Axis make_axis(std::vector<double> edges, int order);
/// Uniform cells: `cells` equal intervals of [lo, hi].
Axis uniform_axis(double lo, double hi, int cells, int order);
/// Splits every cell into `k` equal cells.
Axis subdivide(const Axis& a, int k);
/// Splits cells until each is no wider than h.
Axis refine_to_width(const Axis& a, double h);
/// Union of the edges of `a` and the extra points that fall inside [lo, hi].
Axis add_edges(const Axis& a, const std::vector<double>& extra);

/// Merges and sorts breakpoints; points closer than `tol` collapse.
std::vector<double> merge_breaks(std::vector<double> pts, double tol = 1e-13);

/// Lagrange interpolation from the nodes of `from` onto the nodes of `to`.
/// Every cell of `to` must lie inside one cell of `from`; nodes of `to` outside
/// [from.lo, from.hi] get a zero row.
Eigen::SparseMatrix<double> interpolation_matrix(const Axis& from, const Axis& to);

/// Lagrange weights of the nodes of cell `cell` at point x.
void lagrange_row(const Axis& a, int cell, double x, double* out);

struct TensorMesh {
    Axis x;
    Axis y;

    int nx() const { return x.size(); }
    int ny() const { return y.size(); }
    long long node_count() const { return static_cast<long long>(nx()) * ny(); }
    double max_cell() const;
};

}  // namespace parex
