#include "parex/mesh.hpp"

#include <algorithm>
#include <cmath>

#include "parex/quadrature.hpp"

namespace parex {

double Axis::max_cell() const {
    double h = 0.0;
    for (int c = 0; c < cells(); ++c) h = std::max(h, edges[c + 1] - edges[c]);
    return h;
}

int Axis::locate(double x) const {
    if (edges.empty() || x < edges.front() || x > edges.back()) return -1;
    auto it = std::upper_bound(edges.begin(), edges.end(), x);
    int c = static_cast<int>(it - edges.begin()) - 1;
    return std::min(c, cells() - 1);
}

bool Axis::has_edge(double x, double tol) const {
    const double scale = std::max({1.0, std::abs(lo()), std::abs(hi())});
    auto it = std::lower_bound(edges.begin(), edges.end(), x - tol * scale);
    return it != edges.end() && std::abs(*it - x) <= tol * scale;
}

std::vector<double> merge_breaks(std::vector<double> pts, double tol) {
    std::sort(pts.begin(), pts.end());
    std::vector<double> out;
    for (double p : pts) {
        if (!std::isfinite(p)) throw InvalidInput("merge_breaks: non-finite breakpoint");
        const double scale = std::max(1.0, std::abs(p));
        if (out.empty() || p - out.back() > tol * scale) out.push_back(p);
    }
    return out;
}

Axis make_axis(std::vector<double> edges, int order) {
    Axis a;
    a.edges = merge_breaks(std::move(edges));
    if (a.edges.size() < 2) throw InvalidInput("make_axis: need at least two distinct edges");
    a.order = order;
    const GaussRule& g = gauss_legendre(order);
    a.nodes.reserve(static_cast<std::size_t>(a.cells()) * order);
    a.weights.reserve(a.nodes.capacity());
    for (int c = 0; c < a.cells(); ++c) {
        const double lo = a.edges[c], h = a.edges[c + 1] - a.edges[c];
        for (int k = 0; k < order; ++k) {
            a.nodes.push_back(lo + h * g.nodes[k]);
            a.weights.push_back(h * g.weights[k]);
        }
    }
    return a;
}

Axis uniform_axis(double lo, double hi, int cells, int order) {
    if (cells < 1 || !(hi > lo)) throw InvalidInput("uniform_axis: bad interval");
    std::vector<double> e(cells + 1);
    for (int c = 0; c <= cells; ++c) e[c] = lo + (hi - lo) * c / cells;
    e.back() = hi;
    return make_axis(std::move(e), order);
}

Axis subdivide(const Axis& a, int k) {
    if (k <= 1) return a;
    std::vector<double> e;
    e.reserve(static_cast<std::size_t>(a.cells()) * k + 1);
    for (int c = 0; c < a.cells(); ++c)
        for (int s = 0; s < k; ++s) e.push_back(a.edges[c] + (a.edges[c + 1] - a.edges[c]) * s / k);
    e.push_back(a.hi());
    return make_axis(std::move(e), a.order);
}

Axis refine_to_width(const Axis& a, double h) {
    if (!(h > 0.0)) throw InvalidInput("refine_to_width: width must be positive");
    if (a.max_cell() <= h) return a;
    std::vector<double> e;
    for (int c = 0; c < a.cells(); ++c) {
        const double w = a.edges[c + 1] - a.edges[c];
        const int k = std::max(1, static_cast<int>(std::ceil(w / h - 1e-9)));
        for (int s = 0; s < k; ++s) e.push_back(a.edges[c] + w * s / k);
    }
    e.push_back(a.hi());
    return make_axis(std::move(e), a.order);
}

Axis add_edges(const Axis& a, const std::vector<double>& extra) {
    std::vector<double> e = a.edges;
    for (double x : extra)
        if (x > a.lo() && x < a.hi()) e.push_back(x);
    return make_axis(std::move(e), a.order);
}

void lagrange_row(const Axis& a, int cell, double x, double* out) {
    const int g = a.order;
    const double* xs = a.nodes.data() + static_cast<std::ptrdiff_t>(cell) * g;
    for (int k = 0; k < g; ++k) {
        double v = 1.0;
        for (int m = 0; m < g; ++m)
            if (m != k) v *= (x - xs[m]) / (xs[k] - xs[m]);
        out[k] = v;
    }
}

Eigen::SparseMatrix<double> interpolation_matrix(const Axis& from, const Axis& to) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(to.size()) * from.order);
    std::vector<double> row(from.order);
    for (int c = 0; c < to.cells(); ++c) {
        const double mid = 0.5 * (to.edges[c] + to.edges[c + 1]);
        const int src = from.locate(mid);
        if (src < 0) continue;
        for (int k = 0; k < to.order; ++k) {
            const int r = c * to.order + k;
            lagrange_row(from, src, to.nodes[r], row.data());
            for (int m = 0; m < from.order; ++m) trips.emplace_back(r, src * from.order + m, row[m]);
        }
    }
    Eigen::SparseMatrix<double> L(to.size(), from.size());
    L.setFromTriplets(trips.begin(), trips.end());
    return L;
}

double TensorMesh::max_cell() const { return std::max(x.max_cell(), y.max_cell()); }

}  // namespace parex
