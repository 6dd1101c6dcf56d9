#pragma once

#include <functional>
#include <limits>

#include <Eigen/Dense>

#include "parex/grid.hpp"
#include "parex/mesh.hpp"
#include "parex/quadrature.hpp"

namespace parex {

using Closure = std::function<Complex(const Vec2&)>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Complex function on the base domain, stored at the nodes of a tensor
/// Gauss mesh. `values(a, b)` is the value at (mesh.x.nodes[a], mesh.y.nodes[b]).
struct SampledFunction {
    Grid grid;
    QuadratureRule rule;
    TensorMesh mesh;
    Eigen::MatrixXcd values;
    Closure source;  // optional; lets consumers resample instead of interpolate

    Vec2 node(int a, int b) const { return {mesh.x.nodes[a], mesh.y.nodes[b]}; }
    /// Value at an arbitrary point: the source if present, else cellwise
    /// Lagrange interpolation; zero outside the mesh.
    Complex value_at(const Vec2& p) const;
    Complex integral() const;
    /// Row/column index ranges [x0, x1) x [y0, y1) holding every nonzero value.
    struct Block {
        int x0 = 0, x1 = 0, y0 = 0, y1 = 0;
        bool empty() const { return x0 >= x1 || y0 >= y1; }
    };
    Block support_block() const;

    SampledFunction& operator+=(const SampledFunction& o);
    SampledFunction& operator*=(Complex s);
};

SampledFunction operator+(SampledFunction a, const SampledFunction& b);
SampledFunction operator*(Complex s, SampledFunction a);

/// Mesh of a grid: each square split into rule.refine cells per axis.
TensorMesh grid_mesh(const Grid& grid, const QuadratureRule& rule);

SampledFunction sample(const Closure& f, const Grid& grid, const QuadratureRule& rule = {});
/// Samples on an explicit mesh; `grid` is metadata describing the covered square.
SampledFunction sample_on(const Closure& f, const TensorMesh& mesh, const Grid& grid, const QuadratureRule& rule);
/// Transfers f onto a mesh whose cells refine f's cells (or lie outside them).
SampledFunction resample(const SampledFunction& f, const TensorMesh& target);

SampledFunction restrict(const SampledFunction& f, const DyadicSquare& K);
double lp_norm(const SampledFunction& f, double p);
SampledFunction modulate(const SampledFunction& f, const Vec3& z);
/// y' -> f(rho (ybar + y')) on the domain U / rho - ybar.
SampledFunction parabolic_rescale(const SampledFunction& f, const Vec2& ybar, double rho);

/// Single-square grid over [lo, lo + side)^2, used as metadata for meshes that
/// are not generated from a dyadic tiling.
Grid cover_grid(const Vec2& lo, double side);

}  // namespace parex
