#include "parex/funcrep.hpp"

#include <cmath>
#include <sstream>

namespace parex {

Complex SampledFunction::value_at(const Vec2& p) const {
    if (source) return source(p);
    const int cx = mesh.x.locate(p[0]), cy = mesh.y.locate(p[1]);
    if (cx < 0 || cy < 0) return 0.0;
    const int gx = mesh.x.order, gy = mesh.y.order;
    std::vector<double> lx(gx), ly(gy);
    lagrange_row(mesh.x, cx, p[0], lx.data());
    lagrange_row(mesh.y, cy, p[1], ly.data());
    Complex s = 0.0;
    for (int a = 0; a < gx; ++a) {
        Complex r = 0.0;
        for (int b = 0; b < gy; ++b) r += ly[b] * values(cx * gx + a, cy * gy + b);
        s += lx[a] * r;
    }
    return s;
}

Complex SampledFunction::integral() const {
    const Eigen::Map<const Eigen::VectorXd> wx(mesh.x.weights.data(), mesh.nx());
    const Eigen::Map<const Eigen::VectorXd> wy(mesh.y.weights.data(), mesh.ny());
    return (wx.cast<Complex>().transpose() * values * wy.cast<Complex>())(0, 0);
}

SampledFunction::Block SampledFunction::support_block() const {
    Block b{static_cast<int>(values.rows()), 0, static_cast<int>(values.cols()), 0};
    for (int j = 0; j < values.cols(); ++j)
        for (int i = 0; i < values.rows(); ++i)
            if (values(i, j) != Complex(0.0)) {
                b.x0 = std::min(b.x0, i);
                b.x1 = std::max(b.x1, i + 1);
                b.y0 = std::min(b.y0, j);
                b.y1 = std::max(b.y1, j + 1);
            }
    return b;
}

SampledFunction& SampledFunction::operator+=(const SampledFunction& o) {
    if (o.values.rows() != values.rows() || o.values.cols() != values.cols() || o.mesh.x.edges != mesh.x.edges ||
        o.mesh.y.edges != mesh.y.edges)
        throw InvalidInput("SampledFunction: addition requires a common mesh");
    values += o.values;
    if (source && o.source) {
        source = [f = source, g = o.source](const Vec2& p) { return f(p) + g(p); };
    } else {
        source = nullptr;
    }
    return *this;
}

SampledFunction& SampledFunction::operator*=(Complex s) {
    values *= s;
    if (source) source = [f = source, s](const Vec2& p) { return s * f(p); };
    return *this;
}

SampledFunction operator+(SampledFunction a, const SampledFunction& b) { return a += b; }
SampledFunction operator*(Complex s, SampledFunction a) { return a *= s; }

Grid cover_grid(const Vec2& lo, double side) {
    BaseDomain d{lo, side, std::nullopt};
    return Grid{d, 0, {root_square(d)}};
}

TensorMesh grid_mesh(const Grid& grid, const QuadratureRule& rule) {
    if (rule.order < 1 || rule.refine < 1) throw InvalidInput("QuadratureRule: order and refine must be >= 1");
    const int cells = (1 << grid.level) * rule.refine;
    const auto& d = grid.domain;
    return {uniform_axis(d.origin[0], d.origin[0] + d.side, cells, rule.order),
            uniform_axis(d.origin[1], d.origin[1] + d.side, cells, rule.order)};
}

SampledFunction sample_on(const Closure& f, const TensorMesh& mesh, const Grid& grid, const QuadratureRule& rule) {
    SampledFunction out{grid, rule, mesh, Eigen::MatrixXcd(mesh.nx(), mesh.ny()), f};
    for (int b = 0; b < mesh.ny(); ++b)
        for (int a = 0; a < mesh.nx(); ++a) {
            const Vec2 x = out.node(a, b);
            const Complex v = f(x);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                std::ostringstream os;
                os << "sample: non-finite value at node (" << x[0] << ", " << x[1] << ")";
                throw InvalidInput(os.str());
            }
            out.values(a, b) = v;
        }
    return out;
}

SampledFunction sample(const Closure& f, const Grid& grid, const QuadratureRule& rule) {
    if (!f) throw InvalidInput("sample: empty closure");
    return sample_on(f, grid_mesh(grid, rule), grid, rule);
}

SampledFunction resample(const SampledFunction& f, const TensorMesh& target) {
    if (f.source) return sample_on(f.source, target, f.grid, f.rule);
    const auto Lx = interpolation_matrix(f.mesh.x, target.x);
    const auto Ly = interpolation_matrix(f.mesh.y, target.y);
    const Eigen::MatrixXd re = Lx * (Ly * f.values.real().transpose()).transpose();
    const Eigen::MatrixXd im = Lx * (Ly * f.values.imag().transpose()).transpose();
    SampledFunction out{f.grid, f.rule, target, Eigen::MatrixXcd(re.rows(), re.cols()), nullptr};
    out.values.real() = re;
    out.values.imag() = im;
    return out;
}

SampledFunction restrict(const SampledFunction& f, const DyadicSquare& K) {
    const Vec2 lo = K.lower(), hi = K.upper();
    auto aligned = [](const Axis& a, double e) { return e <= a.lo() || e >= a.hi() || a.has_edge(e); };
    if (!aligned(f.mesh.x, lo[0]) || !aligned(f.mesh.x, hi[0]) || !aligned(f.mesh.y, lo[1]) ||
        !aligned(f.mesh.y, hi[1]))
        throw InvalidInput("restrict: square is not aligned with the sampling mesh");
    SampledFunction out = f;
    for (int a = 0; a < f.mesh.nx(); ++a) {
        const double x = f.mesh.x.nodes[a];
        const bool in_x = x >= lo[0] && x < hi[0];
        for (int b = 0; b < f.mesh.ny(); ++b) {
            const double y = f.mesh.y.nodes[b];
            if (!(in_x && y >= lo[1] && y < hi[1])) out.values(a, b) = 0.0;
        }
    }
    if (f.source) out.source = [g = f.source, K](const Vec2& p) { return K.contains(p) ? g(p) : Complex(0.0); };
    return out;
}

double lp_norm(const SampledFunction& f, double p) {
    if (!(p >= 1.0)) throw InvalidInput("lp_norm: p must be >= 1");
    if (std::isinf(p)) return f.values.size() ? f.values.cwiseAbs().maxCoeff() : 0.0;
    double s = 0.0;
    for (int b = 0; b < f.mesh.ny(); ++b)
        for (int a = 0; a < f.mesh.nx(); ++a)
            s += f.mesh.x.weights[a] * f.mesh.y.weights[b] * std::pow(std::abs(f.values(a, b)), p);
    return std::pow(s, 1.0 / p);
}

SampledFunction modulate(const SampledFunction& f, const Vec3& z) {
    SampledFunction out = f;
    for (int b = 0; b < f.mesh.ny(); ++b)
        for (int a = 0; a < f.mesh.nx(); ++a)
            out.values(a, b) *= std::polar(1.0, dot(z, phi(f.node(a, b))));
    if (f.source) out.source = [g = f.source, z](const Vec2& p) { return std::polar(1.0, dot(z, phi(p))) * g(p); };
    return out;
}

SampledFunction parabolic_rescale(const SampledFunction& f, const Vec2& ybar, double rho) {
    if (!(rho > 0.0 && rho < 1.0)) throw InvalidInput("parabolic_rescale: rho must lie in (0, 1)");
    auto map_axis = [&](const Axis& a, double shift) {
        std::vector<double> e(a.edges.size());
        for (std::size_t k = 0; k < e.size(); ++k) e[k] = a.edges[k] / rho - shift;
        return make_axis(std::move(e), a.order);
    };
    SampledFunction out = f;
    out.mesh = {map_axis(f.mesh.x, ybar[0]), map_axis(f.mesh.y, ybar[1])};
    out.grid.domain.origin = {f.grid.domain.origin[0] / rho - ybar[0], f.grid.domain.origin[1] / rho - ybar[1]};
    out.grid.domain.side = f.grid.domain.side / rho;
    for (auto& s : out.grid.squares) {
        s.origin = out.grid.domain.origin;
        s.root_side = out.grid.domain.side;
    }
    if (f.source)
        out.source = [g = f.source, ybar, rho](const Vec2& y) { return g({rho * (ybar[0] + y[0]), rho * (ybar[1] + y[1])}); };
    return out;
}

}  // namespace parex
