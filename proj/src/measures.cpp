#include "parex/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "parex/parallel.hpp"
#include "parex/quadrature.hpp"

namespace parex {

Rect Rect::enlarged(const DyadicSquare& s, double eta) {
    const double pad = eta * s.side();
    const Vec2 lo = s.lower(), hi = s.upper();
    return {{lo[0] - pad, lo[1] - pad}, {hi[0] + pad, hi[1] + pad}};
}

namespace {

// Range of |x|^2 over a closed rectangle.
std::pair<double, double> square_norm_range(const Rect& r) {
    double lo = 0.0, hi = 0.0;
    for (int k = 0; k < 2; ++k) {
        const double a = r.lo[k], b = r.hi[k];
        const double near = (a <= 0.0 && b >= 0.0) ? 0.0 : std::min(std::abs(a), std::abs(b));
        const double far = std::max(std::abs(a), std::abs(b));
        lo += near * near;
        hi += far * far;
    }
    return {lo, hi};
}

// Grid lines of the sampling grid of g (square boundaries).
std::vector<double> grid_lines(const SampledFunction& g, int axis) {
    const auto& d = g.grid.domain;
    const int n = 1 << g.grid.level;
    std::vector<double> out;
    for (int k = 0; k <= n; ++k) out.push_back(d.origin[axis] + d.side * k / n);
    return out;
}

}  // namespace

Box3 support_box(const Rect& U1, const Rect& U2) {
    const auto [n1lo, n1hi] = square_norm_range(U1);
    const auto [n2lo, n2hi] = square_norm_range(U2);
    return {{U1.lo[0] - U2.hi[0], U1.lo[1] - U2.hi[1], n1lo - n2hi},
            {U1.hi[0] - U2.lo[0], U1.hi[1] - U2.lo[1], n1hi - n2lo}};
}

Vec3 ConvolutionDensity::point(int i, int j, int k) const {
    return {box.lo[0] + (i + 0.5) * spacing[0], box.lo[1] + (j + 0.5) * spacing[1], box.lo[2] + (k + 0.5) * spacing[2]};
}

Complex ConvolutionDensity::mass() const {
    Complex s = 0.0;
    for (const auto& v : values) s += v;
    return s * cell_volume();
}

Complex ConvolutionDensity::fourier(const Vec3& xi) const {
    // separable phase: precompute per-axis factors
    std::array<std::vector<Complex>, 3> e;
    for (int ax = 0; ax < 3; ++ax) {
        e[ax].resize(n[ax]);
        for (int i = 0; i < n[ax]; ++i)
            e[ax][i] = std::polar(1.0, -xi[ax] * (box.lo[ax] + (i + 0.5) * spacing[ax]));
    }
    Complex s = 0.0;
    for (int i = 0; i < n[0]; ++i)
        for (int j = 0; j < n[1]; ++j) {
            Complex r = 0.0;
            const Complex* v = &values[(static_cast<std::size_t>(i) * n[1] + j) * n[2]];
            for (int k = 0; k < n[2]; ++k) r += v[k] * e[2][k];
            s += r * e[0][i] * e[1][j];
        }
    return s * cell_volume();
}

Complex fiber_density(const SampledFunction& g1, const Rect& U1, const SampledFunction& g2, const Rect& U2,
                      const Vec3& a, double nu, const ConvolveOptions& opt) {
    const Vec2 ap{a[0], a[1]};
    const double L = norm(ap);
    if (L < 0.5 * nu) throw DegenerateFiber("convolve_pushforwards: |a'| below nu/2 at a requested point");
    const double c = (a[2] - L * L) / (2.0 * L * L);
    const Vec2 u0{c * ap[0], c * ap[1]};
    const Vec2 dir{-ap[1] / L, ap[0] / L};
    Vec2 lo, hi;
    for (int k = 0; k < 2; ++k) {
        lo[k] = std::max(U2.lo[k], U1.lo[k] - ap[k]);
        hi[k] = std::min(U2.hi[k], U1.hi[k] - ap[k]);
        if (hi[k] <= lo[k]) return 0.0;
    }
    double t0 = -std::numeric_limits<double>::infinity(), t1 = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 2; ++k) {
        if (std::abs(dir[k]) < 1e-15) {
            if (u0[k] < lo[k] || u0[k] > hi[k]) return 0.0;
            continue;
        }
        double ta = (lo[k] - u0[k]) / dir[k], tb = (hi[k] - u0[k]) / dir[k];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    if (!(t1 > t0)) return 0.0;
    std::vector<double> cuts{t0, t1};
    for (int k = 0; k < 2; ++k) {
        if (std::abs(dir[k]) < 1e-15) continue;
        for (double x : grid_lines(g2, k)) cuts.push_back((x - u0[k]) / dir[k]);
        for (double x : grid_lines(g1, k)) cuts.push_back((x - ap[k] - u0[k]) / dir[k]);
    }
    std::vector<double> pieces;
    for (double t : cuts)
        if (t >= t0 && t <= t1) pieces.push_back(t);
    std::sort(pieces.begin(), pieces.end());
    pieces.erase(std::unique(pieces.begin(), pieces.end(), [](double x, double y) { return y - x < 1e-14; }),
                 pieces.end());
    const double total = t1 - t0;
    Complex s = 0.0;
    for (std::size_t p = 0; p + 1 < pieces.size(); ++p) {
        const double len = pieces[p + 1] - pieces[p];
        if (len <= 0.0) continue;
        const int q = std::max(4, static_cast<int>(std::ceil(opt.fiber_nodes * len / total)));
        const GaussRule& g = gauss_legendre(q);
        for (int k = 0; k < q; ++k) {
            const double t = pieces[p] + len * g.nodes[k];
            const Vec2 u{u0[0] + t * dir[0], u0[1] + t * dir[1]};
            s += len * g.weights[k] * g1.value_at({u[0] + ap[0], u[1] + ap[1]}) * g2.value_at(u);
        }
    }
    return s / (2.0 * L);
}

ConvolutionDensity convolve_pushforwards(const SampledFunction& g1, const Rect& U1, const SampledFunction& g2,
                                         const Rect& U2, const Box3& box, const Vec3& spacing, double nu,
                                         const ConvolveOptions& opt) {
    if (!(nu > 0.0)) throw InvalidInput("convolve_pushforwards: nu must be positive");
    ConvolutionDensity D;
    D.box = box;
    D.nu = nu;
    for (int ax = 0; ax < 3; ++ax) {
        const double ext = box.hi[ax] - box.lo[ax];
        if (!(spacing[ax] > 0.0) || ext < 0.0) throw InvalidInput("convolve_pushforwards: bad box or spacing");
        D.n[ax] = std::max(1, static_cast<int>(std::ceil(ext / spacing[ax] - 1e-9)));
        D.spacing[ax] = ext / D.n[ax];
    }
    // degeneracy is checked over the whole request before any work
    for (int i = 0; i < D.n[0]; ++i)
        for (int j = 0; j < D.n[1]; ++j) {
            const Vec3 p = D.point(i, j, 0);
            if (std::hypot(p[0], p[1]) < 0.5 * nu)
                throw DegenerateFiber("convolve_pushforwards: |a'| below nu/2 at a requested point");
        }
    D.values.assign(static_cast<std::size_t>(D.n[0]) * D.n[1] * D.n[2], 0.0);
    parallel_for(D.n[0], [&](int i) {
        for (int j = 0; j < D.n[1]; ++j)
            for (int k = 0; k < D.n[2]; ++k)
                D.values[(static_cast<std::size_t>(i) * D.n[1] + j) * D.n[2] + k] =
                    fiber_density(g1, U1, g2, U2, D.point(i, j, k), nu, opt);
    });
    return D;
}

DerivativeProbe derivative_scale_probe(const ConvolutionDensity& D, int m, const LemmaScales& sc) {
    if (m < 0 || m > 2) throw InvalidInput("derivative_scale_probe: order must be 0, 1 or 2");
    DerivativeProbe out;
    out.order = m;
    for (const auto& v : D.values) out.max_density = std::max(out.max_density, std::abs(v));
    out.lemma_bound = std::pow(D.nu, -m) * std::ldexp(1.0, m * sc.s2) *
                      std::pow(2.0, (2.0 / sc.p) * (sc.s1 + sc.s2)) * sc.norm1 * sc.norm2;
    if (m == 0) {
        out.max_derivative = out.max_density;
        out.fitted_scale = out.max_density;
        out.ratio = out.max_density / out.lemma_bound;
        return out;
    }
    const double hmax = D.nu * std::ldexp(1.0, -sc.s2) / 8.0;
    std::vector<int> axes;
    for (int ax = 0; ax < 3; ++ax)
        if (D.n[ax] >= 2 * m + 1) {
            if (D.spacing[ax] > hmax * (1.0 + 1e-12))
                throw PreconditionError("derivative_scale_probe: grid spacing exceeds nu 2^{-s2} / 8");
            axes.push_back(ax);
        }
    if (axes.empty()) throw PreconditionError("derivative_scale_probe: no axis has enough points");
    for (int i = 0; i < D.n[0]; ++i)
        for (int j = 0; j < D.n[1]; ++j)
            for (int k = 0; k < D.n[2]; ++k) {
                const Complex c0 = D.at(i, j, k);
                if (c0 == Complex(0.0)) continue;
                double sq = 0.0;
                bool ok = true;
                for (int ax : axes) {
                    std::array<int, 3> lo{i, j, k}, hi{i, j, k};
                    lo[ax] -= 1;
                    hi[ax] += 1;
                    if (lo[ax] < 0 || hi[ax] >= D.n[ax]) {
                        ok = false;
                        break;
                    }
                    const Complex a = D.at(lo[0], lo[1], lo[2]), b = D.at(hi[0], hi[1], hi[2]);
                    if (a == Complex(0.0) || b == Complex(0.0)) {
                        ok = false;
                        break;
                    }
                    const double h = D.spacing[ax];
                    const double v = m == 1 ? std::abs(b - a) / (2 * h) : std::abs(b - 2.0 * c0 + a) / (h * h);
                    sq = m == 1 ? sq + v * v : std::max(sq, v);
                }
                if (!ok) continue;
                out.max_derivative = std::max(out.max_derivative, m == 1 ? std::sqrt(sq) : sq);
            }
    out.fitted_scale = out.max_density > 0.0 ? std::pow(out.max_derivative / out.max_density, 1.0 / m) : 0.0;
    out.ratio = out.max_derivative / out.lemma_bound;
    return out;
}

nlohmann::json density_header(const ConvolutionDensity& d) {
    return {{"box", {{"lo", {d.box.lo[0], d.box.lo[1], d.box.lo[2]}}, {"hi", {d.box.hi[0], d.box.hi[1], d.box.hi[2]}}}},
            {"spacing", {d.spacing[0], d.spacing[1], d.spacing[2]}},
            {"shape", {d.n[0], d.n[1], d.n[2]}},
            {"nu", d.nu}};
}

void write_density_csv(const ConvolutionDensity& d, std::ostream& os) {
    os << "# schema=1\n";
    os << "a1,a2,a3,value,imag\n";
    os.precision(17);
    for (int i = 0; i < d.n[0]; ++i)
        for (int j = 0; j < d.n[1]; ++j)
            for (int k = 0; k < d.n[2]; ++k) {
                const Vec3 p = d.point(i, j, k);
                const Complex v = d.at(i, j, k);
                os << p[0] << ',' << p[1] << ',' << p[2] << ',' << v.real() << ',' << v.imag() << '\n';
            }
}

}  // namespace parex
