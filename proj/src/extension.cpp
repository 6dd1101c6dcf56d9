#include "parex/extension.hpp"

#include <cmath>
#include <ostream>

#include "parex/parallel.hpp"
#include "parex/rng.hpp"

namespace parex {

namespace {

constexpr double kBallVolume = 4.0 / 3.0 * kPi;

FrequencySet stratified(RegionKind kind, double inner, double outer, int count, std::uint64_t seed) {
    if (count < 1) throw InvalidInput("FrequencySet: count must be positive");
    if (!(outer > inner) || inner < 0.0) throw InvalidInput("FrequencySet: bad radii");
    FrequencySet s;
    s.kind = kind;
    s.inner = inner;
    s.outer = outer;
    s.seed = seed;
    Rng rng(seed);
    const double a = inner * inner * inner, b = outer * outer * outer;
    const double w = kBallVolume * (b - a) / count;
    for (int k = 0; k < count; ++k) {
        const double t = (k + rng.uniform()) / count;
        const double r = std::cbrt(a + (b - a) * t);
        const Vec3 u = rng.unit_vector();
        s.points.push_back({r * u[0], r * u[1], r * u[2]});
        s.weights.push_back(w);
    }
    return s;
}

}  // namespace

double FrequencySet::max_norm() const {
    double m = 0.0;
    for (const auto& p : points) m = std::max(m, norm(p));
    return m;
}

double FrequencySet::weight_sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

double FrequencySet::region_volume() const {
    switch (kind) {
        case RegionKind::Ball:
        case RegionKind::Annulus:
        case RegionKind::Lattice:
        case RegionKind::MonteCarlo: return kBallVolume * (std::pow(outer, 3) - std::pow(inner, 3));
        case RegionKind::Explicit: return weight_sum();
    }
    return 0.0;
}

FrequencySet FrequencySet::ball(double R, int count, std::uint64_t seed) {
    return stratified(RegionKind::Ball, 0.0, R, count, seed);
}

FrequencySet FrequencySet::annulus(int r, int count, std::uint64_t seed) {
    auto s = stratified(RegionKind::Annulus, std::ldexp(1.0, r - 1), std::ldexp(1.0, r), count, seed);
    return s;
}

FrequencySet FrequencySet::shell(double inner, double outer, int count, std::uint64_t seed) {
    return stratified(RegionKind::Annulus, inner, outer, count, seed);
}

FrequencySet FrequencySet::lattice(double spacing, double R) {
    if (!(spacing > 0.0) || !(R >= 0.0)) throw InvalidInput("FrequencySet::lattice: bad spacing or radius");
    FrequencySet s;
    s.kind = RegionKind::Lattice;
    s.outer = R;
    const int n = static_cast<int>(std::floor(R / spacing));
    const double w = spacing * spacing * spacing;
    for (int a = -n; a <= n; ++a)
        for (int b = -n; b <= n; ++b)
            for (int c = -n; c <= n; ++c) {
                const Vec3 p{a * spacing, b * spacing, c * spacing};
                if (norm(p) <= R) {
                    s.points.push_back(p);
                    s.weights.push_back(w);
                }
            }
    return s;
}

FrequencySet FrequencySet::explicit_points(std::vector<Vec3> points, std::vector<double> weights) {
    if (points.empty()) throw InvalidInput("FrequencySet: empty point list");
    if (weights.empty()) weights.assign(points.size(), 1.0);
    if (weights.size() != points.size()) throw InvalidInput("FrequencySet: weight count mismatch");
    FrequencySet s;
    s.kind = RegionKind::Explicit;
    s.points = std::move(points);
    s.weights = std::move(weights);
    s.outer = s.max_norm();
    return s;
}

FrequencySet FrequencySet::monte_carlo(double inner, double outer, int count, std::uint64_t seed) {
    if (count < 1 || !(outer > inner) || inner < 0.0) throw InvalidInput("FrequencySet::monte_carlo: bad arguments");
    FrequencySet s;
    s.kind = RegionKind::MonteCarlo;
    s.inner = inner;
    s.outer = outer;
    s.seed = seed;
    Rng rng(seed);
    const double w = kBallVolume * (std::pow(outer, 3) - std::pow(inner, 3)) / count;
    while (s.size() < count) {
        const Vec3 p{rng.uniform(-outer, outer), rng.uniform(-outer, outer), rng.uniform(-outer, outer)};
        const double r = norm(p);
        if (r > outer || r <= inner) continue;
        s.points.push_back(p);
        s.weights.push_back(w);
    }
    return s;
}

FrequencySet FrequencySet::within(double R) const {
    FrequencySet s = *this;
    s.points.clear();
    s.weights.clear();
    for (int k = 0; k < size(); ++k)
        if (norm(points[k]) <= R) {
            s.points.push_back(points[k]);
            s.weights.push_back(weights[k]);
        }
    s.outer = std::min(outer, R);
    return s;
}

namespace {

SampledFunction sub_function(const SampledFunction& f, const SampledFunction::Block& b) {
    const int gx = f.mesh.x.order, gy = f.mesh.y.order;
    const int cx0 = b.x0 / gx, cx1 = (b.x1 + gx - 1) / gx;
    const int cy0 = b.y0 / gy, cy1 = (b.y1 + gy - 1) / gy;
    if (cx0 == 0 && cy0 == 0 && cx1 == f.mesh.x.cells() && cy1 == f.mesh.y.cells()) return f;
    SampledFunction s;
    s.grid = f.grid;
    s.rule = f.rule;
    s.source = f.source;
    s.mesh.x = make_axis({f.mesh.x.edges.begin() + cx0, f.mesh.x.edges.begin() + cx1 + 1}, gx);
    s.mesh.y = make_axis({f.mesh.y.edges.begin() + cy0, f.mesh.y.edges.begin() + cy1 + 1}, gy);
    s.values = f.values.block(cx0 * gx, cy0 * gy, (cx1 - cx0) * gx, (cy1 - cy0) * gy);
    return s;
}

}  // namespace

Eigen::VectorXcd extension_values(const SampledFunction& f, const std::vector<Vec3>& xi, const ExtendOptions& opt,
                                  PhaseCertificate* cert) {
    const int P = static_cast<int>(xi.size());
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(P);
    const auto block = f.support_block();
    if (P == 0 || block.empty()) {
        if (cert) *cert = {};
        return out;
    }
    SampledFunction g = sub_function(f, block);
    const double rx = std::max(std::abs(g.mesh.x.lo()), std::abs(g.mesh.x.hi()));
    const double ry = std::max(std::abs(g.mesh.y.lo()), std::abs(g.mesh.y.hi()));
    const double radius = std::hypot(rx, ry);
    double xmax = 0.0;
    for (const auto& p : xi) xmax = std::max(xmax, norm(p));
    const double rate = xmax * (1.0 + 2.0 * radius);
    TensorMesh target = g.mesh;
    if (rate > 0.0) {
        const double h = opt.phase_per_cell / rate;
        target.x = refine_to_width(target.x, h);
        target.y = refine_to_width(target.y, h);
    }
    if (opt.extra_refine > 1) {
        target.x = subdivide(target.x, opt.extra_refine);
        target.y = subdivide(target.y, opt.extra_refine);
    }
    if (target.x.edges != g.mesh.x.edges || target.y.edges != g.mesh.y.edges) g = resample(g, target);

    const int nx = g.mesh.nx(), ny = g.mesh.ny();
    const double products = double(P) * nx * ny;
    if (products > opt.budget)
        throw CapacityError("extend: " + std::to_string(products) + " node-frequency products exceed the budget of " +
                            std::to_string(opt.budget) + "; use a Monte Carlo frequency set with fewer points");
    if (cert) *cert = {rate * g.mesh.max_cell(), g.mesh.max_cell(), static_cast<long long>(nx) * ny};

    Eigen::MatrixXcd WF = g.values;
    for (int b = 0; b < ny; ++b)
        for (int a = 0; a < nx; ++a) WF(a, b) *= g.mesh.x.weights[a] * g.mesh.y.weights[b];

    constexpr int kChunk = 128;
    const int chunks = (P + kChunk - 1) / kChunk;
    const auto& xs = g.mesh.x.nodes;
    const auto& ys = g.mesh.y.nodes;
    parallel_for(chunks, [&](int c) {
        const int p0 = c * kChunk, n = std::min(kChunk, P - p0);
        Eigen::MatrixXcd E1(n, nx), E2(n, ny);
        for (int k = 0; k < n; ++k) {
            const Vec3& z = xi[p0 + k];
            for (int a = 0; a < nx; ++a) E1(k, a) = std::polar(1.0, -(z[0] * xs[a] + z[2] * xs[a] * xs[a]));
            for (int b = 0; b < ny; ++b) E2(k, b) = std::polar(1.0, -(z[1] * ys[b] + z[2] * ys[b] * ys[b]));
        }
        const Eigen::MatrixXcd G = E1 * WF;
        for (int k = 0; k < n; ++k) out(p0 + k) = (G.row(k).array() * E2.row(k).array()).sum();
    });
    return out;
}

ExtensionField extend(const SampledFunction& f, const FrequencySet& xi, const ExtendOptions& opt) {
    if (xi.size() == 0) throw InvalidInput("extend: empty frequency set");
    if (!f.values.allFinite()) throw InvalidInput("extend: non-finite sample values");
    ExtensionField out;
    out.source = "sampled";
    out.xi = xi;
    out.values = extension_values(f, xi.points, opt, &out.certificate);
    return out;
}

ExtensionField extend_localized(const SampledFunction& f, const DyadicSquare& I, const FrequencySet& xi,
                                const ExtendOptions& opt) {
    ExtensionField out = extend(restrict(f, I), xi, opt);
    out.source = "localized";
    const Vec3 c = phi(I.center());
    for (int k = 0; k < xi.size(); ++k) out.values(k) *= std::polar(1.0, dot(xi.points[k], c));
    return out;
}

double modulation_shift_check(const SampledFunction& f, const DyadicSquare& I, const Vec3& z, const FrequencySet& xi,
                              const ExtendOptions& opt) {
    std::vector<Vec3> shifted;
    for (const auto& p : xi.points) shifted.push_back(p - z);
    const auto local = extend_localized(f, I, FrequencySet::explicit_points(shifted, xi.weights), opt);
    const auto mod = extend(modulate(restrict(f, I), z), xi, opt);
    double worst = 0.0;
    for (int k = 0; k < xi.size(); ++k) worst = std::max(worst, std::abs(std::abs(local.values(k)) - std::abs(mod.values(k))));
    return worst;
}

double weighted_lq_norm(const Eigen::VectorXcd& values, const std::vector<double>& weights, double q) {
    if (!(q >= 1.0)) throw InvalidInput("local_lq_norm: q must be >= 1");
    if (static_cast<std::size_t>(values.size()) != weights.size()) throw InvalidInput("local_lq_norm: size mismatch");
    double s = 0.0;
    for (int k = 0; k < values.size(); ++k) s += weights[k] * std::pow(std::abs(values(k)), q);
    return std::pow(s, 1.0 / q);
}

double local_lq_norm(const ExtensionField& field, double q) { return weighted_lq_norm(field.values, field.xi.weights, q); }

void write_field_csv(const ExtensionField& field, std::ostream& os) {
    os << "# schema=1\n";
    os << "xi1,xi2,xi3,weight,re,im\n";
    os.precision(17);
    for (int k = 0; k < field.xi.size(); ++k) {
        const auto& p = field.xi.points[k];
        os << p[0] << ',' << p[1] << ',' << p[2] << ',' << field.xi.weights[k] << ',' << field.values(k).real() << ','
           << field.values(k).imag() << '\n';
    }
}

}  // namespace parex
