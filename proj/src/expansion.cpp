#include "parex/expansion.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "parex/parallel.hpp"

namespace parex {

namespace {

struct MotherTable {
    std::vector<double> nodes;
    std::array<Eigen::MatrixXd, 2> weighted;  // diag(w) F(·; cx)
};

const MotherTable& mother_table(const WaveletFamily& fam, int band_cells, int halvings) {
    using Key = std::tuple<const WaveletFamily*, int, int>;
    static std::map<Key, MotherTable> cache;
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    auto it = cache.find({&fam, band_cells, halvings});
    if (it != cache.end()) return it->second;
    Axis a = family_axis(fam, 0.0, 1.0, 8, band_cells);
    a = subdivide(a, 1 << halvings);
    MotherTable t;
    t.nodes = a.nodes;
    for (int cx = 0; cx < 2; ++cx) {
        t.weighted[cx] = fam.factors(a.nodes.data(), a.size(), cx);
        for (int i = 0; i < a.size(); ++i) t.weighted[cx].row(i) *= a.weights[i];
    }
    return cache.emplace(Key{&fam, band_cells, halvings}, std::move(t)).first->second;
}

int halvings_for(const WaveletFamily& fam, int band_cells, double rate, double phase) {
    if (rate <= 0.0) return 0;
    const double base = family_axis(fam, 0.0, 1.0, 8, band_cells).max_cell();
    const double h = phase / rate;
    int k = 0;
    while (base / (1 << k) > h) ++k;
    if (k > 16) throw CapacityError("mother_extension: frequency too large for the mother mesh");
    return k;
}

}  // namespace

Eigen::MatrixXcd mother_extension(const WaveletFamily& fam, const std::vector<Vec3>& zeta, int band_cells,
                                  const ExtendOptions& opt) {
    const int P = static_cast<int>(zeta.size());
    const int d = fam.dim(), r = fam.rank();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(P, d);
    if (P == 0) return out;
    double zmax = 0.0;
    for (const auto& z : zeta) zmax = std::max(zmax, norm(z));
    const double umax = std::max(std::abs(fam.support_lo()), std::abs(fam.support_hi()));
    const MotherTable& t =
        mother_table(fam, band_cells, halvings_for(fam, band_cells, zmax * (1.0 + 2.0 * umax), opt.phase_per_cell));
    const int n = static_cast<int>(t.nodes.size());
    if (double(P) * n * 2 * r > opt.budget) throw CapacityError("mother_extension: budget exceeded");
    constexpr int kChunk = 256;
    const int chunks = (P + kChunk - 1) / kChunk;
    parallel_for(chunks, [&](int c) {
        const int p0 = c * kChunk, m = std::min(kChunk, P - p0);
        Eigen::MatrixXcd E1(m, n), E2(m, n);
        for (int k = 0; k < m; ++k) {
            const Vec3& z = zeta[p0 + k];
            for (int i = 0; i < n; ++i) {
                const double u = t.nodes[i];
                E1(k, i) = std::polar(1.0, -(z[0] * u + z[2] * u * u));
                E2(k, i) = std::polar(1.0, -(z[1] * u + z[2] * u * u));
            }
        }
        std::array<Eigen::MatrixXcd, 2> e1, e2;
        for (int s = 0; s < 2; ++s) {
            e1[s] = E1 * t.weighted[s].cast<Complex>();
            e2[s] = E2 * t.weighted[s].cast<Complex>();
        }
        Eigen::MatrixXcd T(m, r * r);
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(m, d);
        for (int ch = 0; ch < 4; ++ch) {
            const auto& a1 = e1[ch & 1];
            const auto& a2 = e2[ch >> 1];
            for (int p = 0; p < r; ++p)
                for (int q = 0; q < r; ++q) T.col(p * r + q) = a1.col(p).cwiseProduct(a2.col(q));
            acc += T * fam.stacked_kernel(ch).cast<Complex>();
        }
        out.middleRows(p0, m) = acc;
    });
    return out;
}

TensorMesh WaveletExpansion::mesh(int order) const {
    if (!family || squares.empty()) throw InvalidInput("WaveletExpansion: empty expansion");
    std::vector<double> ex, ey;
    for (const auto& I : squares) {
        const Vec2 lo = I.lower();
        const Axis ax = family_axis(*family, lo[0], I.side(), order, band_cells);
        const Axis ay = family_axis(*family, lo[1], I.side(), order, band_cells);
        ex.insert(ex.end(), ax.edges.begin(), ax.edges.end());
        ey.insert(ey.end(), ay.edges.begin(), ay.edges.end());
    }
    return {make_axis(std::move(ex), order), make_axis(std::move(ey), order)};
}

SampledFunction WaveletExpansion::synthesize(const TensorMesh& m) const {
    Eigen::MatrixXcd values = Eigen::MatrixXcd::Zero(m.nx(), m.ny());
    for (std::size_t k = 0; k < squares.size(); ++k)
        accumulate(*family, squares[k], coeffs.row(k).transpose(), m.x, m.y, values);
    const double side = std::max(m.x.hi() - m.x.lo(), m.y.hi() - m.y.lo());
    return SampledFunction{cover_grid({m.x.lo(), m.y.lo()}, side), QuadratureRule{m.x.order, 1}, m, values, nullptr};
}

SampledFunction WaveletExpansion::synthesize() const { return synthesize(mesh()); }

Eigen::MatrixXcd WaveletExpansion::extension_columns(const std::vector<Vec3>& xi, const ExtendOptions& opt) const {
    const int P = static_cast<int>(xi.size()), d = family->dim();
    Eigen::MatrixXcd out(P, static_cast<int>(squares.size()) * d);
    std::vector<Vec3> zeta(P);
    for (std::size_t k = 0; k < squares.size(); ++k) {
        const DyadicSquare& I = squares[k];
        const double l = I.side();
        const Vec2 x0 = I.lower();
        const Vec3 px = phi(x0);
        for (int p = 0; p < P; ++p) {
            const Vec3& z = xi[p];
            zeta[p] = {l * (z[0] + 2 * z[2] * x0[0]), l * (z[1] + 2 * z[2] * x0[1]), l * l * z[2]};
        }
        const Eigen::MatrixXcd H = mother_extension(*family, zeta, band_cells, opt);
        for (int p = 0; p < P; ++p) {
            const Complex pre = l * std::polar(1.0, -dot(px, xi[p]));
            for (int a = 0; a < d; ++a) out(p, k * d + a) = pre * coeffs(k, a) * H(p, a);
        }
    }
    return out;
}

Eigen::MatrixXcd WaveletExpansion::extension_terms(const std::vector<Vec3>& xi, const ExtendOptions& opt) const {
    const Eigen::MatrixXcd cols = extension_columns(xi, opt);
    const int d = family->dim();
    Eigen::MatrixXcd out(cols.rows(), static_cast<int>(squares.size()));
    for (int k = 0; k < out.cols(); ++k) out.col(k) = cols.middleCols(k * d, d).rowwise().sum();
    return out;
}

Eigen::VectorXcd WaveletExpansion::extend(const std::vector<Vec3>& xi, const ExtendOptions& opt) const {
    return extension_columns(xi, opt).rowwise().sum();
}

Eigen::MatrixXcd analyze(const SampledFunction& f, const std::vector<DyadicSquare>& squares, int kappa) {
    const WaveletFamily& fam = wavelet_family(kappa, 0.0);
    const int d = fam.dim(), r = fam.rank();
    std::vector<double> ex, ey;
    for (const auto& I : squares) {
        const Vec2 lo = I.lower();
        const double l = I.side();
        for (double t : {0.0, 0.5, 1.0}) {
            ex.push_back(lo[0] + t * l);
            ey.push_back(lo[1] + t * l);
        }
    }
    TensorMesh target{add_edges(f.mesh.x, ex), add_edges(f.mesh.y, ey)};
    const SampledFunction g =
        (target.x.edges == f.mesh.x.edges && target.y.edges == f.mesh.y.edges) ? f : resample(f, target);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<int>(squares.size()), d);
    parallel_for(static_cast<int>(squares.size()), [&](int k) {
        const DyadicSquare& I = squares[k];
        const double l = I.side();
        const Vec2 lo = I.lower();
        auto range = [](const Axis& a, double x0, double x1) {
            const auto b = std::lower_bound(a.nodes.begin(), a.nodes.end(), x0);
            const auto e = std::lower_bound(b, a.nodes.end(), x1);
            return std::pair<int, int>(int(b - a.nodes.begin()), int(e - a.nodes.begin()));
        };
        const auto [x0, x1] = range(g.mesh.x, lo[0], lo[0] + l);
        const auto [y0, y1] = range(g.mesh.y, lo[1], lo[1] + l);
        if (x0 >= x1 || y0 >= y1) return;
        std::vector<double> ux, uy;
        for (int i = x0; i < x1; ++i) ux.push_back((g.mesh.x.nodes[i] - lo[0]) / l);
        for (int j = y0; j < y1; ++j) uy.push_back((g.mesh.y.nodes[j] - lo[1]) / l);
        Eigen::MatrixXcd W = g.values.block(x0, y0, x1 - x0, y1 - y0);
        for (int j = 0; j < W.cols(); ++j)
            for (int i = 0; i < W.rows(); ++i) W(i, j) *= g.mesh.x.weights[x0 + i] * g.mesh.y.weights[y0 + j];
        Eigen::RowVectorXcd acc = Eigen::RowVectorXcd::Zero(d);
        for (int c = 0; c < 4; ++c) {
            const Eigen::MatrixXd F1 = fam.factors(ux.data(), x1 - x0, c & 1);
            const Eigen::MatrixXd F2 = fam.factors(uy.data(), y1 - y0, c >> 1);
            const Eigen::MatrixXcd M = F1.cast<Complex>().transpose() * W * F2.cast<Complex>();
            Eigen::RowVectorXcd v(r * r);
            for (int p = 0; p < r; ++p)
                for (int q = 0; q < r; ++q) v(p * r + q) = M(p, q);
            acc += v * fam.stacked_kernel(c).cast<Complex>();
        }
        out.row(k) = acc / l;
    });
    return out;
}

}  // namespace parex
