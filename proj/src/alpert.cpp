#include "parex/alpert.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace parex {

namespace {

// ∫ t^n over [-1, 0) (side 0) or [0, 1) (side 1).
double half_integral(int side, int n) {
    const double v = 1.0 / (n + 1);
    return side == 1 || n % 2 == 0 ? v : -v;
}

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::vector<std::array<std::vector<double>, 4>> build_mother(int kappa) {
    const auto ex = monomial_exponents(kappa - 1);
    const int m = static_cast<int>(ex.size());
    const int n = 4 * m;
    // L^2([0,1)^2) inner product of coefficient vectors; du = dv / 4.
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
    for (int c = 0; c < 4; ++c)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                G(c * m + a, c * m + b) = 0.25 * half_integral(c & 1, ex[a][0] + ex[b][0]) *
                                          half_integral(c >> 1, ex[a][1] + ex[b][1]);
    auto inner = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) { return x.dot(G * y); };

    std::vector<Eigen::VectorXd> candidates;
    for (int k = 0; k < m; ++k) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
        for (int c = 0; c < 4; ++c) v(c * m + k) = 1.0;
        candidates.push_back(v);
    }
    for (int k = 0; k < m; ++k)
        for (int c = 0; c < 4; ++c) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
            v(c * m + k) = 1.0;
            candidates.push_back(v);
        }

    std::vector<Eigen::VectorXd> basis;
    for (const auto& cand : candidates) {
        Eigen::VectorXd v = cand;
        const double n0 = std::sqrt(inner(v, v));
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) v -= inner(q, v) * q;
        const double nv = std::sqrt(inner(v, v));
        if (nv < 1e-8 * n0) continue;
        basis.push_back(v / nv);
    }
    if (static_cast<int>(basis.size()) != n)
        throw ConstructionError("build_alpert_basis: piecewise polynomial space has unexpected dimension");

    std::vector<std::array<std::vector<double>, 4>> out;
    for (int w = m; w < n; ++w) {
        std::array<std::vector<double>, 4> coeffs;
        for (int c = 0; c < 4; ++c) coeffs[c].assign(basis[w].data() + c * m, basis[w].data() + (c + 1) * m);
        out.push_back(std::move(coeffs));
    }
    return out;
}

}  // namespace

double PiecewisePolynomial::operator()(const Vec2& x) const {
    if (!square.contains(x)) return 0.0;
    const double l = square.side();
    const Vec2 lo = square.lower();
    const double v1 = 2.0 * (x[0] - lo[0]) / l - 1.0, v2 = 2.0 * (x[1] - lo[1]) / l - 1.0;
    const int c = (v1 >= 0.0 ? 1 : 0) + (v2 >= 0.0 ? 2 : 0);
    const auto ex = monomial_exponents(kappa - 1);
    double s = 0.0;
    for (std::size_t k = 0; k < ex.size(); ++k) s += coeffs[c][k] * std::pow(v1, ex[k][0]) * std::pow(v2, ex[k][1]);
    return s / l;
}

const std::vector<std::array<std::vector<double>, 4>>& mother_coefficients(int kappa) {
    if (kappa < 1) throw InvalidInput("Alpert basis: kappa must be >= 1");
    if (2 * (kappa - 1) > bump::kMaxMoment) throw InvalidInput("Alpert basis: kappa too large");
    static std::map<int, std::vector<std::array<std::vector<double>, 4>>> cache;
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    auto it = cache.find(kappa);
    if (it == cache.end()) it = cache.emplace(kappa, build_mother(kappa)).first;
    return it->second;
}

AlpertBasis build_alpert_basis(const DyadicSquare& Q, int kappa) {
    AlpertBasis out{Q, kappa, {}};
    for (const auto& coeffs : mother_coefficients(kappa)) out.elements.push_back({Q, kappa, coeffs});
    return out;
}

WaveletFamily::WaveletFamily(int kappa, double eta) : kappa_(kappa), eta_(eta) {
    if (eta < 0.0) throw InvalidInput("WaveletFamily: eta must be nonnegative");
    const auto& mother = mother_coefficients(kappa);
    if (smooth()) mollifier_ = build_mollifier(kappa, eta);
    const auto ex = monomial_exponents(kappa - 1);
    const int r = rank();
    kernels_.resize(mother.size());
    for (std::size_t a = 0; a < mother.size(); ++a)
        for (int c = 0; c < 4; ++c) {
            Eigen::MatrixXd K = Eigen::MatrixXd::Zero(r, r);
            for (std::size_t k = 0; k < ex.size(); ++k) {
                const double coef = mother[a][c][k];
                if (!smooth()) {
                    K(ex[k][0], ex[k][1]) = coef;
                    continue;
                }
                for (std::size_t d = 0; d < ex.size(); ++d)
                    K(ex[k][0] * kappa + ex[d][0], ex[k][1] * kappa + ex[d][1]) += coef * mollifier_.p[d];
            }
            kernels_[a][c] = K;
        }
    for (int c = 0; c < 4; ++c) {
        stacked_[c].resize(r * r, dim());
        for (int a = 0; a < dim(); ++a)
            for (int p = 0; p < r; ++p)
                for (int q = 0; q < r; ++q) stacked_[c](p * r + q, a) = kernels_[a][c](p, q);
    }
}

std::vector<double> WaveletFamily::breaks() const {
    const double e = band();
    if (!smooth()) return {0.0, 0.5, 1.0};
    return {-e, 0.0, e, 0.5 - e, 0.5, 0.5 + e, 1.0 - e, 1.0, 1.0 + e};
}

bool WaveletFamily::in_band(double a, double b) const {
    if (!smooth()) return false;
    const double e = band();
    for (double line : {0.0, 0.5, 1.0})
        if (a >= line - e - 1e-14 && b <= line + e + 1e-14) return true;
    return false;
}

Eigen::MatrixXd WaveletFamily::factors(const double* u, int n, int cx) const {
    const int r = rank();
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(n, r);
    const double a = 0.5 * cx, b = 0.5 * (cx + 1);
    if (!smooth()) {
        for (int i = 0; i < n; ++i) {
            if (u[i] < a || u[i] >= b) continue;
            const double v = 2.0 * u[i] - 1.0;
            double pw = 1.0;
            for (int al = 0; al < kappa_; ++al, pw *= v) F(i, al) = pw;
        }
        return F;
    }
    const double eps = eta_;
    std::array<double, bump::kMaxMoment + 1> hi{}, lo{}, diff{};
    for (int i = 0; i < n; ++i) {
        const double zh = (u[i] - a) / eps, zl = (u[i] - b) / eps;
        if (zh <= -bump::kHalfWidth || zl >= bump::kHalfWidth) continue;
        bump::partial_moments(zh, hi.data());
        bump::partial_moments(zl, lo.data());
        for (int k = 0; k <= bump::kMaxMoment; ++k) diff[k] = hi[k] - lo[k];
        const double V = 2.0 * u[i] - 1.0;
        for (int al = 0; al < kappa_; ++al)
            for (int de = 0; de < kappa_; ++de) {
                double s = 0.0;
                for (int j = 0; j <= al; ++j)
                    s += binom(al, j) * std::pow(V, al - j) * std::pow(-2.0 * eps, j) * diff[j + de];
                F(i, al * kappa_ + de) = s;
            }
    }
    return F;
}

double WaveletFamily::value(int a, const Vec2& u) const {
    double s = 0.0;
    for (int c = 0; c < 4; ++c) {
        const Eigen::MatrixXd f1 = factors(&u[0], 1, c & 1);
        const Eigen::MatrixXd f2 = factors(&u[1], 1, c >> 1);
        s += (f1 * kernels_[a][c] * f2.transpose())(0, 0);
    }
    return s;
}

const WaveletFamily& wavelet_family(int kappa, double eta) {
    static std::map<std::pair<int, double>, std::unique_ptr<WaveletFamily>> cache;
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    auto& slot = cache[{kappa, eta}];
    if (!slot) slot = std::make_unique<WaveletFamily>(kappa, eta);
    return *slot;
}

Axis family_axis(const WaveletFamily& fam, double lo, double side, int order, int band_cells) {
    const auto br = fam.breaks();
    std::vector<double> edges;
    for (std::size_t k = 0; k + 1 < br.size(); ++k) {
        const int cells = fam.in_band(br[k], br[k + 1]) ? std::max(1, band_cells) : 1;
        for (int s = 0; s < cells; ++s) edges.push_back(lo + side * (br[k] + (br[k + 1] - br[k]) * s / cells));
    }
    edges.push_back(lo + side * br.back());
    return make_axis(std::move(edges), order);
}

namespace {

// Index range of axis nodes inside [lo, hi).
std::pair<int, int> node_range(const Axis& a, double lo, double hi) {
    const auto b = std::lower_bound(a.nodes.begin(), a.nodes.end(), lo);
    const auto e = std::lower_bound(b, a.nodes.end(), hi);
    return {static_cast<int>(b - a.nodes.begin()), static_cast<int>(e - a.nodes.begin())};
}

}  // namespace

void accumulate(const WaveletFamily& fam, const DyadicSquare& I, const Eigen::VectorXcd& coef, const Axis& x,
                const Axis& y, Eigen::MatrixXcd& out) {
    const double l = I.side();
    const Vec2 lo = I.lower();
    const auto [x0, x1] = node_range(x, lo[0] + l * fam.support_lo(), lo[0] + l * fam.support_hi());
    const auto [y0, y1] = node_range(y, lo[1] + l * fam.support_lo(), lo[1] + l * fam.support_hi());
    if (x0 >= x1 || y0 >= y1) return;
    std::vector<double> ux(x1 - x0), uy(y1 - y0);
    for (int i = x0; i < x1; ++i) ux[i - x0] = (x.nodes[i] - lo[0]) / l;
    for (int j = y0; j < y1; ++j) uy[j - y0] = (y.nodes[j] - lo[1]) / l;
    std::array<Eigen::MatrixXd, 2> fx, fy;
    for (int s = 0; s < 2; ++s) {
        fx[s] = fam.factors(ux.data(), x1 - x0, s);
        fy[s] = fam.factors(uy.data(), y1 - y0, s);
    }
    const int r = fam.rank();
    auto block = out.block(x0, y0, x1 - x0, y1 - y0);
    for (int c = 0; c < 4; ++c) {
        Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(r, r);
        for (int a = 0; a < fam.dim(); ++a)
            if (coef(a) != Complex(0.0)) K += coef(a) * fam.kernel(a, c).cast<Complex>();
        block += (fx[c & 1].cast<Complex>() * K * fy[c >> 1].cast<Complex>().transpose()) / l;
    }
}

SmoothWavelet smooth_wavelet(const AlpertBasis& basis, int a, const Mollifier& phi, int band_cells) {
    if (phi.kappa < basis.kappa) throw InvalidInput("smooth_wavelet: mollifier order below wavelet order");
    if (a < 0 || a >= basis.dim()) throw InvalidInput("smooth_wavelet: element index out of range");
    const WaveletFamily& fam = wavelet_family(basis.kappa, phi.eta);
    const DyadicSquare& Q = basis.square;
    const Vec2 lo = Q.lower();
    const int order = 8;
    TensorMesh mesh{family_axis(fam, lo[0], Q.side(), order, band_cells),
                    family_axis(fam, lo[1], Q.side(), order, band_cells)};
    Eigen::VectorXcd coef = Eigen::VectorXcd::Zero(fam.dim());
    coef(a) = 1.0;
    Eigen::MatrixXcd values = Eigen::MatrixXcd::Zero(mesh.nx(), mesh.ny());
    accumulate(fam, Q, coef, mesh.x, mesh.y, values);
    const double pad = phi.eta * Q.side();
    Grid g = cover_grid({lo[0] - pad, lo[1] - pad}, Q.side() + 2 * pad);
    QuadratureRule rule{order, 1};
    SampledFunction f{g, rule, mesh, values, nullptr};
    return {Q, basis.kappa, a, phi.eta, std::move(f)};
}

SampledFunction sample_element(const AlpertBasis& basis, int a, int order) {
    const DyadicSquare& Q = basis.square;
    const auto& h = basis.elements.at(a);
    Grid g = cover_grid(Q.lower(), Q.side());
    g.level = 1;
    g.squares = descendants(root_square(g.domain), 1);
    QuadratureRule rule{order, 1};
    return sample([h](const Vec2& x) { return Complex(h(x)); }, g, rule);
}

double moment_check(const SampledFunction& g, int kappa) {
    double worst = 0.0;
    for (const auto& b : monomial_exponents(kappa - 1)) {
        Complex s = 0.0;
        for (int j = 0; j < g.mesh.ny(); ++j) {
            const double y = g.mesh.y.nodes[j];
            const double wy = g.mesh.y.weights[j] * std::pow(y, b[1]);
            for (int i = 0; i < g.mesh.nx(); ++i) {
                const double x = g.mesh.x.nodes[i];
                s += g.mesh.x.weights[i] * std::pow(x, b[0]) * wy * g.values(i, j);
            }
        }
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

double moment_check(const SmoothWavelet& w, int kappa) { return moment_check(w.sampled, kappa); }

}  // namespace parex
