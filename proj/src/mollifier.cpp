#include "parex/mollifier.hpp"

#include <cmath>
#include <mutex>

#include <Eigen/Dense>

#include "parex/quadrature.hpp"

namespace parex {

std::vector<std::array<int, 2>> monomial_exponents(int max_degree) {
    std::vector<std::array<int, 2>> out;
    for (int d = 0; d <= max_degree; ++d)
        for (int a = d; a >= 0; --a) out.push_back({a, d - a});
    return out;
}

namespace bump {

namespace {

constexpr int kKnots = 1024;
constexpr int kPanelOrder = 16;

struct Table {
    double h = 0.0;
    std::vector<std::array<double, kMaxMoment + 1>> cumulative;  // P_k at knot i
};

void integrate_segment(double a, double b, double* acc) {
    if (b <= a) return;
    const GaussRule& g = gauss_legendre(kPanelOrder);
    for (int q = 0; q < kPanelOrder; ++q) {
        const double s = a + (b - a) * g.nodes[q];
        double w = (b - a) * g.weights[q] * value(s);
        for (int k = 0; k <= kMaxMoment; ++k) {
            acc[k] += w;
            w *= s;
        }
    }
}

const Table& table() {
    static Table t;
    static std::once_flag once;
    std::call_once(once, [] {
        t.h = 2.0 * kHalfWidth / kKnots;
        t.cumulative.resize(kKnots + 1);
        t.cumulative[0].fill(0.0);
        for (int i = 0; i < kKnots; ++i) {
            t.cumulative[i + 1] = t.cumulative[i];
            integrate_segment(-kHalfWidth + i * t.h, -kHalfWidth + (i + 1) * t.h, t.cumulative[i + 1].data());
        }
    });
    return t;
}

}  // namespace

double value(double t) {
    const double r = t / kHalfWidth;
    const double d = 1.0 - r * r;
    return d <= 0.0 ? 0.0 : std::exp(-1.0 / d);
}

void partial_moments(double t, double* out) {
    const Table& tab = table();
    if (t <= -kHalfWidth) {
        for (int k = 0; k <= kMaxMoment; ++k) out[k] = 0.0;
        return;
    }
    if (t >= kHalfWidth) {
        for (int k = 0; k <= kMaxMoment; ++k) out[k] = tab.cumulative[kKnots][k];
        return;
    }
    int i = static_cast<int>((t + kHalfWidth) / tab.h);
    i = std::min(std::max(i, 0), kKnots - 1);
    for (int k = 0; k <= kMaxMoment; ++k) out[k] = tab.cumulative[i][k];
    integrate_segment(-kHalfWidth + i * tab.h, t, out);
}

double full_moment(int k) {
    if (k < 0 || k > kMaxMoment) throw InvalidInput("bump::full_moment: order out of range");
    if (k % 2) return 0.0;
    return table().cumulative[kKnots][k];
}

double full_moment_by_quadrature(int k, int panels) {
    const GaussRule& g = gauss_legendre(20);
    const double h = 2.0 * kHalfWidth / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p)
        for (std::size_t q = 0; q < g.nodes.size(); ++q) {
            const double t = -kHalfWidth + h * (p + g.nodes[q]);
            s += h * g.weights[q] * std::pow(t, k) * value(t);
        }
    return s;
}

}  // namespace bump

double Mollifier::value(const Vec2& z) const {
    const double b = bump::value(z[0]) * bump::value(z[1]);
    if (b == 0.0) return 0.0;
    const auto ex = monomial_exponents(kappa - 1);
    double s = 0.0;
    for (std::size_t k = 0; k < ex.size(); ++k) s += p[k] * std::pow(z[0], ex[k][0]) * std::pow(z[1], ex[k][1]);
    return s * b;
}

double Mollifier::scaled_value(const Vec2& x) const { return value({x[0] / eta, x[1] / eta}) / (eta * eta); }

double Mollifier::moment(int g1, int g2) const {
    const auto ex = monomial_exponents(kappa - 1);
    double s = 0.0;
    for (std::size_t k = 0; k < ex.size(); ++k)
        s += p[k] * bump::full_moment(g1 + ex[k][0]) * bump::full_moment(g2 + ex[k][1]);
    return s;
}

double Mollifier::scaled_moment(int g1, int g2) const { return std::pow(eta, g1 + g2) * moment(g1, g2); }

double Mollifier::quadrature_moment(int g1, int g2, int panels) const {
    const auto ex = monomial_exponents(kappa - 1);
    double s = 0.0;
    for (std::size_t k = 0; k < ex.size(); ++k)
        s += p[k] * bump::full_moment_by_quadrature(g1 + ex[k][0], panels) *
             bump::full_moment_by_quadrature(g2 + ex[k][1], panels);
    return s;
}

Mollifier build_mollifier(int kappa, double eta) {
    if (kappa < 1) throw InvalidInput("build_mollifier: kappa must be >= 1");
    if (2 * (kappa - 1) > bump::kMaxMoment) throw InvalidInput("build_mollifier: kappa too large for the moment table");
    if (!(eta > 0.0)) throw InvalidInput("build_mollifier: eta must be positive");
    const auto ex = monomial_exponents(kappa - 1);
    const int m = static_cast<int>(ex.size());
    Eigen::MatrixXd A(m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs(0) = 1.0;
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
            A(r, c) = bump::full_moment(ex[r][0] + ex[c][0]) * bump::full_moment(ex[r][1] + ex[c][1]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (lu.rank() < m) throw ConstructionError("build_mollifier: singular moment system");
    const Eigen::VectorXd sol = lu.solve(rhs);
    Mollifier out;
    out.kappa = kappa;
    out.eta = eta;
    out.p.assign(sol.data(), sol.data() + m);
    return out;
}

}  // namespace parex
