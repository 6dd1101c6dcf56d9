#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "parex/funcrep.hpp"
#include "parex/grid.hpp"
#include "parex/mollifier.hpp"

namespace parex {

/// Polynomial on each child of `square` in the local coordinate
/// v = 2 (x - x_Q) / ℓ(Q) - 1 ∈ [-1, 1)^2, scaled by ℓ(Q)^{-1}.
/// Child c = cx + 2 cy; coefficients follow monomial_exponents(kappa - 1).
struct PiecewisePolynomial {
    DyadicSquare square;
    int kappa = 1;
    std::array<std::vector<double>, 4> coeffs;

    double operator()(const Vec2& x) const;
};

struct AlpertBasis {
    DyadicSquare square;
    int kappa = 1;
    std::vector<PiecewisePolynomial> elements;

    int dim() const { return static_cast<int>(elements.size()); }
};

/// Mother coefficients on the unit square, orthonormal in L^2([0,1)^2).
const std::vector<std::array<std::vector<double>, 4>>& mother_coefficients(int kappa);

AlpertBasis build_alpert_basis(const DyadicSquare& Q, int kappa);

/// Wavelets of order κ on the unit square in separated form,
///   H^a(u) = Σ_c F(u1; cx)ᵀ K^a_c F(u2; cy),
/// where F(·; cx) are one-dimensional factor rows. With η = 0 the factors are
/// v^α on the child interval (plain wavelets); with η > 0 they carry the
/// mollifier, giving H^a ∗ φ_η exactly up to the tabulated bump moments.
class WaveletFamily {
public:
    WaveletFamily(int kappa, double eta);

    int kappa() const { return kappa_; }
    double eta() const { return eta_; }
    bool smooth() const { return eta_ > 0.0; }
    int dim() const { return 3 * monomial_count(kappa_); }
    int rank() const { return smooth() ? kappa_ * kappa_ : kappa_; }
    const Mollifier& mollifier() const { return mollifier_; }

    /// Half-width of the mollifier support in unit coordinates.
    double band() const { return smooth() ? eta_ * bump::kHalfWidth : 0.0; }
    double support_lo() const { return -band(); }
    double support_hi() const { return 1.0 + band(); }
    /// Points of reduced smoothness along one axis (unit coordinates).
    std::vector<double> breaks() const;
    /// Whether the interval [a, b] (unit coordinates) lies inside a mollifier band.
    bool in_band(double a, double b) const;

    /// n x rank matrix of factor rows at unit coordinates u, child column cx.
    Eigen::MatrixXd factors(const double* u, int n, int cx) const;
    const Eigen::MatrixXd& kernel(int a, int c) const { return kernels_[a][c]; }
    /// kernel(a, c) flattened row-major into column a of a rank^2 x dim matrix.
    const Eigen::MatrixXd& stacked_kernel(int c) const { return stacked_[c]; }

    double value(int a, const Vec2& u) const;

private:
    int kappa_;
    double eta_;
    Mollifier mollifier_;
    std::vector<std::array<Eigen::MatrixXd, 4>> kernels_;
    std::array<Eigen::MatrixXd, 4> stacked_;
};

/// Cached family for (κ, η); η = 0 gives plain wavelets.
const WaveletFamily& wavelet_family(int kappa, double eta);

/// Axis over [lo, lo + side·(support)] for a family placed on a square with
/// lower coordinate lo and side `side`; band intervals split into `band_cells`.
Axis family_axis(const WaveletFamily& fam, double lo, double side, int order, int band_cells);

/// Adds Σ_a coef[a] h_I^a (of the family) to `out` at the nodes of (x, y).
void accumulate(const WaveletFamily& fam, const DyadicSquare& I, const Eigen::VectorXcd& coef, const Axis& x,
                const Axis& y, Eigen::MatrixXcd& out);

struct SmoothWavelet {
    DyadicSquare square;
    int kappa = 1;
    int index = 0;
    double eta = 0.0;
    SampledFunction sampled;  // on (1 + 2η) Q
};

SmoothWavelet smooth_wavelet(const AlpertBasis& basis, int a, const Mollifier& phi, int band_cells = 8);
/// Plain element sampled on its square, children aligned with the mesh.
SampledFunction sample_element(const AlpertBasis& basis, int a, int order = 8);

/// max over |β| < κ of |∫ g x^β dx| by the quadrature of g's mesh.
double moment_check(const SampledFunction& g, int kappa);
double moment_check(const SmoothWavelet& w, int kappa);

}  // namespace parex
