#pragma once

#include <array>
#include <vector>

#include "parex/types.hpp"

namespace parex {

/// Exponents α with |α| <= max_degree, ordered by degree, then by descending α1.
std::vector<std::array<int, 2>> monomial_exponents(int max_degree);
inline int monomial_count(int kappa) { return kappa * (kappa + 1) / 2; }

/// The fixed one-dimensional bump b(t) = exp(-1 / (1 - (t/c)^2)), c = 1/sqrt 2.
/// The tensor bump b(z1) b(z2) is supported in [-c, c]^2, inside the unit disc.
namespace bump {
inline constexpr double kHalfWidth = 0.70710678118654752440;
inline constexpr int kMaxMoment = 12;
double value(double t);
/// P_k(t) = ∫_{-c}^{t} s^k b(s) ds for k = 0..kMaxMoment, written to out[0..kMaxMoment].
void partial_moments(double t, double* out);
double full_moment(int k);
/// The same moment by composite Gauss quadrature (independent of the table).
double full_moment_by_quadrature(int k, int panels = 64);
}  // namespace bump

/// φ(z) = p(z) b(z1) b(z2) with ∫φ = 1 and ∫φ z^γ = 0 for 0 < |γ| < κ.
/// φ_η(x) = η^{-2} φ(x/η).
struct Mollifier {
    int kappa = 1;
    double eta = 0.05;
    std::vector<double> p;  // coefficient of z^δ, δ in monomial_exponents(kappa - 1)

    double value(const Vec2& z) const;
    double scaled_value(const Vec2& x) const;
    /// ∫ φ z^γ from the tabulated one-dimensional moments.
    double moment(int g1, int g2) const;
    /// ∫ φ_η x^γ, i.e. η^{|γ|} ∫ φ z^γ.
    double scaled_moment(int g1, int g2) const;
    /// Same moment by independent composite quadrature.
    double quadrature_moment(int g1, int g2, int panels = 64) const;
};

Mollifier build_mollifier(int kappa, double eta);

}  // namespace parex
