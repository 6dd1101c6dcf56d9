#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "parex/funcrep.hpp"

namespace parex {

enum class RegionKind { Ball, Annulus, Lattice, Explicit, MonteCarlo };

/// Frequency points with measure weights for L^q integration over a region.
struct FrequencySet {
    RegionKind kind = RegionKind::Explicit;
    double inner = 0.0;  // inner radius (annulus), 0 otherwise
    double outer = 0.0;  // outer radius
    std::uint64_t seed = 0;
    std::vector<Vec3> points;
    std::vector<double> weights;

    int size() const { return static_cast<int>(points.size()); }
    double max_norm() const;
    double weight_sum() const;
    double region_volume() const;

    /// Stratified sampling: one point per equal-volume radial shell, random direction.
    static FrequencySet ball(double R, int count, std::uint64_t seed);
    /// A(0, 2^r) = {2^{r-1} < |ξ| <= 2^r}, stratified as for balls.
    static FrequencySet annulus(int r, int count, std::uint64_t seed);
    static FrequencySet shell(double inner, double outer, int count, std::uint64_t seed);
    static FrequencySet lattice(double spacing, double R);
    static FrequencySet explicit_points(std::vector<Vec3> points, std::vector<double> weights = {});
    /// Plain Monte Carlo in the ball (inner = 0) or shell.
    static FrequencySet monte_carlo(double inner, double outer, int count, std::uint64_t seed);

    /// Points with |ξ| <= R, weights kept.
    FrequencySet within(double R) const;
};

struct ExtendOptions {
    double budget = 4e9;          // node-frequency products per call
    double phase_per_cell = 0.7853981633974483;  // π/4
    int extra_refine = 1;         // further split every cell (self-convergence checks)
};

struct PhaseCertificate {
    double max_phase_per_cell = 0.0;
    double cell_width = 0.0;
    long long nodes = 0;
};

struct ExtensionField {
    std::string source;
    FrequencySet xi;
    Eigen::VectorXcd values;
    PhaseCertificate certificate;
};

/// Ef(ξ) = Σ w f(x) e^{-iΦ(x)·ξ} on a mesh fine enough that the phase moves
/// at most `phase_per_cell` across any cell.
Eigen::VectorXcd extension_values(const SampledFunction& f, const std::vector<Vec3>& xi,
                                  const ExtendOptions& opt = {}, PhaseCertificate* cert = nullptr);

ExtensionField extend(const SampledFunction& f, const FrequencySet& xi, const ExtendOptions& opt = {});

/// T_I f(ξ) = e^{iξ·Φ(c_I)} E(1_I f)(ξ): the extension of f_I with the phase
/// of the square centre removed.
ExtensionField extend_localized(const SampledFunction& f, const DyadicSquare& I, const FrequencySet& xi,
                                const ExtendOptions& opt = {});

/// max over ξ of | |T_I f(ξ - z)| - |E(modulate(f_I, z))(ξ)| |.
double modulation_shift_check(const SampledFunction& f, const DyadicSquare& I, const Vec3& z,
                              const FrequencySet& xi, const ExtendOptions& opt = {});

double local_lq_norm(const ExtensionField& field, double q);
double weighted_lq_norm(const Eigen::VectorXcd& values, const std::vector<double>& weights, double q);

/// CSV with columns xi1, xi2, xi3, weight, re, im.
void write_field_csv(const ExtensionField& field, std::ostream& os);

}  // namespace parex
