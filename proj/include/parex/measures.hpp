#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "json.hpp"
#include "parex/funcrep.hpp"

namespace parex {

/// Closed axis-aligned rectangle in the base plane.
struct Rect {
    Vec2 lo{0.0, 0.0};
    Vec2 hi{0.0, 0.0};

    static Rect of(const DyadicSquare& s) { return {s.lower(), s.upper()}; }
    /// The square grown by η ℓ on every side.
    static Rect enlarged(const DyadicSquare& s, double eta);
    double side() const { return std::max(hi[0] - lo[0], hi[1] - lo[1]); }
};

struct Box3 {
    Vec3 lo{0.0, 0.0, 0.0};
    Vec3 hi{0.0, 0.0, 0.0};
};

/// Bounding box of Φ(U1) - Φ(U2), the support of the difference convolution.
Box3 support_box(const Rect& U1, const Rect& U2);

/// Density of μ1 * μ̌2 with μk = Φ_*(g_k dx): the measure of Φ(v) - Φ(u), v ∈ U1, u ∈ U2.
/// Its Fourier transform is E g1(ξ) E g2(-ξ).
struct ConvolutionDensity {
    Box3 box;
    Vec3 spacing{0.0, 0.0, 0.0};
    std::array<int, 3> n{0, 0, 0};
    double nu = 0.0;
    std::vector<Complex> values;  // index (i * n1 + j) * n2 + k

    Vec3 point(int i, int j, int k) const;
    Complex at(int i, int j, int k) const { return values[(static_cast<std::size_t>(i) * n[1] + j) * n[2] + k]; }
    double cell_volume() const { return spacing[0] * spacing[1] * spacing[2]; }
    Complex mass() const;
    Complex fourier(const Vec3& xi) const;
};

struct ConvolveOptions {
    int fiber_nodes = 64;
};

/// Density at one point a = (a', a3): (1 / (2|a'|)) ∫ g1(u + a') g2(u) ds over the
/// line 2a'·u = a3 - |a'|^2 clipped to U2 ∩ (U1 - a').
Complex fiber_density(const SampledFunction& g1, const Rect& U1, const SampledFunction& g2, const Rect& U2,
                      const Vec3& a, double nu, const ConvolveOptions& opt = {});

/// Cell-centred grid over `box` with the given spacing per axis (adjusted to fit).
/// A zero-extent axis gives a single point with spacing 0, so lines and planes
/// through the density can be probed cheaply.
ConvolutionDensity convolve_pushforwards(const SampledFunction& g1, const Rect& U1, const SampledFunction& g2,
                                         const Rect& U2, const Box3& box, const Vec3& spacing, double nu,
                                         const ConvolveOptions& opt = {});

struct LemmaScales {
    int s1 = 0;
    int s2 = 0;
    double p = 2.0;
    double norm1 = 1.0;
    double norm2 = 1.0;
};

struct DerivativeProbe {
    int order = 1;
    double max_derivative = 0.0;
    double max_density = 0.0;
    double fitted_scale = 0.0;  // (max |∇^m D| / max |D|)^{1/m}
    double lemma_bound = 0.0;   // ν^{-m} 2^{m s2} 2^{(2/p)(s1+s2)} ||f1||_p ||f2||_p
    double ratio = 0.0;
};

/// Central differences of order m along every axis with at least 2m+1 points.
DerivativeProbe derivative_scale_probe(const ConvolutionDensity& density, int m, const LemmaScales& scales = {});

nlohmann::json density_header(const ConvolutionDensity& d);
/// CSV with columns a1, a2, a3, value (real part; imag appended when nonzero).
void write_density_csv(const ConvolutionDensity& d, std::ostream& os);

}  // namespace parex
