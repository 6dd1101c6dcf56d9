#pragma once

#include <vector>

#include <Eigen/Dense>

#include "parex/alpert.hpp"
#include "parex/extension.hpp"

namespace parex {

/// Finite sum Σ_I Σ_a coeffs(I, a) h_I^a over a wavelet family (plain or smooth).
struct WaveletExpansion {
    const WaveletFamily* family = nullptr;
    std::vector<DyadicSquare> squares;
    Eigen::MatrixXcd coeffs;  // squares.size() x family->dim()
    int band_cells = 2;

    /// Mesh whose edges include every break of every square.
    TensorMesh mesh(int order = 8) const;
    SampledFunction synthesize() const;
    SampledFunction synthesize(const TensorMesh& mesh) const;

    /// E of the expansion via E h_I(ξ) = ℓ e^{-iΦ(x_I)·ξ} E H(ℓ(ξ' + 2ξ3 x_I), ℓ² ξ3).
    Eigen::VectorXcd extend(const std::vector<Vec3>& xi, const ExtendOptions& opt = {}) const;
    /// Column (I, a) = coeffs(I, a) E h_I^a(ξ); columns ordered square-major.
    Eigen::MatrixXcd extension_columns(const std::vector<Vec3>& xi, const ExtendOptions& opt = {}) const;
    /// Per-square terms: column I = E(Σ_a coeffs(I, a) h_I^a).
    Eigen::MatrixXcd extension_terms(const std::vector<Vec3>& xi, const ExtendOptions& opt = {}) const;
};

/// P x dim matrix of E H^a(ζ) for the unit-square mother wavelets.
Eigen::MatrixXcd mother_extension(const WaveletFamily& fam, const std::vector<Vec3>& zeta, int band_cells = 2,
                                  const ExtendOptions& opt = {});

/// Plain Alpert coefficients ∫ f h_I^a for each square (rows) and element (columns).
/// f is transferred to a mesh aligned with the children of every square.
Eigen::MatrixXcd analyze(const SampledFunction& f, const std::vector<DyadicSquare>& squares, int kappa);

}  // namespace parex
