#pragma once

#include <vector>

#include <Eigen/Dense>

#include "parex/expansion.hpp"

namespace parex {

enum class FrameMode { Full, Plain };

struct FrameOptions {
    int max_level = 4;
    double eta_max = 0.1;
    double max_condition = 1e6;
    int band_cells = 8;  // subdivisions of each mollifier band in the Galerkin integrals
};

/// S_η truncated to the wavelets of levels 0..s_max on the domain, in the plain
/// orthonormal coordinates: matrix(J b, I a) = <h_I^{a,η}, h_J^b>.
/// Plain mode replaces S_η^{-1} by the identity and builds no matrix.
struct FrameOperator {
    BaseDomain domain;
    int s_max = 0;
    int kappa = 1;
    double eta = 0.05;
    FrameMode mode = FrameMode::Full;
    std::vector<DyadicSquare> squares;  // full mode: levels 0..s_max, level-major, row-major
    Eigen::MatrixXd matrix;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    double condition = 1.0;
    double deviation = 0.0;  // ||S_η - I||_2 on the truncation

    int dim() const { return 3 * kappa * (kappa + 1) / 2; }
    const WaveletFamily& smooth_family() const { return wavelet_family(kappa, eta); }
    bool covers(const DyadicSquare& I) const;
    int square_index(const DyadicSquare& I) const;
    /// Coefficients <S^{-1} f, h_I^a> for the requested squares.
    Eigen::MatrixXcd coefficients(const SampledFunction& f, const std::vector<DyadicSquare>& which) const;
};

FrameOperator build_frame_operator(const BaseDomain& domain, int s_max, int kappa, double eta,
                                   FrameMode mode = FrameMode::Full, const FrameOptions& opt = {});

/// <h_I^{a,η}, h_J^b> for all a (columns) and b (rows), by one-dimensional integrals.
Eigen::MatrixXd galerkin_block(const WaveletFamily& smooth, const DyadicSquare& I, const DyadicSquare& J,
                               int band_cells = 8);

/// Δ^η_I f as an expansion with the single square I.
WaveletExpansion pseudoprojection(const SampledFunction& f, const DyadicSquare& I, const FrameOperator& frame);
SampledFunction pseudoproject(const SampledFunction& f, const DyadicSquare& I, int kappa, const FrameOperator& frame);

/// Q^η_{s,K} f = Σ_{I ∈ G_s[K]} Δ^η_I f.
WaveletExpansion scale_expansion(const SampledFunction& f, const DyadicSquare& K, int s, const FrameOperator& frame);
SampledFunction scale_projection(const SampledFunction& f, const DyadicSquare& K, int s, int kappa,
                                 const FrameOperator& frame);

}  // namespace parex
