#include "parex/frame.hpp"

#include <cmath>
#include <map>

#include <Eigen/SVD>

#include "parex/parallel.hpp"

namespace parex {

namespace {

// ∫ F_I(x; cx)ᵀ F_J(x; cx') dx along one axis, for the four (cx, cx') pairs.
// I carries the smooth family, J the plain one.
std::array<Eigen::MatrixXd, 4> axis_products(const WaveletFamily& smooth, double loI, double lI, double loJ,
                                             double lJ, int band_cells) {
    const WaveletFamily& plain = wavelet_family(smooth.kappa(), 0.0);
    std::array<Eigen::MatrixXd, 4> out;
    for (auto& m : out) m = Eigen::MatrixXd::Zero(smooth.rank(), plain.rank());
    const double a = std::max(loI + lI * smooth.support_lo(), loJ);
    const double b = std::min(loI + lI * smooth.support_hi(), loJ + lJ);
    if (!(b > a)) return out;
    const Axis ai = family_axis(smooth, loI, lI, 8, band_cells);
    std::vector<double> edges{a, b, loJ + 0.5 * lJ};
    for (double e : ai.edges) edges.push_back(e);
    std::vector<double> clipped;
    for (double e : edges)
        if (e >= a && e <= b) clipped.push_back(e);
    const Axis ax = make_axis(std::move(clipped), 8);
    std::vector<double> ui(ax.size()), uj(ax.size());
    for (int k = 0; k < ax.size(); ++k) {
        ui[k] = (ax.nodes[k] - loI) / lI;
        uj[k] = (ax.nodes[k] - loJ) / lJ;
    }
    for (int ci = 0; ci < 2; ++ci) {
        Eigen::MatrixXd Fi = smooth.factors(ui.data(), ax.size(), ci);
        for (int k = 0; k < ax.size(); ++k) Fi.row(k) *= ax.weights[k];
        for (int cj = 0; cj < 2; ++cj) out[ci * 2 + cj] = Fi.transpose() * plain.factors(uj.data(), ax.size(), cj);
    }
    return out;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    Eigen::MatrixXd K(A.rows() * B.rows(), A.cols() * B.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

bool supports_overlap(const WaveletFamily& smooth, const DyadicSquare& I, const DyadicSquare& J) {
    const Vec2 li = I.lower(), lj = J.lower();
    for (int ax = 0; ax < 2; ++ax) {
        const double a = std::max(li[ax] + I.side() * smooth.support_lo(), lj[ax]);
        const double b = std::min(li[ax] + I.side() * smooth.support_hi(), lj[ax] + J.side());
        if (!(b > a)) return false;
    }
    return true;
}

}  // namespace

Eigen::MatrixXd galerkin_block(const WaveletFamily& smooth, const DyadicSquare& I, const DyadicSquare& J,
                               int band_cells) {
    const WaveletFamily& plain = wavelet_family(smooth.kappa(), 0.0);
    const int d = smooth.dim();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
    if (!supports_overlap(smooth, I, J)) return out;
    const Vec2 li = I.lower(), lj = J.lower();
    const auto X1 = axis_products(smooth, li[0], I.side(), lj[0], J.side(), band_cells);
    const auto X2 = axis_products(smooth, li[1], I.side(), lj[1], J.side(), band_cells);
    for (int c = 0; c < 4; ++c)
        for (int cp = 0; cp < 4; ++cp) {
            const Eigen::MatrixXd& x1 = X1[(c & 1) * 2 + (cp & 1)];
            const Eigen::MatrixXd& x2 = X2[(c >> 1) * 2 + (cp >> 1)];
            if (x1.isZero(0.0) || x2.isZero(0.0)) continue;
            const Eigen::MatrixXd Z = kron(x1, x2) * plain.stacked_kernel(cp);
            out += Z.transpose() * smooth.stacked_kernel(c);
        }
    return out / (I.side() * J.side());
}

bool FrameOperator::covers(const DyadicSquare& I) const {
    const DyadicSquare root = root_square(domain);
    return I.level >= 0 && I.level <= s_max && root.is_ancestor_or_self_of(I);
}

int FrameOperator::square_index(const DyadicSquare& I) const {
    if (!covers(I)) return -1;
    int base = 0;
    for (int s = 0; s < I.level; ++s) base += 1 << (2 * s);
    return base + I.j * (1 << I.level) + I.i;
}

FrameOperator build_frame_operator(const BaseDomain& domain, int s_max, int kappa, double eta, FrameMode mode,
                                   const FrameOptions& opt) {
    domain.validate();
    if (s_max < 0) throw InvalidInput("build_frame_operator: negative truncation level");
    if (!(eta > 0.0) || eta > opt.eta_max)
        throw InvalidInput("build_frame_operator: eta must lie in (0, " + std::to_string(opt.eta_max) + "]");
    FrameOperator F;
    F.domain = domain;
    F.s_max = s_max;
    F.kappa = kappa;
    F.eta = eta;
    F.mode = mode;
    const WaveletFamily& smooth = wavelet_family(kappa, eta);
    if (mode == FrameMode::Plain) return F;
    if (s_max > opt.max_level)
        throw CapacityError("build_frame_operator: truncation level " + std::to_string(s_max) + " exceeds maximum " +
                            std::to_string(opt.max_level));
    for (int s = 0; s <= s_max; ++s)
        for (const auto& I : descendants(root_square(domain), s)) F.squares.push_back(I);
    const int d = F.dim();
    const int nsq = static_cast<int>(F.squares.size());
    const int n = nsq * d;
    F.matrix = Eigen::MatrixXd::Zero(n, n);
    parallel_for(nsq, [&](int col) {
        const DyadicSquare& I = F.squares[col];
        for (int row = 0; row < nsq; ++row) {
            const DyadicSquare& J = F.squares[row];
            if (!supports_overlap(smooth, I, J)) continue;
            F.matrix.block(row * d, col * d, d, d) = galerkin_block(smooth, I, J, opt.band_cells);
        }
    });
    if (n <= 1500) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(F.matrix);
        const auto& sv = svd.singularValues();
        F.condition = sv(0) / sv(n - 1);
        Eigen::BDCSVD<Eigen::MatrixXd> dev(F.matrix - Eigen::MatrixXd::Identity(n, n));
        F.deviation = dev.singularValues()(0);
    } else {
        F.lu.compute(F.matrix);
        F.condition = 1.0 / F.lu.rcond();
        F.deviation = (F.matrix - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().colwise().sum().maxCoeff();
    }
    if (!(F.condition <= opt.max_condition))
        throw IllConditioned("build_frame_operator: condition number " + std::to_string(F.condition) +
                             " exceeds " + std::to_string(opt.max_condition));
    F.lu.compute(F.matrix);
    return F;
}

Eigen::MatrixXcd FrameOperator::coefficients(const SampledFunction& f, const std::vector<DyadicSquare>& which) const {
    for (const auto& I : which) {
        const DyadicSquare root = root_square(domain);
        if (!root.is_ancestor_or_self_of(I) || (mode == FrameMode::Full && I.level > s_max))
            throw InvalidInput("pseudoproject: square outside the frame truncation");
    }
    if (mode == FrameMode::Plain) return analyze(f, which, kappa);
    const int d = dim();
    const Eigen::MatrixXcd b = analyze(f, squares, kappa);
    Eigen::VectorXcd flat(b.size());
    for (int k = 0; k < b.rows(); ++k) flat.segment(k * d, d) = b.row(k).transpose();
    const Eigen::VectorXd re = lu.solve(flat.real()), im = lu.solve(flat.imag());
    Eigen::MatrixXcd out(static_cast<int>(which.size()), d);
    for (std::size_t k = 0; k < which.size(); ++k) {
        const int idx = square_index(which[k]);
        for (int a = 0; a < d; ++a) out(k, a) = Complex(re(idx * d + a), im(idx * d + a));
    }
    return out;
}

WaveletExpansion pseudoprojection(const SampledFunction& f, const DyadicSquare& I, const FrameOperator& frame) {
    WaveletExpansion e;
    e.family = &frame.smooth_family();
    e.squares = {I};
    e.coeffs = frame.coefficients(f, e.squares);
    return e;
}

SampledFunction pseudoproject(const SampledFunction& f, const DyadicSquare& I, int kappa, const FrameOperator& frame) {
    if (kappa != frame.kappa) throw InvalidInput("pseudoproject: kappa differs from the frame's order");
    return pseudoprojection(f, I, frame).synthesize();
}

WaveletExpansion scale_expansion(const SampledFunction& f, const DyadicSquare& K, int s, const FrameOperator& frame) {
    if (s < K.level) throw InvalidInput("scale_projection: scale coarser than the square");
    WaveletExpansion e;
    e.family = &frame.smooth_family();
    e.squares = descendants(K, s);
    e.coeffs = frame.coefficients(f, e.squares);
    return e;
}

SampledFunction scale_projection(const SampledFunction& f, const DyadicSquare& K, int s, int kappa,
                                 const FrameOperator& frame) {
    if (kappa != frame.kappa) throw InvalidInput("scale_projection: kappa differs from the frame's order");
    return scale_expansion(f, K, s, frame).synthesize();
}

}  // namespace parex
