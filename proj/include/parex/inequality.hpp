#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "parex/extension.hpp"
#include "parex/frame.hpp"

namespace parex {

/// Bourgain–Guth pigeonholing parameters.
struct BGParams {
    double alpha = 2.0;
    double beta = 1.0;
    double gamma = 2.0;
    double delta = 2.0;
    int lambda = 2;
    int lambda_prime = 1;

    /// Separation 2^{10} 2^{-βλ} required between the squares of a Case 1 triple.
    double nu() const;
    /// Radius 2^{-γλ'} beyond which a square counts as far from I_*.
    double far_radius() const;
    void validate() const;
    /// λ' > (3/2) q / (q - 3).
    bool admissible(double q) const;
};

/// ζ(w) = sup_{|w - w'| <= 1} ρ(w') for the unit-mass Gaussian ρ.
double zeta(const Vec3& w);
/// ζ_λ(w) = 2^{-3λ} ζ(w / 2^λ).
double zeta_envelope(int lambda, const Vec3& w);
/// Σ_{a ∈ Γ_λ(R)} ζ_λ(z - a).
double zeta_lattice_sum(int lambda, double R, const Vec3& z);

struct LatticeSumReport {
    double max_sum = 0.0;
    double constant = 0.0;  // max_sum 2^{3λ}
    Vec3 argmax{0.0, 0.0, 0.0};
};
/// Maximum of the lattice sum over `samples` random z in B(0, R).
LatticeSumReport max_zeta_lattice_sum(int lambda, double R, int samples, std::uint64_t seed);

struct WeightOptions {
    int samples = 256;
    std::uint64_t seed = 1;
    double max_evaluations = 2e6;  // squares x samples
    ExtendOptions extend;
};

/// Weights w_I^a over the squares of G_λ[U], by the average of |E f_I| over B(a, 2^λ).
struct WeightField {
    Vec3 center{0.0, 0.0, 0.0};
    int lambda = 0;
    std::vector<DyadicSquare> squares;
    std::vector<double> weights;
    int argmax = -1;
    double max_weight = 0.0;

    /// max_I w_I / (2^{-2λ} ||f||_∞).
    double cap_constant(double sup_norm) const;
};

WeightField weight_field(const SampledFunction& f, int lambda, const Vec3& a, const WeightOptions& opt = {});

/// ∫ |T_I f(z)| ζ_λ(z - xi) dz over B(xi, 8·2^λ), stratified in radius.
double envelope_integral(const SampledFunction& f, const DyadicSquare& I, int lambda, const Vec3& xi, int samples,
                         std::uint64_t seed, const ExtendOptions& opt = {});

enum class BGCase { Case1 = 1, Case2 = 2, Case3 = 3 };
const char* to_string(BGCase c);

struct CaseLabel {
    BGCase kind = BGCase::Case2;
    std::array<int, 3> triple{-1, -1, -1};  // Case 1 witnesses (indices into the weight field)
    int star = -1;                          // I_*
    int second = -1;                        // Case 3 witness I_**
};

CaseLabel classify_center(const WeightField& wf, const BGParams& params);
/// Re-verifies the Case 1 witness triple against the weight and separation thresholds.
bool verify_case1(const WeightField& wf, const BGParams& params, const CaseLabel& label);

/// ν(q) = 2^{10} 2^{-3q/(q-3)}.
double nu_of_q(double q);
/// λ(q) = ceil(3q/(q-3)).
int lambda_of_q(double q);

struct SweepPoint {
    double x = 0.0;
    double value = 0.0;
};

struct RatioReport {
    std::string kind;
    double q = 0.0;
    double nu = 0.0;
    std::string region;
    nlohmann::json params = nlohmann::json::object();
    double lhs = 0.0;
    double rhs = 1.0;
    double ratio = 0.0;
    std::optional<double> exponent;
    std::uint64_t seed = 0;
    std::string member;
    std::vector<SweepPoint> sweep;
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
};

/// Least-squares slope of ys against xs.
double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys);
/// Slope of log2(value) against log2(x) (or x itself); requires at least four points.
std::optional<double> fit_exponent(const std::vector<SweepPoint>& pts, bool log_x = true);

enum class FamilyKind { Constants, Indicators, RandomSigns, ModulatedBumps };
const char* to_string(FamilyKind k);
FamilyKind parse_family(const std::string& name);

struct FamilySpec {
    FamilyKind kind = FamilyKind::RandomSigns;
    int level = 2;
    int members = 4;
};

struct NamedFunction {
    std::string name;
    SampledFunction f;
};

/// f = Σ_I ±1_I over G_level with independent signs.
SampledFunction random_sign_function(const BaseDomain& domain, int level, std::uint64_t seed,
                                     const QuadratureRule& rule = {});
/// Smooth bump on the disc inscribed in I, times e^{i z·Φ}.
Closure modulated_bump(const DyadicSquare& I, const Vec3& z);
std::vector<NamedFunction> family_members(const FamilySpec& spec, const BaseDomain& domain, std::uint64_t seed,
                                          const QuadratureRule& rule = {});

struct QrOptions {
    int points = 1024;  // frequency samples per radial shell
    QuadratureRule rule;
    ExtendOptions extend;
};

/// Q_R estimate: max over the family of ||Ef||_{L^q(B_R)} / ||f||_∞.
RatioReport qr_estimate(double q, double R, const FamilySpec& family, const BaseDomain& domain, std::uint64_t seed,
                        const QrOptions& opt = {});
/// Estimates for increasing R on nested samples (shell k is added at step k); log-log exponent.
RatioReport qr_sweep(double q, const std::vector<double>& radii, const FamilySpec& family, const BaseDomain& domain,
                     std::uint64_t seed, const QrOptions& opt = {});

struct TrilinearOptions {
    bool require_disjoint = true;
    bool lq_normalization = false;  // RHS Π ||f_k||_q instead of Π ||f_k||_∞
    ExtendOptions extend;
};

/// LHS = || Ef1 Ef2 Ef3 ||_{L^{q/3}(region)} with f_k restricted to the k-th square.
/// params records the three linear ratios and their product.
RatioReport trilinear_ratio(const std::array<const SampledFunction*, 3>& f, const Triple& triple, double nu,
                            double q, const FrequencySet& region, const TrilinearOptions& opt = {});

struct AnnularSetup {
    std::array<DyadicSquare, 3> squares;
    std::array<int, 3> scales{0, 0, 0};  // s1 <= s2 <= s3, absolute levels
    int r = 0;
    double q = 4.0;
    double delta = 0.5;
    double nu = 0.125;
    int points = 2048;
    std::uint64_t seed = 1;
    ExtendOptions extend;
};

/// LHS = || Π_k E Q^η_{s_k, U_k} f_k ||_{L^{q/3}(A(0, 2^r))}, RHS = Π ||f_k||_∞.
RatioReport alpert_annular_ratio(const std::array<const SampledFunction*, 3>& f, const AnnularSetup& setup,
                                 const FrameOperator& frame);

/// || E Q^η_{s,K} f ||_{L^q(A(0, 2^r))} for each level s below the domain root. The sweep
/// abscissa is the absolute scale -log2 ℓ minus r; exponent is the slope of log2 against it.
RatioReport projection_decay(const SampledFunction& f, const DyadicSquare& K, int r, const std::vector<int>& scales,
                             double q, const FrameOperator& frame, int points, std::uint64_t seed,
                             const ExtendOptions& opt = {});

struct RescaleOptions {
    int points = 1024;
    std::uint64_t seed = 7;
    QuadratureRule rule;
    ExtendOptions extend;
};

struct RescaleResult {
    double lhs = 0.0;        // ||Int_ρ||_{L^q(B_R)}
    double rhs = 0.0;        // ρ^{2-4/q} ||E g||_{L^q} on the mapped samples
    double prefactor = 0.0;  // ρ^{2-4/q}
    double discrepancy = 0.0;
    int points = 0;
};

/// Int_ρ(ξ) = ∫_{ȳ + [-ρ, ρ)^2} e^{-iΦ(y)·ξ} f(y) dy against the rescaled form
/// ρ^2 E g(ρ(ξ' + 2ȳ ξ3), ρ^2 ξ3), g(y') = f(ȳ + ρ y') on [-1, 1)^2.
RescaleResult rescale_identity_check(const SampledFunction& f, const Vec2& ybar, double rho, double q, double R,
                                     const RescaleOptions& opt = {});

struct SquareFunctionField {
    std::vector<Vec3> xi;
    std::vector<DyadicSquare> squares;
    Eigen::MatrixXcd terms;  // column I: E(1_{U0} Δ^η_I f)(ξ)
    Eigen::VectorXd values;  // (Σ_I |terms|^2)^{1/2}
};

SquareFunctionField square_function(const SampledFunction& f, const std::vector<DyadicSquare>& squares,
                                    const FrameOperator& frame, const std::vector<Vec3>& xi,
                                    const ExtendOptions& opt = {});
/// E_± |Σ_I ± terms(ξ, I)| per ξ over `draws` sign patterns.
Eigen::VectorXd khintchine_average(const Eigen::MatrixXcd& terms, int draws, std::uint64_t seed);

struct MartingaleOptions {
    int draws = 128;
    int points = 512;
    std::uint64_t seed = 1;
    ExtendOptions extend;
};

/// E_± || E[(±Q^s_U) f] ||_{L^q(B(0, 2^s))} / ||f||_{L^q(U)} with independent signs per
/// wavelet coefficient; s is measured from the level of U. params holds the standard error.
RatioReport martingale_mc(const SampledFunction& f, const DyadicSquare& U, int s, double q,
                          const FrameOperator& frame, const MartingaleOptions& opt = {});

}  // namespace parex
