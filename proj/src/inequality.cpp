#include "parex/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "parex/parallel.hpp"
#include "parex/rng.hpp"

namespace parex {

double BGParams::nu() const { return std::ldexp(1.0, 10) * std::pow(2.0, -beta * lambda); }

double BGParams::far_radius() const { return std::pow(2.0, -gamma * lambda_prime); }

void BGParams::validate() const {
    if (!(alpha > 0.0 && beta > 0.0 && gamma > 0.0 && delta > 0.0))
        throw InvalidInput("BGParams: alpha, beta, gamma, delta must be positive");
    if (lambda < 1 || lambda_prime < 1) throw InvalidInput("BGParams: lambda and lambda' must be positive integers");
}

bool BGParams::admissible(double q) const { return q > 3.0 && lambda_prime > 1.5 * q / (q - 3.0); }

double zeta(const Vec3& w) {
    static const double norm_const = std::pow(2.0 * kPi, -1.5);
    const double t = std::max(norm(w) - 1.0, 0.0);
    return norm_const * std::exp(-0.5 * t * t);
}

double zeta_envelope(int lambda, const Vec3& w) {
    const double s = std::ldexp(1.0, lambda);
    return zeta({w[0] / s, w[1] / s, w[2] / s}) / (s * s * s);
}

namespace {

double lattice_sum(int lambda, const std::vector<Vec3>& centers, const Vec3& z) {
    double s = 0.0;
    for (const auto& a : centers) s += zeta_envelope(lambda, z - a);
    return s;
}

Vec3 random_in_ball(Rng& rng, double R) {
    const Vec3 u = rng.unit_vector();
    const double r = R * std::cbrt(rng.uniform());
    return {r * u[0], r * u[1], r * u[2]};
}

double sup_norm(const SampledFunction& f) { return lp_norm(f, kInfinity); }

}  // namespace

double zeta_lattice_sum(int lambda, double R, const Vec3& z) {
    return lattice_sum(lambda, ball_lattice(lambda, R).centers, z);
}

LatticeSumReport max_zeta_lattice_sum(int lambda, double R, int samples, std::uint64_t seed) {
    if (samples < 1) throw InvalidInput("max_zeta_lattice_sum: samples must be positive");
    const auto lattice = ball_lattice(lambda, R);
    Rng rng(seed);
    std::vector<Vec3> zs(samples);
    for (auto& z : zs) z = random_in_ball(rng, R);
    std::vector<double> sums(samples);
    parallel_for(samples, [&](int k) { sums[k] = lattice_sum(lambda, lattice.centers, zs[k]); });
    LatticeSumReport out;
    for (int k = 0; k < samples; ++k)
        if (sums[k] > out.max_sum) {
            out.max_sum = sums[k];
            out.argmax = zs[k];
        }
    out.constant = out.max_sum * std::ldexp(1.0, 3 * lambda);
    return out;
}

double WeightField::cap_constant(double sup) const {
    if (squares.empty() || !(sup > 0.0)) return 0.0;
    const double area = squares.front().side() * squares.front().side();
    return max_weight / (area * sup);
}

WeightField weight_field(const SampledFunction& f, int lambda, const Vec3& a, const WeightOptions& opt) {
    if (lambda < 0) throw InvalidInput("weight_field: negative lambda");
    const double spacing = std::ldexp(1.0, lambda);
    for (double c : a)
        if (std::abs(c / spacing - std::round(c / spacing)) > 1e-9)
            throw InvalidInput("weight_field: centre is not on the lattice 2^lambda Z^3");
    WeightField wf;
    wf.center = a;
    wf.lambda = lambda;
    wf.squares = descendants(root_square(f.grid.domain), lambda);
    const int n = static_cast<int>(wf.squares.size());
    if (double(n) * opt.samples > opt.max_evaluations)
        throw CapacityError("weight_field: " + std::to_string(double(n) * opt.samples) +
                            " square-sample evaluations exceed the budget of " + std::to_string(opt.max_evaluations));
    FrequencySet ball = FrequencySet::ball(spacing, opt.samples, opt.seed);
    for (auto& p : ball.points) p = p + a;
    wf.weights.assign(n, 0.0);
    parallel_for(n, [&](int k) {
        const SampledFunction g = restrict(f, wf.squares[k]);
        if (g.support_block().empty()) return;
        const Eigen::VectorXcd e = extension_values(g, ball.points, opt.extend);
        wf.weights[k] = e.cwiseAbs().mean();
    });
    for (int k = 0; k < n; ++k) {
        const bool better = wf.argmax < 0 || wf.weights[k] > wf.max_weight ||
                            (wf.weights[k] == wf.max_weight && wf.squares[k] < wf.squares[wf.argmax]);
        if (better) {
            wf.argmax = k;
            wf.max_weight = wf.weights[k];
        }
    }
    return wf;
}

double envelope_integral(const SampledFunction& f, const DyadicSquare& I, int lambda, const Vec3& xi, int samples,
                         std::uint64_t seed, const ExtendOptions& opt) {
    const double radius = 8.0 * std::ldexp(1.0, lambda);
    FrequencySet ball = FrequencySet::ball(radius, samples, seed);
    for (auto& p : ball.points) p = p + xi;
    const Eigen::VectorXcd e = extension_values(restrict(f, I), ball.points, opt);
    double s = 0.0;
    for (int k = 0; k < ball.size(); ++k) s += ball.weights[k] * std::abs(e(k)) * zeta_envelope(lambda, ball.points[k] - xi);
    return s;
}

const char* to_string(BGCase c) {
    switch (c) {
        case BGCase::Case1: return "Case1";
        case BGCase::Case2: return "Case2";
        case BGCase::Case3: return "Case3";
    }
    return "?";
}

CaseLabel classify_center(const WeightField& wf, const BGParams& params) {
    params.validate();
    if (wf.lambda != params.lambda) throw InvalidInput("classify_center: weight field and parameters differ in lambda");
    CaseLabel label;
    label.star = wf.argmax;
    const double w = wf.max_weight;
    if (!(w > 0.0)) return label;
    const int n = static_cast<int>(wf.squares.size());
    const double heavy = std::pow(2.0, -params.alpha * params.lambda) * w;
    const double sep = params.nu();
    std::vector<int> big;
    for (int k = 0; k < n; ++k)
        if (wf.weights[k] > heavy) big.push_back(k);
    auto dist = [&](int x, int y) { return norm(wf.squares[x].center() - wf.squares[y].center()); };
    for (std::size_t i = 0; i < big.size(); ++i)
        for (std::size_t j = i + 1; j < big.size(); ++j) {
            if (!(dist(big[i], big[j]) > sep)) continue;
            for (std::size_t k = j + 1; k < big.size(); ++k)
                if (dist(big[i], big[k]) > sep && dist(big[j], big[k]) > sep) {
                    label.kind = BGCase::Case1;
                    label.triple = {big[i], big[j], big[k]};
                    return label;
                }
        }
    const double small = std::pow(2.0, -params.delta * params.lambda) * w;
    const double far = params.far_radius();
    for (int k = 0; k < n; ++k)
        if (dist(k, wf.argmax) > far && wf.weights[k] > small) {
            label.kind = BGCase::Case3;
            label.second = k;
            return label;
        }
    return label;
}

bool verify_case1(const WeightField& wf, const BGParams& params, const CaseLabel& label) {
    if (label.kind != BGCase::Case1) return false;
    const double heavy = std::pow(2.0, -params.alpha * params.lambda) * wf.max_weight;
    for (int k : label.triple)
        if (k < 0 || !(wf.weights[k] > heavy)) return false;
    for (int u = 0; u < 3; ++u)
        for (int v = u + 1; v < 3; ++v) {
            const Vec2 d = wf.squares[label.triple[u]].center() - wf.squares[label.triple[v]].center();
            if (!(std::hypot(d[0], d[1]) > params.nu())) return false;
        }
    return true;
}

double nu_of_q(double q) {
    if (!(q > 3.0)) throw InvalidInput("nu_of_q: q must exceed 3");
    if (std::isinf(q)) return 128.0;
    return std::pow(2.0, 10.0 - 3.0 * q / (q - 3.0));
}

int lambda_of_q(double q) {
    if (!(q > 3.0)) throw InvalidInput("lambda_of_q: q must exceed 3");
    return static_cast<int>(std::ceil(3.0 * q / (q - 3.0) - 1e-12));
}

nlohmann::json RatioReport::to_json() const {
    nlohmann::json j{{"kind", kind},   {"q", q},         {"nu", nu},       {"region", region},
                     {"params", params}, {"lhs", lhs},   {"rhs", rhs},     {"ratio", ratio},
                     {"seed", seed},   {"member", member}, {"warnings", warnings}};
    j["exponent"] = exponent ? nlohmann::json(*exponent) : nlohmann::json(nullptr);
    nlohmann::json s = nlohmann::json::array();
    for (const auto& p : sweep) s.push_back({p.x, p.value});
    j["sweep"] = std::move(s);
    return j;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw InvalidInput("fit_slope: need two or more matched points");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxy += (xs[k] - mx) * (ys[k] - my);
        sxx += (xs[k] - mx) * (xs[k] - mx);
    }
    if (sxx == 0.0) throw InvalidInput("fit_slope: abscissae are all equal");
    return sxy / sxx;
}

std::optional<double> fit_exponent(const std::vector<SweepPoint>& pts, bool log_x) {
    if (pts.size() < 4) return std::nullopt;
    std::vector<double> xs, ys;
    for (const auto& p : pts) {
        if (!(p.value > 0.0) || (log_x && !(p.x > 0.0))) return std::nullopt;
        xs.push_back(log_x ? std::log2(p.x) : p.x);
        ys.push_back(std::log2(p.value));
    }
    return fit_slope(xs, ys);
}

const char* to_string(FamilyKind k) {
    switch (k) {
        case FamilyKind::Constants: return "constants";
        case FamilyKind::Indicators: return "indicators";
        case FamilyKind::RandomSigns: return "random_signs";
        case FamilyKind::ModulatedBumps: return "modulated_bumps";
    }
    return "?";
}

FamilyKind parse_family(const std::string& name) {
    for (auto k : {FamilyKind::Constants, FamilyKind::Indicators, FamilyKind::RandomSigns, FamilyKind::ModulatedBumps})
        if (name == to_string(k)) return k;
    throw InvalidInput("unknown function family '" + name + "'");
}

SampledFunction random_sign_function(const BaseDomain& domain, int level, std::uint64_t seed,
                                     const QuadratureRule& rule) {
    const Grid g = build_grid(domain, level);
    Rng rng(seed);
    std::vector<double> signs(g.squares.size());
    for (auto& s : signs) s = rng.sign();
    const int n = 1 << level;
    const double side = domain.side / n;
    const Vec2 o = domain.origin;
    return sample(
        [signs, n, side, o](const Vec2& x) {
            const int i = std::clamp(static_cast<int>(std::floor((x[0] - o[0]) / side)), 0, n - 1);
            const int j = std::clamp(static_cast<int>(std::floor((x[1] - o[1]) / side)), 0, n - 1);
            return Complex(signs[static_cast<std::size_t>(j) * n + i]);
        },
        g, rule);
}

Closure modulated_bump(const DyadicSquare& I, const Vec3& z) {
    const Vec2 c = I.center();
    const double r0 = 0.5 * I.side();
    return [c, r0, z](const Vec2& x) {
        const double r = std::hypot(x[0] - c[0], x[1] - c[1]) / r0;
        if (r >= 1.0) return Complex(0.0);
        return std::exp(1.0 - 1.0 / (1.0 - r * r)) * std::polar(1.0, dot(z, phi(x)));
    };
}

std::vector<NamedFunction> family_members(const FamilySpec& spec, const BaseDomain& domain, std::uint64_t seed,
                                          const QuadratureRule& rule) {
    if (spec.level < 0 || spec.members < 1) throw InvalidInput("family: level must be >= 0 and members >= 1");
    std::vector<NamedFunction> out;
    const Grid g = build_grid(domain, spec.level);
    switch (spec.kind) {
        case FamilyKind::Constants:
            out.push_back({"constant", sample([](const Vec2&) { return Complex(1.0); }, g, rule)});
            break;
        case FamilyKind::Indicators:
            for (const auto& I : g.squares)
                out.push_back({"indicator[" + std::to_string(I.i) + "," + std::to_string(I.j) + "]",
                               sample([I](const Vec2& x) { return Complex(I.contains(x) ? 1.0 : 0.0); }, g, rule)});
            break;
        case FamilyKind::RandomSigns:
            for (int k = 0; k < spec.members; ++k)
                out.push_back({"random_signs#" + std::to_string(k), random_sign_function(domain, spec.level, seed + k, rule)});
            break;
        case FamilyKind::ModulatedBumps: {
            Rng rng(seed);
            for (int k = 0; k < spec.members; ++k) {
                const DyadicSquare& I = g.squares[rng.next() % g.squares.size()];
                const Vec3 z = random_in_ball(rng, 16.0);
                out.push_back({"modulated_bump#" + std::to_string(k), sample(modulated_bump(I, z), g, rule)});
            }
            break;
        }
    }
    return out;
}

RatioReport qr_sweep(double q, const std::vector<double>& radii, const FamilySpec& family, const BaseDomain& domain,
                     std::uint64_t seed, const QrOptions& opt) {
    if (!(q >= 1.0)) throw InvalidInput("qr_estimate: q must be >= 1");
    if (radii.empty()) throw InvalidInput("qr_estimate: no radii");
    for (std::size_t k = 0; k < radii.size(); ++k)
        if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] > radii[k - 1])))
            throw InvalidInput("qr_estimate: radii must be positive and increasing");
    std::vector<Vec3> pts;
    std::vector<double> wts;
    std::vector<std::size_t> ends;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        const double inner = k == 0 ? 0.0 : radii[k - 1];
        const FrequencySet shell = FrequencySet::shell(inner, radii[k], opt.points, seed + 1000 + k);
        pts.insert(pts.end(), shell.points.begin(), shell.points.end());
        wts.insert(wts.end(), shell.weights.begin(), shell.weights.end());
        ends.push_back(pts.size());
    }
    const auto members = family_members(family, domain, seed, opt.rule);
    RatioReport rep;
    rep.kind = "qr";
    rep.q = q;
    rep.region = "ball";
    rep.seed = seed;
    rep.params = {{"family", to_string(family.kind)}, {"level", family.level}, {"members", family.members},
                  {"radii", radii}, {"points_per_shell", opt.points}};
    std::vector<double> best(radii.size(), -1.0);
    std::vector<int> arg(radii.size(), 0);
    std::vector<double> best_lhs(radii.size(), 0.0), best_rhs(radii.size(), 1.0);
    for (std::size_t m = 0; m < members.size(); ++m) {
        const Eigen::VectorXcd e = extension_values(members[m].f, pts, opt.extend);
        const double sup = sup_norm(members[m].f);
        double acc = 0.0;
        std::size_t start = 0;
        for (std::size_t k = 0; k < radii.size(); ++k) {
            for (std::size_t p = start; p < ends[k]; ++p) acc += wts[p] * std::pow(std::abs(e(p)), q);
            start = ends[k];
            const double lhs = std::pow(acc, 1.0 / q);
            const double ratio = sup > 0.0 ? lhs / sup : 0.0;
            if (ratio > best[k]) {
                best[k] = ratio;
                arg[k] = static_cast<int>(m);
                best_lhs[k] = lhs;
                best_rhs[k] = sup;
            }
        }
    }
    for (std::size_t k = 0; k < radii.size(); ++k) rep.sweep.push_back({radii[k], best[k]});
    rep.lhs = best_lhs.back();
    rep.rhs = best_rhs.back();
    rep.ratio = best.back();
    rep.member = members[arg.back()].name;
    rep.exponent = fit_exponent(rep.sweep);
    return rep;
}

RatioReport qr_estimate(double q, double R, const FamilySpec& family, const BaseDomain& domain, std::uint64_t seed,
                        const QrOptions& opt) {
    return qr_sweep(q, {R}, family, domain, seed, opt);
}

RatioReport trilinear_ratio(const std::array<const SampledFunction*, 3>& f, const Triple& triple, double nu, double q,
                            const FrequencySet& region, const TrilinearOptions& opt) {
    if (!(q >= 3.0)) throw InvalidInput("trilinear_ratio: q must be >= 3");
    if (region.size() == 0) throw InvalidInput("trilinear_ratio: empty frequency region");
    if (opt.require_disjoint && !is_nu_disjoint(triple, nu))
        throw InvalidInput("trilinear_ratio: triple is not nu-disjoint");
    std::array<Eigen::VectorXcd, 3> e;
    std::array<double, 3> norms{}, linear{};
    for (int k = 0; k < 3; ++k) {
        const SampledFunction g = restrict(*f[k], triple[k]);
        e[k] = extension_values(g, region.points, opt.extend);
        norms[k] = opt.lq_normalization ? lp_norm(g, q) : sup_norm(g);
        linear[k] = weighted_lq_norm(e[k], region.weights, q);
    }
    const Eigen::VectorXcd prod = e[0].cwiseProduct(e[1]).cwiseProduct(e[2]);
    RatioReport rep;
    rep.kind = "trilinear";
    rep.q = q;
    rep.nu = nu;
    rep.region = region.kind == RegionKind::Annulus ? "annulus" : "ball";
    rep.seed = region.seed;
    rep.lhs = weighted_lq_norm(prod, region.weights, q / 3.0);
    rep.rhs = norms[0] * norms[1] * norms[2];
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
    std::array<double, 3> lin_ratio{};
    for (int k = 0; k < 3; ++k) lin_ratio[k] = norms[k] > 0.0 ? linear[k] / norms[k] : 0.0;
    rep.params = {{"linear_lhs", linear},
                  {"linear_ratios", lin_ratio},
                  {"holder_product", lin_ratio[0] * lin_ratio[1] * lin_ratio[2]},
                  {"normalization", opt.lq_normalization ? "Lq" : "Linf"},
                  {"outer_radius", region.outer},
                  {"inner_radius", region.inner},
                  {"points", region.size()}};
    return rep;
}

RatioReport alpert_annular_ratio(const std::array<const SampledFunction*, 3>& f, const AnnularSetup& setup,
                                 const FrameOperator& frame) {
    const auto& s = setup.scales;
    if (!(s[0] <= s[1] && s[1] <= s[2])) throw InvalidInput("alpert_annular_ratio: scales must satisfy s1 <= s2 <= s3");
    if (!(setup.delta > 0.0 && setup.delta < 1.0)) throw InvalidInput("alpert_annular_ratio: delta must lie in (0, 1)");
    RatioReport rep;
    rep.kind = "annular";
    rep.q = setup.q;
    rep.nu = setup.nu;
    rep.region = "annulus";
    rep.seed = setup.seed;
    const double r = setup.r;
    const bool window = r / (1.0 + setup.delta) < s[1] && s[2] < r / (1.0 - setup.delta);
    if (!window) rep.warnings.push_back("scale window r/(1+delta) < s2 <= s3 < r/(1-delta) not satisfied");
    if (!(frame.kappa > 20.0 / setup.delta)) rep.warnings.push_back("kappa <= 20/delta");
    const FrequencySet A = FrequencySet::annulus(setup.r, setup.points, setup.seed);
    Eigen::VectorXcd prod = Eigen::VectorXcd::Ones(A.size());
    rep.rhs = 1.0;
    for (int k = 0; k < 3; ++k) {
        const WaveletExpansion e = scale_expansion(*f[k], setup.squares[k], s[k], frame);
        prod = prod.cwiseProduct(e.extend(A.points, setup.extend));
        rep.rhs *= sup_norm(*f[k]);
    }
    rep.lhs = weighted_lq_norm(prod, A.weights, setup.q / 3.0);
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
    rep.params = {{"scales", s},         {"r", setup.r},           {"delta", setup.delta},
                  {"kappa", frame.kappa}, {"eta", frame.eta},      {"frame_mode", frame.mode == FrameMode::Full ? "full" : "plain"},
                  {"in_window", window},  {"points", setup.points}};
    return rep;
}

RatioReport projection_decay(const SampledFunction& f, const DyadicSquare& K, int r, const std::vector<int>& scales,
                             double q, const FrameOperator& frame, int points, std::uint64_t seed,
                             const ExtendOptions& opt) {
    const FrequencySet A = FrequencySet::annulus(r, points, seed);
    RatioReport rep;
    rep.kind = "projection_decay";
    rep.q = q;
    rep.region = "annulus";
    rep.seed = seed;
    rep.rhs = sup_norm(f);
    for (int s : scales) {
        const Eigen::VectorXcd e = scale_expansion(f, K, s, frame).extend(A.points, opt);
        const double absolute = -std::log2(K.root_side) + s;
        rep.sweep.push_back({absolute - r, weighted_lq_norm(e, A.weights, q)});
        rep.lhs = std::max(rep.lhs, rep.sweep.back().value);
    }
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
    rep.exponent = fit_exponent(rep.sweep, false);
    rep.params = {{"r", r}, {"scales", scales}, {"kappa", frame.kappa}, {"eta", frame.eta}, {"points", points}};
    return rep;
}

RescaleResult rescale_identity_check(const SampledFunction& f, const Vec2& ybar, double rho, double q, double R,
                                     const RescaleOptions& opt) {
    if (!(rho > 0.0 && rho < 1.0)) throw InvalidInput("rescale_identity_check: rho must lie in (0, 1)");
    if (!(q >= 1.0) || !(R > 0.0)) throw InvalidInput("rescale_identity_check: need q >= 1 and R > 0");
    const Vec2 lo{ybar[0] - rho, ybar[1] - rho};
    const double eps = 1e-12;
    if (lo[0] < f.mesh.x.lo() - eps || lo[1] < f.mesh.y.lo() - eps || ybar[0] + rho > f.mesh.x.hi() + eps ||
        ybar[1] + rho > f.mesh.y.hi() + eps)
        throw InvalidInput("rescale_identity_check: the neighbourhood of ybar leaves the domain");
    const FrequencySet ball = FrequencySet::ball(R, opt.points, opt.seed);

    const SampledFunction direct = sample([&f](const Vec2& y) { return f.value_at(y); }, cover_grid(lo, 2.0 * rho), opt.rule);
    const Eigen::VectorXcd lhs_vals = extension_values(direct, ball.points, opt.extend);

    const SampledFunction scaled = parabolic_rescale(f, {ybar[0] / rho, ybar[1] / rho}, rho);
    const SampledFunction g = sample([&scaled](const Vec2& y) { return scaled.value_at(y); }, cover_grid({-1.0, -1.0}, 2.0), opt.rule);
    std::vector<Vec3> mapped;
    std::vector<double> mapped_w;
    for (int k = 0; k < ball.size(); ++k) {
        const Vec3& z = ball.points[k];
        mapped.push_back({rho * (z[0] + 2.0 * ybar[0] * z[2]), rho * (z[1] + 2.0 * ybar[1] * z[2]), rho * rho * z[2]});
        mapped_w.push_back(std::pow(rho, 4) * ball.weights[k]);
    }
    const Eigen::VectorXcd rhs_vals = extension_values(g, mapped, opt.extend);

    RescaleResult out;
    out.points = ball.size();
    out.prefactor = std::pow(rho, 2.0 - 4.0 / q);
    out.lhs = weighted_lq_norm(lhs_vals, ball.weights, q);
    out.rhs = out.prefactor * weighted_lq_norm(rhs_vals, mapped_w, q);
    out.discrepancy = out.lhs > 0.0 ? std::abs(out.lhs - out.rhs) / out.lhs : std::abs(out.rhs);
    return out;
}

SquareFunctionField square_function(const SampledFunction& f, const std::vector<DyadicSquare>& squares,
                                    const FrameOperator& frame, const std::vector<Vec3>& xi, const ExtendOptions& opt) {
    const DyadicSquare U0 = interior_grandchild(frame.domain);
    if (frame.mode == FrameMode::Full)
        for (const auto& I : squares)
            if (!frame.covers(I)) throw InvalidInput("square_function: the frame truncation does not cover the grid");
    SquareFunctionField out;
    out.xi = xi;
    out.squares = squares;
    const Eigen::MatrixXcd coeffs = frame.coefficients(f, squares);
    const int n = static_cast<int>(squares.size());
    out.terms = Eigen::MatrixXcd::Zero(static_cast<int>(xi.size()), n);
    const Vec2 lo = U0.lower(), hi = U0.upper();
    parallel_for(n, [&](int k) {
        WaveletExpansion e;
        e.family = &frame.smooth_family();
        e.squares = {squares[k]};
        e.coeffs = coeffs.row(k);
        TensorMesh m = e.mesh();
        m.x = add_edges(m.x, {lo[0], hi[0]});
        m.y = add_edges(m.y, {lo[1], hi[1]});
        const SampledFunction g = restrict(e.synthesize(m), U0);
        if (g.support_block().empty()) return;
        out.terms.col(k) = extension_values(g, xi, opt);
    });
    out.values = out.terms.cwiseAbs2().rowwise().sum().cwiseSqrt();
    return out;
}

Eigen::VectorXd khintchine_average(const Eigen::MatrixXcd& terms, int draws, std::uint64_t seed) {
    if (draws < 1) throw InvalidInput("khintchine_average: draws must be positive");
    Rng rng(seed);
    Eigen::MatrixXd S(terms.cols(), draws);
    for (int d = 0; d < draws; ++d)
        for (int k = 0; k < S.rows(); ++k) S(k, d) = rng.sign();
    const Eigen::MatrixXcd V = terms * S.cast<Complex>();
    return V.cwiseAbs().rowwise().mean();
}

RatioReport martingale_mc(const SampledFunction& f, const DyadicSquare& U, int s, double q, const FrameOperator& frame,
                          const MartingaleOptions& opt) {
    if (opt.draws < 64) throw InvalidInput("martingale_mc: at least 64 draws are required");
    if (s < 0 || !(q >= 1.0)) throw InvalidInput("martingale_mc: need s >= 0 and q >= 1");
    const FrequencySet ball = FrequencySet::ball(std::ldexp(1.0, s), opt.points, opt.seed);
    const WaveletExpansion e = scale_expansion(f, U, U.level + s, frame);
    const Eigen::MatrixXcd A = e.extension_columns(ball.points, opt.extend);
    Rng rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
    Eigen::MatrixXd S(A.cols(), opt.draws);
    for (int d = 0; d < opt.draws; ++d)
        for (int k = 0; k < S.rows(); ++k) S(k, d) = rng.sign();
    const Eigen::MatrixXcd V = A * S.cast<Complex>();
    std::vector<double> norms(opt.draws);
    for (int d = 0; d < opt.draws; ++d) norms[d] = weighted_lq_norm(V.col(d), ball.weights, q);
    auto stats = [&](int count) {
        double m = 0.0, v = 0.0;
        for (int d = 0; d < count; ++d) m += norms[d];
        m /= count;
        for (int d = 0; d < count; ++d) v += (norms[d] - m) * (norms[d] - m);
        v /= std::max(1, count - 1);
        return std::pair{m, std::sqrt(v / count)};
    };
    const auto [mean, stderr_all] = stats(opt.draws);
    const auto [mean_half, stderr_half] = stats(opt.draws / 2);
    RatioReport rep;
    rep.kind = "martingale";
    rep.q = q;
    rep.region = "ball";
    rep.seed = opt.seed;
    rep.lhs = mean;
    rep.rhs = lp_norm(restrict(f, U), q);
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
    rep.params = {{"s", s},
                  {"draws", opt.draws},
                  {"points", opt.points},
                  {"radius", std::ldexp(1.0, s)},
                  {"stderr", stderr_all},
                  {"stderr_half_draws", stderr_half},
                  {"mean_half_draws", mean_half},
                  {"kappa", frame.kappa},
                  {"frame_mode", frame.mode == FrameMode::Full ? "full" : "plain"}};
    return rep;
}

}  // namespace parex
