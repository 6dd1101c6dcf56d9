#include <cmath>

#include "doctest.h"
#include "parex/inequality.hpp"
#include "parex/rng.hpp"

using namespace parex;

namespace {

Closure smooth_closure() {
    return [](const Vec2& x) { return Complex(std::cos(5 * x[0]) + x[1], std::sin(3 * x[1]) * x[0]); };
}

Closure indicator_sum(std::vector<DyadicSquare> squares) {
    return [squares](const Vec2& x) {
        for (const auto& s : squares)
            if (s.contains(x)) return Complex(1.0);
        return Complex(0.0);
    };
}

DyadicSquare sq(int level, int i, int j, const BaseDomain& d) { return DyadicSquare{level, i, j, d.origin, d.side}; }

Vec3 in_ball(Rng& rng, const Vec3& a, double R) {
    const Vec3 u = rng.unit_vector();
    const double r = R * std::cbrt(rng.uniform());
    return {a[0] + r * u[0], a[1] + r * u[1], a[2] + r * u[2]};
}

}  // namespace

TEST_CASE("zeta envelope") {
    const double z0 = std::pow(2.0 * kPi, -1.5);
    CHECK(zeta({0, 0, 0}) == doctest::Approx(z0).epsilon(1e-15));
    CHECK(zeta({0.7, 0, 0}) == zeta({0, 0, 0}));
    CHECK(zeta_envelope(3, {0, 0, 0}) == doctest::Approx(z0 / 512).epsilon(1e-15));
    CHECK(zeta_envelope(2, {8, 0, 0}) == doctest::Approx(zeta({2, 0, 0}) / 64).epsilon(1e-15));
    double prev = zeta({0, 0, 0});
    for (double r = 0.25; r < 6.0; r += 0.25) {
        const double v = zeta({0, r, 0});
        CHECK(v <= prev);
        prev = v;
    }
}

TEST_CASE("lattice sum constant") {
    // ∫ζ = (2π)^{-3/2} (4π/3 + 4π ∫_0^∞ (1+t)^2 e^{-t^2/2} dt)
    const double mass = std::pow(2.0 * kPi, -1.5) * (4.0 * kPi / 3.0 + 4.0 * kPi * (2.0 * std::sqrt(kPi / 2.0) + 2.0));
    for (int lambda : {2, 3}) {
        const auto rep = max_zeta_lattice_sum(lambda, 8.0 * std::ldexp(1.0, lambda), 200, 1);
        MESSAGE("lambda " << lambda << ": C = " << rep.constant);
        CHECK(rep.constant <= 10.0);
        CHECK(rep.constant == doctest::Approx(mass).epsilon(0.02));
    }
    CHECK_THROWS_AS(max_zeta_lattice_sum(2, 16.0, 0, 1), InvalidInput);
}

TEST_CASE("weights of a single-square function") {
    const BaseDomain d = BaseDomain::centered(1.0);
    const DyadicSquare I0 = sq(2, 1, 2, d);
    const auto f = sample(indicator_sum({I0}), build_grid(d, 2));
    const auto wf = weight_field(f, 2, {0, 0, 0});
    REQUIRE(wf.squares.size() == 16);
    CHECK(wf.squares[wf.argmax] == I0);
    for (int k = 0; k < 16; ++k)
        if (k != wf.argmax) CHECK(wf.weights[k] == 0.0);
    // the ball average of |E 1_I| never exceeds |I|
    CHECK(wf.max_weight <= I0.side() * I0.side() * (1 + 1e-12));
    CHECK(wf.cap_constant(1.0) <= 1.0 + 1e-12);
    CHECK_THROWS_AS(weight_field(f, 2, {1, 0, 0}), InvalidInput);

    const BGParams p;
    CHECK(classify_center(wf, p).kind == BGCase::Case2);
}

TEST_CASE("envelope inequality") {
    const BaseDomain d = BaseDomain::centered(1.0);
    const int lambda = 2;
    const auto f = sample(smooth_closure(), build_grid(d, lambda));
    const Vec3 a{4, -8, 4};
    WeightOptions wo;
    wo.samples = 512;
    const auto wf = weight_field(f, lambda, a, wo);
    MESSAGE("cap constant " << wf.cap_constant(lp_norm(f, kInfinity)));
    CHECK(wf.cap_constant(lp_norm(f, kInfinity)) <= 1.0);

    Rng rng(3);
    double pointwise = 0.0, lo = 1e300, hi = 0.0;
    for (int k : {0, 5, 10, 15}) {
        const DyadicSquare& I = wf.squares[k];
        const double env_a = envelope_integral(f, I, lambda, a, 2048, 7);
        for (int t = 0; t < 5; ++t) {
            const Vec3 xi = in_ball(rng, a, std::ldexp(1.0, lambda));
            const double T = std::abs(extend_localized(f, I, FrequencySet::explicit_points({xi})).values(0));
            const double env = envelope_integral(f, I, lambda, xi, 2048, 7);
            pointwise = std::max(pointwise, T / env_a);
            lo = std::min(lo, env / wf.weights[k]);
            hi = std::max(hi, env / wf.weights[k]);
        }
    }
    MESSAGE("|T_I f(xi)| / envelope(a) <= " << pointwise << ", envelope(xi) / w in [" << lo << ", " << hi << "]");
    CHECK(pointwise <= 1.0);
    CHECK(lo >= 1.0);
    CHECK(hi <= 8.0);
}

TEST_CASE("case classification") {
    const BaseDomain d = BaseDomain::centered(1.0);
    const Grid g = build_grid(d, 2);

    BGParams p;
    p.beta = 6.0;
    CHECK(p.nu() == 0.25);
    const auto three = sample(indicator_sum({sq(2, 0, 0, d), sq(2, 3, 0, d), sq(2, 0, 3, d)}), g);
    const auto wf3 = weight_field(three, 2, {0, 0, 0});
    const CaseLabel c1 = classify_center(wf3, p);
    REQUIRE(c1.kind == BGCase::Case1);
    CHECK(verify_case1(wf3, p, c1));
    CaseLabel forged = c1;
    forged.triple[2] = forged.triple[1];
    CHECK_FALSE(verify_case1(wf3, p, forged));

    const BGParams dflt;
    CHECK(dflt.far_radius() == 0.25);
    const auto two = sample(indicator_sum({sq(2, 0, 0, d), sq(2, 3, 3, d)}), g);
    const auto wf2 = weight_field(two, 2, {0, 0, 0});
    const CaseLabel c3 = classify_center(wf2, dflt);
    REQUIRE(c3.kind == BGCase::Case3);
    CHECK(c3.second != c3.star);
    CHECK(wf2.weights[c3.second] > std::pow(2.0, -dflt.delta * dflt.lambda) * wf2.max_weight);
    CHECK(norm(wf2.squares[c3.second].center() - wf2.squares[c3.star].center()) > dflt.far_radius());

    BGParams other = dflt;
    other.lambda = 3;
    CHECK_THROWS_AS(classify_center(wf2, other), InvalidInput);
}

TEST_CASE("exponent parameters") {
    CHECK(nu_of_q(4.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(nu_of_q(kInfinity) == 128.0);
    CHECK(nu_of_q(1e9) == doctest::Approx(128.0).epsilon(1e-6));
    CHECK(lambda_of_q(6.0) == 6);
    CHECK(lambda_of_q(4.0) == 12);
    CHECK_THROWS_AS(nu_of_q(3.0), InvalidInput);
    CHECK_THROWS_AS(lambda_of_q(2.5), InvalidInput);
    BGParams p;
    CHECK_FALSE(p.admissible(4.0));
    p.lambda_prime = 7;
    CHECK(p.admissible(4.0));
}

TEST_CASE("slope fits") {
    CHECK(fit_slope({0, 1, 2, 3}, {1, 3, 5, 7}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(fit_slope({1, 1}, {0, 1}), InvalidInput);
    CHECK_FALSE(fit_exponent({{1, 1}, {2, 2}, {4, 4}}).has_value());
    const auto e = fit_exponent({{1, 1}, {2, 4}, {4, 16}, {8, 64}});
    REQUIRE(e.has_value());
    CHECK(*e == doctest::Approx(2.0));
}

TEST_CASE("Q_R at small radius and growth in R") {
    const BaseDomain d = BaseDomain::centered(1.0);
    const double R = 0.01, q = 4.0;
    const FamilySpec constants{FamilyKind::Constants, 1, 1};
    const auto small = qr_estimate(q, R, constants, d, 1);
    const double want = std::pow(4.0 / 3.0 * kPi * R * R * R, 1.0 / q);
    CHECK(small.ratio == doctest::Approx(want).epsilon(0.01));
    CHECK(small.ratio <= want * (1 + 1e-12));

    QrOptions opt;
    opt.points = 256;
    opt.extend.phase_per_cell = 2.0;
    const auto sweep = qr_sweep(q, {2, 4, 8, 16}, FamilySpec{FamilyKind::RandomSigns, 2, 3}, d, 5, opt);
    REQUIRE(sweep.sweep.size() == 4);
    for (std::size_t k = 1; k < sweep.sweep.size(); ++k) CHECK(sweep.sweep[k].value >= sweep.sweep[k - 1].value);
    CHECK(sweep.exponent.has_value());
    CHECK_THROWS_AS(qr_sweep(q, {4, 2}, constants, d, 1), InvalidInput);
}

TEST_CASE("trilinear ratio") {
    const BaseDomain d = BaseDomain::centered(1.0);
    const Grid g = build_grid(d, 2);
    const Triple t{sq(2, 0, 0, d), sq(2, 3, 0, d), sq(2, 0, 3, d)};
    const auto f = sample(smooth_closure(), g);
    const auto region = FrequencySet::ball(16.0, 400, 2);
    const auto rep = trilinear_ratio({&f, &f, &f}, t, 0.3, 4.0, region);
    CHECK(rep.ratio > 0.0);
    CHECK(rep.ratio <= rep.params["holder_product"].get<double>() * (1 + 1e-12));

    const auto zero = sample([](const Vec2&) { return Complex(0.0); }, g);
    CHECK(trilinear_ratio({&f, &zero, &f}, t, 0.3, 4.0, region).lhs == 0.0);

    const Triple touching{sq(2, 0, 0, d), sq(2, 1, 0, d), sq(2, 0, 3, d)};
    CHECK_THROWS_AS(trilinear_ratio({&f, &f, &f}, touching, 0.3, 4.0, region), InvalidInput);
}

TEST_CASE("annular ratio of zero functions") {
    const BaseDomain d = BaseDomain::centered(1.0);
    const FrameOperator frame = build_frame_operator(d, 0, 2, 0.05, FrameMode::Plain);
    const auto zero = sample([](const Vec2&) { return Complex(0.0); }, build_grid(d, 3));
    AnnularSetup s;
    s.squares = {sq(1, 0, 0, d), sq(1, 1, 0, d), sq(1, 0, 1, d)};
    s.scales = {2, 2, 2};
    s.r = 3;
    s.points = 64;
    const auto rep = alpert_annular_ratio({&zero, &zero, &zero}, s, frame);
    CHECK(rep.lhs == 0.0);
    CHECK(rep.ratio == 0.0);
    s.scales = {3, 2, 2};
    CHECK_THROWS_AS(alpert_annular_ratio({&zero, &zero, &zero}, s, frame), InvalidInput);
}

TEST_CASE("parabolic rescaling identity") {
    const BaseDomain d = BaseDomain::centered(1.0);
    const auto one = sample([](const Vec2&) { return Complex(1.0); }, build_grid(d, 1));
    const auto half = rescale_identity_check(one, {0, 0}, 0.5, 4.0, 16.0);
    CHECK(half.prefactor == 0.5);
    CHECK(half.discrepancy < 1e-10);

    auto f = sample(smooth_closure(), build_grid(d, 2));
    f.source = nullptr;
    const auto r = rescale_identity_check(f, {0.1, -0.05}, 0.25, 4.0, 32.0);
    CHECK(r.prefactor == 0.25);
    CHECK(r.discrepancy < 1e-10);

    CHECK_THROWS_AS(rescale_identity_check(f, {0.4, 0}, 0.25, 4.0, 8.0), InvalidInput);
    CHECK_THROWS_AS(rescale_identity_check(f, {0, 0}, 1.0, 4.0, 8.0), InvalidInput);
}

TEST_CASE("square function") {
    BaseDomain d = BaseDomain::centered(1.0);
    d.interior_grandchild_offset = std::array<int, 2>{1, 1};
    const FrameOperator frame = build_frame_operator(d, 0, 2, 0.05, FrameMode::Plain);
    const auto f = random_sign_function(d, 4, 3);
    const auto xi = FrequencySet::ball(16.0, 64, 4).points;

    const auto one = square_function(f, {sq(3, 3, 3, d)}, frame, xi);
    CHECK((one.values - one.terms.col(0).cwiseAbs()).cwiseAbs().maxCoeff() < 1e-15);

    const auto S = square_function(f, descendants(root_square(d), 3), frame, xi);
    for (Eigen::Index k = 0; k < S.values.size(); ++k)
        CHECK(S.terms.row(k).cwiseAbs().maxCoeff() <= S.values(k) * (1 + 1e-12));
    const Eigen::VectorXd kh = khintchine_average(S.terms, 256, 5);
    double ratio = 0.0;
    for (Eigen::Index k = 0; k < kh.size(); ++k) ratio += kh(k) / S.values(k);
    ratio /= static_cast<double>(kh.size());
    MESSAGE("Khintchine ratio " << ratio);
    CHECK(ratio >= 1.0 / 3.0);
    CHECK(ratio <= 3.0);
}

TEST_CASE("martingale Monte Carlo") {
    const BaseDomain d{{-0.125, -0.125}, 0.25};
    const FrameOperator frame = build_frame_operator(d, 0, 1, 0.05, FrameMode::Plain);
    const auto f = random_sign_function(d, 3, 11);
    MartingaleOptions opt;
    opt.draws = 64;
    opt.points = 128;
    const auto a = martingale_mc(f, root_square(d), 2, 4.0, frame, opt);
    CHECK(a.ratio > 0.0);
    CHECK(a.params["stderr"].get<double>() > 0.0);

    // flipping f flips every draw, so the norms are unchanged
    auto neg = f;
    neg.values = -f.values;
    neg.source = nullptr;
    const auto b = martingale_mc(neg, root_square(d), 2, 4.0, frame, opt);
    CHECK(b.lhs == doctest::Approx(a.lhs).epsilon(1e-12));

    opt.draws = 32;
    CHECK_THROWS_AS(martingale_mc(f, root_square(d), 2, 4.0, frame, opt), InvalidInput);
}
