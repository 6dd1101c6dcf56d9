#include <cmath>

#include "doctest.h"
#include "parex/extension.hpp"
#include "parex/funcrep.hpp"
#include "parex/rng.hpp"

using namespace parex;

namespace {

Closure one = [](const Vec2&) { return Complex(1.0); };

// Bounded function with a fixed random table of Fourier modes.
Closure random_bounded(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::array<double, 4>> modes(6);
    for (auto& m : modes) m = {rng.uniform(-6, 6), rng.uniform(-6, 6), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    return [modes](const Vec2& x) {
        Complex s = 0.0;
        for (const auto& m : modes) s += Complex(m[2], m[3]) * std::cos(m[0] * x[0] + m[1] * x[1]);
        return s;
    };
}

}  // namespace

TEST_CASE("constant function") {
    for (int level : {0, 2}) {
        const auto f = sample(one, build_grid(BaseDomain::centered(0.5), level));
        CHECK((f.values.array() == Complex(1.0)).all());
        CHECK(lp_norm(f, 1.0) == doctest::Approx(0.25).epsilon(1e-14));
    }
    const auto u = sample(one, build_grid(BaseDomain::unit(), 1));
    for (double p : {1.0, 2.0, 3.5, kInfinity}) CHECK(lp_norm(u, p) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("node count") {
    const QuadratureRule rule{6, 2};
    const auto f = sample(one, build_grid(BaseDomain::unit(), 2), rule);
    CHECK(f.mesh.node_count() == 16 * (6 * 2) * (6 * 2));
}

TEST_CASE("linear integrand is exact") {
    const auto f = sample([](const Vec2& x) { return Complex(x[0]); }, build_grid(BaseDomain::unit(), 0), QuadratureRule{2, 1});
    CHECK(std::abs(f.integral() - Complex(0.5)) < 1e-15);
}

TEST_CASE("L2 norm is stable across rules") {
    const Closure g = random_bounded(4);
    const Grid grid = build_grid(BaseDomain::centered(1.0), 2);
    const double a = lp_norm(sample(g, grid, QuadratureRule{8, 1}), 2.0);
    const double b = lp_norm(sample(g, grid, QuadratureRule{12, 2}), 2.0);
    CHECK(std::abs(a - b) < 1e-6);
}

TEST_CASE("non-finite samples are rejected") {
    const Closure bad = [](const Vec2& x) { return Complex(x[0] > 0.5 ? std::nan("") : 1.0); };
    CHECK_THROWS_WITH_AS(sample(bad, build_grid(BaseDomain::unit(), 1)), doctest::Contains("non-finite"), InvalidInput);
    CHECK_THROWS_AS(sample(Closure{}, build_grid(BaseDomain::unit(), 1)), InvalidInput);
}

TEST_CASE("restriction") {
    const BaseDomain d = BaseDomain::centered(1.0);
    const Grid g = build_grid(d, 2);
    const auto f = sample(random_bounded(9), g);

    const auto whole = restrict(f, root_square(d));
    CHECK((whole.values - f.values).cwiseAbs().maxCoeff() == 0.0);

    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(f.values.rows(), f.values.cols());
    for (const auto& K : g.squares) sum += restrict(f, K).values;
    CHECK((sum - f.values).cwiseAbs().maxCoeff() == 0.0);

    // the L1 norm of a restriction against a direct integral over K
    const DyadicSquare K = g.squares[5];
    const auto fk = sample(random_bounded(9), build_grid(BaseDomain{K.lower(), K.side()}, 0));
    CHECK(lp_norm(restrict(f, K), 1.0) == doctest::Approx(lp_norm(fk, 1.0)).epsilon(1e-13));

    const DyadicSquare misaligned{3, 1, 1, d.origin, d.side};
    const auto coarse = sample(one, build_grid(d, 0), QuadratureRule{8, 1});
    CHECK_THROWS_AS(restrict(coarse, misaligned), InvalidInput);
}

TEST_CASE("lp norms") {
    CHECK_THROWS_AS(lp_norm(sample(one, build_grid(BaseDomain::unit(), 0)), 0.5), InvalidInput);

    const DyadicSquare child{1, 1, 0, {0, 0}, 1.0};
    const auto ind = sample([child](const Vec2& x) { return Complex(child.contains(x) ? 1.0 : 0.0); },
                            build_grid(BaseDomain::unit(), 1));
    CHECK(lp_norm(ind, 2.0) == doctest::Approx(0.5).epsilon(1e-14));

    // Jensen: (|U|^{-1} ∫ |f|^p)^{1/p} is nondecreasing in p
    const BaseDomain d = BaseDomain::centered(0.5);
    const auto f = sample(random_bounded(21), build_grid(d, 2));
    const double area = d.side * d.side;
    double prev = 0.0;
    for (double p : {1.0, 1.5, 2.0, 3.0, 4.0, 8.0}) {
        const double m = lp_norm(f, p) / std::pow(area, 1.0 / p);
        CHECK(m >= prev * (1 - 1e-14));
        prev = m;
    }
    CHECK(lp_norm(f, kInfinity) >= prev * (1 - 1e-14));
}

TEST_CASE("modulation") {
    const BaseDomain d = BaseDomain::centered(0.5);
    const auto f = sample(random_bounded(3), build_grid(d, 1));
    const auto same = modulate(f, {0, 0, 0});
    CHECK((same.values - f.values).cwiseAbs().maxCoeff() == 0.0);

    const Vec3 z{3.0, -2.0, 5.0};
    const auto g = modulate(f, z);
    CHECK((g.values.cwiseAbs() - f.values.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-14);

    // with Ef(ξ) = ∫ e^{-iΦ·ξ} f, multiplying by e^{iz·Φ} shifts the argument: E(Mz f)(ξ) = Ef(ξ - z)
    Rng rng(8);
    std::vector<Vec3> xi, shifted;
    for (int k = 0; k < 12; ++k) {
        xi.push_back({rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)});
        shifted.push_back(xi.back() - z);
    }
    const auto lhs = extension_values(g, xi);
    const auto rhs = extension_values(f, shifted);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("parabolic rescaling") {
    const BaseDomain d = BaseDomain::centered(1.0);
    const auto f = sample(random_bounded(5), build_grid(d, 1));
    CHECK_THROWS_AS(parabolic_rescale(f, {0, 0}, 1.0), InvalidInput);
    CHECK_THROWS_AS(parabolic_rescale(f, {0, 0}, 0.0), InvalidInput);

    const auto g = parabolic_rescale(f, {0, 0}, 1.0 - 1e-12);
    CHECK(std::abs(g.value_at({0.1, 0.2}) - f.value_at({0.1, 0.2})) < 1e-9);

    const auto h = parabolic_rescale(f, {0.1, -0.2}, 0.5);
    CHECK(lp_norm(h, kInfinity) == lp_norm(f, kInfinity));
    const Vec2 y{0.3, 0.4};
    CHECK(std::abs(h.value_at(y) - f.value_at({0.5 * (0.1 + y[0]), 0.5 * (-0.2 + y[1])})) < 1e-13);
}

TEST_CASE("interpolated values and arithmetic") {
    const BaseDomain d = BaseDomain::unit();
    const Closure poly = [](const Vec2& x) { return Complex(x[0] * x[0] * x[1], 1.0 - x[1]); };
    auto f = sample(poly, build_grid(d, 1));
    f.source = nullptr;
    CHECK(std::abs(f.value_at({0.3, 0.7}) - poly({0.3, 0.7})) < 1e-13);
    CHECK(f.value_at({1.5, 0.2}) == Complex(0.0));

    const auto twice = f + f;
    CHECK((twice.values - Complex(2.0) * f.values).cwiseAbs().maxCoeff() == 0.0);
    const auto other = sample(one, build_grid(d, 2));
    CHECK_THROWS_AS(f + other, InvalidInput);
}

TEST_CASE("discrete Hölder on shared nodes") {
    const Grid g = build_grid(BaseDomain::centered(1.0), 2);
    Rng rng(13);
    for (int t = 0; t < 20; ++t) {
        const auto f1 = sample(random_bounded(rng.next()), g), f2 = sample(random_bounded(rng.next()), g),
                   f3 = sample(random_bounded(rng.next()), g);
        const double q = rng.uniform(3.0, 8.0);
        auto prod = f1;
        prod.values = f1.values.cwiseProduct(f2.values).cwiseProduct(f3.values);
        const double lhs = lp_norm(prod, q / 3.0);
        CHECK(lhs <= lp_norm(f1, q) * lp_norm(f2, q) * lp_norm(f3, q) * (1 + 1e-13));
    }
}

TEST_CASE("norms converge under refinement") {
    const Closure g = [](const Vec2& x) { return Complex(std::exp(x[0]) * (2.0 + std::cos(4 * x[1])), x[0] * x[1]); };
    const Grid grid = build_grid(BaseDomain::centered(1.0), 1);
    for (double p : {1.0, 2.0, 4.0}) {
        const double a = lp_norm(sample(g, grid, QuadratureRule{8, 1}), p);
        CHECK(std::abs(a - lp_norm(sample(g, grid, QuadratureRule{16, 1}), p)) < 1e-8);
        CHECK(std::abs(a - lp_norm(sample(g, grid, QuadratureRule{8, 2}), p)) < 1e-8);
    }
}
