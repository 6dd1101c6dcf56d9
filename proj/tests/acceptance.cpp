// Acceptance run: one PASS/FAIL/REPORT line per criterion.
// Exits nonzero only when a criterion outside the known-unattainable list fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "parex/alpert.hpp"
#include "parex/cli.hpp"
#include "parex/inequality.hpp"
#include "parex/rng.hpp"

using namespace parex;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Known to fail at desk scale; see the README.
const std::set<int> kUnattainable = {11};

struct Line {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Closure bounded_closure(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::array<double, 4>> modes(5);
    for (auto& m : modes) m = {rng.uniform(-6, 6), rng.uniform(-6, 6), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    return [modes](const Vec2& x) {
        Complex s = 0.0;
        for (const auto& m : modes) s += Complex(m[2], m[3]) * std::cos(m[0] * x[0] + m[1] * x[1]);
        return s;
    };
}

const Verdict& verdict(const RunReport& r, const std::string& check) {
    for (const auto& v : r.verdicts)
        if (v.check == check) return v;
    throw std::runtime_error("missing check " + check);
}

json config(const std::string& sub, const json& patch) {
    json c = cli::default_config(sub);
    c.merge_patch(patch);
    return c;
}

Complex inner(const SampledFunction& a, const SampledFunction& b) {
    Complex s = 0.0;
    for (int j = 0; j < a.mesh.ny(); ++j)
        for (int i = 0; i < a.mesh.nx(); ++i)
            s += a.mesh.x.weights[i] * a.mesh.y.weights[j] * std::conj(a.values(i, j)) * b.values(i, j);
    return s;
}

// ∫_{[x0,x1]x[y0,y1]} x^a y^b
double monomial_integral(double x0, double x1, double y0, double y1, int a, int b) {
    return (std::pow(x1, a + 1) - std::pow(x0, a + 1)) / (a + 1) * (std::pow(y1, b + 1) - std::pow(y0, b + 1)) / (b + 1);
}

// Dimension of piecewise polynomials of degree < κ on the four children of [0,1)^2
// with vanishing moments of order < κ, by the rank of the moment matrix.
int null_space_dimension(int kappa) {
    const auto mono = monomial_exponents(kappa - 1);
    const int m = static_cast<int>(mono.size());
    Eigen::MatrixXd M(m, 4 * m);
    for (int c = 0; c < 4; ++c) {
        const double x0 = 0.5 * (c % 2), y0 = 0.5 * (c / 2);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                M(b, c * m + a) = monomial_integral(x0, x0 + 0.5, y0, y0 + 0.5, mono[a][0] + mono[b][0], mono[a][1] + mono[b][1]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    lu.setThreshold(1e-12);
    return 4 * m - static_cast<int>(lu.rank());
}

Line c1() {
    const auto t0 = std::chrono::steady_clock::now();
    double gram = 0.0, moments = 0.0;
    bool dims = true;
    int d1 = 0;
    for (int kappa = 1; kappa <= 4; ++kappa) {
        const AlpertBasis basis = build_alpert_basis(root_square(BaseDomain::unit()), kappa);
        std::vector<SampledFunction> el;
        for (int a = 0; a < basis.dim(); ++a) el.push_back(sample_element(basis, a));
        for (int a = 0; a < basis.dim(); ++a) {
            moments = std::max(moments, moment_check(el[a], kappa));
            for (int b = 0; b < basis.dim(); ++b)
                gram = std::max(gram, std::abs(inner(el[a], el[b]) - Complex(a == b ? 1.0 : 0.0)));
        }
        dims = dims && basis.dim() == null_space_dimension(kappa);
        if (kappa == 1) d1 = basis.dim();
    }
    const double t = seconds_since(t0);
    return {gram <= 1e-12 && moments <= 1e-12 && dims && d1 == 3 && t < 5.0,
            "gram " + fmt(gram) + ", moments " + fmt(moments) + ", d_1 = " + std::to_string(d1) +
                (dims ? ", dimensions match the rank count" : ", dimension mismatch") + ", " + fmt(t) + " s"};
}

Line c2() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (double eta : {0.1, 0.05})
        for (int kappa = 1; kappa <= 3; ++kappa) {
            const AlpertBasis basis = build_alpert_basis(root_square(BaseDomain::unit()), kappa);
            const Mollifier m = build_mollifier(kappa, eta);
            for (int a = 0; a < basis.dim(); ++a) worst = std::max(worst, moment_check(smooth_wavelet(basis, a, m), kappa));
        }
    const double t = seconds_since(t0);
    return {worst < 1e-9 && t < 10.0, "max smooth moment " + fmt(worst) + ", " + fmt(t) + " s"};
}

Line c3() {
    const auto o = cli::execute("alpert-check", config("alpert-check", {{"kappa", 2}, {"s_max", 3}, {"frame_eta", 0.05}}));
    const auto& rec = verdict(o.report, "frame_reconstruction");
    const auto& cond = verdict(o.report, "frame_condition");
    return {rec.value < 1e-6 && cond.value < 1e3,
            "relative reconstruction error " + fmt(rec.value) + ", condition number " + fmt(cond.value)};
}

Line c4() {
    const auto t0 = std::chrono::steady_clock::now();
    const BaseDomain d = BaseDomain::centered(1.0);
    const auto f = sample(bounded_closure(1), build_grid(d, 2));
    const FrequencySet xi = FrequencySet::ball(64.0, 10000, 4);
    ExtendOptions coarse;
    coarse.phase_per_cell = 2.0;
    double peak = 0.0;
    for (std::size_t k = 0; k < xi.points.size(); k += 2500) {
        const std::vector<Vec3> batch(xi.points.begin() + k, xi.points.begin() + std::min(k + 2500, xi.points.size()));
        peak = std::max(peak, extension_values(f, batch, coarse).cwiseAbs().maxCoeff());
    }
    const double excess = peak - lp_norm(f, 1.0);

    const FrequencySet few = FrequencySet::ball(64.0, 200, 5);
    ExtendOptions fine;
    fine.extra_refine = 2;
    const double self = (extension_values(f, few.points) - extension_values(f, few.points, fine)).cwiseAbs().maxCoeff();

    const auto g = sample([](const Vec2& x) { return Complex(1.0 + x[0] - std::sin(4 * x[1])); }, build_grid(d, 2));
    std::vector<Vec3> neg;
    for (const auto& p : few.points) neg.push_back({-p[0], -p[1], -p[2]});
    const double conj =
        (extension_values(g, few.points) - extension_values(g, neg).conjugate()).cwiseAbs().maxCoeff();
    const double t = seconds_since(t0);
    return {excess <= 1e-9 && self < 1e-6 && conj < 1e-10 && t < 60.0,
            "max|Ef| - ||f||_1 = " + fmt(excess) + ", self-convergence " + fmt(self) + ", conjugate symmetry " +
                fmt(conj) + ", " + fmt(t) + " s"};
}

Line c5() {
    const BaseDomain d = BaseDomain::centered(1.0);
    const Grid g = build_grid(d, 2);
    const auto f = sample(bounded_closure(2), g);
    const FrequencySet xi = FrequencySet::ball(16.0, 64, 3);
    Rng rng(6);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
        const DyadicSquare& I = g.squares[rng.next() % g.squares.size()];
        const Vec3 u = rng.unit_vector();
        const double r = 32.0 * std::cbrt(rng.uniform());
        worst = std::max(worst, modulation_shift_check(f, I, {r * u[0], r * u[1], r * u[2]}, xi));
    }
    return {worst <= 1e-6, "max discrepancy " + fmt(worst) + " over 10 (I, z)"};
}

Line c6() {
    const auto t0 = std::chrono::steady_clock::now();
    const BaseDomain d = BaseDomain::centered(1.0);
    const auto one = sample([](const Vec2&) { return Complex(1.0); }, build_grid(d, 0));
    const auto f = sample([](const Vec2& x) { return Complex(std::cos(3 * x[0]) + 0.5 * x[1], x[0] * x[1]); }, build_grid(d, 2));
    double worst = 0.0;
    for (double rho : {0.5, 0.25})
        for (double q : {3.5, 4.0, 6.0})
            for (const auto* g : {&one, &f}) {
                const Vec2 ybar = rho < 0.3 ? Vec2{0.1, -0.05} : Vec2{0.0, 0.0};
                worst = std::max(worst, rescale_identity_check(*g, ybar, rho, q, 32.0).discrepancy);
            }
    const double t = seconds_since(t0);
    return {worst <= 1e-3 && t < 120.0, "max relative discrepancy " + fmt(worst) + ", " + fmt(t) + " s"};
}

Line c7() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    for (const char* inputs : {"constant", "smooth"}) {
        const auto o = cli::execute("convolve", config("convolve", {{"inputs", inputs}}));
        const auto& mass = verdict(o.report, "mass_conservation");
        const auto& oracle = verdict(o.report, "fourier_oracle");
        const double coarse = o.report.results.at("oracle_error_coarse").get<double>();
        ok = ok && mass.value <= 1e-3 && oracle.value <= 1e-2 && oracle.value < coarse;
        detail += std::string(inputs) + ": oracle " + fmt(oracle.value) + " (2h: " + fmt(coarse) + "), mass " +
                  fmt(mass.value) + "; ";
    }
    const double t = seconds_since(t0);
    return {ok && t < 180.0, detail + fmt(t) + " s"};
}

Line c8() {
    const double nu = nu_of_q(4.0);
    const int lambda = lambda_of_q(6.0);
    return {nu == 0.25 && lambda == 6, "nu(4) = " + fmt(nu) + ", lambda(6) = " + std::to_string(lambda)};
}

Line c9() {
    const BaseDomain d = BaseDomain::centered(1.0);
    const Grid g = build_grid(d, 2);
    const double nu = 0.3;
    const auto triples = nu_disjoint_triples(g.squares, g.squares, g.squares, nu);
    Rng rng(17);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const auto f1 = sample(bounded_closure(rng.next()), g), f2 = sample(bounded_closure(rng.next()), g),
                   f3 = sample(bounded_closure(rng.next()), g);
        const Triple& tr = triples[rng.next() % triples.size()];
        const double q = rng.uniform(3.0, 8.0);
        const auto region = FrequencySet::ball(rng.uniform(4.0, 32.0), 64, rng.next());
        const auto rep = trilinear_ratio({&f1, &f2, &f3}, tr, nu, q, region);
        worst = std::max(worst, rep.ratio / rep.params["holder_product"].get<double>());
    }
    return {worst <= 1.0 + 1e-12, "max trilinear / Hölder product " + fmt(worst) + " over 50 instances"};
}

Line c10() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    for (int kappa : {2, 3}) {
        const auto o = cli::execute("annular-scan", config("annular-scan", {{"kappa", kappa}}));
        const double slope = verdict(o.report, "moment_decay_slope").value;
        ok = ok && slope <= 1.0 - kappa;
        detail += "kappa " + std::to_string(kappa) + ": slope " + fmt(slope) + "; ";
    }
    const double t = seconds_since(t0);
    return {ok && t < 300.0, detail + fmt(t) + " s"};
}

json low_scale_config(const std::vector<int>& r_values) {
    return config("annular-scan", {{"mode", "low"},
                                   {"domain_origin", {-0.5, -0.5}},
                                   {"domain_side", 1.0},
                                   {"eta", 0.1},
                                   {"scales", {3, 3, 4}},
                                   {"r_values", r_values}});
}

std::string lhs_values(const RunReport& r) {
    std::string s;
    for (const auto& v : r.verdicts)
        if (v.status == Status::Report) s += (s.empty() ? "" : ", ") + fmt(v.value);
    return s;
}

Line c11() {
    const auto o = cli::execute("annular-scan", low_scale_config({5, 6, 7}));
    const bool ok = verdict(o.report, "low_scale_strict_decrease").status == Status::Pass;
    return {ok, "LHS at r - s2 = 2, 3, 4: " + lhs_values(o.report)};
}

Line c11_far() {
    const auto o = cli::execute("annular-scan", low_scale_config({8, 9, 10}));
    return {verdict(o.report, "low_scale_strict_decrease").status == Status::Pass,
            "LHS at r - s2 = 5, 6, 7: " + lhs_values(o.report)};
}

Line c12() {
    double worst = 0.0;
    std::string detail;
    for (int lambda : {2, 3, 4}) {
        const auto rep = max_zeta_lattice_sum(lambda, 64.0, 200, 1);
        worst = std::max(worst, rep.constant);
        detail += "lambda " + std::to_string(lambda) + ": " + fmt(rep.constant) + "; ";
    }
    return {worst <= 10.0, detail + "max_z sum * 2^{3 lambda} <= 10"};
}

Line c13(double* eps, double* se_ratio) {
    const auto o = cli::execute("eps-mc", cli::default_config("eps-mc"));
    *eps = verdict(o.report, "eps_hat").value;
    *se_ratio = verdict(o.report, "stderr_ratio_doubling").value;
    return {*eps > 0.0, "eps_hat = " + fmt(*eps)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Line c14() {
    const fs::path root = fs::temp_directory_path() / "parex_acceptance";
    fs::remove_all(root);
    bool same = true;
    std::string detail;
    for (const char* sub : {"alpert-check", "rescale-check", "convolve"}) {
        std::ostringstream sink;
        cli::Request a{sub, std::nullopt, {}, root / sub / "a", std::nullopt};
        cli::Request b{sub, std::nullopt, {}, root / sub / "b", std::nullopt};
        cli::run(a, sink, sink);
        cli::run(b, sink, sink);
        json ja = json::parse(slurp(a.out_dir / "report.json")), jb = json::parse(slurp(b.out_dir / "report.json"));
        ja.erase("timestamp");
        jb.erase("timestamp");
        bool eq = ja.dump() == jb.dump() && slurp(a.out_dir / "ledger.csv") == slurp(b.out_dir / "ledger.csv");
        for (const auto& e : fs::directory_iterator(a.out_dir)) {
            const auto name = e.path().filename();
            if (name != "report.json") eq = eq && slurp(e.path()) == slurp(b.out_dir / name);
        }
        same = same && eq;
        detail += std::string(sub) + (eq ? " identical; " : " DIFFERS; ");
    }
    fs::remove_all(root);
    return {same, detail};
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    int unexpected = 0;
    auto emit = [&](int id, const std::string& title, const std::function<Line()>& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        Line l;
        try {
            l = fn();
        } catch (const std::exception& e) {
            l = {false, std::string("error: ") + e.what()};
        }
        std::string tag;
        if (!l.pass && kUnattainable.count(id)) tag = " [known unattainable]";
        if (l.pass && kUnattainable.count(id)) tag = " [listed unattainable but passed]";
        if (!l.pass && !kUnattainable.count(id)) ++unexpected;
        std::cout << (l.pass ? "PASS" : "FAIL") << " C" << id << " " << title << ": " << l.detail << tag << " ("
                  << fmt(seconds_since(t0)) << " s)" << std::endl;
    };
    emit(1, "Alpert construction", c1);
    emit(2, "smooth wavelet moments", c2);
    emit(3, "frame reconstruction", c3);
    emit(4, "extension sanity", c4);
    emit(5, "modulation identity", c5);
    emit(6, "parabolic rescaling", c6);
    emit(7, "convolution oracle", c7);
    emit(8, "closed forms", c8);
    emit(9, "discrete Hölder dominance", c9);
    emit(10, "moment decay", c10);
    emit(11, "low-scale decay", c11);
    {
        const Line far = c11_far();
        std::cout << "REPORT C11 low-scale decay past resonance (strictly decreasing: " << (far.pass ? "yes" : "no")
                  << "): " << far.detail << std::endl;
    }
    emit(12, "zeta lattice-sum cap", c12);
    double eps = 0.0, se_ratio = 0.0;
    emit(13, "martingale Monte Carlo", [&] { return c13(&eps, &se_ratio); });
    std::cout << "REPORT C13 eps_hat = " << fmt(eps) << ", stderr ratio on doubling draws = " << fmt(se_ratio) << std::endl;
    emit(14, "reproducibility", c14);
    const double total = seconds_since(start);
    std::cout << (total <= 900.0 ? "PASS" : "FAIL") << " C14 suite runtime: " << fmt(total) << " s (limit 900 s)"
              << std::endl;
    if (total > 900.0) ++unexpected;
    return unexpected == 0 ? 0 : 1;
}
