#include "parex/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "parex/alpert.hpp"
#include "parex/extension.hpp"
#include "parex/frame.hpp"
#include "parex/grid.hpp"
#include "parex/inequality.hpp"
#include "parex/measures.hpp"
#include "parex/rng.hpp"

namespace parex::cli {

using nlohmann::json;

namespace {

// Defaults per subcommand. A key's default value also fixes its type.
const std::map<std::string, json>& schemas() {
    static const std::map<std::string, json> s = {
        {"grid",
         {{"domain_origin", {-0.5, -0.5}},
          {"domain_side", 1.0},
          {"level", 2},
          {"max_level", kDefaultMaxLevel},
          {"nu", 0.25},
          {"lattice_lambda", 2},
          {"lattice_radius", 16.0}}},
        {"alpert-check",
         {{"kappa", 2},
          {"eta", 0.1},
          {"frame_eta", 0.05},
          {"s_max", 2},
          {"seed", 1},
          {"gram_tol", 1e-12},
          {"moment_tol", 1e-12},
          {"smooth_moment_tol", 1e-9},
          {"reconstruction_tol", 1e-6},
          {"max_condition", 1e3}}},
        {"extend",
         {{"domain_origin", {-0.5, -0.5}},
          {"domain_side", 1.0},
          {"family", "random_signs"},
          {"family_level", 2},
          {"seed", 1},
          {"region", "ball"},
          {"radius", 16.0},
          {"inner_radius", 0.0},
          {"points", 2048},
          {"q", 4.0},
          {"budget", 4e9},
          {"phase_per_cell", 0.7853981633974483},
          {"bound_tol", 1e-9},
          {"write_field", true}}},
        {"qr-scan",
         {{"domain_origin", {-0.5, -0.5}},
          {"domain_side", 1.0},
          {"q", 4.0},
          {"radii", {8.0, 16.0, 32.0, 64.0, 128.0}},
          {"family", "random_signs"},
          {"family_level", 2},
          {"members", 4},
          {"seed", 1},
          {"points", 512},
          {"phase_per_cell", 2.0}}},
        {"trilinear-scan",
         {{"domain_origin", {-0.5, -0.5}},
          {"domain_side", 1.0},
          {"q", 4.0},
          {"nu", 0.25},
          {"triple_level", 2},
          {"triple_index", 0},
          {"family", "random_signs"},
          {"family_level", 3},
          {"seed", 1},
          {"radii", {8.0, 16.0, 32.0, 64.0}},
          {"points", 1024},
          {"phase_per_cell", 2.0},
          {"holder_tol", 1e-12}}},
        {"annular-scan",
         {{"mode", "high"},
          {"domain_origin", {0.25, 0.125}},
          {"domain_side", 0.03125},
          {"f_level", 6},
          {"f_seed", 42},
          {"kappa", 2},
          {"eta", 0.05},
          {"q", 4.0},
          {"r", 6},
          {"scales", {2, 3, 4, 5}},
          {"r_values", {5, 6, 7}},
          {"squares", {{3, 3, 3}, {3, 5, 3}, {3, 3, 5}}},
          {"nu", 0.125},
          {"delta", 0.5},
          {"points", 256},
          {"seed", 9}}},
        {"convolve",
         {{"nu", 0.125},
          {"u1_lower", {0.0, 0.0}},
          {"u1_side", 0.125},
          {"u2_lower", {0.25, 0.0}},
          {"u2_side", 0.125},
          {"inputs", "constant"},
          {"spacing", 0.0078125},
          {"fiber_nodes", 64},
          {"oracle_points", 20},
          {"oracle_radius", 32.0},
          {"seed", 3},
          {"oracle_tol", 1e-2},
          {"mass_tol", 1e-3},
          {"write_density", true}}},
        {"rescale-check",
         {{"domain_origin", {-0.5, -0.5}},
          {"domain_side", 1.0},
          {"input", "constant"},
          {"rho", 0.5},
          {"q", 4.0},
          {"radius", 32.0},
          {"ybar", {0.0, 0.0}},
          {"points", 1024},
          {"seed", 7},
          {"order", 8},
          {"tol", 1e-3}}},
        {"bg-classify",
         {{"domain_origin", {-0.5, -0.5}},
          {"domain_side", 1.0},
          {"family", "random_signs"},
          {"family_level", 3},
          {"seed", 1},
          {"alpha", 2.0},
          {"beta", 1.0},
          {"gamma", 2.0},
          {"delta", 2.0},
          {"lambda", 2},
          {"lambda_prime", 1},
          {"radius", 16.0},
          {"max_centers", 8},
          {"samples", 64},
          {"max_evaluations", 2e6}}},
        {"sqfn",
         {{"domain_origin", {-0.5, -0.5}},
          {"domain_side", 1.0},
          {"grandchild", {1, 1}},
          {"f_level", 4},
          {"seed", 1},
          {"kappa", 2},
          {"eta", 0.05},
          {"level", 3},
          {"radius", 32.0},
          {"points", 256},
          {"draws", 256},
          {"domination_tol", 1e-12},
          {"khintchine_low", 1.0 / 3.0},
          {"khintchine_high", 3.0}}},
        {"eps-mc",
         {{"domain_origin", {-0.125, -0.125}},
          {"domain_side", 0.25},
          {"kappa", 1},
          {"eta", 0.05},
          {"q", 4.0},
          {"scales", {3, 4, 5, 6}},
          {"draws", 128},
          {"points", 512},
          {"seed", 5},
          {"f_seed", 100}}},
    };
    return s;
}

void check_type(const json& def, const json& val, const std::string& where) {
    auto fail = [&](const char* want) {
        throw SchemaError("config key '" + where + "': expected " + want + ", got " + val.dump());
    };
    if (def.is_boolean()) {
        if (!val.is_boolean()) fail("a boolean");
    } else if (def.is_number_integer()) {
        if (!val.is_number_integer()) fail("an integer");
    } else if (def.is_number()) {
        if (!val.is_number()) fail("a number");
    } else if (def.is_string()) {
        if (!val.is_string()) fail("a string");
    } else if (def.is_array()) {
        if (!val.is_array()) fail("an array");
        if (!def.empty())
            for (std::size_t k = 0; k < val.size(); ++k) check_type(def[0], val[k], where + "[" + std::to_string(k) + "]");
    }
}

void merge(json& cfg, const json& extra, const std::string& subcommand) {
    if (!extra.is_object()) throw SchemaError("config must be a JSON object");
    for (auto it = extra.begin(); it != extra.end(); ++it) {
        if (it.key() == "subcommand") {
            if (!it->is_string() || *it != subcommand)
                throw SchemaError("config is for subcommand " + it->dump() + ", not '" + subcommand + "'");
            continue;
        }
        if (!cfg.contains(it.key())) throw SchemaError("unknown config key '" + it.key() + "' for " + subcommand);
        check_type(cfg[it.key()], *it, it.key());
        // integers given for real-valued keys are stored as reals so the hash does not depend on spelling
        cfg[it.key()] = cfg[it.key()].is_number_float() && it->is_number() ? json(it->get<double>()) : *it;
    }
}

// --- config accessors ---

double num(const json& c, const char* k) { return c.at(k).get<double>(); }
int integer(const json& c, const char* k) { return c.at(k).get<int>(); }
std::uint64_t seed(const json& c, const char* k) { return c.at(k).get<std::uint64_t>(); }
std::string str(const json& c, const char* k) { return c.at(k).get<std::string>(); }

Vec2 vec2(const json& c, const char* k) {
    const json& v = c.at(k);
    if (v.size() != 2) throw SchemaError(std::string("config key '") + k + "' must have two entries");
    return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<double> reals(const json& c, const char* k) { return c.at(k).get<std::vector<double>>(); }
std::vector<int> ints(const json& c, const char* k) { return c.at(k).get<std::vector<int>>(); }

BaseDomain domain_of(const json& c) {
    BaseDomain d{vec2(c, "domain_origin"), num(c, "domain_side"), std::nullopt};
    d.validate();
    return d;
}

Rect rect_of(const json& c, const char* lower, const char* side) {
    const Vec2 lo = vec2(c, lower);
    const double s = num(c, side);
    if (!(s > 0.0)) throw InvalidInput(std::string(side) + " must be positive");
    return {lo, {lo[0] + s, lo[1] + s}};
}

std::vector<Vec3> random_frequencies(int n, double R, std::uint64_t s) {
    Rng rng(s);
    std::vector<Vec3> out;
    for (int k = 0; k < n; ++k) {
        const Vec3 u = rng.unit_vector();
        const double r = R * std::cbrt(rng.uniform());
        out.push_back({r * u[0], r * u[1], r * u[2]});
    }
    return out;
}

json sweep_json(const std::vector<SweepPoint>& pts) {
    json a = json::array();
    for (const auto& p : pts) a.push_back({{"x", p.x}, {"value", p.value}});
    return a;
}

Complex inner(const SampledFunction& a, const SampledFunction& b) {
    Complex s = 0.0;
    for (int j = 0; j < a.mesh.ny(); ++j)
        for (int i = 0; i < a.mesh.nx(); ++i)
            s += a.mesh.x.weights[i] * a.mesh.y.weights[j] * std::conj(a.values(i, j)) * b.values(i, j);
    return s;
}

double l2_distance(const SampledFunction& a, const SampledFunction& b) {
    SampledFunction d = a;
    d.values -= b.values;
    d.source = nullptr;
    return lp_norm(d, 2.0);
}

// --- subcommands ---

Outcome run_grid(const json& c) {
    Outcome o;
    const BaseDomain d = domain_of(c);
    const int level = integer(c, "level");
    const Grid g = build_grid(d, level, integer(c, "max_level"));
    const auto& sq = g.squares;
    const auto triples = dedup_unordered(nu_disjoint_triples(sq, sq, sq, num(c, "nu")));
    bool rechecked = true;
    std::map<std::string, int> classes;
    for (const auto& t : triples) {
        rechecked = rechecked && is_nu_disjoint(t, num(c, "nu"));
        ++classes[to_string(classify_triple(t))];
    }
    const BallLattice lat = ball_lattice(integer(c, "lattice_lambda"), num(c, "lattice_radius"));
    auto& v = o.report.verdicts;
    v.push_back(holds("square_count", sq.size() == (std::size_t{1} << (2 * level)),
                      std::to_string(sq.size()) + " squares"));
    v.push_back(holds("triples_recheck", rechecked, std::to_string(triples.size()) + " unordered triples"));
    v.push_back(report_only("triples_unordered", static_cast<double>(triples.size())));
    v.push_back(report_only("lattice_points", static_cast<double>(lat.centers.size()),
                            lat.warning ? "spacing exceeds radius" : ""));
    o.report.results = {{"grid", to_json(g)},
                        {"triples", to_json(triples)},
                        {"triple_classes", classes},
                        {"lattice", {{"spacing", lat.spacing}, {"points", lat.centers.size()}, {"warning", lat.warning}}}};
    return o;
}

Outcome run_alpert_check(const json& c) {
    Outcome o;
    const int kappa = integer(c, "kappa");
    const BaseDomain unit = BaseDomain::unit();
    const AlpertBasis basis = build_alpert_basis(root_square(unit), kappa);
    std::vector<SampledFunction> el;
    for (int a = 0; a < basis.dim(); ++a) el.push_back(sample_element(basis, a));
    double gram = 0.0, moments = 0.0, smooth_moments = 0.0;
    for (int a = 0; a < basis.dim(); ++a) {
        moments = std::max(moments, moment_check(el[a], kappa));
        for (int b = 0; b < basis.dim(); ++b)
            gram = std::max(gram, std::abs(inner(el[a], el[b]) - Complex(a == b ? 1.0 : 0.0)));
    }
    const Mollifier phi_eta = build_mollifier(kappa, num(c, "eta"));
    for (int a = 0; a < basis.dim(); ++a)
        smooth_moments = std::max(smooth_moments, moment_check(smooth_wavelet(basis, a, phi_eta), kappa));

    FrameOptions fo;
    fo.eta_max = std::max(fo.eta_max, num(c, "frame_eta"));
    const FrameOperator F = build_frame_operator(unit, integer(c, "s_max"), kappa, num(c, "frame_eta"), FrameMode::Full, fo);
    Rng rng(seed(c, "seed"));
    WaveletExpansion span{&F.smooth_family(), F.squares, Eigen::MatrixXcd(F.squares.size(), F.dim()), 2};
    for (Eigen::Index k = 0; k < span.coeffs.size(); ++k) span.coeffs(k) = rng.normal();
    const TensorMesh mesh = span.mesh();
    const SampledFunction f = span.synthesize(mesh);
    WaveletExpansion rec = span;
    rec.coeffs = F.coefficients(f, F.squares);
    const double recon = l2_distance(f, rec.synthesize(mesh)) / lp_norm(f, 2.0);

    auto& v = o.report.verdicts;
    v.push_back(report_only("dimension", basis.dim()));
    v.push_back(at_most("gram_identity", gram, num(c, "gram_tol")));
    v.push_back(at_most("plain_moments", moments, num(c, "moment_tol")));
    v.push_back(at_most("smooth_moments", smooth_moments, num(c, "smooth_moment_tol")));
    v.push_back(at_most("frame_reconstruction", recon, num(c, "reconstruction_tol")));
    v.push_back(at_most("frame_condition", F.condition, num(c, "max_condition")));
    v.push_back(report_only("frame_deviation", F.deviation, "||S_eta - I||_2"));
    o.report.results = {{"dimension", basis.dim()},
                        {"frame_squares", F.squares.size()},
                        {"condition", F.condition},
                        {"deviation", F.deviation}};
    return o;
}

FrequencySet region_of(const json& c, std::uint64_t s) {
    const std::string kind = str(c, "region");
    const double R = num(c, "radius"), r0 = num(c, "inner_radius");
    const int n = integer(c, "points");
    if (kind == "ball") return FrequencySet::ball(R, n, s);
    if (kind == "shell") return FrequencySet::shell(r0, R, n, s);
    if (kind == "monte_carlo") return FrequencySet::monte_carlo(r0, R, n, s);
    if (kind == "lattice") return FrequencySet::lattice(R / n, R);
    throw SchemaError("region must be one of ball, shell, monte_carlo, lattice");
}

Outcome run_extend(const json& c) {
    Outcome o;
    const BaseDomain d = domain_of(c);
    FamilySpec spec{parse_family(str(c, "family")), integer(c, "family_level"), 1};
    const NamedFunction member = family_members(spec, d, seed(c, "seed")).front();
    ExtendOptions eo;
    eo.budget = num(c, "budget");
    eo.phase_per_cell = num(c, "phase_per_cell");
    const ExtensionField field = extend(member.f, region_of(c, seed(c, "seed")), eo);
    const double l1 = lp_norm(member.f, 1.0);
    const double peak = field.values.cwiseAbs().maxCoeff();
    auto& v = o.report.verdicts;
    v.push_back(at_most("triangle_bound", peak - l1, num(c, "bound_tol"), "max|Ef| - ||f||_1"));
    v.push_back(report_only("lq_norm", local_lq_norm(field, num(c, "q"))));
    v.push_back(report_only("max_phase_per_cell", field.certificate.max_phase_per_cell));
    o.report.results = {{"member", member.name},
                        {"points", field.xi.size()},
                        {"l1_norm", l1},
                        {"max_modulus", peak},
                        {"mesh_nodes", field.certificate.nodes}};
    if (c.at("write_field").get<bool>()) {
        std::ostringstream os;
        write_field_csv(field, os);
        o.files["field.csv"] = os.str();
    }
    return o;
}

Outcome run_qr_scan(const json& c) {
    Outcome o;
    FamilySpec spec{parse_family(str(c, "family")), integer(c, "family_level"), integer(c, "members")};
    QrOptions qo;
    qo.points = integer(c, "points");
    qo.extend.phase_per_cell = num(c, "phase_per_cell");
    const RatioReport rep = qr_sweep(num(c, "q"), reals(c, "radii"), spec, domain_of(c), seed(c, "seed"), qo);
    bool monotone = true;
    for (std::size_t k = 1; k < rep.sweep.size(); ++k) monotone = monotone && rep.sweep[k].value >= rep.sweep[k - 1].value;
    auto& v = o.report.verdicts;
    v.push_back(holds("monotone_in_R", monotone));
    if (rep.exponent) v.push_back(report_only("growth_exponent", *rep.exponent));
    o.report.results = rep.to_json();
    return o;
}

Outcome run_trilinear_scan(const json& c) {
    Outcome o;
    const BaseDomain d = domain_of(c);
    const double nu = num(c, "nu"), q = num(c, "q");
    const Grid g = build_grid(d, integer(c, "triple_level"));
    const auto triples = dedup_unordered(nu_disjoint_triples(g.squares, g.squares, g.squares, nu));
    const int idx = integer(c, "triple_index");
    if (idx < 0 || idx >= static_cast<int>(triples.size()))
        throw InvalidInput("trilinear-scan: triple_index " + std::to_string(idx) + " outside the " +
                           std::to_string(triples.size()) + " nu-disjoint triples");
    const Triple& t = triples[idx];
    FamilySpec spec{parse_family(str(c, "family")), integer(c, "family_level"), 3};
    auto members = family_members(spec, d, seed(c, "seed"));
    while (members.size() < 3) members.push_back(members.front());
    const std::array<const SampledFunction*, 3> f{&members[0].f, &members[1].f, &members[2].f};
    std::vector<SweepPoint> sweep;
    double worst_excess = -kInfinity;
    json runs = json::array();
    TrilinearOptions to;
    to.extend.phase_per_cell = num(c, "phase_per_cell");
    for (double R : reals(c, "radii")) {
        const RatioReport rep =
            trilinear_ratio(f, t, nu, q, FrequencySet::ball(R, integer(c, "points"), seed(c, "seed")), to);
        const double holder = rep.params.at("holder_product").get<double>();
        worst_excess = std::max(worst_excess, rep.ratio - holder * (1.0 + num(c, "holder_tol")));
        sweep.push_back({R, rep.ratio});
        runs.push_back(rep.to_json());
    }
    auto& v = o.report.verdicts;
    v.push_back(at_most("holder_domination", worst_excess, 0.0, "ratio minus product of linear ratios"));
    if (const auto e = fit_exponent(sweep)) v.push_back(report_only("growth_exponent", *e));
    o.report.results = {{"triple", to_json(std::vector<Triple>{t})}, {"sweep", sweep_json(sweep)}, {"runs", runs}};
    return o;
}

Outcome run_annular_scan(const json& c) {
    Outcome o;
    const BaseDomain d = domain_of(c);
    const int kappa = integer(c, "kappa");
    FrameOptions fo;
    fo.eta_max = std::max(fo.eta_max, num(c, "eta"));
    const FrameOperator frame = build_frame_operator(d, 0, kappa, num(c, "eta"), FrameMode::Plain, fo);
    const SampledFunction f = random_sign_function(d, integer(c, "f_level"), seed(c, "f_seed"));
    const std::string mode = str(c, "mode");
    auto& v = o.report.verdicts;
    if (mode == "high") {
        const RatioReport rep = projection_decay(f, root_square(d), integer(c, "r"), ints(c, "scales"), num(c, "q"),
                                                 frame, integer(c, "points"), seed(c, "seed"));
        if (!rep.exponent) throw InvalidInput("annular-scan: at least four scales are needed for a slope");
        v.push_back(at_most("moment_decay_slope", *rep.exponent, 1.0 - kappa, "slope <= 1 - kappa"));
        o.report.results = rep.to_json();
    } else if (mode == "low") {
        const json& sq = c.at("squares");
        if (sq.size() != 3) throw SchemaError("squares must list three [level, i, j] entries");
        AnnularSetup a;
        for (int k = 0; k < 3; ++k) {
            if (sq[k].size() != 3) throw SchemaError("squares must list three [level, i, j] entries");
            a.squares[k] = DyadicSquare{sq[k][0].get<int>(), sq[k][1].get<int>(), sq[k][2].get<int>(), d.origin, d.side};
        }
        const auto sc = ints(c, "scales");
        if (sc.size() != 3) throw SchemaError("low mode needs three scales s1 <= s2 <= s3");
        a.scales = {sc[0], sc[1], sc[2]};
        a.q = num(c, "q");
        a.delta = num(c, "delta");
        a.nu = num(c, "nu");
        a.points = integer(c, "points");
        a.seed = seed(c, "seed");
        std::vector<SweepPoint> sweep;
        json runs = json::array();
        for (int r : ints(c, "r_values")) {
            a.r = r;
            const RatioReport rep = alpert_annular_ratio({&f, &f, &f}, a, frame);
            sweep.push_back({static_cast<double>(r - a.scales[1]), rep.lhs});
            runs.push_back(rep.to_json());
        }
        bool decreasing = sweep.size() >= 2;
        for (std::size_t k = 1; k < sweep.size(); ++k) decreasing = decreasing && sweep[k].value < sweep[k - 1].value;
        v.push_back(holds("low_scale_strict_decrease", decreasing, "annular LHS against r - s2"));
        for (const auto& p : sweep) v.push_back(report_only("lhs_at_r_minus_s2_" + std::to_string(int(p.x)), p.value));
        o.report.results = {{"sweep", sweep_json(sweep)}, {"runs", runs}};
    } else {
        throw SchemaError("annular-scan mode must be 'high' or 'low'");
    }
    return o;
}

Outcome run_convolve(const json& c) {
    Outcome o;
    const Rect U1 = rect_of(c, "u1_lower", "u1_side"), U2 = rect_of(c, "u2_lower", "u2_side");
    const std::string inputs = str(c, "inputs");
    Closure f1, f2;
    if (inputs == "constant") {
        f1 = f2 = [](const Vec2&) { return Complex(1.0); };
    } else if (inputs == "smooth") {
        f1 = [](const Vec2& x) { return Complex(1.0 + 4.0 * x[0] - 3.0 * x[1] * x[1]); };
        f2 = [](const Vec2& x) { return Complex(std::cos(9.0 * x[1]) + 0.5 * x[0]); };
    } else {
        throw SchemaError("convolve inputs must be 'constant' or 'smooth'");
    }
    auto on = [](const Rect& U, const Closure& f) {
        return sample(f, build_grid(BaseDomain{U.lo, U.side(), std::nullopt}, 0), QuadratureRule{8, 2});
    };
    const SampledFunction g1 = on(U1, f1), g2 = on(U2, f2);
    const double nu = num(c, "nu"), h = num(c, "spacing");
    ConvolveOptions co;
    co.fiber_nodes = integer(c, "fiber_nodes");
    const Box3 box = support_box(U1, U2);
    const auto xi = random_frequencies(integer(c, "oracle_points"), num(c, "oracle_radius"), seed(c, "seed"));
    std::vector<Vec3> neg;
    for (const auto& z : xi) neg.push_back({-z[0], -z[1], -z[2]});
    const Eigen::VectorXcd e1 = extension_values(g1, xi), e2 = extension_values(g2, neg);
    auto oracle = [&](const ConvolutionDensity& D) {
        double worst = 0.0;
        for (std::size_t k = 0; k < xi.size(); ++k) {
            const Complex want = e1(k) * e2(k);
            worst = std::max(worst, std::abs(D.fourier(xi[k]) - want) / std::abs(want));
        }
        return worst;
    };
    const ConvolutionDensity coarse = convolve_pushforwards(g1, U1, g2, U2, box, {2 * h, 2 * h, 2 * h}, nu, co);
    const ConvolutionDensity D = convolve_pushforwards(g1, U1, g2, U2, box, {h, h, h}, nu, co);
    const Complex want_mass = g1.integral() * g2.integral();
    const double mass_err = std::abs(D.mass() - want_mass) / std::abs(want_mass);
    const double err = oracle(D), err_coarse = oracle(coarse);
    auto& v = o.report.verdicts;
    v.push_back(at_most("mass_conservation", mass_err, num(c, "mass_tol")));
    v.push_back(at_most("fourier_oracle", err, num(c, "oracle_tol")));
    v.push_back(holds("oracle_refines", err < err_coarse,
                      "error at 2h " + std::to_string(err_coarse)));
    o.report.results = {{"density", density_header(D)},
                        {"mass", D.mass().real()},
                        {"expected_mass", want_mass.real()},
                        {"oracle_error", err},
                        {"oracle_error_coarse", err_coarse}};
    if (c.at("write_density").get<bool>()) {
        std::ostringstream os;
        write_density_csv(D, os);
        o.files["density.csv"] = os.str();
    }
    return o;
}

Outcome run_rescale_check(const json& c) {
    Outcome o;
    const BaseDomain d = domain_of(c);
    const std::string input = str(c, "input");
    Closure f;
    int level = 0;
    if (input == "constant") {
        f = [](const Vec2&) { return Complex(1.0); };
    } else if (input == "smooth") {
        f = [](const Vec2& x) { return Complex(std::cos(3 * x[0]) + 0.5 * x[1], x[0] * x[1]); };
        level = 2;
    } else {
        throw SchemaError("rescale-check input must be 'constant' or 'smooth'");
    }
    RescaleOptions ro;
    ro.points = integer(c, "points");
    ro.seed = seed(c, "seed");
    ro.rule = QuadratureRule{integer(c, "order"), 1};
    const SampledFunction g = sample(f, build_grid(d, level), ro.rule);
    const RescaleResult r = rescale_identity_check(g, vec2(c, "ybar"), num(c, "rho"), num(c, "q"), num(c, "radius"), ro);
    auto& v = o.report.verdicts;
    v.push_back(at_most("rescale_identity", r.discrepancy, num(c, "tol")));
    v.push_back(report_only("prefactor", r.prefactor, "rho^(2-4/q)"));
    o.report.results = {{"lhs", r.lhs}, {"rhs", r.rhs}, {"prefactor", r.prefactor},
                        {"discrepancy", r.discrepancy}, {"points", r.points}};
    return o;
}

Outcome run_bg_classify(const json& c) {
    Outcome o;
    const BaseDomain d = domain_of(c);
    BGParams p;
    p.alpha = num(c, "alpha");
    p.beta = num(c, "beta");
    p.gamma = num(c, "gamma");
    p.delta = num(c, "delta");
    p.lambda = integer(c, "lambda");
    p.lambda_prime = integer(c, "lambda_prime");
    p.validate();
    FamilySpec spec{parse_family(str(c, "family")), integer(c, "family_level"), 1};
    const SampledFunction f = family_members(spec, d, seed(c, "seed")).front().f;
    const double sup = lp_norm(f, kInfinity);
    const BallLattice lat = ball_lattice(p.lambda, num(c, "radius"));
    WeightOptions wo;
    wo.samples = integer(c, "samples");
    wo.seed = seed(c, "seed");
    wo.max_evaluations = num(c, "max_evaluations");
    const int n = std::min<int>(integer(c, "max_centers"), static_cast<int>(lat.centers.size()));
    std::map<std::string, int> counts{{"Case1", 0}, {"Case2", 0}, {"Case3", 0}};
    bool witnesses = true;
    double cap = 0.0;
    json labels = json::array();
    for (int k = 0; k < n; ++k) {
        const Vec3& a = lat.centers[k];
        const WeightField wf = weight_field(f, p.lambda, a, wo);
        const CaseLabel lab = classify_center(wf, p);
        ++counts[to_string(lab.kind)];
        if (lab.kind == BGCase::Case1) witnesses = witnesses && verify_case1(wf, p, lab);
        cap = std::max(cap, wf.cap_constant(sup));
        labels.push_back({{"center", a}, {"case", to_string(lab.kind)}, {"star", lab.star}, {"max_weight", wf.max_weight}});
    }
    auto& v = o.report.verdicts;
    v.push_back(holds("case1_witnesses", witnesses));
    for (const auto& [name, k] : counts) v.push_back(report_only(name + "_count", k));
    v.push_back(report_only("weight_cap_constant", cap, "max w / (2^{-2 lambda} ||f||_inf)"));
    o.report.results = {{"nu", p.nu()}, {"far_radius", p.far_radius()}, {"centers", labels}};
    return o;
}

Outcome run_sqfn(const json& c) {
    Outcome o;
    BaseDomain d = domain_of(c);
    const auto gc = ints(c, "grandchild");
    if (gc.size() != 2) throw SchemaError("grandchild must have two entries");
    d.interior_grandchild_offset = std::array<int, 2>{gc[0], gc[1]};
    d.validate();
    FrameOptions fo;
    fo.eta_max = std::max(fo.eta_max, num(c, "eta"));
    const FrameOperator frame = build_frame_operator(d, 0, integer(c, "kappa"), num(c, "eta"), FrameMode::Plain, fo);
    const SampledFunction f = random_sign_function(d, integer(c, "f_level"), seed(c, "seed"));
    const auto squares = descendants(root_square(d), integer(c, "level"));
    const FrequencySet xi = FrequencySet::ball(num(c, "radius"), integer(c, "points"), seed(c, "seed"));
    const SquareFunctionField S = square_function(f, squares, frame, xi.points);
    const Eigen::VectorXd kh = khintchine_average(S.terms, integer(c, "draws"), seed(c, "seed"));
    double dominated = 0.0, ratio = 0.0;
    int used = 0;
    for (Eigen::Index k = 0; k < S.values.size(); ++k) {
        dominated = std::max(dominated, S.terms.row(k).cwiseAbs().maxCoeff() - S.values(k));
        if (S.values(k) > 0.0) {
            ratio += kh(k) / S.values(k);
            ++used;
        }
    }
    ratio = used ? ratio / used : 0.0;
    auto& v = o.report.verdicts;
    v.push_back(at_most("single_term_domination", dominated, num(c, "domination_tol") * std::max(1.0, S.values.maxCoeff())));
    v.push_back(at_least("khintchine_low", ratio, num(c, "khintchine_low"), "mean E|sum +-| / S"));
    v.push_back(at_most("khintchine_high", ratio, num(c, "khintchine_high"), "mean E|sum +-| / S"));
    o.report.results = {{"squares", squares.size()}, {"points", xi.size()}, {"khintchine_ratio", ratio},
                        {"square_function_l4", weighted_lq_norm(S.values.cast<Complex>(), xi.weights, 4.0)}};
    return o;
}

Outcome run_eps_mc(const json& c) {
    Outcome o;
    const BaseDomain d = domain_of(c);
    FrameOptions fo;
    fo.eta_max = std::max(fo.eta_max, num(c, "eta"));
    const FrameOperator frame = build_frame_operator(d, 0, integer(c, "kappa"), num(c, "eta"), FrameMode::Plain, fo);
    MartingaleOptions mo;
    mo.draws = integer(c, "draws");
    mo.points = integer(c, "points");
    mo.seed = seed(c, "seed");
    std::vector<double> xs, ys;
    json runs = json::array();
    double se_ratio = 0.0;
    for (int s : ints(c, "scales")) {
        const SampledFunction f = random_sign_function(d, s + 1, seed(c, "f_seed") + s);
        const RatioReport rep = martingale_mc(f, root_square(d), s, num(c, "q"), frame, mo);
        xs.push_back(s);
        ys.push_back(std::log2(rep.ratio));
        se_ratio = std::max(se_ratio, rep.params.at("stderr").get<double>() / rep.params.at("stderr_half_draws").get<double>());
        runs.push_back(rep.to_json());
    }
    if (xs.size() < 2) throw InvalidInput("eps-mc: at least two scales are needed");
    const double eps = -fit_slope(xs, ys);
    auto& v = o.report.verdicts;
    v.push_back({"eps_positive", eps > 0.0 ? Status::Pass : Status::Fail, eps, 0.0, "fitted eps_q must exceed 0"});
    v.push_back(report_only("eps_hat", eps));
    v.push_back(report_only("stderr_ratio_doubling", se_ratio, "stderr(draws) / stderr(draws/2), max over s"));
    o.report.results = {{"eps_hat", eps}, {"runs", runs}};
    return o;
}

using Runner = Outcome (*)(const json&);

const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> r = {
        {"grid", run_grid},
        {"alpert-check", run_alpert_check},
        {"extend", run_extend},
        {"qr-scan", run_qr_scan},
        {"trilinear-scan", run_trilinear_scan},
        {"annular-scan", run_annular_scan},
        {"convolve", run_convolve},
        {"rescale-check", run_rescale_check},
        {"bg-classify", run_bg_classify},
        {"sqfn", run_sqfn},
        {"eps-mc", run_eps_mc},
    };
    return r;
}

}  // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [k, _] : schemas()) n.push_back(k);
        return n;
    }();
    return names;
}

json default_config(const std::string& subcommand) {
    const auto it = schemas().find(subcommand);
    if (it == schemas().end()) throw SchemaError("unknown subcommand '" + subcommand + "'");
    return it->second;
}

json resolve_config(const std::string& subcommand, const std::optional<std::filesystem::path>& config_path,
                    const std::vector<std::string>& overrides) {
    json cfg = default_config(subcommand);
    if (config_path) {
        std::ifstream is(*config_path);
        if (!is) throw SchemaError("cannot read config " + config_path->string());
        json file;
        try {
            file = json::parse(is);
        } catch (const json::parse_error& e) {
            throw SchemaError("malformed config " + config_path->string() + ": " + e.what());
        }
        merge(cfg, file, subcommand);
    }
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw SchemaError("override '" + kv + "' is not key=value");
        const std::string key = kv.substr(0, eq), text = kv.substr(eq + 1);
        json value = json::parse(text, nullptr, false);
        if (value.is_discarded()) value = text;
        merge(cfg, json{{key, value}}, subcommand);
    }
    return cfg;
}

Outcome execute(const std::string& subcommand, const json& config) {
    const auto it = runners().find(subcommand);
    if (it == runners().end()) throw SchemaError("unknown subcommand '" + subcommand + "'");
    Outcome o = it->second(config);
    o.report.subcommand = subcommand;
    o.report.config = config;
    o.report.hash = config_hash(json{{"subcommand", subcommand}, {"config", config}});
    return o;
}

int run(const Request& request, std::ostream& out, std::ostream& err) {
    try {
        const json cfg = resolve_config(request.subcommand, request.config_path, request.overrides);
        const Outcome o = execute(request.subcommand, cfg);
        std::filesystem::create_directories(request.out_dir);
        for (const auto& [name, text] : o.files) {
            std::ofstream os(request.out_dir / name);
            os << text;
        }
        write_report_json(request.out_dir / "report.json", o.report, request.timestamp.value_or(utc_timestamp()));
        append_ledger(request.out_dir / "ledger.csv", o.report);
        for (const auto& v : o.report.verdicts) out << v.line() << '\n';
        return o.report.failed() ? kExitFail : kExitOk;
    } catch (const SchemaError& e) {
        err << "schema error: " << e.what() << '\n';
        return kExitSchema;
    } catch (const CapacityError& e) {
        err << "capacity error: " << e.what() << '\n';
        return kExitCapacity;
    } catch (const InvalidInput& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitInvalidInput;
    } catch (const ConstructionError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const json::exception& e) {
        err << "schema error: " << e.what() << '\n';
        return kExitSchema;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidInput;
    }
}

}  // namespace parex::cli
