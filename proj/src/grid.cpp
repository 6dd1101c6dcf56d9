#include "parex/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace parex {

void BaseDomain::validate() const {
    if (!(side > 0.0) || !std::isfinite(side)) throw InvalidInput("BaseDomain: side must be positive");
    if (!std::isfinite(origin[0]) || !std::isfinite(origin[1])) throw InvalidInput("BaseDomain: origin not finite");
    if (interior_grandchild_offset) {
        for (int k : *interior_grandchild_offset)
            if (k < 1 || k > 2) throw InvalidInput("BaseDomain: grandchild offset must lie in {1,2}");
    }
}

bool BaseDomain::is_dyadic() const {
    if (side > 1.0) return false;
    int e = 0;
    const double m = std::frexp(side, &e);
    return m == 0.5;
}

double BaseDomain::radius() const {
    const double x = std::max(std::abs(origin[0]), std::abs(origin[0] + side));
    const double y = std::max(std::abs(origin[1]), std::abs(origin[1] + side));
    return std::hypot(x, y);
}

bool DyadicSquare::contains(const Vec2& p) const {
    const Vec2 lo = lower(), hi = upper();
    return p[0] >= lo[0] && p[0] < hi[0] && p[1] >= lo[1] && p[1] < hi[1];
}

bool DyadicSquare::touches(const DyadicSquare& o) const {
    if (level != o.level) throw InvalidInput("touches: squares at different levels");
    return std::abs(i - o.i) <= 1 && std::abs(j - o.j) <= 1;
}

bool DyadicSquare::is_ancestor_or_self_of(const DyadicSquare& o) const {
    if (!same_frame(o) || o.level < level) return false;
    const int d = o.level - level;
    return (o.i >> d) == i && (o.j >> d) == j;
}

std::array<DyadicSquare, 4> DyadicSquare::children() const {
    std::array<DyadicSquare, 4> out;
    for (int c = 0; c < 4; ++c) {
        out[c] = *this;
        out[c].level = level + 1;
        out[c].i = 2 * i + (c & 1);
        out[c].j = 2 * j + (c >> 1);
    }
    return out;
}

DyadicSquare DyadicSquare::parent() const {
    if (level == 0) throw InvalidInput("parent: level-0 square has no parent");
    DyadicSquare p = *this;
    p.level = level - 1;
    p.i = i >> 1;
    p.j = j >> 1;
    return p;
}

DyadicSquare root_square(const BaseDomain& domain) {
    return DyadicSquare{0, 0, 0, domain.origin, domain.side};
}

DyadicSquare interior_grandchild(const BaseDomain& domain) {
    if (!domain.interior_grandchild_offset) throw InvalidInput("domain has no interior grandchild offset");
    const auto& off = *domain.interior_grandchild_offset;
    return DyadicSquare{2, off[0], off[1], domain.origin, domain.side};
}

std::vector<DyadicSquare> descendants(const DyadicSquare& parent, int level) {
    if (level < parent.level) throw InvalidInput("descendants: level above parent");
    const int d = level - parent.level;
    const int n = 1 << d;
    std::vector<DyadicSquare> out;
    out.reserve(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            out.push_back(DyadicSquare{level, parent.i * n + i, parent.j * n + j, parent.origin, parent.root_side});
    return out;
}

Grid build_grid(const BaseDomain& domain, int level, int max_level) {
    domain.validate();
    if (level < 0) throw InvalidInput("build_grid: negative level");
    if (level > max_level)
        throw CapacityError("build_grid: level " + std::to_string(level) + " exceeds maximum " +
                            std::to_string(max_level));
    return Grid{domain, level, descendants(root_square(domain), level)};
}

const char* to_string(TripleClass c) {
    switch (c) {
        case TripleClass::Gamma1: return "Gamma1";
        case TripleClass::Gamma2: return "Gamma2";
        case TripleClass::Gamma3: return "Gamma3";
    }
    return "?";
}

TripleClass classify_triple(const Triple& t) {
    for (int k = 1; k < 3; ++k) {
        if (t[k].level != t[0].level) throw InvalidInput("classify_triple: mixed levels");
        if (!t[k].same_frame(t[0])) throw InvalidInput("classify_triple: squares from different domains");
    }
    const int touching = int(t[0].touches(t[1])) + int(t[0].touches(t[2])) + int(t[1].touches(t[2]));
    if (touching == 0) return TripleClass::Gamma1;
    if (touching == 1) return TripleClass::Gamma2;
    return TripleClass::Gamma3;
}

std::vector<Vec3> phi_boundary_samples(const DyadicSquare& s, int per_side) {
    const Vec2 lo = s.lower();
    const double l = s.side();
    std::vector<Vec3> out;
    out.reserve(4 * per_side);
    for (int k = 0; k < per_side; ++k) {
        const double t = l * k / per_side;
        out.push_back(phi({lo[0] + t, lo[1]}));
        out.push_back(phi({lo[0] + l, lo[1] + t}));
        out.push_back(phi({lo[0] + l - t, lo[1] + l}));
        out.push_back(phi({lo[0], lo[1] + l - t}));
    }
    return out;
}

namespace {

constexpr int kSamplesPerSide = 16;

double diameter(const std::vector<Vec3>& pts) {
    double d = 0.0;
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b) d = std::max(d, norm(pts[a] - pts[b]));
    return d;
}

double distance(const std::vector<Vec3>& p, const std::vector<Vec3>& q) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& a : p)
        for (const auto& b : q) d = std::min(d, norm(a - b));
    return d;
}

bool diameter_matches(double diam, double nu) { return diam >= 0.5 * nu && diam <= 2.0 * nu; }

}  // namespace

std::vector<Triple> nu_disjoint_triples(const std::vector<DyadicSquare>& g1, const std::vector<DyadicSquare>& g2,
                                        const std::vector<DyadicSquare>& g3, double nu) {
    if (!(nu > 0.0)) throw InvalidInput("nu_disjoint_triples: nu must be positive");
    struct Patch {
        const DyadicSquare* square;
        std::vector<Vec3> samples;
    };
    auto admissible = [&](const std::vector<DyadicSquare>& g) {
        std::vector<Patch> out;
        for (const auto& s : g) {
            auto pts = phi_boundary_samples(s, kSamplesPerSide);
            if (diameter_matches(diameter(pts), nu)) out.push_back({&s, std::move(pts)});
        }
        return out;
    };
    const auto p1 = admissible(g1), p2 = admissible(g2), p3 = admissible(g3);
    std::vector<Triple> out;
    for (const auto& a : p1)
        for (const auto& b : p2) {
            if (distance(a.samples, b.samples) < nu) continue;
            for (const auto& c : p3) {
                if (distance(a.samples, c.samples) < nu || distance(b.samples, c.samples) < nu) continue;
                out.push_back({*a.square, *b.square, *c.square});
            }
        }
    return out;
}

bool is_nu_disjoint(const Triple& t, double nu) {
    auto point = [](const DyadicSquare& s, int k) {
        const int side = k / kSamplesPerSide;
        const double frac = double(k % kSamplesPerSide) / kSamplesPerSide;
        const Vec2 lo = s.lower();
        const double l = s.side();
        Vec2 x;
        switch (side) {
            case 0: x = {lo[0] + frac * l, lo[1]}; break;
            case 1: x = {lo[0] + l, lo[1] + frac * l}; break;
            case 2: x = {lo[0] + (1 - frac) * l, lo[1] + l}; break;
            default: x = {lo[0], lo[1] + (1 - frac) * l}; break;
        }
        return phi(x);
    };
    const int n = 4 * kSamplesPerSide;
    for (const auto& s : t) {
        double d = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) d = std::max(d, norm(point(s, a) - point(s, b)));
        if (!diameter_matches(d, nu)) return false;
    }
    for (int u = 0; u < 3; ++u)
        for (int v = u + 1; v < 3; ++v)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    if (norm(point(t[u], a) - point(t[v], b)) < nu) return false;
    return true;
}

std::vector<Triple> dedup_unordered(const std::vector<Triple>& triples) {
    std::set<Triple> seen;
    std::vector<Triple> out;
    for (auto t : triples) {
        std::sort(t.begin(), t.end());
        if (seen.insert(t).second) out.push_back(t);
    }
    return out;
}

BallLattice ball_lattice(int lambda, double radius) {
    if (!(radius >= 0.0)) throw InvalidInput("ball_lattice: radius must be nonnegative");
    BallLattice out;
    out.lambda = lambda;
    out.spacing = std::ldexp(1.0, lambda);
    out.radius = radius;
    out.warning = out.spacing > radius;
    const int n = static_cast<int>(std::floor(radius / out.spacing));
    const double tol = 1e-12 * std::max(1.0, radius);
    for (int a = -n; a <= n; ++a)
        for (int b = -n; b <= n; ++b)
            for (int c = -n; c <= n; ++c) {
                const Vec3 p{a * out.spacing, b * out.spacing, c * out.spacing};
                if (norm(p) <= radius + tol) out.centers.push_back(p);
            }
    return out;
}

nlohmann::json to_json(const DyadicSquare& s) {
    const Vec2 c = s.center();
    return {{"level", s.level}, {"index", {s.i, s.j}}, {"center", {c[0], c[1]}}, {"side", s.side()}};
}

nlohmann::json to_json(const Grid& g) {
    nlohmann::json squares = nlohmann::json::array();
    for (const auto& s : g.squares) squares.push_back(to_json(s));
    return {{"domain", {{"origin", {g.domain.origin[0], g.domain.origin[1]}}, {"side", g.domain.side}}},
            {"level", g.level},
            {"squares", std::move(squares)}};
}

nlohmann::json to_json(const std::vector<Triple>& triples) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& t : triples) out.push_back({to_json(t[0]), to_json(t[1]), to_json(t[2])});
    return out;
}

}  // namespace parex
