#pragma once

#include <array>
#include <optional>
#include <vector>

#include "json.hpp"

#include "parex/types.hpp"

namespace parex {

/// Square base domain U = origin + [0, side)^2.
struct BaseDomain {
    Vec2 origin{0.0, 0.0};
    double side = 1.0;
    /// Index (i, j) of the grandchild U0 inside U, each in {1, 2} for U0 ⊂ U/2.
    std::optional<std::array<int, 2>> interior_grandchild_offset;

    static BaseDomain unit() { return {}; }
    static BaseDomain centered(double side) { return {{-side / 2, -side / 2}, side, std::nullopt}; }

    void validate() const;
    bool is_dyadic() const;
    /// Largest |x| over the closed domain.
    double radius() const;
    bool within_standing_ball() const { return radius() < 0.5; }
};

struct DyadicSquare {
    int level = 0;
    int i = 0;
    int j = 0;
    Vec2 origin{0.0, 0.0};
    double root_side = 1.0;

    double side() const { return root_side / static_cast<double>(1LL << level); }
    Vec2 lower() const { return {origin[0] + i * side(), origin[1] + j * side()}; }
    Vec2 upper() const { return {origin[0] + (i + 1) * side(), origin[1] + (j + 1) * side()}; }
    Vec2 center() const { return {origin[0] + (i + 0.5) * side(), origin[1] + (j + 0.5) * side()}; }

    /// Half-open membership [lower, upper).
    bool contains(const Vec2& p) const;
    bool same_frame(const DyadicSquare& o) const { return origin == o.origin && root_side == o.root_side; }
    /// Closures intersect (shared edge or corner counts). Same level and frame required.
    bool touches(const DyadicSquare& o) const;
    bool is_ancestor_or_self_of(const DyadicSquare& o) const;

    std::array<DyadicSquare, 4> children() const;
    DyadicSquare parent() const;

    friend bool operator==(const DyadicSquare&, const DyadicSquare&) = default;
    friend auto operator<=>(const DyadicSquare& a, const DyadicSquare& b) {
        return std::array{a.level, a.i, a.j} <=> std::array{b.level, b.i, b.j};
    }
};

/// Root square of a domain as a level-0 dyadic square.
DyadicSquare root_square(const BaseDomain& domain);
/// U0 of the domain's interior grandchild relation.
DyadicSquare interior_grandchild(const BaseDomain& domain);

struct Grid {
    BaseDomain domain;
    int level = 0;
    std::vector<DyadicSquare> squares;  // row-major: j outer, i inner
};

inline constexpr int kDefaultMaxLevel = 8;

Grid build_grid(const BaseDomain& domain, int level, int max_level = kDefaultMaxLevel);

/// All level-`level` dyadic squares inside `parent`, row-major.
std::vector<DyadicSquare> descendants(const DyadicSquare& parent, int level);

enum class TripleClass { Gamma1, Gamma2, Gamma3 };
const char* to_string(TripleClass c);

TripleClass classify_triple(const std::array<DyadicSquare, 3>& t);

using Triple = std::array<DyadicSquare, 3>;

/// Samples of Φ on the boundary of a square, `per_side` points per side.
std::vector<Vec3> phi_boundary_samples(const DyadicSquare& s, int per_side = 16);


/// Ordered triples from g1 x g2 x g3 whose Φ images have diameter in [ν/2, 2ν]
/// and pairwise distance >= ν. Boundary sampling, 16 points per side.
std::vector<Triple> nu_disjoint_triples(const std::vector<DyadicSquare>& g1,
                                        const std::vector<DyadicSquare>& g2,
                                        const std::vector<DyadicSquare>& g3, double nu);

/// Independent re-check of the ν-disjoint condition for one triple.
bool is_nu_disjoint(const Triple& t, double nu);

/// One representative per unordered triple (lexicographically sorted members).
std::vector<Triple> dedup_unordered(const std::vector<Triple>& triples);

struct BallLattice {
    int lambda = 0;
    double spacing = 1.0;
    double radius = 0.0;
    std::vector<Vec3> centers;
    bool warning = false;  // spacing exceeds the radius
};

BallLattice ball_lattice(int lambda, double radius);

nlohmann::json to_json(const DyadicSquare& s);
nlohmann::json to_json(const Grid& g);
nlohmann::json to_json(const std::vector<Triple>& triples);

}  // namespace parex
