#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace parex {

using Complex = std::complex<double>;
using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

inline constexpr double kPi = 3.14159265358979323846;

// Error classes. The CLI maps each class to its own exit code.
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a numerical construction (basis, mollifier, frame) cannot be completed.
struct ConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IllConditioned : ConstructionError {
    using ConstructionError::ConstructionError;
};

struct DegenerateFiber : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct PreconditionError : InvalidInput {
    using InvalidInput::InvalidInput;
};

inline double norm(const Vec2& v) { return std::hypot(v[0], v[1]); }
inline double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }

/// The paraboloid parameterization x -> (x1, x2, |x|^2).
inline Vec3 phi(const Vec2& x) { return {x[0], x[1], x[0] * x[0] + x[1] * x[1]}; }

}  // namespace parex
