#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace uipdg {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    Vec2 normalized() const {
        const double n = norm();
        return {x / n, y / n};
    }
    // rotate by -90 degrees (tangent -> outward normal for ccw curves)
    Vec2 rot_cw() const { return {y, -x}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
    Vec2 center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
    bool contains(const Vec2& p, double tol = 0.0) const {
        return p.x >= x0 - tol && p.x <= x1 + tol && p.y >= y0 - tol && p.y <= y1 + tol;
    }
};

// ---- error types -----------------------------------------------------------

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : Error {
    using Error::Error;
};
struct NonConvergence : Error {
    using Error::Error;
};
struct NonSquareDomain : Error {
    using Error::Error;
};
struct AssumptionIViolated : Error {
    int element;
    AssumptionIViolated(int elem, const std::string& msg) : Error(msg), element(elem) {}
};
struct NoLargeNeighbor : Error {
    int element;
    NoLargeNeighbor(int elem, const std::string& msg) : Error(msg), element(elem) {}
};
struct CardinalityViolation : Error {
    using Error::Error;
};
struct OverlapDetected : Error {
    using Error::Error;
};
struct UnsupportedDegree : Error {
    using Error::Error;
};
struct DegenerateRegion : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct MissingQuadrature : Error {
    using Error::Error;
};
struct InconsistentOrientation : Error {
    using Error::Error;
};
struct UnknownExample : Error {
    using Error::Error;
};
struct NotConverged : Error {
    int iterations;
    double residual;
    NotConverged(int it, double res, const std::string& msg)
        : Error(msg), iterations(it), residual(res) {}
};
struct IndefiniteDetected : Error {
    using Error::Error;
};
struct OutOfDomain : Error {
    using Error::Error;
};

// 17 significant digits, enough to round-trip a double through text.
inline std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

constexpr double pi() { return 3.14159265358979323846; }

}  // namespace uipdg
