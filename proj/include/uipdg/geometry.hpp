#pragma once

#include <optional>
#include <vector>

#include "uipdg/common.hpp"

namespace uipdg {

enum class RegionId { Omega1, Omega2, OnGamma };

/// One sinusoidal term of a polar radius profile: amp * sin(freq*theta + phase).
struct RadialTerm {
    double amp = 0.0;
    double freq = 0.0;
    double phase = 0.0;
};

/// Intersection of the interface with a straight segment.
struct EdgeIntersection {
    double t = 0.0;      // parameter along the segment, in [0,1]
    double theta = 0.0;  // curve parameter of the intersection point
    Vec2 point;
    bool tangency = false;  // true: touch without sign change
};

struct CurvatureBound {
    double kappa_max = 0.0;
    double theta_argmax = 0.0;
    int samples = 0;
};

struct ArcPoint {
    Vec2 x;
    double w = 0.0;  // arc-length weight
    Vec2 normal;     // unit, pointing out of Omega1
    double theta = 0.0;
};

/// Closed star-shaped interface curve given in polar form about a center:
/// either R(theta) = r0 + sum_k amp_k * sin(freq_k*theta + phase_k), or the
/// polar trace of an axis-aligned ellipse. Immutable after construction; all
/// queries are pure.
class InterfaceCurve {
  public:
    static InterfaceCurve polar(Vec2 center, double r0, std::vector<RadialTerm> terms,
                                double eps_geo);
    static InterfaceCurve ellipse(Vec2 center, double semi_x, double semi_y, double eps_geo);

    const Vec2& center() const { return center_; }
    double eps_geo() const { return eps_geo_; }

    double radius(double theta) const;
    double radius_d1(double theta) const;
    double radius_d2(double theta) const;

    Vec2 position(double theta) const;
    Vec2 velocity(double theta) const;  // d position / d theta
    double speed(double theta) const { return velocity(theta).norm(); }
    Vec2 unit_normal(double theta) const;  // out of Omega1

    /// Signed distance-like level function: |p - center| - R(theta(p)).
    /// Negative inside Omega1, positive in Omega2.
    double level(const Vec2& p) const;
    double theta_of(const Vec2& p) const;  // in [0, 2*pi)

    RegionId classify(const Vec2& p) const;

    /// Signed curvature; positive where the curve bends like a ccw circle.
    double curvature(double theta) const;
    CurvatureBound max_curvature() const;

    /// All interface points on segment [a,b], sorted by segment parameter.
    /// Sign changes of the level function are bracketed on a 64-interval
    /// sampling and bisected to eps_geo; touches without sign change are
    /// reported as tangencies.
    std::vector<EdgeIntersection> edge_intersections(const Vec2& a, const Vec2& b) const;

    /// Gauss quadrature of the arc theta in [lo,hi] (hi may exceed 2*pi for
    /// intervals wrapping around). Weights sum to the arc length.
    std::vector<ArcPoint> arc_quadrature(double theta_lo, double theta_hi, int order) const;

    double arc_length(double theta_lo, double theta_hi, int order = 12) const;

    /// Bounding radius interval [min R, max R] from construction-time sampling.
    double radius_min() const { return r_min_; }
    double radius_max() const { return r_max_; }

  private:
    InterfaceCurve() = default;
    void finish_construction();

    enum class Kind { Fourier, Ellipse } kind_ = Kind::Fourier;
    Vec2 center_;
    double r0_ = 0.0;
    std::vector<RadialTerm> terms_;
    double ea_ = 0.0, eb_ = 0.0;  // ellipse semi-axes
    double eps_geo_ = 1e-12;
    double r_min_ = 0.0, r_max_ = 0.0;
};

}  // namespace uipdg
