// Test-only independent oracles: adaptive quadrature, Monte-Carlo areas,
// finite-difference curvature. Deliberately separate from the library's own
// integration paths.
#pragma once

#include <functional>
#include <random>

#include "uipdg/geometry.hpp"

namespace uipdg::oracle {

// adaptive Simpson on [a,b]
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int depth = 0) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double s = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double sl = (m - a) / 6.0 * (fa + 4.0 * f(lm) + fm);
    const double sr = (b - m) / 6.0 * (fm + 4.0 * f(rm) + fb);
    if (depth > 40) return sl + sr;
    if (std::abs(sl + sr - s) < 15.0 * tol) return sl + sr + (sl + sr - s) / 15.0;
    return adaptive_simpson(f, a, m, 0.5 * tol, depth + 1) +
           adaptive_simpson(f, m, b, 0.5 * tol, depth + 1);
}

inline double arc_length_adaptive(const InterfaceCurve& c, double lo, double hi,
                                  double tol = 1e-12) {
    return adaptive_simpson([&](double th) { return c.speed(th); }, lo, hi, tol);
}

struct McArea {
    double area = 0.0;
    double sigma = 0.0;   // standard error of the area estimate
    double mean_x = 0.0;  // centroid-ish moment \int x / area (for moment checks)
};

// Monte-Carlo classification of |rect ∩ Omega_region|, seeded and reproducible.
inline McArea mc_cut_area(const InterfaceCurve& c, const Rect& r, int region, int samples,
                          unsigned long seed = 20240817ULL) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(r.x0, r.x1), uy(r.y0, r.y1);
    long hits = 0;
    double sx = 0.0;
    for (int k = 0; k < samples; ++k) {
        const Vec2 p{ux(rng), uy(rng)};
        const RegionId id = c.classify(p);
        const bool in = region == 0 ? id == RegionId::Omega1 : id != RegionId::Omega1;
        if (in) {
            ++hits;
            sx += p.x;
        }
    }
    McArea out;
    const double frac = double(hits) / samples;
    out.area = frac * r.area();
    out.sigma = r.area() * std::sqrt(std::max(frac * (1.0 - frac), 1e-12) / samples);
    out.mean_x = hits > 0 ? sx / hits : 0.0;
    return out;
}

// signed Menger curvature through three nearby curve points
inline double fd_curvature(const InterfaceCurve& c, double theta, double dtheta = 3e-4) {
    const Vec2 a = c.position(theta - dtheta), b = c.position(theta), d = c.position(theta + dtheta);
    const Vec2 ab = b - a, bd = d - b, ad = d - a;
    const double cross = ab.cross(bd);
    return 2.0 * cross / (ab.norm() * bd.norm() * ad.norm());
}

// brute-force curvature maximum
inline double brute_force_kappa_max(const InterfaceCurve& c, int samples) {
    double best = 0.0;
    for (int k = 0; k < samples; ++k)
        best = std::max(best, std::abs(c.curvature(2.0 * pi() * k / samples)));
    return best;
}

}  // namespace uipdg::oracle
