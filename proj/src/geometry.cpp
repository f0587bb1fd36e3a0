#include "uipdg/geometry.hpp"

#include <algorithm>
#include <cassert>

#include "uipdg/quadrature.hpp"

namespace uipdg {

InterfaceCurve InterfaceCurve::polar(Vec2 center, double r0, std::vector<RadialTerm> terms,
                                     double eps_geo) {
    InterfaceCurve c;
    c.kind_ = Kind::Fourier;
    c.center_ = center;
    c.r0_ = r0;
    c.terms_ = std::move(terms);
    c.eps_geo_ = eps_geo;
    c.finish_construction();
    return c;
}

InterfaceCurve InterfaceCurve::ellipse(Vec2 center, double semi_x, double semi_y,
                                       double eps_geo) {
    InterfaceCurve c;
    c.kind_ = Kind::Ellipse;
    c.center_ = center;
    c.ea_ = semi_x;
    c.eb_ = semi_y;
    c.eps_geo_ = eps_geo;
    c.finish_construction();
    return c;
}

void InterfaceCurve::finish_construction() {
    // Star-shaped polar curves are closed and simple as long as R > 0; verify
    // positivity by dense sampling.
    const int ns = 1 << 14;
    r_min_ = radius(0.0);
    r_max_ = r_min_;
    for (int k = 1; k < ns; ++k) {
        const double r = radius(2.0 * pi() * k / ns);
        r_min_ = std::min(r_min_, r);
        r_max_ = std::max(r_max_, r);
    }
    if (!(r_min_ > 0.0))
        throw ConfigError("interface curve radius must stay positive (min sampled R = " +
                          format_full(r_min_) + ")");
}

double InterfaceCurve::radius(double th) const {
    if (kind_ == Kind::Fourier) {
        double r = r0_;
        for (const auto& t : terms_) r += t.amp * std::sin(t.freq * th + t.phase);
        return r;
    }
    const double c = std::cos(th), s = std::sin(th);
    return ea_ * eb_ / std::sqrt(eb_ * eb_ * c * c + ea_ * ea_ * s * s);
}

double InterfaceCurve::radius_d1(double th) const {
    if (kind_ == Kind::Fourier) {
        double r = 0.0;
        for (const auto& t : terms_) r += t.amp * t.freq * std::cos(t.freq * th + t.phase);
        return r;
    }
    const double c = std::cos(th), s = std::sin(th);
    const double S = eb_ * eb_ * c * c + ea_ * ea_ * s * s;
    const double S1 = (ea_ * ea_ - eb_ * eb_) * std::sin(2.0 * th);
    return -0.5 * ea_ * eb_ * S1 / (S * std::sqrt(S));
}

double InterfaceCurve::radius_d2(double th) const {
    if (kind_ == Kind::Fourier) {
        double r = 0.0;
        for (const auto& t : terms_)
            r -= t.amp * t.freq * t.freq * std::sin(t.freq * th + t.phase);
        return r;
    }
    const double c = std::cos(th), s = std::sin(th);
    const double S = eb_ * eb_ * c * c + ea_ * ea_ * s * s;
    const double S1 = (ea_ * ea_ - eb_ * eb_) * std::sin(2.0 * th);
    const double S2 = 2.0 * (ea_ * ea_ - eb_ * eb_) * std::cos(2.0 * th);
    const double Sp = std::sqrt(S);
    return ea_ * eb_ * (0.75 * S1 * S1 / (S * S * Sp) - 0.5 * S2 / (S * Sp));
}

Vec2 InterfaceCurve::position(double th) const {
    const double r = radius(th);
    return {center_.x + r * std::cos(th), center_.y + r * std::sin(th)};
}

Vec2 InterfaceCurve::velocity(double th) const {
    const double r = radius(th), r1 = radius_d1(th);
    const double c = std::cos(th), s = std::sin(th);
    return {r1 * c - r * s, r1 * s + r * c};
}

Vec2 InterfaceCurve::unit_normal(double th) const {
    // ccw parametrization encloses Omega1 on the left, so the outward normal
    // is the tangent rotated clockwise.
    return velocity(th).rot_cw().normalized();
}

double InterfaceCurve::theta_of(const Vec2& p) const {
    double th = std::atan2(p.y - center_.y, p.x - center_.x);
    if (th < 0.0) th += 2.0 * pi();
    return th;
}

double InterfaceCurve::level(const Vec2& p) const {
    return (p - center_).norm() - radius(theta_of(p));
}

RegionId InterfaceCurve::classify(const Vec2& p) const {
    const double v = level(p);
    if (v < -eps_geo_) return RegionId::Omega1;
    if (v > eps_geo_) return RegionId::Omega2;
    return RegionId::OnGamma;
}

double InterfaceCurve::curvature(double th) const {
    const double r = radius(th), r1 = radius_d1(th), r2 = radius_d2(th);
    const double d = r * r + r1 * r1;
    return (r * r + 2.0 * r1 * r1 - r * r2) / (d * std::sqrt(d));
}

CurvatureBound InterfaceCurve::max_curvature() const {
    const int ns = 1 << 13;  // 8192 samples
    double best = 0.0, best_th = 0.0;
    std::vector<double> kap(ns);
    for (int k = 0; k < ns; ++k) kap[k] = std::abs(curvature(2.0 * pi() * k / ns));
    // golden-section refinement around every local maximum of |kappa|
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int k = 0; k < ns; ++k) {
        const double prev = kap[(k + ns - 1) % ns], next = kap[(k + 1) % ns];
        if (kap[k] < prev || kap[k] < next) continue;
        double a = 2.0 * pi() * (k - 1) / ns, b = 2.0 * pi() * (k + 1) / ns;
        double c = b - gr * (b - a), d = a + gr * (b - a);
        double fc = std::abs(curvature(c)), fd = std::abs(curvature(d));
        for (int it = 0; it < 80; ++it) {
            if (fc > fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = std::abs(curvature(c));
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = std::abs(curvature(d));
            }
        }
        const double th = 0.5 * (a + b);
        const double f = std::abs(curvature(th));
        if (f > best) {
            best = f;
            best_th = th;
        }
    }
    return {best, best_th, ns};
}

std::vector<EdgeIntersection> InterfaceCurve::edge_intersections(const Vec2& a,
                                                                 const Vec2& b) const {
    const Vec2 d = b - a;
    const double len = d.norm();
    if (!(len > 0.0)) throw ConfigError("edge_intersections: zero-length segment");

    auto phi = [&](double t) { return level(a + t * d); };

    auto bisect = [&](double lo, double hi, double flo, double fhi) {
        int it = 0;
        while ((hi - lo) * len > eps_geo_) {
            if (++it > 200)
                throw NonConvergence("edge_intersections: bisection stalled (degenerate geometry)");
            const double mid = 0.5 * (lo + hi);
            const double fm = phi(mid);
            if (fm == 0.0) return mid;
            if (flo * fm < 0.0) {
                hi = mid;
                fhi = fm;
            } else {
                lo = mid;
                flo = fm;
            }
        }
        (void)fhi;
        return 0.5 * (lo + hi);
    };

    const int ns = 64;
    std::vector<double> val(ns + 1);
    for (int k = 0; k <= ns; ++k) val[k] = phi(double(k) / ns);

    std::vector<double> roots;

    // samples already on the curve
    for (int k = 0; k <= ns; ++k)
        if (std::abs(val[k]) <= eps_geo_) roots.push_back(double(k) / ns);

    // sign-change brackets
    for (int k = 0; k < ns; ++k) {
        if (std::abs(val[k]) <= eps_geo_ || std::abs(val[k + 1]) <= eps_geo_) continue;
        if (val[k] * val[k + 1] > 0.0) continue;
        roots.push_back(bisect(double(k) / ns, double(k + 1) / ns, val[k], val[k + 1]));
    }

    // near-misses: refine interior local minima of |phi| without a sign change
    for (int k = 1; k < ns; ++k) {
        const double fk = std::abs(val[k]);
        if (fk <= eps_geo_ || fk > std::abs(val[k - 1]) || fk > std::abs(val[k + 1])) continue;
        if (val[k - 1] * val[k] < 0.0 || val[k] * val[k + 1] < 0.0) continue;
        double lo = double(k - 1) / ns, hi = double(k + 1) / ns;
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double c = hi - gr * (hi - lo), e2 = lo + gr * (hi - lo);
        double fc = std::abs(phi(c)), fe = std::abs(phi(e2));
        for (int it = 0; it < 90; ++it) {
            if (fc < fe) {
                hi = e2;
                e2 = c;
                fe = fc;
                c = hi - gr * (hi - lo);
                fc = std::abs(phi(c));
            } else {
                lo = c;
                c = e2;
                fc = fe;
                e2 = lo + gr * (hi - lo);
                fe = std::abs(phi(e2));
            }
        }
        const double t = 0.5 * (lo + hi);
        const double ft = phi(t);
        if (ft * val[k] < 0.0 && std::abs(ft) > eps_geo_) {
            // the dip crosses the curve twice between adjacent samples
            roots.push_back(bisect(double(k - 1) / ns, t, val[k - 1], ft));
            roots.push_back(bisect(t, double(k + 1) / ns, ft, val[k + 1]));
        } else if (std::abs(ft) <= eps_geo_) {
            roots.push_back(t);
        }
    }

    std::sort(roots.begin(), roots.end());
    std::vector<double> kept;
    for (double t : roots)
        if (kept.empty() || (t - kept.back()) * len >= 4.0 * eps_geo_) kept.push_back(t);

    std::vector<EdgeIntersection> out;
    for (size_t k = 0; k < kept.size(); ++k) {
        const double t = kept[k];
        EdgeIntersection e;
        e.t = t;
        e.point = a + t * d;
        e.theta = theta_of(e.point);
        // crossing or touch: probe the level sign on both sides. The probe
        // must clear the rounding floor of the level function near a
        // quadratic touch, so it scales with the curve size.
        double dt = std::max(1e-5 * r_max_, 1000.0 * eps_geo_) / len;
        if (k > 0) dt = std::min(dt, 0.25 * (t - kept[k - 1]));
        if (k + 1 < kept.size()) dt = std::min(dt, 0.25 * (kept[k + 1] - t));
        if (t - dt > 0.0 && t + dt < 1.0)
            e.tangency = phi(t - dt) * phi(t + dt) > 0.0;  // endpoint roots count as crossings
        out.push_back(e);
    }
    return out;
}

std::vector<ArcPoint> InterfaceCurve::arc_quadrature(double lo, double hi, int order) const {
    if (!(hi > lo)) throw ConfigError("arc_quadrature: need theta_lo < theta_hi");
    if (order < 1) throw ConfigError("arc_quadrature: order must be >= 1");
    const auto& g = gauss_legendre(order);
    const int panels = std::max(1, int(std::ceil((hi - lo) / (2.0 * pi() / 64.0))));
    std::vector<ArcPoint> pts;
    pts.reserve(size_t(panels) * g.size());
    for (int p = 0; p < panels; ++p) {
        const double pa = lo + (hi - lo) * p / panels;
        const double pb = lo + (hi - lo) * (p + 1) / panels;
        for (const auto& n : g) {
            const double th = pa + n.x * (pb - pa);
            ArcPoint q;
            q.theta = th;
            q.x = position(th);
            q.w = n.w * (pb - pa) * speed(th);
            q.normal = unit_normal(th);
            pts.push_back(q);
        }
    }
    return pts;
}

double InterfaceCurve::arc_length(double lo, double hi, int order) const {
    double s = 0.0;
    for (const auto& q : arc_quadrature(lo, hi, order)) s += q.w;
    return s;
}

}  // namespace uipdg
