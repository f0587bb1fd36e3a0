#include "uipdg/quadrature.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <mutex>

#include "uipdg/geometry.hpp"
#include "uipdg/mesh.hpp"

namespace uipdg {

const std::vector<GaussNode>& gauss_legendre(int order) {
    static std::map<int, std::vector<GaussNode>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    if (order < 1) throw ConfigError("gauss_legendre: order must be >= 1");

    std::vector<GaussNode> nodes(order);
    for (int i = 0; i < order; ++i) {
        // Newton iteration on P_order, starting from the Chebyshev guess
        double x = std::cos(pi() * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        nodes[i].x = 0.5 * (1.0 + x);                      // map [-1,1] -> [0,1]
        nodes[i].w = 1.0 / ((1.0 - x * x) * dp * dp);      // 2/((1-x^2)P'^2) halved
    }
    std::sort(nodes.begin(), nodes.end(),
              [](const GaussNode& a, const GaussNode& b) { return a.x < b.x; });
    return cache.emplace(order, std::move(nodes)).first->second;
}

QuadRule gauss_tensor(const Rect& cell, int order) {
    const auto& g = gauss_legendre(order);
    QuadRule rule;
    rule.reserve(size_t(order) * order);
    for (const auto& gx : g)
        for (const auto& gy : g) {
            QPoint q;
            q.x = {cell.x0 + gx.x * cell.width(), cell.y0 + gy.x * cell.height()};
            q.w = gx.w * gy.w * cell.area();
            rule.push_back(q);
        }
    return rule;
}

namespace {

constexpr int kMaxDepth = 24;

enum class GraphAxis { None, X, Y };

struct ArcPiece {
    double lo = 0.0, hi = 0.0;
};

GraphAxis graph_axis(const InterfaceCurve& curve, const ArcPiece& p) {
    constexpr int ns = 33;
    double min_ax = 1e300, min_ay = 1e300, max_speed = 0.0;
    int sig_x = 0, sig_y = 0;
    bool flip_x = false, flip_y = false;
    for (int k = 0; k < ns; ++k) {
        const double th = p.lo + (p.hi - p.lo) * k / (ns - 1);
        const Vec2 v = curve.velocity(th);
        max_speed = std::max(max_speed, v.norm());
        min_ax = std::min(min_ax, std::abs(v.x));
        min_ay = std::min(min_ay, std::abs(v.y));
        const int sx = v.x > 0.0 ? 1 : (v.x < 0.0 ? -1 : 0);
        const int sy = v.y > 0.0 ? 1 : (v.y < 0.0 ? -1 : 0);
        if (sig_x == 0) sig_x = sx;
        else if (sx != 0 && sx != sig_x) flip_x = true;
        if (sig_y == 0) sig_y = sy;
        else if (sy != 0 && sy != sig_y) flip_y = true;
    }
    const double tol = 1e-3 * max_speed;
    const bool ok_x = !flip_x && min_ax > tol;
    const bool ok_y = !flip_y && min_ay > tol;
    if (ok_x && ok_y) return min_ax >= min_ay ? GraphAxis::X : GraphAxis::Y;
    if (ok_x) return GraphAxis::X;
    if (ok_y) return GraphAxis::Y;
    return GraphAxis::None;
}

class CutDecomposer {
  public:
    CutDecomposer(const InterfaceCurve& curve, int region, int order, double h)
        : curve_(curve), region_(region), order_(order), skip_tol_(4.0 * curve.eps_geo()),
          h_(h) {}

    void run(const Rect& rect, std::vector<ArcPiece> pieces, QuadRule& out) {
        recurse(rect, std::move(pieces), 0, out);
    }

  private:
    bool in_region(const Vec2& p) const {
        const RegionId id = curve_.classify(p);
        if (id == RegionId::OnGamma) return region_ == 1;  // tie-break toward Omega2
        return (id == RegionId::Omega1) == (region_ == 0);
    }

    void emit_rect(const Rect& r, QuadRule& out) const {
        if (r.width() <= skip_tol_ || r.height() <= skip_tol_) return;
        if (!in_region(r.center())) return;
        for (auto& q : gauss_tensor(r, order_)) out.push_back(q);
    }

    // trapezoid between the arc (an x-graph on the piece) and the horizontal
    // baseline y = base; points are stacked between baseline and arc
    void emit_trapezoid_x(const ArcPiece& p, double base, QuadRule& out) const {
        constexpr int ns = 17;
        double max_gap = 0.0, th_star = p.lo;
        for (int k = 0; k < ns; ++k) {
            const double th = p.lo + (p.hi - p.lo) * k / (ns - 1);
            const double gap = std::abs(curve_.position(th).y - base);
            if (gap > max_gap) {
                max_gap = gap;
                th_star = th;
            }
        }
        if (max_gap <= skip_tol_) return;
        const Vec2 probe{curve_.position(th_star).x, 0.5 * (curve_.position(th_star).y + base)};
        if (!in_region(probe)) return;
        const auto& g = gauss_legendre(order_);
        const int panels = std::max(2, int(std::ceil((p.hi - p.lo) / 0.1)));
        for (int pa = 0; pa < panels; ++pa) {
            const double a = p.lo + (p.hi - p.lo) * pa / panels;
            const double b = p.lo + (p.hi - p.lo) * (pa + 1) / panels;
            for (const auto& gt : g) {
                const double th = a + gt.x * (b - a);
                const Vec2 x = curve_.position(th);
                const double vx = std::abs(curve_.velocity(th).x);
                const double span = x.y - base;
                for (const auto& gv : g) {
                    QPoint q;
                    q.x = {x.x, base + gv.x * span};
                    q.w = gt.w * (b - a) * gv.w * vx * std::abs(span);
                    out.push_back(q);
                }
            }
        }
    }

    void emit_trapezoid_y(const ArcPiece& p, double base, QuadRule& out) const {
        constexpr int ns = 17;
        double max_gap = 0.0, th_star = p.lo;
        for (int k = 0; k < ns; ++k) {
            const double th = p.lo + (p.hi - p.lo) * k / (ns - 1);
            const double gap = std::abs(curve_.position(th).x - base);
            if (gap > max_gap) {
                max_gap = gap;
                th_star = th;
            }
        }
        if (max_gap <= skip_tol_) return;
        const Vec2 probe{0.5 * (curve_.position(th_star).x + base), curve_.position(th_star).y};
        if (!in_region(probe)) return;
        const auto& g = gauss_legendre(order_);
        const int panels = std::max(2, int(std::ceil((p.hi - p.lo) / 0.1)));
        for (int pa = 0; pa < panels; ++pa) {
            const double a = p.lo + (p.hi - p.lo) * pa / panels;
            const double b = p.lo + (p.hi - p.lo) * (pa + 1) / panels;
            for (const auto& gt : g) {
                const double th = a + gt.x * (b - a);
                const Vec2 x = curve_.position(th);
                const double vy = std::abs(curve_.velocity(th).y);
                const double span = x.x - base;
                for (const auto& gv : g) {
                    QPoint q;
                    q.x = {base + gv.x * span, x.y};
                    q.w = gt.w * (b - a) * gv.w * vy * std::abs(span);
                    out.push_back(q);
                }
            }
        }
    }

    void emit_bands(const Rect& r, const ArcPiece& p, GraphAxis axis, QuadRule& out) const {
        const Vec2 A = curve_.position(p.lo), B = curve_.position(p.hi);
        if (axis == GraphAxis::X) {
            const double xlo = std::min(A.x, B.x), xhi = std::max(A.x, B.x);
            emit_rect({r.x0, r.y0, std::min(xlo, r.x1), r.y1}, out);
            emit_rect({std::max(xhi, r.x0), r.y0, r.x1, r.y1}, out);
            emit_trapezoid_x(p, r.y0, out);
            emit_trapezoid_x(p, r.y1, out);
        } else {
            const double ylo = std::min(A.y, B.y), yhi = std::max(A.y, B.y);
            emit_rect({r.x0, r.y0, r.x1, std::min(ylo, r.y1)}, out);
            emit_rect({r.x0, std::max(yhi, r.y0), r.x1, r.y1}, out);
            emit_trapezoid_y(p, r.x0, out);
            emit_trapezoid_y(p, r.x1, out);
        }
    }

    // split the pieces at their crossings with a segment and hand each
    // sub-piece to the sub-rectangle containing its midpoint
    void split_pieces(const std::vector<ArcPiece>& pieces, const Vec2& sa, const Vec2& sb,
                      const Rect& r1, const Rect& r2, std::vector<ArcPiece>& out1,
                      std::vector<ArcPiece>& out2) const {
        const auto hits = curve_.edge_intersections(sa, sb);
        for (const auto& p : pieces) {
            std::vector<double> th{p.lo};
            for (const auto& hit : hits) {
                if (hit.tangency) continue;
                double t = hit.theta;
                if (t < p.lo) t += 2.0 * pi();
                if (t > p.lo + 1e-12 && t < p.hi - 1e-12) th.push_back(t);
            }
            th.push_back(p.hi);
            std::sort(th.begin(), th.end());
            for (size_t k = 0; k + 1 < th.size(); ++k) {
                if (th[k + 1] - th[k] < 1e-12) continue;
                const ArcPiece sub{th[k], th[k + 1]};
                const Vec2 mid = curve_.position(0.5 * (sub.lo + sub.hi));
                const double tol = 10.0 * curve_.eps_geo();
                if (r1.contains(mid, tol))
                    out1.push_back(sub);
                else if (r2.contains(mid, tol))
                    out2.push_back(sub);
                // otherwise the sub-piece has no interior presence; drop it
            }
        }
    }

    void recurse(const Rect& r, std::vector<ArcPiece> pieces, int depth, QuadRule& out) const {
        if (pieces.empty()) {
            emit_rect(r, out);
            return;
        }
        if (pieces.size() == 1) {
            const GraphAxis axis = graph_axis(curve_, pieces[0]);
            if (axis != GraphAxis::None) {
                emit_bands(r, pieces[0], axis, out);
                return;
            }
        }
        if (depth >= kMaxDepth)
            throw DegenerateRegion("cut_volume_rule: decomposition did not terminate");

        const bool split_x = r.width() >= r.height();
        // avoid split lines that graze an arc endpoint
        double frac = 0.5;
        for (double cand : {0.5, 0.5625, 0.4375, 0.625, 0.375}) {
            const double c = split_x ? r.x0 + cand * r.width() : r.y0 + cand * r.height();
            bool ok = true;
            for (const auto& p : pieces)
                for (double th : {p.lo, p.hi}) {
                    const Vec2 q = curve_.position(th);
                    const double d = std::abs((split_x ? q.x : q.y) - c);
                    if (d < 1e-7 * (split_x ? r.width() : r.height())) ok = false;
                }
            if (ok) {
                frac = cand;
                break;
            }
        }

        Rect r1 = r, r2 = r;
        Vec2 sa, sb;
        if (split_x) {
            const double xm = r.x0 + frac * r.width();
            r1.x1 = xm;
            r2.x0 = xm;
            sa = {xm, r.y0};
            sb = {xm, r.y1};
        } else {
            const double ym = r.y0 + frac * r.height();
            r1.y1 = ym;
            r2.y0 = ym;
            sa = {r.x0, ym};
            sb = {r.x1, ym};
        }
        std::vector<ArcPiece> p1, p2;
        split_pieces(pieces, sa, sb, r1, r2, p1, p2);
        recurse(r1, std::move(p1), depth + 1, out);
        recurse(r2, std::move(p2), depth + 1, out);
    }

    const InterfaceCurve& curve_;
    int region_;
    int order_;
    double skip_tol_;
    double h_;
};

}  // namespace

QuadRule cut_volume_rule(const Grid& g, const CutCellGeometry& geom, const InterfaceCurve& curve,
                         int region, int order) {
    if (region != 0 && region != 1) throw ConfigError("cut_volume_rule: region is 0 or 1");
    if (order < 1) throw ConfigError("cut_volume_rule: order >= 1");
    const Rect rect = g.cell_rect(geom.cell);
    if (geom.tag != CellTag::Interface) {
        const int inside = geom.tag == CellTag::Interior1 ? 0 : 1;
        if (inside == region) return gauss_tensor(rect, order);
        return {};
    }
    if (geom.area[region] < 1e-14 * g.h * g.h) return {};  // treated as empty
    std::vector<ArcPiece> pieces;
    for (const auto& iv : geom.arc_intervals) pieces.push_back({iv[0], iv[1]});
    QuadRule out;
    CutDecomposer dec(curve, region, order, g.h);
    dec.run(rect, std::move(pieces), out);
    return out;
}

QuadRule interface_rule(const CutCellGeometry& geom, const InterfaceCurve& curve, int order) {
    QuadRule out;
    for (const auto& iv : geom.arc_intervals)
        for (const auto& a : curve.arc_quadrature(iv[0], iv[1], order)) {
            QPoint q;
            q.x = a.x;
            q.w = a.w;
            q.normal = a.normal;
            out.push_back(q);
        }
    return out;
}

QuadRule face_rule_full(const Face& face, int order) {
    const auto& g = gauss_legendre(order);
    const Vec2 d = face.b - face.a;
    const double len = d.norm();
    QuadRule out;
    out.reserve(g.size());
    for (const auto& n : g) {
        QPoint q;
        q.x = face.a + n.x * d;
        q.w = n.w * len;
        q.normal = face.normal;
        out.push_back(q);
    }
    return out;
}

QuadRule face_rule(const Face& face, const InterfaceCurve& curve, int region, int order) {
    const auto hits = curve.edge_intersections(face.a, face.b);
    std::vector<double> ts{0.0};
    for (const auto& h : hits)
        if (!h.tangency && h.t > 1e-12 && h.t < 1.0 - 1e-12) ts.push_back(h.t);
    ts.push_back(1.0);
    std::sort(ts.begin(), ts.end());

    const auto& g = gauss_legendre(order);
    const Vec2 d = face.b - face.a;
    const double len = d.norm();
    QuadRule out;
    for (size_t k = 0; k + 1 < ts.size(); ++k) {
        if (ts[k + 1] - ts[k] < 1e-12) continue;
        const Vec2 mid = face.a + 0.5 * (ts[k] + ts[k + 1]) * d;
        const RegionId id = curve.classify(mid);
        const bool in = id == RegionId::OnGamma ? (region == 1)
                                                : ((id == RegionId::Omega1) == (region == 0));
        if (!in) continue;
        for (const auto& n : g) {
            QPoint q;
            q.x = face.a + (ts[k] + n.x * (ts[k + 1] - ts[k])) * d;
            q.w = n.w * (ts[k + 1] - ts[k]) * len;
            q.normal = face.normal;
            out.push_back(q);
        }
    }
    return out;
}

}  // namespace uipdg
