#include "uipdg/mesh.hpp"

#include <algorithm>
#include <cassert>

#include "uipdg/quadrature.hpp"

namespace uipdg {

Grid build_grid(const Rect& domain, int n) {
    if (n < 2) throw ConfigError("build_grid: need n >= 2");
    const double w = domain.width(), h = domain.height();
    if (std::abs(w - h) > 1e-12 * std::max(w, h))
        throw NonSquareDomain("build_grid: domain must be square");
    Grid g;
    g.domain = domain;
    g.n = n;
    g.h = w / n;
    return g;
}

Face grid_face(const Grid& g, int face_id) {
    Face f;
    f.id = face_id;
    const int nv = g.num_vertical_faces();
    if (face_id < nv) {
        // vertical face k between cells (i,j) and (i+1,j); k = j*(n-1) + i
        f.vertical = true;
        const int i = face_id % (g.n - 1), j = face_id / (g.n - 1);
        f.cell_lo = g.cell_id(i, j);
        f.cell_hi = g.cell_id(i + 1, j);
        const double x = g.domain.x0 + (i + 1) * g.h;
        f.a = {x, g.domain.y0 + j * g.h};
        f.b = {x, g.domain.y0 + (j + 1) * g.h};
        f.normal = {1.0, 0.0};
    } else {
        // horizontal face between cells (i,j) and (i,j+1); k = j*n + i
        const int k = face_id - nv;
        const int i = k % g.n, j = k / g.n;
        f.vertical = false;
        f.cell_lo = g.cell_id(i, j);
        f.cell_hi = g.cell_id(i, j + 1);
        const double y = g.domain.y0 + (j + 1) * g.h;
        f.a = {g.domain.x0 + i * g.h, y};
        f.b = {g.domain.x0 + (i + 1) * g.h, y};
        f.normal = {0.0, 1.0};
    }
    return f;
}

int face_between(const Grid& g, int cell, int edge) {
    const int i = g.cell_i(cell), j = g.cell_j(cell);
    switch (edge) {
        case 0: return j > 0 ? g.num_vertical_faces() + (j - 1) * g.n + i : -1;
        case 2: return j < g.n - 1 ? g.num_vertical_faces() + j * g.n + i : -1;
        case 3: return i > 0 ? j * (g.n - 1) + (i - 1) : -1;
        default: return i < g.n - 1 ? j * (g.n - 1) + i : -1;
    }
}

namespace {

// ccw edge endpoints: 0 bottom, 1 right, 2 top, 3 left
void edge_endpoints(const Rect& r, int edge, Vec2& a, Vec2& b) {
    switch (edge) {
        case 0: a = {r.x0, r.y0}; b = {r.x1, r.y0}; break;
        case 1: a = {r.x1, r.y0}; b = {r.x1, r.y1}; break;
        case 2: a = {r.x1, r.y1}; b = {r.x0, r.y1}; break;
        default: a = {r.x0, r.y1}; b = {r.x0, r.y0}; break;
    }
}

// distance range from the curve center to a rectangle (for quick rejection)
void center_distance_range(const Rect& r, const Vec2& c, double& dmin, double& dmax) {
    const double dx = std::max({r.x0 - c.x, c.x - r.x1, 0.0});
    const double dy = std::max({r.y0 - c.y, c.y - r.y1, 0.0});
    dmin = std::hypot(dx, dy);
    dmax = 0.0;
    for (const Vec2 corner : {Vec2{r.x0, r.y0}, Vec2{r.x1, r.y0}, Vec2{r.x0, r.y1},
                              Vec2{r.x1, r.y1}})
        dmax = std::max(dmax, (corner - c).norm());
}

bool assumption1_holds(const int counts[4]) {
    int two_edges = 0, emax = 0;
    for (int e = 0; e < 4; ++e) {
        if (counts[e] > 2) return false;
        if (counts[e] == 2) ++two_edges;
        if (counts[e] > counts[emax]) emax = e;
    }
    if (two_edges > 1) return false;
    int rest = 0;
    for (int e = 0; e < 4; ++e)
        if (e != emax) rest += counts[e];
    return rest <= 2;
}

double arc_green_xdy(const InterfaceCurve& curve, double a, double b) {
    // \int_a^b x(th) y'(th) dth with enough panels to resolve the wiggliest
    // curves used in the experiments
    const auto& g = gauss_legendre(12);
    const int panels = std::max(2, int(std::ceil((b - a) / 0.02)));
    double s = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double pa = a + (b - a) * p / panels, pb = a + (b - a) * (p + 1) / panels;
        for (const auto& n : g) {
            const double th = pa + n.x * (pb - pa);
            const Vec2 x = curve.position(th), v = curve.velocity(th);
            s += n.w * (pb - pa) * x.x * v.y;
        }
    }
    return s;
}

}  // namespace

void cut_measures(const Grid& g, const InterfaceCurve& curve, CutCellGeometry& geom) {
    const Rect r = g.cell_rect(geom.cell);
    const double h2 = g.h * g.h;
    if (geom.tag != CellTag::Interface) {
        const int inside = geom.tag == CellTag::Interior1 ? 0 : 1;
        geom.area[inside] = h2;
        geom.area[1 - inside] = 0.0;
        geom.arc_len = 0.0;
        return;
    }
    // Green's theorem: |K ∩ Omega_i| = ∮ x dy over the ccw region boundary.
    // Vertical edge sub-segments contribute x * (signed length); arcs are
    // integrated in the curve parameter, orientation +theta for Omega1.
    double area1 = 0.0, area2 = 0.0;
    area1 += r.x1 * geom.exposure[1][0] - r.x0 * geom.exposure[3][0];
    area2 += r.x1 * geom.exposure[1][1] - r.x0 * geom.exposure[3][1];
    double arc_total = 0.0, len_total = 0.0;
    for (const auto& iv : geom.arc_intervals) {
        arc_total += arc_green_xdy(curve, iv[0], iv[1]);
        len_total += curve.arc_length(iv[0], iv[1]);
    }
    area1 += arc_total;
    area2 -= arc_total;
    geom.area[0] = std::clamp(area1, 0.0, h2);
    geom.area[1] = std::clamp(area2, 0.0, h2);
    geom.arc_len = len_total;
    if (std::abs(area1 + area2 - h2) > 1e-8 * h2)
        throw Error("cut_measures: region areas do not partition the cell (cell " +
                    std::to_string(geom.cell) + ", defect " +
                    format_full(area1 + area2 - h2) + ")");
}

std::vector<CutCellGeometry> classify_elements(const Grid& g, const InterfaceCurve& curve,
                                               bool strict) {
    std::vector<CutCellGeometry> out(g.num_cells());
    const double h = g.h;
    for (int id = 0; id < g.num_cells(); ++id) {
        CutCellGeometry& geom = out[id];
        geom.cell = id;
        const Rect r = g.cell_rect(id);

        double dmin, dmax;
        center_distance_range(r, curve.center(), dmin, dmax);
        if (dmin > curve.radius_max() + curve.eps_geo()) {
            geom.tag = CellTag::Interior2;
            cut_measures(g, curve, geom);
            continue;
        }
        if (dmax < curve.radius_min() - curve.eps_geo()) {
            geom.tag = CellTag::Interior1;
            cut_measures(g, curve, geom);
            continue;
        }

        int counts[4] = {0, 0, 0, 0};
        std::vector<EdgeCut> cuts;
        double exposure[4][2] = {{0, 0}, {0, 0}, {0, 0}, {0, 0}};
        const double vtol = std::max(4.0 * curve.eps_geo() / h, 1e-11);
        for (int e = 0; e < 4; ++e) {
            Vec2 a, b;
            edge_endpoints(r, e, a, b);
            const auto hits = curve.edge_intersections(a, b);
            std::vector<double> ts;
            for (const auto& hit : hits) {
                if (hit.tangency) continue;  // touches do not change the side
                ts.push_back(hit.t);
                // a crossing at the far corner belongs to the next ccw edge
                // (where it sits at t = 0); keep one record per point
                if (hit.t >= 1.0 - vtol) continue;
                EdgeCut ec;
                ec.edge = e;
                ec.t = hit.t;
                ec.theta = hit.theta;
                ec.point = hit.point;
                cuts.push_back(ec);
                ++counts[e];
            }
            // edge exposure per subdomain, from the crossing-parameter walk
            ts.insert(ts.begin(), 0.0);
            ts.push_back(1.0);
            for (size_t k = 0; k + 1 < ts.size(); ++k) {
                const double len = (ts[k + 1] - ts[k]) * h;
                if (len <= 0.0) continue;
                const Vec2 mid = a + 0.5 * (ts[k] + ts[k + 1]) * (b - a);
                // OnGamma midpoints count toward Omega2 (deterministic tie-break)
                exposure[e][curve.classify(mid) == RegionId::Omega1 ? 0 : 1] += len;
            }
        }
        for (int e = 0; e < 4; ++e)
            for (int i = 0; i < 2; ++i) geom.exposure[e][i] = exposure[e][i];

        if (cuts.empty()) {
            geom.tag = curve.classify(r.center()) == RegionId::Omega1 ? CellTag::Interior1
                                                                      : CellTag::Interior2;
            cut_measures(g, curve, geom);
            continue;
        }

        geom.tag = CellTag::Interface;
        geom.cuts = cuts;
        geom.assumption1_ok = assumption1_holds(counts);
        if (!geom.assumption1_ok && strict)
            throw AssumptionIViolated(id, "Assumption (I) violated on cell " + std::to_string(id));

        // cut type from the crossing topology: type-2 when the two crossing
        // points sit on adjacent edges (vertex hits belong to both edges that
        // meet there), type-1 otherwise
        geom.type = CutType::Type1;
        if (cuts.size() == 2) {
            bool adjacent = false;
            for (int e1 = 0; e1 < 4 && !adjacent; ++e1)
                for (int e2 = 0; e2 < 4 && !adjacent; ++e2) {
                    if (e1 == e2 || (e1 + 2) % 4 == e2) continue;
                    Vec2 a1, b1, a2, b2;
                    edge_endpoints(r, e1, a1, b1);
                    edge_endpoints(r, e2, a2, b2);
                    auto on_edge = [&](const Vec2& q, const Vec2& ea, const Vec2& eb) {
                        const Vec2 dir = eb - ea;
                        const double t = (q - ea).dot(dir) / dir.dot(dir);
                        return t >= -vtol && t <= 1.0 + vtol &&
                               std::abs((q - ea).cross(dir)) / dir.norm() <= vtol * h;
                    };
                    if (on_edge(cuts[0].point, a1, b1) && on_edge(cuts[1].point, a2, b2))
                        adjacent = true;
                }
            if (adjacent) geom.type = CutType::Type2;
        }
        int two_edge = -1;
        std::vector<int> ones;
        for (int e = 0; e < 4; ++e) {
            if (counts[e] >= 2) two_edge = e;
            if (counts[e] == 1) ones.push_back(e);
        }
        geom.type_edge = two_edge >= 0 ? two_edge : (ones.empty() ? -1 : ones[0]);

        // arc intervals: split the curve at the cell's crossing parameters and
        // keep the pieces whose midpoint lies in the cell
        std::vector<double> thetas;
        for (const auto& c : cuts) thetas.push_back(c.theta);
        std::sort(thetas.begin(), thetas.end());
        thetas.erase(std::unique(thetas.begin(), thetas.end(),
                                 [](double a, double b) { return std::abs(a - b) < 1e-11; }),
                     thetas.end());
        if (!thetas.empty() && thetas.back() - thetas.front() > 2.0 * pi() - 1e-11)
            thetas.pop_back();
        const size_t m = thetas.size();
        for (size_t k = 0; k < m; ++k) {
            const double lo = thetas[k];
            const double hi = k + 1 < m ? thetas[k + 1] : thetas[0] + 2.0 * pi();
            if (hi - lo < 1e-11) continue;
            const Vec2 mid = curve.position(0.5 * (lo + hi));
            if (r.contains(mid, curve.eps_geo() * 10.0))
                geom.arc_intervals.push_back({lo, hi});
        }

        cut_measures(g, curve, geom);
    }

    // a closed curve living strictly inside one cell produces no edge
    // crossings anywhere; detect by walking the curve
    const int ns = 1 << 13;
    for (int k = 0; k < ns; ++k) {
        const Vec2 p = curve.position(2.0 * pi() * k / ns);
        if (!g.domain.contains(p)) continue;
        const int cell = g.locate(p);
        if (out[cell].tag == CellTag::Interface) continue;
        const Rect r = g.cell_rect(cell);
        const double depth = std::min(std::min(p.x - r.x0, r.x1 - p.x),
                                      std::min(p.y - r.y0, r.y1 - p.y));
        if (depth > 1e-6 * h) {
            out[cell].assumption1_ok = false;
            if (strict)
                throw AssumptionIViolated(
                    cell, "interface passes through cell " + std::to_string(cell) +
                              " without crossing its edges (unresolved by the grid)");
        }
    }
    return out;
}

double admissibility(double t) { return 30.0 * t * (t + 2.0) / (100.0 * t + 63.0); }

double assumption3_threshold(double delta) {
    if (!(delta > 0.0 && delta < 0.5)) throw ConfigError("assumption3_threshold: delta in (0,1/2)");
    const double c = 1.0 - 2.0 * delta;
    // solve 30 t^2 + (60 - 100 c) t - 63 c = 0 for the positive root
    const double b = 60.0 - 100.0 * c;
    const double t = (-b + std::sqrt(b * b + 4.0 * 30.0 * 63.0 * c)) / 60.0;
    return std::min(t, 1.0);
}

namespace {

bool ball_connected_at(const InterfaceCurve& curve, const Vec2& P, double radius, int region,
                       int m) {
    std::vector<int> mark(m * m, 0);
    const double cell = 2.0 * radius / m;
    int first = -1;
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            const Vec2 p{P.x - radius + (i + 0.5) * cell, P.y - radius + (j + 0.5) * cell};
            if ((p - P).norm() > radius) continue;
            const RegionId rid = curve.classify(p);
            const bool in = region == 0 ? rid == RegionId::Omega1 : rid == RegionId::Omega2;
            if (in) {
                mark[j * m + i] = 1;
                if (first < 0) first = j * m + i;
            }
        }
    if (first < 0) return true;
    std::vector<int> stack{first};
    mark[first] = 2;
    while (!stack.empty()) {
        const int k = stack.back();
        stack.pop_back();
        const int i = k % m, j = k / m;
        const int nb[4] = {i > 0 ? k - 1 : -1, i < m - 1 ? k + 1 : -1, j > 0 ? k - m : -1,
                           j < m - 1 ? k + m : -1};
        for (int q : nb)
            if (q >= 0 && mark[q] == 1) {
                mark[q] = 2;
                stack.push_back(q);
            }
    }
    for (int k = 0; k < m * m; ++k)
        if (mark[k] == 1) return false;
    return true;
}

// start on a 64x64 sub-grid; refine before declaring a disconnection, so that
// necks thinner than one sub-cell are not mistaken for obstructions
bool ball_connected(const InterfaceCurve& curve, const Vec2& P, double radius, int region) {
    for (int m : {64, 256, 1024})
        if (ball_connected_at(curve, P, radius, region, m)) return true;
    return false;
}

}  // namespace

AssumptionReport check_assumptions(const Grid& g, const InterfaceCurve& curve, double delta,
                                   const std::vector<CutCellGeometry>& geoms) {
    if (!(delta > 0.0 && delta < 0.5)) throw ConfigError("check_assumptions: delta in (0,1/2)");
    AssumptionReport rep;
    for (const auto& geom : geoms)
        if (!geom.assumption1_ok) rep.a1_failures.push_back(geom.cell);
    rep.a1_ok = rep.a1_failures.empty();

    rep.a2_samples = 1024;
    const double radius = 2.0 * std::sqrt(2.0) * g.h;
    for (int k = 0; k < rep.a2_samples; ++k) {
        const Vec2 P = curve.position(2.0 * pi() * k / rep.a2_samples);
        if (!ball_connected(curve, P, radius, 0) || !ball_connected(curve, P, radius, 1))
            rep.a2_failures.push_back(k);
    }
    rep.a2_ok = rep.a2_failures.empty();

    rep.kappa_max = curve.max_curvature().kappa_max;
    rep.t = rep.kappa_max * g.h;
    rep.T_of_t = admissibility(rep.t);
    rep.threshold = 1.0 - 2.0 * delta;
    rep.a3_ok = rep.t <= 1.0 && rep.T_of_t <= rep.threshold;
    return rep;
}

}  // namespace uipdg
