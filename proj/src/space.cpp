#include "uipdg/space.hpp"

#include <algorithm>
#include <set>

namespace uipdg {

const std::vector<double>& lobatto_nodes(int p) {
    static const std::vector<double> p1{0.0, 1.0};
    static const std::vector<double> p2{0.0, 0.5, 1.0};
    static const std::vector<double> p3{0.0, 0.5 * (1.0 - 1.0 / std::sqrt(5.0)),
                                        0.5 * (1.0 + 1.0 / std::sqrt(5.0)), 1.0};
    switch (p) {
        case 1: return p1;
        case 2: return p2;
        case 3: return p3;
        default: throw UnsupportedDegree("polynomial degree must be 1, 2 or 3");
    }
}

namespace {

double lagrange_1d(const std::vector<double>& nodes, int k, double t) {
    double v = 1.0;
    for (size_t j = 0; j < nodes.size(); ++j) {
        if (int(j) == k) continue;
        v *= (t - nodes[j]) / (nodes[k] - nodes[j]);
    }
    return v;
}

double lagrange_1d_deriv(const std::vector<double>& nodes, int k, double t) {
    double sum = 0.0;
    for (size_t m = 0; m < nodes.size(); ++m) {
        if (int(m) == k) continue;
        double prod = 1.0 / (nodes[k] - nodes[m]);
        for (size_t j = 0; j < nodes.size(); ++j) {
            if (int(j) == k || j == m) continue;
            prod *= (t - nodes[j]) / (nodes[k] - nodes[j]);
        }
        sum += prod;
    }
    return sum;
}

}  // namespace

double LocalBasis::value(int dof, const Vec2& x) const {
    const auto& nd = lobatto_nodes(p);
    const int a = dof / (p + 1), b = dof % (p + 1);
    const double u = (x.x - cell.x0) / cell.width();
    const double v = (x.y - cell.y0) / cell.height();
    return lagrange_1d(nd, a, u) * lagrange_1d(nd, b, v);
}

Vec2 LocalBasis::gradient(int dof, const Vec2& x) const {
    const auto& nd = lobatto_nodes(p);
    const int a = dof / (p + 1), b = dof % (p + 1);
    const double u = (x.x - cell.x0) / cell.width();
    const double v = (x.y - cell.y0) / cell.height();
    return {lagrange_1d_deriv(nd, a, u) * lagrange_1d(nd, b, v) / cell.width(),
            lagrange_1d(nd, a, u) * lagrange_1d_deriv(nd, b, v) / cell.height()};
}

Vec2 LocalBasis::node(int dof) const {
    const auto& nd = lobatto_nodes(p);
    const int a = dof / (p + 1), b = dof % (p + 1);
    return {cell.x0 + nd[a] * cell.width(), cell.y0 + nd[b] * cell.height()};
}

DofMap build_spaces(const MergedMesh& merged, const std::vector<CutCellGeometry>& geoms, int p) {
    if (p < 1 || p > 3) throw UnsupportedDegree("polynomial degree must be 1, 2 or 3");
    DofMap dm;
    dm.grid = merged.grid;
    dm.merged = &merged;
    dm.p = p;
    const Grid& g = dm.grid;
    const int nn = dm.nodes_per_axis();

    for (int i = 0; i < 2; ++i) {
        dm.in_subdomain[i].assign(g.num_cells(), 0);
        for (const auto& geom : geoms)
            dm.in_subdomain[i][geom.cell] = geom.in_subdomain(i, g.h) ? 1 : 0;
    }

    // merged numbering: stitched lattice nodes of unmerged cells, then macro blocks
    int gid = 0;
    for (int i = 0; i < 2; ++i) {
        dm.node_gid[i].assign(size_t(nn) * nn, -1);
        for (int cell = 0; cell < g.num_cells(); ++cell) {
            if (!dm.in_subdomain[i][cell] || dm.cell_merged(i, cell)) continue;
            const int ci = g.cell_i(cell), cj = g.cell_j(cell);
            for (int a = 0; a <= p; ++a)
                for (int b = 0; b <= p; ++b) {
                    const int kx = ci * p + a, ky = cj * p + b;
                    dm.node_gid[i][dm.lattice_id(kx, ky)] =
                        dm.lattice_on_boundary(kx, ky) ? -2 : 0;
                }
        }
        for (int k = 0; k < nn * nn; ++k)
            if (dm.node_gid[i][k] == 0) dm.node_gid[i][k] = gid++;
        dm.macro_gid0[i].assign(merged.macros[i].size(), -1);
        for (size_t m = 0; m < merged.macros[i].size(); ++m) {
            dm.macro_gid0[i][m] = gid;
            gid += (p + 1) * (p + 1);
        }
    }
    dm.N = gid;

    // unmerged numbering: identical stitched nodes, then per-cell blocks on merged cells
    int tgid = 0;
    for (int i = 0; i < 2; ++i) {
        dm.tnode_gid[i].assign(size_t(nn) * nn, -1);
        for (int k = 0; k < nn * nn; ++k)
            if (dm.node_gid[i][k] != -1)
                dm.tnode_gid[i][k] = dm.node_gid[i][k] >= 0 ? 0 : -2;
        for (int k = 0; k < nn * nn; ++k)
            if (dm.tnode_gid[i][k] == 0) dm.tnode_gid[i][k] = tgid++;
        dm.cell_tgid0[i].assign(g.num_cells(), -1);
        for (int cell = 0; cell < g.num_cells(); ++cell) {
            if (!dm.in_subdomain[i][cell] || !dm.cell_merged(i, cell)) continue;
            dm.cell_tgid0[i][cell] = tgid;
            tgid += (p + 1) * (p + 1);
        }
    }
    dm.Ntilde = tgid;
    return dm;
}

std::vector<int> DofMap::cell_dofs_unmerged(int i, int cell) const {
    const int nd = (p + 1) * (p + 1);
    std::vector<int> dofs(nd, -1);
    if (!in_subdomain[i][cell]) return dofs;
    if (cell_merged(i, cell)) {
        const int base = cell_tgid0[i][cell];
        for (int k = 0; k < nd; ++k) dofs[k] = base + k;
        return dofs;
    }
    const int ci = grid.cell_i(cell), cj = grid.cell_j(cell);
    for (int a = 0; a <= p; ++a)
        for (int b = 0; b <= p; ++b) {
            const int t = tnode_gid[i][lattice_id(ci * p + a, cj * p + b)];
            dofs[a * (p + 1) + b] = t >= 0 ? t : -1;
        }
    return dofs;
}

std::vector<int> DofMap::cell_dofs_merged_unm(int i, int cell) const {
    const int nd = (p + 1) * (p + 1);
    std::vector<int> dofs(nd, -1);
    if (!in_subdomain[i][cell] || cell_merged(i, cell))
        throw Error("cell_dofs_merged_unm: cell is merged or absent");
    const int ci = grid.cell_i(cell), cj = grid.cell_j(cell);
    for (int a = 0; a <= p; ++a)
        for (int b = 0; b <= p; ++b) {
            const int t = node_gid[i][lattice_id(ci * p + a, cj * p + b)];
            dofs[a * (p + 1) + b] = t >= 0 ? t : -1;
        }
    return dofs;
}

SpMat build_merge_operator(const DofMap& dm) {
    std::vector<Eigen::Triplet<double>> trip;
    const int p = dm.p, nd = (p + 1) * (p + 1);
    const Grid& g = dm.grid;
    const int nn = dm.nodes_per_axis();
    for (int i = 0; i < 2; ++i) {
        // stitched nodes: identity action
        for (int k = 0; k < nn * nn; ++k)
            if (dm.tnode_gid[i][k] >= 0) trip.emplace_back(dm.tnode_gid[i][k], dm.node_gid[i][k], 1.0);
        // merged cells: interpolate the macro polynomial at the cell's nodes
        for (int cell = 0; cell < g.num_cells(); ++cell) {
            const int base = dm.cell_tgid0[i][cell];
            if (base < 0) continue;
            const int macro = dm.merged->macro_of[i][cell];
            const LocalBasis mb = dm.macro_basis(i, macro);
            const LocalBasis cb = dm.cell_basis(cell);
            const int mbase = dm.macro_gid0[i][macro];
            for (int k = 0; k < nd; ++k) {
                const Vec2 z = cb.node(k);
                for (int j = 0; j < nd; ++j) {
                    const double w = mb.value(j, z);
                    if (std::abs(w) > 1e-14) trip.emplace_back(base + k, mbase + j, w);
                }
            }
        }
    }
    SpMat B(dm.Ntilde, dm.N);
    B.setFromTriplets(trip.begin(), trip.end());
    B.makeCompressed();
    return B;
}

std::vector<DgFace> enumerate_dg_faces(const MergedMesh& merged,
                                       const std::vector<CutCellGeometry>& geoms, int subdomain) {
    const Grid& g = merged.grid;
    std::set<int> seen;
    std::vector<DgFace> out;
    for (const auto& m : merged.macros[subdomain]) {
        for (int cell : m.cells) {
            for (int e = 0; e < 4; ++e) {
                const int nbr = g.neighbor(cell, e);
                if (nbr >= 0 && merged.macro_of[subdomain][nbr] == m.id) continue;  // internal
                const double expo = geoms[cell].tag == CellTag::Interface
                                        ? geoms[cell].exposure[e][subdomain]
                                        : (geoms[cell].tag == CellTag::Interior1) ==
                                                  (subdomain == 0)
                                              ? g.h
                                              : 0.0;
                if (expo <= 1e-10 * g.h) continue;  // no Omega_i content on the face
                DgFace df;
                df.subdomain = subdomain;
                if (nbr >= 0) {
                    const int fid = face_between(g, cell, e);
                    if (!seen.insert(fid).second) continue;
                    const Face f = grid_face(g, fid);
                    df.cell_lo = f.cell_lo;
                    df.cell_hi = f.cell_hi;
                    df.a = f.a;
                    df.b = f.b;
                    df.normal = f.normal;
                    df.key = fid;
                } else {
                    // boundary face: the Nitsche terms pin the macro trace to
                    // the homogeneous boundary value
                    const int key = g.num_faces() + 4 * cell + e;
                    if (!seen.insert(key).second) continue;
                    const Rect r = g.cell_rect(cell);
                    switch (e) {
                        case 0: df.a = {r.x0, r.y0}; df.b = {r.x1, r.y0}; df.normal = {0, -1}; break;
                        case 1: df.a = {r.x1, r.y0}; df.b = {r.x1, r.y1}; df.normal = {1, 0}; break;
                        case 2: df.a = {r.x0, r.y1}; df.b = {r.x1, r.y1}; df.normal = {0, 1}; break;
                        default: df.a = {r.x0, r.y0}; df.b = {r.x0, r.y1}; df.normal = {-1, 0}; break;
                    }
                    df.cell_lo = cell;
                    df.cell_hi = -1;
                    df.key = key;
                }
                out.push_back(df);
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const DgFace& a, const DgFace& b) { return a.key < b.key; });
    return out;
}

}  // namespace uipdg
