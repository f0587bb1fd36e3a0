#pragma once

#include <array>
#include <vector>

#include "uipdg/geometry.hpp"

namespace uipdg {

/// Uniform Cartesian grid of square cells over a square domain.
/// Cells are indexed id = j*n + i for column i, row j; faces are enumerated
/// lexicographically, vertical faces first.
struct Grid {
    Rect domain;
    int n = 0;
    double h = 0.0;

    int num_cells() const { return n * n; }
    int cell_id(int i, int j) const { return j * n + i; }
    int cell_i(int id) const { return id % n; }
    int cell_j(int id) const { return id / n; }
    Rect cell_rect(int id) const {
        const int i = cell_i(id), j = cell_j(id);
        return {domain.x0 + i * h, domain.y0 + j * h, domain.x0 + (i + 1) * h,
                domain.y0 + (j + 1) * h};
    }
    /// Neighbor across edge 0=bottom,1=right,2=top,3=left; -1 if outside.
    int neighbor(int id, int edge) const {
        int i = cell_i(id), j = cell_j(id);
        switch (edge) {
            case 0: j -= 1; break;
            case 1: i += 1; break;
            case 2: j += 1; break;
            default: i -= 1; break;
        }
        if (i < 0 || i >= n || j < 0 || j >= n) return -1;
        return cell_id(i, j);
    }
    /// Cell containing p (clamped to the grid).
    int locate(const Vec2& p) const {
        int i = std::min(n - 1, std::max(0, int((p.x - domain.x0) / h)));
        int j = std::min(n - 1, std::max(0, int((p.y - domain.y0) / h)));
        return cell_id(i, j);
    }

    int num_vertical_faces() const { return (n - 1) * n; }
    int num_horizontal_faces() const { return n * (n - 1); }
    int num_faces() const { return num_vertical_faces() + num_horizontal_faces(); }
};

struct Face {
    int id = -1;
    bool vertical = false;
    int cell_lo = -1;  // lower cell id (left of a vertical face, below a horizontal face)
    int cell_hi = -1;
    Vec2 a, b;     // endpoints, a < b lexicographically
    Vec2 normal;   // unit, from cell_lo toward cell_hi
};

Grid build_grid(const Rect& domain, int n);
Face grid_face(const Grid& g, int face_id);
/// Face id of the face between cell and its edge-neighbor; -1 on the boundary.
int face_between(const Grid& g, int cell, int edge);

enum class CellTag { Interior1, Interior2, Interface };
enum class CutType { None, Type1, Type2 };

struct EdgeCut {
    int edge = 0;        // 0=bottom,1=right,2=top,3=left
    double t = 0.0;      // parameter along the ccw-ordered edge
    double theta = 0.0;  // curve parameter
    Vec2 point;
};

struct CutCellGeometry {
    int cell = -1;
    CellTag tag = CellTag::Interior2;
    CutType type = CutType::None;
    int type_edge = -1;  // Type1: the hugged edge per subdomain is derived from exposures;
                         // stores the edge of max total cut activity for reporting
    std::vector<EdgeCut> cuts;                          // crossings only, tangencies excluded
    std::vector<std::array<double, 2>> arc_intervals;   // theta ranges of Gamma inside the cell
    double area[2] = {0.0, 0.0};                        // |K ∩ Omega_i|
    double arc_len = 0.0;
    double exposure[4][2] = {{0, 0}, {0, 0}, {0, 0}, {0, 0}};  // edge length inside Omega_i
    bool assumption1_ok = true;

    bool in_subdomain(int i, double h) const { return area[i] > 1e-12 * h * h; }
};

/// Classify every cell against the interface. With strict=true an
/// Assumption (I) violation throws; otherwise it is recorded on the cell.
std::vector<CutCellGeometry> classify_elements(const Grid& g, const InterfaceCurve& curve,
                                               bool strict = true);

/// Areas |K ∩ Omega_1|, |K ∩ Omega_2| and interface arc length inside the
/// cell, by Green's-theorem quadrature over the curved region boundary.
void cut_measures(const Grid& g, const InterfaceCurve& curve, CutCellGeometry& geom);

struct AssumptionReport {
    bool a1_ok = true;
    std::vector<int> a1_failures;  // cell ids
    bool a2_ok = true;
    int a2_samples = 0;
    std::vector<int> a2_failures;  // sample indices
    double kappa_max = 0.0;
    double t = 0.0;       // kappa_max * h
    double T_of_t = 0.0;  // admissibility value
    double threshold = 0.0;  // 1 - 2*delta
    bool a3_ok = true;
    bool pass() const { return a1_ok && a2_ok && a3_ok; }
};

/// T(t) = 30 t (t+2) / (100 t + 63).
double admissibility(double t);
/// Largest t with t <= 1 and T(t) <= 1 - 2*delta.
double assumption3_threshold(double delta);

AssumptionReport check_assumptions(const Grid& g, const InterfaceCurve& curve, double delta,
                                   const std::vector<CutCellGeometry>& geoms);

}  // namespace uipdg
