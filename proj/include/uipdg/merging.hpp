#pragma once

#include <array>
#include <string>
#include <vector>

#include "uipdg/mesh.hpp"

namespace uipdg {

struct SmallSet {
    int subdomain = 0;  // 0 for Omega1, 1 for Omega2
    double delta = 0.0;
    std::vector<int> cells;
    bool contains(int cell) const {
        return std::find(cells.begin(), cells.end(), cell) != cells.end();
    }
};

/// Rectangular union of 1-4 background cells with enough area inside its
/// subdomain.
struct MacroElement {
    int id = -1;
    int subdomain = 0;
    std::vector<int> cells;  // constituent background cells, ascending
    int i0 = 0, j0 = 0, i1 = 0, j1 = 0;  // inclusive cell-index bounds
    Rect bbox;
    double measure_in = 0.0;  // |M ∩ Omega_i|

    int cell_count() const { return (i1 - i0 + 1) * (j1 - j0 + 1); }
    double diameter() const { return std::hypot(bbox.width(), bbox.height()); }
};

struct MergedMesh {
    Grid grid;
    double delta = 0.0;
    // per subdomain: cell -> index into macros[i], or -1 when the cell stands alone
    std::array<std::vector<int>, 2> macro_of;
    std::array<std::vector<MacroElement>, 2> macros;

    bool is_merged(int i, int cell) const { return macro_of[i][cell] >= 0; }
    /// Canonical text encoding, for determinism checks and reports.
    std::string canonical_encoding() const;
};

struct MergeValidation {
    bool disjoint = true;
    bool diameters_ok = true;      // diam M <= 2*sqrt(2)*h
    bool largeness_ok = true;      // |M ∩ Omega_i| >= delta |M|
    bool coverage_ok = true;
    bool cardinality_ok = true;    // <= 4 constituent cells
    std::vector<std::string> issues;
    bool pass() const {
        return disjoint && diameters_ok && largeness_ok && coverage_ok && cardinality_ok;
    }
};

std::array<SmallSet, 2> find_small(const std::vector<CutCellGeometry>& geoms, double delta,
                                   double h);

/// Merge partner for a small element: the edge-neighbor across the edge with
/// the longest cut segment inside Omega_i (the unique hugged edge for type-1
/// cuts, the |AC| >= |BC| side for type-2 corner cuts, falling back to the
/// shorter side when the preferred neighbor is itself small). Ties break
/// toward the smaller neighbor index.
int select_neighbor(int cell, int subdomain, const std::vector<CutCellGeometry>& geoms,
                    const Grid& g, double delta);

MergedMesh run_merge(const Grid& g, const std::vector<CutCellGeometry>& geoms,
                     const std::array<SmallSet, 2>& small_sets);

MergeValidation validate_merge(const MergedMesh& merged, const std::vector<CutCellGeometry>& geoms,
                               double delta);

}  // namespace uipdg
