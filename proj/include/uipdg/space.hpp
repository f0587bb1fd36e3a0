#pragma once

#include <Eigen/SparseCore>
#include <array>
#include <vector>

#include "uipdg/merging.hpp"

namespace uipdg {

using SpMat = Eigen::SparseMatrix<double>;

/// Tensor-product Lagrange basis on Gauss-Lobatto points for one cell.
/// Local dof ordering: a*(p+1)+b for node (x_a, y_b).
struct LocalBasis {
    int p = 1;
    Rect cell;

    int ndofs() const { return (p + 1) * (p + 1); }
    double value(int dof, const Vec2& x) const;
    Vec2 gradient(int dof, const Vec2& x) const;
    /// Node coordinates of local dof.
    Vec2 node(int dof) const;
};

/// 1D Gauss-Lobatto nodes on [0,1] for degree p (p+1 nodes).
const std::vector<double>& lobatto_nodes(int p);

/// Degrees of freedom for the doubled-unknown DG-FE pair of spaces.
///
/// Two numberings coexist: the merged system (macro polynomials on merged
/// rectangles, stitched continuous unknowns elsewhere) of dimension N, and
/// the unmerged system (independent Q_p blocks on every merged cell) of
/// dimension Ntilde. Homogeneous boundary nodes are eliminated from both.
struct DofMap {
    Grid grid;
    const MergedMesh* merged = nullptr;
    int p = 1;

    std::array<std::vector<char>, 2> in_subdomain;  // per cell: carries dofs for comp i

    // merged numbering
    int N = 0;
    std::array<std::vector<int>, 2> node_gid;    // lattice node -> gid, -1 absent, -2 boundary
    std::array<std::vector<int>, 2> macro_gid0;  // macro -> first gid of its (p+1)^2 block

    // unmerged numbering
    int Ntilde = 0;
    std::array<std::vector<int>, 2> tnode_gid;
    std::array<std::vector<int>, 2> cell_tgid0;  // merged cell -> first unmerged gid, else -1

    int nodes_per_axis() const { return grid.n * p + 1; }
    int lattice_id(int kx, int ky) const { return ky * nodes_per_axis() + kx; }
    bool lattice_on_boundary(int kx, int ky) const {
        const int m = nodes_per_axis() - 1;
        return kx == 0 || ky == 0 || kx == m || ky == m;
    }

    bool cell_merged(int i, int cell) const { return merged->macro_of[i][cell] >= 0; }

    /// Unmerged-system global dofs of (component, cell), local ordering of
    /// LocalBasis; -1 marks eliminated boundary nodes.
    std::vector<int> cell_dofs_unmerged(int i, int cell) const;
    /// Merged-system dofs of an unmerged cell (stitched nodes).
    std::vector<int> cell_dofs_merged_unm(int i, int cell) const;

    LocalBasis cell_basis(int cell) const { return LocalBasis{p, grid.cell_rect(cell)}; }
    LocalBasis macro_basis(int i, int macro) const {
        return LocalBasis{p, merged->macros[i][macro].bbox};
    }
};

DofMap build_spaces(const MergedMesh& merged, const std::vector<CutCellGeometry>& geoms, int p);

/// Interpolation matrix B with v_tilde = B v: unit rows on stitched nodes,
/// macro-polynomial evaluations at constituent nodes on merged cells.
SpMat build_merge_operator(const DofMap& dofmap);

struct DgFace {
    int subdomain = 0;
    int cell_lo = -1;  // owner side (jump = lo - hi, normal points lo -> hi)
    int cell_hi = -1;  // -1 when the face lies on the outer boundary
    Vec2 a, b;
    Vec2 normal;  // unit, from cell_lo toward cell_hi (outward on the boundary)
    int key = -1;  // deterministic ordering/dedup key
};

/// Faces of merged macro boundaries with nonempty Omega_i part. Boundary
/// faces of macros carry cell_hi = -1 and enforce the homogeneous Dirichlet
/// condition through the Nitsche terms.
std::vector<DgFace> enumerate_dg_faces(const MergedMesh& merged,
                                       const std::vector<CutCellGeometry>& geoms, int subdomain);

}  // namespace uipdg
