#pragma once

#include <vector>

#include "uipdg/common.hpp"

namespace uipdg {

class InterfaceCurve;
struct CutCellGeometry;
struct Grid;
struct Face;

struct GaussNode {
    double x = 0.0;  // on [0,1]
    double w = 0.0;
};

/// Gauss-Legendre nodes/weights on [0,1]; cached per order.
const std::vector<GaussNode>& gauss_legendre(int order);

struct QPoint {
    Vec2 x;
    double w = 0.0;
    Vec2 normal;  // unit normal for interface/face rules, zero otherwise
};
using QuadRule = std::vector<QPoint>;

/// Tensor Gauss rule with order^2 points, exact for Q_{2*order-1}.
QuadRule gauss_tensor(const Rect& cell, int order);

/// Rule over K ∩ Omega_i (region index 0 or 1). Curved sub-regions are
/// decomposed into trapezoids with one curved side, mapped to the reference
/// square through the arc's graph parametrization. Returns an empty rule for
/// vanishing regions.
QuadRule cut_volume_rule(const Grid& g, const CutCellGeometry& geom, const InterfaceCurve& curve,
                         int region, int order);

/// Rule on Gamma ∩ K with normals pointing out of Omega1.
QuadRule interface_rule(const CutCellGeometry& geom, const InterfaceCurve& curve, int order);

/// Rule on e ∩ Omega_i for a grid face, carrying the face normal
/// (oriented from the lower-indexed to the higher-indexed cell).
QuadRule face_rule(const Face& face, const InterfaceCurve& curve, int region, int order);
QuadRule face_rule_full(const Face& face, int order);

}  // namespace uipdg
