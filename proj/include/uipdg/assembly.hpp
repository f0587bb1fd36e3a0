#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <functional>
#include <string>

#include "uipdg/space.hpp"

namespace uipdg {

using ScalarField = std::function<double(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;
/// Neumann-type interface data evaluated at a point with the Omega1-outward normal.
using FluxField = std::function<double(const Vec2&, const Vec2&)>;

struct ProblemData {
    double alpha[2] = {1.0, 1.0};
    ScalarField f[2];
    ScalarField g_dirichlet;  // [u] on Gamma
    FluxField g_neumann;      // [alpha grad u . n] on Gamma

    bool has_exact = false;
    ScalarField exact[2];
    VectorField exact_grad[2];
};

/// gamma, beta and the interface averaging weights of the Nitsche terms.
/// DG coupling faces always use arithmetic weights.
struct PenaltyConfig {
    double gamma = 100.0;
    double beta = 1.0;
    bool harmonic_weights = true;

    void interface_weights(double a1, double a2, double& w1, double& w2) const {
        if (harmonic_weights) {
            w1 = a2 / (a1 + a2);
            w2 = a1 / (a1 + a2);
        } else {
            w1 = w2 = 0.5;
        }
    }
};

struct SparseSymmetricSystem {
    SpMat A;
    Eigen::VectorXd F;
    int N = 0;
};

struct UnmergedSystem {
    SpMat A;
    Eigen::VectorXd F;
};

UnmergedSystem assemble_unmerged(const Grid& g, const std::vector<CutCellGeometry>& geoms,
                                 const InterfaceCurve& curve, const DofMap& dm,
                                 const ProblemData& problem, const PenaltyConfig& pen,
                                 int quad_order);

SparseSymmetricSystem reduce_system(const SpMat& Atilde, const Eigen::VectorXd& Ftilde,
                                    const SpMat& B);

/// Piecewise-smooth manufactured problems. "flower", "circle" and "straight"
/// share the exponential/trigonometric pair whose data is prescribed on
/// whatever interface the configuration carries; "patch" is a global
/// biquadratic with zero interface jumps; "trig" is the plain
/// sin(pi x) sin(pi y) source problem.
ProblemData manufactured_problem(const std::string& id, double alpha1, double alpha2);

void export_coordinate_format(const SpMat& A, const std::string& path);

}  // namespace uipdg
