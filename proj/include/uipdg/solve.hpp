#pragma once

#include <Eigen/Dense>

#include "uipdg/assembly.hpp"

namespace uipdg {

struct SolveConfig {
    enum class Method { PCG, SparseLDLT, Dense };
    Method method = Method::PCG;
    double tol = 1e-12;  // relative residual
    int max_iterations = 100000;
};

/// Solves A u = F. PCG uses a Jacobi preconditioner and reports CG breakdown
/// on indefinite matrices; the dense path refuses N > 5000. The residual
/// bound is re-verified on the returned vector.
Eigen::VectorXd solve(const SparseSymmetricSystem& system, const SolveConfig& config);

/// Spectral condition number of an SPD matrix: largest eigenvalue by Lanczos
/// iteration, smallest by inverse iteration on a sparse factorization.
double estimate_condition(const SpMat& A);

/// Discrete solution in both numbering systems; evaluation is element-local.
struct SolutionField {
    const DofMap* dm = nullptr;
    Eigen::VectorXd merged;    // coefficients in V_h
    Eigen::VectorXd unmerged;  // B * merged

    double value(const Vec2& x, int comp) const;
    Vec2 gradient(const Vec2& x, int comp) const;
};

SolutionField make_solution_field(const DofMap& dm, const SpMat& B, const Eigen::VectorXd& u);

struct ErrorReport {
    double err_energy = 0.0;  // || alpha^(1/2) grad (u - u_h) ||
    double err_l2 = 0.0;
    double err_flux = 0.0;    // || alpha grad (u - u_h) ||
    double norm_energy = 0.0;
    double norm_l2 = 0.0;
    double norm_flux = 0.0;
    double cond = 0.0;        // filled by the caller when requested
    int N = 0;
    double h = 0.0;
    int p = 0;
    double alpha1 = 1.0, alpha2 = 1.0;

    double rel_energy() const { return err_energy / norm_energy; }
    double rel_l2() const { return err_l2 / norm_l2; }
    double rel_flux() const { return err_flux / norm_flux; }
};

ErrorReport compute_errors(const Grid& g, const std::vector<CutCellGeometry>& geoms,
                           const InterfaceCurve& curve, const DofMap& dm,
                           const ProblemData& problem, const SolutionField& field,
                           int quad_order);

}  // namespace uipdg
