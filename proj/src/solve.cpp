#include "uipdg/solve.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <random>

#include "uipdg/quadrature.hpp"

namespace uipdg {

namespace {

Eigen::VectorXd pcg_jacobi(const SpMat& A, const Eigen::VectorXd& F, double tol, int maxit) {
    const int n = int(A.rows());
    Eigen::VectorXd dinv(n);
    for (int k = 0; k < n; ++k) {
        const double d = A.coeff(k, k);
        if (!(d > 0.0)) throw IndefiniteDetected("nonpositive diagonal entry at row " +
                                                 std::to_string(k));
        dinv[k] = 1.0 / d;
    }
    const double fnorm = F.norm();
    if (fnorm == 0.0) return Eigen::VectorXd::Zero(n);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r = F;
    Eigen::VectorXd z = dinv.asDiagonal() * r;
    Eigen::VectorXd d = z;
    double rz = r.dot(z);
    for (int it = 0; it < maxit; ++it) {
        const Eigen::VectorXd Ad = A * d;
        const double dAd = d.dot(Ad);
        if (!(dAd > 0.0))
            throw IndefiniteDetected("conjugate-gradient breakdown: d^T A d = " + format_full(dAd));
        const double a = rz / dAd;
        x += a * d;
        r -= a * Ad;
        if (r.norm() <= tol * fnorm) return x;
        z = dinv.asDiagonal() * r;
        const double rz_new = r.dot(z);
        d = z + (rz_new / rz) * d;
        rz = rz_new;
    }
    throw NotConverged(maxit, (F - A * x).norm() / fnorm,
                       "conjugate gradient did not reach the residual target");
}

}  // namespace

Eigen::VectorXd solve(const SparseSymmetricSystem& system, const SolveConfig& config) {
    if (!(config.tol > 0.0 && config.tol < 1.0)) throw ConfigError("solve: tolerance in (0,1)");
    Eigen::VectorXd u;
    switch (config.method) {
        case SolveConfig::Method::PCG:
            u = pcg_jacobi(system.A, system.F, 0.5 * config.tol, config.max_iterations);
            break;
        case SolveConfig::Method::SparseLDLT: {
            Eigen::SimplicialLDLT<SpMat> ldlt(system.A);
            if (ldlt.info() != Eigen::Success)
                throw NotConverged(0, 0.0, "sparse LDLT factorization failed");
            u = ldlt.solve(system.F);
            u += ldlt.solve(system.F - system.A * u);  // one refinement step
            break;
        }
        case SolveConfig::Method::Dense: {
            if (system.N > 5000)
                throw ConfigError("dense solver refuses N > 5000 (N = " +
                                  std::to_string(system.N) + ")");
            Eigen::MatrixXd Ad(system.A);
            const auto ldlt = Ad.ldlt();
            u = ldlt.solve(system.F);
            u += ldlt.solve(system.F - system.A * u);
            break;
        }
    }
    const double fnorm = system.F.norm();
    if (fnorm > 0.0) {
        const double res = (system.A * u - system.F).norm() / fnorm;
        if (res > config.tol)
            throw NotConverged(0, res, "post-hoc residual check failed: " + format_full(res));
    }
    return u;
}

double estimate_condition(const SpMat& A) {
    const int n = int(A.rows());
    if (n == 0) throw ConfigError("estimate_condition: empty matrix");
    if (n == 1) return 1.0;

    std::mt19937_64 rng(0x5eed5eedULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_unit = [&](int m) {
        Eigen::VectorXd v(m);
        for (int k = 0; k < m; ++k) v[k] = gauss(rng);
        v.normalize();
        return v;
    };

    // largest eigenvalue: Lanczos with full reorthogonalization
    const int mmax = std::min(n, 400);
    std::vector<Eigen::VectorXd> V;
    std::vector<double> alpha, beta;
    Eigen::VectorXd v = random_unit(n);
    V.push_back(v);
    Eigen::VectorXd w;
    double lambda_max = 0.0, prev = -1.0;
    for (int j = 0; j < mmax; ++j) {
        w = A * V[j];
        const double a = V[j].dot(w);
        alpha.push_back(a);
        w -= a * V[j];
        if (j > 0) w -= beta[j - 1] * V[j - 1];
        for (const auto& q : V) w -= q.dot(w) * q;  // reorthogonalize
        const double b = w.norm();
        // Ritz values of the tridiagonal section
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(j + 1, j + 1);
        for (int k = 0; k <= j; ++k) {
            T(k, k) = alpha[k];
            if (k > 0) T(k, k - 1) = T(k - 1, k) = beta[k - 1];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        lambda_max = es.eigenvalues().maxCoeff();
        if (j >= 8 && std::abs(lambda_max - prev) < 1e-4 * std::abs(lambda_max)) break;
        prev = lambda_max;
        if (b < 1e-13 * std::abs(lambda_max)) break;
        beta.push_back(b);
        V.push_back(w / b);
    }

    // smallest eigenvalue: inverse iteration through a sparse factorization
    Eigen::SimplicialLDLT<SpMat> ldlt(A);
    if (ldlt.info() != Eigen::Success)
        throw NotConverged(0, 0.0, "estimate_condition: factorization failed (matrix not SPD?)");
    Eigen::VectorXd x = random_unit(n);
    double lambda_min = 0.0, prev_min = -1.0;
    for (int it = 0; it < 400; ++it) {
        x = ldlt.solve(x);
        x.normalize();
        lambda_min = x.dot(A * x);
        if (it >= 4 && std::abs(lambda_min - prev_min) < 1e-4 * std::abs(lambda_min)) break;
        prev_min = lambda_min;
    }
    if (!(lambda_min > 0.0))
        throw IndefiniteDetected("estimate_condition: nonpositive smallest eigenvalue");
    return lambda_max / lambda_min;
}

SolutionField make_solution_field(const DofMap& dm, const SpMat& B, const Eigen::VectorXd& u) {
    SolutionField f;
    f.dm = &dm;
    f.merged = u;
    f.unmerged = B * u;
    return f;
}

double SolutionField::value(const Vec2& x, int comp) const {
    const Grid& g = dm->grid;
    if (!g.domain.contains(x, 1e-12)) throw OutOfDomain("evaluation point outside the domain");
    const int cell = g.locate(x);
    const std::vector<int> dofs = dm->cell_dofs_unmerged(comp, cell);
    const LocalBasis basis = dm->cell_basis(cell);
    double v = 0.0;
    for (int k = 0; k < basis.ndofs(); ++k)
        if (dofs[k] >= 0) v += unmerged[dofs[k]] * basis.value(k, x);
    return v;
}

Vec2 SolutionField::gradient(const Vec2& x, int comp) const {
    const Grid& g = dm->grid;
    if (!g.domain.contains(x, 1e-12)) throw OutOfDomain("evaluation point outside the domain");
    const int cell = g.locate(x);
    const std::vector<int> dofs = dm->cell_dofs_unmerged(comp, cell);
    const LocalBasis basis = dm->cell_basis(cell);
    Vec2 grad;
    for (int k = 0; k < basis.ndofs(); ++k)
        if (dofs[k] >= 0) grad = grad + unmerged[dofs[k]] * basis.gradient(k, x);
    return grad;
}

ErrorReport compute_errors(const Grid& g, const std::vector<CutCellGeometry>& geoms,
                           const InterfaceCurve& curve, const DofMap& dm,
                           const ProblemData& problem, const SolutionField& field,
                           int quad_order) {
    if (!problem.has_exact) throw Error("compute_errors: problem carries no exact solution");
    ErrorReport rep;
    rep.h = g.h;
    rep.p = dm.p;
    rep.N = dm.N;
    rep.alpha1 = problem.alpha[0];
    rep.alpha2 = problem.alpha[1];

    double e_en = 0.0, e_l2 = 0.0, e_fx = 0.0, n_en = 0.0, n_l2 = 0.0, n_fx = 0.0;
    for (int cell = 0; cell < g.num_cells(); ++cell) {
        const auto& geom = geoms[cell];
        const LocalBasis basis = dm.cell_basis(cell);
        for (int i = 0; i < 2; ++i) {
            if (geom.tag != CellTag::Interface &&
                (geom.tag == CellTag::Interior1) != (i == 0))
                continue;
            const QuadRule rule = cut_volume_rule(g, geom, curve, i, quad_order);
            if (rule.empty()) continue;
            const std::vector<int> dofs = dm.cell_dofs_unmerged(i, cell);
            const double a = problem.alpha[i];
            for (const auto& qp : rule) {
                double uh = 0.0;
                Vec2 guh;
                for (int k = 0; k < basis.ndofs(); ++k) {
                    if (dofs[k] < 0) continue;
                    const double c = field.unmerged[dofs[k]];
                    uh += c * basis.value(k, qp.x);
                    guh = guh + c * basis.gradient(k, qp.x);
                }
                const double ue = problem.exact[i](qp.x);
                const Vec2 gue = problem.exact_grad[i](qp.x);
                const Vec2 de = guh - gue;
                e_en += qp.w * a * de.dot(de);
                e_l2 += qp.w * (uh - ue) * (uh - ue);
                e_fx += qp.w * a * a * de.dot(de);
                n_en += qp.w * a * gue.dot(gue);
                n_l2 += qp.w * ue * ue;
                n_fx += qp.w * a * a * gue.dot(gue);
            }
        }
    }
    rep.err_energy = std::sqrt(e_en);
    rep.err_l2 = std::sqrt(e_l2);
    rep.err_flux = std::sqrt(e_fx);
    rep.norm_energy = std::sqrt(n_en);
    rep.norm_l2 = std::sqrt(n_l2);
    rep.norm_flux = std::sqrt(n_fx);
    return rep;
}

}  // namespace uipdg
