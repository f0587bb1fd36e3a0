#include "uipdg/assembly.hpp"

#include <fstream>

#include "uipdg/quadrature.hpp"

namespace uipdg {

namespace {

using Trip = Eigen::Triplet<double>;

struct BasisTable {
    std::vector<double> val;   // [dof * npts + q]
    std::vector<Vec2> grad;
    int nd = 0, npts = 0;

    BasisTable(const LocalBasis& b, const QuadRule& rule) {
        nd = b.ndofs();
        npts = int(rule.size());
        val.resize(size_t(nd) * npts);
        grad.resize(size_t(nd) * npts);
        for (int a = 0; a < nd; ++a)
            for (int q = 0; q < npts; ++q) {
                val[size_t(a) * npts + q] = b.value(a, rule[q].x);
                grad[size_t(a) * npts + q] = b.gradient(a, rule[q].x);
            }
    }
    double v(int a, int q) const { return val[size_t(a) * npts + q]; }
    const Vec2& gr(int a, int q) const { return grad[size_t(a) * npts + q]; }
};

void scatter(std::vector<Trip>& trip, const std::vector<int>& rows, const std::vector<int>& cols,
             const Eigen::MatrixXd& local) {
    for (int r = 0; r < local.rows(); ++r) {
        if (rows[r] < 0) continue;
        for (int c = 0; c < local.cols(); ++c) {
            if (cols[c] < 0) continue;
            const double v = local(r, c);
            if (v != 0.0) trip.emplace_back(rows[r], cols[c], v);
        }
    }
}

void scatter_vec(Eigen::VectorXd& F, const std::vector<int>& rows, const Eigen::VectorXd& local) {
    for (int r = 0; r < local.size(); ++r)
        if (rows[r] >= 0) F[rows[r]] += local[r];
}

}  // namespace

UnmergedSystem assemble_unmerged(const Grid& g, const std::vector<CutCellGeometry>& geoms,
                                 const InterfaceCurve& curve, const DofMap& dm,
                                 const ProblemData& problem, const PenaltyConfig& pen,
                                 int quad_order) {
    const int p = dm.p, nd = (p + 1) * (p + 1);
    const double h = g.h;
    std::vector<Trip> trip;
    Eigen::VectorXd F = Eigen::VectorXd::Zero(dm.Ntilde);

    // reference stiffness for uncut cells (translation invariant on a uniform grid)
    const LocalBasis ref_basis{p, Rect{0.0, 0.0, h, h}};
    const QuadRule ref_rule = gauss_tensor(ref_basis.cell, quad_order);
    const BasisTable ref_tab(ref_basis, ref_rule);
    Eigen::MatrixXd ref_stiff = Eigen::MatrixXd::Zero(nd, nd);
    for (int q = 0; q < ref_tab.npts; ++q)
        for (int a = 0; a < nd; ++a)
            for (int b = 0; b < nd; ++b)
                ref_stiff(a, b) += ref_rule[q].w * ref_tab.gr(a, q).dot(ref_tab.gr(b, q));

    // volume terms
    for (int cell = 0; cell < g.num_cells(); ++cell) {
        const auto& geom = geoms[cell];
        const Rect rect = g.cell_rect(cell);
        for (int i = 0; i < 2; ++i) {
            if (!dm.in_subdomain[i][cell]) continue;
            const std::vector<int> dofs = dm.cell_dofs_unmerged(i, cell);
            const double ai = problem.alpha[i];
            if (geom.tag != CellTag::Interface) {
                // full cell: reuse the reference stiffness
                Eigen::MatrixXd local = ai * ref_stiff;
                scatter(trip, dofs, dofs, local);
                Eigen::VectorXd lf = Eigen::VectorXd::Zero(nd);
                for (int q = 0; q < ref_tab.npts; ++q) {
                    const Vec2 x{rect.x0 + ref_rule[q].x.x, rect.y0 + ref_rule[q].x.y};
                    const double fw = ref_rule[q].w * problem.f[i](x);
                    for (int a = 0; a < nd; ++a) lf[a] += fw * ref_tab.v(a, q);
                }
                scatter_vec(F, dofs, lf);
                continue;
            }
            const QuadRule rule = cut_volume_rule(g, geom, curve, i, quad_order);
            if (rule.empty()) continue;
            const LocalBasis basis = dm.cell_basis(cell);
            const BasisTable tab(basis, rule);
            Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nd, nd);
            Eigen::VectorXd lf = Eigen::VectorXd::Zero(nd);
            for (int q = 0; q < tab.npts; ++q) {
                const double w = rule[q].w;
                const double fw = w * problem.f[i](rule[q].x);
                for (int a = 0; a < nd; ++a) {
                    lf[a] += fw * tab.v(a, q);
                    for (int b = 0; b < nd; ++b)
                        local(a, b) += ai * w * tab.gr(a, q).dot(tab.gr(b, q));
                }
            }
            scatter(trip, dofs, dofs, local);
            scatter_vec(F, dofs, lf);
        }
    }

    // interface terms on Gamma ∩ K, doubled unknowns of the same cell
    double w1, w2;
    pen.interface_weights(problem.alpha[0], problem.alpha[1], w1, w2);
    const double aw = w1 * problem.alpha[0] + w2 * problem.alpha[1];
    for (int cell = 0; cell < g.num_cells(); ++cell) {
        const auto& geom = geoms[cell];
        if (geom.tag != CellTag::Interface || geom.arc_intervals.empty()) continue;
        const QuadRule rule = interface_rule(geom, curve, quad_order);
        if (rule.empty()) continue;
        std::vector<int> dofs = dm.cell_dofs_unmerged(0, cell);
        {
            const std::vector<int> d2 = dm.cell_dofs_unmerged(1, cell);
            dofs.insert(dofs.end(), d2.begin(), d2.end());
        }
        bool side_missing = true;
        for (int k = 0; k < nd; ++k)
            if (dofs[k] >= 0) side_missing = false;
        bool side2_missing = true;
        for (int k = nd; k < 2 * nd; ++k)
            if (dofs[k] >= 0) side2_missing = false;
        if (side_missing || side2_missing)
            throw MissingQuadrature("interface element " + std::to_string(cell) +
                                    " lacks unknowns on one side");

        const LocalBasis basis = dm.cell_basis(cell);
        const BasisTable tab(basis, rule);
        const double sgn[2] = {1.0, -1.0};        // jump [v] = v1 - v2
        const double wside[2] = {w1, w2};
        const double aside[2] = {problem.alpha[0], problem.alpha[1]};
        Eigen::MatrixXd local = Eigen::MatrixXd::Zero(2 * nd, 2 * nd);
        Eigen::VectorXd lf = Eigen::VectorXd::Zero(2 * nd);
        const double pw[2] = {w2, w1};            // skew average {v}^w = w2 v1 + w1 v2
        for (int q = 0; q < tab.npts; ++q) {
            const double w = rule[q].w;
            const Vec2& n = rule[q].normal;
            const double gd = problem.g_dirichlet ? problem.g_dirichlet(rule[q].x) : 0.0;
            const double gn = problem.g_neumann ? problem.g_neumann(rule[q].x, n) : 0.0;
            for (int sv = 0; sv < 2; ++sv)
                for (int av = 0; av < nd; ++av) {
                    const int r = sv * nd + av;
                    const double jv = sgn[sv] * tab.v(av, q);
                    const double fv = wside[sv] * aside[sv] * tab.gr(av, q).dot(n);
                    lf[r] += w * (gn * pw[sv] * tab.v(av, q) - pen.beta * gd * fv +
                                  pen.gamma * aw / h * gd * jv);
                    for (int su = 0; su < 2; ++su)
                        for (int au = 0; au < nd; ++au) {
                            const int c = su * nd + au;
                            const double ju = sgn[su] * tab.v(au, q);
                            const double fu = wside[su] * aside[su] * tab.gr(au, q).dot(n);
                            local(r, c) +=
                                w * (pen.gamma * aw / h * ju * jv - fu * jv - pen.beta * ju * fv);
                        }
                }
        }
        scatter(trip, dofs, dofs, local);
        scatter_vec(F, dofs, lf);
    }

    // interior-penalty terms on merged macro boundaries, arithmetic weights;
    // boundary faces of macros take the one-sided Nitsche form with weight 1
    for (int i = 0; i < 2; ++i) {
        const double ai = problem.alpha[i];
        for (const auto& df : enumerate_dg_faces(*dm.merged, geoms, i)) {
            Face face;
            face.a = df.a;
            face.b = df.b;
            face.normal = df.normal;
            const bool boundary = df.cell_hi < 0;
            const bool cut = geoms[df.cell_lo].tag == CellTag::Interface ||
                             (!boundary && geoms[df.cell_hi].tag == CellTag::Interface);
            const QuadRule rule =
                cut ? face_rule(face, curve, i, quad_order) : face_rule_full(face, quad_order);
            if (rule.empty()) continue;
            const int nsides = boundary ? 1 : 2;
            std::vector<int> dofs = dm.cell_dofs_unmerged(i, df.cell_lo);
            if (!boundary) {
                const std::vector<int> dhi = dm.cell_dofs_unmerged(i, df.cell_hi);
                dofs.insert(dofs.end(), dhi.begin(), dhi.end());
            }
            const BasisTable tlo(dm.cell_basis(df.cell_lo), rule);
            const BasisTable thi(dm.cell_basis(boundary ? df.cell_lo : df.cell_hi), rule);
            const double sgn[2] = {1.0, -1.0};  // jump = lo - hi, normal lo -> hi
            const double avg = boundary ? 1.0 : 0.5;
            Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nsides * nd, nsides * nd);
            for (int q = 0; q < int(rule.size()); ++q) {
                const double w = rule[q].w;
                const Vec2& n = rule[q].normal;
                for (int sv = 0; sv < nsides; ++sv)
                    for (int av = 0; av < nd; ++av) {
                        const int r = sv * nd + av;
                        const BasisTable& tv = sv == 0 ? tlo : thi;
                        const double jv = sgn[sv] * tv.v(av, q);
                        const double fv = avg * ai * tv.gr(av, q).dot(n);
                        for (int su = 0; su < nsides; ++su)
                            for (int au = 0; au < nd; ++au) {
                                const int c = su * nd + au;
                                const BasisTable& tu = su == 0 ? tlo : thi;
                                const double ju = sgn[su] * tu.v(au, q);
                                const double fu = avg * ai * tu.gr(au, q).dot(n);
                                local(r, c) += w * (pen.gamma * ai / h * ju * jv - fu * jv -
                                                    pen.beta * ju * fv);
                            }
                    }
            }
            scatter(trip, dofs, dofs, local);
        }
    }

    UnmergedSystem sys;
    sys.A = SpMat(dm.Ntilde, dm.Ntilde);
    sys.A.setFromTriplets(trip.begin(), trip.end());
    sys.A.makeCompressed();
    sys.F = std::move(F);
    return sys;
}

SparseSymmetricSystem reduce_system(const SpMat& Atilde, const Eigen::VectorXd& Ftilde,
                                    const SpMat& B) {
    if (Atilde.rows() != B.rows() || Ftilde.size() != B.rows())
        throw DimensionMismatch("reduce_system: incompatible dimensions");
    SparseSymmetricSystem sys;
    const SpMat Bt = B.transpose();
    sys.A = Bt * Atilde * B;
    sys.A.makeCompressed();
    sys.F = Bt * Ftilde;
    sys.N = int(B.cols());
    return sys;
}

ProblemData manufactured_problem(const std::string& id, double alpha1, double alpha2) {
    if (!(alpha1 > 0.0 && alpha2 > 0.0))
        throw ConfigError("manufactured_problem: coefficients must be positive");
    ProblemData pd;
    pd.alpha[0] = alpha1;
    pd.alpha[1] = alpha2;
    const double P = pi();

    if (id == "flower" || id == "circle" || id == "straight") {
        pd.exact[0] = [alpha1](const Vec2& x) { return std::exp(x.x * x.y) / alpha1; };
        pd.exact_grad[0] = [alpha1](const Vec2& x) {
            const double e = std::exp(x.x * x.y) / alpha1;
            return Vec2{x.y * e, x.x * e};
        };
        pd.exact[1] = [alpha2, P](const Vec2& x) {
            return std::sin(P * x.x) * std::sin(P * x.y) / alpha2;
        };
        pd.exact_grad[1] = [alpha2, P](const Vec2& x) {
            return Vec2{P * std::cos(P * x.x) * std::sin(P * x.y) / alpha2,
                        P * std::sin(P * x.x) * std::cos(P * x.y) / alpha2};
        };
        pd.f[0] = [](const Vec2& x) {
            return -(x.x * x.x + x.y * x.y) * std::exp(x.x * x.y);
        };
        pd.f[1] = [P](const Vec2& x) {
            return 2.0 * P * P * std::sin(P * x.x) * std::sin(P * x.y);
        };
    } else if (id == "patch") {
        auto u = [](const Vec2& x) { return x.x * (1.0 - x.x) * x.y * (1.0 - x.y); };
        auto du = [](const Vec2& x) {
            return Vec2{(1.0 - 2.0 * x.x) * x.y * (1.0 - x.y),
                        x.x * (1.0 - x.x) * (1.0 - 2.0 * x.y)};
        };
        for (int i = 0; i < 2; ++i) {
            const double a = pd.alpha[i];
            pd.exact[i] = u;
            pd.exact_grad[i] = du;
            pd.f[i] = [a](const Vec2& x) {
                return a * 2.0 * (x.x * (1.0 - x.x) + x.y * (1.0 - x.y));
            };
        }
    } else if (id == "trig") {
        auto u = [P](const Vec2& x) { return std::sin(P * x.x) * std::sin(P * x.y); };
        auto du = [P](const Vec2& x) {
            return Vec2{P * std::cos(P * x.x) * std::sin(P * x.y),
                        P * std::sin(P * x.x) * std::cos(P * x.y)};
        };
        for (int i = 0; i < 2; ++i) {
            const double a = pd.alpha[i];
            pd.exact[i] = u;
            pd.exact_grad[i] = du;
            pd.f[i] = [a, P, u](const Vec2& x) { return a * 2.0 * P * P * u(x); };
        }
    } else {
        throw UnknownExample("unknown manufactured problem '" + id + "'");
    }

    pd.has_exact = true;
    pd.g_dirichlet = [pd](const Vec2& x) { return pd.exact[0](x) - pd.exact[1](x); };
    pd.g_neumann = [pd](const Vec2& x, const Vec2& n) {
        return pd.alpha[0] * pd.exact_grad[0](x).dot(n) - pd.alpha[1] * pd.exact_grad[1](x).dot(n);
    };
    return pd;
}

void export_coordinate_format(const SpMat& A, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it)
            os << it.row() << " " << it.col() << " " << format_full(it.value()) << "\n";
}

}  // namespace uipdg
