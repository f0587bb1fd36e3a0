#include "uipdg/experiment.hpp"

#include <algorithm>
#include <cmath>

namespace uipdg {

CurveSpec flower_curve() {
    CurveSpec spec;
    spec.kind = CurveSpec::Kind::Polar;
    spec.center = {0.5, 0.5};
    spec.r0 = 0.25;
    spec.terms = {{1.0 / 14.0, 5.0, 0.0}};
    return spec;
}

void ExperimentConfig::validate() const {
    if (mesh_sizes.empty()) throw ConfigError("config: mesh size list is empty");
    for (int n : mesh_sizes)
        if (n < 2) throw ConfigError("config: mesh sizes must be >= 2");
    if (p < 1 || p > 3) throw ConfigError("config: p must be 1, 2 or 3");
    if (!(gamma > 0.0)) throw ConfigError("config: gamma must be positive");
    if (!(delta > 0.0 && delta < 0.5)) throw ConfigError("config: delta must be in (0, 1/2)");
    if (!(alpha1 > 0.0 && alpha2 > 0.0)) throw ConfigError("config: coefficients must be positive");
    if (!(solver.tol > 0.0 && solver.tol < 1.0)) throw ConfigError("config: solver tol in (0,1)");
    if (quad_offset < 1) throw ConfigError("config: quadrature offset must be >= 1");
    const double w = domain.width(), h = domain.height();
    if (!(w > 0.0) || std::abs(w - h) > 1e-12 * w) throw ConfigError("config: domain must be square");
}

InterfaceCurve make_curve(const CurveSpec& spec, const Rect& domain) {
    const double eps = 1e-12 * std::hypot(domain.width(), domain.height());
    if (spec.absent) {
        const Vec2 far{domain.x1 + 10.0 * domain.width(), domain.y1 + 10.0 * domain.height()};
        return InterfaceCurve::polar(far, 0.25 * domain.width(), {}, eps);
    }
    if (spec.kind == CurveSpec::Kind::Ellipse)
        return InterfaceCurve::ellipse(spec.center, spec.semi_x, spec.semi_y, eps);
    return InterfaceCurve::polar(spec.center, spec.r0, spec.terms, eps);
}

RunResult run_single(const ExperimentConfig& cfg, int n) {
    cfg.validate();
    RunResult out;
    out.n = n;

    const Grid grid = build_grid(cfg.domain, n);
    out.h = grid.h;
    const InterfaceCurve curve = make_curve(cfg.curve, cfg.domain);
    const auto geoms = classify_elements(grid, curve, cfg.strict);

    const auto small_sets = find_small(geoms, cfg.delta, grid.h);
    const MergedMesh merged = run_merge(grid, geoms, small_sets);
    out.merge_validation = validate_merge(merged, geoms, cfg.delta);
    // a macro whose Omega_i fraction falls short of delta is recorded but not
    // fatal (coarse meshes produce them); structural defects abort
    const auto& mv = out.merge_validation;
    if (cfg.strict && !(mv.disjoint && mv.diameters_ok && mv.cardinality_ok && mv.coverage_ok))
        throw Error("merge validation failed: " +
                    (mv.issues.empty() ? std::string("unknown issue") : mv.issues.front()));
    out.macro_count[0] = int(merged.macros[0].size());
    out.macro_count[1] = int(merged.macros[1].size());

    const DofMap dm = build_spaces(merged, geoms, cfg.p);
    out.N = dm.N;
    const SpMat B = build_merge_operator(dm);

    const ProblemData problem = manufactured_problem(cfg.example, cfg.alpha1, cfg.alpha2);
    PenaltyConfig pen;
    pen.gamma = cfg.gamma;
    pen.beta = cfg.beta;
    pen.harmonic_weights = cfg.harmonic_weights;

    const int q = cfg.p + cfg.quad_offset;
    const UnmergedSystem unm = assemble_unmerged(grid, geoms, curve, dm, problem, pen, q);
    const SparseSymmetricSystem sys = reduce_system(unm.A, unm.F, B);

    const Eigen::VectorXd u = solve(sys, cfg.solver);
    const SolutionField field = make_solution_field(dm, B, u);
    out.err = compute_errors(grid, geoms, curve, dm, problem, field, q);
    if (cfg.with_condition) {
        out.cond = estimate_condition(sys.A);
        out.err.cond = out.cond;
    }
    return out;
}

std::vector<ConvergenceRow> convergence_study(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.mesh_sizes.size() < 2)
        throw ConfigError("convergence study needs at least two mesh levels");
    std::vector<int> ns = cfg.mesh_sizes;
    std::sort(ns.begin(), ns.end());
    std::vector<ConvergenceRow> rows;
    for (int n : ns) {
        ConvergenceRow row;
        row.run = run_single(cfg, n);
        if (!rows.empty()) {
            const auto& prev = rows.back().run.err;
            const double lh = std::log2(double(n) / rows.back().run.n);
            row.rate_energy = std::log2(prev.rel_energy() / row.run.err.rel_energy()) / lh;
            row.rate_l2 = std::log2(prev.rel_l2() / row.run.err.rel_l2()) / lh;
            row.rate_flux = std::log2(prev.rel_flux() / row.run.err.rel_flux()) / lh;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<std::pair<double, double>> default_contrast_pairs() {
    return {{1e6, 1.0}, {1e4, 1.0}, {1e2, 1.0}, {1.0, 1.0},
            {1.0, 1e2}, {1.0, 1e4}, {1.0, 1e6}, {1.0, 1e8}};
}

std::vector<SweepRow> sweep_contrast(const ExperimentConfig& cfg,
                                     const std::vector<std::pair<double, double>>& pairs) {
    cfg.validate();
    if (pairs.empty()) throw ConfigError("sweep_contrast: empty coefficient list");
    std::vector<SweepRow> rows;
    for (const auto& [a1, a2] : pairs) {
        ExperimentConfig c = cfg;
        c.alpha1 = a1;
        c.alpha2 = a2;
        SweepRow row;
        row.alpha1 = a1;
        row.alpha2 = a2;
        row.run = run_single(c, cfg.mesh_sizes.front());
        rows.push_back(std::move(row));
    }
    return rows;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("loglog_slope: need >= 2 points");
    const int m = int(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int k = 0; k < m; ++k) {
        const double lx = std::log10(x[k]), ly = std::log10(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace uipdg
