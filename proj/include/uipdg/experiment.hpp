#pragma once

#include <string>
#include <vector>

#include "uipdg/solve.hpp"

namespace uipdg {

struct CurveSpec {
    enum class Kind { Polar, Ellipse } kind = Kind::Polar;
    Vec2 center{0.5, 0.5};
    double r0 = 0.25;
    std::vector<RadialTerm> terms;
    double semi_x = 0.0, semi_y = 0.0;  // ellipse kind
    /// Unreachable interface: places the curve outside the domain so the
    /// whole domain classifies as Omega2 (classical single-material runs).
    bool absent = false;
};

CurveSpec flower_curve();  // R = 1/4 + (1/14) sin(5 theta) about (0.5, 0.5)

struct ExperimentConfig {
    Rect domain{0.0, 0.0, 1.0, 1.0};
    std::vector<int> mesh_sizes{16, 32, 64, 128};
    int p = 1;
    double gamma = 100.0;
    double beta = 1.0;
    double delta = 0.25;
    double alpha1 = 1000.0;
    double alpha2 = 1.0;
    CurveSpec curve = flower_curve();
    std::string example = "flower";
    bool harmonic_weights = true;
    SolveConfig solver;
    int quad_offset = 3;  // quadrature order = p + quad_offset
    unsigned long seed = 0;
    bool strict = true;
    bool with_condition = true;

    void validate() const;
};

InterfaceCurve make_curve(const CurveSpec& spec, const Rect& domain);

/// Everything a single mesh level produces.
struct RunResult {
    int n = 0;
    double h = 0.0;
    int N = 0;
    ErrorReport err;
    double cond = 0.0;
    MergeValidation merge_validation;
    AssumptionReport assumptions;           // only filled by `check`
    int macro_count[2] = {0, 0};
};

/// Classify, merge, assemble, reduce, solve and measure one level.
RunResult run_single(const ExperimentConfig& cfg, int n);

struct ConvergenceRow {
    RunResult run;
    double rate_energy = 0.0;  // log2(err_coarse / err_fine), 0 on the first row
    double rate_l2 = 0.0;
    double rate_flux = 0.0;
};

std::vector<ConvergenceRow> convergence_study(const ExperimentConfig& cfg);

struct SweepRow {
    double alpha1 = 0.0, alpha2 = 0.0;
    RunResult run;
};

/// Fixed mesh, coefficient pairs (1e6,1) ... (1,1e8) unless overridden.
std::vector<SweepRow> sweep_contrast(const ExperimentConfig& cfg,
                                     const std::vector<std::pair<double, double>>& pairs);

std::vector<std::pair<double, double>> default_contrast_pairs();

/// Least-squares slope of log10(y) against log10(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace uipdg
