#include "uipdg/assembly.hpp"

#include <Eigen/Dense>
#include <random>

#include "doctest.h"
#include "uipdg/quadrature.hpp"

using namespace uipdg;

namespace {

const double kEps = 1e-12 * std::sqrt(2.0);
const Rect kUnit{0.0, 0.0, 1.0, 1.0};

InterfaceCurve flower() {
    return InterfaceCurve::polar({0.5, 0.5}, 0.25, {{1.0 / 14.0, 5.0, 0.0}}, kEps);
}

InterfaceCurve absent_curve() {
    return InterfaceCurve::polar({15.0, 15.0}, 0.25, {}, kEps);
}

struct Pipeline {
    Grid grid;
    std::vector<CutCellGeometry> geoms;
    MergedMesh merged;
    DofMap dm;
    SpMat B;
};

Pipeline build(int n, const InterfaceCurve& curve, int p, double delta = 0.25) {
    Pipeline pl;
    pl.grid = build_grid(kUnit, n);
    pl.geoms = classify_elements(pl.grid, curve);
    pl.merged = run_merge(pl.grid, pl.geoms, find_small(pl.geoms, delta, pl.grid.h));
    pl.dm = build_spaces(pl.merged, pl.geoms, p);
    pl.B = build_merge_operator(pl.dm);
    return pl;
}

double max_abs(const SpMat& A) {
    double m = 0.0;
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
}

double max_abs_diff(const SpMat& A, const SpMat& B) {
    const SpMat D = A - B;
    double m = 0.0;
    for (int k = 0; k < D.outerSize(); ++k)
        for (SpMat::InnerIterator it(D, k); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
}

}  // namespace

TEST_CASE("no interface: classical stiffness matrix") {
    const auto curve = absent_curve();
    const auto pl = build(2, curve, 1);
    REQUIRE(pl.dm.N == 1);  // single interior vertex
    const auto problem = manufactured_problem("trig", 1.0, 1.0);
    const auto sys = assemble_unmerged(pl.grid, pl.geoms, curve, pl.dm, problem, {}, 4);
    // bilinear elements on squares: the vertex diagonal is 8/3
    CHECK(sys.A.coeff(0, 0) == doctest::Approx(8.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("symmetry at beta = 1") {
    const auto curve = flower();
    const auto pl = build(8, curve, 1);
    const auto problem = manufactured_problem("flower", 1000.0, 1.0);
    const auto unm = assemble_unmerged(pl.grid, pl.geoms, curve, pl.dm, problem, {}, 4);
    CHECK(max_abs_diff(unm.A, SpMat(unm.A.transpose())) <= 1e-12 * max_abs(unm.A));
    const auto sys = reduce_system(unm.A, unm.F, pl.B);
    CHECK(max_abs_diff(sys.A, SpMat(sys.A.transpose())) <= 1e-12 * max_abs(sys.A));
}

TEST_CASE("harmonic weights") {
    PenaltyConfig pen;
    double w1, w2;
    pen.interface_weights(1000.0, 1.0, w1, w2);
    CHECK(w1 == doctest::Approx(1.0 / 1001.0).epsilon(1e-15));
    CHECK(w2 == doctest::Approx(1000.0 / 1001.0).epsilon(1e-15));
    CHECK(w1 + w2 == doctest::Approx(1.0).epsilon(1e-15));
    const double aw = w1 * 1000.0 + w2 * 1.0;
    CHECK(aw == doctest::Approx(2000.0 / 1001.0).epsilon(1e-15));
    // weight sanity: min <= harmonic mean <= max, and <= 2 min
    for (auto [a1, a2] : std::vector<std::pair<double, double>>{
             {1e-6, 1.0}, {3.0, 7.0}, {1e8, 1.0}, {2.0, 2.0}}) {
        pen.interface_weights(a1, a2, w1, w2);
        const double m = w1 * a1 + w2 * a2;
        CHECK(m >= std::min(a1, a2) * (1.0 - 1e-14));
        CHECK(m <= std::max(a1, a2) * (1.0 + 1e-14));
        CHECK(m <= 2.0 * std::min(a1, a2) * (1.0 + 1e-14));
    }
}

TEST_CASE("reduce_system is a congruence") {
    const auto curve = flower();
    const auto pl = build(8, curve, 1);
    const auto problem = manufactured_problem("flower", 1000.0, 1.0);
    const auto unm = assemble_unmerged(pl.grid, pl.geoms, curve, pl.dm, problem, {}, 4);
    const auto sys = reduce_system(unm.A, unm.F, pl.B);
    CHECK(sys.N == pl.dm.N);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd v(pl.dm.N);
        for (int k = 0; k < v.size(); ++k) v[k] = gauss(rng);
        const Eigen::VectorXd Bv = pl.B * v;
        const double q1 = v.dot(sys.A * v);
        const double q2 = Bv.dot(unm.A * Bv);
        CHECK(q1 == doctest::Approx(q2).epsilon(1e-12));
        CHECK(v.dot(sys.F) == doctest::Approx(Bv.dot(unm.F)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(reduce_system(unm.A, Eigen::VectorXd::Zero(3), pl.B), DimensionMismatch);
}

TEST_CASE("identity reduction without merges") {
    const auto curve = absent_curve();
    const auto pl = build(4, curve, 2);
    const auto problem = manufactured_problem("trig", 1.0, 1.0);
    const auto unm = assemble_unmerged(pl.grid, pl.geoms, curve, pl.dm, problem, {}, 5);
    const auto sys = reduce_system(unm.A, unm.F, pl.B);
    CHECK(max_abs_diff(sys.A, unm.A) == 0.0);
    CHECK((sys.F - unm.F).norm() == 0.0);
}

TEST_CASE("stiffness is positive definite at gamma = 100") {
    const auto curve = flower();
    const auto pl = build(8, curve, 1);
    const auto problem = manufactured_problem("flower", 1000.0, 1.0);
    PenaltyConfig pen;  // gamma = 100, beta = 1
    const auto unm = assemble_unmerged(pl.grid, pl.geoms, curve, pl.dm, problem, pen, 4);
    const auto sys = reduce_system(unm.A, unm.F, pl.B);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(sys.A),
                                                      Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("manufactured problems") {
    const auto pd = manufactured_problem("flower", 1000.0, 1.0);
    // f in Omega1 at the origin vanishes
    CHECK(pd.f[0]({0.0, 0.0}) == doctest::Approx(0.0));
    CHECK(pd.f[0]({0.5, 0.5}) == doctest::Approx(-0.5 * std::exp(0.25)).epsilon(1e-14));
    // u vanishes on the outer boundary
    for (double t : {0.0, 0.3, 0.77, 1.0}) {
        CHECK(pd.exact[1]({t, 0.0}) == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(pd.exact[1]({1.0, t}) == doctest::Approx(0.0).epsilon(1e-14));
    }
    // jump data at equal coefficients
    const auto pd1 = manufactured_problem("flower", 1.0, 1.0);
    const Vec2 p{0.75, 0.5};
    CHECK(pd1.g_dirichlet(p) ==
          doctest::Approx(std::exp(p.x * p.y) - std::sin(pi() * p.x) * std::sin(pi() * p.y))
              .epsilon(1e-14));
    // exact gradients match finite differences
    for (const auto* pdp : {&pd, &pd1})
        for (int i = 0; i < 2; ++i) {
            const Vec2 x{0.4, 0.6};
            const double d = 1e-6;
            const Vec2 g = pdp->exact_grad[i](x);
            CHECK(g.x == doctest::Approx((pdp->exact[i]({x.x + d, x.y}) -
                                          pdp->exact[i]({x.x - d, x.y})) /
                                         (2 * d)).epsilon(1e-8));
            CHECK(g.y == doctest::Approx((pdp->exact[i]({x.x, x.y + d}) -
                                          pdp->exact[i]({x.x, x.y - d})) /
                                         (2 * d)).epsilon(1e-8));
        }
    CHECK_THROWS_AS(manufactured_problem("nope", 1.0, 1.0), UnknownExample);
    CHECK_THROWS_AS(manufactured_problem("flower", -1.0, 1.0), ConfigError);
}

TEST_CASE("assembled matrix is stable under quadrature refinement") {
    const auto curve = flower();
    const auto pl = build(16, curve, 1);
    const auto problem = manufactured_problem("flower", 1000.0, 1.0);
    const auto a1 = assemble_unmerged(pl.grid, pl.geoms, curve, pl.dm, problem, {}, 4);
    const auto a2 = assemble_unmerged(pl.grid, pl.geoms, curve, pl.dm, problem, {}, 8);
    CHECK(max_abs_diff(a1.A, a2.A) <= 1e-8 * max_abs(a1.A));
}

TEST_CASE("assembly is invariant under a 1e-13 curve perturbation") {
    const auto pl = build(8, flower(), 1);
    const auto problem = manufactured_problem("flower", 1000.0, 1.0);
    const auto a1 = assemble_unmerged(pl.grid, pl.geoms, flower(), pl.dm, problem, {}, 4);
    const auto nudged =
        InterfaceCurve::polar({0.5, 0.5}, 0.25 + 1e-13, {{1.0 / 14.0, 5.0, 0.0}}, kEps);
    const auto geoms2 = classify_elements(pl.grid, nudged);
    const auto a2 = assemble_unmerged(pl.grid, geoms2, nudged, pl.dm, problem, {}, 4);
    CHECK(max_abs_diff(a1.A, a2.A) <= 1e-12 * max_abs(a1.A));
}

TEST_CASE("coordinate export") {
    const auto curve = absent_curve();
    const auto pl = build(2, curve, 1);
    const auto problem = manufactured_problem("trig", 1.0, 1.0);
    const auto unm = assemble_unmerged(pl.grid, pl.geoms, curve, pl.dm, problem, {}, 4);
    const std::string path = "/tmp/uipdg_export_test.txt";
    export_coordinate_format(unm.A, path);
    std::ifstream is(path);
    int row, col;
    double val;
    REQUIRE((is >> row >> col >> val));
    CHECK(row == 0);
    CHECK(col == 0);
    CHECK(val == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
}
