#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ewm/bump.hpp"
#include "ewm/linalg.hpp"
#include "ewm/projection.hpp"
#include "ewm/quadrature.hpp"

using namespace ewm;

namespace {

// Exact P(R)-style data: f = sum_i lf[i] r^{2(i+1)-d}, g = sum_j lg[j] r^{2(j+1)-d}.
ExteriorData power_data(int d, const RadialGrid& grid, const std::vector<double>& lf,
                        const std::vector<double>& lg) {
    ExteriorData u;
    u.grid = grid;
    u.dim = d;
    u.f.assign(grid.npoints, 0.0);
    u.fp.assign(grid.npoints, 0.0);
    u.g.assign(grid.npoints, 0.0);
    for (int n = 0; n < grid.npoints; ++n) {
        const double r = grid.r(n);
        for (std::size_t i = 0; i < lf.size(); ++i) {
            const double e = 2.0 * (i + 1) - d;
            u.f[n] += lf[i] * std::pow(r, e);
            u.fp[n] += lf[i] * e * std::pow(r, e - 1.0);
        }
        for (std::size_t j = 0; j < lg.size(); ++j)
            u.g[n] += lg[j] * std::pow(r, 2.0 * (j + 1) - d);
    }
    for (std::size_t i = 0; i < lf.size(); ++i) {
        u.f_tail.coef.push_back(lf[i]);
        u.f_tail.expo.push_back(2.0 * (i + 1) - d);
    }
    for (std::size_t j = 0; j < lg.size(); ++j) {
        u.g_tail.coef.push_back(lg[j]);
        u.g_tail.expo.push_back(2.0 * (j + 1) - d);
    }
    return u;
}

ExteriorData bump_data(int d, const RadialGrid& grid, const Bump& bf, const Bump& bg) {
    ExteriorData u;
    u.grid = grid;
    u.dim = d;
    u.f.resize(grid.npoints);
    u.fp.resize(grid.npoints);
    u.g.resize(grid.npoints);
    for (int n = 0; n < grid.npoints; ++n) {
        u.f[n] = bf(grid.r(n));
        u.fp[n] = bf.derivative(grid.r(n), 1);
        u.g[n] = bg(grid.r(n));
    }
    return u;
}

// Oracle: coefficients by dense normal-equation solves against the Gram
// matrices, independent of the explicit-inverse formulas.
ProjectionCoefficients dense_solve_coefficients(const ExteriorData& u, const ProjectionBasis& b) {
    ProjectionCoefficients out;
    out.radius = b.radius;
    const std::vector<double> mh1 = field_moments_h1(u, b.ktilde);
    const std::vector<double> ml2 = field_moments_l2(u, b.k);
    std::vector<double> uh(b.ktilde);
    for (int i = 1; i <= b.ktilde; ++i) uh[i - 1] = (2.0 * i - b.dim) * mh1[i - 1];
    out.lambda = b.ktilde ? solve_dense(b.gramH1, uh) : std::vector<double>{};
    out.mu = b.k ? solve_dense(b.gramL2, ml2) : std::vector<double>{};
    return out;
}

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

}  // namespace

TEST_CASE("build_basis pinned values and scaling law") {
    ProjectionBasis b5 = build_basis(5, 1.0);
    REQUIRE(b5.k == 1);
    CHECK(b5.gramL2[0][0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b5.invL2[0][0] == doctest::Approx(1.0).epsilon(1e-14));

    // d = 3, R = 2: <r^{-1}, r^{-1}>_{Hdot1(r>=2)} = (d-2) R^{2-d} = 1/2,
    // matching (2i-d)(2j-d) R^{2i+2j-d-2}/(d+2-2i-2j) at i = j = 1.
    ProjectionBasis b3 = build_basis(3, 2.0);
    CHECK(b3.k == 0);
    REQUIRE(b3.ktilde == 1);
    CHECK(b3.gramH1[0][0] == doctest::Approx(0.5).epsilon(1e-14));

    // b_ij(R) = b_ij(1) R^{d-2i-2j}
    for (int d : {7, 9, 11}) {
        ProjectionBasis at1 = build_basis(d, 1.0);
        ProjectionBasis atR = build_basis(d, 3.0);
        for (int i = 1; i <= at1.k; ++i)
            for (int j = 1; j <= at1.k; ++j)
                CHECK(rel_err(atR.invL2[i - 1][j - 1],
                              at1.invL2[i - 1][j - 1] * std::pow(3.0, d - 2 * i - 2 * j)) < 1e-12);
    }

    CHECK_THROWS(build_basis(6, 1.0));
    CHECK_THROWS(build_basis(5, 0.5));
}

TEST_CASE("explicit Gram inverses multiply back to the identity") {
    for (int d : {3, 5, 7, 9, 11}) {
        for (double R : {1.0, 2.0, 10.0}) {
            ProjectionBasis b = build_basis(d, R);
            CHECK(b.inverse_defect < 1e-10);
        }
    }
}

TEST_CASE("pure resonance datum projects to lambda_1 = 1") {
    for (int d : {5, 7, 9, 11}) {
        RadialGrid grid = RadialGrid::make(2.0, 10.0, 4001);
        ExteriorData u = power_data(d, grid, {1.0}, {});
        ProjectionBasis basis = build_basis(d, 2.0);
        ProjectionCoefficients pc = project_coefficients(u, basis);
        INFO("d = ", d);
        CHECK(rel_err(pc.lambda[0], 1.0) < 1e-9);
        for (int i = 1; i < basis.ktilde; ++i) CHECK(std::abs(pc.lambda[i]) < 1e-9);
        for (int j = 0; j < basis.k; ++j) CHECK(std::abs(pc.mu[j]) < 1e-9);
        CHECK_FALSE(pc.tail_flagged);
    }
}

TEST_CASE("zero data gives zero coefficients") {
    RadialGrid grid = RadialGrid::make(1.0, 9.0, 2001);
    ExteriorData u;
    u.grid = grid;
    u.dim = 7;
    u.f.assign(grid.npoints, 0.0);
    u.g.assign(grid.npoints, 0.0);
    ProjectionCoefficients pc = project_coefficients(u, build_basis(7, 1.0));
    for (double v : pc.lambda) CHECK(v == 0.0);
    for (double v : pc.mu) CHECK(v == 0.0);
}

TEST_CASE("velocity bump matches the dense normal-equations oracle") {
    RadialGrid grid = RadialGrid::make(1.0, 9.0, 4001);
    ExteriorData u;
    u.grid = grid;
    u.dim = 7;
    u.f.assign(grid.npoints, 0.0);
    u.g.resize(grid.npoints);
    Bump bump(1.0, 4.0, 1.5);
    for (int n = 0; n < grid.npoints; ++n)
        u.g[n] = bump(grid.r(n)) * std::pow(grid.r(n), -7.0);
    ProjectionBasis basis = build_basis(7, 1.0);
    ProjectionCoefficients pc = project_coefficients(u, basis);
    ProjectionCoefficients oracle = dense_solve_coefficients(u, basis);
    REQUIRE(pc.mu.size() == oracle.mu.size());
    CHECK(rel_err(pc.mu[0], oracle.mu[0]) < 1e-10);
}

TEST_CASE("explicit-inverse and dense-solve coefficients agree across d and R") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> amp(-2.0, 2.0);
    for (int d : {3, 5, 7, 9, 11}) {
        for (double R : {1.0, 2.0, 10.0}) {
            RadialGrid grid = RadialGrid::make(R, R + 8.0, 4001);
            Bump bf(amp(rng), R + 3.0, 1.2);
            Bump bg(amp(rng), R + 4.5, 1.7);
            ExteriorData u = bump_data(d, grid, bf, bg);
            ProjectionBasis basis = build_basis(d, R);
            ProjectionCoefficients pc = project_coefficients(u, basis);
            ProjectionCoefficients oracle = dense_solve_coefficients(u, basis);
            INFO("d = ", d, " R = ", R);
            for (int i = 0; i < basis.ktilde; ++i)
                CHECK(std::abs(pc.lambda[i] - oracle.lambda[i]) <=
                      1e-8 * std::max(1.0, std::abs(oracle.lambda[i])));
            for (int j = 0; j < basis.k; ++j)
                CHECK(std::abs(pc.mu[j] - oracle.mu[j]) <=
                      1e-8 * std::max(1.0, std::abs(oracle.mu[j])));
        }
    }
}

TEST_CASE("resonance-space data is annihilated by the perp projection") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> amp(-1.5, 1.5);
    for (int d : {3, 5, 7, 9, 11}) {
        for (double R : {1.0, 2.0, 10.0}) {
            ProjectionBasis basis = build_basis(d, R);
            RadialGrid grid = RadialGrid::make(R, R + 8.0, 4001);
            std::vector<double> lf(basis.ktilde), lg(basis.k);
            for (double& v : lf) v = amp(rng);
            for (double& v : lg) v = amp(rng);
            ExteriorData u = power_data(d, grid, lf, lg);
            ProjectionCoefficients pc = project_coefficients(u, basis);
            auto [proj, perp] = apply_projection(u, pc, basis);
            const double total = norm_sq(u);
            const double leak = norm_sq(perp);
            INFO("d = ", d, " R = ", R);
            CHECK(leak <= 1e-16 * total);  // squared norms: 1e-8 relative in norm
        }
    }
}

TEST_CASE("projector identities: idempotence, self-adjointness, Pythagoras") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> amp(-2.0, 2.0);
    for (int d : {3, 5, 7, 9, 11}) {
        for (double R : {1.0, 2.0}) {
            ProjectionBasis basis = build_basis(d, R);
            RadialGrid grid = RadialGrid::make(R, R + 4.0, 20001);
            ExteriorData u = bump_data(d, grid, Bump(amp(rng), R + 1.8, 1.0),
                                       Bump(amp(rng), R + 2.6, 1.1));
            ExteriorData v = bump_data(d, grid, Bump(amp(rng), R + 2.2, 1.2),
                                       Bump(amp(rng), R + 1.6, 0.9));

            ProjectionCoefficients cu = project_coefficients(u, basis);
            ProjectionCoefficients cv = project_coefficients(v, basis);
            auto [pu, qu] = apply_projection(u, cu, basis);
            auto [pv, qv] = apply_projection(v, cv, basis);

            INFO("d = ", d, " R = ", R);

            // idempotence: projecting the projection returns the coefficients
            ProjectionCoefficients cpu = project_coefficients(pu, basis);
            for (int i = 0; i < basis.ktilde; ++i)
                CHECK(std::abs(cpu.lambda[i] - cu.lambda[i]) <=
                      1e-10 * std::max(1.0, std::abs(cu.lambda[i])));
            for (int j = 0; j < basis.k; ++j)
                CHECK(std::abs(cpu.mu[j] - cu.mu[j]) <= 1e-10 * std::max(1.0, std::abs(cu.mu[j])));

            // self-adjointness
            const double scale = std::sqrt(norm_sq(u) * norm_sq(v)) + 1e-300;
            CHECK(std::abs(inner_pair(pu, v) - inner_pair(u, pv)) / scale < 1e-8);

            // orthogonality and Pythagoras
            CHECK(std::abs(inner_pair(pu, qu)) / (norm_sq(u) + 1e-300) < 1e-8);
            CHECK(rel_err(norm_sq(pu) + norm_sq(qu), norm_sq(u)) < 1e-8);
        }
    }
}

TEST_CASE("norm_via_identity matches direct quadrature") {
    RadialGrid grid = RadialGrid::make(2.0, 10.0, 4001);
    ExteriorData u = bump_data(7, grid, Bump(0.8, 5.0, 1.2), Bump(-0.6, 6.0, 1.0));
    ProjectionBasis basis = build_basis(7, 2.0);
    NormSplit split = norm_via_identity(u, basis);
    CHECK_FALSE(split.quadrature_failure);

    ProjectionCoefficients pc = project_coefficients(u, basis);
    auto [proj, perp] = apply_projection(u, pc, basis);
    CHECK(rel_err(split.perp_norm_sq, norm_sq(perp)) < 1e-6);
    CHECK(rel_err(split.proj_norm_sq, norm_sq(proj)) < 1e-6);
}

TEST_CASE("norm_via_identity edge cases") {
    // data inside the span: perp norm ~ 0
    RadialGrid grid = RadialGrid::make(2.0, 6.0, 20001);
    ExteriorData p = power_data(7, grid, {0.7, -0.3}, {0.5});
    ProjectionBasis basis = build_basis(7, 2.0);
    NormSplit split = norm_via_identity(p, basis);
    CHECK(std::abs(split.perp_norm_sq) < 1e-12 * norm_sq(p));

    // velocity orthogonal to the span (all moments vanish): perp = <g,g>
    ExteriorData u;
    u.grid = grid;
    u.dim = 7;
    u.f.assign(grid.npoints, 0.0);
    u.g.resize(grid.npoints);
    Bump lobe(1.0, 3.2, 0.8);
    // antisymmetrize against the single weight r^{2i-1}, i = 1 => weight r
    // g(r) = b(r)/r - shifted copy scaled so that int g r dr = 0
    std::vector<double> gv(grid.npoints);
    double moment = 0.0;
    for (int n = 0; n < grid.npoints; ++n) gv[n] = lobe(grid.r(n)) / grid.r(n);
    {
        std::vector<double> w(grid.npoints);
        for (int n = 0; n < grid.npoints; ++n) w[n] = gv[n] * grid.r(n);
        moment = integrate_simpson(w, grid.dr);
    }
    Bump other(1.0, 5.0, 0.8);
    std::vector<double> hv(grid.npoints);
    double hmoment = 0.0;
    {
        std::vector<double> w(grid.npoints);
        for (int n = 0; n < grid.npoints; ++n) {
            hv[n] = other(grid.r(n)) / grid.r(n);
            w[n] = hv[n] * grid.r(n);
        }
        hmoment = integrate_simpson(w, grid.dr);
    }
    for (int n = 0; n < grid.npoints; ++n) u.g[n] = gv[n] - (moment / hmoment) * hv[n];
    NormSplit osplit = norm_via_identity(u, basis);
    CHECK(rel_err(osplit.perp_norm_sq, inner_l2(u, u)) < 1e-9);
}

TEST_CASE("scaling covariance: u(sigma r) with R -> R/sigma maps by sigma^{2j-d}") {
    const double sigma = 2.0;
    for (int d : {5, 7, 9}) {
        const double R = 2.0;
        RadialGrid grid = RadialGrid::make(R, R + 8.0, 4001);
        Bump bf(1.1, 4.5, 1.3);
        Bump bg(-0.7, 5.5, 1.1);
        ExteriorData u = bump_data(d, grid, bf, bg);
        ProjectionCoefficients pc = project_coefficients(u, build_basis(d, R));

        RadialGrid sgrid = RadialGrid::make(R / sigma, (R + 8.0) / sigma, 4001);
        ExteriorData us;
        us.grid = sgrid;
        us.dim = d;
        us.f.resize(sgrid.npoints);
        us.g.resize(sgrid.npoints);
        for (int n = 0; n < sgrid.npoints; ++n) {
            us.f[n] = bf(sigma * sgrid.r(n));
            us.g[n] = bg(sigma * sgrid.r(n));
        }
        ProjectionCoefficients psc = project_coefficients(us, build_basis(d, R / sigma));

        INFO("d = ", d);
        for (std::size_t j = 1; j <= pc.lambda.size(); ++j)
            CHECK(std::abs(psc.lambda[j - 1] - std::pow(sigma, 2.0 * j - d) * pc.lambda[j - 1]) <=
                  1e-8 * std::max(1.0, std::abs(pc.lambda[j - 1])));
        for (std::size_t j = 1; j <= pc.mu.size(); ++j)
            CHECK(std::abs(psc.mu[j - 1] - std::pow(sigma, 2.0 * j - d) * pc.mu[j - 1]) <=
                  1e-8 * std::max(1.0, std::abs(pc.mu[j - 1])));
    }
}

TEST_CASE("constraint-satisfying vectors have a fixed sum-to-norm ratio") {
    // Vectors a with sum_j a_j (d-2j)/(d+2-2i-2j) independent of i. The
    // solution space is one-dimensional; (sum a_j)^2 / sum a_j^2 is a
    // d-dependent constant, and sum a_j = a_1 prod_l 2l/(d-2-2l).
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> scale(-5.0, 5.0);
    for (int d : {7, 9, 11}) {
        const int kt = (d + 2) / 4;
        double ratio_ref = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            double a1 = 0.0;
            while (std::abs(a1) < 0.1) a1 = scale(rng);
            // v_j = a_j (d-2j); constraints row i (= 2..kt):
            // sum_j v_j [1/(d+2-2i-2j) - 1/(d-2j)] = 0
            std::vector<double> a(kt, 0.0);
            a[0] = a1;
            if (kt > 1) {
                Matrix m(kt - 1, std::vector<double>(kt - 1, 0.0));
                std::vector<double> rhs(kt - 1, 0.0);
                const double v1 = a1 * (d - 2.0);
                for (int i = 2; i <= kt; ++i) {
                    const double w1 = 1.0 / (d + 2.0 - 2 * i - 2.0) - 1.0 / (d - 2.0);
                    rhs[i - 2] = -v1 * w1;
                    for (int j = 2; j <= kt; ++j)
                        m[i - 2][j - 2] =
                            1.0 / (d + 2.0 - 2 * i - 2 * j) - 1.0 / (d + 2.0 - 2 - 2 * j);
                }
                std::vector<double> v = solve_dense(m, rhs);
                for (int j = 2; j <= kt; ++j) a[j - 1] = v[j - 2] / (d - 2.0 * j);
            }
            double sum = 0.0, sumsq = 0.0;
            for (double x : a) {
                sum += x;
                sumsq += x * x;
            }
            const double ratio = sum * sum / sumsq;
            if (trial == 0)
                ratio_ref = ratio;
            else
                CHECK(rel_err(ratio, ratio_ref) < 1e-8);

            double predicted = a1;
            for (int l = 1; l <= kt - 1; ++l) predicted *= 2.0 * l / (d - 2.0 - 2.0 * l);
            CHECK(rel_err(sum, predicted) < 1e-8);
        }
    }
}

TEST_CASE("seminorms of a coefficient track") {
    // constant track: zero derivative seminorm
    std::vector<CoefficientTrackPoint> track;
    for (int i = 0; i < 21; ++i)
        track.push_back({2.0 + 0.1 * i, {0.7, -0.2}, {0.3}});
    SeminormPair sp = coefficient_seminorms(track, 7);
    CHECK(sp.pipp_norm_sq == doctest::Approx(0.0).epsilon(1e-30));
    CHECK_FALSE(sp.differencing_flagged);
    // pip at R0 = 2
    double expect = std::pow(0.7 * std::pow(2.0, 2.0 - 4.5), 2) +
                    std::pow(-0.2 * std::pow(2.0, 4.0 - 4.5), 2) +
                    std::pow(0.3 * std::pow(2.0, 2.0 - 3.5), 2);
    CHECK(rel_err(sp.pip_norm_sq, expect) < 1e-12);

    // d = 5 single-coefficient specialization: lambda(R) = R, mu(R) = R^2
    // pipp = int (dlambda/dR r^{2-3})^2 + (dmu/dR r^{2-2})^2 dR
    std::vector<CoefficientTrackPoint> t5;
    const int n5 = 201;
    const double r0 = 2.0, dr = 0.01;
    for (int i = 0; i < n5; ++i) {
        const double R = r0 + dr * i;
        t5.push_back({R, {R}, {R * R}});
    }
    SeminormPair sp5 = coefficient_seminorms(t5, 5);
    // int_2^4 (1/R)^2 + (2R)^2 dR = [ -1/R ]_2^4 + 4 [R^3/3]_2^4
    const double upper = r0 + dr * (n5 - 1);
    const double direct = (1.0 / r0 - 1.0 / upper) +
                          4.0 / 3.0 * (upper * upper * upper - r0 * r0 * r0);
    CHECK(rel_err(sp5.pipp_norm_sq, direct) < 1e-8);

    // coarse track is flagged
    std::vector<CoefficientTrackPoint> coarse(track.begin(), track.begin() + 3);
    CHECK(coefficient_seminorms(coarse, 7).differencing_flagged);
}

TEST_CASE("dR of the perp norm matches the closed form built from the tracks") {
    const int d = 7;
    RadialGrid grid = RadialGrid::make(2.0, 12.0, 5001);
    ExteriorData u = bump_data(d, grid, Bump(1.0, 6.0, 1.5), Bump(0.5, 7.0, 1.2));

    // Track over R on grid nodes every 4 cells, R in [2, 3.2]
    const int stride = 4, count = 151;
    std::vector<double> radii, perps;
    std::vector<CoefficientTrackPoint> track;
    for (int s = 0; s < count; ++s) {
        const int start = s * stride;
        ExteriorData view;
        view.dim = d;
        view.grid = RadialGrid::make(grid.r(start), grid.r_max, grid.npoints - start);
        view.f.assign(u.f.begin() + start, u.f.end());
        view.fp.assign(u.fp.begin() + start, u.fp.end());
        view.g.assign(u.g.begin() + start, u.g.end());
        ProjectionBasis basis = build_basis(d, view.grid.r_min);
        ProjectionCoefficients pc = project_coefficients(view, basis);
        NormSplit split = norm_via_identity(view, basis);
        radii.push_back(view.grid.r_min);
        perps.push_back(split.perp_norm_sq);
        track.push_back({view.grid.r_min, pc.lambda, pc.mu});
    }
    const double dR = radii[1] - radii[0];
    std::vector<double> dperp = derivative4(perps, dR);

    // coefficient derivatives in R
    const int kt = static_cast<int>(track[0].lambda.size());
    const int k = static_cast<int>(track[0].mu.size());
    std::vector<std::vector<double>> dlam(kt), dmu(k);
    std::vector<double> series(count);
    for (int i = 0; i < kt; ++i) {
        for (int s = 0; s < count; ++s) series[s] = track[s].lambda[i];
        dlam[i] = derivative4(series, dR);
    }
    for (int j = 0; j < k; ++j) {
        for (int s = 0; s < count; ++s) series[s] = track[s].mu[j];
        dmu[j] = derivative4(series, dR);
    }

    int checked = 0;
    for (int s = 5; s < count - 5; s += 10) {
        const double R = radii[s];
        double suml = 0.0, summ = 0.0;
        for (int i = 1; i <= kt; ++i) suml += dlam[i - 1][s] * std::pow(R, 2.0 * i - d);
        for (int i = 1; i <= k; ++i)
            summ += dmu[i - 1][s] * std::pow(R, 2.0 * i - d + 1.0) / (d - 2.0 - 2.0 * i);
        const double closed = -(suml * suml + summ * summ) * std::pow(R, d - 1.0);
        CHECK(std::abs(dperp[s] - closed) <= 1e-4 * std::max(std::abs(closed), 1e-6));
        ++checked;
    }
    CHECK(checked > 5);
}

TEST_CASE("truncation of slowly decaying data without a tail model is flagged") {
    RadialGrid grid = RadialGrid::make(2.0, 10.0, 2001);
    ExteriorData u = power_data(7, grid, {1.0}, {});
    u.f_tail = PowerTail{};  // drop the analytic tail
    ProjectionCoefficients pc = project_coefficients(u, build_basis(7, 2.0));
    CHECK(pc.tail_flagged);
    CHECK(pc.tail_error_bound > 0.0);
}
