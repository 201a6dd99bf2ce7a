#include <doctest.h>

#include <cmath>
#include <random>

#include "barkley/errors.hpp"
#include "barkley/model.hpp"
#include "barkley/singular_loop.hpp"
#include "barkley/spectra.hpp"

using namespace barkley;

namespace {

Mat3 fd_jacobian(const PhasePoint& p, const ModelParams& prm, double h = 1e-6) {
    Mat3 J{};
    for (int j = 0; j < 3; ++j) {
        Vec3 xp = p.vec(), xm = p.vec();
        xp[j] += h;
        xm[j] -= h;
        Vec3 fp = tw_vector_field(PhasePoint::from(xp), prm);
        Vec3 fm = tw_vector_field(PhasePoint::from(xm), prm);
        for (int i = 0; i < 3; ++i) J[i][j] = (fp[i] - fm[i]) / (2.0 * h);
    }
    return J;
}

// independent root finder for the characteristic polynomial: bisection on
// det(A - lambda I) between sign changes of a coarse scan
std::array<double, 3> charpoly_roots_bisect(const Mat3& A) {
    auto det = [&](double lam) {
        Mat3 B = A;
        for (int i = 0; i < 3; ++i) B[i][i] -= lam;
        return B[0][0] * (B[1][1] * B[2][2] - B[1][2] * B[2][1]) -
               B[0][1] * (B[1][0] * B[2][2] - B[1][2] * B[2][0]) +
               B[0][2] * (B[1][0] * B[2][1] - B[1][1] * B[2][0]);
    };
    std::array<double, 3> roots{};
    int found = 0;
    double prev_x = -50.0, prev_f = det(prev_x);
    for (double x = -50.0 + 1e-4; x <= 50.0 && found < 3; x += 1e-4) {
        double f = det(x);
        if (prev_f * f < 0.0) {
            double lo = prev_x, hi = x;
            for (int i = 0; i < 100; ++i) {
                double mid = 0.5 * (lo + hi);
                if (det(lo) * det(mid) <= 0.0)
                    hi = mid;
                else
                    lo = mid;
            }
            roots[found++] = 0.5 * (lo + hi);
        }
        prev_x = x;
        prev_f = f;
    }
    REQUIRE(found == 3);
    return roots;
}

} // namespace

TEST_CASE("analytic Jacobian matches finite differences at random points") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> qd(-0.5, 2.5), sd(-1.0, 1.0), ud(1.1, 2.4);
    ModelParams prm = ModelParams::with_mu(0.9, 1.3, -0.6, 2e-3, 0.0);
    for (int i = 0; i < 100; ++i) {
        PhasePoint p{qd(rng), sd(rng), ud(rng)};
        Mat3 A = jacobian_tw(p, prm);
        Mat3 F = fd_jacobian(p, prm);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) CHECK(std::abs(A[a][b] - F[a][b]) < 1e-6);
    }
}

TEST_CASE("Jacobian structure at X1") {
    ModelParams fast = ModelParams::with_mu(0.8, 1.1, -0.4, 0.0, 0.0);
    EquilibriumSet e = compute_equilibria(0.8);
    Mat3 J = jacobian_tw(e.X1, fast);
    CHECK(J[1][0] == doctest::Approx(0.1 / 1.1));  // -df/dq(0,2)/D = 0.1/D
    CHECK(J[2][0] == 0.0);
    CHECK(J[2][1] == 0.0);
    CHECK(J[2][2] == 0.0);  // third row vanishes in the fast subsystem
}

TEST_CASE("eigen decomposition basics") {
    Mat3 I{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    SpectralData si = eigen_decompose_3x3(I);
    CHECK(si.multiple);
    CHECK(si.lambda1 == doctest::Approx(1.0));
    CHECK(si.lambda3 == doctest::Approx(1.0));

    Mat3 D{{{-2, 0, 0}, {0, -1, 0}, {0, 0, 3}}};
    SpectralData sd = eigen_decompose_3x3(D);
    CHECK(sd.lambda1 == doctest::Approx(-2.0));
    CHECK(sd.lambda2 == doctest::Approx(-1.0));
    CHECK(sd.lambda3 == doctest::Approx(3.0));
    CHECK(std::abs(sd.e1[0]) == doctest::Approx(1.0));
    CHECK(std::abs(sd.e2[1]) == doctest::Approx(1.0));
    CHECK(std::abs(sd.e3[2]) == doctest::Approx(1.0));
    CHECK(sd.residual < 1e-12);

    Mat3 rot{{{0, -1, 0}, {1, 0, 0}, {0, 0, 1}}};
    CHECK_THROWS_AS(eigen_decompose_3x3(rot), ComplexSpectrum);
}

TEST_CASE("eigenvalues agree with an independent characteristic-polynomial bisection") {
    SingularLoopData loop = solve_singular_parameters(0.7);
    ModelParams prm = ModelParams::with_mu(0.7, loop.D0, loop.mu0, 1e-3, 0.0);
    EquilibriumSet e = compute_equilibria(0.7);
    for (const PhasePoint* X : {&e.X1, &e.X2}) {
        Mat3 J = jacobian_tw(*X, prm);
        SpectralData s = eigen_decompose_3x3(J);
        auto roots = charpoly_roots_bisect(J);
        CHECK(s.lambda1 == doctest::Approx(roots[0]).epsilon(1e-7));
        CHECK(s.lambda2 == doctest::Approx(roots[1]).epsilon(1e-7));
        CHECK(s.lambda3 == doctest::Approx(roots[2]).epsilon(1e-7));
        CHECK(s.lambda2 < 0.0);
        CHECK(s.lambda3 > 0.0);
        CHECK(s.residual < 1e-10);
    }
}

TEST_CASE("eigen residual stays tight at random phase points") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> qd(-0.5, 2.5), sd(-1.0, 1.0), ud(1.1, 2.4);
    ModelParams prm = ModelParams::with_mu(1.1, 0.9, -0.7, 5e-3, 0.0);
    int checked = 0;
    for (int i = 0; i < 200 && checked < 60; ++i) {
        PhasePoint p{qd(rng), sd(rng), ud(rng)};
        try {
            SpectralData s = eigen_decompose_3x3(jacobian_tw(p, prm));
            CHECK(s.residual < 1e-10);
            ++checked;
        } catch (const ComplexSpectrum&) {
            // fine: generic points may have complex pairs
        }
    }
    CHECK(checked > 20);
}

TEST_CASE("lambda2(X1) is exactly -eps/(2-c) and e2(X1) = u-axis") {
    ModelParams prm = ModelParams::with_mu(0.75, 1.0, -0.5, 3e-3, 0.1);
    EquilibriumSet e = compute_equilibria(0.75);
    SpectralData s = eigen_decompose_3x3(jacobian_tw(e.X1, prm));
    CHECK(s.lambda2 == doctest::Approx(-3e-3 / (2.0 - 0.1)).epsilon(1e-12));
    CHECK(std::abs(s.e2[2]) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("hyperbolicity classification across eps") {
    SingularLoopData loop = solve_singular_parameters(0.7);
    EquilibriumSet e = compute_equilibria(0.7);

    ModelParams prm = ModelParams::with_mu(0.7, loop.D0, loop.mu0, 1e-4, 0.0);
    HyperbolicityReport rep = classify_hyperbolicity(e, prm);
    CHECK(rep.pass);
    CHECK(rep.beta1 > 1.0);
    CHECK(rep.beta2 > 1.0);

    // eps = 0: the slow eigenvalue vanishes identically
    ModelParams fast = prm;
    fast.eps = 0.0;
    CHECK_THROWS_AS(classify_hyperbolicity(e, fast), NotHyperbolic);

    // lambda2 -> 0 monotonically while lambda1, lambda3 stay bounded away
    double prev = -1e9;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        ModelParams pe = ModelParams::with_mu(0.7, loop.D0, loop.mu0, eps, 0.0);
        HyperbolicityReport r2 = classify_hyperbolicity(e, pe);
        CHECK(r2.X1.lambda2 > prev);
        CHECK(r2.X1.lambda2 < 0.0);
        CHECK(std::abs(r2.X1.lambda1) > 0.01);
        CHECK(r2.X1.lambda3 > 0.1);
        CHECK(std::abs(r2.X2.lambda1) > 0.01);
        CHECK(r2.X2.lambda3 > 0.1);
        prev = r2.X1.lambda2;
    }
}

TEST_CASE("rescaled system eigenvalues are 1/eps times the originals") {
    SingularLoopData loop = solve_singular_parameters(0.8);
    EquilibriumSet e = compute_equilibria(0.8);
    double eps = 2e-3;
    ModelParams prm = ModelParams::with_mu(0.8, loop.D0, loop.mu0, eps, 0.0);
    Mat3 J = jacobian_tw(e.X2, prm);
    Mat3 Jr;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) Jr[i][j] = J[i][j] / eps;
    SpectralData a = eigen_decompose_3x3(J);
    SpectralData b = eigen_decompose_3x3(Jr);
    CHECK(b.lambda1 == doctest::Approx(a.lambda1 / eps).epsilon(1e-9));
    CHECK(b.lambda2 == doctest::Approx(a.lambda2 / eps).epsilon(1e-9));
    CHECK(b.lambda3 == doctest::Approx(a.lambda3 / eps).epsilon(1e-9));
}

TEST_CASE("kinetics stability: bistable states and the middle branch") {
    EquilibriumSet e = compute_equilibria(1.0);
    CHECK(kinetics_stability(0.0, 2.0, 1.0, 0.1));
    CHECK(kinetics_stability(e.q_b_plus, e.u_b, 1.0, 0.1));

    double qm, um;
    middle_kinetics_equilibrium(1.0, &qm, &um);
    CHECK_FALSE(kinetics_stability(qm, um, 1.0, 0.1));

    CHECK_THROWS_AS(kinetics_stability(0.5, 1.5, 1.0, 0.1), NotAnEquilibrium);
}
