#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "barkley/errors.hpp"
#include "barkley/model.hpp"
#include "barkley/orbits.hpp"
#include "barkley/pde.hpp"

using namespace barkley;

namespace {

SimConfig cfg_at(double r, double D, double zeta, double eps) {
    SimConfig cfg;
    cfg.params.r = r;
    cfg.params.D = D;
    cfg.params.zeta = zeta;
    cfg.params.eps = eps;
    return cfg;
}

} // namespace

TEST_CASE("uniform states are exact discrete fixed points") {
    double r = 0.7;
    SingularLoopData L = solve_singular_parameters(r);
    EquilibriumSet e = compute_equilibria(r);
    SimConfig cfg = cfg_at(r, L.D0, 0.05, 1e-3);

    for (ProfileKind k : {ProfileKind::uniform_laminar, ProfileKind::uniform_turbulent}) {
        ProfileSpec spec;
        spec.kind = k;
        Field1D f = build_initial_profile(spec, e, L, cfg, 50.0, 400);
        double dt = compute_dt(f, cfg);
        Field1D g = step_field(f, cfg, dt);
        for (int i = 0; i < f.n; ++i) {
            CHECK(std::abs(g.q[i] - f.q[i]) < 1e-12);
            CHECK(std::abs(g.u[i] - f.u[i]) < 1e-12);
        }
    }
}

TEST_CASE("reaction residuals of the turbulent state are tiny") {
    double r = 1.1;
    EquilibriumSet e = compute_equilibria(r);
    CHECK(std::abs(reaction_f(e.q_b_plus, e.u_b, r)) < 1e-12);
    CHECK(std::abs(reaction_g(e.q_b_plus, e.u_b)) < 1e-11);
}

TEST_CASE("CFL violation and grid coarseness are rejected") {
    double r = 0.7;
    SingularLoopData L = solve_singular_parameters(r);
    EquilibriumSet e = compute_equilibria(r);
    SimConfig cfg = cfg_at(r, L.D0, 0.05, 1e-3);
    ProfileSpec spec;
    spec.kind = ProfileKind::uniform_turbulent;
    Field1D f = build_initial_profile(spec, e, L, cfg, 50.0, 400);
    double dt = compute_dt(f, cfg);
    CHECK_THROWS_AS(step_field(f, cfg, 3.0 * dt), CFLViolation);

    ProfileSpec front;
    front.kind = ProfileKind::simple_front;
    CHECK_THROWS_AS(build_initial_profile(front, e, L, cfg, 400.0, 64), GridTooCoarse);
}

TEST_CASE("conservation of the transport terms on a periodic grid") {
    // with both reactions off: diffusion telescopes exactly, the LLF u-flux
    // telescopes for any u, and the upwind q-advection telescopes for a
    // uniform wind
    SimConfig cfg = cfg_at(1.0, 0.8, 0.3, 0.0);
    cfg.reactions_off = true;
    Field1D f;
    f.L = 10.0;
    f.n = 256;
    f.dx = f.L / f.n;
    f.bc = BoundaryCondition::periodic;
    f.q.resize(f.n);
    f.u.resize(f.n);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ud(-0.2, 0.2);
    for (int i = 0; i < f.n; ++i) {
        f.q[i] = 0.3 + 0.2 * std::sin(2 * M_PI * i / f.n) + 0.05 * ud(rng);
        f.u[i] = 1.7;  // uniform wind so the q upwind differences telescope
    }
    double mq = 0.0, mu = 0.0;
    for (int i = 0; i < f.n; ++i) {
        mq += f.q[i] * f.dx;
        mu += f.u[i] * f.dx;
    }
    double dt = 0.5 * compute_dt(f, cfg);
    Field1D g = step_field(f, cfg, dt);
    double mq2 = 0.0, mu2 = 0.0;
    for (int i = 0; i < g.n; ++i) {
        mq2 += g.q[i] * f.dx;
        mu2 += g.u[i] * f.dx;
    }
    CHECK(std::abs(mq2 - mq) < 1e-12 * f.n);
    CHECK(std::abs(mu2 - mu) < 1e-12 * f.n);

    SUBCASE("u-mass stays conserved for a varying u field") {
        for (int i = 0; i < f.n; ++i) f.u[i] = 1.7 + 0.3 * std::cos(2 * M_PI * i / f.n);
        double m0 = 0.0;
        for (double v : f.u) m0 += v * f.dx;
        Field1D h = step_field(f, cfg, 0.5 * compute_dt(f, cfg));
        double m1 = 0.0;
        for (double v : h.u) m1 += v * f.dx;
        CHECK(std::abs(m1 - m0) < 1e-12 * f.n);
    }
}

TEST_CASE("one-step Richardson defect shrinks with dt") {
    double r = 0.7;
    SingularLoopData L = solve_singular_parameters(r);
    EquilibriumSet e = compute_equilibria(r);
    SimConfig cfg = cfg_at(r, L.D0, 0.05, 1e-2);
    ProfileSpec spec;
    spec.kind = ProfileKind::simple_front;
    int n = (int)std::ceil(120.0 / (0.1 * std::sqrt(L.D0) / e.q_f_plus));
    Field1D f = build_initial_profile(spec, e, L, cfg, 120.0, n);
    double dt = 0.5 * compute_dt(f, cfg);

    auto defect = [&](double step) {
        Field1D a = step_field(f, cfg, step);
        Field1D b = step_field(f, cfg, 0.5 * step);
        b = step_field(b, cfg, 0.5 * step);
        double d = 0.0;
        for (int i = 0; i < f.n; ++i) d = std::max(d, std::abs(a.q[i] - b.q[i]));
        return d;
    };
    double d1 = defect(dt);
    double d2 = defect(0.5 * dt);
    CHECK(d2 <= 0.55 * d1);  // halves or better
}

TEST_CASE("n-front initial profile crosses the mid level 2N+1 times") {
    double r = 0.7;
    SingularLoopData L = solve_singular_parameters(r);
    EquilibriumSet e = compute_equilibria(r);
    SimConfig cfg = cfg_at(r, L.D0, 0.05, 1e-2);
    ProfileSpec spec;
    spec.kind = ProfileKind::n_front;
    spec.N = 2;
    int n = (int)std::ceil(300.0 / (0.09 * std::sqrt(L.D0) / e.q_f_plus));
    Field1D f = build_initial_profile(spec, e, L, cfg, 300.0, n);
    double level = 0.5 * e.q_b_plus;
    int crossings = 0;
    for (int i = 0; i + 1 < f.n; ++i)
        if ((f.q[i] - level) * (f.q[i + 1] - level) < 0.0) ++crossings;
    CHECK(crossings == 2 * spec.N + 1);
}

TEST_CASE("laminar field has no trackable front") {
    double r = 0.7;
    SingularLoopData L = solve_singular_parameters(r);
    EquilibriumSet e = compute_equilibria(r);
    SimConfig cfg = cfg_at(r, L.D0, 0.05, 1e-3);
    cfg.T_end = 1.0;
    ProfileSpec spec;
    spec.kind = ProfileKind::uniform_laminar;
    Field1D f = build_initial_profile(spec, e, L, cfg, 50.0, 500);
    CHECK_THROWS_AS(measure_wave_speed(f, cfg, 0.5), LostFront);
}

TEST_CASE("bistability: small perturbations of both uniform states decay") {
    double r = 0.8;
    SingularLoopData L = solve_singular_parameters(r);
    EquilibriumSet e = compute_equilibria(r);
    double eps = 0.05;
    SimConfig cfg = cfg_at(r, L.D0, 0.05, eps);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (ProfileKind k : {ProfileKind::uniform_laminar, ProfileKind::uniform_turbulent}) {
        ProfileSpec spec;
        spec.kind = k;
        Field1D f = build_initial_profile(spec, e, L, cfg, 40.0, 320, BoundaryCondition::periodic);
        std::vector<double> q0 = f.q, u0 = f.u;
        for (int i = 0; i < f.n; ++i) {
            f.q[i] = std::max(f.q[i] + 1e-3 * gauss(rng), 0.0);
            f.u[i] += 1e-3 * gauss(rng);
        }
        double dt = compute_dt(f, cfg);
        double T = 50.0 / eps;
        int nst = (int)std::ceil(T / dt);
        for (int i = 0; i < nst; ++i) step_field_inplace(f, cfg, dt);
        double dev = 0.0;
        for (int i = 0; i < f.n; ++i)
            dev = std::max(dev, std::max(std::abs(f.q[i] - q0[i]), std::abs(f.u[i] - u0[i])));
        CHECK(dev < 1e-4);
    }
}

TEST_CASE("snapshot round-trip") {
    Field1D f;
    f.L = 3.0;
    f.n = 7;
    f.dx = f.L / f.n;
    f.t = 1.25;
    f.q = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
    f.u = {2.0, 1.9, 1.8, 1.7, 1.6, 1.5, 1.4};
    std::stringstream ss;
    write_snapshot(ss, f);
    std::string first_line = ss.str().substr(0, ss.str().find('\n'));
    CHECK(first_line == "# t=1.25 n=7 L=3");
    Field1D g = read_snapshot(ss);
    CHECK(g.n == f.n);
    CHECK(g.t == f.t);
    for (int i = 0; i < f.n; ++i) {
        CHECK(g.q[i] == f.q[i]);
        CHECK(g.u[i] == f.u[i]);
    }
}

TEST_CASE("back-type interface travels at the loop speed, same sign as the front") {
    // the loop's front and back share (D, mu), so a turbulent-left interface
    // (the mirrored orientation) translates at the same c = -mu - zeta rather
    // than at an opposite-signed speed: the pair forms a rigidly drifting slug
    double r = 0.7, eps = 1e-2, zeta = 0.05;
    ContinuationResult cont = continue_loop(r, {eps});
    REQUIRE(cont.complete);
    double D = cont.rows[0].D_hat, mu = cont.rows[0].mu_hat;
    double c_expect = -mu - zeta;

    SingularLoopData L = solve_singular_parameters(r);
    EquilibriumSet e = compute_equilibria(r);
    SimConfig cfg = cfg_at(r, D, zeta, eps);
    cfg.T_end = 70.0;
    double dx = 0.1 * std::sqrt(D) / e.q_f_plus;
    int n = (int)std::ceil(300.0 / dx);
    ProfileSpec spec;
    spec.kind = ProfileKind::simple_back;
    Field1D f = build_initial_profile(spec, e, L, cfg, 300.0, n);
    double dt = compute_dt(f, cfg);
    for (int i = 0; i < (int)std::ceil(40.0 / dt); ++i) step_field_inplace(f, cfg, dt);
    WaveSpeed ws = measure_wave_speed(f, cfg, 0.5 * e.q_b_plus);
    CHECK(ws.c > 0.0);
    CHECK(std::abs(ws.c - c_expect) / c_expect < 0.06);
}

TEST_CASE("growth probe at the uniform laminar state is strictly negative") {
    double r = 0.7;
    SingularLoopData L = solve_singular_parameters(r);
    EquilibriumSet e = compute_equilibria(r);
    SimConfig cfg = cfg_at(r, L.D0, 0.05, 1e-3);
    ProfileSpec spec;
    spec.kind = ProfileKind::uniform_laminar;
    Field1D f = build_initial_profile(spec, e, L, cfg, 60.0, 480);
    GrowthProbeOptions go;
    go.horizon = 60.0;
    double lam = growth_rate_probe(f, cfg, go);
    CHECK(lam < 0.0);

    go.translation_mode = true;  // no mode on a uniform base
    CHECK_THROWS_AS(growth_rate_probe(f, cfg, go), NotSettled);
}

TEST_CASE("halving dx changes the measured wave speed by under one percent") {
    double r = 0.7, eps = 1e-2, zeta = 0.05;
    ContinuationResult cont = continue_loop(r, {eps});
    REQUIRE(cont.complete);
    double D = cont.rows[0].D_hat, mu = cont.rows[0].mu_hat;
    SingularLoopData L = solve_singular_parameters(r);
    EquilibriumSet e = compute_equilibria(r);
    auto speed_at = [&](double dx) {
        SimConfig cfg = cfg_at(r, D, zeta, eps);
        cfg.T_end = 14.0;
        cfg.sample_stride = 40;
        int n = (int)std::ceil(160.0 / dx);
        ProfileSpec spec;
        spec.kind = ProfileKind::simple_front;
        Field1D f = build_initial_profile(spec, e, L, cfg, 160.0, n);
        double dt = compute_dt(f, cfg);
        for (int i = 0; i < (int)std::ceil(12.0 / dt); ++i) step_field_inplace(f, cfg, dt);
        return measure_wave_speed(f, cfg, 0.5 * e.q_b_plus).c;
    };
    double dx0 = 0.024;
    double c1 = speed_at(dx0);
    double c2 = speed_at(0.5 * dx0);
    CHECK(std::abs(c1 - c2) / std::abs(c2) < 0.01);
    CHECK(std::abs(c1 - (-mu - zeta)) / (-mu - zeta) < 0.05);
}
