#include "barkley/model.hpp"

#include <cmath>
#include <stdexcept>

#include "barkley/errors.hpp"

namespace barkley {

double reaction_f(double q, double u, double r) {
    double d = q - 1.0;
    return q * (r + u - 2.0 - (r + 0.1) * d * d);
}

double reaction_g(double q, double u) { return 2.0 - u + 2.0 * q * (1.0 - u); }

double df_dq(double q, double u, double r) {
    double d = q - 1.0;
    return (r + u - 2.0 - (r + 0.1) * d * d) - 2.0 * q * (r + 0.1) * d;
}

double df_du(double q, double /*u*/, double /*r*/) { return q; }

double dg_dq(double /*q*/, double u) { return 2.0 * (1.0 - u); }

double dg_du(double q, double /*u*/) { return -1.0 - 2.0 * q; }

double m2_height(double q, double r) {
    double d = q - 1.0;
    return 2.0 - r + (r + 0.1) * d * d;
}

double q_on_m2_right(double u, double r) {
    return 1.0 + std::sqrt((r + u - 2.0) / (r + 0.1));
}

double dq_on_m2_right_du(double u, double r) {
    return 1.0 / (2.0 * std::sqrt((r + 0.1) * (r + u - 2.0)));
}

Vec3 tw_vector_field(const PhasePoint& p, const ModelParams& params) {
    if (std::abs(p.u - params.c) < params.pole_tol)
        throw PoleAtWaveSpeed("tw_vector_field: |u - c| below pole threshold");
    double mu = params.mu();
    return {p.s,
            ((p.u + mu) * p.s - reaction_f(p.q, p.u, params.r)) / params.D,
            params.eps * reaction_g(p.q, p.u) / (p.u - params.c)};
}

namespace {

// Residual of the M2/H0 intersection as a function of u, on the q > 1 branch.
double ub_residual(double u, double r) {
    double q = (2.0 - u) / (2.0 * (u - 1.0));
    double d = q - 1.0;
    return 2.0 - r + (r + 0.1) * d * d - u;
}

double dub_residual_du(double u, double r) {
    double q = (2.0 - u) / (2.0 * (u - 1.0));
    double dq = -0.5 / ((u - 1.0) * (u - 1.0));
    return 2.0 * (r + 0.1) * (q - 1.0) * dq - 1.0;
}

} // namespace

double compute_ub(double r, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("compute_ub: tol must be positive");
    double lo = 6.0 / 5.0, hi = 4.0 / 3.0;
    double flo = ub_residual(lo, r), fhi = ub_residual(hi, r);
    if (!(flo > 0.0 && fhi < 0.0))
        throw NoRoot("compute_ub: residual does not change sign on [6/5, 4/3] (r <= 2/3?)");
    for (int i = 0; i < 200 && hi - lo > tol; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = ub_residual(mid, r);
        if (fm > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    double u = 0.5 * (lo + hi);
    // two Newton polish steps sharpen the bisection root to machine precision
    for (int i = 0; i < 2; ++i) {
        double du = ub_residual(u, r) / dub_residual_du(u, r);
        double un = u - du;
        if (un > 6.0 / 5.0 && un < 4.0 / 3.0) u = un;
    }
    return u;
}

EquilibriumSet compute_equilibria(double r, double tol) {
    EquilibriumSet e;
    e.u_b = compute_ub(r, tol);
    double R = r + 0.1;
    double sf = std::sqrt(r / R);
    // r + u_b - 2 vanishes quadratically as r -> 2/3; guard the rounding tail
    double sb = std::sqrt(std::max(r + e.u_b - 2.0, 0.0) / R);
    e.q_f_plus = 1.0 + sf;
    e.q_f_minus = 1.0 - sf;
    e.q_b_plus = 1.0 + sb;
    e.q_b_minus = 1.0 - sb;
    e.X1 = {0.0, 0.0, 2.0};
    e.X2 = {e.q_b_plus, 0.0, e.u_b};
    e.Y1 = {e.q_f_plus, 0.0, 2.0};
    e.Y2 = {0.0, 0.0, e.u_b};
    return e;
}

void middle_kinetics_equilibrium(double r, double* q_out, double* u_out) {
    // On M2, u = m2_height(q); substitute into g = 0 and bisect in q on (0, 1).
    auto res = [&](double q) { return reaction_g(q, m2_height(q, r)); };
    double lo = 1e-9, hi = 1.0 - 1e-9;
    double flo = res(lo), fhi = res(hi);
    if (flo * fhi > 0.0) throw NoRoot("middle_kinetics_equilibrium: no sign change on (0,1)");
    for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
        double mid = 0.5 * (lo + hi);
        if (res(mid) * flo > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    double q = 0.5 * (lo + hi);
    *q_out = q;
    *u_out = m2_height(q, r);
}

} // namespace barkley
