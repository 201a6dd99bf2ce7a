#include "barkley/melnikov.hpp"

#include <cmath>

#include "barkley/errors.hpp"

namespace barkley {

KernelSet eval_kernels(double q_plus, double q_minus, double tol) {
    // substitution t = phi(chi): exp(-alpha chi) = ((1-t)/t)^nu with
    // nu = 1 - 2 q_minus/q_plus, phi' dchi = dt, phi' = (sqrt2/2) t (1-t)
    double nu = 1.0 - 2.0 * q_minus / q_plus;
    // endpoint exponents: t^(k-nu) (1-t)^(nu) for K_k; t^(1-nu) (1-t)^(1+nu) for I2
    double min_exp = std::min({1.0 - nu, 1.0 + nu, 2.0 - nu, 2.0 + nu});
    if (min_exp <= 0.0) throw NonDecaying("eval_kernels: kernel not integrable at an endpoint");
    double w_max = std::max(6.5, std::asinh(2.0 / (M_PI * min_exp) * 40.0) + 1.5);

    KernelSet k;
    const double s22 = std::sqrt(2.0) / 2.0;
    auto I2f = [&](double lt, double l1t) { return std::log(s22) + (1.0 - nu) * lt + (1.0 + nu) * l1t; };
    auto K1f = [&](double lt, double l1t) { return (1.0 - nu) * lt + nu * l1t; };
    auto K2f = [&](double lt, double l1t) { return (2.0 - nu) * lt + nu * l1t; };
    auto K3f = [&](double lt, double l1t) { return (3.0 - nu) * lt + nu * l1t; };
    QuadResult a = tanh_sinh_01_log(I2f, tol, w_max);
    QuadResult b = tanh_sinh_01_log(K1f, tol, w_max);
    QuadResult c = tanh_sinh_01_log(K2f, tol, w_max);
    QuadResult d = tanh_sinh_01_log(K3f, tol, w_max);
    k.I2 = a.value;
    k.K1 = b.value;
    k.K2 = c.value;
    k.K3 = d.value;
    k.err = std::max({a.err, b.err, c.err, d.err});
    return k;
}

MelnikovReport eval_melnikov_suite(double r, double tol) {
    SingularLoopData L = solve_singular_parameters(r);
    double R = r + 0.1;
    double pf = L.q_f_plus, pb = L.q_b_plus;
    double af = pf * std::sqrt(R / L.D0), ab = pb * std::sqrt(R / L.D0);
    double s2 = std::sqrt(2.0);

    MelnikovReport rep;
    rep.r = r;
    rep.kf = eval_kernels(pf, L.q_f_minus, tol);
    rep.kb = eval_kernels(pb, L.q_b_minus, tol);
    const KernelSet& kf = rep.kf;
    const KernelSet& kb = rep.kb;

    double cf = pf - 2.0 * L.q_f_minus;  // = 3 q_f_plus - 4
    double cb = pb - 2.0 * L.q_b_minus;

    rep.Mhat_f = -pf * L.D0 * s2 * cf / (2.0 * (L.mu0 + 2.0)) * kf.I2;
    rep.M_f = 0.5 * pf * s2 * cf * kf.I2 + (0.1 / R) * kf.K1 - 2.0 * pf * kf.K2 + pf * pf * kf.K3;
    // the back-side mu-kernel carries the same structure as the front one;
    // written through the matching condition it is -q_b_plus sqrt(D0/R) I2_b
    rep.Mhat_b = -pb * std::sqrt(L.D0 / R) * kb.I2;
    rep.M_b = -0.5 * pb * s2 * cb * kb.I2 + ((L.u_b - 2.1) / R) * kb.K1 + 2.0 * pb * kb.K2 -
              pb * pb * kb.K3;
    rep.Mtilde_f = kf.K1 - af * kf.I2;
    rep.Mhat = rep.M_b / rep.Mhat_b - rep.M_f / rep.Mhat_f;

    rep.dQf_dmu = (pf * pf * R / (L.D0 * L.D0)) * rep.Mhat_f;
    rep.dQb_dmu = (pb * pb * R / (L.D0 * L.D0)) * rep.Mhat_b;
    rep.dQf_du = (pf * pf / L.D0) * rep.Mtilde_f;
    rep.dQb_du = -(pb * pb / L.D0) * (ab * kb.I2 + kb.K1);
    rep.quad_err = std::max(kf.err, kb.err);
    return rep;
}

double find_beta(double tol) {
    auto mt = [](double r) { return eval_melnikov_suite(r, 1e-12).Mtilde_f; };
    double lo = 2.0 / 3.0 + 1e-6, hi = 1.0;
    double flo = mt(lo), fhi = mt(hi);
    if (!(flo > 0.0 && fhi < 0.0)) throw NoRoot("find_beta: no sign change on (2/3, 1)");
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (mt(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double melnikov_direct_B(Side side, const SingularLoopData& loop, double tol) {
    const ProfileEvaluator& P = side == Side::front ? loop.front : loop.back;
    double ustar = side == Side::front ? 2.0 : loop.u_b;
    double beta = (loop.mu0 + ustar) / loop.D0;
    auto f = [&](double xi) {
        ProfileState st = P(xi);
        return std::exp(-beta * xi) * st.s * st.s;
    };
    QuadResult q = integrate_real_line(f, tol);
    return -q.value / loop.D0;
}

double dqb_du_direct(const SingularLoopData& loop, double tol) {
    double beta = (loop.mu0 + loop.u_b) / loop.D0;
    auto f = [&](double xi) {
        ProfileState st = loop.back(xi);
        return std::exp(-beta * xi) * st.s * (st.s - st.q);
    };
    QuadResult q = integrate_real_line(f, tol, {16.0, 1e7, 1e-16});
    return -q.value / loop.D0;
}

} // namespace barkley
