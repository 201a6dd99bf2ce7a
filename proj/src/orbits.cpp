#include "barkley/orbits.hpp"

#include <algorithm>
#include <cmath>

#include "barkley/errors.hpp"
#include "barkley/model.hpp"

namespace barkley {

namespace {

// ---- Dormand-Prince 5(4) ----------------------------------------------

struct StepResult {
    Vec3 y;
    double err;  // scaled error norm
};

StepResult dp45_step(const PhasePoint& p, const ModelParams& prm, double h, const Vec3& k1,
                     Vec3& k_last, double rtol, double atol) {
    auto f = [&](const Vec3& y) { return tw_vector_field(PhasePoint::from(y), prm); };
    Vec3 y0 = p.vec();
    Vec3 k2 = f(y0 + (h * 0.2) * k1);
    Vec3 k3 = f(y0 + (3.0 * h / 40.0) * k1 + (9.0 * h / 40.0) * k2);
    Vec3 k4 = f(y0 + (44.0 * h / 45.0) * k1 - (56.0 * h / 15.0) * k2 + (32.0 * h / 9.0) * k3);
    Vec3 k5 = f(y0 + (19372.0 * h / 6561.0) * k1 - (25360.0 * h / 2187.0) * k2 +
                (64448.0 * h / 6561.0) * k3 - (212.0 * h / 729.0) * k4);
    Vec3 k6 = f(y0 + (9017.0 * h / 3168.0) * k1 - (355.0 * h / 33.0) * k2 +
                (46732.0 * h / 5247.0) * k3 + (49.0 * h / 176.0) * k4 -
                (5103.0 * h / 18656.0) * k5);
    Vec3 y5 = y0 + (35.0 * h / 384.0) * k1 + (500.0 * h / 1113.0) * k3 + (125.0 * h / 192.0) * k4 -
              (2187.0 * h / 6784.0) * k5 + (11.0 * h / 84.0) * k6;
    Vec3 k7 = f(y5);
    Vec3 y4 = y0 + (5179.0 * h / 57600.0) * k1 + (7571.0 * h / 16695.0) * k3 +
              (393.0 * h / 640.0) * k4 - (92097.0 * h / 339200.0) * k5 +
              (187.0 * h / 2100.0) * k6 + (h / 40.0) * k7;
    double err = 0.0;
    for (int i = 0; i < 3; ++i) {
        double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y5[i]));
        err = std::max(err, std::abs(y5[i] - y4[i]) / sc);
    }
    k_last = k7;  // FSAL
    return {y5, err};
}

// cubic Hermite interpolation over one accepted step
Vec3 hermite(double t, const Vec3& y0, const Vec3& f0, const Vec3& y1, const Vec3& f1, double h) {
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * y0 + (h10 * h) * f0 + h01 * y1 + (h11 * h) * f1;
}

struct Integrator {
    ModelParams prm;
    double rtol, atol, blowup;

    // integrate from (xi0, y) recording samples; stop() examined after every
    // accepted step, event() located within a step when it changes sign.
    template <class StopFn, class EventFn>
    bool run(double xi0, PhasePoint y, double xi_max, std::vector<TrajPoint>& out, StopFn stop,
             EventFn event, double* xi_event, PhasePoint* y_event) {
        double xi = xi0;
        Vec3 k1 = tw_vector_field(y, prm);
        double h = 1e-4;
        out.push_back({xi, y});
        double gprev = event ? event(y) : 0.0;
        int rejects = 0;
        while (xi < xi_max) {
            h = std::min(h, xi_max - xi);
            Vec3 knew;
            StepResult st = dp45_step(y, prm, h, k1, knew, rtol, atol);
            if (st.err > 1.0) {
                h *= std::max(0.2, 0.9 * std::pow(st.err, -0.2));
                if (++rejects > 2000) throw NoConvergence("integrate: step control stalled");
                continue;
            }
            rejects = 0;
            PhasePoint ynew = PhasePoint::from(st.y);
            if (event) {
                double gnew = event(ynew);
                if (gprev < 0.0 && gnew >= 0.0) {
                    // locate the crossing on the Hermite interpolant
                    Vec3 y0v = y.vec(), f0 = k1, f1 = knew;
                    double lo = 0.0, hi = 1.0;
                    for (int it = 0; it < 80; ++it) {
                        double mid = 0.5 * (lo + hi);
                        Vec3 ym = hermite(mid, y0v, f0, st.y, f1, h);
                        if (event(PhasePoint::from(ym)) < 0.0)
                            lo = mid;
                        else
                            hi = mid;
                    }
                    double tc = 0.5 * (lo + hi);
                    Vec3 yc = hermite(tc, y0v, f0, st.y, f1, h);
                    *xi_event = xi + tc * h;
                    *y_event = PhasePoint::from(yc);
                    out.push_back({*xi_event, *y_event});
                    return true;
                }
                gprev = gnew;
            }
            xi += h;
            y = ynew;
            k1 = knew;
            out.push_back({xi, y});
            double n = std::max({std::abs(y.q), std::abs(y.s), std::abs(y.u)});
            if (!std::isfinite(n)) throw NonFinite("integrate: state not finite");
            if (n > blowup) throw BlowUp("integrate: norm exceeded blow-up guard");
            if (stop && stop(xi, y)) return false;
            h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(st.err, 1e-10), -0.2)));
            h = std::min(h, 1.0);  // keep the sampling dense enough for interpolation
        }
        return false;
    }
};

PhasePoint seed_point(Side side, const EquilibriumSet& eqs, const SpectralData& spec,
                      double offset) {
    if (side == Side::front) {
        Vec3 e3 = spec.e3;
        if (e3[0] < 0.0) e3 = -1.0 * e3;  // leave X1 toward increasing q
        return PhasePoint::from(eqs.X1.vec() + offset * e3);
    }
    Vec3 e3 = spec.e3;
    if (e3[0] > 0.0) e3 = -1.0 * e3;  // leave X2 toward decreasing q
    return PhasePoint::from(eqs.X2.vec() + offset * e3);
}

} // namespace

Section make_section(Side side, const SingularLoopData& loop) {
    Section s;
    double qstar = 0.5 * loop.q_b_plus;  // (q_source + q_target)/2 for either side
    const ProfileEvaluator& P = side == Side::front ? loop.front : loop.back;
    double xi_ref;
    if (side == Side::front) {
        // q_f(xi) = p_f (1+tanh(z/2))/2 = qstar
        double th = 2.0 * qstar / loop.q_f_plus - 1.0;
        double z = 2.0 * std::atanh(th);
        xi_ref = z / (0.5 * std::sqrt(2.0) * P.decay_rate());
    } else {
        xi_ref = 0.0;  // back profile crosses q_b_plus/2 at its own center
    }
    ProfileState ps = P(xi_ref);
    s.point = {ps.q, ps.s, ps.u};
    s.normal = normalized(Vec3{ps.s, ps.sdot, 0.0});
    s.eperp = normalized(Vec3{-ps.sdot, ps.s, 0.0});
    s.xi_ref = xi_ref;
    return s;
}

std::vector<TrajPoint> integrate_orbit(const PhasePoint& seed, const ModelParams& params,
                                       double span, const ShootTol& tol) {
    Integrator integ{params, tol.rtol, tol.atol, tol.blowup};
    std::vector<TrajPoint> out;
    double xe;
    PhasePoint ye;
    integ.run(0.0, seed, span, out, std::function<bool(double, const PhasePoint&)>(),
              std::function<double(const PhasePoint&)>(), &xe, &ye);
    return out;
}

namespace {

struct CrossResult {
    PhasePoint state;
    double xi;
    std::vector<TrajPoint> traj;
};

CrossResult shoot_to_section(Side side, const ModelParams& prm, const EquilibriumSet& eqs,
                             const Section& sec, const ShootTol& tol) {
    SpectralData spec = eigen_decompose_3x3(jacobian_tw(side == Side::front ? eqs.X1 : eqs.X2, prm));
    PhasePoint seed = seed_point(side, eqs, spec, tol.seed_offset);
    double span = 120.0 + 60.0 / std::max(spec.lambda3, 1e-3);
    Integrator integ{prm, tol.rtol, tol.atol, tol.blowup};
    CrossResult res;
    auto event = [&](const PhasePoint& p) { return dot(p.vec() - sec.point, sec.normal); };
    bool hit = integ.run(0.0, seed, span,
                         res.traj, std::function<bool(double, const PhasePoint&)>(),
                         std::function<double(const PhasePoint&)>(event), &res.xi, &res.state);
    if (!hit) throw NoConvergence("shoot: orbit did not reach the section");
    return res;
}

} // namespace

double section_mismatch(Side side, double D, double mu, double eps, double c,
                        const SingularLoopData& loop, const Section& sec, const ShootTol& tol) {
    ModelParams prm = ModelParams::with_mu(loop.r, D, mu, eps, c);
    EquilibriumSet eqs = compute_equilibria(loop.r);
    CrossResult cr = shoot_to_section(side, prm, eqs, sec, tol);
    return dot(cr.state.vec() - sec.point, sec.eperp);
}

// ---- OrbitSolution assembly -------------------------------------------

struct OrbitBuilder {
    static OrbitSolution build(Side side, double r, double D, double mu, double eps, double c,
                               double miss, const SingularLoopData& /*loop*/, const Section& sec,
                               const ShootTol& tol) {
        OrbitSolution o;
        o.side = side;
        o.eps = eps;
        o.D_hat = D;
        o.mu_hat = mu;
        o.c = c;
        o.miss_norm = miss;
        o.r_ = r;

        ModelParams prm = ModelParams::with_mu(r, D, mu, eps, c);
        EquilibriumSet eqs = compute_equilibria(r);
        o.source = side == Side::front ? eqs.X1 : eqs.X2;
        o.target = side == Side::front ? eqs.X2 : eqs.X1;
        o.spec_source = eigen_decompose_3x3(jacobian_tw(o.source, prm));
        o.spec_target = eigen_decompose_3x3(jacobian_tw(o.target, prm));
        o.lam3_source_ = o.spec_source.lambda3;

        CrossResult cr = shoot_to_section(side, prm, eqs, sec, tol);
        double xi_cross = cr.xi;
        o.trajectory = std::move(cr.traj);

        // continue the fast leg until the orbit has collapsed onto the slow
        // manifold of the target side (or the transverse noise takes over)
        double u_tgt = o.target.u;
        auto slow_dist = [&](const PhasePoint& p) {
            if (side == Side::front) {
                if (r + p.u - 2.0 <= 0.0) return 1e9;
                double qk = q_on_m2_right(p.u, r);
                double sk = dq_on_m2_right_du(p.u, r) * eps * reaction_g(qk, p.u) / (p.u - c);
                return std::hypot(p.q - qk, p.s - sk);
            }
            return std::hypot(p.q, p.s);
        };
        double switch_thresh = side == Side::front
                                   ? std::max(1e-9, 2e-2 * eps)
                                   : 1e-4;
        double min_dist = 1e9;
        double span_cap = xi_cross + 40.0 + tol.span_factor /
                              std::max(std::abs(o.spec_target.lambda2), 1e-6);
        Integrator integ{prm, tol.rtol, tol.atol, tol.blowup};
        std::vector<TrajPoint> cont;
        auto stop = [&](double, const PhasePoint& p) {
            double d = slow_dist(p);
            min_dist = std::min(min_dist, d);
            return d < switch_thresh || (d > 50.0 * min_dist && min_dist < 1e-3);
        };
        double xe;
        PhasePoint ye;
        try {
            integ.run(xi_cross, cr.state, span_cap, cont,
                      std::function<bool(double, const PhasePoint&)>(stop),
                      std::function<double(const PhasePoint&)>(), &xe, &ye);
        } catch (const NumericalError&) {
            // keep whatever was integrated; the slow leg starts from the best point
        }
        // truncate the continuation at its closest approach to the slow manifold
        size_t best = 0;
        double bd = 1e18;
        for (size_t i = 0; i < cont.size(); ++i) {
            double d = slow_dist(cont[i].x);
            if (d < bd) { bd = d; best = i; }
        }
        for (size_t i = 1; i <= best; ++i) o.trajectory.push_back(cont[i]);

        // re-index xi so the section crossing sits at 0
        for (auto& tp : o.trajectory) tp.xi -= xi_cross;
        Vec3 dev = o.trajectory.front().x.vec() - o.source.vec();
        o.seed_dev_ = dev;

        // reduced slow leg down/up to the target equilibrium
        PhasePoint hand = o.trajectory.back().x;
        double xi0 = o.trajectory.back().xi;
        if (side == Side::front)
            build_front_slow_leg(o, r, D, mu, eps, c, hand.u, xi0, u_tgt, tol);
        else
            build_back_slow_leg(o, r, D, mu, eps, c, hand, xi0, tol);
        return o;
    }

    static void build_front_slow_leg(OrbitSolution& o, double r, double /*D*/, double /*mu*/, double eps,
                                     double c, double u0, double xi0, double u_b,
                                     const ShootTol& tol) {
        auto rhs = [&](double u) { return eps * reaction_g(q_on_m2_right(u, r), u) / (u - c); };
        double span_cap = tol.span_factor / std::max(std::abs(o.spec_target.lambda2), 1e-6);
        double xi = xi0, u = u0;
        double rate = std::abs(rhs(u)) / std::max(u - u_b, 1e-12);
        double h = std::min(0.05 / std::max(rate, 1e-9), span_cap / 4000.0);
        h = std::max(h, 1e-4);
        int since = 0;
        while (u - u_b > tol.slow_stop && xi - xi0 < span_cap) {
            double k1 = rhs(u);
            double k2 = rhs(u + 0.5 * h * k1);
            double k3 = rhs(u + 0.5 * h * k2);
            double k4 = rhs(u + h * k3);
            double un = u + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (un <= u_b) break;
            u = un;
            xi += h;
            if (++since >= 4) {
                since = 0;
                double qk = q_on_m2_right(u, r);
                double sk = dq_on_m2_right_du(u, r) * rhs(u);
                o.slow_leg.push_back({xi, {qk, sk, u}});
            }
        }
        double qk = q_on_m2_right(u, r);
        o.slow_leg.push_back({xi, {qk, dq_on_m2_right_du(u, r) * rhs(u), u}});
    }

    static void build_back_slow_leg(OrbitSolution& o, double /*r*/, double D, double mu, double eps,
                                    double c, const PhasePoint& hand, double xi0,
                                    const ShootTol& tol) {
        // WKB layer tail along M1: q decays through the contracting layer
        // eigenvalue while u creeps from u_b toward 2
        auto lam_minus = [&](double u) {
            double B = (u + mu) / D;
            return 0.5 * (B - std::sqrt(B * B - 4.0 * (u - 2.1) / D));
        };
        auto rhs = [&](double u) { return eps * (2.0 - u) / (u - c); };
        double span_cap = tol.span_factor / std::max(std::abs(o.spec_target.lambda2), 1e-6);
        double u = hand.u, xi = xi0;
        double lq = std::log(std::max(std::abs(hand.q), 1e-290));
        int sign = hand.q >= 0.0 ? 1 : -1;
        o.wkb_.push_back({xi, u, lq, double(sign)});
        double h = std::min(0.05 / std::max(std::abs(rhs(u)), 1e-9) * (2.0 - u), span_cap / 4000.0);
        h = std::max(h, 1e-4);
        int since = 0;
        while (2.0 - u > tol.slow_stop && xi - xi0 < span_cap) {
            double k1 = rhs(u);
            double k2 = rhs(u + 0.5 * h * k1);
            double k3 = rhs(u + 0.5 * h * k2);
            double k4 = rhs(u + h * k3);
            double un = u + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            lq += h * 0.5 * (lam_minus(u) + lam_minus(un));
            u = un;
            xi += h;
            if (++since >= 4) {
                since = 0;
                o.wkb_.push_back({xi, u, lq, double(sign)});
                double qd = lq > -700.0 ? sign * std::exp(lq) : 0.0;
                o.slow_leg.push_back({xi, {qd, lam_minus(u) * qd, u}});
            }
        }
        o.wkb_.push_back({xi, u, lq, double(sign)});
        double qd = lq > -700.0 ? sign * std::exp(lq) : 0.0;
        o.slow_leg.push_back({xi, {qd, lam_minus(u) * qd, u}});
    }
};

std::optional<std::pair<double, double>> OrbitSolution::tail(double xi) const {
    ModelParams prm = ModelParams::with_mu(r_, D_hat, mu_hat, eps, c);
    double xi_first = trajectory.front().xi;
    double xi_last = trajectory.back().xi;
    if (xi < xi_first) {
        // linear source asymptotics along the unstable mode
        double fac = lam3_source_ * (xi - xi_first);
        if (fac < -700.0) return std::make_pair(0.0, 0.0);
        double g = std::exp(fac);
        double s = seed_dev_[1] * g;
        return std::make_pair(s, lam3_source_ * s);
    }
    if (xi <= xi_last) {
        auto it = std::lower_bound(trajectory.begin(), trajectory.end(), xi,
                                   [](const TrajPoint& a, double v) { return a.xi < v; });
        if (it == trajectory.begin()) ++it;
        const TrajPoint& b = *it;
        const TrajPoint& a = *(it - 1);
        double h = b.xi - a.xi;
        double t = h > 0.0 ? (xi - a.xi) / h : 0.0;
        Vec3 fa = tw_vector_field(a.x, prm), fb = tw_vector_field(b.x, prm);
        Vec3 y = hermite(t, a.x.vec(), fa, b.x.vec(), fb, h);
        PhasePoint p = PhasePoint::from(y);
        Vec3 f = tw_vector_field(p, prm);
        return std::make_pair(p.s, f[1]);
    }
    // slow zone
    if (side == Side::front) {
        if (slow_leg.empty() || xi > slow_leg.back().xi) return std::nullopt;
        // interpolate u, then evaluate the slaved s and its analytic derivative
        auto it = std::lower_bound(slow_leg.begin(), slow_leg.end(), xi,
                                   [](const TrajPoint& a, double v) { return a.xi < v; });
        double u;
        if (it == slow_leg.begin())
            u = it->x.u;
        else {
            const TrajPoint& b = *it;
            const TrajPoint& a = *(it - 1);
            double t = (xi - a.xi) / (b.xi - a.xi);
            u = a.x.u + t * (b.x.u - a.x.u);
        }
        double R = r_ + 0.1;
        double qk = q_on_m2_right(u, r_);
        double qk1 = dq_on_m2_right_du(u, r_);
        double qk2 = -R / (4.0 * std::pow(R * (r_ + u - 2.0), 1.5));
        double g = reaction_g(qk, u);
        double U = eps * g / (u - c);
        double gq = dg_dq(qk, u), gu = dg_du(qk, u);
        double Up = eps * ((gq * qk1 + gu) * (u - c) - g) / ((u - c) * (u - c));
        double s = qk1 * U;
        double sdot = (qk2 * U + qk1 * Up) * U;
        return std::make_pair(s, sdot);
    }
    if (wkb_.empty() || xi > wkb_.back()[0]) return std::nullopt;
    auto it = std::lower_bound(wkb_.begin(), wkb_.end(), xi,
                               [](const std::array<double, 4>& a, double v) { return a[0] < v; });
    double u, lq;
    int sign;
    if (it == wkb_.begin()) {
        u = (*it)[1];
        lq = (*it)[2];
        sign = int((*it)[3]);
    } else {
        const auto& b = *it;
        const auto& a = *(it - 1);
        double t = (xi - a[0]) / (b[0] - a[0]);
        u = a[1] + t * (b[1] - a[1]);
        lq = a[2] + t * (b[2] - a[2]);
        sign = int(a[3]);
    }
    if (lq < -700.0) return std::make_pair(0.0, 0.0);
    double qd = sign * std::exp(lq);
    double B = (u + mu_hat) / D_hat;
    double disc = std::sqrt(B * B - 4.0 * (u - 2.1) / D_hat);
    double lm = 0.5 * (B - disc);
    double dlm_du = 0.5 / D_hat * (1.0 - (B - 2.0) / disc);
    double U = eps * (2.0 - u) / (u - c);
    double s = lm * qd;
    double sdot = (lm * lm + dlm_du * U) * qd;
    return std::make_pair(s, sdot);
}

PhasePoint OrbitSolution::eval(double xi) const {
    if (!trajectory.empty() && xi <= trajectory.back().xi) {
        auto it = std::lower_bound(trajectory.begin(), trajectory.end(), xi,
                                   [](const TrajPoint& a, double v) { return a.xi < v; });
        if (it == trajectory.begin()) return it->x;
        if (it == trajectory.end()) return trajectory.back().x;
        const TrajPoint& b = *it;
        const TrajPoint& a = *(it - 1);
        double t = (xi - a.xi) / (b.xi - a.xi);
        Vec3 y = a.x.vec() + t * (b.x.vec() - a.x.vec());
        return PhasePoint::from(y);
    }
    if (!slow_leg.empty() && xi <= slow_leg.back().xi) {
        auto it = std::lower_bound(slow_leg.begin(), slow_leg.end(), xi,
                                   [](const TrajPoint& a, double v) { return a.xi < v; });
        if (it == slow_leg.begin()) return it->x;
        if (it == slow_leg.end()) return slow_leg.back().x;
        const TrajPoint& b = *it;
        const TrajPoint& a = *(it - 1);
        double t = (xi - a.xi) / (b.xi - a.xi);
        Vec3 y = a.x.vec() + t * (b.x.vec() - a.x.vec());
        return PhasePoint::from(y);
    }
    return slow_leg.empty() ? trajectory.back().x : slow_leg.back().x;
}

OrbitSolution shoot_connection(Side side, double r, double eps, double guess_D, double guess_mu,
                               double c, const ShootTol& tol) {
    SingularLoopData loop = solve_singular_parameters(r);
    Section sec = make_section(side, loop);
    double D = guess_D, mu = guess_mu;
    double m = section_mismatch(side, D, mu, eps, c, loop, sec, tol);
    for (int it = 0; it < tol.newton_max; ++it) {
        if (std::abs(m) <= tol.mismatch_tol) {
            OrbitSolution o = OrbitBuilder::build(side, r, D, mu, eps, c, std::abs(m), loop, sec, tol);
            return o;
        }
        double h = tol.fd_step;
        double mp = section_mismatch(side, D, mu + h, eps, c, loop, sec, tol);
        double mm = section_mismatch(side, D, mu - h, eps, c, loop, sec, tol);
        double dmdmu = (mp - mm) / (2.0 * h);
        if (std::abs(dmdmu) < 1e-14) throw NewtonDiverged("shoot_connection: singular derivative");
        double step = -m / dmdmu;
        double alpha = 1.0;
        for (int ls = 0; ls < 8; ++ls) {
            double mt;
            try {
                mt = section_mismatch(side, D, mu + alpha * step, eps, c, loop, sec, tol);
            } catch (const NumericalError&) {
                alpha *= 0.5;
                continue;
            }
            if (std::abs(mt) < (1.0 - 1e-4 * alpha) * std::abs(m)) {
                mu += alpha * step;
                m = mt;
                break;
            }
            alpha *= 0.5;
            if (ls == 7) throw NewtonDiverged("shoot_connection: line search failed");
        }
    }
    if (std::abs(m) <= tol.mismatch_tol)
        return OrbitBuilder::build(side, r, D, mu, eps, c, std::abs(m), loop, sec, tol);
    throw NewtonDiverged("shoot_connection: iteration cap reached");
}

ContinuationResult continue_loop(double r, const std::vector<double>& eps_grid, double c,
                                 const ShootTol& tol) {
    SingularLoopData loop = solve_singular_parameters(r);
    Section sf = make_section(Side::front, loop);
    Section sb = make_section(Side::back, loop);
    ContinuationResult res;
    double D = loop.D0, mu = loop.mu0;
    for (double eps : eps_grid) {
        bool converged = false;
        double mf = 0.0, mb = 0.0, cond = 0.0;
        try {
            mf = section_mismatch(Side::front, D, mu, eps, c, loop, sf, tol);
            mb = section_mismatch(Side::back, D, mu, eps, c, loop, sb, tol);
            for (int it = 0; it < tol.newton_max; ++it) {
                double nm = std::max(std::abs(mf), std::abs(mb));
                if (nm <= tol.mismatch_tol) {
                    converged = true;
                    break;
                }
                double h = tol.fd_step;
                double J[2][2];
                {
                    double a1 = section_mismatch(Side::front, D + h, mu, eps, c, loop, sf, tol);
                    double a2 = section_mismatch(Side::front, D - h, mu, eps, c, loop, sf, tol);
                    double b1 = section_mismatch(Side::front, D, mu + h, eps, c, loop, sf, tol);
                    double b2 = section_mismatch(Side::front, D, mu - h, eps, c, loop, sf, tol);
                    J[0][0] = (a1 - a2) / (2.0 * h);
                    J[0][1] = (b1 - b2) / (2.0 * h);
                    a1 = section_mismatch(Side::back, D + h, mu, eps, c, loop, sb, tol);
                    a2 = section_mismatch(Side::back, D - h, mu, eps, c, loop, sb, tol);
                    b1 = section_mismatch(Side::back, D, mu + h, eps, c, loop, sb, tol);
                    b2 = section_mismatch(Side::back, D, mu - h, eps, c, loop, sb, tol);
                    J[1][0] = (a1 - a2) / (2.0 * h);
                    J[1][1] = (b1 - b2) / (2.0 * h);
                }
                double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
                if (std::abs(det) < 1e-14) throw NewtonDiverged("continue_loop: singular Jacobian");
                // condition number of the 2x2 from its singular values
                double a2_ = J[0][0] * J[0][0] + J[0][1] * J[0][1];
                double b2_ = J[1][0] * J[1][0] + J[1][1] * J[1][1];
                double ab = J[0][0] * J[1][0] + J[0][1] * J[1][1];
                double tr = a2_ + b2_;
                double dd = std::sqrt(std::max(0.0, (a2_ - b2_) * (a2_ - b2_) + 4.0 * ab * ab));
                cond = std::sqrt((tr + dd) / std::max(tr - dd, 1e-300));
                double sD = -(J[1][1] * mf - J[0][1] * mb) / det;
                double sMu = -(-J[1][0] * mf + J[0][0] * mb) / det;
                double alpha = 1.0;
                for (int ls = 0; ls < 8; ++ls) {
                    double tf, tb;
                    try {
                        tf = section_mismatch(Side::front, D + alpha * sD, mu + alpha * sMu, eps, c,
                                              loop, sf, tol);
                        tb = section_mismatch(Side::back, D + alpha * sD, mu + alpha * sMu, eps, c,
                                              loop, sb, tol);
                    } catch (const NumericalError&) {
                        alpha *= 0.5;
                        continue;
                    }
                    if (std::max(std::abs(tf), std::abs(tb)) < (1.0 - 1e-4 * alpha) * nm) {
                        D += alpha * sD;
                        mu += alpha * sMu;
                        mf = tf;
                        mb = tb;
                        break;
                    }
                    alpha *= 0.5;
                    if (ls == 7) throw NewtonDiverged("continue_loop: line search failed");
                }
            }
        } catch (const NumericalError&) {
            converged = false;
        }
        if (!converged) return res;  // partial table
        res.rows.push_back({eps, D, mu, std::max(std::abs(mf), std::abs(mb)), cond});
    }
    double eps_last = eps_grid.back();
    res.front = OrbitBuilder::build(Side::front, r, D, mu, eps_last, c,
                                    res.rows.back().miss_norm, loop, sf, tol);
    res.back = OrbitBuilder::build(Side::back, r, D, mu, eps_last, c,
                                   res.rows.back().miss_norm, loop, sb, tol);
    res.complete = true;
    return res;
}

TangencyReport tangency_check(const OrbitSolution& orbit, const SpectralData& target_spec,
                              int n_samples, double pass_deg) {
    TangencyReport rep;
    const std::vector<TrajPoint>& leg = orbit.slow_leg.empty() ? orbit.trajectory : orbit.slow_leg;
    if ((int)leg.size() < n_samples) throw Inconclusive("tangency_check: too few approach samples");
    Vec3 e2 = target_spec.e2;
    for (size_t i = leg.size() - n_samples; i < leg.size(); ++i) {
        Vec3 d = leg[i].x.vec() - orbit.target.vec();
        double nd = norm(d);
        if (nd < 1e-14) continue;
        double ca = std::abs(dot(d, e2)) / (nd * norm(e2));
        rep.angles_deg.push_back(std::acos(std::clamp(ca, 0.0, 1.0)) * 180.0 / M_PI);
    }
    if (rep.angles_deg.size() < 2) throw Inconclusive("tangency_check: degenerate approach");
    rep.final_angle_deg = rep.angles_deg.back();
    rep.decreasing = rep.angles_deg.back() <= rep.angles_deg.front();
    rep.pass = rep.decreasing && rep.final_angle_deg < pass_deg;
    return rep;
}

} // namespace barkley
