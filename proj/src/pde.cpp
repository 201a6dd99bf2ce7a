#include "barkley/pde.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "barkley/errors.hpp"
#include "barkley/model.hpp"

namespace barkley {

namespace {

inline int wrap(int i, int n) { return i < 0 ? i + n : (i >= n ? i - n : i); }

// right-hand side of the method-of-lines system, optionally in a moving frame
void rhs_field(const Field1D& f, const SimConfig& cfg, std::vector<double>& dq,
               std::vector<double>& du) {
    const int n = f.n;
    const double dx = f.dx;
    const double r = cfg.params.r, D = cfg.params.D, zeta = cfg.params.zeta, eps = cfg.params.eps;
    const double fc = cfg.frame_speed;
    const bool per = f.bc == BoundaryCondition::periodic;
    auto Q = [&](int i) { return per ? f.q[wrap(i, n)] : f.q[std::clamp(i, 0, n - 1)]; };
    auto U = [&](int i) { return per ? f.u[wrap(i, n)] : f.u[std::clamp(i, 0, n - 1)]; };
    for (int i = 0; i < n; ++i) {
        double qm = Q(i - 1), q0 = f.q[i], qp = Q(i + 1);
        double um = U(i - 1), u0 = f.u[i], up = U(i + 1);
        double lap = (qp - 2.0 * q0 + qm) / (dx * dx);
        double a = zeta - u0 + fc;
        double qx = a > 0.0 ? (q0 - qm) / dx : (qp - q0) / dx;
        // -(u^2/2)_x with local Lax-Friedrichs flux
        double Fm = 0.25 * (um * um + u0 * u0) - 0.5 * std::max(std::abs(um), std::abs(u0)) * (u0 - um);
        double Fp = 0.25 * (u0 * u0 + up * up) - 0.5 * std::max(std::abs(u0), std::abs(up)) * (up - u0);
        double ux = fc > 0.0 ? (u0 - um) / dx : (up - u0) / dx;
        dq[i] = D * lap + a * qx;
        du[i] = -(Fp - Fm) / dx + fc * ux;
        if (!cfg.reactions_off) {
            dq[i] += reaction_f(q0, u0, r);
            du[i] += eps * reaction_g(q0, u0);
        }
    }
}

void heun(Field1D& f, const SimConfig& cfg, double dt, std::vector<double>& k1q,
          std::vector<double>& k1u, std::vector<double>& k2q, std::vector<double>& k2u,
          Field1D& tmp, bool clamp) {
    rhs_field(f, cfg, k1q, k1u);
    tmp.q.resize(f.n);
    tmp.u.resize(f.n);
    tmp.n = f.n;
    tmp.dx = f.dx;
    tmp.L = f.L;
    tmp.bc = f.bc;
    for (int i = 0; i < f.n; ++i) {
        tmp.q[i] = f.q[i] + dt * k1q[i];
        tmp.u[i] = f.u[i] + dt * k1u[i];
    }
    rhs_field(tmp, cfg, k2q, k2u);
    for (int i = 0; i < f.n; ++i) {
        f.q[i] += 0.5 * dt * (k1q[i] + k2q[i]);
        f.u[i] += 0.5 * dt * (k1u[i] + k2u[i]);
        if (clamp && f.q[i] < 0.0) f.q[i] = 0.0;  // turbulence level kept nonnegative
    }
    f.t += dt;
}

struct Workspace {
    std::vector<double> k1q, k1u, k2q, k2u;
    Field1D tmp;
    void size(int n) {
        k1q.resize(n);
        k1u.resize(n);
        k2q.resize(n);
        k2u.resize(n);
    }
};

double crossing_position(const Field1D& f, double level, bool* found) {
    *found = false;
    double pos = 0.0;
    int count = 0;
    for (int i = 0; i + 1 < f.n; ++i) {
        if ((f.q[i] - level) * (f.q[i + 1] - level) < 0.0) {
            if (count == 0)
                pos = (i + (level - f.q[i]) / (f.q[i + 1] - f.q[i])) * f.dx;
            ++count;
        }
    }
    *found = count >= 1;
    return pos;
}

} // namespace

Field1D build_initial_profile(const ProfileSpec& kind, const EquilibriumSet& eqs,
                              const SingularLoopData& /*loop*/, const SimConfig& cfg, double L, int n,
                              BoundaryCondition bc) {
    Field1D f;
    f.L = L;
    f.n = n;
    f.dx = L / n;
    f.bc = bc;
    f.q.assign(n, 0.0);
    f.u.assign(n, 2.0);
    const double r = cfg.params.r, D = cfg.params.D, eps = cfg.params.eps;

    if (kind.kind == ProfileKind::uniform_laminar) return f;
    if (kind.kind == ProfileKind::uniform_turbulent) {
        std::fill(f.q.begin(), f.q.end(), eqs.q_b_plus);
        std::fill(f.u.begin(), f.u.end(), eqs.u_b);
        return f;
    }

    if (f.dx > 0.1 * std::sqrt(D) / eqs.q_f_plus)
        throw GridTooCoarse("build_initial_profile: dx must not exceed 0.1 sqrt(D)/q_f_plus");

    double af = eqs.q_f_plus * std::sqrt((r + 0.1) / D);
    double ab = eqs.q_b_plus * std::sqrt((r + 0.1) / D);
    double W = eps > 0.0 ? std::min((1.0 / eps) * f.dx, 0.45 * L) : 0.2 * L;

    auto front_q = [&](double x) {  // rises 0 -> q_f_plus
        double z = 0.5 * std::sqrt(2.0) * af * x;
        return eqs.q_f_plus * 0.5 * (1.0 + std::tanh(0.5 * z));
    };
    auto back_q = [&](double x) {  // falls q_b_plus -> 0
        double z = 0.5 * std::sqrt(2.0) * ab * x;
        return eqs.q_b_plus * 0.5 * (1.0 - std::tanh(0.5 * z));
    };
    auto qK = [&](double u) {
        return r + u - 2.0 > 0.0 ? q_on_m2_right(u, r) : 1.0;
    };

    if (kind.kind == ProfileKind::simple_front) {
        double x0 = L / 3.0;
        for (int i = 0; i < n; ++i) {
            double x = i * f.dx;
            double uramp = x < x0 ? 2.0
                                  : (x < x0 + W ? 2.0 + (eqs.u_b - 2.0) * (x - x0) / W : eqs.u_b);
            f.u[i] = uramp;
            f.q[i] = std::min(front_q(x - x0), x > x0 + 3.0 / af ? qK(uramp) : 1e30);
        }
        return f;
    }
    if (kind.kind == ProfileKind::simple_back) {
        double x0 = L / 3.0;
        for (int i = 0; i < n; ++i) {
            double x = i * f.dx;
            double uramp = x < x0 ? eqs.u_b
                                  : (x < x0 + W ? eqs.u_b + (2.0 - eqs.u_b) * (x - x0) / W : 2.0);
            f.u[i] = uramp;
            f.q[i] = x < x0 ? eqs.q_b_plus : back_q(x - x0);
        }
        return f;
    }

    // n_front: 2N+1 alternating interfaces (front, back, ..., front); the
    // profile runs laminar on the left to turbulent on the right and crosses
    // the mid level q_b_plus/2 exactly 2N+1 times
    int N = std::max(kind.N, 1);
    int n_if = 2 * N + 1;
    std::vector<double> gaps = kind.spacings;
    if ((int)gaps.size() < n_if - 1) gaps.assign(n_if - 1, 0.7 * L / n_if);
    std::vector<double> pos(n_if);
    pos[0] = L / 8.0;
    for (int k = 1; k < n_if; ++k) pos[k] = pos[k - 1] + gaps[k - 1];
    for (int i = 0; i < n; ++i) {
        double xi = i * f.dx;
        double level = 0.0;  // 0 = laminar plateau, 1 = turbulent plateau
        for (int k = 0; k < n_if; ++k) {
            double rate = (k % 2 == 0 ? af : ab) * std::sqrt(2.0) / 4.0;
            double st = 0.5 * (1.0 + std::tanh(rate * (xi - pos[k])));
            level += (k % 2 == 0 ? st : -st);
        }
        level = std::clamp(level, 0.0, 1.0);
        f.q[i] = eqs.q_b_plus * level;
        f.u[i] = 2.0 + (eqs.u_b - 2.0) * level;
    }
    return f;
}

double compute_dt(const Field1D& f, const SimConfig& cfg) {
    double amax = 0.0;
    for (double u : f.u)
        amax = std::max(amax, std::max(std::abs(cfg.params.zeta - u + cfg.frame_speed),
                                       std::abs(u) + std::abs(cfg.frame_speed)));
    double denom = amax / f.dx + 2.0 * cfg.params.D / (f.dx * f.dx);
    return cfg.cfl / denom;
}

Field1D step_field(const Field1D& f, const SimConfig& cfg, double dt) {
    double amax = 0.0;
    for (double u : f.u)
        amax = std::max(amax, std::max(std::abs(cfg.params.zeta - u + cfg.frame_speed),
                                       std::abs(u) + std::abs(cfg.frame_speed)));
    double cfl = dt * amax / f.dx + 2.0 * cfg.params.D * dt / (f.dx * f.dx);
    if (cfl > cfg.cfl + 1e-12)
        throw CFLViolation("step_field: dt violates the CFL bound");
    Field1D out = f;
    Workspace ws;
    ws.size(f.n);
    heun(out, cfg, dt, ws.k1q, ws.k1u, ws.k2q, ws.k2u, ws.tmp, true);
    for (int i = 0; i < out.n; ++i)
        if (!std::isfinite(out.q[i]) || !std::isfinite(out.u[i]))
            throw NonFinite("step_field: state not finite");
    return out;
}

void step_field_inplace(Field1D& f, const SimConfig& cfg, double dt) {
    static thread_local Workspace ws;
    ws.size(f.n);
    heun(f, cfg, dt, ws.k1q, ws.k1u, ws.k2q, ws.k2u, ws.tmp, true);
}

WaveSpeed measure_wave_speed(Field1D f, const SimConfig& cfg, double level) {
    bool found;
    crossing_position(f, level, &found);
    if (!found) throw LostFront("measure_wave_speed: no level crossing in the initial field");
    double dt = compute_dt(f, cfg);
    int nst = (int)std::ceil(cfg.T_end / dt);
    std::vector<double> ts, xs;
    for (int i = 0; i < nst; ++i) {
        step_field_inplace(f, cfg, dt);
        if (i % cfg.sample_stride == 0) {
            double p = crossing_position(f, level, &found);
            if (!found) throw LostFront("measure_wave_speed: crossing disappeared");
            if (p < 5.0 * f.dx || p > f.L - 5.0 * f.dx)
                throw LostFront("measure_wave_speed: crossing left the domain");
            ts.push_back(f.t);
            xs.push_back(p);
        }
    }
    size_t h0 = ts.size() / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (size_t i = h0; i < ts.size(); ++i) {
        sx += ts[i];
        sy += xs[i];
        sxx += ts[i] * ts[i];
        sxy += ts[i] * xs[i];
        ++m;
    }
    double det = m * sxx - sx * sx;
    WaveSpeed ws;
    ws.c = (m * sxy - sx * sy) / det;
    double icpt = (sy - ws.c * sx) / m;
    double ss = 0.0;
    for (size_t i = h0; i < ts.size(); ++i) {
        double e = xs[i] - (ws.c * ts[i] + icpt);
        ss += e * e;
    }
    ws.fit_residual = std::sqrt(ss / m);
    return ws;
}

double settle_traveling(Field1D& f, SimConfig& cfg, double level, double drift_tol,
                        double shape_tol, double T_budget) {
    double spent = 0.0;
    // stage 1: frame-speed correction from the residual crossing drift
    for (int round = 0; round < 12; ++round) {
        double dt = compute_dt(f, cfg);
        double T = 50.0;
        int nst = (int)std::ceil(T / dt);
        std::vector<double> ts, xs;
        bool found;
        for (int i = 0; i < nst; ++i) {
            step_field_inplace(f, cfg, dt);
            if (i % 50 == 0) {
                double p = crossing_position(f, level, &found);
                if (!found) throw LostFront("settle_traveling: crossing disappeared");
                ts.push_back(f.t);
                xs.push_back(p);
            }
        }
        spent += T;
        size_t h0 = ts.size() / 2;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = 0;
        for (size_t i = h0; i < ts.size(); ++i) {
            sx += ts[i]; sy += xs[i]; sxx += ts[i] * ts[i]; sxy += ts[i] * xs[i]; ++m;
        }
        double drift = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        cfg.frame_speed += drift;
        if (std::abs(drift) < drift_tol) break;
        if (spent > T_budget) throw NotSettled("settle_traveling: frame correction budget exceeded");
    }
    // stage 2: relax until the shape change per unit time is small
    while (spent < T_budget) {
        double dt = compute_dt(f, cfg);
        double T = 100.0;
        std::vector<double> q0 = f.q, u0 = f.u;
        int nst = (int)std::ceil(T / dt);
        for (int i = 0; i < nst; ++i) step_field_inplace(f, cfg, dt);
        spent += T;
        double d = 0.0;
        for (int i = 0; i < f.n; ++i)
            d = std::max(d, std::max(std::abs(f.q[i] - q0[i]), std::abs(f.u[i] - u0[i])));
        if (d / T < shape_tol) return cfg.frame_speed;
    }
    throw NotSettled("settle_traveling: shape did not settle within the budget");
}

double growth_rate_probe(const Field1D& base, const SimConfig& cfg,
                         const GrowthProbeOptions& opts) {
    const int n = base.n;
    // translation mode of the frozen profile
    std::vector<double> Tq(n), Tu(n);
    for (int i = 0; i < n; ++i) {
        int ip = std::min(i + 1, n - 1), im = std::max(i - 1, 0);
        Tq[i] = (base.q[ip] - base.q[im]) / ((ip - im) * base.dx);
        Tu[i] = (base.u[ip] - base.u[im]) / ((ip - im) * base.dx);
    }
    double den = 0.0;
    for (int i = 0; i < n; ++i) den += Tq[i] * Tq[i] + Tu[i] * Tu[i];
    bool have_mode = den > 1e-20;  // uniform bases carry no translation mode

    std::vector<double> vq(n), vu(n);
    if (opts.translation_mode) {
        if (!have_mode)
            throw NotSettled("growth_rate_probe: base has no translation mode");
        double s = std::sqrt(den);
        for (int i = 0; i < n; ++i) {
            vq[i] = Tq[i] / s;
            vu[i] = Tu[i] / s;
        }
    } else {
        std::mt19937_64 rng(opts.seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int i = 0; i < n; ++i) {
            vq[i] = gauss(rng);
            vu[i] = gauss(rng);
        }
        double ip = 0.0;
        if (have_mode) {
            for (int i = 0; i < n; ++i) ip += vq[i] * Tq[i] + vu[i] * Tu[i];
            ip /= den;
        }
        double nn = 0.0;
        for (int i = 0; i < n; ++i) {
            vq[i] -= ip * Tq[i];
            vu[i] -= ip * Tu[i];
            nn += vq[i] * vq[i] + vu[i] * vu[i];
        }
        nn = std::sqrt(nn);
        for (int i = 0; i < n; ++i) {
            vq[i] /= nn;
            vu[i] /= nn;
        }
    }

    // directional finite difference of the discrete right-hand side about the base
    Field1D wp = base, wm = base;
    std::vector<double> d1q(n), d1u(n), d2q(n), d2u(n);
    auto Jv = [&](const std::vector<double>& xq, const std::vector<double>& xu,
                  std::vector<double>& oq, std::vector<double>& ou) {
        double nrm = 0.0;
        for (int i = 0; i < n; ++i) nrm = std::max(nrm, std::max(std::abs(xq[i]), std::abs(xu[i])));
        double h = 1e-7 / std::max(nrm, 1e-300);
        for (int i = 0; i < n; ++i) {
            wp.q[i] = base.q[i] + h * xq[i];
            wp.u[i] = base.u[i] + h * xu[i];
            wm.q[i] = base.q[i] - h * xq[i];
            wm.u[i] = base.u[i] - h * xu[i];
        }
        rhs_field(wp, cfg, d1q, d1u);
        rhs_field(wm, cfg, d2q, d2u);
        for (int i = 0; i < n; ++i) {
            oq[i] = (d1q[i] - d2q[i]) / (2.0 * h);
            ou[i] = (d1u[i] - d2u[i]) / (2.0 * h);
        }
    };

    double dt = compute_dt(base, cfg);
    int nst = (int)std::ceil(opts.horizon / dt);
    int stride = std::max(1, nst / 160);
    double logn = 0.0;
    std::vector<double> k1q(n), k1u(n), k2q(n), k2u(n), w1q(n), w1u(n);
    std::vector<double> lts, lns;
    for (int s = 0; s < nst; ++s) {
        Jv(vq, vu, k1q, k1u);
        for (int i = 0; i < n; ++i) {
            w1q[i] = vq[i] + dt * k1q[i];
            w1u[i] = vu[i] + dt * k1u[i];
        }
        Jv(w1q, w1u, k2q, k2u);
        for (int i = 0; i < n; ++i) {
            vq[i] += 0.5 * dt * (k1q[i] + k2q[i]);
            vu[i] += 0.5 * dt * (k1u[i] + k2u[i]);
        }
        if (s % stride == stride - 1) {
            if (!opts.translation_mode && have_mode) {
                double ip = 0.0;
                for (int i = 0; i < n; ++i) ip += vq[i] * Tq[i] + vu[i] * Tu[i];
                ip /= den;
                for (int i = 0; i < n; ++i) {
                    vq[i] -= ip * Tq[i];
                    vu[i] -= ip * Tu[i];
                }
            }
            double nn = 0.0;
            for (int i = 0; i < n; ++i) nn += vq[i] * vq[i] + vu[i] * vu[i];
            nn = std::sqrt(nn);
            logn += std::log(nn);
            for (int i = 0; i < n; ++i) {
                vq[i] /= nn;
                vu[i] /= nn;
            }
            lts.push_back((s + 1) * dt);
            lns.push_back(logn);
        }
    }
    // slope of the accumulated log norm over the second half
    size_t h0 = lns.size() / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (size_t i = h0; i < lns.size(); ++i) {
        sx += lts[i]; sy += lns[i]; sxx += lts[i] * lts[i]; sxy += lts[i] * lns[i]; ++m;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

void write_snapshot(std::ostream& os, const Field1D& f) {
    os.precision(17);
    os << "# t=" << f.t << " n=" << f.n << " L=" << f.L << "\n";
    for (int i = 0; i < f.n; ++i) os << i * f.dx << " " << f.q[i] << " " << f.u[i] << "\n";
}

Field1D read_snapshot(std::istream& is) {
    Field1D f;
    std::string header;
    std::getline(is, header);
    if (header.rfind("# t=", 0) != 0) throw NonFinite("read_snapshot: bad header");
    std::sscanf(header.c_str(), "# t=%lf n=%d L=%lf", &f.t, &f.n, &f.L);
    f.dx = f.L / f.n;
    f.q.resize(f.n);
    f.u.resize(f.n);
    for (int i = 0; i < f.n; ++i) {
        double x;
        is >> x >> f.q[i] >> f.u[i];
    }
    return f;
}

} // namespace barkley
