#include "barkley/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "barkley/errors.hpp"
#include "barkley/hypotheses.hpp"
#include "barkley/melnikov.hpp"
#include "barkley/model.hpp"
#include "barkley/nfront.hpp"
#include "barkley/orbits.hpp"
#include "barkley/pde.hpp"
#include "barkley/spectra.hpp"

namespace barkley::cli {

namespace {

int worker_count() {
    if (const char* env = std::getenv("BARKLEY_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? (int)hw : 1;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

void print_spectral(std::ostream& os, const char* name, const SpectralData& s) {
    os.precision(12);
    os << name << ": lambda = (" << s.lambda1 << ", " << s.lambda2 << ", " << s.lambda3 << ")\n";
    auto pv = [&](const char* n, const Vec3& v) {
        os << "  " << n << " = (" << v[0] << ", " << v[1] << ", " << v[2] << ")\n";
    };
    pv("e1", s.e1);
    pv("e2", s.e2);
    pv("e3", s.e3);
}

struct ScanRow {
    double r;
    MelnikovReport rep;
    bool ok;
    std::string err;
};

int run_scan(double rmin, double rmax, int steps, double tol, const std::string& out_path) {
    std::vector<double> rs(steps);
    for (int i = 0; i < steps; ++i)
        rs[i] = steps == 1 ? rmin : rmin + (rmax - rmin) * i / double(steps - 1);
    std::vector<ScanRow> rows(steps);
    int nw = std::min(worker_count(), steps);
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < nw; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < steps; i = next.fetch_add(1)) {
                rows[i].r = rs[i];
                try {
                    rows[i].rep = eval_melnikov_suite(rs[i], tol);
                    rows[i].ok = true;
                } catch (const std::exception& e) {
                    rows[i].ok = false;
                    rows[i].err = e.what();
                }
            }
        });
    for (auto& t : pool) t.join();

    std::ofstream os(out_path);
    if (!os) {
        std::cerr << "cannot open " << out_path << "\n";
        return 2;
    }
    os.precision(17);
    os << "r,Mhat_f,M_f,Mhat_b,M_b,Mtilde_f,Mhat,dQf_du,dQb_du,dQf_dmu,dQb_dmu,quad_err\n";
    for (const auto& row : rows) {
        if (!row.ok) {
            std::cerr << "r = " << row.r << ": " << row.err << "\n";
            return 3;
        }
        const MelnikovReport& m = row.rep;
        os << m.r << "," << m.Mhat_f << "," << m.M_f << "," << m.Mhat_b << "," << m.M_b << ","
           << m.Mtilde_f << "," << m.Mhat << "," << m.dQf_du << "," << m.dQb_du << ","
           << m.dQf_dmu << "," << m.dQb_dmu << "," << m.quad_err << "\n";
    }
    return 0;
}

} // namespace

int dispatch(int argc, const char* const* argv) {
    CLI::App app{"Traveling-wave toolkit for the Barkley pipe-flow model"};
    app.set_config("--config");
    app.require_subcommand(1);

    // ---- equilibria ----
    auto* eq = app.add_subcommand("equilibria", "equilibria and branch roots at one r");
    double eq_r = 0.7, eq_tol = 1e-12;
    eq->add_option("--r", eq_r, "model Reynolds number (> 2/3)")->required();
    eq->add_option("--tol", eq_tol, "bisection tolerance");

    // ---- spectra ----
    auto* sp = app.add_subcommand("spectra", "linearization spectra and H0/H1 verdict");
    double sp_r = 0.7, sp_eps = 1e-3, sp_D = -1.0, sp_mu = 1e300, sp_c = 0.0;
    sp->add_option("--r", sp_r)->required();
    sp->add_option("--eps", sp_eps);
    sp->add_option("--D", sp_D, "diffusion rate (default D0(r))");
    sp->add_option("--mu", sp_mu, "advection parameter (default mu0(r))");
    sp->add_option("--c", sp_c, "wave speed");

    // ---- melnikov-scan ----
    auto* ms = app.add_subcommand("melnikov-scan", "Melnikov suite over an r grid, CSV output");
    double ms_rmin = 0.67, ms_rmax = 2.5, ms_tol = 1e-11;
    int ms_steps = 51;
    std::string ms_out = "scan.csv";
    ms->add_option("--r-min", ms_rmin)->required();
    ms->add_option("--r-max", ms_rmax)->required();
    ms->add_option("--steps", ms_steps)->required();
    ms->add_option("--out", ms_out)->required();
    ms->add_option("--tol", ms_tol);

    // ---- find-beta ----
    auto* fb = app.add_subcommand("find-beta", "twist boundary: the root of Mtilde_f");
    double fb_tol = 1e-6;
    fb->add_option("--tol", fb_tol);

    // ---- verify ----
    auto* vf = app.add_subcommand("verify", "hypotheses H0-H7 at one (r, eps, c)");
    double vf_r = 0.7, vf_eps = 1e-3, vf_c = 0.0;
    bool vf_json = false, vf_no_orbits = false;
    std::string vf_out;
    vf->add_option("--r", vf_r)->required();
    vf->add_option("--eps", vf_eps);
    vf->add_option("--c", vf_c);
    vf->add_flag("--json", vf_json, "emit the JSON verdict document");
    vf->add_flag("--no-orbits", vf_no_orbits, "skip the eps > 0 shooting (H6 partially proxied)");
    vf->add_option("--out", vf_out, "write the JSON verdict to a file");

    // ---- shoot ----
    auto* sh = app.add_subcommand("shoot", "single-sided heteroclinic shooting");
    std::string sh_side = "front";
    double sh_r = 0.7, sh_eps = 1e-3, sh_D = -1.0, sh_mu = 1e300, sh_c = 0.0;
    sh->add_option("--side", sh_side)->check(CLI::IsMember({"front", "back"}));
    sh->add_option("--r", sh_r)->required();
    sh->add_option("--eps", sh_eps)->required();
    sh->add_option("--D", sh_D, "guess for D (default D0(r), held fixed)");
    sh->add_option("--mu", sh_mu, "guess for mu (default mu0(r))");
    sh->add_option("--c", sh_c);

    // ---- continue ----
    auto* co = app.add_subcommand("continue", "continuation of the loop in eps");
    double co_r = 0.7, co_c = 0.0;
    std::string co_list = "1e-2,3e-3,1e-3";
    co->add_option("--r", co_r)->required();
    co->add_option("--eps-list", co_list, "comma-separated eps grid, descending");
    co->add_option("--c", co_c);

    // ---- nfront-times ----
    auto* nf = app.add_subcommand("nfront-times", "N-front return times and eigenvalue predictions");
    int nf_N = 3;
    double nf_rho = 0.01, nf_r = 0.7, nf_eps = 1e-3, nf_c = 0.0;
    nf->add_option("--N", nf_N)->required();
    nf->add_option("--rho", nf_rho)->required();
    nf->add_option("--r", nf_r)->required();
    nf->add_option("--eps", nf_eps);
    nf->add_option("--c", nf_c);

    // ---- simulate ----
    auto* si = app.add_subcommand("simulate", "direct PDE simulation with snapshots");
    std::string si_kind = "simple-front", si_out = "snap", si_bc = "outflow";
    double si_r = 0.7, si_eps = 1e-3, si_L = 400.0, si_T = 50.0, si_D = -1.0, si_mu = 1e300,
           si_zeta = 0.05;
    int si_n = 4000, si_snap = 10, si_N = 2;
    si->add_option("--kind", si_kind)
        ->check(CLI::IsMember({"uniform-laminar", "uniform-turbulent", "simple-front",
                               "simple-back", "n-front"}));
    si->add_option("--r", si_r)->required();
    si->add_option("--eps", si_eps)->required();
    si->add_option("--L", si_L)->required();
    si->add_option("--n", si_n)->required();
    si->add_option("--T", si_T)->required();
    si->add_option("--snap-every", si_snap, "snapshot stride in time units");
    si->add_option("--D", si_D, "diffusion rate (default D0(r))");
    si->add_option("--mu", si_mu, "sets zeta = -mu - c with c from the loop (default mu0(r))");
    si->add_option("--zeta", si_zeta);
    si->add_option("--N", si_N, "number of fronts for --kind n-front");
    si->add_option("--out", si_out, "snapshot file prefix");
    si->add_option("--bc", si_bc)->check(CLI::IsMember({"periodic", "outflow"}));

    // ---- speed ----
    auto* spd = app.add_subcommand("speed", "measure the simple-front speed");
    double spd_r = 0.7, spd_eps = 1e-3, spd_zeta = 0.05, spd_L = 700.0, spd_T = 160.0,
           spd_D = -1.0, spd_mu = 1e300, spd_level = -1.0;
    int spd_n = 0;
    spd->add_option("--r", spd_r)->required();
    spd->add_option("--eps", spd_eps)->required();
    spd->add_option("--zeta", spd_zeta);
    spd->add_option("--L", spd_L);
    spd->add_option("--n", spd_n, "grid points (default from dx = 0.1 sqrt(D)/q_f_plus)");
    spd->add_option("--T", spd_T, "measurement horizon after settling");
    spd->add_option("--level", spd_level, "tracked q level (default q_b_plus/2)");
    spd->add_option("--D", spd_D, "skip continuation and use this D");
    spd->add_option("--mu", spd_mu, "skip continuation and use this mu");

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        std::cout.precision(12);
        if (*eq) {
            if (eq_r <= 2.0 / 3.0) {
                std::cerr << "equilibria: requires r > 2/3\n";
                return 2;
            }
            EquilibriumSet e = compute_equilibria(eq_r, eq_tol);
            std::cout << "u_b       = " << e.u_b << "\n"
                      << "q_f_plus  = " << e.q_f_plus << "\nq_f_minus = " << e.q_f_minus << "\n"
                      << "q_b_plus  = " << e.q_b_plus << "\nq_b_minus = " << e.q_b_minus << "\n"
                      << "X1 = (0, 0, 2)\n"
                      << "X2 = (" << e.X2.q << ", 0, " << e.X2.u << ")\n"
                      << "Y1 = (" << e.Y1.q << ", 0, 2)\n"
                      << "Y2 = (0, 0, " << e.Y2.u << ")\n";
            return 0;
        }
        if (*sp) {
            if (sp_r <= 2.0 / 3.0) {
                std::cerr << "spectra: requires r > 2/3\n";
                return 2;
            }
            SingularLoopData loop = solve_singular_parameters(sp_r);
            if (sp_D <= 0.0) sp_D = loop.D0;
            if (sp_mu > 1e299) sp_mu = loop.mu0;
            ModelParams prm = ModelParams::with_mu(sp_r, sp_D, sp_mu, sp_eps, sp_c);
            EquilibriumSet eqs = compute_equilibria(sp_r);
            HyperbolicityReport hr = classify_hyperbolicity(eqs, prm);
            print_spectral(std::cout, "X1", hr.X1);
            print_spectral(std::cout, "X2", hr.X2);
            std::cout << "beta1 = " << hr.beta1 << "\nbeta2 = " << hr.beta2 << "\n"
                      << "H0/H1 " << (hr.pass ? "pass" : "fail") << " (dim W^s = 2, dim W^u = 1)\n";
            return hr.pass ? 0 : 3;
        }
        if (*ms) {
            if (ms_rmin <= 2.0 / 3.0 || ms_rmax <= ms_rmin || ms_steps < 1) {
                std::cerr << "melnikov-scan: need 2/3 < r-min < r-max and steps >= 1\n";
                return 2;
            }
            return run_scan(ms_rmin, ms_rmax, ms_steps, ms_tol, ms_out);
        }
        if (*fb) {
            double beta = find_beta(fb_tol);
            std::cout << "beta = " << beta << "\n";
            return 0;
        }
        if (*vf) {
            if (vf_r <= 2.0 / 3.0) {
                std::cerr << "verify: requires r > 2/3\n";
                return 2;
            }
            VerifyTolerances vt;
            vt.with_orbits = !vf_no_orbits;
            HypothesisVerdict v = verify_hypotheses(vf_r, vf_eps, vf_c, vt);
            std::string js = verdict_to_json(v);
            if (!vf_out.empty()) {
                std::ofstream os(vf_out);
                os << js << "\n";
            }
            if (vf_json) {
                std::cout << js << "\n";
            } else {
                for (const auto& e : v.entries) {
                    std::cout << e.id << ": " << status_name(e.status);
                    if (!e.note.empty()) std::cout << "  (" << e.note << ")";
                    std::cout << "\n";
                }
                std::cout << "overall: " << (v.overall ? "pass" : "fail") << "\n";
            }
            return 0;
        }
        if (*sh) {
            if (sh_r <= 2.0 / 3.0 || sh_eps <= 0.0) {
                std::cerr << "shoot: requires r > 2/3 and eps > 0\n";
                return 2;
            }
            SingularLoopData loop = solve_singular_parameters(sh_r);
            if (sh_D <= 0.0) sh_D = loop.D0;
            if (sh_mu > 1e299) sh_mu = loop.mu0;
            Side side = sh_side == "front" ? Side::front : Side::back;
            OrbitSolution o = shoot_connection(side, sh_r, sh_eps, sh_D, sh_mu, sh_c);
            std::cout << "side      = " << sh_side << "\n"
                      << "D_hat     = " << o.D_hat << "\n"
                      << "mu_hat    = " << o.mu_hat << "\n"
                      << "miss_norm = " << o.miss_norm << "\n"
                      << "endpoint u = " << (o.slow_leg.empty() ? o.trajectory.back().x.u
                                                                : o.slow_leg.back().x.u)
                      << "\n";
            return 0;
        }
        if (*co) {
            if (co_r <= 2.0 / 3.0) {
                std::cerr << "continue: requires r > 2/3\n";
                return 2;
            }
            std::vector<double> grid = parse_list(co_list);
            ContinuationResult res = continue_loop(co_r, grid);
            std::cout << "eps,D_hat,mu_hat,miss_norm,cond\n";
            std::cout.precision(17);
            for (const auto& row : res.rows)
                std::cout << row.eps << "," << row.D_hat << "," << row.mu_hat << ","
                          << row.miss_norm << "," << row.cond_2x2 << "\n";
            if (!res.complete) {
                std::cerr << "continuation aborted before the end of the grid\n";
                return 3;
            }
            return 0;
        }
        if (*nf) {
            if (nf_N <= 1 || nf_rho <= 0.0 || nf_rho >= 1.0 || nf_r <= 2.0 / 3.0) {
                std::cerr << "nfront-times: need N > 1, rho in (0,1), r > 2/3\n";
                return 2;
            }
            ContinuationResult res = continue_loop(nf_r, {nf_eps}, nf_c);
            if (!res.complete) {
                std::cerr << "nfront-times: loop continuation failed\n";
                return 3;
            }
            ModelParams prm =
                ModelParams::with_mu(nf_r, res.rows.back().D_hat, res.rows.back().mu_hat, nf_eps,
                                     nf_c);
            EquilibriumSet eqs = compute_equilibria(nf_r);
            HyperbolicityReport hr = classify_hyperbolicity(eqs, prm);
            NFrontTimes t = return_times(nf_rho, nf_N, hr.X1, hr.X2);
            // the stability theorem ties the signs to the B-matrix Melnikov
            // integrals, which reduce to the mu-derivatives of Q_f, Q_b
            MelnikovReport mel = eval_melnikov_suite(nf_r);
            auto pred = predict_small_eigenvalues(nf_rho, nf_N, t, mel.dQf_dmu < 0 ? -1 : 1,
                                                  mel.dQb_dmu < 0 ? -1 : 1);
            std::cout << "beta1 = " << t.beta1 << "\nbeta2 = " << t.beta2 << "\neta =";
            for (double e : t.eta) std::cout << " " << e;
            std::cout << "\ntau =";
            for (double x : t.tau) std::cout << " " << x;
            std::cout << "\nsigma =";
            for (double x : t.sigma) std::cout << " " << x;
            std::cout << "\neigenvalue predictions (index, rho-exponent, sign):\n";
            for (const auto& p : pred)
                std::cout << "  " << p.index << "  " << p.scaling_exponent << "  " << p.sign
                          << "\n";
            return 0;
        }
        if (*si) {
            if (si_r <= 2.0 / 3.0 || si_L <= 0.0 || si_n < 8) {
                std::cerr << "simulate: invalid parameters\n";
                return 2;
            }
            SingularLoopData loop = solve_singular_parameters(si_r);
            if (si_D <= 0.0) si_D = loop.D0;
            if (si_mu > 1e299) si_mu = loop.mu0;
            SimConfig cfg;  // the PDE needs (r, D, zeta, eps) only
            cfg.params.r = si_r;
            cfg.params.D = si_D;
            cfg.params.zeta = si_zeta;
            cfg.params.eps = si_eps;
            EquilibriumSet eqs = compute_equilibria(si_r);
            ProfileSpec kind;
            if (si_kind == "uniform-laminar") kind.kind = ProfileKind::uniform_laminar;
            else if (si_kind == "uniform-turbulent") kind.kind = ProfileKind::uniform_turbulent;
            else if (si_kind == "simple-front") kind.kind = ProfileKind::simple_front;
            else if (si_kind == "simple-back") kind.kind = ProfileKind::simple_back;
            else { kind.kind = ProfileKind::n_front; kind.N = si_N; }
            Field1D f = build_initial_profile(kind, eqs, loop, cfg, si_L, si_n,
                                              si_bc == "periodic" ? BoundaryCondition::periodic
                                                                  : BoundaryCondition::outflow);
            double dt = compute_dt(f, cfg);
            double next_snap = 0.0;
            int snap_id = 0;
            while (f.t < si_T) {
                if (f.t >= next_snap) {
                    std::ofstream os(si_out + "_" + std::to_string(snap_id++) + ".dat");
                    write_snapshot(os, f);
                    next_snap += si_snap;
                }
                step_field_inplace(f, cfg, dt);
            }
            std::ofstream os(si_out + "_" + std::to_string(snap_id) + ".dat");
            write_snapshot(os, f);
            std::cout << "wrote " << snap_id + 1 << " snapshots (t up to " << f.t << ")\n";
            return 0;
        }
        if (*spd) {
            if (spd_r <= 2.0 / 3.0 || spd_eps <= 0.0) {
                std::cerr << "speed: requires r > 2/3 and eps > 0\n";
                return 2;
            }
            double D = spd_D, mu = spd_mu;
            if (D <= 0.0 || mu > 1e299) {
                ContinuationResult res = continue_loop(spd_r, {spd_eps});
                if (!res.complete) {
                    std::cerr << "speed: loop continuation failed\n";
                    return 3;
                }
                D = res.rows.back().D_hat;
                mu = res.rows.back().mu_hat;
            }
            EquilibriumSet eqs = compute_equilibria(spd_r);
            SingularLoopData loop = solve_singular_parameters(spd_r);
            SimConfig cfg;
            cfg.params.r = spd_r;
            cfg.params.D = D;
            cfg.params.zeta = spd_zeta;
            cfg.params.eps = spd_eps;
            cfg.T_end = spd_T;
            int n = spd_n > 0 ? spd_n
                              : (int)std::ceil(spd_L / (0.1 * std::sqrt(D) / eqs.q_f_plus));
            ProfileSpec kind;
            kind.kind = ProfileKind::simple_front;
            Field1D f = build_initial_profile(kind, eqs, loop, cfg, spd_L, n);
            double level = spd_level > 0.0 ? spd_level : 0.5 * eqs.q_b_plus;
            // settle half the horizon before measuring
            double dt = compute_dt(f, cfg);
            int pre = (int)std::ceil(0.5 * spd_T / dt);
            for (int i = 0; i < pre; ++i) step_field_inplace(f, cfg, dt);
            WaveSpeed ws = measure_wave_speed(f, cfg, level);
            std::cout << "c_measured = " << ws.c << "\n"
                      << "fit_residual = " << ws.fit_residual << "\n"
                      << "c_expected (-mu - zeta) = " << (-mu - spd_zeta) << "\n";
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

} // namespace barkley::cli
