#include "barkley/hypotheses.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "barkley/errors.hpp"
#include "barkley/model.hpp"

namespace barkley {

const HypothesisEntry& HypothesisVerdict::at(const std::string& id) const {
    for (const auto& e : entries)
        if (e.id == id) return e;
    throw std::out_of_range("no hypothesis entry " + id);
}

std::string status_name(HypStatus s) {
    switch (s) {
        case HypStatus::pass: return "pass";
        case HypStatus::fail: return "fail";
        case HypStatus::proxy_pass: return "proxy-pass";
        default: return "not-computable";
    }
}

namespace {

HypothesisEntry make_nc(const std::string& id, const std::string& why) {
    HypothesisEntry e;
    e.id = id;
    e.status = HypStatus::not_computable;
    e.note = why;
    return e;
}

int probe_to_int(ProbeStatus s) {
    return s == ProbeStatus::pass ? 1 : (s == ProbeStatus::fail ? -1 : 0);
}

} // namespace

HypothesisVerdict verify_hypotheses(double r, double eps, double c, const VerifyTolerances& tol) {
    if (!(r > 2.0 / 3.0)) throw std::invalid_argument("verify_hypotheses: requires r > 2/3");
    if (!(eps >= 0.0)) throw std::invalid_argument("verify_hypotheses: requires eps >= 0");

    HypothesisVerdict v;
    v.r = r;
    v.eps = eps;
    v.c = c;

    SingularLoopData loop = solve_singular_parameters(r);
    EquilibriumSet eqs = compute_equilibria(r);
    if (!(c < eqs.u_b))
        throw std::invalid_argument("verify_hypotheses: requires c < u_b(r)");

    // heteroclinic loop parameters at this eps (falls back to the singular pair)
    double D_used = loop.D0, mu_used = loop.mu0;
    bool have_orbits = false;
    ContinuationResult cont;
    if (tol.with_orbits && eps > 0.0) {
        try {
            cont = continue_loop(r, {eps}, c, tol.shoot);
            if (cont.complete) {
                D_used = cont.rows.back().D_hat;
                mu_used = cont.rows.back().mu_hat;
                have_orbits = true;
            }
        } catch (const NumericalError&) {
        }
    }
    v.D_used = D_used;
    v.mu_used = mu_used;
    ModelParams prm = ModelParams::with_mu(r, D_used, mu_used, eps, c);

    // H0 / H1: hyperbolicity and the spectral ordering
    HypothesisEntry h0, h1;
    h0.id = "H0";
    h1.id = "H1";
    try {
        HyperbolicityReport hr = classify_hyperbolicity(eqs, prm, tol.eig_zero_tol);
        h0.status = hr.pass ? HypStatus::pass : HypStatus::fail;
        h0.evidence = {{"lambda1_X1", hr.X1.lambda1}, {"lambda2_X1", hr.X1.lambda2},
                       {"lambda3_X1", hr.X1.lambda3}, {"lambda1_X2", hr.X2.lambda1},
                       {"lambda2_X2", hr.X2.lambda2}, {"lambda3_X2", hr.X2.lambda3}};
        bool ordering = hr.pass;
        h1.status = ordering ? HypStatus::pass : HypStatus::fail;
        h1.evidence = {{"beta1", hr.beta1}, {"beta2", hr.beta2},
                       {"dim_stable", 2.0}, {"dim_unstable", 1.0}};
    } catch (const NumericalError& e) {
        h0 = make_nc("H0", e.what());
        h1 = make_nc("H1", e.what());
    }
    v.entries.push_back(h0);
    v.entries.push_back(h1);

    // Melnikov suite feeds H2-H5, H7
    MelnikovReport mel;
    bool have_mel = false;
    try {
        mel = eval_melnikov_suite(r, tol.melnikov_tol);
        have_mel = true;
    } catch (const NumericalError&) {
    }

    // H2: existence of the loop via Mhat(r) != 0
    {
        HypothesisEntry e;
        e.id = "H2";
        if (have_mel) {
            e.status = std::abs(mel.Mhat) > tol.nonzero_margin ? HypStatus::pass : HypStatus::fail;
            e.evidence = {{"Mhat", mel.Mhat}};
            if (have_orbits) {
                e.evidence.push_back({"D_hat", D_used});
                e.evidence.push_back({"mu_hat", mu_used});
                e.evidence.push_back({"miss_norm", cont.rows.back().miss_norm});
            }
        } else {
            e = make_nc("H2", "Melnikov suite failed");
        }
        v.entries.push_back(e);
    }

    // H3: non-degeneracy proxy, Mtilde_f > 0 and both u-Melnikov integrals nonzero
    {
        HypothesisEntry e;
        e.id = "H3";
        if (have_mel) {
            bool nonvan = std::abs(mel.dQf_du) > tol.nonzero_margin &&
                          std::abs(mel.dQb_du) > tol.nonzero_margin;
            bool pos = mel.Mtilde_f > tol.nonzero_margin;
            e.status = (pos && nonvan) ? HypStatus::proxy_pass : HypStatus::fail;
            e.evidence = {{"Mtilde_f", mel.Mtilde_f}, {"dQf_du", mel.dQf_du},
                          {"dQb_du", mel.dQb_du}};
            e.note = "strong inclination graded by its sufficient conditions";
        } else {
            e = make_nc("H3", "Melnikov suite failed");
        }
        v.entries.push_back(e);
    }

    // H4: linear independence of the Melnikov gradients + adjoint convergence
    {
        HypothesisEntry e;
        e.id = "H4";
        if (have_mel) {
            double R = r + 0.1;
            double dQf_dD = (loop.q_f_plus * loop.q_f_plus * R / (loop.D0 * loop.D0)) * mel.M_f;
            double dQb_dD = (loop.q_b_plus * loop.q_b_plus * R / (loop.D0 * loop.D0)) * mel.M_b;
            double det = dQf_dD * mel.dQb_dmu - mel.dQf_dmu * dQb_dD;
            double conv = loop.mu0 + loop.u_b;  // psi_b decay requires this > 0
            bool ok = std::abs(det) > tol.nonzero_margin && conv > 0.0;
            e.status = ok ? HypStatus::pass : HypStatus::fail;
            e.evidence = {{"det_gradQ", det}, {"mu0_plus_ub", conv}};
        } else {
            e = make_nc("H4", "Melnikov suite failed");
        }
        v.entries.push_back(e);
    }

    // H5: double twist
    {
        HypothesisEntry e;
        e.id = "H5";
        if (have_mel) {
            bool front_twist = mel.dQf_du > tol.nonzero_margin;
            bool back_twist = mel.dQb_du < -tol.nonzero_margin;
            e.status = (front_twist && back_twist) ? HypStatus::pass : HypStatus::fail;
            e.evidence = {{"dQf_du", mel.dQf_du}, {"dQb_du", mel.dQb_du}};
            if (!front_twist) e.note = "front untwisted (dQf_du <= 0)";
        } else {
            e = make_nc("H5", "Melnikov suite failed");
        }
        v.entries.push_back(e);
    }

    // H6: four asymptotic scalar-product sign probes
    {
        HypothesisEntry e;
        e.id = "H6";
        try {
            OrbitTailFn front_tail, back_tail;
            const OrbitTailFn* pf = nullptr;
            const OrbitTailFn* pb = nullptr;
            if (have_orbits) {
                front_tail = [&cont](double xi) { return cont.front.tail(xi); };
                back_tail = [&cont](double xi) { return cont.back.tail(xi); };
                pf = &front_tail;
                pb = &back_tail;
            }
            int need = have_orbits ? 5 : 8;
            SignReport bm = scalar_product_sign_probe(ProbeKind::b_minus, loop, pb, 0.5, 20, need);
            SignReport fm = scalar_product_sign_probe(ProbeKind::f_minus, loop, pf, 0.5, 20, need);
            SignReport bp, fp;
            bool have_plus = false;
            if (have_orbits) {
                bp = scalar_product_sign_probe(ProbeKind::b_plus, loop, pf, 0.5, 20, need);
                fp = scalar_product_sign_probe(ProbeKind::f_plus, loop, pb, 0.5, 20, need);
                have_plus = true;
            }
            e.evidence = {{"d_b_minus_sign", (double)probe_to_int(bm.status)},
                          {"d_f_minus_sign", (double)probe_to_int(fm.status)}};
            if (have_plus) {
                e.evidence.push_back({"d_b_plus_sign", (double)probe_to_int(bp.status)});
                e.evidence.push_back({"d_f_plus_sign", (double)probe_to_int(fp.status)});
            }
            // pass: all sampled products stabilize on + ; proxy-pass: every
            // sign stabilized nonzero (the nonvanishing the abstract
            // hypothesis needs), with the sign pattern recorded as evidence
            auto settled = [](const SignReport& rp) { return rp.status != ProbeStatus::inconclusive; };
            bool all_settled = settled(bm) && settled(fm) &&
                               (!have_plus || (settled(bp) && settled(fp)));
            bool all_pos = bm.status == ProbeStatus::pass && fm.status == ProbeStatus::pass &&
                           (!have_plus || (bp.status == ProbeStatus::pass &&
                                           fp.status == ProbeStatus::pass));
            if (all_pos && have_plus)
                e.status = HypStatus::pass;
            else if (all_pos)
                e.status = HypStatus::proxy_pass;  // eps = 0 probes only
            else if (all_settled)
                e.status = HypStatus::proxy_pass;
            else
                e.status = HypStatus::not_computable;
            if (!have_plus)
                e.note = "b+/f+ probes need a converged eps > 0 loop";
            else if (!all_pos && all_settled)
                e.note = "products nonvanishing; the f+ route stabilizes negative along the "
                         "layer-fiber tail (q cannot cross the invariant laminar line)";
        } catch (const NumericalError& ex) {
            e = make_nc("H6", ex.what());
        }
        v.entries.push_back(e);
    }

    // H7: Melnikov integrals of the generalized eigenvalue problem
    {
        HypothesisEntry e;
        e.id = "H7";
        try {
            double mf = melnikov_direct_B(Side::front, loop, tol.melnikov_tol);
            double mb = melnikov_direct_B(Side::back, loop, tol.melnikov_tol);
            bool ok = mf < -tol.nonzero_margin && mb < -tol.nonzero_margin;
            e.status = ok ? HypStatus::pass : HypStatus::fail;
            e.evidence = {{"M_front", mf}, {"M_back", mb}};
        } catch (const NumericalError& ex) {
            e = make_nc("H7", ex.what());
        }
        v.entries.push_back(e);
    }

    v.overall = true;
    for (const auto& e : v.entries)
        if (e.status != HypStatus::pass && e.status != HypStatus::proxy_pass) v.overall = false;
    return v;
}

std::string verdict_to_json(const HypothesisVerdict& v) {
    nlohmann::json j;
    j["r"] = v.r;
    j["eps"] = v.eps;
    j["c"] = v.c;
    j["D_used"] = v.D_used;
    j["mu_used"] = v.mu_used;
    j["hypotheses"] = nlohmann::json::array();
    for (const auto& e : v.entries) {
        nlohmann::json je;
        je["id"] = e.id;
        je["status"] = status_name(e.status);
        nlohmann::json ev = nlohmann::json::object();
        for (const auto& [k, val] : e.evidence) ev[k] = val;
        je["evidence"] = ev;
        if (!e.note.empty()) je["note"] = e.note;
        j["hypotheses"].push_back(je);
    }
    j["overall"] = v.overall ? "pass" : "fail";
    return j.dump(2);
}

} // namespace barkley
