#include "barkley/singular_loop.hpp"

#include <cmath>
#include <stdexcept>

#include "barkley/errors.hpp"
#include "barkley/model.hpp"

namespace barkley {

void phi_eval(double chi, double* phi, double* phi_prime) {
    const double s2 = std::sqrt(2.0);
    // branch on sign so the exponential argument is always non-positive
    if (chi >= 0.0) {
        double E = std::exp(-0.5 * s2 * chi);
        double d = 1.0 + E;
        *phi = 1.0 / d;
        *phi_prime = 0.5 * s2 * E / (d * d);
    } else {
        double E = std::exp(0.5 * s2 * chi);
        double d = 1.0 + E;
        *phi = E / d;
        *phi_prime = 0.5 * s2 * E / (d * d);
    }
}

namespace {

double sech(double y) { return 1.0 / std::cosh(y); }

} // namespace

ProfileEvaluator::ProfileEvaluator(Side side, double r, double D, double q_plus, double u_layer)
    : side_(side), r_(r), D_(D), p_(q_plus), u_(u_layer) {
    a_ = p_ * std::sqrt((r_ + 0.1) / D_);
}

ProfileState ProfileEvaluator::operator()(double xi) const {
    double R = r_ + 0.1;
    double z = 0.5 * std::sqrt(2.0) * a_ * xi;
    double th = std::tanh(0.5 * z);
    double sh2 = sech(0.5 * z);
    sh2 *= sh2;
    double s_mag = (p_ * p_ / 8.0) * std::sqrt(2.0 * R / D_) * sh2;
    double sd_mag = (p_ * p_ * p_ * R / (8.0 * D_)) * th * sh2;
    if (side_ == Side::front)
        return {p_ * 0.5 * (1.0 + th), s_mag, -sd_mag, u_};
    return {p_ * 0.5 * (1.0 - th), -s_mag, sd_mag, u_};
}

SingularLoopData solve_singular_parameters(double r) {
    SingularLoopData L;
    L.r = r;
    double R = r + 0.1;
    L.u_b = compute_ub(r);
    double sf = std::sqrt(r / R);
    // the branch separation vanishes quadratically as r -> 2/3 and drowns in
    // the u_b rounding noise there; the floor keeps every kernel finite
    double sb = std::max(std::sqrt(std::max(r + L.u_b - 2.0, 0.0) / R), 1e-12);
    L.q_f_plus = 1.0 + sf;
    L.q_f_minus = 1.0 - sf;
    L.q_b_plus = 1.0 + sb;
    L.q_b_minus = 1.0 - sb;

    // Subtracting the back matching condition from the front one eliminates mu
    // and fixes w = sqrt(2 D (r+0.1)); the front condition then gives mu.
    double cf = L.q_f_plus - 2.0 * L.q_f_minus;  // = 3 q_f_plus - 4
    double cb = L.q_b_plus - 2.0 * L.q_b_minus;
    double w = 2.0 * (2.0 - L.u_b) / (cf + cb);
    L.D0 = w * w / (2.0 * R);
    L.mu0 = 0.5 * w * cf - 2.0;

    double wchk = std::sqrt(2.0 * L.D0 * R);
    L.con1_residual = (2.0 + L.mu0) - 0.5 * wchk * cf;
    L.con2_residual = (L.u_b + L.mu0) + 0.5 * wchk * cb;

    L.front = ProfileEvaluator(Side::front, r, L.D0, L.q_f_plus, 2.0);
    L.back = ProfileEvaluator(Side::back, r, L.D0, L.q_b_plus, L.u_b);
    return L;
}

namespace {

// log |x| with sign, for assembling products of exponentially small factors
struct LogVal {
    double lg;   // log of magnitude, -inf for zero
    int sign;    // -1, 0, +1
};


double exp_clamped(double lg, int sign) {
    if (sign == 0 || lg < -740.0) return 0.0;
    if (lg > 709.0) return sign > 0 ? HUGE_VAL : -HUGE_VAL;
    return sign * std::exp(lg);
}

// log-space profile components: returns log|s|, log|sdot| and signs
void profile_logs(const ProfileEvaluator& P, double r, double D, double xi,
                  LogVal& ls, LogVal& lsd) {
    double R = r + 0.1;
    double p = P.q_plus();
    double z = 0.5 * std::sqrt(2.0) * P.decay_rate() * xi;
    double y = 0.5 * z;
    // log sech(y) = -|y| + log 2 - log1p(exp(-2|y|))
    double lsech = -std::abs(y) + std::log(2.0) - std::log1p(std::exp(-2.0 * std::abs(y)));
    double th = std::tanh(y);
    double ls_mag = std::log(p * p / 8.0 * std::sqrt(2.0 * R / D)) + 2.0 * lsech;
    double lsd_mag = std::log(p * p * p * R / (8.0 * D)) + std::log(std::max(std::abs(th), 1e-300)) + 2.0 * lsech;
    int th_sign = th > 0.0 ? 1 : (th < 0.0 ? -1 : 0);
    if (P.side() == Side::front) {
        ls = {ls_mag, 1};
        lsd = {lsd_mag, -th_sign};
    } else {
        ls = {ls_mag, -1};
        lsd = {lsd_mag, th_sign};
    }
}

} // namespace

Vec3 adjoint_psi(Side side, double xi, const SingularLoopData& loop) {
    const ProfileEvaluator& P = side == Side::front ? loop.front : loop.back;
    double ustar = side == Side::front ? 2.0 : loop.u_b;
    double beta = (loop.mu0 + ustar) / loop.D0;
    LogVal ls, lsd;
    profile_logs(P, loop.r, loop.D0, xi, ls, lsd);
    double lpref = -beta * xi;
    return {exp_clamped(lsd.lg + lpref, lsd.sign),
            exp_clamped(ls.lg + lpref, -ls.sign),
            0.0};
}

namespace {

// d-factor at one xi: a(xi)*b or the epsilon-generalized version with the
// orbit tail substituted for one singular profile.
std::optional<double> d_value(ProbeKind which, const SingularLoopData& loop,
                              const OrbitTailFn* tail, double xi) {
    ProfileState F = loop.front(xi), Fm = loop.front(-xi);
    ProfileState B = loop.back(xi), Bm = loop.back(-xi);
    double s_orb, sd_orb;
    if (tail) {
        double arg = 0.0;
        switch (which) {
            case ProbeKind::b_minus: arg = -xi; break;  // back orbit at -xi
            case ProbeKind::b_plus: arg = xi; break;    // front orbit at +xi
            case ProbeKind::f_minus: arg = -xi; break;  // front orbit at -xi
            case ProbeKind::f_plus: arg = xi; break;    // back orbit at +xi
        }
        auto v = (*tail)(arg);
        if (!v) return std::nullopt;
        s_orb = v->first;
        sd_orb = v->second;
    } else {
        switch (which) {
            case ProbeKind::b_minus: s_orb = Bm.s; sd_orb = Bm.sdot; break;
            case ProbeKind::f_minus: s_orb = Fm.s; sd_orb = Fm.sdot; break;
            default:
                throw std::invalid_argument(
                    "scalar_product_sign_probe: b+/f+ require an eps > 0 orbit tail");
        }
    }
    switch (which) {
        case ProbeKind::b_minus: return F.sdot * s_orb - F.s * sd_orb;
        case ProbeKind::b_plus: return Bm.sdot * s_orb - Bm.s * sd_orb;
        case ProbeKind::f_minus: return B.sdot * s_orb - B.s * sd_orb;
        case ProbeKind::f_plus: return Fm.sdot * s_orb - Fm.s * sd_orb;
    }
    return std::nullopt;
}

} // namespace

SignReport scalar_product_sign_probe(ProbeKind which, const SingularLoopData& loop,
                                     const OrbitTailFn* orbit_tail, double xi_base, int k_max,
                                     int stable_needed, double floor) {
    SignReport rep;
    rep.which = which;
    for (int k = 0; k <= k_max; ++k) {
        double xi = xi_base * std::pow(2.0, k);
        auto d = d_value(which, loop, orbit_tail, xi);
        if (!d) break;  // orbit tail exhausted
        if (std::isfinite(*d) && std::abs(*d) > floor) rep.samples.emplace_back(xi, *d);
    }
    if ((int)rep.samples.size() < stable_needed) {
        rep.note = "fewer than " + std::to_string(stable_needed) + " samples above the floor";
        return rep;
    }
    size_t n0 = rep.samples.size() - stable_needed;
    int sign = rep.samples[n0].second > 0.0 ? 1 : -1;
    bool stable = true, decreasing = true;
    for (size_t i = n0; i < rep.samples.size(); ++i) {
        double d = rep.samples[i].second;
        if ((d > 0.0 ? 1 : -1) != sign) stable = false;
        if (i > n0 && std::abs(d) >= std::abs(rep.samples[i - 1].second)) decreasing = false;
    }
    if (!stable) {
        rep.note = "sign did not stabilize over the last samples";
        return rep;
    }
    rep.eventual_sign = sign;
    rep.converges_to_zero = decreasing;
    if (!decreasing) {
        rep.note = "magnitude not decreasing toward zero";
        return rep;
    }
    rep.status = sign > 0 ? ProbeStatus::pass : ProbeStatus::fail;
    return rep;
}

} // namespace barkley
