#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "barkley/singular_loop.hpp"
#include "barkley/spectra.hpp"
#include "barkley/types.hpp"

namespace barkley {

struct ShootTol {
    double rtol = 1e-10;
    double atol = 1e-12;
    double mismatch_tol = 1e-10;
    int newton_max = 25;
    double fd_step = 1e-6;        // finite-difference step in (D, mu)
    double seed_offset = 1e-7;    // unstable-manifold seed offset along e3
    double span_factor = 50.0;    // integration span cap: span_factor / |lambda2(target)|
    double blowup = 1e6;
    double slow_stop = 1e-5;      // stop the reduced slow leg at |u - u_target| below this
};

// Poincare section through the singular profile point at the mid q-level,
// normal along the vector field there.
struct Section {
    Vec3 point{};   // reference point on the singular profile
    Vec3 normal{};  // unit tangent of the profile (transversal to the section)
    Vec3 eperp{};   // in-layer direction perpendicular to the flow: mismatch is measured along it
    double xi_ref = 0.0;
};

Section make_section(Side side, const SingularLoopData& loop);

// One sampled trajectory point.
struct TrajPoint {
    double xi;
    PhasePoint x;
};

// Adaptive RK45 trajectory from a seed; event-free public entry point.
// Throws PoleAtWaveSpeed or BlowUp.
std::vector<TrajPoint> integrate_orbit(const PhasePoint& seed, const ModelParams& params,
                                       double span, const ShootTol& tol = {});

// A converged eps > 0 heteroclinic connection. xi = 0 at the section
// crossing. The stored trajectory is the numerically integrated fast leg;
// the approach to the target along the slow manifold is carried by the
// reduced flow (slow_leg) because the fast transverse instability forbids
// direct integration over the O(1/eps) passage.
struct OrbitSolution {
    Side side = Side::front;
    double eps = 0.0;
    double D_hat = 0.0;
    double mu_hat = 0.0;
    double c = 0.0;
    double miss_norm = 0.0;
    std::vector<TrajPoint> trajectory;      // fast leg, xi = 0 at the section
    std::vector<TrajPoint> slow_leg;        // reduced-flow continuation to the target
    PhasePoint source{}, target{};
    SpectralData spec_source, spec_target;
    double cond_2x2 = 0.0;                  // condition estimate of the shooting Jacobian

    // (s, sdot) of the connection at xi (any sign), for the H6 sign probes;
    // nullopt beyond the representable range.
    std::optional<std::pair<double, double>> tail(double xi) const;

    // state at xi by interpolation across the legs
    PhasePoint eval(double xi) const;

  private:
    friend struct OrbitBuilder;
    double r_ = 0.0;
    double lam3_source_ = 0.0;
    Vec3 seed_dev_{};                       // deviation from source at trajectory.front()
    // back-side WKB layer tail: q(xi) = q0 * exp(int lambda_minus), s = lambda_minus q
    std::vector<std::array<double, 4>> wkb_; // xi, u, log|q_dev|, sign
};

// Scalar section mismatch for one side at the given parameters (exposed for
// diagnostics and tests).
double section_mismatch(Side side, double D, double mu, double eps, double c,
                        const SingularLoopData& loop, const Section& sec, const ShootTol& tol);

// Newton in mu at frozen D = guess_D for a single side (the connection is a
// codimension-one condition; the two-parameter simultaneous solve is
// continue_loop). Throws NewtonDiverged.
OrbitSolution shoot_connection(Side side, double r, double eps, double guess_D, double guess_mu,
                               double c = 0.0, const ShootTol& tol = {});

struct ContinuationRow {
    double eps;
    double D_hat;
    double mu_hat;
    double miss_norm;
    double cond_2x2;
};

struct ContinuationResult {
    std::vector<ContinuationRow> rows;
    OrbitSolution front;  // at the last converged eps
    OrbitSolution back;
    bool complete = false;  // every grid point converged
};

// Warm-started continuation in eps of the stacked system Q_f = Q_b = 0 in
// (D, mu). eps_grid sorted descending. A Newton failure aborts with the
// partial table (complete = false).
ContinuationResult continue_loop(double r, const std::vector<double>& eps_grid, double c = 0.0,
                                 const ShootTol& tol = {});

struct TangencyReport {
    bool pass = false;
    double final_angle_deg = 0.0;
    bool decreasing = false;
    std::vector<double> angles_deg;
};

// Angle between (orbit - target) and the principal stable eigenvector over
// the last samples of the approach.
TangencyReport tangency_check(const OrbitSolution& orbit, const SpectralData& target_spec,
                              int n_samples = 10, double pass_deg = 5.0);

} // namespace barkley
