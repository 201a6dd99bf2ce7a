#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "barkley/singular_loop.hpp"
#include "barkley/types.hpp"

namespace barkley {

enum class BoundaryCondition { periodic, outflow };

struct Field1D {
    double L = 0.0;
    int n = 0;
    double dx = 0.0;
    std::vector<double> q, u;
    double t = 0.0;
    BoundaryCondition bc = BoundaryCondition::outflow;
};

struct SimConfig {
    ModelParams params;
    double cfl = 0.9;
    double T_end = 0.0;
    int sample_stride = 100;
    double frame_speed = 0.0;     // co-moving frame shift; 0 = lab frame
    bool reactions_off = false;   // transport-only stepping (conservation checks)
};

enum class ProfileKind { uniform_laminar, uniform_turbulent, simple_front, simple_back, n_front };

struct ProfileSpec {
    ProfileKind kind = ProfileKind::uniform_laminar;
    int N = 0;                       // for n_front
    std::vector<double> spacings;    // for n_front: gaps between successive interfaces
};

// Initial conditions on a fresh grid. Fronts glue the analytic fast profile
// in q to a u-ramp over the slow scale (1/eps grid cells). Throws
// GridTooCoarse unless dx <= 0.1 sqrt(D) / q_f_plus resolves the jump.
Field1D build_initial_profile(const ProfileSpec& kind, const EquilibriumSet& eqs,
                              const SingularLoopData& loop, const SimConfig& cfg, double L, int n,
                              BoundaryCondition bc = BoundaryCondition::outflow);

// Stable explicit time step under the configured CFL number.
double compute_dt(const Field1D& f, const SimConfig& cfg);

// One Heun step (diffusion central, q-advection first-order upwind,
// -u u_x via local Lax-Friedrichs flux, reactions pointwise). Throws
// CFLViolation or NonFinite.
Field1D step_field(const Field1D& f, const SimConfig& cfg, double dt);

// In-place stepping used by the drivers.
void step_field_inplace(Field1D& f, const SimConfig& cfg, double dt);

struct WaveSpeed {
    double c = 0.0;
    double fit_residual = 0.0;
};

// Track the single q = level crossing and fit its position over the second
// half of the run. Throws LostFront.
WaveSpeed measure_wave_speed(Field1D f0, const SimConfig& cfg, double level);

// Evolve f in the frame moving at cfg.frame_speed, correcting the frame
// speed until the residual drift is below drift_tol; then keep settling
// until the shape change per unit time falls under shape_tol. Returns the
// corrected frame speed. Throws NotSettled when the budget runs out.
double settle_traveling(Field1D& f, SimConfig& cfg, double level, double drift_tol = 2e-5,
                        double shape_tol = 1e-6, double T_budget = 3000.0);

struct GrowthProbeOptions {
    double horizon = 80.0;
    std::uint64_t seed = 12345;
    bool translation_mode = false;  // probe the translation mode itself
    double settle_shape_tol = 1e-6;
};

// Linearized growth-rate estimate about a settled co-moving profile:
// evolve a perturbation with the finite-difference linearization of the
// discrete scheme, project out the translation mode, report the log-growth
// slope. Requires base pre-settled (shape drift below settle_shape_tol).
double growth_rate_probe(const Field1D& base, const SimConfig& cfg,
                         const GrowthProbeOptions& opts = {});

// Snapshot format: "# t=<t> n=<n> L=<L>" then n rows "x q u".
void write_snapshot(std::ostream& os, const Field1D& f);
Field1D read_snapshot(std::istream& is);

} // namespace barkley
