#pragma once

#include <array>

#include "barkley/types.hpp"

namespace barkley {

// Eigen data of one 3x3 linearization, eigenvalues sorted ascending.
struct SpectralData {
    double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;
    Vec3 e1{}, e2{}, e3{};
    bool multiple = false;     // two eigenvalues closer than the simplicity tolerance
    double residual = 0.0;     // max ||A v - lambda v||_inf over the three pairs

    double lambda(int i) const { return i == 0 ? lambda1 : (i == 1 ? lambda2 : lambda3); }
    const Vec3& e(int i) const { return i == 0 ? e1 : (i == 1 ? e2 : e3); }
};

// Per-equilibrium classification for hypotheses H0/H1.
struct HyperbolicityReport {
    SpectralData X1, X2;
    double beta1 = 0.0;  // lambda3(X1) / (-lambda2(X1))
    double beta2 = 0.0;  // lambda3(X2) / (-lambda2(X2))
    bool pass = false;   // lambda1 < lambda2 < 0 < lambda3, -lambda2 < lambda3, simple, at both
    int dim_stable = 2;
    int dim_unstable = 1;
};

// Exact analytic Jacobian of the traveling-wave ODE. Throws PoleAtWaveSpeed.
Mat3 jacobian_tw(const PhasePoint& p, const ModelParams& params);

// Real eigen decomposition from the characteristic cubic (closed form plus a
// Newton polish per root). Throws ComplexSpectrum when a pair has imaginary
// part above tol.
SpectralData eigen_decompose_3x3(const Mat3& m, double tol = 1e-9);

// H0/H1 verdict at X1 and X2. Throws ComplexSpectrum or NotHyperbolic.
HyperbolicityReport classify_hyperbolicity(const EquilibriumSet& eqs, const ModelParams& params,
                                           double zero_tol = 1e-9);

// Reaction-kinetics (PDE bistability) check: stable iff both eigenvalues of
// the 2x2 Jacobian of (f, eps*g) have negative real part. Throws
// NotAnEquilibrium when (q,u) is not a zero of (f, g) to tolerance.
bool kinetics_stability(double q, double u, double r, double eps, double tol = 1e-6);

} // namespace barkley
