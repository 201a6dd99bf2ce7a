#pragma once

#include "barkley/quadrature.hpp"
#include "barkley/singular_loop.hpp"

namespace barkley {

// The four kernel integrals shared by every Melnikov quantity of one side,
//   I2 = int exp(-alpha chi) phi'^2,   Kk = int exp(-alpha chi) phi' phi^k,
// with alpha = sqrt(2) (1/2 - q_minus/q_plus).
struct KernelSet {
    double I2 = 0.0, K1 = 0.0, K2 = 0.0, K3 = 0.0;
    double err = 0.0;
};

// Kernels for a side with branch roots (q_plus, q_minus), via the phi
// substitution onto (0,1) and tanh-sinh quadrature; uniformly valid down to
// r -> 2/3 where the chi-space tails become arbitrarily slow.
KernelSet eval_kernels(double q_plus, double q_minus, double tol = 1e-12);

struct MelnikovReport {
    double r = 0.0;
    double Mhat_f = 0.0, M_f = 0.0;
    double Mhat_b = 0.0, M_b = 0.0;
    double Mtilde_f = 0.0;
    double Mhat = 0.0;
    double dQf_dmu = 0.0, dQb_dmu = 0.0;
    double dQf_du = 0.0, dQb_du = 0.0;
    double quad_err = 0.0;
    // kernel integrals kept for the limit checks (front side)
    KernelSet kf, kb;
};

// Every Melnikov quantity of the traveling-wave analysis at one r. tol is the kernel
// quadrature tolerance.
MelnikovReport eval_melnikov_suite(double r, double tol = 1e-11);

// Root of r -> Mtilde_f(r) in (2/3, 1) by bisection; the twist boundary.
double find_beta(double tol = 1e-6);

// M_j = int <psi_j, B dgamma_j> dxi at eps = 0, which reduces to
// -(1/D0) int exp(-(mu0+u*) xi / D0) s_j^2 dxi; direct xi-space quadrature,
// independent of the kernel route.
double melnikov_direct_B(Side side, const SingularLoopData& loop, double tol = 1e-11);

// Direct xi-space quadrature of dQb/du (test oracle for the kernel route;
// the heavy tail makes it unusable for r very close to 2/3).
double dqb_du_direct(const SingularLoopData& loop, double tol = 1e-11);

} // namespace barkley
