#pragma once

#include "barkley/types.hpp"

namespace barkley {

// Reaction terms. f carries the square on (q-1) only; this is the form
// consistent with the parabola branch of the critical manifold and every
// Melnikov formula downstream (the alternative placement of the square is
// not: see README).
double reaction_f(double q, double u, double r);
double reaction_g(double q, double u);

// Analytic partial derivatives of the reaction terms.
double df_dq(double q, double u, double r);
double df_du(double q, double u, double r);
double dg_dq(double q, double u);
double dg_du(double q, double u);

// u-height of the parabola M2 at a given q, and the q > 1 branch of M2 at a given u.
double m2_height(double q, double r);
double q_on_m2_right(double u, double r);
double dq_on_m2_right_du(double u, double r);

// Right-hand side of the traveling-wave ODE. Throws PoleAtWaveSpeed when
// |u - c| falls under params.pole_tol.
Vec3 tw_vector_field(const PhasePoint& p, const ModelParams& params);

// u-component of the turbulent equilibrium X2, found by bisection of the
// M2/H0 intersection on [6/5, 4/3]. Throws NoRoot for r <= 2/3.
double compute_ub(double r, double tol = 1e-12);

// All equilibria and branch roots for r > 2/3.
EquilibriumSet compute_equilibria(double r, double tol = 1e-12);

// Third intersection of M2 with the nullcline H0 (the q < 1 branch); the
// unstable middle state of the bistable reaction kinetics.
void middle_kinetics_equilibrium(double r, double* q_out, double* u_out);

} // namespace barkley
