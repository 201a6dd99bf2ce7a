#pragma once

#include <functional>

namespace barkley {

struct QuadResult {
    double value = 0.0;
    double err = 0.0;  // absolute error estimate
};

// Adaptive Simpson on a finite interval.
QuadResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                            double tol, int max_depth = 60);

struct RealLineOptions {
    double t_init = 16.0;
    double t_max = 1e7;        // NonDecaying beyond this truncation
    double tail_floor = 1e-15; // relative to the integrand scale at {-5, 0, 5}
};

// Quadrature over the real line for integrands with (at least) exponential
// decay: the truncation half-widths grow until |f| falls under
// tail_floor * scale, then adaptive Simpson runs on the bracket.
// Throws NonDecaying when the growth cap is reached, NoConvergence from the
// subdivision limit.
QuadResult integrate_real_line(const std::function<double(double)>& f, double tol,
                               const RealLineOptions& opts = {});

// tanh-sinh quadrature of a positive integrand on (0,1), supplied in log
// space: log_f(log t, log(1-t)) returns log of the integrand. Handles
// endpoint singularities (1-t)^(nu) down to nu > -1.
QuadResult tanh_sinh_01_log(const std::function<double(double, double)>& log_f, double tol,
                            double w_max = 7.0);

} // namespace barkley
