#pragma once

#include <array>
#include <cmath>

namespace barkley {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline Vec3 normalized(const Vec3& a) {
    double n = norm(a);
    return {a[0] / n, a[1] / n, a[2] / n};
}

// Point of the traveling-wave phase space: turbulence level q, its derivative s, centerline velocity u.
struct PhasePoint {
    double q = 0.0;
    double s = 0.0;
    double u = 0.0;

    Vec3 vec() const { return {q, s, u}; }
    static PhasePoint from(const Vec3& v) { return {v[0], v[1], v[2]}; }
};

// Model parameters; mu = -(zeta + c) is the advection offset relative to the wave speed.
struct ModelParams {
    double r = 1.0;     // model Reynolds number
    double D = 1.0;     // diffusion rate, > 0
    double zeta = 0.0;  // turbulent advection offset, >= 0 in the model
    double eps = 0.0;   // time-scale ratio, >= 0
    double c = 0.0;     // wave speed
    double pole_tol = 1e-8;

    double mu() const { return -(zeta + c); }

    // Convenience: fix (D, mu) directly with c held; zeta absorbs the difference.
    static ModelParams with_mu(double r, double D, double mu, double eps, double c) {
        ModelParams p;
        p.r = r;
        p.D = D;
        p.eps = eps;
        p.c = c;
        p.zeta = -mu - c;
        return p;
    }
};

struct EquilibriumSet {
    PhasePoint X1;  // laminar state (0,0,2)
    PhasePoint X2;  // turbulent state (q_b_plus, 0, u_b)
    PhasePoint Y1;  // layer saddle (q_f_plus, 0, 2)
    PhasePoint Y2;  // layer saddle (0, 0, u_b)
    double u_b = 0.0;
    double q_f_plus = 0.0;
    double q_f_minus = 0.0;
    double q_b_plus = 0.0;
    double q_b_minus = 0.0;
};

} // namespace barkley
