#include "barkley/spectra.hpp"

#include <algorithm>
#include <cmath>

#include "barkley/errors.hpp"
#include "barkley/model.hpp"

namespace barkley {

Mat3 jacobian_tw(const PhasePoint& p, const ModelParams& params) {
    if (std::abs(p.u - params.c) < params.pole_tol)
        throw PoleAtWaveSpeed("jacobian_tw: |u - c| below pole threshold");
    double r = params.r, D = params.D, eps = params.eps, c = params.c;
    double mu = params.mu();
    double umc = p.u - c;
    double g = reaction_g(p.q, p.u);
    Mat3 J;
    J[0] = {0.0, 1.0, 0.0};
    J[1] = {-df_dq(p.q, p.u, r) / D, (p.u + mu) / D, (p.s - df_du(p.q, p.u, r)) / D};
    J[2] = {eps * dg_dq(p.q, p.u) / umc, 0.0, eps * (dg_du(p.q, p.u) * umc - g) / (umc * umc)};
    return J;
}

namespace {

Vec3 matvec(const Mat3& A, const Vec3& v) {
    return {A[0][0] * v[0] + A[0][1] * v[1] + A[0][2] * v[2],
            A[1][0] * v[0] + A[1][1] * v[1] + A[1][2] * v[2],
            A[2][0] * v[0] + A[2][1] * v[1] + A[2][2] * v[2]};
}

// characteristic polynomial det(lambda I - A) = lambda^3 + c2 lambda^2 + c1 lambda + c0
void char_poly(const Mat3& A, double& c2, double& c1, double& c0) {
    double tr = A[0][0] + A[1][1] + A[2][2];
    double m01 = A[0][0] * A[1][1] - A[0][1] * A[1][0];
    double m02 = A[0][0] * A[2][2] - A[0][2] * A[2][0];
    double m12 = A[1][1] * A[2][2] - A[1][2] * A[2][1];
    double det = A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1])
               - A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0])
               + A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
    c2 = -tr;
    c1 = m01 + m02 + m12;
    c0 = -det;
}

double poly(double x, double c2, double c1, double c0) { return ((x + c2) * x + c1) * x + c0; }
double dpoly(double x, double c2, double c1) { return (3.0 * x + 2.0 * c2) * x + c1; }

Vec3 eigvec_for(const Mat3& A, double lam) {
    Mat3 B = A;
    for (int i = 0; i < 3; ++i) B[i][i] -= lam;
    // null vector from the largest cross product of two rows
    Vec3 r0 = {B[0][0], B[0][1], B[0][2]};
    Vec3 r1 = {B[1][0], B[1][1], B[1][2]};
    Vec3 r2 = {B[2][0], B[2][1], B[2][2]};
    Vec3 c01 = cross(r0, r1), c02 = cross(r0, r2), c12 = cross(r1, r2);
    Vec3 best = c01;
    if (norm(c02) > norm(best)) best = c02;
    if (norm(c12) > norm(best)) best = c12;
    if (norm(best) < 1e-14) {
        // near-defective; fall back to a coordinate direction minimizing |B v|
        best = {1.0, 0.0, 0.0};
        double bn = norm(matvec(B, best));
        for (Vec3 cand : {Vec3{0.0, 1.0, 0.0}, Vec3{0.0, 0.0, 1.0}}) {
            double n = norm(matvec(B, cand));
            if (n < bn) { bn = n; best = cand; }
        }
    }
    Vec3 v = normalized(best);
    // sign convention: first component above noise is positive
    double scale = norm(v);
    for (int i = 0; i < 3; ++i) {
        if (std::abs(v[i]) > 1e-12 * scale) {
            if (v[i] < 0.0) v = -1.0 * v;
            break;
        }
    }
    return v;
}

} // namespace

SpectralData eigen_decompose_3x3(const Mat3& A, double tol) {
    for (auto& row : A)
        for (double x : row)
            if (!std::isfinite(x)) throw NonFinite("eigen_decompose_3x3: matrix not finite");

    double c2, c1, c0;
    char_poly(A, c2, c1, c0);

    // depressed cubic t^3 + p t + q with lambda = t - c2/3
    double sh = c2 / 3.0;
    double p = c1 - c2 * c2 / 3.0;
    double q = c0 - c1 * c2 / 3.0 + 2.0 * c2 * c2 * c2 / 27.0;
    double scale = std::max({std::abs(c2), std::sqrt(std::abs(c1)), std::cbrt(std::abs(c0)), 1e-300});

    double roots[3];
    double disc = -4.0 * p * p * p - 27.0 * q * q;
    if (disc >= 0.0 || std::abs(disc) < 1e-13 * std::pow(scale, 6)) {
        // three real roots (trigonometric form)
        if (std::abs(p) < 1e-300) {
            double t = std::cbrt(-q);
            roots[0] = roots[1] = roots[2] = t - sh;
        } else {
            double m = 2.0 * std::sqrt(std::max(-p, 0.0) / 3.0);
            double arg = 1.5 * q / p * std::sqrt(-3.0 / p);
            arg = std::clamp(arg, -1.0, 1.0);
            double theta = std::acos(arg);
            for (int k = 0; k < 3; ++k)
                roots[k] = m * std::cos((theta - 2.0 * M_PI * k) / 3.0) - sh;
        }
    } else {
        // one real root + complex pair; report the pair's imaginary part
        double sq = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
        double t1 = std::cbrt(-q / 2.0 + sq) + std::cbrt(-q / 2.0 - sq);
        double re = -t1 / 2.0 - sh;
        double im = std::sqrt(std::max(0.0, 3.0 * t1 * t1 / 4.0 + p));
        if (im > tol)
            throw ComplexSpectrum("eigen_decompose_3x3: complex pair, |imag| = " + std::to_string(im)
                                  + " at Re = " + std::to_string(re));
        roots[0] = t1 - sh;
        roots[1] = roots[2] = re;
    }

    // one Newton polish step per root on the characteristic cubic
    for (double& x : roots) {
        double d = dpoly(x, c2, c1);
        if (std::abs(d) > 1e-30) x -= poly(x, c2, c1, c0) / d;
    }
    std::sort(roots, roots + 3);

    SpectralData s;
    s.lambda1 = roots[0];
    s.lambda2 = roots[1];
    s.lambda3 = roots[2];
    double lscale = std::max({std::abs(roots[0]), std::abs(roots[2]), 1e-300});
    s.multiple = (roots[1] - roots[0] < 1e-9 * lscale) || (roots[2] - roots[1] < 1e-9 * lscale);
    s.e1 = eigvec_for(A, s.lambda1);
    s.e2 = eigvec_for(A, s.lambda2);
    s.e3 = eigvec_for(A, s.lambda3);
    for (int i = 0; i < 3; ++i) {
        Vec3 res = matvec(A, s.e(i)) - s.lambda(i) * s.e(i);
        for (double x : res) s.residual = std::max(s.residual, std::abs(x));
    }
    return s;
}

HyperbolicityReport classify_hyperbolicity(const EquilibriumSet& eqs, const ModelParams& params,
                                           double zero_tol) {
    HyperbolicityReport rep;
    rep.X1 = eigen_decompose_3x3(jacobian_tw(eqs.X1, params));
    rep.X2 = eigen_decompose_3x3(jacobian_tw(eqs.X2, params));
    for (const SpectralData* s : {&rep.X1, &rep.X2}) {
        if (std::min({std::abs(s->lambda1), std::abs(s->lambda2), std::abs(s->lambda3)}) < zero_tol)
            throw NotHyperbolic("classify_hyperbolicity: eigenvalue within tolerance of zero");
    }
    auto ok = [](const SpectralData& s) {
        return s.lambda1 < s.lambda2 && s.lambda2 < 0.0 && s.lambda3 > 0.0 &&
               -s.lambda2 < s.lambda3 && !s.multiple;
    };
    rep.beta1 = rep.X1.lambda3 / (-rep.X1.lambda2);
    rep.beta2 = rep.X2.lambda3 / (-rep.X2.lambda2);
    rep.pass = ok(rep.X1) && ok(rep.X2);
    return rep;
}

bool kinetics_stability(double q, double u, double r, double eps, double tol) {
    double f = reaction_f(q, u, r);
    double g = reaction_g(q, u);
    double scale = std::max({std::abs(q), std::abs(u), 1.0});
    if (std::abs(f) > tol * scale || std::abs(g) > tol * scale)
        throw NotAnEquilibrium("kinetics_stability: (q,u) is not a zero of (f,g)");
    // 2x2 Jacobian of (f, eps*g); negative real parts iff tr < 0 and det > 0
    double a = df_dq(q, u, r), b = df_du(q, u, r);
    double c = eps * dg_dq(q, u), d = eps * dg_du(q, u);
    return (a + d) < 0.0 && (a * d - b * c) > 0.0;
}

} // namespace barkley
