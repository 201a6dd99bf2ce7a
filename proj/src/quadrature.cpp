#include "barkley/quadrature.hpp"

#include <cmath>
#include <vector>

#include "barkley/errors.hpp"

namespace barkley {

namespace {

struct SimpsonState {
    const std::function<double(double)>* f;
    double tol;
    int max_depth;
    double err_sum;
};

double simpson_rec(SimpsonState& st, double a, double b, double fa, double fm, double fb,
                   double whole, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = (*st.f)(lm), frm = (*st.f)(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * st.tol || depth >= st.max_depth) {
        if (depth >= st.max_depth && std::abs(delta) > 15.0 * st.tol)
            throw NoConvergence("adaptive_simpson: subdivision limit reached");
        st.err_sum += std::abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    st.tol *= 0.5;
    double l = simpson_rec(st, a, m, fa, flm, fm, left, depth + 1);
    double r = simpson_rec(st, m, b, fm, frm, fb, right, depth + 1);
    st.tol *= 2.0;
    return l + r;
}

} // namespace

QuadResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                            double tol, int max_depth) {
    if (a == b) return {0.0, 0.0};
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    SimpsonState st{&f, tol, max_depth, 0.0};
    double v = simpson_rec(st, a, b, fa, fm, fb, whole, 0);
    return {v, st.err_sum};
}

QuadResult integrate_real_line(const std::function<double(double)>& f, double tol,
                               const RealLineOptions& opts) {
    double scale = std::max({std::abs(f(-5.0)), std::abs(f(0.0)), std::abs(f(5.0)), 1e-300});
    double floor = opts.tail_floor * scale;
    double tp = opts.t_init, tm = opts.t_init;
    while (std::abs(f(tp)) > floor) {
        tp *= 2.0;
        if (tp > opts.t_max) throw NonDecaying("integrate_real_line: +tail truncation cap reached");
    }
    while (std::abs(f(-tm)) > floor) {
        tm *= 2.0;
        if (tm > opts.t_max) throw NonDecaying("integrate_real_line: -tail truncation cap reached");
    }
    // split at the shoulders so the adaptive recursion spends work where mass is
    std::vector<double> knots{-tm, -5.0, 5.0, tp};
    if (tm <= 5.0) knots = {-tm, tp > 5.0 ? 5.0 : tp, tp};
    QuadResult total{};
    double prev = knots.front();
    for (size_t i = 1; i < knots.size(); ++i) {
        if (knots[i] <= prev) continue;
        QuadResult part = adaptive_simpson(f, prev, knots[i], tol / double(knots.size()));
        total.value += part.value;
        total.err += part.err;
        prev = knots[i];
    }
    return total;
}

QuadResult tanh_sinh_01_log(const std::function<double(double, double)>& log_f, double tol,
                            double w_max) {
    // node at w: t = 1/(1+exp(-2s)), s = (pi/2) sinh w; everything in logs so
    // endpoint-singular integrands stay representable
    auto softplus = [](double x) { return x > 36.0 ? x : std::log1p(std::exp(x)); };
    auto term = [&](double w) {
        double s = 0.5 * M_PI * std::sinh(w);
        double log_t = -softplus(-2.0 * s);
        double log_1mt = -softplus(2.0 * s);
        double log_w = std::log(0.25 * M_PI) + std::log(std::cosh(w)) -
                       2.0 * (std::abs(s) + std::log1p(std::exp(-2.0 * std::abs(s))) - std::log(2.0));
        double lv = log_f(log_t, log_1mt) + log_w;
        return lv < -700.0 ? 0.0 : std::exp(lv);
    };
    double h = 0.5;
    double sum = term(0.0);
    for (double w = h; w <= w_max; w += h) sum += term(w) + term(-w);
    double prev = sum * h;
    double value = prev;
    double err = std::abs(prev);
    for (int level = 1; level <= 12; ++level) {
        h *= 0.5;
        double add = 0.0;
        for (double w = h; w <= w_max; w += 2.0 * h) add += term(w) + term(-w);
        value = 0.5 * prev + h * add;
        err = std::abs(value - prev);
        prev = value;
        if (err <= tol * std::max(1.0, std::abs(value)) && level >= 3) break;
    }
    return {value, err};
}

} // namespace barkley
