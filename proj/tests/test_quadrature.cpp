#include <doctest.h>

#include <cmath>
#include <random>

#include "barkley/errors.hpp"
#include "barkley/quadrature.hpp"

using namespace barkley;

namespace {

const double S2 = std::sqrt(2.0);

// the two kernels of the closed-form antiderivative lemma
double kernel3(double x) { return std::exp(-S2 * x) / std::pow(1.0 + std::exp(-0.5 * S2 * x), 3); }
double kernel4(double x) {
    return std::exp(-1.5 * S2 * x) / std::pow(1.0 + std::exp(-0.5 * S2 * x), 4);
}
double anti3(double x) { return -1.0 / (S2 * std::pow(std::exp(0.5 * S2 * x) + 1.0, 2)); }
double anti4(double x) { return -S2 / (3.0 * std::pow(std::exp(0.5 * S2 * x) + 1.0, 3)); }

} // namespace

TEST_CASE("adaptive Simpson against the closed-form antiderivatives") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ab(-18.0, 18.0);
    for (int i = 0; i < 20; ++i) {
        double a = ab(rng), b = ab(rng);
        if (a > b) std::swap(a, b);
        QuadResult q3 = adaptive_simpson(kernel3, a, b, 1e-12);
        CHECK(std::abs(q3.value - (anti3(b) - anti3(a))) < 1e-10);
        QuadResult q4 = adaptive_simpson(kernel4, a, b, 1e-12);
        CHECK(std::abs(q4.value - (anti4(b) - anti4(a))) < 1e-10);
    }
}

TEST_CASE("real-line quadrature hits the closed-form anchors") {
    QuadResult q3 = integrate_real_line(kernel3, 1e-12);
    CHECK(std::abs(0.5 * S2 * q3.value - 0.5) < 1e-10);
    QuadResult q4 = integrate_real_line(kernel4, 1e-12);
    CHECK(std::abs(0.5 * q4.value - 1.0 / (3.0 * S2)) < 1e-10);
}

TEST_CASE("real-line quadrature: gaussian sanity and error reporting") {
    auto g = [](double x) { return std::exp(-x * x); };
    QuadResult q = integrate_real_line(g, 1e-12);
    CHECK(q.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
    CHECK(q.err < 1e-8);
}

TEST_CASE("non-decaying integrand is rejected") {
    auto flat = [](double x) { return 1.0 / (1.0 + x * x * 1e-14); };
    CHECK_THROWS_AS(integrate_real_line(flat, 1e-10), NonDecaying);
}

TEST_CASE("tanh-sinh on (0,1): beta-integral identities") {
    // int t^(a-1) (1-t)^(b-1) = B(a, b), in log space
    auto beta_log = [](double a, double b) {
        return [a, b](double lt, double l1t) { return (a - 1.0) * lt + (b - 1.0) * l1t; };
    };
    auto B = [](double a, double b) {
        return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    };
    for (auto [a, b] : {std::pair{1.5, 2.5}, {0.3, 4.0}, {2.0, 2.0}, {1e-4, 3.0}}) {
        double w_max = std::max(6.5, std::asinh(80.0 / (M_PI * std::min(a, b))) + 1.5);
        QuadResult q = tanh_sinh_01_log(beta_log(a, b), 1e-13, w_max);
        CHECK(q.value == doctest::Approx(B(a, b)).epsilon(1e-11));
    }
}
