#include <doctest.h>

#include <cmath>
#include <random>

#include "barkley/errors.hpp"
#include "barkley/nfront.hpp"

using namespace barkley;

namespace {

SpectralData mock_spec(double l1, double l2, double l3) {
    SpectralData s;
    s.lambda1 = l1;
    s.lambda2 = l2;
    s.lambda3 = l3;
    return s;
}

} // namespace

TEST_CASE("eta recurrence: base case and one unrolled step") {
    // N=2: eta_1 = b1 b2 - 1, eta_0 = b1 eta_1 + eta_1 = (b1 + 1)(b1 b2 - 1)
    double b1 = 1.7, b2 = 2.9;
    auto eta = eta_sequence(2, b1, b2);
    REQUIRE(eta.size() == 3);
    CHECK(eta[1] == doctest::Approx(b1 * b2 - 1.0));
    CHECK(eta[0] == doctest::Approx((b1 + 1.0) * (b1 * b2 - 1.0)));
    CHECK(eta[2] == 0.0);

    auto eta2 = eta_sequence(5, 2.0, 2.0);
    CHECK(eta2[4] == doctest::Approx(3.0));

    CHECK_THROWS_AS(eta_sequence(4, 0.9, 2.0), InvalidRatios);
    CHECK_THROWS_AS(eta_sequence(1, 2.0, 2.0), InvalidRatios);
}

TEST_CASE("eta is strictly decreasing") {
    auto eta = eta_sequence(10, 1.5, 2.3);
    for (int k = 0; k + 1 <= 9; ++k) CHECK(eta[k] > eta[k + 1]);
}

TEST_CASE("return times: positivity, equal even layers, sigma identity") {
    SpectralData s1 = mock_spec(-2.0, -0.03, 1.4);
    SpectralData s2 = mock_spec(-1.1, -0.05, 0.9);
    NFrontTimes t = return_times(0.02, 4, s1, s2);
    for (double tau : t.tau) CHECK(tau > 0.0);
    for (int k = 1; k < 4; ++k) CHECK(t.tau[2 * k] == t.tau[0]);
    // sigma equals the ratio tau_{2k+1}/tau_{2k} exactly
    for (int k = 0; k < 4; ++k)
        CHECK(std::abs(t.sigma[k] - t.tau[2 * k + 1] / t.tau[2 * k]) <
              1e-12 * std::max(1.0, std::abs(t.sigma[k])));
    for (int k = 0; k + 1 < 4; ++k) CHECK(t.sigma[k] > t.sigma[k + 1]);

    CHECK_THROWS_AS(return_times(1.5, 4, s1, s2), InvalidRho);
}

TEST_CASE("property sweep: 1000 random configurations") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> bd(1.0 + 1e-6, 5.0);
    std::uniform_real_distribution<double> rd(1e-6, 0.5);
    std::uniform_int_distribution<int> nd(2, 12);
    for (int trial = 0; trial < 1000; ++trial) {
        int N = nd(rng);
        double b1 = bd(rng), b2 = bd(rng), rho = rd(rng);
        SpectralData s1 = mock_spec(-3.0, -1.0 / b1, 1.0);  // lambda3/-lambda2 = b1
        SpectralData s2 = mock_spec(-3.0, -1.0 / b2, 1.0);
        NFrontTimes t = return_times(rho, N, s1, s2);

        CHECK(t.eta[N - 1] == doctest::Approx(b1 * b2 - 1.0));
        CHECK(t.eta[N - 1] > 0.0);
        bool eta_dec = true, tau_pos = true, sigma_dec = true;
        for (int k = 0; k + 1 <= N - 1; ++k) eta_dec &= t.eta[k] > t.eta[k + 1];
        for (double tau : t.tau) tau_pos &= tau > 0.0;
        for (int k = 0; k + 1 < N; ++k) sigma_dec &= t.sigma[k] > t.sigma[k + 1];
        CHECK(eta_dec);
        CHECK(tau_pos);
        CHECK(sigma_dec);

        auto pred = predict_small_eigenvalues(rho, N, t, -1, -1);
        CHECK((int)pred.size() == 2 * N + 1);
        int zeros = 0, negs = 0;
        for (const auto& p : pred) {
            if (p.sign == 0) {
                ++zeros;
                CHECK(p.index == 2 * N + 1);
            } else if (p.sign < 0) {
                ++negs;
            }
        }
        CHECK(zeros == 1);
        CHECK(negs == 2 * N);
    }
}

TEST_CASE("eigenvalue scaling exponents separate the two families") {
    SpectralData s1 = mock_spec(-2.0, -0.5, 1.2);
    SpectralData s2 = mock_spec(-2.0, -0.4, 1.1);
    int N = 3;
    NFrontTimes t = return_times(0.01, N, s1, s2);
    auto pred = predict_small_eigenvalues(0.01, N, t, -1, -1);
    for (const auto& p : pred) {
        if (p.sign == 0) continue;
        if (p.index % 2 == 1)
            CHECK(p.scaling_exponent == 1.0);
        else
            CHECK(p.scaling_exponent > 1.0);  // rho^(beta2+eta_k) << rho
    }
}
