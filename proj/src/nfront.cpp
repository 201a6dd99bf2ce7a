#include "barkley/nfront.hpp"

#include <cmath>

#include "barkley/errors.hpp"

namespace barkley {

std::vector<double> eta_sequence(int N, double beta1, double beta2) {
    if (N <= 1) throw InvalidRatios("eta_sequence: N must exceed 1");
    if (!(beta1 > 1.0 && beta2 > 1.0))
        throw InvalidRatios("eta_sequence: beta ratios must exceed 1");
    std::vector<double> eta(N + 1, 0.0);
    eta[N] = 0.0;  // adopted convention; the recurrence never defines eta_N
    eta[N - 1] = beta1 * beta2 - 1.0;
    for (int k = N - 2; k >= 0; --k) eta[k] = beta1 * eta[k + 1] + eta[N - 1];
    return eta;
}

NFrontTimes return_times(double rho, int N, const SpectralData& spec1, const SpectralData& spec2) {
    if (!(rho > 0.0 && rho < 1.0)) throw InvalidRho("return_times: rho must lie in (0,1)");
    NFrontTimes t;
    t.N = N;
    t.rho = rho;
    t.beta1 = spec1.lambda3 / (-spec1.lambda2);
    t.beta2 = spec2.lambda3 / (-spec2.lambda2);
    t.eta = eta_sequence(N, t.beta1, t.beta2);
    double lr = std::log(rho);
    t.tau.resize(2 * N);
    t.sigma.resize(N);
    for (int k = 0; k < N; ++k) {
        t.tau[2 * k] = lr / spec2.lambda2;
        t.tau[2 * k + 1] = (t.beta2 + t.eta[k + 1]) * lr / spec1.lambda2;
        t.sigma[k] = (-spec2.lambda3 + t.eta[k + 1] * spec2.lambda2) / spec1.lambda2;
    }
    return t;
}

std::vector<EigenvaluePrediction> predict_small_eigenvalues(double /*rho*/, int N,
                                                            const NFrontTimes& times, int Mf_sign,
                                                            int Mb_sign) {
    std::vector<EigenvaluePrediction> out;
    out.reserve(2 * N + 1);
    for (int k = 1; k <= N; ++k) {
        out.push_back({2 * k - 1, 1.0, Mb_sign});
        out.push_back({2 * k, times.beta2 + times.eta[k], Mf_sign});
    }
    out.push_back({2 * N + 1, 0.0, 0});
    return out;
}

} // namespace barkley
