#pragma once

#include <vector>

#include "barkley/spectra.hpp"

namespace barkley {

// Return-time and ratio data of an N-front, from the eta recurrence and the
// principal eigenvalue ratios beta1, beta2.
struct NFrontTimes {
    int N = 0;
    double rho = 0.0;
    double beta1 = 0.0, beta2 = 0.0;
    std::vector<double> eta;    // eta_0 .. eta_{N-1}, plus the adopted eta_N = 0
    std::vector<double> tau;    // tau_0 .. tau_{2N-1}; even index = time near X2, odd = near X1
    std::vector<double> sigma;  // sigma_{2k+1}, k = 0 .. N-1
};

struct EigenvaluePrediction {
    int index;                // i in 1..2N+1
    double scaling_exponent;  // lambda_i ~ rho^exponent
    int sign;                 // -1, 0, +1 (0 only for the translation eigenvalue)
};

// eta_{N-1} = beta1*beta2 - 1, eta_k = beta1*eta_{k+1} + eta_{N-1} downward;
// eta_N := 0 is appended (the recurrence leaves it undefined; the value makes
// tau_{2N-1} the bare principal-ratio time). Throws InvalidRatios.
std::vector<double> eta_sequence(int N, double beta1, double beta2);

// Return times per the layer-passage formula. Throws InvalidRho, InvalidRatios.
NFrontTimes return_times(double rho, int N, const SpectralData& spec1, const SpectralData& spec2);

// Small-eigenvalue predictions of the stability theorem: 2N eigenvalues with
// signs tied to the Melnikov signs plus one exact zero.
std::vector<EigenvaluePrediction> predict_small_eigenvalues(double rho, int N,
                                                            const NFrontTimes& times, int Mf_sign,
                                                            int Mb_sign);

} // namespace barkley
