#pragma once

#include <stdexcept>
#include <string>

namespace barkley {

// Base class for every numerical failure the library reports.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct PoleAtWaveSpeed : NumericalError {
    explicit PoleAtWaveSpeed(const std::string& msg = "u-component at the wave-speed pole")
        : NumericalError(msg) {}
};

struct NoRoot : NumericalError {
    explicit NoRoot(const std::string& msg) : NumericalError(msg) {}
};

struct ComplexSpectrum : NumericalError {
    explicit ComplexSpectrum(const std::string& msg) : NumericalError(msg) {}
};

struct NotHyperbolic : NumericalError {
    explicit NotHyperbolic(const std::string& msg) : NumericalError(msg) {}
};

struct NotAnEquilibrium : NumericalError {
    explicit NotAnEquilibrium(const std::string& msg) : NumericalError(msg) {}
};

struct NoConvergence : NumericalError {
    explicit NoConvergence(const std::string& msg) : NumericalError(msg) {}
};

struct NonDecaying : NumericalError {
    explicit NonDecaying(const std::string& msg) : NumericalError(msg) {}
};

struct NewtonDiverged : NumericalError {
    explicit NewtonDiverged(const std::string& msg) : NumericalError(msg) {}
};

struct BlowUp : NumericalError {
    explicit BlowUp(const std::string& msg) : NumericalError(msg) {}
};

struct Inconclusive : NumericalError {
    explicit Inconclusive(const std::string& msg) : NumericalError(msg) {}
};

struct InvalidRatios : NumericalError {
    explicit InvalidRatios(const std::string& msg) : NumericalError(msg) {}
};

struct InvalidRho : NumericalError {
    explicit InvalidRho(const std::string& msg) : NumericalError(msg) {}
};

struct GridTooCoarse : NumericalError {
    explicit GridTooCoarse(const std::string& msg) : NumericalError(msg) {}
};

struct CFLViolation : NumericalError {
    explicit CFLViolation(const std::string& msg) : NumericalError(msg) {}
};

struct NonFinite : NumericalError {
    explicit NonFinite(const std::string& msg) : NumericalError(msg) {}
};

struct LostFront : NumericalError {
    explicit LostFront(const std::string& msg) : NumericalError(msg) {}
};

struct NotSettled : NumericalError {
    explicit NotSettled(const std::string& msg) : NumericalError(msg) {}
};

} // namespace barkley
