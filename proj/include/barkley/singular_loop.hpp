#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "barkley/types.hpp"

namespace barkley {

enum class Side { front, back };

// Sigmoid phi(chi) = 1/(1 + exp(-sqrt(2) chi / 2)) and its derivative,
// evaluated in overflow-safe branches.
void phi_eval(double chi, double* phi, double* phi_prime);

// State of one explicit singular profile: q, s = dq/dxi, sdot = ds/dxi, u.
struct ProfileState {
    double q, s, sdot, u;
};

// Analytic front/back profile of the fast subsystem in its layer.
class ProfileEvaluator {
  public:
    ProfileEvaluator() = default;
    ProfileEvaluator(Side side, double r, double D, double q_plus, double u_layer);

    ProfileState operator()(double xi) const;
    Side side() const { return side_; }
    double q_plus() const { return p_; }
    double u_layer() const { return u_; }
    double decay_rate() const { return a_; }  // q_plus * sqrt((r+0.1)/D)

  private:
    Side side_ = Side::front;
    double r_ = 0.0, D_ = 1.0, p_ = 0.0, u_ = 0.0, a_ = 0.0;
};

// Parameters of the singular heteroclinic loop at a given r, with the two
// explicit profiles. Built by solve_singular_parameters.
struct SingularLoopData {
    double r = 0.0;
    double D0 = 0.0;
    double mu0 = 0.0;
    double u_b = 0.0;
    double q_f_plus = 0.0, q_f_minus = 0.0;
    double q_b_plus = 0.0, q_b_minus = 0.0;
    double con1_residual = 0.0;
    double con2_residual = 0.0;
    ProfileEvaluator front;
    ProfileEvaluator back;
};

// Closed-form solve of the two matching conditions for (D0, mu0).
// Throws NoRoot (propagated from compute_ub) for r <= 2/3.
SingularLoopData solve_singular_parameters(double r);

// Bounded adjoint solution along the singular front/back:
//   psi_f = exp(-(mu0+2) xi / D0) (sdot_f, -s_f, 0),
//   psi_b = exp(-(mu0+u_b) xi / D0) (sdot_b, -s_b, 0),
// evaluated in log space against overflow in the tails.
Vec3 adjoint_psi(Side side, double xi, const SingularLoopData& loop);

enum class ProbeKind { b_minus, b_plus, f_minus, f_plus };
enum class ProbeStatus { pass, fail, inconclusive };

struct SignReport {
    ProbeKind which;
    ProbeStatus status = ProbeStatus::inconclusive;
    int eventual_sign = 0;
    bool converges_to_zero = false;
    std::vector<std::pair<double, double>> samples;  // (xi, d(xi)) above the underflow floor
    std::string note;
};

// Tail of an eps > 0 connecting orbit: (s, sdot) at xi measured from the
// orbit's section crossing; nullopt past the trustworthy range.
using OrbitTailFn = std::function<std::optional<std::pair<double, double>>(double xi)>;

// Asymptotic sign probe of the scalar products behind hypothesis H6. The
// eps = 0 variants exist for b-/f- only; b+/f+ require the orbit tail.
SignReport scalar_product_sign_probe(ProbeKind which, const SingularLoopData& loop,
                                     const OrbitTailFn* orbit_tail = nullptr,
                                     double xi_base = 0.5, int k_max = 20,
                                     int stable_needed = 8, double floor = 1e-280);

} // namespace barkley
