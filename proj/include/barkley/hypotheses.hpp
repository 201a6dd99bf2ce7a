#pragma once

#include <string>
#include <utility>
#include <vector>

#include "barkley/melnikov.hpp"
#include "barkley/orbits.hpp"

namespace barkley {

enum class HypStatus { pass, fail, proxy_pass, not_computable };

struct HypothesisEntry {
    std::string id;  // "H0" .. "H7"
    HypStatus status = HypStatus::not_computable;
    std::vector<std::pair<std::string, double>> evidence;
    std::string note;
};

struct HypothesisVerdict {
    double r = 0.0, eps = 0.0, c = 0.0;
    double D_used = 0.0, mu_used = 0.0;
    std::vector<HypothesisEntry> entries;
    bool overall = false;

    const HypothesisEntry& at(const std::string& id) const;
};

struct VerifyTolerances {
    double nonzero_margin = 1e-10;   // |x| must exceed this to count as nonzero
    double eig_zero_tol = 1e-9;
    double melnikov_tol = 1e-11;
    ShootTol shoot;
    bool with_orbits = true;  // run the eps > 0 continuation for H6 probes
};

// All computable H0..H7 checks at one (r, eps, c). Component failures are
// folded into not-computable entries rather than thrown.
HypothesisVerdict verify_hypotheses(double r, double eps, double c,
                                    const VerifyTolerances& tol = {});

std::string verdict_to_json(const HypothesisVerdict& v);
std::string status_name(HypStatus s);

} // namespace barkley
