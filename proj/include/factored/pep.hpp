#pragma once
// Persistent EP: sequential EP that skips any factor update whose factor-level
// belief would be non-integrable, leaving that message untouched for the
// sweep.  The skip rule keeps the variable belief integrable throughout.

#include <utility>
#include <vector>

#include "factored/ep.hpp"

namespace factored {

// One record per sub-iteration (factor visit): which factor, whether the
// integrability check passed (updated = true) or the update was skipped, and
// the belief natural parameters after the sub-iteration.
struct PepStep {
    int factor = 0;
    bool updated = false;
    GaussianNat belief;
};

using PepTrace = std::vector<PepStep>;

// Runs persistent EP.  Per sweep, factors are visited in order 1..N; at each
// factor the cavity is formed and the mode's integrability check runs:
//   Strict  - check_integrability(f_n, cavity) == Integrable, i.e. the
//             factor-level belief f_n * cavity has an integral;
//   Relaxed - cavity.xi > 0, i.e. the cavity alone is integrable.
// On failure the message is left unchanged (a skip).  On success the factor
// belief is moment-matched and the message replaced so that message * cavity
// reproduces the matched Gaussian exactly; the belief is written directly
// from the matched moments (equal in exact arithmetic, and immune to the
// cancellation that belief-via-message-sum suffers near the integrability
// boundary).  Convergence: belief natural parameters change less than
// config.tol across a sweep (a sweep of pure skips therefore terminates), or
// config.max_sweeps.  A matched variance of zero is a numerical breakdown
// (the message division is undefined there).
// Errors: nonpositive config.init_xi (initial belief non-integrable) -> BadInit.
std::pair<Estimate, PepTrace> run_persistent_ep(const std::vector<Gmm1D>& factors,
                                                const SolverConfig& config);

}  // namespace factored
