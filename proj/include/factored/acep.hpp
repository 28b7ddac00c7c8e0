#pragma once
// Analytic-continuation EP: natural-parameter sequential EP whose per-factor
// projection is constrained so that the NEXT factor's belief stays integrable.
// The factor-level mixture weights are evaluated as ratios against a reference
// component in the log domain, which stays well defined (by taking limits) on
// the closed admissible domain, including cavities that sit exactly on a
// component's integrability boundary.

#include <utility>
#include <vector>

#include "factored/ep.hpp"

namespace factored {

// Result of one constrained factor projection.
struct AcepFactorUpdate {
    int ref_component = 0;             // reference s (largest component precision)
    std::vector<double> log_rho;       // per-component log evidence ratio vs ref
    std::vector<double> rho_bar;       // normalized weights (0 for dropped)
    double mu_bf = 0.0;                // factor-belief mean
    double tau_bf = 0.0;               // factor-belief variance
    double xi_thres = 0.0;             // lower bound of the admissible domain
    double xi_out = 0.0;               // chosen message precision
    double nu_out = 0.0;               // chosen message linear parameter
    bool clipped_to_threshold = false; // xi_out == xi_thres (constraint active)
};

// Integrability classification with a boundary snap: combined component
// precisions within 1e-12 * max(1, |cavity.xi|, max_s xi_s) of zero count as
// exactly zero.  After a threshold-clipped update the next cavity sits
// mathematically exactly on a component boundary and floating point lands an
// ulp to either side; this classifier (used by the factor update's drop rule
// and by the run trace) keeps that case Boundary rather than letting rounding
// turn it into NonIntegrable.
IntegrabilityStatus acep_integrability(const Gmm1D& f, const GaussianNat& cavity);

// One constrained projection of factor f_n against its cavity.
//   - reference component: argmax xi_s (largest denominator precision);
//   - log rho: per-component evidence ratio in the log domain; components
//     whose combined precision is (snapped) zero get -infinity and drop out,
//     realizing the boundary limit of the weights;
//   - (mu_bf, tau_bf): moments of the normalized-weight mixture;
//   - xi_thres: Strict mode uses -min_s xi_s(f_next) - cavity.xi + msg_next.xi
//     (precisely the bound making the next factor's belief integrable);
//     Relaxed mode uses 0;
//   - xi_out: the unconstrained optimum 1/tau_bf - cavity.xi if that exceeds
//     xi_thres, else xi_thres with clipped_to_threshold set; nu_out solves the
//     stationarity condition at the chosen xi_out:
//     nu_out = (xi_out + cavity.xi) * mu_bf - cavity.nu.
// Errors: every component dropped -> DegenerateBelief; a combined precision
// genuinely negative (beyond the snap window; the precondition
// min_s xi_s + cavity.xi >= 0 is violated) -> NonIntegrableBelief; non-finite
// moments -> NumericalBreakdown.
AcepFactorUpdate update_factor_acep(const Gmm1D& f_n, const GaussianNat& cavity,
                                    const Gmm1D& f_next, const GaussianNat& msg_next,
                                    Mode mode);

// One record per sub-iteration: the factor visited, the full projection
// result, the belief after installing the message, and the integrability
// classification of the NEXT factor's belief (the quantity the strict
// constraint protects).
struct AcepStep {
    int factor = 0;
    AcepFactorUpdate update;
    GaussianNat belief;
    IntegrabilityStatus next_check = IntegrabilityStatus::Integrable;
};

using AcepTrace = std::vector<AcepStep>;

// Sequential sweeps n = 1..N with the next factor chosen cyclically,
// k = (n mod N) + 1.  Belief natural parameters are maintained incrementally
// and re-synced from the message sums at each sweep start; convergence is a
// belief change below config.tol across a sweep, or config.max_sweeps.
// Errors from update_factor_acep propagate.
std::pair<Estimate, AcepTrace> run_acep(const std::vector<Gmm1D>& factors,
                                        const SolverConfig& config);

}  // namespace factored
