#include "factored/ep.hpp"

#include <cmath>
#include <limits>

namespace factored {

Estimate belief_estimate(const EpState& state) {
    Estimate est;
    if (!(state.belief.xi > 0.0)) {
        throw Error(ErrorCode::NonIntegrableBelief,
                    "belief_estimate: belief precision is not positive");
    }
    est.mean = state.belief.nu / state.belief.xi;
    est.variance = 1.0 / state.belief.xi;
    est.status = SolveStatus::Converged;
    return est;
}

Estimate run_clipping_ep(const std::vector<Gmm1D>& factors,
                         const SolverConfig& config, EpState* state_out) {
    config.validate();
    const int n = static_cast<int>(factors.size());
    if (n < 1) {
        throw Error(ErrorCode::BadParameter,
                    "run_clipping_ep: at least 1 factor required");
    }
    if (!(config.init_xi > 0.0)) {
        throw Error(ErrorCode::BadInit,
                    "run_clipping_ep: init_xi must be positive");
    }

    EpState st = EpState::init(n, config);
    constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

    auto fail = [&](Estimate est, int sweep, int factor) {
        est.mean = kNan;
        est.variance = kNan;
        est.status = SolveStatus::Failed;
        est.failure_reason = "numerical_breakdown";
        est.failure_iteration = sweep;
        est.failure_factor = factor;
        return est;
    };

    Estimate est;
    int sweep = 0;
    for (; sweep < config.max_sweeps; ++sweep) {
        st.resync();
        const GaussianNat before = st.belief;
        for (int i = 0; i < n; ++i) {
            GaussianNat cav = cavity(st, i);
            // Integrability projection: raise the cavity precision to just
            // above the largest admissible lower bound.  Local to this update;
            // the stored messages and belief keep the unprojected cavity.
            if (check_integrability(factors[i], cav) != IntegrabilityStatus::Integrable) {
                cav.xi = -factors[i].min_precision() + config.clip_xi;
            }
            const GmmPosterior post = gmm_times_gaussian(factors[i], cav);
            const double mu_bf = post.moments.mean;
            const double tau_bf = post.moments.variance;
            if (!std::isfinite(mu_bf) || !(tau_bf > 0.0)) {
                return fail(est, sweep, i);
            }
            GaussianNat msg{mu_bf / tau_bf - cav.nu, 1.0 / tau_bf - cav.xi};
            if (msg.xi <= 0.0) {
                // Clip: precision floored at clip_xi (variance toward
                // +infinity) while the message mean tracks the projected
                // belief mean.
                msg = GaussianNat{config.clip_xi * mu_bf, config.clip_xi};
            }
            if (config.damping < 1.0) {
                msg = GaussianNat{
                    config.damping * msg.nu + (1.0 - config.damping) * st.msgs[i].nu,
                    config.damping * msg.xi + (1.0 - config.damping) * st.msgs[i].xi};
            }
            // Incremental belief maintenance against the true (unprojected)
            // cavity.
            st.belief = nat_add(nat_sub(st.belief, st.msgs[i]), msg);
            st.msgs[i] = msg;
            if (!std::isfinite(st.belief.nu) || !std::isfinite(st.belief.xi)) {
                return fail(est, sweep, i);
            }
        }
        const double dn = std::abs(st.belief.nu - before.nu);
        const double dx = std::abs(st.belief.xi - before.xi);
        if (std::max(dn, dx) < config.tol) {
            if (state_out) *state_out = st;
            est = belief_estimate(st);
            est.iterations = sweep + 1;
            est.status = SolveStatus::Converged;
            return est;
        }
    }

    if (state_out) *state_out = st;
    est = belief_estimate(st);
    est.iterations = sweep;
    est.status = SolveStatus::MaxIter;
    return est;
}

}  // namespace factored
