#include "factored/pep.hpp"

#include <cmath>
#include <limits>

namespace factored {

std::pair<Estimate, PepTrace> run_persistent_ep(const std::vector<Gmm1D>& factors,
                                                const SolverConfig& config) {
    config.validate();
    const int n = static_cast<int>(factors.size());
    if (n < 2) {
        throw Error(ErrorCode::BadParameter,
                    "run_persistent_ep: at least 2 factors required");
    }
    if (!(config.init_xi > 0.0)) {
        throw Error(ErrorCode::BadInit,
                    "run_persistent_ep: initial belief non-integrable (init_xi <= 0)");
    }

    EpState st = EpState::init(n, config);
    PepTrace trace;
    trace.reserve(static_cast<std::size_t>(n) * 8);
    constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

    auto fail = [&](int sweep, int factor) {
        Estimate est;
        est.mean = kNan;
        est.variance = kNan;
        est.iterations = sweep;
        est.status = SolveStatus::Failed;
        est.failure_reason = "numerical_breakdown";
        est.failure_iteration = sweep;
        est.failure_factor = factor;
        return std::make_pair(est, trace);
    };

    Estimate est;
    int sweep = 0;
    for (; sweep < config.max_sweeps; ++sweep) {
        st.resync();
        const GaussianNat before = st.belief;
        for (int i = 0; i < n; ++i) {
            const GaussianNat cav = cavity(st, i);
            const bool pass =
                config.mode == Mode::Strict
                    ? check_integrability(factors[i], cav) == IntegrabilityStatus::Integrable
                    : cav.xi > 0.0;
            if (!pass) {
                trace.push_back(PepStep{i, false, st.belief});
                continue;
            }
            const GmmPosterior post = gmm_times_gaussian(factors[i], cav);
            const double mu_bf = post.moments.mean;
            const double tau_bf = post.moments.variance;
            if (!std::isfinite(mu_bf) || !std::isfinite(tau_bf)) {
                return fail(sweep, i);
            }
            if (tau_bf <= 0.0) {
                // A zero matched variance makes the message division
                // undefined (the belief degenerates toward a point mass).
                return fail(sweep, i);
            }
            // message * cavity equals the matched Gaussian exactly, so the
            // new belief in natural form is (mu/tau, 1/tau) directly.
            const GaussianNat target{mu_bf / tau_bf, 1.0 / tau_bf};
            GaussianNat msg = nat_sub(target, cav);
            if (config.damping < 1.0) {
                msg = GaussianNat{
                    config.damping * msg.nu + (1.0 - config.damping) * st.msgs[i].nu,
                    config.damping * msg.xi + (1.0 - config.damping) * st.msgs[i].xi};
                st.belief = nat_add(cav, msg);
            } else {
                st.belief = target;
            }
            st.msgs[i] = msg;
            if (!std::isfinite(st.belief.nu) || !std::isfinite(st.belief.xi)) {
                return fail(sweep, i);
            }
            trace.push_back(PepStep{i, true, st.belief});
        }
        const double dn = std::abs(st.belief.nu - before.nu);
        const double dx = std::abs(st.belief.xi - before.xi);
        if (std::max(dn, dx) < config.tol) {
            est = belief_estimate(st);
            est.iterations = sweep + 1;
            est.status = SolveStatus::Converged;
            return {est, trace};
        }
    }

    est = belief_estimate(st);
    est.iterations = sweep;
    est.status = SolveStatus::MaxIter;
    return {est, trace};
}

}  // namespace factored
