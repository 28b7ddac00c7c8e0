#pragma once
// Shared sequential-EP scaffolding on the star graph (one variable, N mixture
// factors): message storage, belief maintenance, cavity computation, and the
// clipping baseline.

#include <vector>

#include "factored/gmm.hpp"
#include "factored/solver.hpp"

namespace factored {

// Factor-to-variable messages in natural form plus the variable belief, which
// is the running sum of all messages.  The belief is maintained incrementally
// during a sweep and re-synced from the message sums at every sweep start.
struct EpState {
    std::vector<GaussianNat> msgs;
    GaussianNat belief;

    static EpState init(int n, const SolverConfig& config) {
        EpState st;
        st.msgs.assign(n, GaussianNat{config.init_nu, config.init_xi});
        st.belief = GaussianNat{n * config.init_nu, n * config.init_xi};
        return st;
    }

    void resync() {
        belief = GaussianNat{};
        for (const GaussianNat& g : msgs) belief = nat_add(belief, g);
    }
};

// Product of all messages except n: belief minus message, in natural form.
inline GaussianNat cavity(const EpState& state, int n) {
    return nat_sub(state.belief, state.msgs[n]);
}

// Moment-form readout of the belief.  Requires positive belief precision;
// a nonpositive precision (reachable only through the clipping baseline or a
// pathological initialization) throws NonIntegrableBelief.
Estimate belief_estimate(const EpState& state);

// Clipping-EP baseline: sequential sweeps; per factor, if the cavity makes the
// factor-level belief non-integrable the cavity precision is projected up to
// the integrability floor (-min_s xi_s + clip_xi) for this update only; the
// factor belief is moment-matched and the tentative message is belief minus
// the (projected) cavity; if the tentative message precision is nonpositive it
// is clipped to (nu = clip_xi * belief mean, xi = clip_xi), i.e. message
// variance pushed toward +infinity with the projected mean kept finite.
// Convergence: belief natural parameters change less than config.tol across a
// full sweep, or config.max_sweeps.
// If `state_out` is non-null the final message state is copied there (clipped
// messages are recognizable by their precision sitting exactly at clip_xi).
Estimate run_clipping_ep(const std::vector<Gmm1D>& factors,
                         const SolverConfig& config,
                         EpState* state_out = nullptr);

}  // namespace factored
