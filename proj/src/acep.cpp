#include "factored/acep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace factored {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double snap_tolerance(const Gmm1D& f, const GaussianNat& cavity) {
    return 1e-12 * std::max({1.0, std::abs(cavity.xi), f.max_precision()});
}

}  // namespace

IntegrabilityStatus acep_integrability(const Gmm1D& f, const GaussianNat& cavity) {
    const double combined = f.min_precision() + cavity.xi;
    const double tol = snap_tolerance(f, cavity);
    if (std::abs(combined) <= tol) return IntegrabilityStatus::Boundary;
    if (combined > 0.0) return IntegrabilityStatus::Integrable;
    return IntegrabilityStatus::NonIntegrable;
}

AcepFactorUpdate update_factor_acep(const Gmm1D& f_n, const GaussianNat& cavity,
                                    const Gmm1D& f_next, const GaussianNat& msg_next,
                                    Mode mode) {
    const int k = f_n.size();
    AcepFactorUpdate upd;
    upd.log_rho.assign(k, -kInf);
    upd.rho_bar.assign(k, 0.0);

    // Reference component: the largest precision has the largest combined
    // precision, so it is the last to hit the boundary and its evidence term
    // is the best-conditioned denominator.
    upd.ref_component = 0;
    for (int s = 1; s < k; ++s) {
        if (f_n.nat_precision(s) > f_n.nat_precision(upd.ref_component)) {
            upd.ref_component = s;
        }
    }

    const double tol = snap_tolerance(f_n, cavity);

    // Per-component log evidence against the cavity, up to a shared constant
    // that cancels in the ratios.  Components sitting on the integrability
    // boundary (combined precision snapped to zero) contribute vanishing
    // weight in the limit and are dropped.
    std::vector<double> lw(k, -kInf);
    std::vector<double> t(k, 0.0);
    for (int s = 0; s < k; ++s) {
        t[s] = f_n.nat_precision(s) + cavity.xi;
        if (std::abs(t[s]) <= tol) continue;  // boundary: dropped
        if (t[s] < 0.0) {
            throw Error(ErrorCode::NonIntegrableBelief,
                        "update_factor_acep: combined component precision negative "
                        "(cavity outside the admissible domain)",
                        s);
        }
        const NatProduct rep = reproduce_nat(f_n.nat(s), cavity);
        lw[s] = f_n.log_weight(s) + 0.5 * std::log(f_n.nat_precision(s)) +
                rep.log_scale - 0.5 * std::log(t[s]);
    }
    if (lw[upd.ref_component] == -kInf) {
        // The reference has the largest combined precision; if it dropped,
        // every component did.
        throw Error(ErrorCode::DegenerateBelief,
                    "update_factor_acep: every component on the integrability boundary");
    }

    double norm = 0.0;
    double lr_max = -kInf;
    for (int s = 0; s < k; ++s) {
        if (lw[s] == -kInf) continue;
        upd.log_rho[s] = lw[s] - lw[upd.ref_component];
        lr_max = std::max(lr_max, upd.log_rho[s]);
    }
    for (int s = 0; s < k; ++s) {
        if (upd.log_rho[s] == -kInf) continue;
        upd.rho_bar[s] = std::exp(upd.log_rho[s] - lr_max);
        norm += upd.rho_bar[s];
    }
    double mean = 0.0;
    double second = 0.0;
    for (int s = 0; s < k; ++s) {
        if (upd.rho_bar[s] == 0.0) continue;
        upd.rho_bar[s] /= norm;
        const double m = (f_n.nat(s).nu + cavity.nu) / t[s];
        mean += upd.rho_bar[s] * m;
        second += upd.rho_bar[s] * (1.0 / t[s] + m * m);
    }
    upd.mu_bf = mean;
    upd.tau_bf = second - mean * mean;
    if (!std::isfinite(upd.mu_bf) || !std::isfinite(upd.tau_bf) ||
        !(upd.tau_bf > 0.0)) {
        throw Error(ErrorCode::NumericalBreakdown,
                    "update_factor_acep: non-finite or nonpositive factor-belief moments");
    }

    // Admissible-domain lower bound.  Strict: the smallest message precision
    // keeping the next factor's belief integrable, next cavity = (cavity.xi +
    // xi_out) - msg_next.xi >= -min_s xi_s(f_next).  Relaxed: nonnegative
    // message precisions only.
    upd.xi_thres = mode == Mode::Strict
                       ? -f_next.min_precision() - cavity.xi + msg_next.xi
                       : 0.0;

    // The unconstrained KLD optimum moment-matches the factor belief; the
    // objective is monotone below it, so the constrained solution clips to
    // the threshold.  nu is then solved at the chosen precision.
    const double xi_free = 1.0 / upd.tau_bf - cavity.xi;
    if (xi_free > upd.xi_thres) {
        upd.xi_out = xi_free;
        upd.clipped_to_threshold = false;
    } else {
        upd.xi_out = upd.xi_thres;
        upd.clipped_to_threshold = true;
    }
    upd.nu_out = (upd.xi_out + cavity.xi) * upd.mu_bf - cavity.nu;
    return upd;
}

std::pair<Estimate, AcepTrace> run_acep(const std::vector<Gmm1D>& factors,
                                        const SolverConfig& config) {
    config.validate();
    const int n = static_cast<int>(factors.size());
    if (n < 2) {
        throw Error(ErrorCode::BadParameter, "run_acep: at least 2 factors required");
    }

    EpState st = EpState::init(n, config);
    AcepTrace trace;
    trace.reserve(static_cast<std::size_t>(n) * 8);

    Estimate est;
    int sweep = 0;
    for (; sweep < config.max_sweeps; ++sweep) {
        st.resync();
        const GaussianNat before = st.belief;
        for (int i = 0; i < n; ++i) {
            const int next = (i + 1) % n;
            const GaussianNat cav = cavity(st, i);
            AcepFactorUpdate upd =
                update_factor_acep(factors[i], cav, factors[next], st.msgs[next],
                                   config.mode);
            GaussianNat msg{upd.nu_out, upd.xi_out};
            if (config.damping < 1.0) {
                msg = GaussianNat{
                    config.damping * msg.nu + (1.0 - config.damping) * st.msgs[i].nu,
                    config.damping * msg.xi + (1.0 - config.damping) * st.msgs[i].xi};
                // Keep the damped message inside the admissible domain so the
                // next-factor guarantee survives damping.
                if (msg.xi < upd.xi_thres) msg.xi = upd.xi_thres;
                st.belief = nat_add(cav, msg);
            } else {
                // Undamped: belief = cavity + message has the closed form
                // ((xi_out + xi_cav) mu_bf, xi_out + xi_cav), used directly to
                // avoid cancellation near the boundary.
                const double bxi = upd.xi_out + cav.xi;
                st.belief = GaussianNat{bxi * upd.mu_bf, bxi};
            }
            st.msgs[i] = msg;
            if (!std::isfinite(st.belief.nu) || !std::isfinite(st.belief.xi)) {
                throw Error(ErrorCode::NumericalBreakdown,
                            "run_acep: non-finite belief parameters");
            }
            AcepStep step;
            step.factor = i;
            step.update = std::move(upd);
            step.belief = st.belief;
            step.next_check =
                acep_integrability(factors[next], nat_sub(st.belief, st.msgs[next]));
            trace.push_back(std::move(step));
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
