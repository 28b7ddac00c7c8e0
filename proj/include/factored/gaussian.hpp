#pragma once
// Unnormalized one-dimensional Gaussians in moment form and natural-parameter
// form, plus the reproduction (pointwise product) rule.
//
// Conventions:
//   moment form   UN(x | mu, tau)  = exp(-(x - mu)^2 / (2 tau))
//   natural form  UM(x | nu, xi)   = exp(-xi x^2 / 2 + nu x - nu^2 / (2 xi))
// with nu = mu / tau and xi = 1 / tau where both forms exist.  tau may be
// negative (a non-integrable "Gaussian" as it appears in EP messages) or
// +infinity (a flat function, xi = 0).  tau = 0 is the one parameter value the
// unnormalized form cannot represent and is rejected at construction.  For
// xi = 0 the quadratic-completion constant nu^2/(2 xi) is dropped, i.e.
// UM(x | nu, 0) := exp(nu x); this convention makes the product rule total.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace factored {

enum class ErrorCode {
    BadParameter,            // malformed input (sizes, ranges, parse errors)
    EssentialDiscontinuity,  // tau = 0 requested in moment form
    NonIntegrableBelief,     // a belief/posterior with nonpositive precision
    CapExceeded,             // oracle expansion beyond the component cap
    DegenerateProduct,       // oracle product with zero total evidence
    UnsupportedSize,         // Hadamard construction at a non power of two
    ConstructionFailed,      // random mixing matrix rank-deficient after retries
    BadInit,                 // solver initialization violates its precondition
    DegenerateBelief,        // every mixture component dropped at a boundary
    NumericalBreakdown,      // non-finite intermediate state
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::BadParameter: return "bad_parameter";
        case ErrorCode::EssentialDiscontinuity: return "essential_discontinuity";
        case ErrorCode::NonIntegrableBelief: return "non_integrable_belief";
        case ErrorCode::CapExceeded: return "cap_exceeded";
        case ErrorCode::DegenerateProduct: return "degenerate_product";
        case ErrorCode::UnsupportedSize: return "unsupported_size";
        case ErrorCode::ConstructionFailed: return "construction_failed";
        case ErrorCode::BadInit: return "bad_init";
        case ErrorCode::DegenerateBelief: return "degenerate_belief";
        case ErrorCode::NumericalBreakdown: return "numerical_breakdown";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, int index = -1)
        : std::runtime_error(message), code_(code), index_(index) {}

    ErrorCode code() const { return code_; }

    // Offending component/factor index where meaningful, -1 otherwise.
    int index() const { return index_; }

private:
    ErrorCode code_;
    int index_;
};

struct GaussianMoment {
    double mu;
    double tau;

    GaussianMoment(double mu_, double tau_) : mu(mu_), tau(tau_) {
        if (std::isnan(mu) || std::isinf(mu)) {
            throw Error(ErrorCode::BadParameter, "GaussianMoment: mu must be finite");
        }
        if (tau == 0.0) {
            throw Error(ErrorCode::EssentialDiscontinuity,
                        "GaussianMoment: tau = 0 is not representable");
        }
        if (std::isnan(tau) || tau == -std::numeric_limits<double>::infinity()) {
            throw Error(ErrorCode::BadParameter,
                        "GaussianMoment: tau must be a nonzero real or +infinity");
        }
    }
};

struct GaussianNat {
    double nu = 0.0;
    double xi = 0.0;

    friend bool operator==(const GaussianNat&, const GaussianNat&) = default;
};

inline GaussianNat nat_from_moment(const GaussianMoment& g) {
    if (std::isinf(g.tau)) {
        return GaussianNat{0.0, 0.0};  // flat limit
    }
    return GaussianNat{g.mu / g.tau, 1.0 / g.tau};
}

inline GaussianMoment moment_from_nat(const GaussianNat& g) {
    if (g.xi == 0.0) {
        throw Error(ErrorCode::BadParameter,
                    "moment_from_nat: xi = 0 has no moment-form representation");
    }
    return GaussianMoment(g.nu / g.xi, 1.0 / g.xi);
}

// Quadratic-completion constant of the natural form: c(nu, xi) = nu^2/(2 xi),
// defined as 0 at xi = 0 (the discarded-constant convention).
inline double nat_log_constant(const GaussianNat& g) {
    return g.xi == 0.0 ? 0.0 : g.nu * g.nu / (2.0 * g.xi);
}

struct NatProduct {
    GaussianNat nat;               // (nu_a + nu_b, xi_a + xi_b)
    double log_scale = 0.0;        // log of UM(a)*UM(b) / UM(product)
    bool non_integrable = false;   // xi_a + xi_b = 0 with nonzero linear term
};

// Product of two unnormalized Gaussians in natural form.  The parameters add;
// the scalar mismatch between the two sides is returned as log_scale, computed
// as c(sum) - c(a) - c(b) so that the rule stays total at xi = 0 (it reduces to
// the textbook single-Gaussian evidence expression whenever all precisions are
// nonzero).  If the precisions cancel exactly and a linear term survives, the
// product exp(nu x) is flagged non-integrable; the parameters are still
// returned and the caller decides.
inline NatProduct reproduce_nat(const GaussianNat& a, const GaussianNat& b) {
    NatProduct out;
    out.nat = GaussianNat{a.nu + b.nu, a.xi + b.xi};
    out.log_scale =
        nat_log_constant(out.nat) - nat_log_constant(a) - nat_log_constant(b);
    out.non_integrable = (out.nat.xi == 0.0 && out.nat.nu != 0.0);
    return out;
}

inline GaussianNat nat_add(const GaussianNat& a, const GaussianNat& b) {
    return GaussianNat{a.nu + b.nu, a.xi + b.xi};
}

inline GaussianNat nat_sub(const GaussianNat& a, const GaussianNat& b) {
    return GaussianNat{a.nu - b.nu, a.xi - b.xi};
}

}  // namespace factored
