#include "factored/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace factored {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;

double log_mixture_density(const Gmm1D& f, double x) {
    double lmax = -kInf;
    for (int s = 0; s < f.size(); ++s) {
        const double d = x - f.mean(s);
        const double l = f.log_weight(s) - kHalfLog2Pi -
                         0.5 * std::log(f.variance(s)) -
                         0.5 * d * d / f.variance(s);
        lmax = std::max(lmax, l);
    }
    double acc = 0.0;
    for (int s = 0; s < f.size(); ++s) {
        const double d = x - f.mean(s);
        const double l = f.log_weight(s) - kHalfLog2Pi -
                         0.5 * std::log(f.variance(s)) -
                         0.5 * d * d / f.variance(s);
        acc += std::exp(l - lmax);
    }
    return lmax + std::log(acc);
}

// Shared integration core: given log of an unnormalized density and a window,
// integrate exp(logp - shift), x exp(...), x^2 exp(...) and assemble moments.
// The shift is the maximum of logp over a coarse scan of the window, making
// the integrand O(1) at its peak.
PosteriorMoments integrate_moments(const std::function<double(double)>& logp,
                                   double lo, double hi) {
    constexpr int kScan = 2048;
    double shift = -kInf;
    for (int i = 0; i <= kScan; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / kScan;
        shift = std::max(shift, logp(x));
    }

    using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
    const auto dens = [&](double x) { return std::exp(logp(x) - shift); };
    const double z0 = gk::integrate(dens, lo, hi, 14, 1e-13);
    const double z1 =
        gk::integrate([&](double x) { return x * dens(x); }, lo, hi, 14, 1e-13);
    const double z2 = gk::integrate([&](double x) { return x * x * dens(x); },
                                    lo, hi, 14, 1e-13);

    PosteriorMoments out;
    out.mean = z1 / z0;
    out.variance = z2 / z0 - out.mean * out.mean;
    out.log_scale = shift + std::log(z0);
    return out;
}

}  // namespace

PosteriorMoments quadrature_product_moments(const std::vector<Gmm1D>& factors) {
    if (factors.empty()) {
        throw Error(ErrorCode::BadParameter,
                    "quadrature_product_moments: empty factor sequence");
    }
    double lo = kInf, hi = -kInf, sd = 0.0;
    for (const Gmm1D& f : factors) {
        for (int s = 0; s < f.size(); ++s) {
            lo = std::min(lo, f.mean(s));
            hi = std::max(hi, f.mean(s));
            sd = std::max(sd, std::sqrt(f.variance(s)));
        }
    }
    lo -= 12.0 * sd;
    hi += 12.0 * sd;

    const auto logp = [&](double x) {
        double acc = 0.0;
        for (const Gmm1D& f : factors) acc += log_mixture_density(f, x);
        return acc;
    };
    return integrate_moments(logp, lo, hi);
}

PosteriorMoments quadrature_posterior_moments(const Gmm1D& f,
                                              const GaussianNat& cavity) {
    if (check_integrability(f, cavity) != IntegrabilityStatus::Integrable) {
        throw Error(ErrorCode::NonIntegrableBelief,
                    "quadrature_posterior_moments: non-integrable combination");
    }
    // Window from the combined (posterior) components, which are proper
    // Gaussians even when the cavity precision is negative or zero.
    double lo = kInf, hi = -kInf, sd = 0.0;
    for (int s = 0; s < f.size(); ++s) {
        const double t = f.nat_precision(s) + cavity.xi;
        const double m = (f.nat(s).nu + cavity.nu) / t;
        lo = std::min(lo, m);
        hi = std::max(hi, m);
        sd = std::max(sd, 1.0 / std::sqrt(t));
    }
    lo -= 12.0 * sd;
    hi += 12.0 * sd;

    const double cav_const = nat_log_constant(cavity);
    const auto logp = [&](double x) {
        return log_mixture_density(f, x) - 0.5 * cavity.xi * x * x +
               cavity.nu * x - cav_const;
    };
    return integrate_moments(logp, lo, hi);
}

}  // namespace factored
