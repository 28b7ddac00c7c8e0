#include "factored/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace factored {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace

Gmm1D::Gmm1D(std::vector<double> weights, std::vector<double> means,
             std::vector<double> variances)
    : weights_(std::move(weights)),
      means_(std::move(means)),
      variances_(std::move(variances)) {
    const std::size_t k = weights_.size();
    if (k == 0) {
        throw Error(ErrorCode::BadParameter, "Gmm1D: at least one component required");
    }
    if (means_.size() != k || variances_.size() != k) {
        throw Error(ErrorCode::BadParameter,
                    "Gmm1D: weights/means/variances must have equal length");
    }
    if (!all_finite(weights_) || !all_finite(means_) || !all_finite(variances_)) {
        throw Error(ErrorCode::BadParameter, "Gmm1D: parameters must be finite");
    }
    double sum = 0.0;
    for (std::size_t s = 0; s < k; ++s) {
        if (weights_[s] <= 0.0) {
            throw Error(ErrorCode::BadParameter,
                        "Gmm1D: weights must be strictly positive",
                        static_cast<int>(s));
        }
        if (variances_[s] <= 0.0) {
            throw Error(ErrorCode::BadParameter,
                        "Gmm1D: variances must be strictly positive",
                        static_cast<int>(s));
        }
        sum += weights_[s];
    }
    // Accept small normalization slop (renormalize); reject anything larger.
    if (std::abs(sum - 1.0) > 1e-6) {
        throw Error(ErrorCode::BadParameter, "Gmm1D: weights must sum to 1");
    }
    if (sum != 1.0) {
        for (double& w : weights_) w /= sum;
    }

    log_weights_.resize(k);
    nat_means_.resize(k);
    nat_precisions_.resize(k);
    min_precision_ = kInf;
    max_precision_ = -kInf;
    for (std::size_t s = 0; s < k; ++s) {
        log_weights_[s] = std::log(weights_[s]);
        nat_precisions_[s] = 1.0 / variances_[s];
        nat_means_[s] = means_[s] * nat_precisions_[s];
        min_precision_ = std::min(min_precision_, nat_precisions_[s]);
        max_precision_ = std::max(max_precision_, nat_precisions_[s]);
    }
}

IntegrabilityStatus check_integrability(const Gmm1D& f, const GaussianNat& cavity) {
    const double combined = f.min_precision() + cavity.xi;
    if (combined > 0.0) return IntegrabilityStatus::Integrable;
    if (combined == 0.0) return IntegrabilityStatus::Boundary;
    return IntegrabilityStatus::NonIntegrable;
}

GmmPosterior gmm_times_gaussian(const Gmm1D& f, const GaussianNat& cavity) {
    const int k = f.size();
    if (check_integrability(f, cavity) != IntegrabilityStatus::Integrable) {
        int worst = 0;
        for (int s = 1; s < k; ++s) {
            if (f.nat_precision(s) < f.nat_precision(worst)) worst = s;
        }
        throw Error(ErrorCode::NonIntegrableBelief,
                    "gmm_times_gaussian: combined precision not positive", worst);
    }

    GmmPosterior out;
    out.weights.resize(k);
    out.component_nats.resize(k);

    // Per-component log evidence of w_s N(x|mu_s, var_s) * UM(x|cavity):
    //   log w_s + 0.5 log xi_s + reproduction scale - 0.5 log t_s
    // with t_s the combined precision (the 0.5 log(2 pi) terms cancel between
    // the component's normalization and the Gaussian integral of UM).
    std::vector<double> lw(k);
    double lw_max = -kInf;
    for (int s = 0; s < k; ++s) {
        const NatProduct rep = reproduce_nat(f.nat(s), cavity);
        out.component_nats[s] = rep.nat;
        lw[s] = f.log_weight(s) + 0.5 * std::log(f.nat_precision(s)) +
                rep.log_scale - 0.5 * std::log(rep.nat.xi);
        lw_max = std::max(lw_max, lw[s]);
    }

    double norm = 0.0;
    for (int s = 0; s < k; ++s) {
        out.weights[s] = std::exp(lw[s] - lw_max);
        norm += out.weights[s];
    }
    double mean = 0.0;
    double second = 0.0;
    for (int s = 0; s < k; ++s) {
        out.weights[s] /= norm;
        const double t = out.component_nats[s].xi;
        const double m = out.component_nats[s].nu / t;
        mean += out.weights[s] * m;
        second += out.weights[s] * (1.0 / t + m * m);
    }
    out.moments.mean = mean;
    out.moments.variance = second - mean * mean;
    out.moments.log_scale = lw_max + std::log(norm);
    return out;
}

std::pair<double, double> gmm_moments(const Gmm1D& f) {
    double mean = 0.0;
    double second = 0.0;
    for (int s = 0; s < f.size(); ++s) {
        mean += f.weight(s) * f.mean(s);
        second += f.weight(s) * (f.variance(s) + f.mean(s) * f.mean(s));
    }
    return {mean, second - mean * mean};
}

std::uint64_t product_component_count(const std::vector<Gmm1D>& factors) {
    constexpr std::uint64_t kSaturate = std::uint64_t{1} << 62;
    std::uint64_t count = 1;
    for (const Gmm1D& f : factors) {
        const std::uint64_t k = static_cast<std::uint64_t>(f.size());
        if (count > kSaturate / k) return kSaturate;
        count *= k;
    }
    return count;
}

PosteriorMoments exact_product_moments(const std::vector<Gmm1D>& factors,
                                       std::uint64_t cap) {
    const int n = static_cast<int>(factors.size());
    if (n == 0) {
        throw Error(ErrorCode::BadParameter,
                    "exact_product_moments: empty factor sequence");
    }
    const std::uint64_t count = product_component_count(factors);
    if (count > cap) {
        throw Error(ErrorCode::CapExceeded,
                    "exact_product_moments: expansion of " + std::to_string(count) +
                        " components exceeds cap " + std::to_string(cap));
    }

    constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;

    // Depth-first walk over component tuples with prefix accumulators: prefix
    // d holds the natural parameters and log coefficient of the product of the
    // chosen components of factors 0..d.  The log coefficient folds the
    // component weight, the component's Gaussian normalization (as a scale on
    // the unnormalized form), and the reproduction scales.
    std::vector<int> index(n, 0);
    std::vector<GaussianNat> nat_prefix(n);
    std::vector<double> logc_prefix(n);

    auto extend = [&](int d) {
        const Gmm1D& f = factors[d];
        const int s = index[d];
        const double comp_logc =
            f.log_weight(s) + 0.5 * std::log(f.nat_precision(s)) - kHalfLog2Pi;
        if (d == 0) {
            nat_prefix[0] = f.nat(s);
            logc_prefix[0] = comp_logc;
        } else {
            const NatProduct rep = reproduce_nat(nat_prefix[d - 1], f.nat(s));
            nat_prefix[d] = rep.nat;
            logc_prefix[d] = logc_prefix[d - 1] + comp_logc + rep.log_scale;
        }
    };
    for (int d = 0; d < n; ++d) extend(d);

    // Running log-sum-exp accumulators for total evidence, mean, and second
    // moment, rescaled whenever a new maximum tuple log-evidence appears.
    double lmax = -kInf;
    double acc_z = 0.0;   // sum exp(logZ_t - lmax)
    double acc_m = 0.0;   // sum exp(logZ_t - lmax) * mean_t
    double acc_s = 0.0;   // sum exp(logZ_t - lmax) * (var_t + mean_t^2)

    while (true) {
        const GaussianNat nat = nat_prefix[n - 1];
        // integral of UM(x|nu,xi) dx = sqrt(2 pi / xi); xi > 0 holds because
        // every per-factor component precision is positive.
        const double log_z = logc_prefix[n - 1] + kHalfLog2Pi - 0.5 * std::log(nat.xi);
        if (log_z > lmax) {
            const double r = std::exp(lmax - log_z);
            acc_z *= r;
            acc_m *= r;
            acc_s *= r;
            lmax = log_z;
        }
        if (lmax != -kInf) {
            const double w = std::exp(log_z - lmax);
            const double m = nat.nu / nat.xi;
            acc_z += w;
            acc_m += w * m;
            acc_s += w * (1.0 / nat.xi + m * m);
        }

        // Odometer advance over component tuples, rebuilding only the changed
        // suffix of the prefix stack.
        int d = n - 1;
        while (d >= 0 && index[d] == factors[d].size() - 1) {
            index[d] = 0;
            --d;
        }
        if (d < 0) break;
        ++index[d];
        for (int j = d; j < n; ++j) extend(j);
    }

    if (!(acc_z > 0.0) || lmax == -kInf) {
        throw Error(ErrorCode::DegenerateProduct,
                    "exact_product_moments: total evidence underflowed to zero");
    }

    PosteriorMoments out;
    out.mean = acc_m / acc_z;
    out.variance = acc_s / acc_z - out.mean * out.mean;
    out.log_scale = lmax + std::log(acc_z);
    if (!std::isfinite(out.mean) || !std::isfinite(out.variance)) {
        throw Error(ErrorCode::DegenerateProduct,
                    "exact_product_moments: non-finite moments");
    }
    return out;
}

}  // namespace factored
