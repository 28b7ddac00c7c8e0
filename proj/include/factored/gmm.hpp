#pragma once
// One-dimensional Gaussian mixtures, mixture-times-Gaussian posteriors,
// integrability classification, and the brute-force exact-product oracle.

#include <cstdint>
#include <vector>

#include "factored/gaussian.hpp"

namespace factored {

// A normalized 1-D Gaussian mixture: sum_s w_s * N(x | mu_s, var_s) with
// strictly positive weights summing to 1 and strictly positive finite
// component variances.  Natural parameters (nu_s = mu_s/var_s, xi_s = 1/var_s)
// and log-weights are precomputed at construction.  Immutable after
// construction; safe to share across threads.
class Gmm1D {
public:
    Gmm1D(std::vector<double> weights, std::vector<double> means,
          std::vector<double> variances);

    int size() const { return static_cast<int>(weights_.size()); }

    double weight(int s) const { return weights_[s]; }
    double log_weight(int s) const { return log_weights_[s]; }
    double mean(int s) const { return means_[s]; }
    double variance(int s) const { return variances_[s]; }
    GaussianNat nat(int s) const { return GaussianNat{nat_means_[s], nat_precisions_[s]}; }
    double nat_precision(int s) const { return nat_precisions_[s]; }

    double min_precision() const { return min_precision_; }
    double max_precision() const { return max_precision_; }

    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& means() const { return means_; }
    const std::vector<double>& variances() const { return variances_; }

private:
    std::vector<double> weights_;
    std::vector<double> log_weights_;
    std::vector<double> means_;
    std::vector<double> variances_;
    std::vector<double> nat_means_;
    std::vector<double> nat_precisions_;
    double min_precision_;
    double max_precision_;
};

// Mean, variance, and log evidence (normalization constant) of a product of
// densities/unnormalized factors.
struct PosteriorMoments {
    double mean = 0.0;
    double variance = 0.0;
    double log_scale = 0.0;
};

enum class IntegrabilityStatus { Integrable, Boundary, NonIntegrable };

// Classifies integrability of f(x) * UM(x | cavity): the product is a mixture
// whose component precisions are xi_s + cavity.xi, so it is integrable iff the
// smallest combined precision is positive.  Boundary means the smallest
// combined precision is exactly zero; strict consumers treat Boundary as
// non-integrable (the density is then non-normalizable for a generic linear
// term).
IntegrabilityStatus check_integrability(const Gmm1D& f, const GaussianNat& cavity);

struct GmmPosterior {
    std::vector<double> weights;             // normalized component weights
    std::vector<GaussianNat> component_nats; // (nu_s + nu_cav, xi_s + xi_cav)
    PosteriorMoments moments;
};

// Posterior of a mixture factor against a Gaussian cavity in natural form:
// f(x) * UM(x | cavity) renormalized.  Component weights are accumulated in
// the log domain and combined with log-sum-exp; the returned moments use the
// law of total mean/variance, and moments.log_scale is the log of
// integral f(x) * UM(x | cavity) dx.
// Precondition: check_integrability(f, cavity) == Integrable; violations throw
// NonIntegrableBelief carrying the offending component index.
GmmPosterior gmm_times_gaussian(const Gmm1D& f, const GaussianNat& cavity);

// Mixture mean and variance (law of total mean/variance).
std::pair<double, double> gmm_moments(const Gmm1D& f);

// Number of components of the fully expanded product mixture (product of the
// per-factor component counts), saturating at 2^62.
std::uint64_t product_component_count(const std::vector<Gmm1D>& factors);

inline constexpr std::uint64_t kDefaultOracleCap = std::uint64_t{1} << 24;

// Exact moments and log evidence of the normalized product of mixture factors,
// by full expansion over all component tuples.  Each tuple is reduced by
// iterated Gaussian reproduction with log-domain scale accumulation, and the
// tuple statistics are folded into running log-sum-exp accumulators, so the
// result is exact up to floating point regardless of how small the individual
// tuple evidences are.
// Errors: expansion larger than `cap` components -> CapExceeded; total
// evidence underflowing to zero -> DegenerateProduct; empty input ->
// BadParameter.
PosteriorMoments exact_product_moments(const std::vector<Gmm1D>& factors,
                                       std::uint64_t cap = kDefaultOracleCap);

}  // namespace factored
