#pragma once
// Independent numerical-integration oracle used by the test suite to validate
// the closed-form mixture algebra: adaptive Gauss-Kronrod integration of the
// pointwise product density over a generous envelope window, carried out on a
// log-shifted integrand so that extreme evidences neither overflow nor
// underflow.

#include <vector>

#include "factored/gmm.hpp"

namespace factored {

// Moments and log evidence of the normalized product of mixture factors,
// integral over [min component mean - 12 max sd, max component mean + 12 max
// sd], which contains all of the product's mass because the product is more
// concentrated than any single factor.
PosteriorMoments quadrature_product_moments(const std::vector<Gmm1D>& factors);

// Moments and log evidence of f(x) * UM(x | cavity) for an integrable
// combination (all combined component precisions positive).  The window is
// built from the combined components' means and standard deviations.
PosteriorMoments quadrature_posterior_moments(const Gmm1D& f,
                                              const GaussianNat& cavity);

}  // namespace factored
