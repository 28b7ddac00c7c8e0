#pragma once
// Variable-duplication Gaussian belief propagation.
//
// The single variable is duplicated into N copies (one per mixture factor) and
// the copies are tied together by a constructed noiseless linear measurement
// A theta = 0 where A has M = N-1 rows, A 1 = 0, and rank N-1: the nullspace
// of A is exactly the all-equal line, so the joint density with the
// duplicated factors marginalizes back to the original product.  Gaussian BP
// runs on the resulting dense bipartite graph; mixture factors are projected
// to Gaussians against their extrinsic (cavity) messages each iteration.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "factored/gmm.hpp"
#include "factored/solver.hpp"

namespace factored {

enum class MatrixKind { TrimmedHadamard, RandomProjected };

struct MixingMatrix {
    Eigen::MatrixXd a;  // M x N with M = N - 1
    MatrixKind kind = MatrixKind::TrimmedHadamard;

    int rows() const { return static_cast<int>(a.rows()); }
    int cols() const { return static_cast<int>(a.cols()); }
};

// Builds the tying matrix.
//  - TrimmedHadamard: Sylvester Hadamard of order n with the all-ones row
//    removed; requires n a power of two (UnsupportedSize otherwise).  Entries
//    are exactly +-1 and row sums are exactly zero.
//  - RandomProjected: draw B (N-1) x N with i.i.d. standard-normal entries
//    from the seeded generator and subtract each row's mean, A = B -
//    diag(B 1 / N) 1 1^T, which forces A 1 = 0.  Redrawn up to 16 times if the
//    numerical rank check (smallest/largest singular value > 1e-8) fails;
//    ConstructionFailed after that.
MixingMatrix build_mixing_matrix(int n, MatrixKind kind, std::uint64_t seed);

struct ValidationReport {
    double max_abs_row_sum = 0.0;        // max |sum of row| / ||row||
    double singular_value_ratio = 0.0;   // sigma_min / sigma_max
    double max_identity_deviation = 0.0; // max_n max-entry |Abar_n^{-1} a_n + 1|
    bool shape_ok = false;               // M == N - 1
    bool row_sums_ok = false;            // max_abs_row_sum <= 1e-10
    bool rank_ok = false;                // singular_value_ratio > 1e-8
    bool identity_ok = false;            // max_identity_deviation <= 1e-8
    bool pass = false;                   // all of the above
};

// Report-only diagnostics: row sums, numerical rank, and the key algebraic
// identity Abar_n^{-1} a_n = -1 (Abar_n is A with column n removed, a_n the
// removed column), which is what makes the duplicated model marginalize back
// to the original product.
ValidationReport validate_mixing_matrix(const MixingMatrix& m);

// Full per-edge message state, exposed for inspection/testing.  Arrays are
// row-major M x N where two-dimensional.
struct VdbpState {
    int m = 0, n = 0;
    std::vector<double> mu_theta, tau_theta;     // variable->measurement, per edge
    std::vector<double> mu_p, tau_p;             // per-measurement CLT totals
    std::vector<double> mu_p_edge, tau_p_edge;   // totals minus one edge
    std::vector<double> mu_r, tau_r;             // full extrinsic, per copy
    std::vector<double> mu_r_edge, tau_r_edge;   // extrinsic minus one edge
    std::vector<double> epsilon;                 // per-measurement noise variance
};

// Runs synchronous duplication-BP until the combined estimate settles:
// |d mean| + |d variance| < config.tol between successive iterations, or
// config.max_sweeps iterations.  Copy n's belief is the factor f_n against
// its full extrinsic message; the combined mean is precision-weighted over
// copies and the combined variance is the minimum copy variance.  A negative
// or non-finite cavity precision yields status Failed with reason
// "numerical_breakdown" and the offending iteration/edge recorded.
// config.damping < 1 blends each edge's new projected (mu, tau) with the
// previous iteration's values.
// If `state_out` is non-null the final message state is copied there.
Estimate run_vdbp(const std::vector<Gmm1D>& factors, const MixingMatrix& matrix,
                  const SolverConfig& config, VdbpState* state_out = nullptr);

}  // namespace factored
