#include "factored/vdbp.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

#include "factored/rng.hpp"

namespace factored {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

bool is_power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

Eigen::MatrixXd sylvester_hadamard(int n) {
    Eigen::MatrixXd h(1, 1);
    h(0, 0) = 1.0;
    while (h.rows() < n) {
        const int k = static_cast<int>(h.rows());
        Eigen::MatrixXd next(2 * k, 2 * k);
        next.topLeftCorner(k, k) = h;
        next.topRightCorner(k, k) = h;
        next.bottomLeftCorner(k, k) = h;
        next.bottomRightCorner(k, k) = -h;
        h = std::move(next);
    }
    return h;
}

double singular_value_ratio(const Eigen::MatrixXd& a) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    return smax > 0.0 ? smin / smax : 0.0;
}

}  // namespace

MixingMatrix build_mixing_matrix(int n, MatrixKind kind, std::uint64_t seed) {
    if (n < 2) {
        throw Error(ErrorCode::BadParameter, "build_mixing_matrix: n must be >= 2");
    }
    MixingMatrix out;
    out.kind = kind;

    if (kind == MatrixKind::TrimmedHadamard) {
        if (!is_power_of_two(n)) {
            throw Error(ErrorCode::UnsupportedSize,
                        "build_mixing_matrix: TrimmedHadamard requires n a power of 2, got " +
                            std::to_string(n));
        }
        // Sylvester Hadamard; its first row is all ones, the remaining rows
        // are orthogonal to it, i.e. have exactly zero sum.
        const Eigen::MatrixXd h = sylvester_hadamard(n);
        out.a = h.bottomRows(n - 1);
        return out;
    }

    Rng rng(seed);
    for (int attempt = 0; attempt < 16; ++attempt) {
        Eigen::MatrixXd b(n - 1, n);
        for (int i = 0; i < n - 1; ++i) {
            for (int j = 0; j < n; ++j) b(i, j) = rng.normal();
        }
        // Subtract each row's mean: A = B - diag(B 1 / n) 1 1^T, so A 1 = 0.
        const Eigen::VectorXd row_means = b.rowwise().mean();
        out.a = b.colwise() - row_means;
        if (singular_value_ratio(out.a) > 1e-8) {
            return out;
        }
    }
    throw Error(ErrorCode::ConstructionFailed,
                "build_mixing_matrix: rank check failed after 16 random draws");
}

ValidationReport validate_mixing_matrix(const MixingMatrix& m) {
    ValidationReport rep;
    const int rows = m.rows();
    const int cols = m.cols();
    rep.shape_ok = (cols >= 2 && rows == cols - 1);
    if (rows == 0 || cols == 0) return rep;

    for (int i = 0; i < rows; ++i) {
        const double norm = m.a.row(i).norm();
        const double s = std::abs(m.a.row(i).sum()) / (norm > 0.0 ? norm : 1.0);
        rep.max_abs_row_sum = std::max(rep.max_abs_row_sum, s);
    }
    rep.row_sums_ok = rep.max_abs_row_sum <= 1e-10;

    rep.singular_value_ratio = singular_value_ratio(m.a);
    rep.rank_ok = rep.singular_value_ratio > 1e-8;

    // Key identity: with Abar_n = A minus column n and a_n the removed column,
    // Abar_n^{-1} a_n = -1 entrywise.  This is equivalent to A 1 = 0 plus
    // invertibility of Abar_n, and is what collapses the duplicated model's
    // marginal onto the original product.
    if (rep.shape_ok && rep.rank_ok) {
        for (int n = 0; n < cols; ++n) {
            Eigen::MatrixXd abar(rows, cols - 1);
            int c = 0;
            for (int j = 0; j < cols; ++j) {
                if (j == n) continue;
                abar.col(c++) = m.a.col(j);
            }
            const Eigen::VectorXd x = abar.fullPivLu().solve(m.a.col(n));
            const double dev = (x.array() + 1.0).abs().maxCoeff();
            rep.max_identity_deviation = std::max(rep.max_identity_deviation, dev);
        }
        rep.identity_ok = rep.max_identity_deviation <= 1e-8;
    }

    rep.pass = rep.shape_ok && rep.row_sums_ok && rep.rank_ok && rep.identity_ok;
    return rep;
}

Estimate run_vdbp(const std::vector<Gmm1D>& factors, const MixingMatrix& matrix,
                  const SolverConfig& config, VdbpState* state_out) {
    config.validate();
    const int n = static_cast<int>(factors.size());
    const int m = n - 1;
    if (n < 2) {
        throw Error(ErrorCode::BadParameter, "run_vdbp: at least 2 factors required");
    }
    if (matrix.cols() != n || matrix.rows() != m) {
        throw Error(ErrorCode::BadParameter,
                    "run_vdbp: matrix shape does not match the factor count");
    }
    const Eigen::MatrixXd& a = matrix.a;
    const double damping = config.damping;

    auto idx = [n](int i, int j) { return i * n + j; };

    VdbpState st;
    st.m = m;
    st.n = n;
    st.mu_theta.assign(static_cast<std::size_t>(m) * n, 0.0);
    st.tau_theta.assign(static_cast<std::size_t>(m) * n, 1.0);
    st.mu_p.assign(m, 0.0);
    st.tau_p.assign(m, 0.0);
    st.mu_p_edge.assign(static_cast<std::size_t>(m) * n, 0.0);
    st.tau_p_edge.assign(static_cast<std::size_t>(m) * n, 0.0);
    st.mu_r.assign(n, 0.0);
    st.tau_r.assign(n, 0.0);
    st.mu_r_edge.assign(static_cast<std::size_t>(m) * n, 0.0);
    st.tau_r_edge.assign(static_cast<std::size_t>(m) * n, 0.0);
    st.epsilon.assign(m, config.epsilon);

    Estimate est;
    est.per_copy_means.assign(n, kNan);
    est.per_copy_variances.assign(n, kNan);

    // Extrinsic accumulators per copy, in natural form (precision and
    // precision-weighted mean); w/prec convert to the moment-form extrinsic.
    std::vector<double> prec_r(n), w_r(n);
    // Edge cavities in natural form.
    std::vector<double> prec_edge(static_cast<std::size_t>(m) * n);
    std::vector<double> w_edge(static_cast<std::size_t>(m) * n);

    auto fail = [&](int it, int mi, int ni) {
        est.mean = kNan;
        est.variance = kNan;
        est.iterations = it;
        est.status = SolveStatus::Failed;
        est.failure_reason = "numerical_breakdown";
        est.failure_iteration = it;
        est.failure_measurement = mi;
        est.failure_factor = ni;
        if (state_out) *state_out = st;
        return est;
    };

    double prev_mean = 0.0, prev_var = 0.0;
    bool have_prev = false;

    int it = 0;
    for (; it < config.max_sweeps; ++it) {
        // CLT totals per measurement: the linear combination sum_n a_mn theta_n
        // of independent Gaussians has mean sum a mu and variance sum a^2 tau.
        for (int i = 0; i < m; ++i) {
            double mp = 0.0, tp = 0.0;
            for (int j = 0; j < n; ++j) {
                mp += a(i, j) * st.mu_theta[idx(i, j)];
                tp += a(i, j) * a(i, j) * st.tau_theta[idx(i, j)];
            }
            st.mu_p[i] = mp;
            st.tau_p[i] = tp;
            for (int j = 0; j < n; ++j) {
                st.mu_p_edge[idx(i, j)] = mp - a(i, j) * st.mu_theta[idx(i, j)];
                st.tau_p_edge[idx(i, j)] =
                    tp - a(i, j) * a(i, j) * st.tau_theta[idx(i, j)];
            }
        }

        // Measurement-to-variable messages (natural form) and their per-copy
        // totals.  Measurement i constrains a_ij theta_j + (interference) = 0,
        // so the likelihood seen by copy j has precision a^2/(tau_edge + eps)
        // and linear parameter a (0 - mu_edge)/(tau_edge + eps).
        for (int j = 0; j < n; ++j) {
            prec_r[j] = 0.0;
            w_r[j] = 0.0;
        }
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) {
                const double den = st.tau_p_edge[idx(i, j)] + st.epsilon[i];
                if (!(den > 0.0) || !std::isfinite(den)) {
                    return fail(it, i, j);
                }
                prec_r[j] += a(i, j) * a(i, j) / den;
                w_r[j] += a(i, j) * (0.0 - st.mu_p_edge[idx(i, j)]) / den;
            }
        }

        // Edge cavities: extrinsic minus the edge's own contribution.  Exact
        // arithmetic keeps these nonnegative; tiny negative float residue is
        // snapped to zero (a flat cavity, which the mixture posterior accepts),
        // anything genuinely negative is a breakdown.
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) {
                const double den = st.tau_p_edge[idx(i, j)] + st.epsilon[i];
                double pe = prec_r[j] - a(i, j) * a(i, j) / den;
                double we = w_r[j] - a(i, j) * (0.0 - st.mu_p_edge[idx(i, j)]) / den;
                if (pe < 0.0) {
                    if (pe >= -1e-12 * prec_r[j]) {
                        pe = 0.0;
                    } else {
                        return fail(it, i, j);
                    }
                }
                if (!std::isfinite(pe) || !std::isfinite(we)) {
                    return fail(it, i, j);
                }
                prec_edge[idx(i, j)] = pe;
                w_edge[idx(i, j)] = we;
                st.tau_r_edge[idx(i, j)] = pe > 0.0 ? 1.0 / pe : kInf;
                st.mu_r_edge[idx(i, j)] = pe > 0.0 ? we / pe : 0.0;
            }
        }

        // Synchronous projection of every mixture factor against each of its
        // edge cavities.
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) {
                const GmmPosterior post = gmm_times_gaussian(
                    factors[j], GaussianNat{w_edge[idx(i, j)], prec_edge[idx(i, j)]});
                const double mu_new = post.moments.mean;
                const double tau_new = post.moments.variance;
                if (!std::isfinite(mu_new) || !(tau_new > 0.0)) {
                    return fail(it, i, j);
                }
                st.mu_theta[idx(i, j)] =
                    damping * mu_new + (1.0 - damping) * st.mu_theta[idx(i, j)];
                st.tau_theta[idx(i, j)] =
                    damping * tau_new + (1.0 - damping) * st.tau_theta[idx(i, j)];
            }
        }

        // Copy beliefs against the full extrinsic, then the combined estimate:
        // precision-weighted mean, minimum variance over copies.
        double wsum = 0.0, psum = 0.0, min_var = kInf;
        for (int j = 0; j < n; ++j) {
            if (!(prec_r[j] > 0.0)) {
                return fail(it, m > 0 ? 0 : -1, j);
            }
            st.tau_r[j] = 1.0 / prec_r[j];
            st.mu_r[j] = w_r[j] / prec_r[j];
            const GmmPosterior belief =
                gmm_times_gaussian(factors[j], GaussianNat{w_r[j], prec_r[j]});
            est.per_copy_means[j] = belief.moments.mean;
            est.per_copy_variances[j] = belief.moments.variance;
            wsum += belief.moments.mean / belief.moments.variance;
            psum += 1.0 / belief.moments.variance;
            min_var = std::min(min_var, belief.moments.variance);
        }
        const double mean = wsum / psum;
        if (!std::isfinite(mean) || !std::isfinite(min_var)) {
            return fail(it, -1, -1);
        }
        est.mean = mean;
        est.variance = min_var;

        if (have_prev && std::abs(mean - prev_mean) + std::abs(min_var - prev_var) <
                             config.tol) {
            est.iterations = it + 1;
            est.status = SolveStatus::Converged;
            if (state_out) *state_out = st;
            return est;
        }
        prev_mean = mean;
        prev_var = min_var;
        have_prev = true;
    }

    est.iterations = it;
    est.status = SolveStatus::MaxIter;
    if (state_out) *state_out = st;
    return est;
}

}  // namespace factored
