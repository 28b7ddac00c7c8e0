#include "factored/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <thread>

#include "factored/acep.hpp"
#include "factored/ep.hpp"
#include "factored/pep.hpp"
#include "factored/rng.hpp"
#include "factored/vdbp.hpp"

namespace factored {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

bool is_power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void InstanceSpec::validate() const {
    if (n_factors < 2) {
        throw Error(ErrorCode::BadParameter, "InstanceSpec: n_factors must be >= 2");
    }
    if (components < 1) {
        throw Error(ErrorCode::BadParameter, "InstanceSpec: components must be >= 1");
    }
    if (!(var_law.lo > 0.0) || var_law.hi < var_law.lo) {
        throw Error(ErrorCode::BadParameter,
                    "InstanceSpec: variance law support must be positive");
    }
    if (mean_law.hi < mean_law.lo) {
        throw Error(ErrorCode::BadParameter, "InstanceSpec: empty mean law range");
    }
}

std::vector<Gmm1D> generate_instance(const InstanceSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const int k = spec.components;
    std::vector<Gmm1D> factors;
    factors.reserve(spec.n_factors);
    std::vector<double> w(k), mu(k), var(k);
    for (int n = 0; n < spec.n_factors; ++n) {
        if (spec.weight_law == InstanceSpec::WeightLaw::UniformSimplex) {
            double sum = 0.0;
            for (int s = 0; s < k; ++s) {
                w[s] = rng.exponential();
                sum += w[s];
            }
            for (int s = 0; s < k; ++s) w[s] /= sum;
        } else {
            std::fill(w.begin(), w.end(), 1.0 / k);
        }
        for (int s = 0; s < k; ++s) mu[s] = rng.uniform(spec.mean_law.lo, spec.mean_law.hi);
        for (int s = 0; s < k; ++s) var[s] = rng.uniform(spec.var_law.lo, spec.var_law.hi);
        factors.emplace_back(w, mu, var);
    }
    return factors;
}

NseResult nse(const Estimate& est, const PosteriorMoments& exact) {
    if (!std::isfinite(exact.mean) || !std::isfinite(exact.variance)) {
        throw Error(ErrorCode::BadParameter, "nse: exact moments must be finite");
    }
    NseResult r;
    const double dm = est.mean - exact.mean;
    const double dv = est.variance - exact.variance;
    r.raw_mu = dm * dm;
    r.raw_tau = dv * dv;
    r.mu_unstable = std::abs(exact.mean) < 1e-12;
    r.tau_unstable = std::abs(exact.variance) < 1e-12;
    r.nse_mu = r.raw_mu / (exact.mean * exact.mean);
    r.nse_tau = r.raw_tau / (exact.variance * exact.variance);
    return r;
}

std::vector<Algorithm> all_algorithms() {
    return {Algorithm::Vdbp,       Algorithm::PepStrict, Algorithm::PepRelaxed,
            Algorithm::AcepStrict, Algorithm::AcepRelaxed, Algorithm::Clip};
}

const char* algorithm_label(Algorithm a) {
    switch (a) {
        case Algorithm::Vdbp: return "vdbp";
        case Algorithm::PepStrict: return "pep-strict";
        case Algorithm::PepRelaxed: return "pep-relaxed";
        case Algorithm::AcepStrict: return "acep-strict";
        case Algorithm::AcepRelaxed: return "acep-relaxed";
        case Algorithm::Clip: return "clip";
    }
    return "unknown";
}

const char* algorithm_family(Algorithm a) {
    switch (a) {
        case Algorithm::Vdbp: return "vdbp";
        case Algorithm::PepStrict:
        case Algorithm::PepRelaxed: return "pep";
        case Algorithm::AcepStrict:
        case Algorithm::AcepRelaxed: return "acep";
        case Algorithm::Clip: return "clip";
    }
    return "unknown";
}

const char* algorithm_mode_label(Algorithm a) {
    switch (a) {
        case Algorithm::PepStrict:
        case Algorithm::AcepStrict: return "strict";
        case Algorithm::PepRelaxed:
        case Algorithm::AcepRelaxed: return "relaxed";
        default: return "-";
    }
}

int resolve_worker_count(int requested) {
    int n = requested;
    if (n <= 0) {
        n = static_cast<int>(std::thread::hardware_concurrency());
        if (n < 1) n = 1;
    }
    if (const char* env = std::getenv("FACTORED_INFERENCE_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0 && cap < n) n = static_cast<int>(cap);
    }
    return n;
}

namespace {

Estimate run_one(Algorithm algo, const std::vector<Gmm1D>& factors,
                 std::uint64_t seed, const SolverConfig& ep_config,
                 const SolverConfig& vdbp_config) {
    SolverConfig cfg = ep_config;
    switch (algo) {
        case Algorithm::Vdbp: {
            const int n = static_cast<int>(factors.size());
            const MixingMatrix matrix =
                is_power_of_two(n)
                    ? build_mixing_matrix(n, MatrixKind::TrimmedHadamard, 0)
                    : build_mixing_matrix(n, MatrixKind::RandomProjected, seed);
            return run_vdbp(factors, matrix, vdbp_config);
        }
        case Algorithm::PepStrict:
            cfg.mode = Mode::Strict;
            return run_persistent_ep(factors, cfg).first;
        case Algorithm::PepRelaxed:
            cfg.mode = Mode::Relaxed;
            return run_persistent_ep(factors, cfg).first;
        case Algorithm::AcepStrict:
            cfg.mode = Mode::Strict;
            return run_acep(factors, cfg).first;
        case Algorithm::AcepRelaxed:
            cfg.mode = Mode::Relaxed;
            return run_acep(factors, cfg).first;
        case Algorithm::Clip:
            return run_clipping_ep(factors, cfg);
    }
    throw Error(ErrorCode::BadParameter, "run_one: unknown algorithm");
}

}  // namespace

SuiteResult run_suite(const InstanceSpec& base, int realizations,
                      const std::vector<Algorithm>& algorithms,
                      const SolverConfig& ep_config,
                      const SolverConfig& vdbp_config, int workers) {
    base.validate();
    if (realizations < 1) {
        throw Error(ErrorCode::BadParameter, "run_suite: realizations must be >= 1");
    }
    if (algorithms.empty()) {
        throw Error(ErrorCode::BadParameter, "run_suite: no algorithms requested");
    }

    SuiteResult result;
    result.algorithms = algorithms;
    const int na = static_cast<int>(algorithms.size());
    result.records.assign(static_cast<std::size_t>(realizations) * na, BenchRecord{});

    auto compute = [&](int index) {
        const std::uint64_t seed = base.seed + static_cast<std::uint64_t>(index);
        InstanceSpec spec = base;
        spec.seed = seed;
        const std::vector<Gmm1D> factors = generate_instance(spec);
        const PosteriorMoments exact = exact_product_moments(factors);
        for (int ai = 0; ai < na; ++ai) {
            BenchRecord& rec = result.records[static_cast<std::size_t>(index) * na + ai];
            rec.seed = seed;
            rec.algorithm = algorithms[ai];
            rec.exact_mean = exact.mean;
            rec.exact_var = exact.variance;
            try {
                const Estimate est =
                    run_one(algorithms[ai], factors, seed, ep_config, vdbp_config);
                rec.mean = est.mean;
                rec.var = est.variance;
                rec.iterations = est.iterations;
                if (est.status == SolveStatus::Failed) {
                    rec.status = std::string("failed:") + est.failure_reason;
                    rec.nse_mu = kNan;
                    rec.nse_tau = kNan;
                } else {
                    rec.status = to_string(est.status);
                    const NseResult e = nse(est, exact);
                    rec.nse_mu = e.nse_mu;
                    rec.nse_tau = e.nse_tau;
                }
            } catch (const Error& err) {
                rec.mean = kNan;
                rec.var = kNan;
                rec.iterations = 0;
                rec.status = std::string("error:") + to_string(err.code());
                rec.nse_mu = kNan;
                rec.nse_tau = kNan;
            }
        }
    };

    const int nw = std::min(resolve_worker_count(workers), realizations);
    if (nw <= 1) {
        for (int i = 0; i < realizations; ++i) compute(i);
    } else {
        std::atomic<int> next{0};
        auto drain = [&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= realizations) break;
                compute(i);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(nw - 1);
        for (int t = 0; t < nw - 1; ++t) pool.emplace_back(drain);
        drain();
        for (std::thread& t : pool) t.join();
    }

    // Empirical CDFs over the finite NSE values per (algorithm, metric).
    result.cdf_mu.resize(na);
    result.cdf_tau.resize(na);
    for (int ai = 0; ai < na; ++ai) {
        std::vector<double> mu_vals, tau_vals;
        for (int i = 0; i < realizations; ++i) {
            const BenchRecord& rec =
                result.records[static_cast<std::size_t>(i) * na + ai];
            if (std::isfinite(rec.nse_mu)) mu_vals.push_back(rec.nse_mu);
            if (std::isfinite(rec.nse_tau)) tau_vals.push_back(rec.nse_tau);
        }
        std::sort(mu_vals.begin(), mu_vals.end());
        std::sort(tau_vals.begin(), tau_vals.end());
        auto curve = [](const std::vector<double>& vals) {
            CdfCurve c;
            c.reserve(vals.size());
            const double n = static_cast<double>(vals.size());
            for (std::size_t i = 0; i < vals.size(); ++i) {
                c.emplace_back(vals[i], static_cast<double>(i + 1) / n);
            }
            return c;
        };
        result.cdf_mu[ai] = curve(mu_vals);
        result.cdf_tau[ai] = curve(tau_vals);
    }
    return result;
}

std::string to_csv(const std::vector<BenchRecord>& records) {
    std::string out =
        "seed,algorithm,mode,mean,var,exact_mean,exact_var,nse_mu,nse_tau,"
        "iterations,status\n";
    for (const BenchRecord& r : records) {
        out += std::to_string(r.seed);
        out += ',';
        out += algorithm_family(r.algorithm);
        out += ',';
        out += algorithm_mode_label(r.algorithm);
        out += ',';
        out += format_double(r.mean);
        out += ',';
        out += format_double(r.var);
        out += ',';
        out += format_double(r.exact_mean);
        out += ',';
        out += format_double(r.exact_var);
        out += ',';
        out += format_double(r.nse_mu);
        out += ',';
        out += format_double(r.nse_tau);
        out += ',';
        out += std::to_string(r.iterations);
        out += ',';
        out += r.status;
        out += '\n';
    }
    return out;
}

std::string cdf_to_text(const CdfCurve& curve) {
    std::string out;
    for (const auto& [v, c] : curve) {
        out += format_double(v);
        out += ' ';
        out += format_double(c);
        out += '\n';
    }
    return out;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw Error(ErrorCode::BadParameter,
                        "write_text_atomic: cannot open " + tmp.string());
        }
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f) {
            throw Error(ErrorCode::BadParameter,
                        "write_text_atomic: write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

double ks_distance(const CdfCurve& a, const CdfCurve& b) {
    if (a.empty() || b.empty()) {
        throw Error(ErrorCode::BadParameter, "ks_distance: empty sample");
    }
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < n || j < m) {
        double v;
        if (i == n) {
            v = b[j].first;
        } else if (j == m) {
            v = a[i].first;
        } else {
            v = std::min(a[i].first, b[j].first);
        }
        while (i < n && a[i].first <= v) ++i;
        while (j < m && b[j].first <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / static_cast<double>(n) -
                                 static_cast<double>(j) / static_cast<double>(m)));
    }
    return d;
}

double percentile(const CdfCurve& curve, double q) {
    if (curve.empty()) {
        throw Error(ErrorCode::BadParameter, "percentile: empty sample");
    }
    if (!(q > 0.0 && q <= 1.0)) {
        throw Error(ErrorCode::BadParameter, "percentile: q must lie in (0, 1]");
    }
    const auto n = static_cast<double>(curve.size());
    auto idx = static_cast<std::size_t>(std::ceil(q * n));
    idx = std::min(std::max<std::size_t>(idx, 1), curve.size()) - 1;
    return curve[idx].first;
}

void write_suite_outputs(const std::filesystem::path& out_dir, const SuiteResult& result) {
    std::filesystem::create_directories(out_dir);
    write_text_atomic(out_dir / "results.csv", to_csv(result.records));
    for (std::size_t ai = 0; ai < result.algorithms.size(); ++ai) {
        const std::string label = algorithm_label(result.algorithms[ai]);
        write_text_atomic(out_dir / ("cdf_" + label + "_mu.txt"),
                          cdf_to_text(result.cdf_mu[ai]));
        write_text_atomic(out_dir / ("cdf_" + label + "_tau.txt"),
                          cdf_to_text(result.cdf_tau[ai]));
    }
}

}  // namespace factored
