#pragma once
// Benchmark harness: seeded random instance generation, normalized squared
// error against the exact oracle, and a deterministic multi-algorithm suite
// with CSV / empirical-CDF emission.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "factored/gmm.hpp"
#include "factored/solver.hpp"

namespace factored {

struct RangeLaw {
    double lo = 0.0;
    double hi = 1.0;
};

// Parameter-sampling laws for random instances.  Weights are either uniform
// on the probability simplex (normalized standard-exponential draws) or equal;
// means and variances are uniform on their ranges.  Draw order per factor is
// weights, then means, then variances (the equal-weight law consumes no
// draws); this order is part of the seeded contract.
struct InstanceSpec {
    int n_factors = 8;
    int components = 2;
    std::uint64_t seed = 0;
    enum class WeightLaw { UniformSimplex, Equal } weight_law = WeightLaw::UniformSimplex;
    RangeLaw mean_law{-3.0, 3.0};
    RangeLaw var_law{0.1, 2.0};

    void validate() const;
};

// Deterministic in spec.seed; identical across platforms (see rng.hpp).
std::vector<Gmm1D> generate_instance(const InstanceSpec& spec);

struct NseResult {
    double nse_mu = 0.0;
    double nse_tau = 0.0;
    double raw_mu = 0.0;     // unnormalized squared errors, always meaningful
    double raw_tau = 0.0;
    bool mu_unstable = false;  // |exact mean| below the 1e-12 guard
    bool tau_unstable = false;
};

// Normalized squared errors (estimate vs exact)^2 / exact^2 for mean and
// variance.  When an exact moment is within 1e-12 of zero the normalized value
// is unreliable; the raw squared error and the unstable flag report that.
NseResult nse(const Estimate& est, const PosteriorMoments& exact);

enum class Algorithm { Vdbp, PepStrict, PepRelaxed, AcepStrict, AcepRelaxed, Clip };

std::vector<Algorithm> all_algorithms();
const char* algorithm_label(Algorithm a);       // e.g. "pep-strict"
const char* algorithm_family(Algorithm a);      // e.g. "pep"
const char* algorithm_mode_label(Algorithm a);  // "strict" / "relaxed" / "-"

// One CSV row: a (realization, algorithm) pair.
struct BenchRecord {
    std::uint64_t seed = 0;
    Algorithm algorithm = Algorithm::Vdbp;
    double mean = 0.0;
    double var = 0.0;
    double exact_mean = 0.0;
    double exact_var = 0.0;
    double nse_mu = 0.0;
    double nse_tau = 0.0;
    int iterations = 0;
    std::string status;
};

using CdfCurve = std::vector<std::pair<double, double>>;  // (nse, cdf) ascending

struct SuiteResult {
    std::vector<Algorithm> algorithms;
    std::vector<BenchRecord> records;  // realization-major, algorithm-minor
    std::vector<CdfCurve> cdf_mu;      // parallel to algorithms
    std::vector<CdfCurve> cdf_tau;
};

// Runs `realizations` independent instances (per-realization seed = base.seed
// + index) through every requested algorithm and assembles records plus
// empirical CDFs of the finite NSE values per (algorithm, metric).  Individual
// realization failures are recorded in their rows and never abort the suite.
// Records are written into preallocated slots keyed by realization index, so
// the output is byte-identical for any worker count; `workers` <= 0 means
// automatic, and the FACTORED_INFERENCE_THREADS environment variable (0 =
// auto) caps the pool either way.
// VDBP uses a trimmed Hadamard matrix when n_factors is a power of two and a
// random projected matrix seeded with the realization seed otherwise.
SuiteResult run_suite(const InstanceSpec& base, int realizations,
                      const std::vector<Algorithm>& algorithms,
                      const SolverConfig& ep_config,
                      const SolverConfig& vdbp_config, int workers = 0);

// Serialization.  Doubles are printed with %.17g (shortest exact round trip).
std::string to_csv(const std::vector<BenchRecord>& records);
std::string cdf_to_text(const CdfCurve& curve);

// Writes content to path via a temporary file in the same directory followed
// by an atomic rename.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

// Writes results.csv plus cdf_<algorithm>_<mu|tau>.txt per curve into out_dir
// (created if absent).
void write_suite_outputs(const std::filesystem::path& out_dir, const SuiteResult& result);

// Effective worker count: min(requested or hardware, environment cap).
int resolve_worker_count(int requested);

// Two-sample Kolmogorov-Smirnov sup distance between empirical CDFs.
double ks_distance(const CdfCurve& a, const CdfCurve& b);

// Value at quantile q (0 < q <= 1) of an empirical CDF curve, using the
// ceil(q n)-th order statistic.
double percentile(const CdfCurve& curve, double q);

}  // namespace factored
