// Command-line front end: solve a single instance with a chosen algorithm,
// query the exact brute-force oracle, run benchmark suites, or validate a
// mixing matrix.
//
// Exit codes: 0 success, 1 solver non-convergence or runtime failure,
// 2 input/usage error, 3 resource cap exceeded.

#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "factored/acep.hpp"
#include "factored/bench.hpp"
#include "factored/ep.hpp"
#include "factored/json_io.hpp"
#include "factored/pep.hpp"
#include "factored/vdbp.hpp"

namespace {

using nlohmann::json;

int error_exit_code(const factored::Error& e) {
    switch (e.code()) {
        case factored::ErrorCode::BadParameter:
        case factored::ErrorCode::UnsupportedSize:
            return 2;
        case factored::ErrorCode::CapExceeded:
            return 3;
        default:
            return 1;
    }
}

std::string status_string(const factored::Estimate& est) {
    if (est.status == factored::SolveStatus::Failed) {
        return std::string("failed:") + est.failure_reason;
    }
    return factored::to_string(est.status);
}

struct SolveOptions {
    std::string instance_path;
    std::string algorithm;
    std::string mode = "strict";
    std::string matrix = "hadamard";
    std::uint64_t seed = 0;
    double tol = 0.0;       // 0 = algorithm default
    int max_iter = 0;       // 0 = algorithm default
    bool mode_given = false;
    bool matrix_given = false;
    bool seed_given = false;
};

int run_solve(const SolveOptions& opt) {
    // Flag consistency: mode applies to the skip/threshold variants only,
    // matrix selection and matrix seed to vdbp only.
    const bool is_vdbp = opt.algorithm == "vdbp";
    const bool has_mode = opt.algorithm == "pep" || opt.algorithm == "acep";
    if (opt.mode_given && !has_mode) {
        std::cerr << "solve: --mode applies only to pep/acep\n";
        return 2;
    }
    if ((opt.matrix_given || opt.seed_given) && !is_vdbp) {
        std::cerr << "solve: --matrix/--seed apply only to vdbp\n";
        return 2;
    }

    try {
        const std::vector<factored::Gmm1D> factors =
            factored::load_instance(opt.instance_path);
        if (factors.empty()) {
            std::cerr << "solve: instance has no factors\n";
            return 2;
        }

        factored::SolverConfig cfg = is_vdbp ? factored::SolverConfig::vdbp_defaults()
                                             : factored::SolverConfig::ep_defaults();
        if (opt.tol > 0.0) cfg.tol = opt.tol;
        if (opt.max_iter > 0) cfg.max_sweeps = opt.max_iter;
        cfg.mode = opt.mode == "relaxed" ? factored::Mode::Relaxed
                                         : factored::Mode::Strict;

        factored::Estimate est;
        if (is_vdbp) {
            const int n = static_cast<int>(factors.size());
            const factored::MatrixKind kind = opt.matrix == "random"
                                                  ? factored::MatrixKind::RandomProjected
                                                  : factored::MatrixKind::TrimmedHadamard;
            const factored::MixingMatrix matrix =
                factored::build_mixing_matrix(n, kind, opt.seed);
            est = factored::run_vdbp(factors, matrix, cfg);
        } else if (opt.algorithm == "pep") {
            est = factored::run_persistent_ep(factors, cfg).first;
        } else if (opt.algorithm == "acep") {
            est = factored::run_acep(factors, cfg).first;
        } else {
            est = factored::run_clipping_ep(factors, cfg);
        }

        const json out = {{"mean", est.mean},
                          {"variance", est.variance},
                          {"iterations", est.iterations},
                          {"status", status_string(est)}};
        std::cout << out.dump(2) << "\n";
        return est.status == factored::SolveStatus::Converged ? 0 : 1;
    } catch (const factored::Error& e) {
        std::cerr << "solve: " << e.what() << "\n";
        return error_exit_code(e);
    }
}

struct OracleOptions {
    std::string instance_path;
};

int run_oracle(const OracleOptions& opt) {
    try {
        const std::vector<factored::Gmm1D> factors =
            factored::load_instance(opt.instance_path);
        if (factors.empty()) {
            std::cerr << "oracle: instance has no factors\n";
            return 2;
        }
        const factored::PosteriorMoments m = factored::exact_product_moments(factors);
        const json out = {{"mean", m.mean},
                          {"variance", m.variance},
                          {"log_evidence", m.log_scale},
                          {"components", factored::product_component_count(factors)}};
        std::cout << out.dump(2) << "\n";
        return 0;
    } catch (const factored::Error& e) {
        std::cerr << "oracle: " << e.what() << "\n";
        return error_exit_code(e);
    }
}

struct BenchOptions {
    std::string out_dir;
    int realizations = 10000;
    std::uint64_t seed = 0;
    int n_factors = 8;
    int components = 2;
    std::string algorithms = "all";
    std::string weight_law = "simplex";
    std::vector<double> mean_range{-3.0, 3.0};
    std::vector<double> var_range{0.1, 2.0};
    double tol = 0.0;
    int max_iter = 0;
};

std::vector<factored::Algorithm> parse_algorithms(const std::string& text) {
    if (text == "all") return factored::all_algorithms();
    std::vector<factored::Algorithm> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string label = text.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        bool found = false;
        for (const factored::Algorithm a : factored::all_algorithms()) {
            if (label == factored::algorithm_label(a)) {
                out.push_back(a);
                found = true;
                break;
            }
        }
        if (!found) {
            throw factored::Error(factored::ErrorCode::BadParameter,
                                  "bench: unknown algorithm \"" + label + "\"");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

double percentile95(const factored::CdfCurve& curve) {
    if (curve.empty()) return std::nan("");
    return factored::percentile(curve, 0.95);
}

int run_bench(const BenchOptions& opt) {
    try {
        factored::InstanceSpec spec;
        spec.n_factors = opt.n_factors;
        spec.components = opt.components;
        spec.seed = opt.seed;
        spec.weight_law = opt.weight_law == "equal"
                              ? factored::InstanceSpec::WeightLaw::Equal
                              : factored::InstanceSpec::WeightLaw::UniformSimplex;
        spec.mean_law = {opt.mean_range[0], opt.mean_range[1]};
        spec.var_law = {opt.var_range[0], opt.var_range[1]};

        const std::vector<factored::Algorithm> algos = parse_algorithms(opt.algorithms);
        factored::SolverConfig ep_cfg = factored::SolverConfig::ep_defaults();
        factored::SolverConfig vdbp_cfg = factored::SolverConfig::vdbp_defaults();
        if (opt.tol > 0.0) {
            ep_cfg.tol = opt.tol;
            vdbp_cfg.tol = opt.tol;
        }
        if (opt.max_iter > 0) {
            ep_cfg.max_sweeps = opt.max_iter;
            vdbp_cfg.max_sweeps = opt.max_iter;
        }

        const factored::SuiteResult result =
            factored::run_suite(spec, opt.realizations, algos, ep_cfg, vdbp_cfg);
        factored::write_suite_outputs(opt.out_dir, result);

        // Declared generation laws and solver settings, alongside the data.
        const json meta = {
            {"n_factors", spec.n_factors},
            {"components", spec.components},
            {"seed", spec.seed},
            {"realizations", opt.realizations},
            {"weight_law",
             spec.weight_law == factored::InstanceSpec::WeightLaw::Equal ? "equal"
                                                                         : "simplex"},
            {"mean_law", {spec.mean_law.lo, spec.mean_law.hi}},
            {"var_law", {spec.var_law.lo, spec.var_law.hi}},
            {"algorithms",
             [&] {
                 std::vector<std::string> labels;
                 for (const auto a : algos) labels.push_back(factored::algorithm_label(a));
                 return labels;
             }()},
            {"ep_tol", ep_cfg.tol},
            {"ep_max_sweeps", ep_cfg.max_sweeps},
            {"vdbp_tol", vdbp_cfg.tol},
            {"vdbp_max_iter", vdbp_cfg.max_sweeps}};
        factored::write_text_atomic(std::string(opt.out_dir) + "/meta.json",
                                    meta.dump(2) + "\n");

        for (std::size_t ai = 0; ai < algos.size(); ++ai) {
            std::cout << factored::algorithm_label(algos[ai]) << ": "
                      << result.cdf_mu[ai].size() << " finite nse_mu, p95 nse_mu = "
                      << percentile95(result.cdf_mu[ai]) << ", p95 nse_tau = "
                      << percentile95(result.cdf_tau[ai]) << "\n";
        }
        return 0;
    } catch (const factored::Error& e) {
        std::cerr << "bench: " << e.what() << "\n";
        return error_exit_code(e);
    }
}

struct ValidateOptions {
    int n = 0;
    std::string kind = "hadamard";
    std::uint64_t seed = 0;
};

int run_validate(const ValidateOptions& opt) {
    try {
        const factored::MatrixKind kind = opt.kind == "random"
                                              ? factored::MatrixKind::RandomProjected
                                              : factored::MatrixKind::TrimmedHadamard;
        const factored::MixingMatrix m = factored::build_mixing_matrix(opt.n, kind, opt.seed);
        const factored::ValidationReport rep = factored::validate_mixing_matrix(m);
        const json out = {{"n", opt.n},
                          {"kind", opt.kind},
                          {"max_abs_row_sum", rep.max_abs_row_sum},
                          {"singular_value_ratio", rep.singular_value_ratio},
                          {"max_identity_deviation", rep.max_identity_deviation},
                          {"row_sums_ok", rep.row_sums_ok},
                          {"rank_ok", rep.rank_ok},
                          {"identity_ok", rep.identity_ok},
                          {"pass", rep.pass}};
        std::cout << out.dump(2) << "\n";
        return rep.pass ? 0 : 1;
    } catch (const factored::Error& e) {
        std::cerr << "validate-matrix: " << e.what() << "\n";
        return error_exit_code(e);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Approximate moments of a product of 1-D Gaussian-mixture factors"};
    app.require_subcommand(1);

    SolveOptions solve_opt;
    CLI::App* solve = app.add_subcommand("solve", "Run one algorithm on an instance file");
    solve->add_option("--instance", solve_opt.instance_path, "Instance JSON file")
        ->required();
    solve->add_option("--algorithm", solve_opt.algorithm, "vdbp | pep | acep | clip")
        ->required()
        ->check(CLI::IsMember({"vdbp", "pep", "acep", "clip"}));
    solve->add_option("--mode", solve_opt.mode, "strict | relaxed (pep/acep)")
        ->check(CLI::IsMember({"strict", "relaxed"}));
    solve->add_option("--matrix", solve_opt.matrix, "hadamard | random (vdbp)")
        ->check(CLI::IsMember({"hadamard", "random"}));
    solve->add_option("--seed", solve_opt.seed, "Random-matrix seed (vdbp)");
    solve->add_option("--tol", solve_opt.tol, "Convergence tolerance override");
    solve->add_option("--max-iter", solve_opt.max_iter, "Iteration/sweep cap override");

    OracleOptions oracle_opt;
    CLI::App* oracle = app.add_subcommand("oracle", "Exact brute-force product moments");
    oracle->add_option("--instance", oracle_opt.instance_path, "Instance JSON file")
        ->required();

    BenchOptions bench_opt;
    CLI::App* bench = app.add_subcommand("bench", "Randomized benchmark suite");
    bench->add_option("--out", bench_opt.out_dir, "Output directory")->required();
    bench->add_option("--realizations", bench_opt.realizations, "Number of instances");
    bench->add_option("--seed", bench_opt.seed, "Base seed");
    bench->add_option("--n", bench_opt.n_factors, "Factors per instance");
    bench->add_option("--k", bench_opt.components, "Components per factor");
    bench->add_option("--algorithms", bench_opt.algorithms,
                      "\"all\" or comma-separated labels (vdbp, pep-strict, "
                      "pep-relaxed, acep-strict, acep-relaxed, clip)");
    bench->add_option("--weight-law", bench_opt.weight_law, "simplex | equal")
        ->check(CLI::IsMember({"simplex", "equal"}));
    bench->add_option("--mean-range", bench_opt.mean_range, "Mean law lo hi")
        ->expected(2);
    bench->add_option("--var-range", bench_opt.var_range, "Variance law lo hi")
        ->expected(2);
    bench->add_option("--tol", bench_opt.tol, "Convergence tolerance override");
    bench->add_option("--max-iter", bench_opt.max_iter, "Iteration/sweep cap override");

    ValidateOptions validate_opt;
    CLI::App* validate = app.add_subcommand("validate-matrix", "Mixing-matrix diagnostics");
    validate->add_option("--n", validate_opt.n, "Number of columns")->required();
    validate->add_option("--kind", validate_opt.kind, "hadamard | random")
        ->check(CLI::IsMember({"hadamard", "random"}));
    validate->add_option("--seed", validate_opt.seed, "Random-matrix seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    solve_opt.mode_given = solve->count("--mode") > 0;
    solve_opt.matrix_given = solve->count("--matrix") > 0;
    solve_opt.seed_given = solve->count("--seed") > 0;

    if (solve->parsed()) return run_solve(solve_opt);
    if (oracle->parsed()) return run_oracle(oracle_opt);
    if (bench->parsed()) return run_bench(bench_opt);
    if (validate->parsed()) return run_validate(validate_opt);
    return 2;
}
