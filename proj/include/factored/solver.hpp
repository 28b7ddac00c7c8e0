#pragma once
// Shared solver configuration and result types for all message-passing
// algorithms.

#include <string>
#include <vector>

#include "factored/gaussian.hpp"

namespace factored {

enum class Mode { Strict, Relaxed };

enum class SolveStatus { Converged, MaxIter, Failed };

// One configuration struct serves every algorithm; fields that do not apply to
// a given algorithm are ignored by it (epsilon is duplication-BP only, clip_xi
// is the clipping baseline only, mode applies to the skip/threshold variants).
struct SolverConfig {
    double tol = 1e-10;       // convergence threshold (see each runner's doc)
    int max_sweeps = 100;     // sweeps for EP-family, iterations for VDBP
    Mode mode = Mode::Strict;
    double damping = 1.0;     // in (0, 1]; 1 = undamped (the default schedule)
    double init_nu = 0.0;     // initial message linear parameter
    double init_xi = 1.0;     // initial message precision
    double clip_xi = 1e-8;    // precision floor for the clipping baseline
    double epsilon = 0.0;     // VDBP pseudo-measurement noise variance

    // EP-family defaults: belief natural parameters settle to 1e-10 within at
    // most 100 sequential sweeps.
    static SolverConfig ep_defaults() { return SolverConfig{}; }

    // VDBP defaults: estimate change below 1e-8 within at most 200 synchronous
    // iterations.
    static SolverConfig vdbp_defaults() {
        SolverConfig c;
        c.tol = 1e-8;
        c.max_sweeps = 200;
        return c;
    }

    void validate() const {
        if (!(tol > 0.0)) {
            throw Error(ErrorCode::BadParameter, "SolverConfig: tol must be > 0");
        }
        if (max_sweeps < 1) {
            throw Error(ErrorCode::BadParameter, "SolverConfig: max_sweeps must be >= 1");
        }
        if (!(damping > 0.0) || damping > 1.0) {
            throw Error(ErrorCode::BadParameter, "SolverConfig: damping must be in (0, 1]");
        }
        if (!(clip_xi > 0.0)) {
            throw Error(ErrorCode::BadParameter, "SolverConfig: clip_xi must be > 0");
        }
        if (epsilon < 0.0) {
            throw Error(ErrorCode::BadParameter, "SolverConfig: epsilon must be >= 0");
        }
    }
};

// Common solver result.  per_copy_* are populated by VDBP only (one entry per
// duplicated variable); the EP family leaves them empty.  On Failed, mean and
// variance are NaN and failure_reason/failure_* describe where the run broke.
struct Estimate {
    double mean = 0.0;
    double variance = 0.0;
    std::vector<double> per_copy_means;
    std::vector<double> per_copy_variances;
    int iterations = 0;
    SolveStatus status = SolveStatus::Failed;
    std::string failure_reason;   // empty unless status == Failed
    int failure_iteration = -1;
    int failure_factor = -1;      // factor/copy index n, when meaningful
    int failure_measurement = -1; // measurement index m (VDBP), when meaningful
};

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::MaxIter: return "maxiter";
        case SolveStatus::Failed: return "failed";
    }
    return "unknown";
}

inline const char* to_string(Mode m) {
    return m == Mode::Strict ? "strict" : "relaxed";
}

}  // namespace factored
