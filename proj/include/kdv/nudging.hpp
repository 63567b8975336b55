// Synchronization experiments: the nudged companion system with feedback
// -lambda P_N(v - u), the (lambda, N) parameter rule, the Gamma integrating
// factor, stopping-time diagnostics and the Girsanov-cutoff variant.
#pragma once

#include <limits>

#include "kdv/integrator.hpp"

namespace kdv {

struct NudgeParams {
    double lambda = 1.0;  // nudging strength, > 0
    int N = 0;            // projection level
    double c0 = 1.0;      // universal constant in Gamma / tau_{R,beta}; diagnostics only
    double budget = std::numeric_limits<double>::infinity();  // Novikov budget K
    double R = 1.0;
    double beta = 0.0;

    void validate() const {
        if (lambda <= 0.0) fail(ErrorCode::validation, "nudge: lambda must be > 0");
        if (N < 0) fail(ErrorCode::validation, "nudge: N must be >= 0");
        if (budget < 0.0 || R < 0.0 || beta < 0.0)
            fail(ErrorCode::validation, "nudge: K, R, beta must be >= 0");
    }
};

// Parameter rule: lambda = max(1, c (||f||_{H1} + ||sigma||^2_{L2})),
// N = ceil(c max{gamma, gamma^{-1/3}} lambda^{5/2}).
std::pair<double, int> default_nudge_params(double gamma, double f_h1, double sigma_l2_sq,
                                            double c);

// Nudged pair over [0, T]; the record carries the decay series, the weighted
// quantity e^{Gamma} ||u - v||_{H1}^2 and everything tau_{R,beta} needs.
CoupledRecord run_foias_prodi(const SpectralField& u0, const SpectralField& v0,
                              const NudgeParams& np, const SolverParams& params,
                              const SpectralField& f, const NoiseModel& model, double T,
                              const FunctionalParams& fp = {}, RngStream* rng = nullptr,
                              bool keep_final = false);

// Cutoff variant: nudging shuts off once int ||P_N(v*-u)||^2 reaches the
// budget.  Requires the noise to cover modes 1..N with positive amplitudes.
CoupledRecord run_cutoff_coupling(const SpectralField& u0, const SpectralField& v0,
                                  const NudgeParams& np, const SolverParams& params,
                                  const SpectralField& f, const NoiseModel& model, double T,
                                  const FunctionalParams& fp = {}, RngStream* rng = nullptr,
                                  bool keep_final = false);

// First sampled time with
//   (c0/lambda) int_0^t (1 + ||u||_{H2}^2 + ||v||^2/lambda) ds - gamma t/2 - beta >= R,
// or +infinity when the threshold is never crossed.  Uses the record's
// accumulator series, so the overshoot is at most one sample interval.
double stopping_time_tau(const CoupledRecord& rec, const NudgeParams& np, double gamma);

// A-priori bound on the Novikov integral implied by the cutoff:
// lambda^2 (K + overshoot) / (pi min_k a_k^2) over the covered modes.
double novikov_bound(const NudgeParams& np, const NoiseModel& model);

}  // namespace kdv
