// Noise-free experiments: determining-modes synchronization, steady-state
// identities at large damping, and the one-point-attractor check.
#pragma once

#include "kdv/nudging.hpp"

namespace kdv {

struct DeterminingModesReport {
    CoupledRecord record;
    double initial_h1 = 0.0;
    double final_h1 = 0.0;
    double ratio = 0.0;  // final / initial
    bool below_threshold = false;
};

// Deterministic nudged pair (sigma = 0): v is pulled toward u on modes <= N.
// With N = 0 the feedback is empty and the run doubles as the free negative
// control.
DeterminingModesReport determining_modes_experiment(const SpectralField& u0,
                                                    const SpectralField& u0_tilde, double lambda,
                                                    int N, const SolverParams& params,
                                                    const SpectralField& f, double T,
                                                    double threshold = 1e-4);

struct SteadyStateReport {
    double residual = 0.0;        // ||u(T) - u(T - Delta)|| / Delta, Delta = 10 dt
    double identity_gap = 0.0;    // | ||u||^2 - <f,u>/gamma |
    double norm_bound_gap = 0.0;  // ||u|| - ||f||/gamma  (<= 0 at a steady state)
    double u_l2 = 0.0;
    bool steady = false;          // residual below the steadiness threshold
};

// Long-time run of the damped deterministic equation; at a steady state
// gamma ||u||^2 = <f, u> holds exactly.
SteadyStateReport steady_state_check(const SolverParams& params, const SpectralField& f,
                                     const SpectralField& u0, double T,
                                     double steady_threshold = 1e-8);

struct AttractorReport {
    std::vector<double> pairwise_l2;  // distances at T, lexicographic pair order
    double max_distance = 0.0;
    bool contracted = false;
};

// Pairwise L^2 distances at time T between runs started from each entry of
// u0_list (same f, sigma = 0).
AttractorReport one_point_attractor_check(const SolverParams& params, const SpectralField& f,
                                          const std::vector<SpectralField>& u0_list, double T,
                                          double tolerance = 1e-6);

}  // namespace kdv
