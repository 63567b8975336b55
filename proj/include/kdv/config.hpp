// Run configuration: strict JSON in, normalized RunConfig out.  Unknown keys
// are rejected with their path; missing required keys (grid.K, solver.dt,
// solver.T) are named.
#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "kdv/functionals.hpp"
#include "kdv/integrator.hpp"
#include "kdv/noise.hpp"

namespace kdv {

using ModeList = std::vector<std::pair<int, Complex>>;

struct RunConfig {
    // equation
    double gamma = 0.5;
    double epsilon = 0.0;
    ModeList f_modes;
    std::vector<NoiseChannel> noise;

    // grid
    int K = 0;
    int n = 0;  // 0 -> padded_size(2K+2)

    // solver
    double dt = 0.0;
    double T = 0.0;
    double burn_in = 0.0;
    int sample_every = 1;
    std::uint64_t seed = 0;
    bool nonlinearity = true;

    // experiment
    std::string name;  // optional in the file; the CLI command wins
    std::optional<double> lambda;  // unset -> rule
    std::optional<int> N;          // unset -> rule
    double c = 1.0;
    double c0 = 1.0;
    double K_budget = std::numeric_limits<double>::infinity();
    double R = 1.0;
    double beta = 0.0;
    FunctionalParams functionals;
    int members = 1;
    ModeList u0_modes;
    ModeList v0_modes;
    std::vector<ModeList> u0_list;
    std::vector<std::string> observables = {"l2", "h1", "h2"};
    int distance_k = 0;
    std::string det_mode = "determining_modes";
    bool negative_control = true;
    double threshold = 1e-3;          // decay / contraction target
    double steady_threshold = 1e-8;   // steadiness residual
    double drift_tolerance = 1e-6;    // invariants command
    int batches = 20;                 // Krylov-Bogolyubov batch means
    double fit_t0 = -1.0, fit_t1 = -1.0;  // slope-fit window (-1 -> defaults)
    int calibrate_n_max = 0;          // 0 -> grid K
    int calibrate_seeds = 3;
    bool tail_fit = false;
    int tail_k_min = 0;  // 0 -> K/2

    // output
    std::string out_dir = "out";
    bool write_csv = true;
    bool write_json = true;
    bool write_final_state = false;

    std::vector<std::string> warnings;  // informational notes from parsing

    Grid grid() const { return Grid(K, n); }
    SolverParams solver_params() const;
    NoiseModel noise_model() const { return NoiseModel(noise); }
    SpectralField forcing(const Grid& g) const;
    SpectralField initial_u(const Grid& g) const;
    SpectralField initial_v(const Grid& g) const;
    // lambda, N from the config or from the parameter rule.
    std::pair<double, int> nudge_rule(const SpectralField& f, const NoiseModel& model) const;
};

// Parse and validate a strict-JSON configuration document.
RunConfig parse_config(const std::string& text);

// Canonical echo of the normalized configuration (stable key order).
std::string config_echo(const RunConfig& cfg);

}  // namespace kdv
