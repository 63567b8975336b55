// Ensemble Monte Carlo: moment estimation, synchronous-coupling distance
// series (certified upper bounds on the Wasserstein-like W_{d_k}),
// Krylov-Bogolyubov time averages and the spectral-tail diagnostic.
#pragma once

#include <cstdint>
#include <optional>

#include "kdv/integrator.hpp"
#include "kdv/series.hpp"

namespace kdv {

struct EnsembleConfig {
    int members = 1;
    std::uint64_t master_seed = 0;
    int threads = 1;

    void validate() const {
        if (members < 1) fail(ErrorCode::validation, "ensemble: members must be >= 1");
        if (threads < 1) fail(ErrorCode::validation, "ensemble: threads must be >= 1");
    }
};

struct SingleSetup {
    SpectralField u0;
    SolverParams params;
    SpectralField f;
    NoiseModel model;
    double T = 0.0;
    std::vector<Observer> observers;
    bool keep_final = false;
};

struct PairSetup {
    SpectralField u0, v0;
    CouplingSpec coupling;
    SolverParams params;
    SpectralField f;
    NoiseModel model;
    double T = 0.0;
    FunctionalParams fp;
    bool keep_final = false;
};

struct EnsembleResult {
    std::vector<std::optional<TrajectoryRecord>> records;  // nullopt where a member blew up
    int failures = 0;
};

struct PairEnsembleResult {
    std::vector<std::optional<CoupledRecord>> records;
    int failures = 0;
};

// Member i runs with the stream derived from (master_seed, i); members are
// scheduled over threads but aggregation order is fixed by index.
EnsembleResult run_ensemble(const EnsembleConfig& cfg, const SingleSetup& setup);
PairEnsembleResult run_pair_ensemble(const EnsembleConfig& cfg, const PairSetup& setup);

struct SeriesStats {
    std::vector<double> times;
    std::vector<double> mean;
    std::vector<double> se;
    int survivors = 0;
    int failures = 0;
};

// Mean and standard error of one named column across surviving members.
SeriesStats mean_series(const EnsembleResult& ens, const std::string& column);

// E[||u(t)||^2] for f = 0:  e^{-2 gamma t} e0 + (1 - e^{-2 gamma t}) ||sigma||^2/(2 gamma).
double mean_l2_oracle(double gamma, double sigma_l2_sq, double e0, double t);

// Monte Carlo mean of I_m^+(u(t))^p; with eta set, of exp(eta I_m^+^p) via
// log-sum-exp (log_mean holds log E exp(...)).
struct MomentSeries {
    std::vector<double> times;
    std::vector<double> mean, se;          // of I_m^+^p
    std::vector<double> log_mean_exp_eta;  // only when eta was requested
};
MomentSeries moment_series(const EnsembleResult& ens, int m, double p,
                           std::optional<double> eta = std::nullopt);

struct DistanceEstimate {
    std::vector<double> times;
    std::vector<double> mean;
    std::vector<double> se;
    LineFit log_slope;        // OLS on log(mean) over the fit window
    double window_t0 = 0.0, window_t1 = 0.0;
};

// d_k(u,v) = exp(eta0 (I_2^+(u)^{3/7} + I_2^+(v)^{3/7})) ||u-v||_{H^k} averaged
// over synchronously coupled pairs; an upper bound on W_{d_k} by construction.
// Window (t0,t1) selects the slope-fit range; defaults skip the first 10%.
DistanceEstimate coupling_distance_series(const PairEnsembleResult& pairs, int k,
                                          const FunctionalParams& p, double t0 = -1.0,
                                          double t1 = -1.0);

// (1/T) sum phi(u(t_i)) dt_i over samples in [0, T] (left-endpoint rule).
double kb_average(const TrajectoryRecord& rec, const std::string& column, double T);

// Batch-mean estimate of a time average over [t0, t1] with its standard error.
MeanSe kb_batch_stats(const TrajectoryRecord& rec, const std::string& column, double t0,
                      double t1, int batches);

struct TailFit {
    bool degenerate = false;
    LineFit geometric;  // log|u_k| vs k
    LineFit algebraic;  // log|u_k| vs log k
};

// Least-squares decay-rate fits of the spectrum above k_min.
TailFit spectral_tail_fit(const SpectralField& u, int k_min);

}  // namespace kdv
