#include "kdv/deterministic.hpp"

#include <cmath>

namespace kdv {

DeterminingModesReport determining_modes_experiment(const SpectralField& u0,
                                                    const SpectralField& u0_tilde, double lambda,
                                                    int N, const SolverParams& params,
                                                    const SpectralField& f, double T,
                                                    double threshold) {
    if (N < 0) fail(ErrorCode::validation, "determining modes: N must be >= 0");
    NoiseModel empty;
    CouplingSpec spec =
        (N > 0 && lambda > 0.0) ? CouplingSpec::make_nudged(lambda, N) : CouplingSpec::independent();
    DeterminingModesReport rep;
    rep.record = integrate_pair(u0, u0_tilde, spec, params, f, empty, T);
    rep.initial_h1 = rep.record.w_h1.front();
    rep.final_h1 = rep.record.w_h1.back();
    rep.ratio = rep.initial_h1 > 0.0 ? rep.final_h1 / rep.initial_h1 : 0.0;
    rep.below_threshold = rep.ratio <= threshold;
    return rep;
}

SteadyStateReport steady_state_check(const SolverParams& params, const SpectralField& f,
                                     const SpectralField& u0, double T,
                                     double steady_threshold) {
    if (params.gamma <= 0.0) fail(ErrorCode::domain, "steady_state_check requires gamma > 0");
    NoiseModel empty;
    // sample densely enough near T to form the finite-difference residual
    SolverParams p = params;
    p.sample_every = 1;
    double delta = 10.0 * p.dt;
    if (T <= 2.0 * delta) fail(ErrorCode::validation, "steady_state_check: T too short");

    std::vector<Observer> none;
    SpectralField u = u0;
    RngStream rng(p.seed);
    // run to T - delta, snapshot, then continue to T
    TrajectoryRecord r1 = integrate(u, p, f, empty, T - delta, none, &rng, true);
    SpectralField u_before = *r1.final_state;
    TrajectoryRecord r2 = integrate(u_before, p, f, empty, delta, none, &rng, true);
    SpectralField u_final = *r2.final_state;

    SteadyStateReport rep;
    SpectralField diff = u_final - u_before;
    rep.residual = sobolev_norm(diff, 0) / delta;
    double l2sq = l2_inner(u_final, u_final);
    rep.identity_gap = std::abs(l2sq - l2_inner(f, u_final) / params.gamma);
    rep.u_l2 = std::sqrt(l2sq);
    rep.norm_bound_gap = rep.u_l2 - sobolev_norm(f, 0) / params.gamma;
    rep.steady = rep.residual <= steady_threshold;
    return rep;
}

AttractorReport one_point_attractor_check(const SolverParams& params, const SpectralField& f,
                                          const std::vector<SpectralField>& u0_list, double T,
                                          double tolerance) {
    if (u0_list.size() < 2)
        fail(ErrorCode::validation, "one_point_attractor_check needs >= 2 initial conditions");
    NoiseModel empty;
    std::vector<Observer> none;
    std::vector<SpectralField> finals;
    finals.reserve(u0_list.size());
    for (const auto& u0 : u0_list) {
        TrajectoryRecord r = integrate(u0, params, f, empty, T, none, nullptr, true);
        finals.push_back(*r.final_state);
    }
    AttractorReport rep;
    for (size_t i = 0; i < finals.size(); ++i)
        for (size_t j = i + 1; j < finals.size(); ++j) {
            SpectralField d = finals[i] - finals[j];
            double dist = sobolev_norm(d, 0);
            rep.pairwise_l2.push_back(dist);
            rep.max_distance = std::max(rep.max_distance, dist);
        }
    rep.contracted = rep.max_distance <= tolerance;
    return rep;
}

}  // namespace kdv
