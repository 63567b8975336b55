#include "kdv/nudging.hpp"

#include <cmath>
#include <numbers>

namespace kdv {

std::pair<double, int> default_nudge_params(double gamma, double f_h1, double sigma_l2_sq,
                                            double c) {
    if (gamma <= 0.0) fail(ErrorCode::domain, "nudge parameter rule requires gamma > 0");
    if (c <= 0.0 || f_h1 < 0.0 || sigma_l2_sq < 0.0)
        fail(ErrorCode::validation, "nudge parameter rule: inputs must be nonnegative, c > 0");
    double lambda = std::max(1.0, c * (f_h1 + sigma_l2_sq));
    double scale = std::max(gamma, std::pow(gamma, -1.0 / 3.0));
    int N = static_cast<int>(std::ceil(c * scale * std::pow(lambda, 2.5)));
    return {lambda, N};
}

CoupledRecord run_foias_prodi(const SpectralField& u0, const SpectralField& v0,
                              const NudgeParams& np, const SolverParams& params,
                              const SpectralField& f, const NoiseModel& model, double T,
                              const FunctionalParams& fp, RngStream* rng, bool keep_final) {
    np.validate();
    auto spec = CouplingSpec::make_nudged(np.lambda, np.N, np.c0);
    return integrate_pair(u0, v0, spec, params, f, model, T, fp, rng, keep_final);
}

CoupledRecord run_cutoff_coupling(const SpectralField& u0, const SpectralField& v0,
                                  const NudgeParams& np, const SolverParams& params,
                                  const SpectralField& f, const NoiseModel& model, double T,
                                  const FunctionalParams& fp, RngStream* rng, bool keep_final) {
    np.validate();
    if (!model.covers(std::min(np.N, u0.grid().max_mode)))
        fail(ErrorCode::config,
             "cutoff nudging requires noise channels covering modes 1..N with positive amplitudes");
    auto spec = CouplingSpec::make_cutoff(np.lambda, np.N, np.budget, np.c0);
    return integrate_pair(u0, v0, spec, params, f, model, T, fp, rng, keep_final);
}

double stopping_time_tau(const CoupledRecord& rec, const NudgeParams& np, double gamma) {
    for (size_t i = 0; i < rec.times.size(); ++i) {
        double expr = (np.c0 / np.lambda) * rec.growth_integral[i] - 0.5 * gamma * rec.times[i] -
                      np.beta;
        if (expr >= np.R) return rec.times[i];
    }
    return std::numeric_limits<double>::infinity();
}

double novikov_bound(const NudgeParams& np, const NoiseModel& model) {
    double amin = model.min_covered_amplitude(np.N);
    if (amin <= 0.0) fail(ErrorCode::config, "novikov_bound: uncovered mode in 1..N");
    return np.lambda * np.lambda * np.budget / (std::numbers::pi * amin * amin);
}

}  // namespace kdv
