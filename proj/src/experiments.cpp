#include "kdv/experiments.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "kdv/deterministic.hpp"
#include "kdv/ergodics.hpp"
#include "kdv/nudging.hpp"
#include "kdv/series.hpp"

namespace kdv {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string run_id(const std::string& command, const RunConfig& cfg) {
    std::ostringstream key;
    key << command << '|' << config_echo(cfg) << '|' << cfg.seed;
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(key.str())));
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::io, "cannot open " + path.string() + " for writing");
    out << text;
    if (!out) fail(ErrorCode::io, "write failed: " + path.string());
}

// series.csv: header then one row per sample, '.' decimal, ',' separator, LF.
std::string csv_table(const std::vector<std::string>& names,
                      const std::vector<const std::vector<double>*>& cols) {
    std::ostringstream out;
    for (size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
    out << '\n';
    const size_t rows = cols.empty() ? 0 : cols[0]->size();
    for (size_t r = 0; r < rows; ++r) {
        for (size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << fmt17((*cols[i])[r]);
        out << '\n';
    }
    return out.str();
}

std::string record_csv(const TrajectoryRecord& rec) {
    std::vector<std::string> names = {"t"};
    std::vector<const std::vector<double>*> cols = {&rec.times};
    for (size_t i = 0; i < rec.names.size(); ++i) {
        names.push_back(rec.names[i]);
        cols.push_back(&rec.columns[i]);
    }
    return csv_table(names, cols);
}

std::string coupled_csv(const CoupledRecord& r) {
    return csv_table({"t", "w_l2", "w_h1", "w_h2", "fp_value", "gamma_factor", "weighted_h1sq",
                      "growth_integral", "cutoff_integral", "novikov", "i2p_u", "i2p_v", "u_h2",
                      "u_l2", "v_l2"},
                     {&r.times, &r.w_l2, &r.w_h1, &r.w_h2, &r.fp_value, &r.gamma_factor,
                      &r.weighted_h1sq, &r.growth_integral, &r.cutoff_integral, &r.novikov,
                      &r.i2p_u, &r.i2p_v, &r.u_h2, &r.u_l2, &r.v_l2});
}

json field_modes_json(const SpectralField& f) {
    json modes = json::array();
    for (int k = 1; k <= f.max_mode(); ++k) {
        Complex c = f.coeff(k);
        if (c != Complex(0.0, 0.0)) modes.push_back({k, c.real(), c.imag()});
    }
    return modes;
}

struct Emitter {
    fs::path dir;
    const RunConfig& cfg;
    std::string command;
    json summary;

    Emitter(const std::string& out_dir, const RunConfig& c, const std::string& cmd)
        : dir(out_dir), cfg(c), command(cmd) {
        fs::create_directories(dir);
        summary["config"] = json::parse(config_echo(c));
        summary["run_id"] = run_id(cmd, c);
        summary["observables"] = json::object();
        summary["fits"] = json::object();
        summary["flags"] = json::object();
        summary["warnings"] = c.warnings;
    }

    void series(const std::string& text) {
        if (cfg.write_csv) write_text(dir / "series.csv", text);
    }

    void final_state(const SpectralField& f) {
        if (!cfg.write_final_state) return;
        json j;
        j["modes"] = field_modes_json(f);
        write_text(dir / "final_state.json", j.dump(2) + "\n");
    }

    std::string finish() {
        std::string text = summary.dump(2) + "\n";
        if (cfg.write_json) write_text(dir / "summary.json", text);
        return text;
    }
};

// slope of log(column) over [t0, t1]; only strictly positive samples enter.
LineFit log_fit(const std::vector<double>& times, const std::vector<double>& values, double t0,
                double t1) {
    std::vector<double> xs, ys;
    for (size_t i = 0; i < times.size(); ++i)
        if (times[i] >= t0 && times[i] <= t1 && values[i] > 0.0) {
            xs.push_back(times[i]);
            ys.push_back(std::log(values[i]));
        }
    if (xs.size() < 2) fail(ErrorCode::validation, "not enough positive samples for a log fit");
    return fit_line(xs, ys);
}

int resolve_threads(int threads) { return threads >= 1 ? threads : 1; }

// -------------------------------------------------------------------- simulate

RunResult cmd_simulate(const RunConfig& cfg, const std::string& out_dir, int) {
    Emitter em(out_dir, cfg, "simulate");
    Grid g = cfg.grid();
    auto observers = make_observers(cfg.observables, cfg.functionals);
    SolverParams params = cfg.solver_params();
    try {
        TrajectoryRecord rec = integrate(cfg.initial_u(g), params, cfg.forcing(g),
                                         cfg.noise_model(), cfg.T, observers, nullptr,
                                         cfg.write_final_state);
        em.series(record_csv(rec));
        for (size_t i = 0; i < rec.names.size(); ++i)
            em.summary["observables"]["final_" + rec.names[i]] = rec.columns[i].back();
        if (rec.has_column("l2")) {
            bool positive = true;
            for (double v : rec.column("l2"))
                if (v <= 0.0) positive = false;
            if (positive && rec.times.size() >= 2) {
                LineFit f = log_fit(rec.times, rec.column("l2"), cfg.burn_in, cfg.T);
                em.summary["fits"]["l2_log_slope"] = f.slope;
                em.summary["fits"]["measured_decay_rate"] = -f.slope;
            }
        }
        em.summary["flags"]["blowup"] = false;
        if (rec.final_state) em.final_state(*rec.final_state);
    } catch (const BlowupError& e) {
        em.summary["flags"]["blowup"] = true;
        em.summary["flags"]["failure_time"] = e.time();
        em.finish();
        throw;
    }
    return {em.finish(), true};
}

// ------------------------------------------------------------------ invariants

RunResult cmd_invariants(const RunConfig& cfg, const std::string& out_dir, int) {
    Emitter em(out_dir, cfg, "invariants");
    Grid g = cfg.grid();
    std::vector<std::string> names = {"I0", "I1", "I2"};
    for (const auto& o : cfg.observables)
        if (std::find(names.begin(), names.end(), o) == names.end()) names.push_back(o);
    auto observers = make_observers(names, cfg.functionals);
    try {
        TrajectoryRecord rec = integrate(cfg.initial_u(g), cfg.solver_params(), cfg.forcing(g),
                                         cfg.noise_model(), cfg.T, observers);
        em.series(record_csv(rec));
        bool ok = true;
        for (int m = 0; m <= 2; ++m) {
            const auto& col = rec.column("I" + std::to_string(m));
            double base = col.front();
            double scale = std::abs(base) > 1e-12 ? std::abs(base) : 1.0;
            double drift = 0.0;
            for (double v : col) drift = std::max(drift, std::abs(v - base) / scale);
            em.summary["observables"]["drift_I" + std::to_string(m)] = drift;
            ok = ok && drift < cfg.drift_tolerance;
        }
        em.summary["flags"]["conserved"] = ok;
        em.summary["flags"]["blowup"] = false;
        return {em.finish(), ok};
    } catch (const BlowupError& e) {
        em.summary["flags"]["blowup"] = true;
        em.summary["flags"]["failure_time"] = e.time();
        em.finish();
        throw;
    }
}

// ----------------------------------------------------------------------- nudge

RunResult cmd_nudge(const RunConfig& cfg, const std::string& out_dir, int) {
    Emitter em(out_dir, cfg, "nudge");
    Grid g = cfg.grid();
    SpectralField f = cfg.forcing(g);
    NoiseModel model = cfg.noise_model();
    auto [lambda, N] = cfg.nudge_rule(f, model);

    NudgeParams np;
    np.lambda = lambda;
    np.N = N;
    np.c0 = cfg.c0;
    np.budget = cfg.K_budget;
    np.R = cfg.R;
    np.beta = cfg.beta;

    em.summary["observables"]["lambda"] = lambda;
    em.summary["observables"]["N"] = N;

    try {
        CoupledRecord rec;
        bool cutoff = std::isfinite(cfg.K_budget);
        if (cutoff)
            rec = run_cutoff_coupling(cfg.initial_u(g), cfg.initial_v(g), np, cfg.solver_params(),
                                      f, model, cfg.T, cfg.functionals);
        else
            rec = run_foias_prodi(cfg.initial_u(g), cfg.initial_v(g), np, cfg.solver_params(), f,
                                  model, cfg.T, cfg.functionals);
        em.series(coupled_csv(rec));

        double ratio = rec.w_h1.front() > 0.0 ? rec.w_h1.back() / rec.w_h1.front()
                                              : rec.w_h1.back();
        em.summary["observables"]["initial_w_h1"] = rec.w_h1.front();
        em.summary["observables"]["final_w_h1"] = rec.w_h1.back();
        em.summary["observables"]["decay_ratio_h1"] = ratio;
        double tau = stopping_time_tau(rec, np, cfg.gamma);
        em.summary["observables"]["tau_R_beta"] =
            std::isfinite(tau) ? json(tau) : json("not crossed");
        if (cutoff) {
            em.summary["observables"]["cutoff_integral"] = rec.cutoff_integral.back();
            em.summary["observables"]["cutoff_crossed"] = rec.cutoff_crossed;
            if (rec.cutoff_crossed) {
                em.summary["observables"]["cutoff_cross_time"] = rec.cutoff_cross_time;
                em.summary["observables"]["cutoff_increment_at_cross"] =
                    rec.cutoff_increment_at_cross;
            }
            em.summary["observables"]["novikov"] = rec.novikov.back();
            em.summary["observables"]["novikov_bound"] = novikov_bound(np, model);
        }
        bool positive = true;
        for (double v : rec.w_h1)
            if (v <= 0.0) positive = false;
        if (positive) {
            LineFit fit = log_fit(rec.times, rec.w_h1, cfg.burn_in, cfg.T);
            em.summary["fits"]["w_h1_log_slope"] = fit.slope;
        }
        em.summary["flags"]["decayed"] = ratio <= cfg.threshold;
        em.summary["flags"]["blowup"] = false;
        return {em.finish(), true};
    } catch (const BlowupError& e) {
        em.summary["flags"]["blowup"] = true;
        em.summary["flags"]["failure_time"] = e.time();
        em.finish();
        throw;
    }
}

// ---------------------------------------------------------------------- couple

RunResult cmd_couple(const RunConfig& cfg, const std::string& out_dir, int threads) {
    Emitter em(out_dir, cfg, "couple");
    Grid g = cfg.grid();

    PairSetup setup{cfg.initial_u(g), cfg.initial_v(g), CouplingSpec::independent(),
                    cfg.solver_params(), cfg.forcing(g), cfg.noise_model(), cfg.T,
                    cfg.functionals, false};
    EnsembleConfig ens{cfg.members, cfg.seed, resolve_threads(threads)};
    PairEnsembleResult pairs = run_pair_ensemble(ens, setup);
    if (pairs.failures == cfg.members) fail(ErrorCode::blowup, "every coupled pair blew up");

    double t0 = cfg.fit_t0 >= 0.0 ? cfg.fit_t0 : std::max(cfg.burn_in, 0.1 * cfg.T);
    double t1 = cfg.fit_t1 >= 0.0 ? cfg.fit_t1 : cfg.T;
    DistanceEstimate est =
        coupling_distance_series(pairs, cfg.distance_k, cfg.functionals, t0, t1);

    // mean L2/H1 separation alongside the weighted distance
    std::vector<double> wl2(est.times.size(), 0.0), wh1(est.times.size(), 0.0);
    int survivors = 0;
    for (const auto& r : pairs.records) {
        if (!r) continue;
        ++survivors;
        for (size_t i = 0; i < est.times.size(); ++i) {
            wl2[i] += r->w_l2[i];
            wh1[i] += r->w_h1[i];
        }
    }
    for (auto& v : wl2) v /= survivors;
    for (auto& v : wh1) v /= survivors;

    em.series(csv_table({"t", "d_mean", "d_se", "w_l2_mean", "w_h1_mean"},
                        {&est.times, &est.mean, &est.se, &wl2, &wh1}));

    em.summary["observables"]["pairs"] = cfg.members;
    em.summary["observables"]["blown_up"] = pairs.failures;
    em.summary["fits"]["d_log_slope"] = est.log_slope.slope;
    em.summary["fits"]["fit_window"] = {est.window_t0, est.window_t1};
    LineFit l2fit = log_fit(est.times, wl2, t0, t1);
    em.summary["fits"]["w_l2_log_slope"] = l2fit.slope;
    em.summary["flags"]["blowup"] = pairs.failures > 0;
    return {em.finish(), true};
}

// -------------------------------------------------------------------- ensemble

RunResult cmd_ensemble(const RunConfig& cfg, const std::string& out_dir, int threads) {
    Emitter em(out_dir, cfg, "ensemble");
    Grid g = cfg.grid();

    std::vector<std::string> names = cfg.observables;
    if (std::find(names.begin(), names.end(), "l2sq") == names.end()) names.push_back("l2sq");

    SingleSetup setup{cfg.initial_u(g), cfg.solver_params(), cfg.forcing(g), cfg.noise_model(),
                      cfg.T, make_observers(names, cfg.functionals), cfg.tail_fit};
    EnsembleConfig ens{cfg.members, cfg.seed, resolve_threads(threads)};
    EnsembleResult result = run_ensemble(ens, setup);
    if (result.failures == cfg.members) fail(ErrorCode::blowup, "every ensemble member blew up");

    std::vector<std::string> header = {"t"};
    std::vector<SeriesStats> stats;
    stats.reserve(names.size());
    for (const auto& n : names) stats.push_back(mean_series(result, n));
    std::vector<const std::vector<double>*> cols = {&stats.front().times};
    for (size_t i = 0; i < names.size(); ++i) {
        header.push_back("mean_" + names[i]);
        header.push_back("se_" + names[i]);
        cols.push_back(&stats[i].mean);
        cols.push_back(&stats[i].se);
    }
    em.series(csv_table(header, cols));

    em.summary["observables"]["members"] = cfg.members;
    em.summary["observables"]["blown_up"] = result.failures;

    // against the closed-form mean-L2 ODE when it applies (f = 0, gamma > 0)
    if (cfg.f_modes.empty() && cfg.gamma > 0.0 && !cfg.noise.empty()) {
        const SeriesStats& l2sq = stats[names.size() - 1];
        SpectralField u0 = cfg.initial_u(g);
        double e0 = l2_inner(u0, u0);
        double sig = cfg.noise_model().l2_norm_sq();
        double max_z = 0.0;
        for (size_t i = 1; i < l2sq.times.size(); ++i) {
            double oracle = mean_l2_oracle(cfg.gamma, sig, e0, l2sq.times[i]);
            if (l2sq.se[i] > 0.0)
                max_z = std::max(max_z, std::abs(l2sq.mean[i] - oracle) / l2sq.se[i]);
        }
        em.summary["observables"]["mean_l2_max_z"] = max_z;
        em.summary["flags"]["mean_l2_within_3se"] = max_z <= 3.0;
    }

    if (cfg.tail_fit) {
        int kmin = cfg.tail_k_min > 0 ? cfg.tail_k_min : cfg.K / 2;
        int geo_better = 0, total = 0;
        for (const auto& r : result.records) {
            if (!r || !r->final_state) continue;
            TailFit fit = spectral_tail_fit(*r->final_state, kmin);
            if (fit.degenerate) continue;
            ++total;
            if (fit.geometric.residual_rms < fit.algebraic.residual_rms) ++geo_better;
        }
        em.summary["observables"]["tail_geometric_better"] = geo_better;
        em.summary["observables"]["tail_fitted"] = total;
    }
    em.summary["flags"]["blowup"] = result.failures > 0;
    return {em.finish(), true};
}

// --------------------------------------------------------------- deterministic

RunResult cmd_deterministic(const RunConfig& cfg, const std::string& out_dir, int) {
    Emitter em(out_dir, cfg, "deterministic");
    Grid g = cfg.grid();
    SpectralField f = cfg.forcing(g);
    if (!cfg.noise.empty())
        fail(ErrorCode::validation, "deterministic experiments require an empty noise block");

    if (cfg.det_mode == "determining_modes") {
        NoiseModel empty;
        auto [lambda, N] = cfg.nudge_rule(f, empty);
        em.summary["observables"]["lambda"] = lambda;
        em.summary["observables"]["N"] = N;
        DeterminingModesReport rep =
            determining_modes_experiment(cfg.initial_u(g), cfg.initial_v(g), lambda, N,
                                         cfg.solver_params(), f, cfg.T, cfg.threshold);
        em.series(coupled_csv(rep.record));
        em.summary["observables"]["ratio_h1"] = rep.ratio;
        em.summary["flags"]["below_threshold"] = rep.below_threshold;
        if (cfg.negative_control) {
            DeterminingModesReport ctrl =
                determining_modes_experiment(cfg.initial_u(g), cfg.initial_v(g), lambda, 0,
                                             cfg.solver_params(), f, cfg.T, cfg.threshold);
            em.summary["observables"]["ratio_h1_control"] = ctrl.ratio;
            em.summary["observables"]["control_factor"] =
                rep.ratio > 0.0 ? ctrl.ratio / rep.ratio
                                : std::numeric_limits<double>::infinity();
        }
        return {em.finish(), rep.below_threshold};
    }
    if (cfg.det_mode == "steady_state") {
        SteadyStateReport rep = steady_state_check(cfg.solver_params(), f, cfg.initial_u(g),
                                                   cfg.T, cfg.steady_threshold);
        em.summary["observables"]["residual"] = rep.residual;
        em.summary["observables"]["identity_gap"] = rep.identity_gap;
        em.summary["observables"]["norm_bound_gap"] = rep.norm_bound_gap;
        em.summary["observables"]["u_l2"] = rep.u_l2;
        em.summary["observables"]["f_l2_over_gamma"] = sobolev_norm(f, 0) / cfg.gamma;
        em.summary["flags"]["steady"] = rep.steady;
        em.summary["flags"]["inconclusive"] = !rep.steady;
        return {em.finish(), true};
    }
    if (cfg.det_mode == "attractor") {
        std::vector<SpectralField> ics;
        for (const auto& modes : cfg.u0_list) ics.push_back(SpectralField::from_modes(g, modes));
        AttractorReport rep =
            one_point_attractor_check(cfg.solver_params(), f, ics, cfg.T, cfg.threshold);
        json dist = json::array();
        for (double d : rep.pairwise_l2) dist.push_back(d);
        em.summary["observables"]["pairwise_l2"] = dist;
        em.summary["observables"]["max_distance"] = rep.max_distance;
        em.summary["flags"]["contracted"] = rep.contracted;
        return {em.finish(), true};
    }
    fail(ErrorCode::validation, "unknown deterministic mode '" + cfg.det_mode + "'");
}

// ---------------------------------------------------------------------- verify

RunResult cmd_verify(const RunConfig& cfg, const std::string& out_dir, int) {
    Emitter em(out_dir, cfg, "verify");
    auto results = run_verify_suite();
    json list = json::array();
    int failures = 0;
    for (const auto& r : results) {
        list.push_back({{"name", r.name},
                        {"measured", r.measured},
                        {"expected", r.expected},
                        {"tolerance", r.tolerance},
                        {"pass", r.pass}});
        if (!r.pass) ++failures;
    }
    em.summary["observables"]["oracles"] = list;
    em.summary["observables"]["failures"] = failures;
    em.summary["flags"]["all_passed"] = failures == 0;
    return {em.finish(), failures == 0};
}

// ----------------------------------------------------------------- calibrate-N

RunResult cmd_calibrate_n(const RunConfig& cfg, const std::string& out_dir, int threads) {
    Emitter em(out_dir, cfg, "calibrate-N");
    Grid g = cfg.grid();
    SpectralField f = cfg.forcing(g);
    NoiseModel model = cfg.noise_model();
    auto [lambda, n_rule] = cfg.nudge_rule(f, model);
    int n_max = cfg.calibrate_n_max > 0 ? cfg.calibrate_n_max : cfg.K;

    auto worst_ratio = [&](int N) {
        NudgeParams np;
        np.lambda = lambda;
        np.N = N;
        np.c0 = cfg.c0;
        PairSetup setup{cfg.initial_u(g), cfg.initial_v(g),
                        CouplingSpec::make_nudged(lambda, N, cfg.c0), cfg.solver_params(), f,
                        model, cfg.T, cfg.functionals, false};
        EnsembleConfig ens{cfg.calibrate_seeds, cfg.seed, resolve_threads(threads)};
        PairEnsembleResult pairs = run_pair_ensemble(ens, setup);
        double worst = 0.0;
        for (const auto& r : pairs.records) {
            if (!r) return std::numeric_limits<double>::infinity();
            double ratio = r->w_h1.front() > 0.0 ? r->w_h1.back() / r->w_h1.front() : 0.0;
            worst = std::max(worst, ratio);
        }
        return worst;
    };

    std::vector<double> tried_n, tried_ratio, tried_pass;
    auto evaluate = [&](int N) {
        double r = worst_ratio(N);
        tried_n.push_back(N);
        tried_ratio.push_back(r);
        tried_pass.push_back(r <= cfg.threshold ? 1.0 : 0.0);
        return r <= cfg.threshold;
    };

    int smallest = -1;
    if (evaluate(n_max)) {
        int lo = 1, hi = n_max;  // hi passes
        while (lo < hi) {
            int mid = lo + (hi - lo) / 2;
            if (evaluate(mid))
                hi = mid;
            else
                lo = mid + 1;
        }
        smallest = hi;
    }

    em.series(csv_table({"N", "worst_ratio", "pass"}, {&tried_n, &tried_ratio, &tried_pass}));
    em.summary["observables"]["lambda"] = lambda;
    em.summary["observables"]["rule_N"] = n_rule;
    em.summary["observables"]["threshold"] = cfg.threshold;
    if (smallest > 0)
        em.summary["observables"]["smallest_passing_N"] = smallest;
    else
        em.summary["observables"]["smallest_passing_N"] = "none";
    em.summary["flags"]["found"] = smallest > 0;
    return {em.finish(), true};
}

}  // namespace

RunResult run_command(const std::string& name, const RunConfig& cfg, const std::string& out_dir,
                      int threads) {
    if (!cfg.name.empty() && cfg.name != name)
        fail(ErrorCode::validation,
             "config experiment.name '" + cfg.name + "' does not match command '" + name + "'");
    if (name == "simulate") return cmd_simulate(cfg, out_dir, threads);
    if (name == "invariants") return cmd_invariants(cfg, out_dir, threads);
    if (name == "nudge") return cmd_nudge(cfg, out_dir, threads);
    if (name == "couple") return cmd_couple(cfg, out_dir, threads);
    if (name == "ensemble") return cmd_ensemble(cfg, out_dir, threads);
    if (name == "deterministic") return cmd_deterministic(cfg, out_dir, threads);
    if (name == "verify") return cmd_verify(cfg, out_dir, threads);
    if (name == "calibrate-N") return cmd_calibrate_n(cfg, out_dir, threads);
    fail(ErrorCode::validation, "unknown command '" + name + "'");
}

}  // namespace kdv
