#include "kdv/ergodics.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace kdv {

namespace {

// Static index partition over threads; member i is always computed with the
// stream derived from (master_seed, i), so the schedule cannot change results.
template <typename Work>
void parallel_members(int members, int threads, Work&& work) {
    if (threads <= 1 || members <= 1) {
        for (int i = 0; i < members; ++i) work(i);
        return;
    }
    std::vector<std::thread> pool;
    int nthreads = std::min(threads, members);
    pool.reserve(static_cast<size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t)
        pool.emplace_back([&, t]() {
            for (int i = t; i < members; i += nthreads) work(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

EnsembleResult run_ensemble(const EnsembleConfig& cfg, const SingleSetup& setup) {
    cfg.validate();
    EnsembleResult out;
    out.records.resize(static_cast<size_t>(cfg.members));
    std::atomic<int> failures{0};
    parallel_members(cfg.members, cfg.threads, [&](int i) {
        RngStream rng = RngStream::derived(cfg.master_seed, static_cast<std::uint64_t>(i));
        try {
            out.records[static_cast<size_t>(i)] =
                integrate(setup.u0, setup.params, setup.f, setup.model, setup.T, setup.observers,
                          &rng, setup.keep_final);
        } catch (const BlowupError&) {
            failures.fetch_add(1);
        }
    });
    out.failures = failures.load();
    return out;
}

PairEnsembleResult run_pair_ensemble(const EnsembleConfig& cfg, const PairSetup& setup) {
    cfg.validate();
    PairEnsembleResult out;
    out.records.resize(static_cast<size_t>(cfg.members));
    std::atomic<int> failures{0};
    parallel_members(cfg.members, cfg.threads, [&](int i) {
        RngStream rng = RngStream::derived(cfg.master_seed, static_cast<std::uint64_t>(i));
        try {
            out.records[static_cast<size_t>(i)] =
                integrate_pair(setup.u0, setup.v0, setup.coupling, setup.params, setup.f,
                               setup.model, setup.T, setup.fp, &rng, setup.keep_final);
        } catch (const BlowupError&) {
            failures.fetch_add(1);
        }
    });
    out.failures = failures.load();
    return out;
}

namespace {

const TrajectoryRecord* first_survivor(const EnsembleResult& ens) {
    for (const auto& r : ens.records)
        if (r) return &*r;
    return nullptr;
}

}  // namespace

SeriesStats mean_series(const EnsembleResult& ens, const std::string& column) {
    const TrajectoryRecord* ref = first_survivor(ens);
    if (!ref) fail(ErrorCode::validation, "mean_series: every ensemble member failed");
    SeriesStats st;
    st.times = ref->times;
    st.failures = ens.failures;
    const size_t nt = st.times.size();
    st.mean.resize(nt);
    st.se.resize(nt);
    std::vector<double> vals;
    for (size_t ti = 0; ti < nt; ++ti) {
        vals.clear();
        for (const auto& r : ens.records)
            if (r) vals.push_back(r->column(column)[ti]);
        MeanSe m = mean_se(vals);
        st.mean[ti] = m.mean;
        st.se[ti] = m.se;
        st.survivors = static_cast<int>(m.count);
    }
    return st;
}

double mean_l2_oracle(double gamma, double sigma_l2_sq, double e0, double t) {
    if (gamma <= 0.0) fail(ErrorCode::domain, "mean_l2_oracle requires gamma > 0");
    double decay = std::exp(-2.0 * gamma * t);
    return decay * e0 + (1.0 - decay) * sigma_l2_sq / (2.0 * gamma);
}

MomentSeries moment_series(const EnsembleResult& ens, int m, double p,
                           std::optional<double> eta) {
    const std::string column = "I" + std::to_string(m) + "p";
    const TrajectoryRecord* ref = first_survivor(ens);
    if (!ref) fail(ErrorCode::validation, "moment_series: every ensemble member failed");
    if (!ref->has_column(column))
        fail(ErrorCode::validation, "moment_series: records lack the " + column + " observable");
    MomentSeries out;
    out.times = ref->times;
    const size_t nt = out.times.size();
    out.mean.resize(nt);
    out.se.resize(nt);
    if (eta) out.log_mean_exp_eta.resize(nt);
    std::vector<double> powers, exponents;
    for (size_t ti = 0; ti < nt; ++ti) {
        powers.clear();
        exponents.clear();
        for (const auto& r : ens.records) {
            if (!r) continue;
            double val = std::pow(r->column(column)[ti], p);
            powers.push_back(val);
            if (eta) exponents.push_back(*eta * val);
        }
        MeanSe ms = mean_se(powers);
        out.mean[ti] = ms.mean;
        out.se[ti] = ms.se;
        if (eta) out.log_mean_exp_eta[ti] = log_mean_exp(exponents);
    }
    return out;
}

DistanceEstimate coupling_distance_series(const PairEnsembleResult& pairs, int k,
                                          const FunctionalParams& p, double t0, double t1) {
    if (k < 0 || k > 2) fail(ErrorCode::validation, "coupling distance supports k in {0,1,2}");
    const CoupledRecord* ref = nullptr;
    for (const auto& r : pairs.records)
        if (r) {
            ref = &*r;
            break;
        }
    if (!ref) fail(ErrorCode::validation, "coupling_distance_series: every pair failed");

    DistanceEstimate est;
    est.times = ref->times;
    const size_t nt = est.times.size();
    est.mean.resize(nt);
    est.se.resize(nt);
    const double exp37 = 3.0 / 7.0;
    std::vector<double> vals;
    for (size_t ti = 0; ti < nt; ++ti) {
        vals.clear();
        for (const auto& r : pairs.records) {
            if (!r) continue;
            const auto& wk = (k == 0) ? r->w_l2 : (k == 1) ? r->w_h1 : r->w_h2;
            double weight = std::exp(p.eta0 * (std::pow(r->i2p_u[ti], exp37) +
                                               std::pow(r->i2p_v[ti], exp37)));
            vals.push_back(weight * wk[ti]);
        }
        MeanSe ms = mean_se(vals);
        est.mean[ti] = ms.mean;
        est.se[ti] = ms.se;
    }

    // slope of log(mean) over the window; default skips the leading 10%
    double tmax = est.times.back();
    if (t0 < 0.0) t0 = 0.1 * tmax;
    if (t1 < 0.0) t1 = tmax;
    est.window_t0 = t0;
    est.window_t1 = t1;
    std::vector<double> xs, ys;
    for (size_t ti = 0; ti < nt; ++ti)
        if (est.times[ti] >= t0 && est.times[ti] <= t1 && est.mean[ti] > 0.0) {
            xs.push_back(est.times[ti]);
            ys.push_back(std::log(est.mean[ti]));
        }
    if (xs.size() >= 2) est.log_slope = fit_line(xs, ys);
    return est;
}

double kb_average(const TrajectoryRecord& rec, const std::string& column, double T) {
    if (rec.times.empty() || T <= 0.0 || T > rec.times.back() + 1e-12)
        fail(ErrorCode::validation, "kb_average: T outside the record horizon");
    const auto& col = rec.column(column);
    double acc = 0.0;
    for (size_t i = 0; i + 1 < rec.times.size() && rec.times[i] < T; ++i) {
        double dt = std::min(rec.times[i + 1], T) - rec.times[i];
        acc += col[i] * dt;
    }
    return acc / T;
}

MeanSe kb_batch_stats(const TrajectoryRecord& rec, const std::string& column, double t0,
                      double t1, int batches) {
    if (batches < 2) fail(ErrorCode::validation, "kb_batch_stats needs >= 2 batches");
    const auto& col = rec.column(column);
    std::vector<double> batch_means(static_cast<size_t>(batches), 0.0);
    std::vector<double> batch_time(static_cast<size_t>(batches), 0.0);
    double width = (t1 - t0) / batches;
    if (width <= 0.0) fail(ErrorCode::validation, "kb_batch_stats: empty window");
    for (size_t i = 0; i + 1 < rec.times.size(); ++i) {
        double t = rec.times[i];
        if (t < t0 || t >= t1) continue;
        int b = std::min(batches - 1, static_cast<int>((t - t0) / width));
        double dt = std::min(rec.times[i + 1], t1) - t;
        batch_means[static_cast<size_t>(b)] += col[i] * dt;
        batch_time[static_cast<size_t>(b)] += dt;
    }
    for (int b = 0; b < batches; ++b) {
        if (batch_time[static_cast<size_t>(b)] <= 0.0)
            fail(ErrorCode::validation, "kb_batch_stats: no samples in a batch");
        batch_means[static_cast<size_t>(b)] /= batch_time[static_cast<size_t>(b)];
    }
    return mean_se(batch_means);
}

TailFit spectral_tail_fit(const SpectralField& u, int k_min) {
    if (k_min < 1 || k_min >= u.max_mode())
        fail(ErrorCode::validation, "spectral_tail_fit: need 1 <= k_min < K");
    std::vector<double> ks, logk, logs;
    for (int k = k_min; k <= u.max_mode(); ++k) {
        double a = std::abs(u.coeff(k));
        if (a > 0.0) {
            ks.push_back(static_cast<double>(k));
            logk.push_back(std::log(static_cast<double>(k)));
            logs.push_back(std::log(a));
        }
    }
    TailFit fit;
    if (ks.size() < 2) {
        fit.degenerate = true;
        return fit;
    }
    fit.geometric = fit_line(ks, logs);
    fit.algebraic = fit_line(logk, logs);
    return fit;
}

}  // namespace kdv
