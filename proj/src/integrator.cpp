#include "kdv/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kdv {

Complex linear_symbol(int k, double gamma, double epsilon) {
    if (k < 1) fail(ErrorCode::validation, "linear_symbol: k must be >= 1");
    double k2 = static_cast<double>(k) * k;
    return Complex(-gamma - epsilon * k2 * k2, k2 * static_cast<double>(k));
}

namespace {

// phi_j by truncated series; used below |z| = 0.5 where the closed forms
// cancel.  19 terms leave the remainder far below double roundoff.
Complex phi_series(Complex z, int j) {
    double fact = 1.0;
    for (int l = 1; l <= j; ++l) fact *= l;
    Complex term(1.0 / fact, 0.0);
    Complex sum = term;
    for (int m = 1; m <= 19; ++m) {
        term *= z / static_cast<double>(m + j);
        sum += term;
    }
    return sum;
}

constexpr double series_radius = 0.5;

}  // namespace

Complex phi1(Complex z) {
    if (std::abs(z) < series_radius) return phi_series(z, 1);
    return (std::exp(z) - 1.0) / z;
}

Complex phi2(Complex z) {
    if (std::abs(z) < series_radius) return phi_series(z, 2);
    return (std::exp(z) - 1.0 - z) / (z * z);
}

Complex phi3(Complex z) {
    if (std::abs(z) < series_radius) return phi_series(z, 3);
    return (std::exp(z) - 1.0 - z - 0.5 * z * z) / (z * z * z);
}

CouplingSpec CouplingSpec::make_nudged(double lambda, int N, double c0) {
    CouplingSpec s;
    s.kind = Kind::nudged;
    s.lambda = lambda;
    s.N = N;
    s.c0 = c0;
    return s;
}

CouplingSpec CouplingSpec::make_cutoff(double lambda, int N, double budget, double c0) {
    CouplingSpec s;
    s.kind = Kind::nudged_cutoff;
    s.lambda = lambda;
    s.N = N;
    s.budget = budget;
    s.c0 = c0;
    return s;
}

std::vector<Observer> make_observers(const std::vector<std::string>& names,
                                     const FunctionalParams& p) {
    std::vector<Observer> obs;
    for (const auto& name : names) {
        if (name == "l2")
            obs.push_back({name, [](const SpectralField& u) { return sobolev_norm(u, 0); }});
        else if (name == "h1")
            obs.push_back({name, [](const SpectralField& u) { return sobolev_norm(u, 1); }});
        else if (name == "h2")
            obs.push_back({name, [](const SpectralField& u) { return sobolev_norm(u, 2); }});
        else if (name == "l2sq")
            obs.push_back({name, [](const SpectralField& u) { return l2_inner(u, u); }});
        else if (name == "I0" || name == "I1" || name == "I2") {
            int m = name[1] - '0';
            obs.push_back({name, [m](const SpectralField& u) { return invariant_value(u, m); }});
        } else if (name == "I0p" || name == "I1p" || name == "I2p") {
            int m = name[1] - '0';
            obs.push_back(
                {name, [m, p](const SpectralField& u) { return modified_invariant(u, m, p); }});
        } else {
            fail(ErrorCode::validation, "unknown observable: " + name);
        }
    }
    return obs;
}

const std::vector<double>& TrajectoryRecord::column(const std::string& name) const {
    for (size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return columns[i];
    fail(ErrorCode::validation, "record has no column '" + name + "'");
}

bool TrajectoryRecord::has_column(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

namespace {

using Coeffs = std::vector<Complex>;

long step_count(double T, double dt) {
    if (T <= 0.0) fail(ErrorCode::validation, "integration horizon must be > 0");
    double q = T / dt;
    double r = std::round(q);
    if (std::abs(q - r) < 1e-9 * std::max(1.0, std::abs(q))) return static_cast<long>(r);
    return static_cast<long>(std::ceil(q));
}

[[noreturn]] void report_blowup(long step, double time) {
    std::ostringstream msg;
    msg << "solution blew up (non-finite coefficient) at step " << step << ", t = " << time;
    throw BlowupError(step, time, msg.str());
}

// Per-mode propagators and stage weights.  With z = dt * lambda_k:
//   E = e^z, E2 = e^{z/2}, Q = (dt/2) phi1(z/2),
//   w1 = dt (phi1 - 3 phi2 + 4 phi3), w2 = dt (2 phi2 - 4 phi3),
//   w3 = dt (4 phi3 - phi2);   w1 + w2 + w3 = dt phi1, so a constant drift
// is integrated exactly.
struct StepTables {
    Coeffs E, E2, Q, w1, w2, w3;

    StepTables(const Grid& g, const SolverParams& p) {
        const int K = g.max_mode;
        E.resize(K);
        E2.resize(K);
        Q.resize(K);
        w1.resize(K);
        w2.resize(K);
        w3.resize(K);
        const double h = p.dt;
        for (int k = 1; k <= K; ++k) {
            Complex z = h * linear_symbol(k, p.gamma, p.epsilon);
            Complex p1 = phi1(z), p2 = phi2(z), p3 = phi3(z);
            E[k - 1] = std::exp(z);
            E2[k - 1] = std::exp(0.5 * z);
            Q[k - 1] = 0.5 * h * phi1(0.5 * z);
            w1[k - 1] = h * (p1 - 3.0 * p2 + 4.0 * p3);
            w2[k - 1] = h * (2.0 * p2 - 4.0 * p3);
            w3[k - 1] = h * (4.0 * p3 - p2);
        }
    }
};

struct NudgeContext {
    bool active = false;
    double lambda = 0.0;
    int N = 0;  // already clipped to the grid
};

class ExpRk4 {
  public:
    ExpRk4(const Grid& g, const SolverParams& p, const SpectralField& f)
        : grid_(g), params_(p), tables_(g, p), f_(f.coeffs()), scratch_(g) {
        if (!(f.grid() == g)) fail(ErrorCode::validation, "forcing lives on a different grid");
    }

    void step(SpectralField& u, const SpectralField* dw) {
        run_stages(u.coeffs(), nullptr, nullptr);
        combine(u.coeffs(), fu_, fa_, fb_, fc_, dw);
    }

    void step_pair(SpectralField& u, SpectralField& v, const SpectralField* dw,
                   const NudgeContext& nudge) {
        const NudgeContext* ng = (nudge.active && nudge.lambda != 0.0) ? &nudge : nullptr;
        run_stages(u.coeffs(), nullptr, nullptr);
        run_pair_stages(v.coeffs(), u.coeffs(), ng);
        combine(u.coeffs(), fu_, fa_, fb_, fc_, dw);
        combine(v.coeffs(), gv_, ga_, gb_, gc_, dw);
    }

  private:
    // F(y) = -u Du + f  [- lambda P_N (y - target)]
    void eval_drift(const Coeffs& y, const NudgeContext* nudge, const Coeffs* target,
                    Coeffs& out) {
        const size_t K = y.size();
        if (params_.nonlinearity_on) {
            scratch_.coeffs() = y;
            SpectralField nl = nonlinear_term(scratch_);
            out.resize(K);
            for (size_t i = 0; i < K; ++i) out[i] = f_[i] - nl.coeffs()[i];
        } else {
            out = f_;
        }
        if (nudge) {
            for (int i = 0; i < nudge->N; ++i)
                out[static_cast<size_t>(i)] -=
                    nudge->lambda * (y[static_cast<size_t>(i)] - (*target)[static_cast<size_t>(i)]);
        }
    }

    void stage(const Coeffs& y, const Coeffs& g, Coeffs& out) {
        const size_t K = y.size();
        out.resize(K);
        for (size_t i = 0; i < K; ++i) out[i] = tables_.E2[i] * y[i] + tables_.Q[i] * g[i];
    }

    void stage2(const Coeffs& a, const Coeffs& gb, const Coeffs& gu, Coeffs& out) {
        const size_t K = a.size();
        out.resize(K);
        for (size_t i = 0; i < K; ++i)
            out[i] = tables_.E2[i] * a[i] + tables_.Q[i] * (2.0 * gb[i] - gu[i]);
    }

    // Stages of the plain equation, kept for the nudged companion to target.
    void run_stages(const Coeffs& un, const NudgeContext*, const Coeffs*) {
        eval_drift(un, nullptr, nullptr, fu_);
        stage(un, fu_, a_);
        eval_drift(a_, nullptr, nullptr, fa_);
        stage(un, fa_, b_);
        eval_drift(b_, nullptr, nullptr, fb_);
        stage2(a_, fb_, fu_, c_);
        eval_drift(c_, nullptr, nullptr, fc_);
    }

    // Nudged stages; each drift evaluation targets the matching u stage.
    void run_pair_stages(const Coeffs& vn, const Coeffs& un, const NudgeContext* ng) {
        eval_drift(vn, ng, &un, gv_);
        stage(vn, gv_, av_);
        eval_drift(av_, ng, &a_, ga_);
        stage(vn, ga_, bv_);
        eval_drift(bv_, ng, &b_, gb_);
        stage2(av_, gb_, gv_, cv_);
        eval_drift(cv_, ng, &c_, gc_);
    }

    void combine(Coeffs& y, const Coeffs& g1, const Coeffs& g2, const Coeffs& g3,
                 const Coeffs& g4, const SpectralField* dw) {
        const size_t K = y.size();
        for (size_t i = 0; i < K; ++i) {
            y[i] = tables_.E[i] * y[i] + tables_.w1[i] * g1[i] + tables_.w2[i] * (g2[i] + g3[i]) +
                   tables_.w3[i] * g4[i];
            if (dw) y[i] += tables_.E[i] * dw->coeffs()[i];
        }
    }

    Grid grid_;
    SolverParams params_;
    StepTables tables_;
    Coeffs f_;
    SpectralField scratch_;
    Coeffs fu_, fa_, fb_, fc_, a_, b_, c_;
    Coeffs gv_, ga_, gb_, gc_, av_, bv_, cv_;
};

}  // namespace

TrajectoryRecord integrate(const SpectralField& u0, const SolverParams& params,
                           const SpectralField& f, const NoiseModel& model, double T,
                           const std::vector<Observer>& observers, RngStream* rng,
                           bool keep_final) {
    params.validate();
    const Grid& g = u0.grid();
    RngStream local(params.seed);
    RngStream& stream = rng ? *rng : local;

    ExpRk4 stepper(g, params, f);
    SpectralField u = u0;

    TrajectoryRecord rec;
    for (const auto& o : observers) rec.names.push_back(o.name);
    rec.columns.resize(observers.size());
    auto sample = [&](double t) {
        rec.times.push_back(t);
        for (size_t i = 0; i < observers.size(); ++i) rec.columns[i].push_back(observers[i].fn(u));
    };

    const long n = step_count(T, params.dt);
    sample(0.0);
    for (long s = 1; s <= n; ++s) {
        if (model.empty()) {
            stepper.step(u, nullptr);
        } else {
            SpectralField dw = model.sample_increment(g, params.dt, stream);
            stepper.step(u, &dw);
        }
        double t = static_cast<double>(s) * params.dt;
        if (!u.finite()) report_blowup(s, t);
        if (s % params.sample_every == 0 || s == n) sample(t);
    }
    if (keep_final) rec.final_state = u;
    return rec;
}

CoupledRecord integrate_pair(const SpectralField& u0, const SpectralField& v0,
                             const CouplingSpec& coupling, const SolverParams& params,
                             const SpectralField& f, const NoiseModel& model, double T,
                             const FunctionalParams& fp, RngStream* rng, bool keep_final) {
    params.validate();
    if (!(u0.grid() == v0.grid()))
        fail(ErrorCode::validation, "pair initial states on different grids");
    const Grid& g = u0.grid();
    const bool cutoff = coupling.kind == CouplingSpec::Kind::nudged_cutoff;
    const bool nudging = coupling.kind != CouplingSpec::Kind::independent_copy;
    const int Nproj = std::min(coupling.N, g.max_mode);
    const bool covered = model.covers(Nproj);
    if (cutoff && std::isfinite(coupling.budget)) {
        if (coupling.lambda < 0.0) fail(ErrorCode::validation, "cutoff coupling requires lambda >= 0");
        if (!covered)
            fail(ErrorCode::config,
                 "cutoff nudging requires noise channels covering modes 1..N with positive amplitudes");
    }

    RngStream local(params.seed);
    RngStream& stream = rng ? *rng : local;

    ExpRk4 stepper(g, params, f);
    SpectralField u = u0;
    SpectralField v = v0;

    const double lambda_eff = (nudging && coupling.lambda > 0.0) ? coupling.lambda : 1.0;

    CoupledRecord rec;
    rec.lambda = coupling.lambda;
    rec.N = coupling.N;
    rec.c0 = coupling.c0;
    rec.budget = coupling.budget;

    double growth = 0.0;   // A(t) = int (1 + ||u||_{H2}^2 + ||v||^2 / lambda)
    double cut_int = 0.0;  // int ||P_N(v-u)||^2, frozen once the budget is spent
    double novikov = 0.0;  // int ||sigma^{-1} lambda P_N(v-u)||^2, same freeze

    auto sample = [&](double t) {
        SpectralField w = v - u;
        rec.times.push_back(t);
        rec.w_l2.push_back(sobolev_norm(w, 0));
        rec.w_h1.push_back(sobolev_norm(w, 1));
        rec.w_h2.push_back(sobolev_norm(w, 2));
        rec.fp_value.push_back(fp_functional(w, u, fp.fp_alpha_bar));
        double gamma_t = params.gamma * t - (coupling.c0 / lambda_eff) * growth;
        rec.gamma_factor.push_back(gamma_t);
        double wh1 = rec.w_h1.back();
        rec.weighted_h1sq.push_back(std::exp(gamma_t) * wh1 * wh1);
        rec.growth_integral.push_back(growth);
        rec.cutoff_integral.push_back(cut_int);
        rec.novikov.push_back(novikov);
        rec.i2p_u.push_back(modified_invariant(u, 2, fp));
        rec.i2p_v.push_back(modified_invariant(v, 2, fp));
        rec.u_h2.push_back(sobolev_norm(u, 2));
        rec.u_l2.push_back(sobolev_norm(u, 0));
        rec.v_l2.push_back(sobolev_norm(v, 0));
    };

    const long n = step_count(T, params.dt);
    sample(0.0);
    for (long s = 1; s <= n; ++s) {
        // accumulators use left-endpoint quadrature over the step
        double uh2 = sobolev_norm(u, 2);
        double vl2 = sobolev_norm(v, 0);
        growth += params.dt * (1.0 + uh2 * uh2 + vl2 * vl2 / lambda_eff);

        NudgeContext ng;
        if (nudging) {
            bool active = true;
            if (cutoff) {
                active = cut_int < coupling.budget;
                if (active) {
                    SpectralField pw = project_low(v - u, Nproj);
                    double inc = params.dt * l2_inner(pw, pw);
                    cut_int += inc;
                    if (covered && coupling.lambda > 0.0) {
                        double shift = 0.0;
                        for (int k = 1; k <= Nproj; ++k) {
                            double a = model.amplitude(k);
                            shift += 4.0 * std::norm(pw.coeff(k)) / (a * a);
                        }
                        novikov += params.dt * coupling.lambda * coupling.lambda * shift;
                    }
                    if (cut_int >= coupling.budget && !rec.cutoff_crossed) {
                        rec.cutoff_crossed = true;
                        rec.cutoff_cross_time = static_cast<double>(s - 1) * params.dt;
                        rec.cutoff_increment_at_cross = inc;
                    }
                }
            }
            ng.active = active;
            ng.lambda = coupling.lambda;
            ng.N = Nproj;
        }

        if (model.empty()) {
            stepper.step_pair(u, v, nullptr, ng);
        } else {
            SpectralField dw = model.sample_increment(g, params.dt, stream);
            stepper.step_pair(u, v, &dw, ng);
        }
        double t = static_cast<double>(s) * params.dt;
        if (!u.finite() || !v.finite()) report_blowup(s, t);
        if (s % params.sample_every == 0 || s == n) sample(t);
    }
    if (keep_final) {
        rec.final_u = u;
        rec.final_v = v;
    }
    return rec;
}

}  // namespace kdv
