#include "kdv/config.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "kdv/nudging.hpp"

namespace kdv {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::validation, "config: " + what); }

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& known) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key())) bad("unknown key '" + path + it.key() + "'");
}

double num(const json& j, const std::string& where) {
    if (!j.is_number()) bad("'" + where + "' must be a number");
    return j.get<double>();
}

int integer(const json& j, const std::string& where) {
    if (!j.is_number_integer()) bad("'" + where + "' must be an integer");
    return j.get<int>();
}

ModeList mode_list(const json& j, const std::string& where) {
    if (!j.is_array()) bad("'" + where + "' must be an array of [k, re, im] triples");
    ModeList out;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 3) bad("'" + where + "' entries must be [k, re, im]");
        out.emplace_back(integer(e[0], where + "[0]"),
                         Complex(num(e[1], where), num(e[2], where)));
    }
    return out;
}

void check_modes(const ModeList& modes, int K, const std::string& where) {
    std::set<int> seen;
    for (const auto& [k, c] : modes) {
        if (k < 1 || k > K) {
            std::ostringstream msg;
            msg << "'" << where << "' references mode k=" << k << " outside 1..K=" << K;
            bad(msg.str());
        }
        if (!seen.insert(k).second) bad("'" + where + "' repeats mode " + std::to_string(k));
    }
}

}  // namespace

SolverParams RunConfig::solver_params() const {
    SolverParams p;
    p.gamma = gamma;
    p.epsilon = epsilon;
    p.dt = dt;
    p.nonlinearity_on = nonlinearity;
    p.seed = seed;
    p.sample_every = sample_every;
    return p;
}

SpectralField RunConfig::forcing(const Grid& g) const {
    return SpectralField::from_modes(g, f_modes);
}

SpectralField RunConfig::initial_u(const Grid& g) const {
    return SpectralField::from_modes(g, u0_modes);
}

SpectralField RunConfig::initial_v(const Grid& g) const {
    return SpectralField::from_modes(g, v0_modes);
}

std::pair<double, int> RunConfig::nudge_rule(const SpectralField& f,
                                             const NoiseModel& model) const {
    if (lambda && N) return {*lambda, *N};
    auto [l, n_rule] = default_nudge_params(gamma, sobolev_norm(f, 1), model.l2_norm_sq(), c);
    return {lambda.value_or(l), N.value_or(n_rule)};
}

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        bad(std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) bad("top level must be an object");
    check_keys(doc, "", {"equation", "grid", "solver", "experiment", "output"});

    RunConfig cfg;

    if (doc.contains("equation")) {
        const auto& eq = doc["equation"];
        check_keys(eq, "equation.", {"gamma", "epsilon", "f_modes", "noise"});
        if (eq.contains("gamma")) cfg.gamma = num(eq["gamma"], "equation.gamma");
        if (eq.contains("epsilon")) cfg.epsilon = num(eq["epsilon"], "equation.epsilon");
        if (cfg.gamma < 0.0 || cfg.epsilon < 0.0) bad("gamma and epsilon must be >= 0");
        if (eq.contains("f_modes")) cfg.f_modes = mode_list(eq["f_modes"], "equation.f_modes");
        if (eq.contains("noise")) {
            if (!eq["noise"].is_array()) bad("'equation.noise' must be an array of [k, a] pairs");
            for (const auto& e : eq["noise"]) {
                if (!e.is_array() || e.size() != 2) bad("'equation.noise' entries must be [k, a]");
                cfg.noise.push_back(
                    {integer(e[0], "equation.noise"), num(e[1], "equation.noise")});
            }
        }
    }

    if (!doc.contains("grid")) bad("missing required key 'grid.K'");
    {
        const auto& gr = doc["grid"];
        check_keys(gr, "grid.", {"K", "n"});
        if (!gr.contains("K")) bad("missing required key 'grid.K'");
        cfg.K = integer(gr["K"], "grid.K");
        if (cfg.K < 1) bad("grid.K must be >= 1");
        cfg.n = gr.contains("n") ? integer(gr["n"], "grid.n") : padded_size(2 * (cfg.K + 1));
        if (cfg.n < 2 * (cfg.K + 1) || cfg.n % 2 != 0) bad("grid.n must be even and >= 2(K+1)");
    }

    if (!doc.contains("solver")) bad("missing required key 'solver.dt'");
    {
        const auto& so = doc["solver"];
        check_keys(so, "solver.",
                   {"dt", "T", "burn_in", "sample_every", "seed", "nonlinearity"});
        if (!so.contains("dt")) bad("missing required key 'solver.dt'");
        if (!so.contains("T")) bad("missing required key 'solver.T'");
        cfg.dt = num(so["dt"], "solver.dt");
        cfg.T = num(so["T"], "solver.T");
        if (cfg.dt <= 0.0 || cfg.T <= 0.0) bad("solver.dt and solver.T must be > 0");
        if (so.contains("burn_in")) cfg.burn_in = num(so["burn_in"], "solver.burn_in");
        if (cfg.burn_in < 0.0 || cfg.burn_in >= cfg.T) bad("need 0 <= burn_in < T");
        if (so.contains("sample_every"))
            cfg.sample_every = integer(so["sample_every"], "solver.sample_every");
        if (cfg.sample_every < 1) bad("solver.sample_every must be >= 1");
        if (so.contains("seed")) {
            if (!so["seed"].is_number_unsigned() && !so["seed"].is_number_integer())
                bad("'solver.seed' must be an integer");
            cfg.seed = so["seed"].get<std::uint64_t>();
        }
        if (so.contains("nonlinearity")) {
            if (!so["nonlinearity"].is_boolean()) bad("'solver.nonlinearity' must be a boolean");
            cfg.nonlinearity = so["nonlinearity"].get<bool>();
        }
    }

    if (doc.contains("experiment")) {
        const auto& ex = doc["experiment"];
        check_keys(ex, "experiment.",
                   {"name", "lambda", "N", "c", "c0", "K_budget", "R", "beta", "eta0",
                    "alpha_bar", "q_bar", "fp_alpha_bar", "members", "u0_modes", "v0_modes",
                    "u0_list", "observables", "distance_k", "mode", "negative_control",
                    "threshold", "steady_threshold", "drift_tolerance", "batches", "fit_t0",
                    "fit_t1", "calibrate_n_max", "calibrate_seeds", "tail_fit", "tail_k_min"});
        if (ex.contains("name")) cfg.name = ex["name"].get<std::string>();
        if (ex.contains("lambda")) {
            if (ex["lambda"].is_string()) {
                if (ex["lambda"] != "auto") bad("experiment.lambda must be a number or \"auto\"");
            } else {
                cfg.lambda = num(ex["lambda"], "experiment.lambda");
            }
        }
        if (ex.contains("N")) {
            if (ex["N"].is_string()) {
                if (ex["N"] != "auto") bad("experiment.N must be an integer or \"auto\"");
            } else {
                cfg.N = integer(ex["N"], "experiment.N");
            }
        }
        if (ex.contains("c")) cfg.c = num(ex["c"], "experiment.c");
        if (ex.contains("c0")) cfg.c0 = num(ex["c0"], "experiment.c0");
        if (ex.contains("K_budget")) {
            if (ex["K_budget"].is_string()) {
                if (ex["K_budget"] != "inf") bad("experiment.K_budget must be a number or \"inf\"");
            } else {
                cfg.K_budget = num(ex["K_budget"], "experiment.K_budget");
                if (cfg.K_budget < 0.0) bad("experiment.K_budget must be >= 0");
            }
        }
        if (ex.contains("R")) cfg.R = num(ex["R"], "experiment.R");
        if (ex.contains("beta")) cfg.beta = num(ex["beta"], "experiment.beta");
        if (ex.contains("eta0")) cfg.functionals.eta0 = num(ex["eta0"], "experiment.eta0");
        if (ex.contains("alpha_bar"))
            for (auto it = ex["alpha_bar"].begin(); it != ex["alpha_bar"].end(); ++it)
                cfg.functionals.alpha_bar[std::stoi(it.key())] =
                    num(it.value(), "experiment.alpha_bar");
        if (ex.contains("q_bar"))
            for (auto it = ex["q_bar"].begin(); it != ex["q_bar"].end(); ++it)
                cfg.functionals.q_bar[std::stoi(it.key())] = num(it.value(), "experiment.q_bar");
        if (ex.contains("fp_alpha_bar"))
            cfg.functionals.fp_alpha_bar = num(ex["fp_alpha_bar"], "experiment.fp_alpha_bar");
        if (ex.contains("members")) cfg.members = integer(ex["members"], "experiment.members");
        if (cfg.members < 1) bad("experiment.members must be >= 1");
        if (ex.contains("u0_modes")) cfg.u0_modes = mode_list(ex["u0_modes"], "experiment.u0_modes");
        if (ex.contains("v0_modes")) cfg.v0_modes = mode_list(ex["v0_modes"], "experiment.v0_modes");
        if (ex.contains("u0_list")) {
            if (!ex["u0_list"].is_array()) bad("experiment.u0_list must be an array");
            for (const auto& e : ex["u0_list"])
                cfg.u0_list.push_back(mode_list(e, "experiment.u0_list"));
        }
        if (ex.contains("observables")) {
            cfg.observables.clear();
            for (const auto& e : ex["observables"]) cfg.observables.push_back(e.get<std::string>());
        }
        if (ex.contains("distance_k")) cfg.distance_k = integer(ex["distance_k"], "experiment.distance_k");
        if (ex.contains("mode")) cfg.det_mode = ex["mode"].get<std::string>();
        if (ex.contains("negative_control")) {
            if (!ex["negative_control"].is_boolean()) bad("experiment.negative_control must be a boolean");
            cfg.negative_control = ex["negative_control"].get<bool>();
        }
        if (ex.contains("threshold")) cfg.threshold = num(ex["threshold"], "experiment.threshold");
        if (ex.contains("steady_threshold"))
            cfg.steady_threshold = num(ex["steady_threshold"], "experiment.steady_threshold");
        if (ex.contains("drift_tolerance"))
            cfg.drift_tolerance = num(ex["drift_tolerance"], "experiment.drift_tolerance");
        if (ex.contains("batches")) cfg.batches = integer(ex["batches"], "experiment.batches");
        if (ex.contains("fit_t0")) cfg.fit_t0 = num(ex["fit_t0"], "experiment.fit_t0");
        if (ex.contains("fit_t1")) cfg.fit_t1 = num(ex["fit_t1"], "experiment.fit_t1");
        if (ex.contains("calibrate_n_max"))
            cfg.calibrate_n_max = integer(ex["calibrate_n_max"], "experiment.calibrate_n_max");
        if (ex.contains("calibrate_seeds"))
            cfg.calibrate_seeds = integer(ex["calibrate_seeds"], "experiment.calibrate_seeds");
        if (ex.contains("tail_fit")) {
            if (!ex["tail_fit"].is_boolean()) bad("experiment.tail_fit must be a boolean");
            cfg.tail_fit = ex["tail_fit"].get<bool>();
        }
        if (ex.contains("tail_k_min")) cfg.tail_k_min = integer(ex["tail_k_min"], "experiment.tail_k_min");
    }

    if (doc.contains("output")) {
        const auto& out = doc["output"];
        check_keys(out, "output.", {"dir", "formats", "final_state"});
        if (out.contains("dir")) cfg.out_dir = out["dir"].get<std::string>();
        if (out.contains("formats")) {
            cfg.write_csv = false;
            cfg.write_json = false;
            for (const auto& e : out["formats"]) {
                std::string f = e.get<std::string>();
                if (f == "csv")
                    cfg.write_csv = true;
                else if (f == "json")
                    cfg.write_json = true;
                else
                    bad("unknown output format '" + f + "'");
            }
        }
        if (out.contains("final_state")) {
            if (!out["final_state"].is_boolean()) bad("output.final_state must be a boolean");
            cfg.write_final_state = out["final_state"].get<bool>();
        }
    }

    // cross-field validation
    check_modes(cfg.f_modes, cfg.K, "equation.f_modes");
    check_modes(cfg.u0_modes, cfg.K, "experiment.u0_modes");
    check_modes(cfg.v0_modes, cfg.K, "experiment.v0_modes");
    for (const auto& ic : cfg.u0_list) check_modes(ic, cfg.K, "experiment.u0_list");
    {
        std::set<int> seen;
        for (const auto& ch : cfg.noise) {
            if (ch.k < 1 || ch.k > cfg.K) {
                std::ostringstream msg;
                msg << "noise channel k=" << ch.k << " exceeds grid K=" << cfg.K;
                bad(msg.str());
            }
            if (ch.amplitude < 0.0) bad("noise amplitudes must be >= 0");
            if (!seen.insert(ch.k).second) bad("duplicate noise channel k=" + std::to_string(ch.k));
        }
    }
    cfg.functionals.validate();

    // informational: the integrator treats dispersion exactly, but flag when
    // the per-step phase at the top mode wraps.
    double phase = cfg.dt * std::pow(static_cast<double>(cfg.K), 3);
    if (phase > 2.0 * std::numbers::pi) {
        std::ostringstream msg;
        msg << "dt*K^3 = " << phase
            << " exceeds 2*pi; dispersion phase wraps per step (linear part is still exact)";
        cfg.warnings.push_back(msg.str());
    }
    return cfg;
}

std::string config_echo(const RunConfig& cfg) {
    json j;
    json eq;
    eq["gamma"] = cfg.gamma;
    eq["epsilon"] = cfg.epsilon;
    json fm = json::array();
    for (const auto& [k, c] : cfg.f_modes) fm.push_back({k, c.real(), c.imag()});
    eq["f_modes"] = fm;
    json nz = json::array();
    for (const auto& ch : cfg.noise) nz.push_back({ch.k, ch.amplitude});
    eq["noise"] = nz;
    j["equation"] = eq;
    j["grid"] = {{"K", cfg.K}, {"n", cfg.n}};
    j["solver"] = {{"dt", cfg.dt},
                   {"T", cfg.T},
                   {"burn_in", cfg.burn_in},
                   {"sample_every", cfg.sample_every},
                   {"seed", cfg.seed},
                   {"nonlinearity", cfg.nonlinearity}};
    json ex;
    ex["name"] = cfg.name;
    if (cfg.lambda) ex["lambda"] = *cfg.lambda;
    if (cfg.N) ex["N"] = *cfg.N;
    ex["c"] = cfg.c;
    ex["c0"] = cfg.c0;
    if (std::isfinite(cfg.K_budget)) ex["K_budget"] = cfg.K_budget;
    ex["R"] = cfg.R;
    ex["beta"] = cfg.beta;
    ex["eta0"] = cfg.functionals.eta0;
    ex["members"] = cfg.members;
    j["experiment"] = ex;
    j["output"] = {{"dir", cfg.out_dir}};
    return j.dump();
}

}  // namespace kdv
