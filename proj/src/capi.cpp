#include "kdv.h"

#include <cstring>
#include <string>

#include "kdv/experiments.hpp"
#include "kdv/field.hpp"
#include "kdv/functionals.hpp"

namespace {

thread_local std::string g_last_error;

kdv_status code_of(const kdv::Error& e) {
    switch (e.code()) {
        case kdv::ErrorCode::validation: return KDV_ERR_VALIDATION;
        case kdv::ErrorCode::index: return KDV_ERR_INDEX;
        case kdv::ErrorCode::domain: return KDV_ERR_DOMAIN;
        case kdv::ErrorCode::capability: return KDV_ERR_CAPABILITY;
        case kdv::ErrorCode::config: return KDV_ERR_CONFIG;
        case kdv::ErrorCode::blowup: return KDV_ERR_BLOWUP;
        case kdv::ErrorCode::io: return KDV_ERR_IO;
    }
    return KDV_ERR_INTERNAL;
}

template <typename Fn>
kdv_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const kdv::Error& e) {
        g_last_error = e.what();
        return code_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return KDV_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return KDV_ERR_INTERNAL;
    }
}

}  // namespace

struct kdv_grid {
    kdv::Grid grid;
};

struct kdv_field {
    kdv::SpectralField field;
};

extern "C" {

const char* kdv_version(void) { return "kdv 1.0.0"; }

const char* kdv_last_error(void) { return g_last_error.c_str(); }

kdv_status kdv_grid_create(int max_mode, int phys_points, kdv_grid** out) {
    if (!out) {
        g_last_error = "null output pointer";
        return KDV_ERR_VALIDATION;
    }
    return guarded([&]() {
        int n = phys_points > 0 ? phys_points : kdv::padded_size(2 * (max_mode + 1));
        *out = new kdv_grid{kdv::Grid(max_mode, n)};
        return KDV_OK;
    });
}

void kdv_grid_destroy(kdv_grid* g) { delete g; }

kdv_status kdv_field_create(const kdv_grid* g, kdv_field** out) {
    if (!g || !out) {
        g_last_error = "null pointer";
        return KDV_ERR_VALIDATION;
    }
    return guarded([&]() {
        *out = new kdv_field{kdv::SpectralField::zero(g->grid)};
        return KDV_OK;
    });
}

void kdv_field_destroy(kdv_field* f) { delete f; }

kdv_status kdv_field_set_mode(kdv_field* f, int k, double re, double im) {
    if (!f) {
        g_last_error = "null field";
        return KDV_ERR_VALIDATION;
    }
    return guarded([&]() {
        f->field.set_coeff(k, kdv::Complex(re, im));
        return KDV_OK;
    });
}

kdv_status kdv_field_get_mode(const kdv_field* f, int k, double* re, double* im) {
    if (!f || !re || !im) {
        g_last_error = "null pointer";
        return KDV_ERR_VALIDATION;
    }
    return guarded([&]() {
        kdv::Complex c = f->field.coeff(k);
        *re = c.real();
        *im = c.imag();
        return KDV_OK;
    });
}

kdv_status kdv_field_derivative(const kdv_field* f, int order, kdv_field* out) {
    if (!f || !out) {
        g_last_error = "null pointer";
        return KDV_ERR_VALIDATION;
    }
    return guarded([&]() {
        out->field = kdv::derivative(f->field, order);
        return KDV_OK;
    });
}

kdv_status kdv_field_project_low(const kdv_field* f, int n_modes, kdv_field* out) {
    if (!f || !out) {
        g_last_error = "null pointer";
        return KDV_ERR_VALIDATION;
    }
    return guarded([&]() {
        out->field = kdv::project_low(f->field, n_modes);
        return KDV_OK;
    });
}

kdv_status kdv_field_l2_inner(const kdv_field* a, const kdv_field* b, double* out) {
    if (!a || !b || !out) {
        g_last_error = "null pointer";
        return KDV_ERR_VALIDATION;
    }
    return guarded([&]() {
        *out = kdv::l2_inner(a->field, b->field);
        return KDV_OK;
    });
}

kdv_status kdv_field_sobolev_norm(const kdv_field* f, int order, double* out) {
    if (!f || !out) {
        g_last_error = "null pointer";
        return KDV_ERR_VALIDATION;
    }
    return guarded([&]() {
        *out = kdv::sobolev_norm(f->field, order);
        return KDV_OK;
    });
}

kdv_status kdv_field_nonlinear_term(const kdv_field* f, kdv_field* out) {
    if (!f || !out) {
        g_last_error = "null pointer";
        return KDV_ERR_VALIDATION;
    }
    return guarded([&]() {
        out->field = kdv::nonlinear_term(f->field);
        return KDV_OK;
    });
}

kdv_status kdv_invariant(const kdv_field* f, int m, double* out) {
    if (!f || !out) {
        g_last_error = "null pointer";
        return KDV_ERR_VALIDATION;
    }
    return guarded([&]() {
        *out = kdv::invariant_value(f->field, m);
        return KDV_OK;
    });
}

kdv_status kdv_modified_invariant(const kdv_field* f, int m, double alpha_bar, double q_bar,
                                  double* out) {
    if (!f || !out) {
        g_last_error = "null pointer";
        return KDV_ERR_VALIDATION;
    }
    return guarded([&]() {
        kdv::FunctionalParams p;
        p.alpha_bar[m] = alpha_bar;
        p.q_bar[m] = q_bar;
        *out = kdv::modified_invariant(f->field, m, p);
        return KDV_OK;
    });
}

kdv_status kdv_run(const char* command, const kdv_run_options* options,
                   char** summary_json_out) {
    if (!command || !options) {
        g_last_error = "null command or options";
        return KDV_ERR_VALIDATION;
    }
    std::string cmd = command;
    return guarded([&]() -> kdv_status {
        kdv::RunConfig cfg;
        if (options->config_json) {
            cfg = kdv::parse_config(options->config_json);
        } else if (cmd == "verify") {
            // verify runs self-contained; give it a minimal valid config
            cfg = kdv::parse_config(R"({"grid":{"K":8},"solver":{"dt":0.001,"T":1.0}})");
        } else {
            g_last_error = "command '" + cmd + "' requires a configuration document";
            return KDV_ERR_VALIDATION;
        }
        if (options->has_seed) cfg.seed = options->seed;
        std::string out_dir = options->out_dir ? options->out_dir : cfg.out_dir;
        int threads = options->threads > 0 ? options->threads : 1;

        kdv::RunResult result;
        try {
            result = kdv::run_command(cmd, cfg, out_dir, threads);
        } catch (const kdv::BlowupError& e) {
            g_last_error = e.what();
            return KDV_ERR_BLOWUP;
        }
        if (summary_json_out) {
            *summary_json_out = new char[result.summary_json.size() + 1];
            std::memcpy(*summary_json_out, result.summary_json.c_str(),
                        result.summary_json.size() + 1);
        }
        if (!result.checks_passed) {
            g_last_error = "one or more checks failed; see summary";
            return KDV_ERR_CHECK_FAILED;
        }
        return KDV_OK;
    });
}

void kdv_string_free(char* s) { delete[] s; }

}  // extern "C"
