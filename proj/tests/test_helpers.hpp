// Shared test utilities: random band-limited fields and brute-force oracles
// kept independent of the library's pseudo-spectral path.
#pragma once

#include <cmath>
#include <complex>

#include "kdv/field.hpp"
#include "kdv/rng.hpp"

namespace kdvtest {

using kdv::Complex;
using kdv::Grid;
using kdv::SpectralField;

inline SpectralField random_field(const Grid& g, kdv::RngStream& rng, double decay = 1.0,
                                  double target_norm = 1.0, int norm_order = 0) {
    SpectralField f(g);
    for (int k = 1; k <= g.max_mode; ++k)
        f.set_coeff(k, Complex(rng.normal(), rng.normal()) * std::pow(k, -decay));
    double nrm = kdv::sobolev_norm(f, norm_order);
    if (nrm > 0.0) f *= target_norm / nrm;
    return f;
}

// g(x) from the coefficient definition, no FFT involved.
inline double eval_field(const SpectralField& f, double x) {
    double s = 0.0;
    for (int k = 1; k <= f.max_mode(); ++k) {
        Complex c = f.coeff(k);
        s += 2.0 * (c.real() * std::cos(k * x) - c.imag() * std::sin(k * x));
    }
    return s;
}

// u Du as a direct convolution over all signed mode pairs.
inline SpectralField convolution_oracle(const SpectralField& u) {
    const int K = u.max_mode();
    SpectralField out(u.grid());
    auto signed_coeff = [&](int k) -> Complex {
        if (k > 0) return u.coeff(k);
        if (k < 0) return std::conj(u.coeff(-k));
        return {0.0, 0.0};
    };
    for (int m = 1; m <= K; ++m) {
        Complex acc(0.0, 0.0);
        for (int k1 = -K; k1 <= K; ++k1) {
            int k2 = m - k1;
            if (k1 == 0 || k2 == 0 || std::abs(k2) > K) continue;
            acc += signed_coeff(k1) * Complex(0.0, k2) * signed_coeff(k2);
        }
        out.set_coeff(m, acc);
    }
    return out;
}

inline SpectralField cos_mode(const Grid& g, int k, double amplitude = 1.0) {
    return SpectralField::from_modes(g, {{k, Complex(0.5 * amplitude, 0.0)}});
}

inline SpectralField sin_mode(const Grid& g, int k, double amplitude = 1.0) {
    return SpectralField::from_modes(g, {{k, Complex(0.0, -0.5 * amplitude)}});
}

}  // namespace kdvtest
