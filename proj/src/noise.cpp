#include "kdv/noise.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace kdv {

NoiseModel::NoiseModel(std::vector<NoiseChannel> channels) : channels_(std::move(channels)) {
    std::set<int> seen;
    for (const auto& ch : channels_) {
        if (ch.k < 1) fail(ErrorCode::validation, "noise channel wavenumber must be >= 1");
        if (ch.amplitude < 0.0) fail(ErrorCode::validation, "noise amplitude must be >= 0");
        if (!seen.insert(ch.k).second) fail(ErrorCode::validation, "duplicate noise channel");
    }
}

int NoiseModel::max_channel() const {
    int m = 0;
    for (const auto& ch : channels_) m = std::max(m, ch.k);
    return m;
}

double NoiseModel::l2_norm_sq() const {
    double s = 0.0;
    for (const auto& ch : channels_) s += ch.amplitude * ch.amplitude;
    return 2.0 * std::numbers::pi * s;
}

bool NoiseModel::covers(int N) const {
    for (int k = 1; k <= N; ++k)
        if (amplitude(k) <= 0.0) return false;
    return true;
}

double NoiseModel::amplitude(int k) const {
    for (const auto& ch : channels_)
        if (ch.k == k) return ch.amplitude;
    return 0.0;
}

double NoiseModel::min_covered_amplitude(int N) const {
    double m = 0.0;
    bool first = true;
    for (int k = 1; k <= N; ++k) {
        double a = amplitude(k);
        if (first || a < m) m = a;
        first = false;
    }
    return m;
}

SpectralField NoiseModel::sample_increment(const Grid& g, double dt, RngStream& rng) const {
    if (dt <= 0.0) fail(ErrorCode::validation, "noise increment requires dt > 0");
    SpectralField dw(g);
    const double root_dt = std::sqrt(dt);
    for (const auto& ch : channels_) {
        double xi1 = rng.normal();
        double xi2 = rng.normal();
        if (ch.k <= g.max_mode)
            dw.set_coeff(ch.k, Complex(0.5 * ch.amplitude * xi1, -0.5 * ch.amplitude * xi2) * root_dt);
    }
    return dw;
}

}  // namespace kdv
