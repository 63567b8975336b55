// Small statistics helpers: ordinary least squares on series, mean/standard
// error reductions, log-sum-exp.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "kdv/errors.hpp"

namespace kdv {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        fail(ErrorCode::validation, "fit_line needs two same-length series with >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) fail(ErrorCode::validation, "fit_line: degenerate abscissae");
    LineFit f;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.residual_rms = std::sqrt(ss / n);
    return f;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    size_t count = 0;
};

inline MeanSe mean_se(const std::vector<double>& v) {
    MeanSe m;
    m.count = v.size();
    if (v.empty()) return m;
    double s = 0.0;
    for (double x : v) s += x;
    m.mean = s / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - m.mean) * (x - m.mean);
        m.se = std::sqrt(ss / (static_cast<double>(v.size() - 1) * static_cast<double>(v.size())));
    }
    return m;
}

// log( (1/n) sum exp(x_i) ), stable under large x.
inline double log_mean_exp(const std::vector<double>& x) {
    if (x.empty()) fail(ErrorCode::validation, "log_mean_exp of empty set");
    double m = x[0];
    for (double v : x) m = std::max(m, v);
    double s = 0.0;
    for (double v : x) s += std::exp(v - m);
    return m + std::log(s / static_cast<double>(x.size()));
}

}  // namespace kdv
