#include "kdv/field.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "kdv/fft.hpp"

namespace kdv {

namespace {
constexpr double four_pi = 4.0 * std::numbers::pi;

void require_same_grid(const SpectralField& a, const SpectralField& b) {
    if (!(a.grid() == b.grid())) fail(ErrorCode::validation, "fields live on different grids");
}
}  // namespace

SpectralField SpectralField::from_modes(const Grid& g,
                                        const std::vector<std::pair<int, Complex>>& entries) {
    SpectralField f(g);
    std::set<int> seen;
    for (const auto& [k, c] : entries) {
        if (k < 1 || k > g.max_mode) fail(ErrorCode::index, "from_modes: mode index out of range");
        if (!seen.insert(k).second) fail(ErrorCode::validation, "from_modes: duplicate mode index");
        f.set_coeff(k, c);
    }
    return f;
}

bool SpectralField::finite() const {
    for (const auto& c : coeff_)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    require_same_grid(*this, o);
    for (size_t i = 0; i < coeff_.size(); ++i) coeff_[i] += o.coeff_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    require_same_grid(*this, o);
    for (size_t i = 0; i < coeff_.size(); ++i) coeff_[i] -= o.coeff_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (auto& c : coeff_) c *= s;
    return *this;
}

SpectralField derivative(const SpectralField& f, int m) {
    if (m < 0) fail(ErrorCode::validation, "derivative order must be >= 0");
    if (m == 0) return f;
    SpectralField g = f;
    for (int k = 1; k <= f.max_mode(); ++k) {
        double km = std::pow(static_cast<double>(k), m);
        Complex ik_m;  // (ik)^m = k^m * i^m
        switch (m % 4) {
            case 0: ik_m = Complex(km, 0.0); break;
            case 1: ik_m = Complex(0.0, km); break;
            case 2: ik_m = Complex(-km, 0.0); break;
            default: ik_m = Complex(0.0, -km); break;
        }
        g.set_coeff(k, ik_m * f.coeff(k));
    }
    return g;
}

SpectralField project_low(const SpectralField& f, int N) {
    if (N < 0) fail(ErrorCode::validation, "projection level must be >= 0");
    SpectralField g = f;
    for (int k = N + 1; k <= f.max_mode(); ++k) g.set_coeff(k, Complex(0.0, 0.0));
    return g;
}

SpectralField project_high(const SpectralField& f, int N) {
    SpectralField g = f;
    for (int k = 1; k <= std::min(N, f.max_mode()); ++k) g.set_coeff(k, Complex(0.0, 0.0));
    return g;
}

double l2_inner(const SpectralField& f, const SpectralField& g) {
    require_same_grid(f, g);
    double s = 0.0;
    for (int k = 1; k <= f.max_mode(); ++k) {
        Complex a = f.coeff(k), b = g.coeff(k);
        s += a.real() * b.real() + a.imag() * b.imag();
    }
    return four_pi * s;
}

double sobolev_norm(const SpectralField& f, int m) {
    if (m < 0) fail(ErrorCode::validation, "Sobolev order must be >= 0");
    double s = 0.0;
    for (int k = 1; k <= f.max_mode(); ++k) {
        double w = std::pow(static_cast<double>(k), 2 * m);
        s += w * std::norm(f.coeff(k));
    }
    return std::sqrt(four_pi * s);
}

int padded_size(int m) {
    auto smooth = [](int v) {
        for (int p : {2, 3, 5})
            while (v % p == 0) v /= p;
        return v == 1;
    };
    int n = m + (m % 2);
    while (!smooth(n)) n += 2;
    return n;
}

SpectralField nonlinear_term(const SpectralField& u) {
    const int K = u.max_mode();
    const int np = padded_size(3 * K + 2);
    auto& wu = detail::workspace_for(np);

    // Du on the padded grid.
    SpectralField du = derivative(u, 1);
    wu.load_spectrum(du.coeffs());
    wu.synthesize();
    std::vector<double> dphys(wu.phys(), wu.phys() + np);

    wu.load_spectrum(u.coeffs());
    wu.synthesize();
    double* p = wu.phys();
    for (int j = 0; j < np; ++j) p[j] *= dphys[static_cast<size_t>(j)];

    SpectralField out(u.grid());
    wu.analyze(out.coeffs());
    return out;
}

std::vector<double> to_physical(const SpectralField& f, int n) {
    if (n < 2 * (f.max_mode() + 1) || n % 2 != 0)
        fail(ErrorCode::validation, "to_physical: n must be even and >= 2(K+1)");
    auto& w = detail::workspace_for(n);
    w.load_spectrum(f.coeffs());
    w.synthesize();
    return std::vector<double>(w.phys(), w.phys() + n);
}

SpectralField from_physical(const Grid& g, const std::vector<double>& samples) {
    const int n = static_cast<int>(samples.size());
    if (n < 2 * (g.max_mode + 1) || n % 2 != 0)
        fail(ErrorCode::validation, "from_physical: need even n >= 2(K+1) samples");
    auto& w = detail::workspace_for(n);
    std::copy(samples.begin(), samples.end(), w.phys());
    SpectralField f(g);
    w.analyze(f.coeffs());
    return f;
}

}  // namespace kdv
