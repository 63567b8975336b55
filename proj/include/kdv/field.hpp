// Mean-zero real periodic fields on (0, 2pi], stored as complex Fourier
// coefficients for k = 1..K with the convention
//
//     g(x) = 2 * sum_{k=1..K} Re( c_k e^{ikx} ),
//
// so c_k equals the classical coefficient (2pi)^{-1} \int e^{-ikx} g dx.
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "kdv/errors.hpp"

namespace kdv {

using Complex = std::complex<double>;

struct Grid {
    int max_mode = 0;     // K, retained wavenumbers 1..K
    int phys_points = 0;  // n, physical sampling resolution

    Grid() = default;
    Grid(int K, int n) : max_mode(K), phys_points(n) {
        if (K < 1) fail(ErrorCode::validation, "grid: max_mode must be >= 1");
        if (n < 2 * (K + 1) || n % 2 != 0)
            fail(ErrorCode::validation, "grid: phys_points must be even and >= 2*(K+1)");
    }
    friend bool operator==(const Grid&, const Grid&) = default;
};

class SpectralField {
  public:
    SpectralField() = default;
    explicit SpectralField(const Grid& g) : grid_(g), coeff_(static_cast<size_t>(g.max_mode)) {}

    static SpectralField zero(const Grid& g) { return SpectralField(g); }
    // entries: (k, c_k) with k in 1..K, no duplicates.
    static SpectralField from_modes(const Grid& g,
                                    const std::vector<std::pair<int, Complex>>& entries);

    const Grid& grid() const { return grid_; }
    int max_mode() const { return grid_.max_mode; }

    Complex coeff(int k) const { return coeff_[check(k)]; }
    void set_coeff(int k, Complex c) { coeff_[check(k)] = c; }
    const std::vector<Complex>& coeffs() const { return coeff_; }
    std::vector<Complex>& coeffs() { return coeff_; }

    bool finite() const;

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double s);
    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

  private:
    size_t check(int k) const {
        if (k < 1 || k > grid_.max_mode) fail(ErrorCode::index, "mode index out of range");
        return static_cast<size_t>(k - 1);
    }
    Grid grid_;
    std::vector<Complex> coeff_;
};

// D^m f: coefficient at k multiplied by (ik)^m.
SpectralField derivative(const SpectralField& f, int m);

// P_N: zero all coefficients with k > N.  project_high returns Q_N = 1 - P_N.
SpectralField project_low(const SpectralField& f, int N);
SpectralField project_high(const SpectralField& f, int N);

// <f,g>_{L^2} = \int f g dx = 4 pi sum_k Re(f_k conj(g_k)).
double l2_inner(const SpectralField& f, const SpectralField& g);

// ||D^m f||_{L^2};  m = 0 is the plain L^2 norm.
double sobolev_norm(const SpectralField& f, int m);

// Dealiased pseudo-spectral u*Du, truncated to modes 1..K.  The product is
// evaluated on an internal grid of >= 3K+2 points so the retained modes carry
// no aliasing.
SpectralField nonlinear_term(const SpectralField& u);

// Physical samples at x_j = 2 pi j / n.  n must be even with n >= 2(K+1).
std::vector<double> to_physical(const SpectralField& f, int n);
inline std::vector<double> to_physical(const SpectralField& f) {
    return to_physical(f, f.grid().phys_points);
}
SpectralField from_physical(const Grid& g, const std::vector<double>& samples);

// Smallest even 5-smooth integer >= m (FFT-friendly padding sizes).
int padded_size(int m);

// Trapezoid quadrature weight on n periodic samples: integral = (2pi/n) * sum.
inline double quad_weight(int n) { return 6.283185307179586476925286766559 / n; }

}  // namespace kdv
