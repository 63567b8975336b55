// FFTW-backed transform workspaces.  Plan creation is serialized behind a
// mutex; every thread keeps its own buffers and plans so fftw_execute runs
// lock-free.
#include "kdv/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace kdv::detail {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

Workspace::Workspace(int n) : n_(n) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    phys_ = fftw_alloc_real(static_cast<size_t>(n));
    spec_ = fftw_alloc_complex(static_cast<size_t>(n / 2 + 1));
    fwd_ = fftw_plan_dft_r2c_1d(n, phys_, static_cast<fftw_complex*>(spec_), FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_1d(n, static_cast<fftw_complex*>(spec_), phys_, FFTW_ESTIMATE);
}

Workspace::~Workspace() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(inv_));
    fftw_free(phys_);
    fftw_free(spec_);
}

double* Workspace::phys() { return phys_; }

void Workspace::load_spectrum(const std::vector<Complex>& coeff) {
    auto* s = static_cast<fftw_complex*>(static_cast<void*>(spec_));
    const int nspec = n_ / 2 + 1;
    s[0][0] = 0.0;
    s[0][1] = 0.0;
    const int K = static_cast<int>(coeff.size());
    for (int k = 1; k < nspec; ++k) {
        if (k <= K) {
            s[k][0] = coeff[static_cast<size_t>(k - 1)].real();
            s[k][1] = coeff[static_cast<size_t>(k - 1)].imag();
        } else {
            s[k][0] = 0.0;
            s[k][1] = 0.0;
        }
    }
}

void Workspace::synthesize() { fftw_execute(static_cast<fftw_plan>(inv_)); }

void Workspace::analyze(std::vector<Complex>& coeff_out) {
    fftw_execute(static_cast<fftw_plan>(fwd_));
    const auto* s = static_cast<const fftw_complex*>(static_cast<const void*>(spec_));
    const double scale = 1.0 / n_;
    const int K = static_cast<int>(coeff_out.size());
    for (int k = 1; k <= K; ++k)
        coeff_out[static_cast<size_t>(k - 1)] = Complex(s[k][0] * scale, s[k][1] * scale);
}

Workspace& workspace_for(int n) {
    thread_local std::map<int, Workspace> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(std::piecewise_construct, std::forward_as_tuple(n), std::forward_as_tuple(n)).first;
    return it->second;
}

}  // namespace kdv::detail
