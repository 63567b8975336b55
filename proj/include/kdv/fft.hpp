// Internal real<->halfcomplex transform workspace.  One instance per
// (thread, size); not part of the public surface.
#pragma once

#include <vector>

#include "kdv/field.hpp"

namespace kdv::detail {

class Workspace {
  public:
    explicit Workspace(int n);
    ~Workspace();
    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;

    int size() const { return n_; }
    double* phys();

    // Fill the halfcomplex input with coeff (k = 1..K, zero elsewhere).
    void load_spectrum(const std::vector<Complex>& coeff);
    // c2r: phys()[j] = 2 sum_k Re(c_k e^{2 pi i jk/n}).
    void synthesize();
    // r2c followed by 1/n normalization into coeff_out (size K).
    void analyze(std::vector<Complex>& coeff_out);

  private:
    int n_;
    double* phys_ = nullptr;
    void* spec_ = nullptr;  // fftw_complex[n/2+1]
    void* fwd_ = nullptr;   // fftw_plan
    void* inv_ = nullptr;   // fftw_plan
};

Workspace& workspace_for(int n);

}  // namespace kdv::detail
