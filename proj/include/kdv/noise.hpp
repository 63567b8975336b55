// Additive noise sigma dW = sum_k a_k (dW_k^c cos kx + dW_k^s sin kx).
// Each channel contributes two independent Brownian motions; the L^2 size is
// ||sigma||^2 = 2 pi sum_k a_k^2.
#pragma once

#include <vector>

#include "kdv/field.hpp"
#include "kdv/rng.hpp"

namespace kdv {

struct NoiseChannel {
    int k = 0;
    double amplitude = 0.0;
};

class NoiseModel {
  public:
    NoiseModel() = default;
    explicit NoiseModel(std::vector<NoiseChannel> channels);

    const std::vector<NoiseChannel>& channels() const { return channels_; }
    bool empty() const { return channels_.empty(); }
    int max_channel() const;

    double l2_norm_sq() const;  // ||sigma||^2_{L^2}

    // true iff every mode 1..N is forced with positive amplitude
    // (the range condition R(sigma) superset P_N L^2).
    bool covers(int N) const;
    // amplitude of mode k, 0 if unforced.
    double amplitude(int k) const;
    double min_covered_amplitude(int N) const;

    // sigma dW over a step of length dt: coeff(k) = (a_k/2)(xi1 - i xi2) sqrt(dt).
    SpectralField sample_increment(const Grid& g, double dt, RngStream& rng) const;

  private:
    std::vector<NoiseChannel> channels_;
};

}  // namespace kdv
