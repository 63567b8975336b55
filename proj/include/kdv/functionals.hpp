// KdV integrals of motion I_0, I_1, I_2, their positivized modifications
// I_m^+ = I_m + abar_m (||v||^2+1)^{qbar_m}, the modified Hamiltonian
// I1t(w,u) = I_1(w) - \int u w^2 used by the synchronization estimates, and
// the rank calculus for lower-order monomials.
#pragma once

#include <boost/rational.hpp>
#include <map>
#include <vector>

#include "kdv/field.hpp"

namespace kdv {

using Rational = boost::rational<long long>;

struct FunctionalParams {
    // abar_m defaults to 10; qbar = (1, 2, 7/3).  The 7/3 exponent at m = 2
    // keeps exp(eta I_2^+(u)^{3/7}) integrable, which the coupling distance
    // d_k relies on.
    std::map<int, double> alpha_bar = {{0, 10.0}, {1, 10.0}, {2, 10.0}};
    std::map<int, double> q_bar = {{0, 1.0}, {1, 2.0}, {2, 7.0 / 3.0}};
    double fp_alpha_bar = 10.0;  // abar in I1t^+
    double eta0 = 0.1;           // weight in the coupling distance d_k

    double alpha(int m) const;
    double q(int m) const;
    void validate() const;
};

// I_0 = \int v^2,  I_1 = \int ((Dv)^2 - v^3/3),
// I_2 = \int ((D^2 v)^2 - (5/3) v (Dv)^2 + (5/36) v^4).
// Cubic/quartic integrands are evaluated by trapezoid quadrature on a padded
// grid of >= 4K+2 points, which integrates them exactly.
double invariant_value(const SpectralField& u, int m);

// I_m^+(u) = I_m(u) + abar_m (||u||^2 + 1)^{qbar_m}
double modified_invariant(const SpectralField& u, int m, const FunctionalParams& p);

// I1t^+(w,u) = \int ((Dw)^2 - w^3/3 - u w^2)
//              + abar (||w||^{10/3} + (1 + ||u||^2) ||w||^2).
// alpha_bar = 0 recovers the bare modified Hamiltonian I1t(w,u).
double fp_functional(const SpectralField& w, const SpectralField& u, double alpha_bar);

// Two-sided comparability of I_m^+ with its leading part:
//   1/2 (||D^m u||^2 + abar_m (||u||^2+1)^{qbar_m}) <= I_m^+ <= 3/2 (same).
bool sandwich_check(const SpectralField& u, int m, const FunctionalParams& p);

// Same sandwich for the Foias-Prodi functional I1t^+(w,u).
bool fp_sandwich_check(const SpectralField& w, const SpectralField& u, double alpha_bar);

// Double abar_m until sandwich_check passes on every calibration field
// (at most max_doublings rounds).  Returns the escalated parameters.
FunctionalParams escalate_alpha(const FunctionalParams& p, int m,
                                const std::vector<SpectralField>& calibration,
                                int max_doublings = 20);

// ---------------------------------------------------------------------------
// Rank calculus.  A multi-index beta = (beta_0..beta_k) stands for the
// monomial pi_beta(D_k v) = v^{b0} (Dv)^{b1} ... (D^k v)^{bk}.

struct MultiIndex {
    std::vector<int> beta;

    int order() const { return static_cast<int>(beta.size()) - 1; }  // k
    int total_degree() const;                                        // |beta|
    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
    friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

// rank(pi_beta) = sum_j (1 + j/2) beta_j, exact.
Rational monomial_rank(const MultiIndex& beta);

// All multi-indices in k+1 variables with rank exactly n.
std::vector<MultiIndex> enumerate_rank_monomials(int k, const Rational& n);

// The interpolation exponent r in ||pi_beta(D_k v)||_{L^1} <=
// c ||D^{k+2} v||^r ||v||^{|beta|-r}:
//   r = (2 rank - (3/2)|beta| - 1) / (k+2)        when beta_k >= 2,
//   r = (2 rank - (3/2)|beta| - beta_k/2) / (k+2) when beta_k in {0,1}.
// Requires rank(beta) <= k+4; always lands in [0, 2).
Rational interp_exponent(int k, const MultiIndex& beta);

// ||pi_beta(D_k v)||_{L^1} by quadrature (for the empirical interpolation
// checks; |.| is not band-limited so this is plain trapezoid on a fine grid).
double monomial_l1(const SpectralField& v, const MultiIndex& beta);

}  // namespace kdv
