#include "kdv/functionals.hpp"

#include <cmath>
#include <functional>

namespace kdv {

double FunctionalParams::alpha(int m) const {
    auto it = alpha_bar.find(m);
    if (it == alpha_bar.end()) fail(ErrorCode::capability, "no alpha_bar for requested order");
    return it->second;
}

double FunctionalParams::q(int m) const {
    auto it = q_bar.find(m);
    if (it == q_bar.end()) fail(ErrorCode::capability, "no q_bar for requested order");
    return it->second;
}

void FunctionalParams::validate() const {
    for (const auto& [m, a] : alpha_bar)
        if (a < 1.0) fail(ErrorCode::validation, "alpha_bar entries must be >= 1");
    for (const auto& [m, q] : q_bar)
        if (q < 1.0) fail(ErrorCode::validation, "q_bar entries must be >= 1");
    if (fp_alpha_bar < 1.0) fail(ErrorCode::validation, "fp_alpha_bar must be >= 1");
    if (eta0 <= 0.0) fail(ErrorCode::validation, "eta0 must be > 0");
}

namespace {

void require_m(int m) {
    if (m < 0 || m > 2)
        fail(ErrorCode::capability, "invariants are implemented for m in {0,1,2} only");
}

int quad_points(const SpectralField& u, int max_degree) {
    return padded_size(max_degree * u.max_mode() + 2);
}

}  // namespace

double invariant_value(const SpectralField& u, int m) {
    require_m(m);
    const int n = quad_points(u, m == 2 ? 4 : 3);
    const double w = quad_weight(n);
    if (m == 0) {
        auto v = to_physical(u, n);
        double s = 0.0;
        for (double x : v) s += x * x;
        return w * s;
    }
    if (m == 1) {
        auto v = to_physical(u, n);
        auto dv = to_physical(derivative(u, 1), n);
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += dv[j] * dv[j] - v[j] * v[j] * v[j] / 3.0;
        return w * s;
    }
    auto v = to_physical(u, n);
    auto dv = to_physical(derivative(u, 1), n);
    auto d2v = to_physical(derivative(u, 2), n);
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
        double v2 = v[j] * v[j];
        s += d2v[j] * d2v[j] - (5.0 / 3.0) * v[j] * dv[j] * dv[j] + (5.0 / 36.0) * v2 * v2;
    }
    return w * s;
}

double modified_invariant(const SpectralField& u, int m, const FunctionalParams& p) {
    require_m(m);
    double l2sq = l2_inner(u, u);
    return invariant_value(u, m) + p.alpha(m) * std::pow(l2sq + 1.0, p.q(m));
}

double fp_functional(const SpectralField& w, const SpectralField& u, double alpha_bar) {
    if (!(w.grid() == u.grid())) fail(ErrorCode::validation, "fp_functional: grid mismatch");
    const int n = quad_points(w, 3);
    const double qw = quad_weight(n);
    auto wp = to_physical(w, n);
    auto dwp = to_physical(derivative(w, 1), n);
    auto up = to_physical(u, n);
    double s = 0.0;
    for (int j = 0; j < n; ++j)
        s += dwp[j] * dwp[j] - wp[j] * wp[j] * wp[j] / 3.0 - up[j] * wp[j] * wp[j];
    double w_l2sq = l2_inner(w, w);
    double u_l2sq = l2_inner(u, u);
    return qw * s +
           alpha_bar * (std::pow(w_l2sq, 5.0 / 3.0) + (1.0 + u_l2sq) * w_l2sq);
}

bool sandwich_check(const SpectralField& u, int m, const FunctionalParams& p) {
    if (m < 1 || m > 2) fail(ErrorCode::capability, "sandwich_check supports m in {1,2}");
    double dm = sobolev_norm(u, m);
    double l2sq = l2_inner(u, u);
    double lead = dm * dm + p.alpha(m) * std::pow(l2sq + 1.0, p.q(m));
    double val = modified_invariant(u, m, p);
    return 0.5 * lead <= val && val <= 1.5 * lead;
}

bool fp_sandwich_check(const SpectralField& w, const SpectralField& u, double alpha_bar) {
    double dw = sobolev_norm(w, 1);
    double w_l2sq = l2_inner(w, w);
    double u_l2sq = l2_inner(u, u);
    double lead = dw * dw +
                  alpha_bar * (std::pow(w_l2sq, 5.0 / 3.0) + (1.0 + u_l2sq) * w_l2sq);
    double val = fp_functional(w, u, alpha_bar);
    return 0.5 * lead <= val && val <= 1.5 * lead;
}

FunctionalParams escalate_alpha(const FunctionalParams& p, int m,
                                const std::vector<SpectralField>& calibration,
                                int max_doublings) {
    FunctionalParams out = p;
    for (int round = 0; round < max_doublings; ++round) {
        bool all_ok = true;
        for (const auto& u : calibration)
            if (!sandwich_check(u, m, out)) {
                all_ok = false;
                break;
            }
        if (all_ok) return out;
        out.alpha_bar[m] *= 2.0;
    }
    fail(ErrorCode::validation, "alpha_bar escalation did not stabilize the sandwich");
}

// ---------------------------------------------------------------------------

int MultiIndex::total_degree() const {
    int s = 0;
    for (int b : beta) s += b;
    return s;
}

Rational monomial_rank(const MultiIndex& mi) {
    Rational r(0);
    for (size_t j = 0; j < mi.beta.size(); ++j) {
        if (mi.beta[j] < 0) fail(ErrorCode::validation, "multi-index entries must be >= 0");
        r += Rational(2 + static_cast<long long>(j), 2) * mi.beta[j];
    }
    return r;
}

std::vector<MultiIndex> enumerate_rank_monomials(int k, const Rational& n) {
    if (k < 0 || n < 0) fail(ErrorCode::validation, "enumerate_rank_monomials: k, n must be >= 0");
    std::vector<MultiIndex> out;
    MultiIndex cur;
    cur.beta.assign(static_cast<size_t>(k) + 1, 0);
    std::function<void(int, Rational)> rec = [&](int j, Rational remaining) {
        if (j == k) {
            // remaining = (1 + k/2) beta_k must have an exact solution.
            Rational unit(2 + k, 2);
            Rational q = remaining / unit;
            if (q.denominator() == 1 && q.numerator() >= 0) {
                cur.beta[static_cast<size_t>(k)] = static_cast<int>(q.numerator());
                out.push_back(cur);
            }
            return;
        }
        Rational unit(2 + j, 2);
        for (int b = 0; Rational(b) * unit <= remaining; ++b) {
            cur.beta[static_cast<size_t>(j)] = b;
            rec(j + 1, remaining - Rational(b) * unit);
        }
        cur.beta[static_cast<size_t>(j)] = 0;
    };
    rec(0, n);
    return out;
}

Rational interp_exponent(int k, const MultiIndex& mi) {
    if (mi.order() != k) fail(ErrorCode::validation, "interp_exponent: multi-index has wrong length");
    Rational rank = monomial_rank(mi);
    if (rank > Rational(k + 4))
        fail(ErrorCode::domain, "interp_exponent requires rank(beta) <= k+4");
    int bk = mi.beta.back();
    Rational num = 2 * rank - Rational(3, 2) * mi.total_degree();
    if (bk >= 2)
        num -= 1;
    else
        num -= Rational(bk, 2);
    return num / (k + 2);
}

double monomial_l1(const SpectralField& v, const MultiIndex& mi) {
    const int k = mi.order();
    const int n = v.grid().phys_points;
    std::vector<std::vector<double>> derivs;
    derivs.reserve(static_cast<size_t>(k) + 1);
    for (int j = 0; j <= k; ++j) derivs.push_back(to_physical(derivative(v, j), n));
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        double prod = 1.0;
        for (int j = 0; j <= k; ++j)
            for (int b = 0; b < mi.beta[static_cast<size_t>(j)]; ++b)
                prod *= derivs[static_cast<size_t>(j)][static_cast<size_t>(i)];
        s += std::abs(prod);
    }
    return quad_weight(n) * s;
}

}  // namespace kdv
