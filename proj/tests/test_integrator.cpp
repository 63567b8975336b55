#include <doctest.h>

#include <numbers>

#include "kdv/integrator.hpp"
#include "kdv/series.hpp"
#include "test_helpers.hpp"

using namespace kdv;
using namespace kdvtest;

namespace {
constexpr double pi = std::numbers::pi;

SolverParams solver(double gamma, double dt, double eps = 0.0) {
    SolverParams p;
    p.gamma = gamma;
    p.epsilon = eps;
    p.dt = dt;
    return p;
}
}  // namespace

TEST_SUITE_BEGIN("integrator");

TEST_CASE("linear symbol") {
    CHECK(linear_symbol(2, 0.5, 0.0) == Complex(-0.5, 8.0));
    CHECK(linear_symbol(1, 0.0, 0.01) == Complex(-0.01, 1.0));
    CHECK(linear_symbol(3, 0.0, 0.0) == Complex(0.0, 27.0));
    CHECK_THROWS_AS(linear_symbol(0, 1.0, 0.0), Error);
}

TEST_CASE("phi functions match closed forms and limits") {
    for (Complex z : {Complex(0.8, -1.3), Complex(2.0, 0.0), Complex(0.0, 5.0)}) {
        CHECK(std::abs(phi1(z) - (std::exp(z) - 1.0) / z) < 1e-13);
        CHECK(std::abs(phi2(z) - (std::exp(z) - 1.0 - z) / (z * z)) < 1e-13);
        CHECK(std::abs(phi3(z) - (std::exp(z) - 1.0 - z - 0.5 * z * z) / (z * z * z)) < 1e-13);
    }
    // values at 0: 1, 1/2, 1/6
    CHECK(std::abs(phi1(Complex(0, 0)) - 1.0) < 1e-15);
    CHECK(std::abs(phi2(Complex(0, 0)) - 0.5) < 1e-15);
    CHECK(std::abs(phi3(Complex(0, 0)) - 1.0 / 6.0) < 1e-15);
    // continuity across the series/closed-form switch
    for (double r : {0.4999, 0.5001}) {
        Complex z(r, 0.1);
        CHECK(std::abs(phi3(z) - (std::exp(z) - 1.0 - z - 0.5 * z * z) / (z * z * z)) < 1e-12);
    }
}

TEST_CASE("pure linear step is the exact propagator") {
    Grid g(8, 20);
    SolverParams p = solver(0.7, 0.05);
    p.nonlinearity_on = false;
    RngStream rng(1);
    SpectralField u0 = random_field(g, rng);
    NoiseModel empty;
    TrajectoryRecord rec = integrate(u0, p, SpectralField::zero(g), empty, p.dt, {}, nullptr, true);
    for (int k = 1; k <= 8; ++k) {
        Complex expect = u0.coeff(k) * std::exp(p.dt * linear_symbol(k, p.gamma, 0.0));
        CHECK(std::abs(rec.final_state->coeff(k) - expect) < 1e-14);
    }
}

TEST_CASE("n-step linear composition matches the closed propagator") {
    Grid g(16, 40);
    SolverParams p = solver(0.3, 1e-3, 1e-6);
    p.nonlinearity_on = false;
    RngStream rng(4);
    SpectralField u0 = random_field(g, rng, 0.3);
    NoiseModel empty;
    TrajectoryRecord rec = integrate(u0, p, SpectralField::zero(g), empty, 2.0, {}, nullptr, true);
    for (int k = 1; k <= 16; ++k) {
        Complex expect = u0.coeff(k) * std::exp(2.0 * linear_symbol(k, p.gamma, p.epsilon));
        CHECK(std::abs(rec.final_state->coeff(k) - expect) < 1e-12);
    }
}

TEST_CASE("single step conserves the L2 norm to scheme accuracy") {
    Grid g(16, 48);
    SolverParams p = solver(0.0, 1e-4);
    NoiseModel empty;
    auto obs = make_observers({"l2"}, {});
    TrajectoryRecord rec =
        integrate(cos_mode(g, 1), p, SpectralField::zero(g), empty, p.dt, obs);
    CHECK(std::abs(rec.column("l2").back() - rec.column("l2").front()) <= 1e-10);
}

TEST_CASE("forced response from rest: u_1 = phi1(z) dt f for the linear flow") {
    Grid g(8, 20);
    SolverParams p = solver(1.0, 0.1);
    p.nonlinearity_on = false;
    SpectralField f = cos_mode(g, 1, 1.0);
    NoiseModel empty;
    TrajectoryRecord rec =
        integrate(SpectralField::zero(g), p, f, empty, p.dt, {}, nullptr, true);
    Complex expect = phi1(p.dt * linear_symbol(1, 1.0, 0.0)) * p.dt * Complex(0.5, 0.0);
    CHECK(std::abs(rec.final_state->coeff(1) - expect) < 1e-15);
}

TEST_CASE("exact L2 decay for f = sigma = 0") {
    Grid g(16, 48);
    NoiseModel empty;
    auto obs = make_observers({"l2"}, {});
    for (double gamma : {0.1, 1.0, 10.0}) {
        SolverParams p = solver(gamma, 1e-3);
        TrajectoryRecord rec = integrate(cos_mode(g, 1), p, SpectralField::zero(g), empty, 2.0, obs);
        const auto& l2 = rec.column("l2");
        for (size_t i = 0; i < rec.times.size(); ++i) {
            double expect = std::exp(-gamma * rec.times[i]) * l2.front();
            CHECK(std::abs(l2[i] - expect) <= 1e-6 * expect);
        }
    }
}

TEST_CASE("noise increment statistics") {
    Grid g(8, 20);
    NoiseModel empty;
    RngStream rng0(1);
    SpectralField none = empty.sample_increment(g, 0.1, rng0);
    for (int k = 1; k <= 8; ++k) CHECK(none.coeff(k) == Complex(0.0, 0.0));

    NoiseModel model({{1, 1.0}});
    RngStream rng(2024);
    const int draws = 100000;
    const double dt = 0.01;
    std::vector<double> sq(draws);
    double mean = 0.0;
    for (int i = 0; i < draws; ++i) {
        SpectralField dw = model.sample_increment(g, dt, rng);
        sq[static_cast<size_t>(i)] = l2_inner(dw, dw) / dt;
        mean += sq[static_cast<size_t>(i)];
    }
    mean /= draws;
    // E ||sigma dW||^2 / dt = ||sigma||^2 = 2 pi
    CHECK(std::abs(mean - 2.0 * pi) <= 0.02 * 2.0 * pi);

    // successive squared increments are uncorrelated
    double c = 0.0, var = 0.0;
    for (int i = 0; i + 1 < draws; ++i) {
        c += (sq[i] - mean) * (sq[i + 1] - mean);
        var += (sq[i] - mean) * (sq[i] - mean);
    }
    c /= (draws - 1);
    var /= (draws - 1);
    double se = var / std::sqrt(static_cast<double>(draws - 1));
    CHECK(std::abs(c) <= 3.0 * se);
}

TEST_CASE("noise-free runs ignore the seed; seeded runs are bit-identical") {
    Grid g(8, 20);
    NoiseModel empty;
    SpectralField f = cos_mode(g, 1);
    SolverParams p1 = solver(0.5, 1e-3);
    p1.seed = 1;
    SolverParams p2 = p1;
    p2.seed = 77;
    TrajectoryRecord a = integrate(cos_mode(g, 2), p1, f, empty, 0.5, {}, nullptr, true);
    TrajectoryRecord b = integrate(cos_mode(g, 2), p2, f, empty, 0.5, {}, nullptr, true);
    for (int k = 1; k <= 8; ++k) CHECK(a.final_state->coeff(k) == b.final_state->coeff(k));

    NoiseModel model({{1, 0.3}, {3, 0.2}});
    TrajectoryRecord c = integrate(cos_mode(g, 2), p1, f, model, 0.5, {}, nullptr, true);
    TrajectoryRecord d = integrate(cos_mode(g, 2), p1, f, model, 0.5, {}, nullptr, true);
    for (int k = 1; k <= 8; ++k) CHECK(c.final_state->coeff(k) == d.final_state->coeff(k));
    TrajectoryRecord e = integrate(cos_mode(g, 2), p2, f, model, 0.5, {}, nullptr, true);
    bool all_same = true;
    for (int k = 1; k <= 8; ++k)
        if (c.final_state->coeff(k) != e.final_state->coeff(k)) all_same = false;
    CHECK_FALSE(all_same);
}

TEST_CASE("blow-up raises a structured error") {
    Grid g(16, 48);
    SolverParams p = solver(0.0, 0.5);  // absurd step for an O(40) amplitude state
    NoiseModel empty;
    SpectralField huge = cos_mode(g, 1, 80.0);
    try {
        integrate(huge, p, SpectralField::zero(g), empty, 50.0, {});
        FAIL("expected blow-up");
    } catch (const BlowupError& e) {
        CHECK(e.step() >= 1);
        CHECK(e.time() > 0.0);
        CHECK(e.code() == ErrorCode::blowup);
    }
}

TEST_CASE("epsilon regularization is Cauchy as eps -> 0") {
    Grid g(24, 60);
    SpectralField f = cos_mode(g, 1);
    NoiseModel model({{1, 0.05}, {2, 0.05}});
    SpectralField u0 = SpectralField::from_modes(g, {{1, {0.5, 0.0}}, {3, {0.25, 0.0}}});
    auto run = [&](double eps) {
        SolverParams p = solver(0.5, 5e-4, eps);
        p.seed = 31;
        p.sample_every = 40;
        return integrate(u0, p, f, model, 0.5, make_observers({"h2"}, {}), nullptr, true);
    };
    // sup_t ||v^eps - v^{eps/2}||_{H2} decreases as eps halves
    std::vector<double> eps = {1e-2, 5e-3, 2.5e-3, 1.25e-3};
    std::vector<TrajectoryRecord> recs;
    for (double e : eps) recs.push_back(run(e));
    double d01 = sobolev_norm(*recs[0].final_state - *recs[1].final_state, 2);
    double d12 = sobolev_norm(*recs[1].final_state - *recs[2].final_state, 2);
    double d23 = sobolev_norm(*recs[2].final_state - *recs[3].final_state, 2);
    CHECK(d01 > d12);
    CHECK(d12 > d23);
}

TEST_CASE("pair with identical states stays identical under nudging") {
    Grid g(12, 28);
    SpectralField f = cos_mode(g, 1);
    NoiseModel model({{1, 0.1}, {2, 0.1}});
    SolverParams p = solver(0.5, 1e-3);
    p.seed = 5;
    SpectralField u0 = SpectralField::from_modes(g, {{1, {0.4, 0.0}}, {2, {0.0, -0.2}}});
    CoupledRecord rec = integrate_pair(u0, u0, CouplingSpec::make_nudged(2.0, 4), p, f, model, 1.0);
    for (double w : rec.w_h1) CHECK(w <= 1e-12);
}

TEST_CASE("lambda = 0 coupling degenerates to the independent copy") {
    Grid g(12, 28);
    SpectralField f = cos_mode(g, 1);
    NoiseModel model({{1, 0.1}, {2, 0.1}});
    SolverParams p = solver(0.5, 1e-3);
    p.seed = 6;
    SpectralField u0 = SpectralField::from_modes(g, {{1, {0.4, 0.0}}});
    SpectralField v0 = SpectralField::from_modes(g, {{2, {0.3, 0.0}}});
    CoupledRecord a = integrate_pair(u0, v0, CouplingSpec::make_nudged(0.0, 4), p, f, model, 0.5,
                                     {}, nullptr, true);
    CoupledRecord b = integrate_pair(u0, v0, CouplingSpec::independent(), p, f, model, 0.5, {},
                                     nullptr, true);
    for (int k = 1; k <= 12; ++k) {
        CHECK(a.final_u->coeff(k) == b.final_u->coeff(k));
        CHECK(a.final_v->coeff(k) == b.final_v->coeff(k));
    }
}

TEST_CASE("large damping: synchronous pairs contract at rate >= gamma/2") {
    Grid g(16, 48);
    double gamma = 20.0;
    SolverParams p = solver(gamma, 2e-4);
    p.seed = 9;
    p.sample_every = 50;
    SpectralField f = cos_mode(g, 1);
    NoiseModel model({{1, 0.05}, {2, 0.05}});
    SpectralField u0 = SpectralField::from_modes(g, {{1, {0.5, 0.0}}, {2, {0.25, 0.0}}});
    SpectralField v0 = SpectralField::from_modes(g, {{1, {-0.3, 0.2}}});
    CoupledRecord rec = integrate_pair(u0, v0, CouplingSpec::independent(), p, f, model, 1.0);
    std::vector<double> xs, ys;
    for (size_t i = 0; i < rec.times.size(); ++i)
        if (rec.times[i] >= 0.05 && rec.w_l2[i] > 0.0) {
            xs.push_back(rec.times[i]);
            ys.push_back(std::log(rec.w_l2[i]));
        }
    LineFit fit = fit_line(xs, ys);
    CHECK(fit.slope <= -gamma / 2.0);
}

TEST_SUITE_END();
