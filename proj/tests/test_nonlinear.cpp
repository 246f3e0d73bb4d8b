#include <qeuclid/nonlinear.hpp>
#include <qeuclid/validation.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace qeuclid;
using qeuclid::detail::amplitude_along;
using qeuclid::detail::projector_symbol;
using qeuclid::detail::random_input;

namespace {

const ThetaForm kTheta = ThetaForm::canonical(2, 1.0);

GridSpec small_grid() { return balanced_grid(kTheta, 32); }

PicardProblem heat_problem(double eta, int n = 32) {
    PicardProblem pr;
    pr.kind = PicardKind::Heat;
    pr.u0 = projector_symbol(balanced_grid(kTheta, n), 1.0);
    pr.theta = kTheta;
    pr.h = TimeFunction::constant(eta);
    return pr;
}

// x'' = eta x^2 with x(0) = x0, x'(0) = 0, sampled every `every` RK4 steps.
std::vector<double> rk4_wave(double eta, double x0, double T, int nodes, int every) {
    const int total = nodes * every;
    const double dt = T / total;
    double x = x0, v = 0.0;
    std::vector<double> out{x};
    auto acc = [eta](double y) { return eta * y * y; };
    for (int s = 1; s <= total; ++s) {
        const double k1x = v, k1v = acc(x);
        const double k2x = v + 0.5 * dt * k1v, k2v = acc(x + 0.5 * dt * k1x);
        const double k3x = v + 0.5 * dt * k2v, k3v = acc(x + 0.5 * dt * k2x);
        const double k4x = v + dt * k3v, k4v = acc(x + dt * k3x);
        x += dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
        v += dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
        if (s % every == 0) out.push_back(x);
    }
    return out;
}

}  // namespace

TEST(TimeFunction, ClosedFormNormsMatchQuadrature) {
    for (double e : {0.3, 0.5, 1.0, 2.5}) {
        const auto closed = TimeFunction::power_decay(e);
        const auto quad = TimeFunction::custom("q", [e](double t) { return std::pow(1.0 + t, -e); });
        for (double T : {0.5, 3.0, 10.0}) EXPECT_NEAR(closed.l2_norm(T), quad.l2_norm(T), 1e-9) << e << " " << T;
    }
    EXPECT_DOUBLE_EQ(TimeFunction::constant(2.0).l2_norm(4.0), 4.0);
    EXPECT_EQ(TimeFunction::zero().l2_norm(5.0), 0.0);
    EXPECT_THROW(TimeFunction::constant(-1.0), DomainError);
    EXPECT_THROW(TimeFunction::constant(1.0).l2_norm(-1.0), DomainError);
}

TEST(PicardProblem, ValidationRejectsBadInputs) {
    auto pr = heat_problem(0.05);
    EXPECT_NO_THROW(pr.validate());
    auto bad = pr;
    bad.p = 1;
    EXPECT_THROW(bad.validate(), DomainError);
    bad = pr;
    bad.T = 0.0;
    EXPECT_THROW(bad.validate(), DomainError);
    bad = pr;
    bad.steps = 1;
    EXPECT_THROW(bad.validate(), DomainError);
    bad = pr;
    bad.theta = ThetaForm::zero(2);
    EXPECT_THROW(bad.validate(), DomainError);
    bad = pr;
    bad.u1 = pr.u0;
    EXPECT_THROW(bad.validate(), DomainError);
    bad = pr;
    bad.constants.c = 1.0;
    EXPECT_THROW(bad.validate(), DomainError);
    bad = pr;
    bad.constants.delta = 0.5;
    EXPECT_THROW(bad.validate(), DomainError);
}

TEST(Window, HeatFormulaExample) {
    EXPECT_NEAR(t_star_heat(std::sqrt(2.0), 1.0, 2, 1.0, 1.0), 1.0, 1e-15);
    EXPECT_NEAR(t_star_heat(std::sqrt(2.0), 1.0, 2, 1.0, 2.0), 0.5, 1e-15);
    EXPECT_NEAR(t_star_heat(std::sqrt(2.0), 1.0, 3, 1.0, 2.0), 0.25, 1e-15);
    EXPECT_TRUE(std::isinf(t_star_heat(2.0, 1.0, 2, 0.0, 1.0)));
    EXPECT_THROW(t_star_heat(1.0, 1.0, 2, 1.0, 1.0), DomainError);
}

TEST(Window, WaveFormulaTakesWorstDatum) {
    const double a = t_star_wave(2.0, 1.0, 2, 1.0, 1.0, 0.0);
    EXPECT_NEAR(a, 1.0, 1e-15);
    const double b = t_star_wave(2.0, 1.0, 2, 1.0, 1.0, 2.0);
    EXPECT_NEAR(b, std::cbrt(0.25), 1e-15);
    EXPECT_TRUE(std::isinf(t_star_wave(2.0, 1.0, 2, 1.0, 0.0, 0.0)));
}

TEST(Window, EstimateIsAFixedPoint) {
    auto pr = heat_problem(0.05);
    const double ts = t_star_estimate(pr);
    const double hn = pr.h.l2_norm(ts);
    EXPECT_NEAR(t_star_heat(pr.constants.c, 1.0, 2, hn, pr.u0_norm()) / ts, 1.0, 1e-10);

    auto doubled = pr;
    doubled.u0 = 2.0 * pr.u0;
    // With h constant, T* = (1 / (eta ||u0||))^(2/3).
    EXPECT_NEAR(t_star_estimate(doubled) / ts, std::pow(0.5, 2.0 / 3.0), 1e-10);
}

TEST(Picard, ZeroNonlinearityKeepsData) {
    auto pr = heat_problem(0.05);
    pr.h = TimeFunction::zero();
    pr.T = 2.0;
    pr.steps = 20;
    const auto r = picard_heat(pr);
    ASSERT_TRUE(r.converged);
    for (const auto& s : r.states) EXPECT_LT((s - pr.u0).l2_norm(), 1e-14);

    auto pa = heat_problem(0.05);
    pa.A = MultiplierSymbol::constant(0.0);
    pa.T = 1.0;
    pa.steps = 20;
    const auto ra = picard_heat(pa);
    for (const auto& s : ra.states) EXPECT_LT((s - pa.u0).l2_norm(), 1e-14);

    PicardProblem w;
    w.kind = PicardKind::Wave;
    w.theta = kTheta;
    w.u0 = projector_symbol(small_grid(), 1.0);
    std::mt19937_64 rng(5);
    w.u1 = random_input(rng, small_grid());
    w.h = TimeFunction::zero();
    w.T = 3.0;
    w.steps = 30;
    const auto rw = picard_wave(w);
    for (std::size_t k = 0; k < rw.times.size(); ++k) {
        const SymbolGrid expect = w.u0 + cplx(rw.times[k]) * *w.u1;
        EXPECT_LT((rw.states[k] - expect).l2_norm(), 1e-13);
    }
}

// Positivity needs the 64-point grid: at 32 points the truncated projector
// picks up eigenvalues near -1e-6.
TEST(Picard, RankOneHeatMatchesRiccati) {
    auto pr = heat_problem(0.05, 64);
    pr.track_positivity = true;
    const double ts = t_star_estimate(pr);
    pr.T = 0.5 * ts;
    const auto r = picard_heat(pr);
    ASSERT_TRUE(r.converged);
    EXPECT_TRUE(r.contraction_certified);
    EXPECT_LT(r.contraction_factor, 1.0);
    EXPECT_GE(r.positivity_floor, -1e-10);
    const SymbolGrid P = pr.u0;
    for (std::size_t k = 0; k < r.times.size(); ++k)
        EXPECT_NEAR(amplitude_along(r.states[k], P), 1.0 / (1.0 - 0.05 * r.times[k]), 1e-5);
    EXPECT_LT(mild_residual(pr, r), 1e-8);
    for (const auto& row : r.certificate) EXPECT_LT(row.roundtrip_error, 1e-6);
}

TEST(Picard, RankOneWaveMatchesRk4) {
    PicardProblem pr;
    pr.kind = PicardKind::Wave;
    pr.theta = kTheta;
    const SymbolGrid P = projector_symbol(small_grid(), 1.0);
    pr.u0 = P;
    pr.h = TimeFunction::constant(0.05);
    pr.T = 0.5 * t_star_estimate(pr);
    const auto r = picard_wave(pr);
    ASSERT_TRUE(r.converged);
    const auto ref = rk4_wave(0.05, 1.0, pr.T, pr.steps, 50);
    ASSERT_EQ(ref.size(), r.times.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < r.times.size(); ++k)
        worst = std::max(worst, std::abs(amplitude_along(r.states[k], P) - ref[k]));
    EXPECT_LT(worst, 1e-5);
}

TEST(Picard, HorizonBeyondWindowNeedsOverride) {
    auto pr = heat_problem(0.05);
    pr.T = 2.0 * t_star_estimate(pr);
    EXPECT_THROW(picard_heat(pr), DomainError);
}

TEST(Picard, DivergesWellBeyondWindow) {
    auto pr = heat_problem(0.05);
    pr.T = 10.0 * t_star_estimate(pr);
    pr.override_window = true;
    EXPECT_THROW(picard_heat(pr), DivergenceError);
}

TEST(Picard, UniquenessProbe) {
    auto pr = heat_problem(0.05);
    const double ts = t_star_estimate(pr);
    pr.T = 0.5 * ts;
    const auto probe = uniqueness_probe(pr, 1e-3);
    EXPECT_FALSE(probe.skipped);
    EXPECT_LE(probe.gap, 1e-8);
    EXPECT_LE(uniqueness_probe(pr, 0.0).gap, 1e-12);

    pr.T = 1.5 * ts;
    pr.override_window = true;
    const auto outside = uniqueness_probe(pr, 1e-3);
    EXPECT_TRUE(outside.skipped);
    EXPECT_FALSE(outside.note.empty());
}

TEST(SmallData, MarginArithmetic) {
    PicardProblem pr;
    pr.kind = PicardKind::Wave;
    pr.theta = kTheta;
    pr.u0 = 0.1 * projector_symbol(small_grid(), 1.0);
    pr.h = TimeFunction::power_decay(2.5);
    pr.T = 10.0;
    const double gamma = 2.0, gamma0 = 0.25;
    const auto v = small_data_check(pr, gamma, gamma0);
    EXPECT_DOUBLE_EQ(v.gamma_tilde, 3.0 - 4.0 + 0.5);
    const double n = pr.u0_norm();
    const double expect = std::sqrt(2.0) * std::pow(10.0, gamma0 - v.gamma_tilde) - 2.0 * n * n;
    EXPECT_NEAR(v.margin, expect, 1e-12);
    EXPECT_TRUE(v.admissible);
    const double bis = small_data_threshold_bisect(pr.constants, 2, gamma, gamma0, 10.0);
    EXPECT_NEAR(bis / v.threshold, 1.0, 1e-8);

    pr.u0 = 1000.0 * pr.u0;
    const auto big = small_data_check(pr, gamma, gamma0);
    EXPECT_FALSE(big.admissible);
    EXPECT_LT(big.margin, 0.0);

    EXPECT_THROW(small_data_check(pr, 1.5, 0.1), HypothesisError);
    EXPECT_THROW(small_data_check(pr, 2.0, 0.6), HypothesisError);
    auto heat = heat_problem(0.05);
    EXPECT_THROW(small_data_check(heat, 2.0, 0.25), HypothesisError);
}

TEST(Nonlinearity, AbsoluteValueIsLipschitz) {
    const GridSpec g = small_grid();
    const RepSpace rep = RepSpace::matched(g, kTheta, g.n);
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const SymbolGrid a = random_input(rng, g), b = random_input(rng, g);
        const NcOperator X = quantize(a, kTheta, rep), Y = quantize(b, kTheta, rep);
        const SymbolGrid ax = dequantize(abs_power(X, 1), kTheta, rep);
        const SymbolGrid ay = dequantize(abs_power(Y, 1), kTheta, rep);
        worst = std::max(worst, (ax - ay).l2_norm() / (a - b).l2_norm());
    }
    EXPECT_LE(worst, std::sqrt(2.0));
}
