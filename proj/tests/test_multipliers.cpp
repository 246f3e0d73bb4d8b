#include <qeuclid/validation.hpp>

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace qeuclid;
using qeuclid::detail::random_input;

namespace {

struct Rep {
    ThetaForm theta = ThetaForm::canonical(2, 1.0);
    GridSpec grid;
    RepSpace rep;
    explicit Rep(int m = 64) : grid(balanced_grid(theta, m)), rep(RepSpace::matched(grid, theta, m)) {}
};

const Rep& shared() {
    static const Rep r;
    return r;
}

/// Exact supremum of t Vol{|g| >= t}^(1/r) over all levels: it is attained
/// at one of the sampled magnitudes.
double brute_force_quasinorm(const SymbolGrid& g, double r_inv) {
    std::vector<double> a;
    for (const auto& v : g.values) a.push_back(std::abs(v));
    std::sort(a.begin(), a.end());
    double best = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        const auto first = std::lower_bound(a.begin(), a.end(), a[i]);
        best = std::max(best, a[i] * std::pow((a.end() - first) * g.spec.cell_volume(), r_inv));
    }
    return best;
}

SymbolGrid bump(const GridSpec& g, double radius, double amp = 1.0) {
    SymbolSpec s;
    s.family = "bump";
    s.radius = radius;
    s.amplitude = amp;
    return sample_symbol(s, g);
}

}  // namespace

TEST(ApplyMultiplier, IdentityLeavesSymbolUnchanged) {
    const auto& r = shared();
    std::mt19937_64 rng(1);
    const SymbolGrid f = random_input(rng, r.grid);
    const SymbolGrid g = apply_multiplier(MultiplierSymbol::identity(), f);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(g[i], f[i]);
}

TEST(ApplyMultiplier, CoordinateSymbolIsDerivative) {
    const auto& r = shared();
    std::mt19937_64 rng(2);
    const SymbolGrid f = random_input(rng, r.grid);
    std::vector<double> x(2);
    for (int j = 0; j < 2; ++j) {
        SymbolGrid expected(r.grid);
        for (std::size_t i = 0; i < f.size(); ++i) {
            r.grid.point(i, x);
            expected[i] = cplx(0.0, x[j]) * f[i];
        }
        const auto lhs = quantize(apply_multiplier(MultiplierSymbol::coordinate(j), f), r.theta, r.rep).kernel;
        const auto rhs = quantize(expected, r.theta, r.rep).kernel;
        EXPECT_LT((lhs - rhs).norm(), 1e-13 * rhs.norm());
    }
}

TEST(ApplyMultiplier, OperatorSideAgreesWithSymbolSide) {
    const auto& r = shared();
    SymbolSpec s;
    s.width = 1.2;
    const SymbolGrid f = sample_symbol(s, r.grid);
    const NcOperator x = quantize(f, r.theta, r.rep);
    const auto via_operator = apply_multiplier(MultiplierSymbol::coordinate(1), x, r.theta, r.rep).kernel;
    const auto via_symbol = quantize(apply_multiplier(MultiplierSymbol::coordinate(1), f), r.theta, r.rep).kernel;
    EXPECT_LT((via_operator - via_symbol).norm(), 1e-8 * via_symbol.norm());
}

TEST(ApplyMultiplier, BoundedSymbolContractsL2) {
    const auto& r = shared();
    std::mt19937_64 rng(3);
    const auto g = MultiplierSymbol::function("cos", [](std::span<const double> xi) {
        return cplx(std::cos(xi[0] * xi[1]), 0.0) * 0.9;
    });
    for (int i = 0; i < 20; ++i) {
        const SymbolGrid f = random_input(rng, r.grid);
        EXPECT_LE(apply_multiplier(g, f).l2_norm(), f.l2_norm());
    }
}

TEST(ApplyMultiplier, ShapeMismatchRejected) {
    const auto g = MultiplierSymbol::from_grid(SymbolGrid(GridSpec(2, 4.0, 16)));
    EXPECT_THROW(apply_multiplier(g, SymbolGrid(GridSpec(2, 4.0, 32))), ShapeError);
}

TEST(WeakQuasinorm, PowerDecayGivesBallVolume) {
    // g = |xi|^(-d/r) with d = 2, 1/r = 1/2: t Vol{g >= t}^(1/2) = sqrt(pi) for all t.
    const GridSpec grid(2, 8.0, 512);
    const double h = grid.spacing();
    const SymbolGrid g = sample_symbol(
        [h](std::span<const double> xi) { return cplx(1.0 / std::max(std::hypot(xi[0], xi[1]), 0.5 * h)); }, grid);
    // Levels whose superlevel disc spans fewer than 4000 cells are dominated by
    // the lattice and are excluded.
    WeakQuasinormOptions opt;
    opt.min_cells = 4000;
    const auto w = weak_symbol_quasinorm(g, 0.5, opt);
    EXPECT_FALSE(w.unbounded);
    EXPECT_NEAR(w.value, std::sqrt(unit_ball_volume(2)), 0.01 * std::sqrt(std::numbers::pi));
}

TEST(WeakQuasinorm, CompactBumpAttainsInteriorSup) {
    const GridSpec grid(2, 4.0, 128);
    const SymbolGrid g = bump(grid, 2.0);
    const auto w = weak_symbol_quasinorm(g, 0.5);
    EXPECT_FALSE(w.unbounded);
    EXPECT_GT(w.argsup, 0.0);
    EXPECT_LT(w.argsup, g.max_abs());
    const double exact = brute_force_quasinorm(g, 0.5);
    EXPECT_NEAR(w.value, exact, 1e-12 * exact);
}

TEST(WeakQuasinorm, ConstantSymbolIsUnbounded) {
    const SymbolGrid g = MultiplierSymbol::constant(2.0).sample(GridSpec(2, 4.0, 32));
    EXPECT_TRUE(weak_symbol_quasinorm(g, 0.5).unbounded);
}

TEST(WeakQuasinorm, PositivelyHomogeneous) {
    const GridSpec grid(2, 4.0, 64);
    const SymbolGrid g = bump(grid, 1.5);
    const double base = weak_symbol_quasinorm(g, 0.25).value;
    for (double c : {0.5, 3.0, 17.0})
        EXPECT_NEAR(weak_symbol_quasinorm(cplx(c) * g, 0.25).value, c * base, 1e-12 * c * base);
}

TEST(WeakQuasinorm, MonotoneInTheSymbol) {
    const GridSpec grid(2, 4.0, 64);
    const SymbolGrid small = bump(grid, 1.2), large = bump(grid, 1.8);
    for (double r_inv : {0.25, 0.5, 0.75})
        EXPECT_LE(weak_symbol_quasinorm(small, r_inv).value, weak_symbol_quasinorm(large, r_inv).value);
}

TEST(HormanderBound, PlancherelCase) {
    const auto& r = shared();
    const auto g = MultiplierSymbol::function("gauss", [](std::span<const double> xi) {
        return cplx(std::exp(-(xi[0] * xi[0] + xi[1] * xi[1])));
    });
    const SymbolGrid gs = g.sample(r.grid);
    const auto hb = hormander_bound(gs, 2.0, 2.0);
    EXPECT_NEAR(hb.bound, gs.max_abs(), 1e-15);
    std::mt19937_64 rng(4);
    for (int i = 0; i < 10; ++i)
        EXPECT_LE(multiplier_ratio(g, random_input(rng, r.grid), 2.0, 2.0, r.theta, r.rep), hb.bound + 1e-6);
}

TEST(HormanderBound, HeatSymbolOnRandomInputs) {
    const auto& r = shared();
    const auto g = MultiplierSymbol::function("gauss", [](std::span<const double> xi) {
        return cplx(std::exp(-(xi[0] * xi[0] + xi[1] * xi[1])));
    });
    const double p = 4.0 / 3.0, q = 4.0;
    const SymbolGrid gs = g.sample(r.grid);
    const auto hb = hormander_bound(gs, p, q);
    ASSERT_FALSE(hb.unbounded);
    const double constant = symbol_lr_norm(gs, hb.r_inv) / hb.bound;
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i)
        EXPECT_LE(multiplier_ratio(g, random_input(rng, r.grid), p, q, r.theta, r.rep), hb.bound * constant);
}

TEST(HormanderBound, ZeroSymbol) {
    const auto& r = shared();
    const auto g = MultiplierSymbol::constant(0.0);
    EXPECT_EQ(hormander_bound(g.sample(r.grid), 4.0 / 3.0, 4.0).bound, 0.0);
    std::mt19937_64 rng(6);
    EXPECT_EQ(quantize(apply_multiplier(g, random_input(rng, r.grid)), r.theta, r.rep).kernel.norm(), 0.0);
}

TEST(HormanderBound, ExponentRangeEnforced) {
    const SymbolGrid g(GridSpec(2, 4.0, 16));
    EXPECT_THROW(hormander_bound(g, 1.0, 4.0), DomainError);
    EXPECT_THROW(hormander_bound(g, 3.0, 4.0), DomainError);
    EXPECT_THROW(hormander_bound(g, 1.5, 1.8), DomainError);
}

TEST(PropagatorConstant, EqualExponentsGiveOne) {
    EXPECT_DOUBLE_EQ(m_t_closed_form(2, 1.0, 3.0, 2.0, 2.0, 2.0), 1.0);
    const GridSpec g(2, 6.0, 128);
    EXPECT_NEAR(m_t(MultiplierSymbol::laplacian().sample(g), 1.0, 3.0, 2.0, 2.0).value, 1.0, 1e-6);
}

TEST(PropagatorConstant, LaplacianClosedForm) {
    for (double t : {0.5, 1.0, 10.0})
        EXPECT_NEAR(m_t_closed_form(2, 1.0, t, 4.0 / 3.0, 4.0, 2.0), 0.5 * std::sqrt(std::numbers::pi / t), 1e-15);
}

TEST(PropagatorConstant, GridAgreesWithClosedForm) {
    for (double t : {1.0, 10.0, 100.0}) {
        const GridSpec g(2, 3.0 / std::sqrt(t), 512);
        const MtResult r = m_t(MultiplierSymbol::laplacian().sample(g), 1.0, t, 4.0 / 3.0, 4.0);
        EXPECT_FALSE(r.truncated);
        const double c = m_t_closed_form(2, 1.0, t, 4.0 / 3.0, 4.0, 2.0);
        EXPECT_NEAR(r.value, c, 0.02 * c) << "t = " << t;
    }
}

TEST(PropagatorConstant, ScalingLaw) {
    const double p = 1.5, q = 3.0, lambda = 1.0, alpha = 0.8, kappa = 1.0 / p - 1.0 / q;
    const double t = 2.0;
    for (double c : {2.0, 10.0}) {
        const double ratio =
            m_t_closed_form(2, alpha, c * t, p, q, lambda) / m_t_closed_form(2, alpha, t, p, q, lambda);
        EXPECT_NEAR(ratio, std::pow(c, -2.0 * alpha * kappa / lambda), 1e-14);
        const GridSpec g1(2, 3.0 * std::pow(t, -alpha / lambda), 512);
        const GridSpec g2(2, 3.0 * std::pow(c * t, -alpha / lambda), 512);
        const auto sigma = MultiplierSymbol::power(lambda);
        const double grid_ratio =
            m_t(sigma.sample(g2), alpha, c * t, p, q).value / m_t(sigma.sample(g1), alpha, t, p, q).value;
        EXPECT_NEAR(grid_ratio, ratio, 0.02 * ratio);
    }
}

TEST(PropagatorConstant, SideConditionViolation) {
    EXPECT_THROW(m_t_closed_form(2, 1.0, 1.0, 1.1, 10.0, 1.0), AssumptionError);
    EXPECT_THROW(m_t_closed_form(2, 1.0, 0.0, 1.5, 3.0, 2.0), DomainError);
}
