#include <qeuclid/nc_lebesgue.hpp>

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace qeuclid;

namespace {

const SingularProfile kSample{{3.0, 2.0, 1.0}, 0.5};

/// mu(t) = inf{ s >= 0 : n(s) <= t } with n(s) = c #{k : sigma_k > s}.
double mu_by_definition(double t, const SingularProfile& p) {
    std::vector<double> candidates{0.0};
    candidates.insert(candidates.end(), p.sigma.begin(), p.sigma.end());
    std::sort(candidates.begin(), candidates.end());
    for (double s : candidates) {
        int count = 0;
        for (double v : p.sigma)
            if (v > s) ++count;
        if (count * p.weight <= t) return s;
    }
    return candidates.back();
}

SingularProfile random_profile(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 5.0);
    std::uniform_int_distribution<int> len(1, 12);
    SingularProfile p;
    p.weight = 0.1 + U(rng) / 5.0;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) p.sigma.push_back(U(rng));
    std::sort(p.sigma.begin(), p.sigma.end(), std::greater<>());
    return p;
}

NcOperator from_matrix(Eigen::MatrixXcd k, double weight = 1.0) { return NcOperator{std::move(k), weight, nullptr}; }

Eigen::MatrixXcd random_psd(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> N;
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = cplx(N(rng), N(rng));
    return a.adjoint() * a / n;
}

}  // namespace

TEST(SingularProfile, DiagonalMatrix) {
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(3, 3);
    k(0, 0) = 1.0;
    k(1, 1) = 3.0;
    k(2, 2) = -2.0;
    const auto p = singular_profile(from_matrix(k, 0.5));
    ASSERT_EQ(p.sigma.size(), 3u);
    EXPECT_NEAR(p.sigma[0], 3.0, 1e-14);
    EXPECT_NEAR(p.sigma[1], 2.0, 1e-14);
    EXPECT_NEAR(p.sigma[2], 1.0, 1e-14);
    EXPECT_EQ(p.weight, 0.5);
}

TEST(SingularProfile, UnitaryHasUnitSingularValues) {
    std::mt19937_64 rng(11);
    const Eigen::MatrixXcd a = random_psd(rng, 6) + Eigen::MatrixXcd::Identity(6, 6);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    const Eigen::MatrixXcd q = qr.householderQ();
    for (double s : singular_profile(from_matrix(q)).sigma) EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(SingularProfile, QuantizedGaussianPlancherel) {
    const auto th = ThetaForm::canonical(2, 1.0);
    const GridSpec g = balanced_grid(th, 128);
    const RepSpace rep = RepSpace::matched(g, th, 128);
    const auto p = singular_profile(quantize(sample_symbol(SymbolSpec{}, g), th, rep));
    double s = 0.0;
    for (double v : p.sigma) s += p.weight * v * v;
    EXPECT_NEAR(s, std::numbers::pi, 1e-6);
}

TEST(SingularProfile, NonFiniteRejected) {
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Identity(2, 2);
    k(0, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(singular_profile(from_matrix(k)), NumericError);
}

TEST(Mu, StepValues) {
    EXPECT_EQ(mu(0.25, kSample), 3.0);
    EXPECT_EQ(mu(0.75, kSample), 2.0);
    EXPECT_EQ(mu(2.0, kSample), 0.0);
    EXPECT_EQ(mu(0.0, kSample), kSample.sigma.front());
    EXPECT_EQ(mu(1.0, SingularProfile{{}, 0.5}), 0.0);
    EXPECT_THROW(mu(-1.0, kSample), DomainError);
}

TEST(Mu, AgreesWithDefinitionOnRandomProfiles) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = random_profile(rng);
        for (double t = 0.0; t < p.weight * (p.sigma.size() + 2); t += p.weight / 7.0)
            EXPECT_EQ(mu(t, p), mu_by_definition(t, p)) << "t = " << t;
    }
}

TEST(Mu, NonIncreasingAndRightContinuous) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = random_profile(rng);
        double prev = std::numeric_limits<double>::infinity();
        for (double t = 0.0; t < p.weight * (p.sigma.size() + 1); t += p.weight / 13.0) {
            const double m = mu(t, p);
            EXPECT_LE(m, prev);
            prev = m;
        }
        for (std::size_t k = 0; k < p.sigma.size(); ++k) {
            const double corner = k * p.weight;
            EXPECT_EQ(mu(corner, p), mu(corner + 1e-9 * p.weight, p));
        }
    }
}

TEST(LpNorm, SampleProfile) {
    EXPECT_NEAR(lp_norm(kSample, 2.0), std::sqrt(7.0), 1e-15);
    EXPECT_EQ(lp_norm(kSample, std::numeric_limits<double>::infinity()), 3.0);
    EXPECT_THROW(lp_norm(kSample, 0.5), DomainError);
}

TEST(LpNorm, QuantizedSymbolMatchesL2) {
    const auto th = ThetaForm::canonical(2, 1.0);
    const GridSpec g = balanced_grid(th, 128);
    const RepSpace rep = RepSpace::matched(g, th, 128);
    SymbolSpec s;
    s.family = "modulated_gaussian";
    s.width = 1.2;
    s.frequency = {0.7, -0.3};
    const SymbolGrid f = sample_symbol(s, g);
    EXPECT_NEAR(lp_norm(quantize(f, th, rep), 2.0), f.l2_norm(), 1e-6);
}

TEST(LpNorm, LogConvexInterpolation) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const auto prof = random_profile(rng);
        const double inf = std::numeric_limits<double>::infinity();
        for (auto [p, q] : {std::pair{1.0, 2.0}, std::pair{1.5, 4.0}, std::pair{2.0, 3.0}}) {
            const double rhs = std::pow(lp_norm(prof, p), p / q) * std::pow(lp_norm(prof, inf), 1.0 - p / q);
            EXPECT_LE(lp_norm(prof, q), rhs * (1.0 + 1e-12));
        }
    }
}

TEST(LpNorm, CommutativePathIsGridNorm) {
    const GridSpec g(2, 6.0, 32);
    SymbolSpec s;
    s.width = 0.9;
    s.amplitude = 2.0;
    const SymbolGrid f = sample_symbol(s, g);
    const auto prof = singular_profile(f);
    for (double p : {1.0, 4.0 / 3.0, 2.0, 4.0}) {
        double acc = 0.0;
        for (const auto& v : f.values) acc += std::pow(std::abs(v), p) * g.cell_volume();
        EXPECT_NEAR(lp_norm(prof, p), std::pow(acc, 1.0 / p), 1e-14 * std::pow(acc, 1.0 / p));
    }
}

TEST(WeakNorm, SampleProfile) {
    EXPECT_DOUBLE_EQ(weak_lp_norm(kSample, 1.0), 2.0);
    EXPECT_EQ(weak_lp_norm(SingularProfile{{}, 1.0}, 2.0), 0.0);
}

TEST(WeakNorm, AgreesWithDenseSupremum) {
    // sup_t t^(1/p) mu(t) on a dense grid, using left limits at each t.
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const auto prof = random_profile(rng);
        for (double p : {1.0, 2.0, 3.0}) {
            double best = 0.0;
            const double end = prof.weight * (prof.sigma.size() + 1);
            for (double t = 1e-6; t <= end; t += prof.weight * 1e-4)
                best = std::max(best, std::pow(t, 1.0 / p) * mu_by_definition(t - 1e-12, prof));
            EXPECT_NEAR(weak_lp_norm(prof, p), best, 1e-3 * best);
        }
    }
}

TEST(WeakNorm, BoundedByStrongNorm) {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 200; ++trial) {
        const auto prof = random_profile(rng);
        for (double p : {1.0, 1.5, 2.0, 4.0}) EXPECT_LE(weak_lp_norm(prof, p), lp_norm(prof, p) * (1.0 + 1e-12));
    }
}

TEST(AbsPower, Diagonal) {
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(1, 1);
    k(0, 0) = 2.0;
    EXPECT_NEAR(abs_power(from_matrix(k), 3.0).kernel(0, 0).real(), 8.0, 1e-13);
}

TEST(AbsPower, UnitaryGivesIdentity) {
    std::mt19937_64 rng(12);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random_psd(rng, 5));
    const Eigen::MatrixXcd q = qr.householderQ();
    for (double p : {1.0, 2.5, 3.0, 4.0})
        EXPECT_LT((abs_power(from_matrix(q), p).kernel - Eigen::MatrixXcd::Identity(5, 5)).norm(), 1e-12);
}

TEST(AbsPower, SquareIsGramMatrix) {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> N;
    Eigen::MatrixXcd a(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) a(i, j) = cplx(N(rng), N(rng));
    const Eigen::MatrixXcd g = a.adjoint() * a;
    EXPECT_EQ((abs_power(from_matrix(a), 2.0).kernel - g).norm(), 0.0);
}

TEST(AbsPower, PowerDifferenceInequality) {
    // ||u^p - v^p||_2 <= c (||u||_2p^(p-1) + ||v||_2p^(p-1)) ||u - v||_2p with
    // the constant measured over 100 positive pairs.
    std::mt19937_64 rng(14);
    for (int p : {2, 3}) {
        double c = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const NcOperator u = from_matrix(random_psd(rng, 8)), v = from_matrix(random_psd(rng, 8));
            const double lhs =
                lp_norm(from_matrix(abs_power(u, p).kernel - abs_power(v, p).kernel), 2.0);
            const double rhs = (std::pow(lp_norm(u, 2.0 * p), p - 1) + std::pow(lp_norm(v, 2.0 * p), p - 1)) *
                               lp_norm(from_matrix(u.kernel - v.kernel), 2.0 * p);
            c = std::max(c, lhs / rhs);
        }
        EXPECT_TRUE(std::isfinite(c));
        EXPECT_LE(c, static_cast<double>(p)) << "p = " << p;
        if (p == 2) EXPECT_LE(c, 1.0 + 1e-12);
    }
}
