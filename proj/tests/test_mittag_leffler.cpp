#include <qeuclid/mittag_leffler.hpp>

#include <support/ml_oracle.hpp>

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace qeuclid;
using cd = std::complex<double>;

namespace {

double mixed_error(cd a, cd b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

struct Rational {
    int p, q;
    double value() const { return static_cast<double>(p) / q; }
};

}  // namespace

TEST(MittagLeffler, ExponentialCase) {
    EXPECT_NEAR(ml_eval(MittagParams{1.0, 1.0}, 1.0), 2.718281828459045, 1e-15);
}

TEST(MittagLeffler, CosineCase) {
    const double x = std::numbers::pi / 2.0;
    EXPECT_NEAR(ml_eval(MittagParams{2.0, 1.0}, -x * x), 0.0, 1e-14);
}

TEST(MittagLeffler, HalfOrderErfcIdentity) {
    const double expected = 0.427583576155807;  // e erfc(1), from the MPFR series
    const double v = ml_eval(MittagParams{0.5, 1.0}, -1.0);
    EXPECT_NEAR(v, expected, 1e-10);
    EXPECT_NEAR(v, std::exp(1.0) * std::erfc(1.0), 1e-14);
    EXPECT_NEAR(oracle::mittag_leffler(1, 2, 1.0, 1.0, 2).real(), expected, 1e-14);
}

TEST(MittagLeffler, SecondKindExponential) {
    EXPECT_NEAR(ml_eval(MittagParams{1.0, 2.0}, 1.0), 1.718281828459045, 1e-14);
}

TEST(MittagLeffler, ExactIdentitiesOnTheLine) {
    for (double x = -10.0; x <= 10.0; x += 0.125) {
        const double e = std::exp(x);
        EXPECT_LE(std::abs(ml_eval(MittagParams{1.0, 1.0}, x) - e) / e, 1e-12) << x;
        EXPECT_LE(std::abs(ml_eval(MittagParams{2.0, 1.0}, -x * x) - std::cos(x)), 1e-12) << x;
    }
}

TEST(MittagLeffler, RejectsInvalidParameters) {
    EXPECT_THROW(ml_eval(MittagParams{0.0, 1.0}, 1.0), DomainError);
    EXPECT_THROW(ml_eval(MittagParams{2.5, 1.0}, 1.0), DomainError);
    EXPECT_THROW(ml_eval(MittagParams{0.5, -1.0}, 1.0), DomainError);
    EXPECT_THROW(ml_eval(MittagParams{0.5, 1.0}, cd(std::nan(""), 0.0)), DomainError);
}

TEST(MittagLeffler, AgreesWithHighPrecisionSeries) {
    const std::vector<Rational> alphas{{1, 2}, {7, 10}, {9, 10}, {1, 1}, {3, 2}, {19, 10}};
    const std::vector<double> radii{0.1, 0.5, 0.99, 1.01, 3.0, 7.0, 10.0, 20.0, 35.0, 50.0};
    for (const auto& a : alphas)
        for (double beta : {1.0, 2.0})
            for (int quarter : {2, 1}) {
                if (quarter == 1 && a.value() > 1.0) continue;
                const cd dir = quarter == 2 ? cd(-1.0, 0.0) : cd(0.0, 1.0);
                for (double r : radii) {
                    const cd ref = oracle::mittag_leffler(a.p, a.q, beta, r, quarter);
                    const cd got = ml_eval(MittagParams{a.value(), beta}, r * dir);
                    EXPECT_LE(mixed_error(got, ref), 1e-10)
                        << "alpha " << a.value() << " beta " << beta << " z " << r * dir;
                }
            }
}

TEST(MittagLeffler, SeamContinuity) {
    for (double a : {0.5, 0.9, 1.5})
        for (double beta : {1.0, 2.0}) {
            const MittagParams mp{a, beta};
            for (const cd dir : {cd(-1.0, 0.0), cd(0.0, 1.0)}) {
                if (dir.imag() != 0.0 && a > 1.0) continue;
                const double r = mp.series_radius;
                const cd inner = ml_eval(mp, r * (1.0 - 1e-12) * dir);
                const cd outer = ml_eval(mp, r * (1.0 + 1e-12) * dir);
                EXPECT_LE(std::abs(inner - outer), 1e-10) << "alpha " << a << " beta " << beta;
            }
        }
}

TEST(MittagLeffler, SeriesConsistencyInsideRadiusTwo) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const cd z(2.0 * U(rng), 2.0 * U(rng));
        if (std::abs(z) > 2.0) continue;
        for (double a : {0.5, 0.8, 1.3}) {
            MittagParams mp{a, 1.0};
            const cd direct = ml_series(z, a, 1.0);
            EXPECT_LE(std::abs(ml_eval(mp, z) - direct), 1e-12 * std::max(1.0, std::abs(direct))) << z;
        }
    }
}

TEST(MittagLeffler, TwoParameterRecurrence) {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> R(0.0, 30.0);
    std::uniform_real_distribution<double> A(0.2, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double a = A(rng), r = R(rng);
        const cd z = (i % 2 == 0) ? cd(-r, 0.0) : cd(0.0, r);
        for (double beta : {1.0, 2.0}) {
            const cd lhs = ml_eval(MittagParams{a, beta}, z);
            const cd rhs = z * ml_eval(MittagParams{a, a + beta}, z) + 1.0 / std::tgamma(beta);
            EXPECT_LE(mixed_error(lhs, rhs), 1e-10) << "alpha " << a << " z " << z;
        }
    }
}

TEST(MittagLeffler, CompletelyMonotoneDecay) {
    for (double a : {0.3, 0.6, 0.9, 1.0}) {
        double prev = 1.0;
        for (double x = 0.0; x <= 50.0; x += 0.25) {
            const double v = ml_eval(MittagParams{a, 1.0}, -x);
            EXPECT_GT(v, 0.0);
            EXPECT_LE(v, prev + 1e-15);
            prev = v;
        }
    }
}

TEST(BoundScan, ExponentialConstantIsOne) {
    EXPECT_NEAR(ml_bound_scan(MittagParams{1.0, 1.0}, Ray::NegativeReal, 50.0, 400), 1.0, 1e-12);
}

TEST(BoundScan, FiniteAndStableUnderRefinement) {
    for (double a : {0.5, 0.9, 1.5}) {
        const MittagParams mp{a, 1.0};
        const double c1 = ml_bound_scan(mp, Ray::NegativeReal, 50.0, 200);
        const double c2 = ml_bound_scan(mp, Ray::NegativeReal, 50.0, 400);
        EXPECT_TRUE(std::isfinite(c1));
        EXPECT_LE(std::abs(c1 - c2), 1e-3 * c2) << "alpha " << a;
        EXPECT_GE(c1, 1.0 / std::tgamma(1.0));
    }
}

TEST(BoundScan, OriginValueBelowConstant) {
    const MittagParams mp{0.7, 2.0};
    EXPECT_GE(ml_bound_scan(mp, Ray::NegativeReal, 20.0, 100), std::abs(ml_eval(mp, 0.0)));
    EXPECT_NEAR(ml_eval(mp, 0.0), 1.0 / std::tgamma(2.0), 1e-15);
}

TEST(BoundScan, ImaginaryRayOutsideSectorRejected) {
    EXPECT_THROW(ml_bound_scan(MittagParams{1.5, 1.0}, Ray::Imaginary, 10.0, 50), SectorError);
    EXPECT_NO_THROW(ml_bound_scan(MittagParams{0.8, 1.0}, Ray::Imaginary, 10.0, 50));
}
