#pragma once

#include <qeuclid/errors.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

namespace qeuclid {

/// Parameters of E_{alpha,beta}.
///
/// `tolerance` is the target accuracy of the contour method. The series is
/// used for |z| <= series_radius; beyond that the function is obtained by
/// numerical inversion of its Laplace transform along an optimal parabolic
/// contour (Garrappa's method). Gamma values come from std::tgamma and
/// std::lgamma, which are accurate to a few ulp on the real axis.
struct MittagParams {
    double alpha = 1.0;
    double beta = 1.0;
    double tolerance = 1e-15;
    double series_radius = 1.0;
    /// Use exp/cosh/sinh identities for alpha in {1, 2}, beta in {1, 2}.
    bool use_closed_forms = true;

    void validate() const {
        if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("alpha must lie in (0, 2], got " + std::to_string(alpha));
        if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive");
        if (!(tolerance > 0.0 && tolerance < 1.0)) throw DomainError("tolerance must lie in (0, 1)");
        if (!(series_radius >= 0.0)) throw DomainError("series radius must be non-negative");
    }
};

namespace detail {

inline double inv_gamma(double x) {
    if (x <= 0.0 && x == std::floor(x)) return 0.0;
    if (x < 170.0) return 1.0 / std::tgamma(x);
    return std::exp(-std::lgamma(x));
}

struct ContourChoice {
    double mu = 0.0;
    double h = 0.0;
    double N = std::numeric_limits<double>::infinity();
};

constexpr double kLogEps = -36.043653389117154;  // log(DBL_EPSILON)

inline ContourChoice optimal_param_rb(double t, double phi_j, double phi_j1, double pj, double qj,
                                      double log_epsilon) {
    const double fac = 1.01;
    const double f_max = std::exp(log_epsilon - kLogEps);
    const double sq_j = std::sqrt(phi_j);
    const double threshold = 2.0 * std::sqrt((log_epsilon - kLogEps) / t);
    const double sq_j1 = std::min(std::sqrt(phi_j1), threshold - sq_j);

    double sqb_j = 0.0, sqb_j1 = 0.0, f_bar = 1.0;
    bool admissible = false;
    if (pj < 1e-14 && qj < 1e-14) {
        sqb_j = sq_j;
        sqb_j1 = sq_j1;
        admissible = true;
    } else if (pj < 1e-14) {
        sqb_j = sq_j;
        const double f_min = sq_j > 0.0 ? fac * std::pow(sq_j / (sq_j1 - sq_j), qj) : fac;
        if (f_min < f_max) {
            f_bar = f_min + f_min / f_max * (f_max - f_min);
            const double fq = std::pow(f_bar, -1.0 / qj);
            sqb_j1 = (2.0 * sq_j1 - fq * sq_j) / (2.0 + fq);
            admissible = true;
        }
    } else if (qj < 1e-14) {
        sqb_j1 = sq_j1;
        const double f_min = fac * std::pow(sq_j1 / (sq_j1 - sq_j), pj);
        if (f_min < f_max) {
            f_bar = f_min + f_min / f_max * (f_max - f_min);
            const double fp = std::pow(f_bar, -1.0 / pj);
            sqb_j = (2.0 * sq_j + fp * sq_j1) / (2.0 - fp);
            admissible = true;
        }
    } else {
        double f_min = fac * (sq_j + sq_j1) / std::pow(sq_j1 - sq_j, std::max(pj, qj));
        if (f_min < f_max) {
            f_min = std::max(f_min, 1.5);
            f_bar = f_min + f_min / f_max * (f_max - f_min);
            const double fp = std::pow(f_bar, -1.0 / pj);
            const double fq = std::pow(f_bar, -1.0 / qj);
            const double w = -phi_j1 * t / log_epsilon;
            const double den = 2.0 + w - (1.0 + w) * fp + fq;
            sqb_j = ((2.0 + w + fq) * sq_j + fp * sq_j1) / den;
            sqb_j1 = (-(1.0 + w) * fq * sq_j + (2.0 + w - (1.0 + w) * fp) * sq_j1) / den;
            admissible = true;
        }
    }
    ContourChoice c;
    if (!admissible) return c;
    const double le = log_epsilon - std::log(f_bar);
    const double w = -sqb_j1 * sqb_j1 * t / le;
    c.mu = std::pow(((1.0 + w) * sqb_j + sqb_j1) / (2.0 + w), 2);
    c.h = -2.0 * std::numbers::pi / le * (sqb_j1 - sqb_j) / ((1.0 + w) * sqb_j + sqb_j1);
    c.N = std::ceil(std::sqrt(1.0 - le / t / c.mu) / c.h);
    return c;
}

inline ContourChoice optimal_param_ru(double t, double phi_j, double pj, double log_epsilon) {
    const double sq_phi_j = std::sqrt(phi_j);
    double phib = phi_j > 0.0 ? phi_j * 1.01 : 0.01;
    double sqb = std::sqrt(phib);
    const double f_min = 1.0, f_max = 10.0, f_tar = 5.0;
    double N = 0.0, A = 0.0, sq_mu = 0.0;
    for (int guard = 0; guard < 1000; ++guard) {
        const double phi_t = phib * t;
        const double lept = log_epsilon / phi_t;
        N = std::ceil(phi_t / std::numbers::pi * (1.0 - 1.5 * lept + std::sqrt(1.0 - 2.0 * lept)));
        A = std::numbers::pi * N / phi_t;
        sq_mu = sqb * std::abs(4.0 - A) / std::abs(7.0 - std::sqrt(1.0 + 12.0 * A));
        const double fbar = std::pow((sqb - sq_phi_j) / sq_mu, -pj);
        if (pj < 1e-14 || (f_min < fbar && fbar < f_max)) break;
        sqb = std::pow(f_tar, -1.0 / pj) * sq_mu + sq_phi_j;
        phib = sqb * sqb;
    }
    ContourChoice c;
    c.mu = sq_mu * sq_mu;
    c.h = (-3.0 * A - 2.0 + 2.0 * std::sqrt(1.0 + 12.0 * A)) / (4.0 - A) / N;
    c.N = N;
    const double threshold = (log_epsilon - kLogEps) / t;
    if (c.mu > threshold) {
        const double Q = std::abs(pj) < 1e-14 ? 0.0 : std::pow(f_tar, -1.0 / pj) * std::sqrt(c.mu);
        phib = std::pow(Q + sq_phi_j, 2);
        if (phib < threshold) {
            const double w = std::sqrt(kLogEps / (kLogEps - log_epsilon));
            const double u = std::sqrt(-phib * t / kLogEps);
            c.mu = threshold;
            c.N = std::ceil(w * log_epsilon / 2.0 / std::numbers::pi / (u * w - 1.0));
            c.h = std::sqrt(kLogEps / (kLogEps - log_epsilon)) / c.N;
        } else {
            c.N = std::numeric_limits<double>::infinity();
            c.h = 0.0;
        }
    }
    return c;
}

}  // namespace detail

/// Truncated Taylor series. Intended for small |z|; `err` (optional)
/// receives a rounding estimate relative to the largest term.
inline std::complex<double> ml_series(std::complex<double> z, double alpha, double beta, double* err = nullptr) {
    std::complex<double> sum(0.0), zk(1.0);
    double biggest = 0.0;
    int small_run = 0;
    for (int k = 0; k < 2000; ++k) {
        const double arg = alpha * k + beta;
        std::complex<double> term;
        if (arg < 170.0) {
            term = zk * detail::inv_gamma(arg);
        } else {
            const double lz = std::log(std::abs(z));
            term = std::polar(std::exp(k * lz - std::lgamma(arg)), k * std::arg(z));
        }
        sum += term;
        biggest = std::max(biggest, std::abs(term));
        if (std::abs(term) <= 1e-17 * std::abs(sum) && arg > 2.0) {
            if (++small_run >= 3) break;
        } else {
            small_run = 0;
        }
        zk *= z;
        if (zk == 0.0 && k > 0) break;
    }
    if (err) *err = std::numeric_limits<double>::epsilon() * biggest;
    return sum;
}

/// Inversion of the Laplace transform s^(alpha - beta) / (s^alpha - z)
/// at t = 1 on an optimal parabolic contour, plus the residues of the poles
/// that lie to the right of the chosen contour.
inline std::complex<double> ml_laplace(std::complex<double> z, double alpha, double beta, double tolerance = 1e-15,
                                       double* achieved = nullptr) {
    using C = std::complex<double>;
    constexpr double pi = std::numbers::pi;
    if (std::abs(z) < 1e-15) {
        if (achieved) *achieved = tolerance;
        return C(detail::inv_gamma(beta));
    }
    const double t = 1.0;
    double log_epsilon = std::log(tolerance);

    const double theta = std::arg(z);
    const int kmin = static_cast<int>(std::ceil(-alpha / 2.0 - theta / (2.0 * pi)));
    const int kmax = static_cast<int>(std::floor(alpha / 2.0 - theta / (2.0 * pi)));
    struct Pole {
        C s;
        double phi;
    };
    std::vector<Pole> poles;
    for (int k = kmin; k <= kmax; ++k) {
        const C s = std::polar(std::pow(std::abs(z), 1.0 / alpha), (theta + 2.0 * k * pi) / alpha);
        const double phi = 0.5 * (s.real() + std::abs(s));
        if (phi > 1e-15) poles.push_back({s, phi});
    }
    std::stable_sort(poles.begin(), poles.end(), [](const Pole& a, const Pole& b) { return a.phi < b.phi; });

    std::vector<C> s_star{C(0.0)};
    std::vector<double> phi{0.0};
    for (const auto& p : poles) {
        s_star.push_back(p.s);
        phi.push_back(p.phi);
    }
    const std::size_t J1 = s_star.size();
    std::vector<double> pstr(J1, 1.0), qstr(J1, 1.0);
    pstr[0] = std::max(0.0, -2.0 * (alpha - beta + 1.0));
    qstr[J1 - 1] = std::numeric_limits<double>::infinity();
    phi.push_back(std::numeric_limits<double>::infinity());

    std::vector<std::size_t> regions;
    for (std::size_t j = 0; j < J1; ++j)
        if (phi[j] < (log_epsilon - detail::kLogEps) / t && phi[j] < phi[j + 1]) regions.push_back(j);
    if (regions.empty()) throw AccuracyError("no admissible contour region", 1.0);

    std::vector<detail::ContourChoice> choice(J1);
    for (;;) {
        for (std::size_t j : regions)
            choice[j] = j + 1 < J1 ? detail::optimal_param_rb(t, phi[j], phi[j + 1], pstr[j], qstr[j], log_epsilon)
                                   : detail::optimal_param_ru(t, phi[j], pstr[j], log_epsilon);
        double nmin = std::numeric_limits<double>::infinity();
        for (std::size_t j : regions) nmin = std::min(nmin, choice[j].N);
        if (nmin > 200.0) {
            log_epsilon += std::log(10.0);
            if (log_epsilon > 0.0) throw AccuracyError("contour parameters did not converge", 1.0);
        } else {
            break;
        }
    }
    std::size_t best = regions.front();
    for (std::size_t j : regions)
        if (choice[j].N < choice[best].N) best = j;
    const double mu = choice[best].mu, h = choice[best].h;
    const int N = static_cast<int>(choice[best].N);

    C integral(0.0);
    for (int k = -N; k <= N; ++k) {
        const double u = h * k;
        const C zz = mu * std::pow(C(1.0, u), 2);
        const C zd(-2.0 * mu * u, 2.0 * mu);
        const C F = std::pow(zz, alpha - beta) / (std::pow(zz, alpha) - z) * zd;
        integral += std::exp(zz * t) * F;
    }
    integral *= h / (2.0 * pi * C(0.0, 1.0));

    C residues(0.0);
    for (std::size_t j = best + 1; j < J1; ++j)
        residues += (1.0 / alpha) * std::pow(s_star[j], 1.0 - beta) * std::exp(t * s_star[j]);

    if (achieved) *achieved = std::exp(log_epsilon);
    C e = integral + residues;
    if (z.imag() == 0.0) e = C(e.real(), 0.0);
    return e;
}

/// E_{alpha,beta}(z) with automatic choice between the two regimes.
inline std::complex<double> ml_eval(const MittagParams& p, std::complex<double> z) {
    p.validate();
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("argument is not finite");
    if (p.use_closed_forms && (p.alpha == 1.0 || p.alpha == 2.0) && (p.beta == 1.0 || p.beta == 2.0)) {
        if (p.alpha == 1.0 && p.beta == 1.0) return std::exp(z);
        if (std::abs(z) > p.series_radius) {
            if (p.alpha == 1.0) return (std::exp(z) - 1.0) / z;
            const auto r = std::sqrt(z);
            return p.beta == 1.0 ? std::cosh(r) : std::sinh(r) / r;
        }
    }
    if (std::abs(z) <= p.series_radius) return ml_series(z, p.alpha, p.beta);
    double achieved = 0.0;
    const auto v = ml_laplace(z, p.alpha, p.beta, p.tolerance, &achieved);
    if (achieved > std::max(1e-10, p.tolerance))
        throw AccuracyError("contour method reached only " + std::to_string(achieved), achieved);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw AccuracyError("non-finite Mittag-Leffler value", std::numeric_limits<double>::infinity());
    return v;
}

inline double ml_eval(const MittagParams& p, double x) { return ml_eval(p, std::complex<double>(x, 0.0)).real(); }

enum class Ray { NegativeReal, Imaginary };

/// sup of |E_{alpha,beta}(z)| (1 + |z|) over z = r e^{i arg} on the ray,
/// r in {0} U log-spaced [1e-3, z_max], followed by golden-section
/// refinement around the best sample.
inline double ml_bound_scan(const MittagParams& p, Ray ray, double z_max, int samples) {
    p.validate();
    if (!(p.alpha < 2.0)) throw DomainError("the sector bound needs alpha < 2");
    if (!(z_max > 1e-3) || samples < 2) throw DomainError("scan needs z_max > 1e-3 and at least two samples");
    // Admissible rays satisfy |arg z| >= nu for some nu in [pi alpha / 2, min(pi, pi alpha)].
    if (ray == Ray::Imaginary && p.alpha > 1.0)
        throw SectorError("imaginary ray lies outside the admissible sector for alpha > 1");
    const std::complex<double> dir = ray == Ray::NegativeReal ? std::complex<double>(-1.0, 0.0)
                                                              : std::complex<double>(0.0, 1.0);
    auto g = [&](double r) { return std::abs(ml_eval(p, r * dir)) * (1.0 + r); };

    double best_r = 0.0, best = g(0.0);
    std::vector<double> rs(samples);
    const double l0 = std::log(1e-3), l1 = std::log(z_max);
    for (int i = 0; i < samples; ++i) {
        rs[i] = std::exp(l0 + (l1 - l0) * i / (samples - 1));
        const double v = g(rs[i]);
        if (v > best) {
            best = v;
            best_r = rs[i];
        }
    }
    if (best_r > 0.0) {
        auto it = std::lower_bound(rs.begin(), rs.end(), best_r);
        const std::size_t i = static_cast<std::size_t>(it - rs.begin());
        double lo = i > 0 ? rs[i - 1] : 0.0, hi = i + 1 < rs.size() ? rs[i + 1] : rs[i];
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
        double fa = g(a), fb = g(b);
        for (int it2 = 0; it2 < 60 && hi - lo > 1e-12 * std::max(1.0, hi); ++it2) {
            if (fa > fb) {
                hi = b;
                b = a;
                fb = fa;
                a = hi - gr * (hi - lo);
                fa = g(a);
            } else {
                lo = a;
                a = b;
                fa = fb;
                b = lo + gr * (hi - lo);
                fb = g(b);
            }
        }
        best = std::max({best, fa, fb});
    }
    if (!std::isfinite(best)) throw NumericError("bound scan produced a non-finite value");
    return best;
}

}  // namespace qeuclid
