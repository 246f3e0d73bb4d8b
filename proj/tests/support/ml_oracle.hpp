#pragma once

// Brute-force Mittag-Leffler series in MPFR arithmetic. The working
// precision is sized from the largest series term so that cancellation on
// the negative real and imaginary axes cannot reach the leading digits.

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <complex>

namespace oracle {

using mpf = boost::multiprecision::mpfr_float;

/// E_{p/q, beta}(z) for z = r * i^quarter (quarter = 0: positive real,
/// 1: imaginary, 2: negative real). The Gamma values of consecutive blocks
/// of q terms are linked by Gamma(x + p) = x (x+1) ... (x+p-1) Gamma(x).
inline std::complex<double> mittag_leffler(int p, int q, double beta, double r, int quarter) {
    const double alpha = static_cast<double>(p) / q;
    if (r == 0.0) return 1.0 / std::tgamma(beta);

    double peak = 0.0;
    int k_end = 0;
    for (int k = 0;; ++k) {
        const double lt = k * std::log(r) - std::lgamma(alpha * k + beta);
        peak = std::max(peak, lt);
        if (k > 10 && lt < peak - 200.0 && lt < -150.0) {
            k_end = k + q;
            break;
        }
    }
    const unsigned digits = static_cast<unsigned>(peak / std::log(10.0)) + 60;
    mpf::default_precision(digits);

    const mpf R(r);
    const mpf Rq = pow(R, q);
    std::vector<mpf> term(q);
    for (int j = 0; j < q; ++j) term[j] = pow(R, j) / boost::multiprecision::tgamma(mpf(p) * j / q + mpf(beta));

    // Accumulate by residue class of k mod 4 to apply i^(quarter k) at the end.
    mpf acc[4] = {0, 0, 0, 0};
    for (int k = 0; k < k_end; ++k) {
        const int j = k % q;
        const int cls = (quarter * k) % 4;
        acc[cls] += term[j];
        // Advance term[j] from index k to k + q.
        mpf den = 1;
        const mpf x = mpf(p) * k / q + mpf(beta);
        for (int i = 0; i < p; ++i) den *= (x + i);
        term[j] = term[j] * Rq / den;
    }
    // i^0 = 1, i^1 = i, i^2 = -1, i^3 = -i
    const mpf re = acc[0] - acc[2];
    const mpf im = acc[1] - acc[3];
    return {static_cast<double>(re), static_cast<double>(im)};
}

}  // namespace oracle
