#pragma once

#include <qeuclid/mittag_leffler.hpp>
#include <qeuclid/multipliers.hpp>

#include <atomic>
#include <map>
#include <mutex>
#include <thread>

namespace qeuclid {

enum class EquationKind { Heat, Schrodinger, Wave };

inline const char* to_string(EquationKind k) {
    switch (k) {
        case EquationKind::Heat: return "heat";
        case EquationKind::Schrodinger: return "schrodinger";
        case EquationKind::Wave: return "wave";
    }
    return "?";
}

/// Linear Caputo problem on the symbol side:
///   heat         D^alpha u = -sigma u                 0 < alpha <= 1
///   schrodinger  i D^alpha u + sigma u = 0            0 < alpha <= 1
///   wave         D^alpha u = -sigma u, u'(0) = u1     1 <  alpha < 2
struct EvolutionProblem {
    EquationKind kind = EquationKind::Heat;
    double alpha = 1.0;
    MultiplierSymbol sigma = MultiplierSymbol::laplacian();
    SymbolGrid u0;
    std::optional<SymbolGrid> u1;
    ThetaForm theta = ThetaForm::zero(2);
    double p = 2.0;
    double q = 2.0;
    std::vector<double> times;

    void validate() const {
        switch (kind) {
            case EquationKind::Heat:
            case EquationKind::Schrodinger:
                if (!(alpha > 0.0 && alpha <= 1.0))
                    throw DomainError(std::string(to_string(kind)) + " problem needs 0 < alpha <= 1");
                break;
            case EquationKind::Wave:
                if (!(alpha > 1.0 && alpha < 2.0)) throw DomainError("wave problem needs 1 < alpha < 2");
                break;
        }
        if (theta.dim() != u0.spec.d) throw ShapeError("deformation dimension does not match initial data");
        if (u1) u0.check_same(*u1);
        for (double t : times)
            if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time samples must be finite and non-negative");
    }
};

struct NormRecord {
    double t = 0.0;
    double norm_q = 0.0;
    double m_t = 0.0;
    double bound_ratio = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<SymbolGrid> states;
    std::vector<NormRecord> norms;
};

namespace detail {

/// Distinct sigma values with a map from grid nodes to them, so that each
/// propagator value is evaluated once per time.
struct SigmaTable {
    std::vector<double> values;
    std::vector<std::size_t> index;

    explicit SigmaTable(const SymbolGrid& sigma) {
        std::vector<std::pair<double, std::size_t>> tmp(sigma.size());
        for (std::size_t i = 0; i < sigma.size(); ++i) tmp[i] = {sigma[i].real(), i};
        std::sort(tmp.begin(), tmp.end());
        index.resize(sigma.size());
        for (const auto& [v, i] : tmp) {
            if (values.empty() || v != values.back()) values.push_back(v);
            index[i] = values.size() - 1;
        }
    }
};

inline std::complex<double> ml_at(const MittagParams& mp, std::complex<double> z, double t, double s) {
    try {
        return ml_eval(mp, z);
    } catch (const AccuracyError& e) {
        throw AccuracyError(std::string(e.what()) + " at t=" + std::to_string(t) + ", sigma=" + std::to_string(s),
                            e.achieved);
    }
}

}  // namespace detail

/// Evaluates the closed-form solution at every requested time.
inline Trajectory solve(const EvolutionProblem& prob) {
    prob.validate();
    const SymbolGrid sig = prob.sigma.sample_positive(prob.u0.spec);
    const detail::SigmaTable table(sig);
    Trajectory tr;
    tr.times = prob.times;
    const MittagParams p1{prob.alpha, 1.0}, p2{prob.alpha, 2.0};
    const bool has_u1 = prob.kind == EquationKind::Wave && prob.u1.has_value();
    for (double t : prob.times) {
        if (t == 0.0) {
            tr.states.push_back(prob.u0);
            continue;
        }
        const double ta = std::pow(t, prob.alpha);
        std::vector<cplx> e1(table.values.size()), e2;
        if (has_u1) e2.resize(table.values.size());
        for (std::size_t k = 0; k < table.values.size(); ++k) {
            const double s = table.values[k];
            const cplx z = prob.kind == EquationKind::Schrodinger ? cplx(0.0, ta * s) : cplx(-ta * s, 0.0);
            e1[k] = detail::ml_at(p1, z, t, s);
            if (has_u1) e2[k] = t * detail::ml_at(p2, z, t, s);
        }
        SymbolGrid u(prob.u0.spec);
        for (std::size_t i = 0; i < u.size(); ++i) {
            u[i] = e1[table.index[i]] * prob.u0[i];
            if (has_u1) u[i] += e2[table.index[i]] * (*prob.u1)[i];
        }
        tr.states.push_back(std::move(u));
    }
    return tr;
}

inline Trajectory solve_heat(EvolutionProblem prob) {
    prob.kind = EquationKind::Heat;
    return solve(prob);
}
inline Trajectory solve_schrodinger(EvolutionProblem prob) {
    prob.kind = EquationKind::Schrodinger;
    return solve(prob);
}
inline Trajectory solve_wave(EvolutionProblem prob) {
    prob.kind = EquationKind::Wave;
    return solve(prob);
}

// ---------------------------------------------------------------------------
// Volterra residual
// ---------------------------------------------------------------------------

/// Weights w_k with sum_k w_k f(t_k) ~ (1/Gamma(alpha)) int_0^{t_n} (t_n - s)^(alpha-1) f(s) ds
/// for f interpolated piecewise linearly on the nodes t_0 .. t_n.
/// Moments are exact on the last intervals and use 8-point Gauss-Legendre
/// where the kernel is smooth.
inline std::vector<double> riemann_liouville_weights(const std::vector<double>& t, std::size_t n, double alpha) {
    static const double gx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                                 0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
    static const double gw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                                 0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
    std::vector<double> w(n + 1, 0.0);
    const double tn = t[n];
    for (std::size_t k = 1; k <= n; ++k) {
        const double a = t[k - 1], b = t[k], dt = b - a;
        const double A = tn - a, B = tn - b;
        double wl = 0.0, wr = 0.0;  // weights of f(a) and f(b)
        if (B >= 2.0 * dt) {
            for (int g = 0; g < 8; ++g) {
                const double s = a + 0.5 * dt * (gx[g] + 1.0);
                const double ker = std::pow(tn - s, alpha - 1.0) * 0.5 * dt * gw[g];
                wl += ker * (b - s) / dt;
                wr += ker * (s - a) / dt;
            }
        } else {
            // u = tn - s: int_B^A u^(alpha-1) (u - B) / dt du and int_B^A u^(alpha-1) (A - u) / dt du
            const double Aa = std::pow(A, alpha), Ba = B > 0.0 ? std::pow(B, alpha) : 0.0;
            const double Aa1 = Aa * A, Ba1 = Ba * B;
            const double m0 = (Aa - Ba) / alpha;
            const double m1 = (Aa1 - Ba1) / (alpha + 1.0);
            wl = (m1 - B * m0) / dt;
            wr = (A * m0 - m1) / dt;
        }
        w[k - 1] += wl;
        w[k] += wr;
    }
    const double ig = 1.0 / std::tgamma(alpha);
    for (auto& v : w) v *= ig;
    return w;
}

struct VolterraReport {
    std::vector<double> checkpoint_times;
    std::vector<double> residuals;  ///< ||R(t)||_2 / (||u0||_2 + t ||u1||_2)
    double max_residual = 0.0;
    double quadrature_estimate = 0.0;  ///< |full - every-other-node| difference, if computed
};

/// Residual of the integral form
///   u(t) = u0 + t u1 - kappa sigma I^alpha u(t),   kappa = 1 (heat, wave), -i (schrodinger)
/// at the trajectory nodes listed in `checkpoints` (all nodes with index > 0
/// when empty). If `tolerance` is positive, the quadrature is repeated on
/// every other node and an accuracy error is raised when the two disagree
/// by more than the tolerance.
inline VolterraReport volterra_residual(const Trajectory& tr, const EvolutionProblem& prob,
                                        std::vector<std::size_t> checkpoints = {}, double tolerance = 0.0) {
    prob.validate();
    const std::size_t N = tr.times.size();
    if (N < 3 || tr.states.size() != N) throw DomainError("trajectory needs at least three time nodes");
    if (tr.times.front() != 0.0) throw DomainError("trajectory must start at t = 0");
    for (std::size_t k = 1; k < N; ++k)
        if (!(tr.times[k] > tr.times[k - 1])) throw DomainError("trajectory times must increase strictly");
    if (checkpoints.empty())
        for (std::size_t k = 1; k < N; ++k) checkpoints.push_back(k);

    const SymbolGrid sig = prob.sigma.sample_positive(prob.u0.spec);
    const cplx kappa = prob.kind == EquationKind::Schrodinger ? cplx(0.0, -1.0) : cplx(1.0);
    const bool has_u1 = prob.kind == EquationKind::Wave && prob.u1.has_value();
    const double n0 = prob.u0.l2_norm(), n1 = has_u1 ? prob.u1->l2_norm() : 0.0;
    const double cell = prob.u0.spec.cell_volume();

    auto residual_norm = [&](const std::vector<double>& times, const std::vector<std::size_t>& nodes, std::size_t n) {
        const auto w = riemann_liouville_weights(times, n, prob.alpha);
        const double t = times[n];
        double acc = 0.0;
        for (std::size_t i = 0; i < sig.size(); ++i) {
            cplx integral(0.0);
            for (std::size_t k = 0; k <= n; ++k) integral += w[k] * tr.states[nodes[k]][i];
            cplx r = tr.states[nodes[n]][i] - prob.u0[i] + kappa * sig[i] * integral;
            if (has_u1) r -= t * (*prob.u1)[i];
            acc += std::norm(r);
        }
        return std::sqrt(acc * cell) / (n0 + t * n1);
    };

    std::vector<std::size_t> all(N);
    for (std::size_t k = 0; k < N; ++k) all[k] = k;
    VolterraReport rep;
    for (std::size_t c : checkpoints) {
        if (c == 0 || c >= N) throw DomainError("checkpoint index out of range");
        rep.checkpoint_times.push_back(tr.times[c]);
        rep.residuals.push_back(residual_norm(tr.times, all, c));
        rep.max_residual = std::max(rep.max_residual, rep.residuals.back());
    }
    if (tolerance > 0.0) {
        std::vector<double> half_t;
        std::vector<std::size_t> half_nodes;
        for (std::size_t k = 0; k < N; k += 2) {
            half_t.push_back(tr.times[k]);
            half_nodes.push_back(k);
        }
        for (std::size_t j = 0; j < checkpoints.size(); ++j) {
            const std::size_t c = checkpoints[j];
            if (c % 2 != 0) continue;
            const double coarse = residual_norm(half_t, half_nodes, c / 2);
            rep.quadrature_estimate = std::max(rep.quadrature_estimate, std::abs(coarse - rep.residuals[j]));
        }
        if (rep.quadrature_estimate > tolerance)
            throw AccuracyError("time grid too coarse for the requested residual tolerance", rep.quadrature_estimate);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// L1 time stepper
// ---------------------------------------------------------------------------

/// Graded mesh t_j = T (j / N)^r, which resolves the t^alpha start of
/// Caputo solutions.
inline std::vector<double> graded_times(double T, int N, double r) {
    if (!(T > 0.0) || N < 1 || !(r >= 1.0)) throw DomainError("graded mesh needs T > 0, N >= 1, r >= 1");
    std::vector<double> t(N + 1);
    for (int j = 0; j <= N; ++j) t[j] = T * std::pow(static_cast<double>(j) / N, r);
    return t;
}

inline std::vector<double> uniform_times(double T, int N) { return graded_times(T, N, 1.0); }

/// Grading exponent max(1, 2 / alpha). Solutions behave like t^alpha near
/// the origin, and this exponent keeps the product-integration error of
/// the first few steps at the level of the rest of the mesh.
inline double volterra_grading(double alpha) { return std::max(1.0, 2.0 / alpha); }

/// L1 discretisation of D^alpha y = lambda y, y(0) = y0, 0 < alpha <= 1,
/// on an arbitrary increasing mesh starting at 0:
///   D^alpha y(t_n) ~ 1/Gamma(2 - alpha) sum_k (y_k - y_{k-1}) / dt_k
///                    [(t_n - t_{k-1})^(1-alpha) - (t_n - t_k)^(1-alpha)].
/// Each step is implicit in y_n.
inline std::vector<cplx> caputo_l1_oracle(cplx lambda, double alpha, cplx y0, const std::vector<double>& t) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("L1 scheme needs 0 < alpha <= 1");
    if (t.size() < 2 || t.front() != 0.0) throw DomainError("mesh must start at 0 and have a step");
    const std::size_t N = t.size() - 1;
    std::vector<cplx> y(N + 1);
    y[0] = y0;
    const double g = std::tgamma(2.0 - alpha);
    for (std::size_t n = 1; n <= N; ++n) {
        cplx hist(0.0);
        for (std::size_t k = 1; k < n; ++k) {
            const double dt = t[k] - t[k - 1];
            const double c = std::pow(t[n] - t[k - 1], 1.0 - alpha) - std::pow(t[n] - t[k], 1.0 - alpha);
            hist += (y[k] - y[k - 1]) / dt * c;
        }
        const double dtn = t[n] - t[n - 1];
        const double cn = std::pow(dtn, 1.0 - alpha) / dtn;  // last interval, (t_n - t_n)^(1-alpha) = 0
        // (hist + (y_n - y_{n-1}) cn) / g = lambda y_n
        y[n] = (hist - y[n - 1] * cn) / (lambda * g - cn);
    }
    return y;
}

// ---------------------------------------------------------------------------
// Decay sweep
// ---------------------------------------------------------------------------

struct DecayReport {
    EquationKind kind = EquationKind::Heat;
    std::vector<NormRecord> rows;
    double norm_p_u0 = 0.0;
    double norm_p_u1 = 0.0;
    double fitted_slope = 0.0;       ///< slope of log ||u(t)||_q against log t over the fit window
    double rhs_slope = 0.0;          ///< same fit applied to the right-hand side of the estimate
    double theoretical_exponent = 0.0;
    double fit_t_min = 0.0, fit_t_max = 0.0;
    double ratio_max = 0.0;          ///< measured constant sup_t ||u(t)||_q / rhs(t)
    double ratio_stability = 0.0;    ///< running sup at the last time over running sup at the mid time
    bool mt_closed_form = false;
    /// lambda < d (1/p - 1/q): M_t is infinite, bound columns are NaN and
    /// only the norms and the fitted slope are meaningful.
    bool assumption_violated = false;
};

struct DecayOptions {
    int threads = 1;
};

namespace detail {

inline double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw NumericError("degenerate slope fit");
    return (n * sxy - sx * sy) / den;
}

template <class F>
void parallel_for(std::size_t count, int threads, F&& body) {
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex m;
    std::vector<std::jthread> pool;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lk(m);
                    if (!err) err = std::current_exception();
                }
            }
        });
    pool.clear();
    if (err) std::rethrow_exception(err);
}

}  // namespace detail

/// L^q norm of the element with symbol f. Uses the representation when the
/// form is nondegenerate; for theta = 0 the element is the function
/// s -> int f(xi) e^{i xi s} dxi with trace (2 pi)^-d times the integral.
inline double element_norm(const SymbolGrid& f, double q, const ThetaForm& theta, const RepSpace* rep) {
    if (!theta.is_zero()) {
        if (!rep) throw DomainError("a representation space is required for a nondegenerate form");
        return lp_norm(quantize(f, theta, *rep), q);
    }
    const int d = f.spec.d;
    SymbolGrid g = classical_fourier(f, +1);
    g *= std::pow(2.0 * std::numbers::pi, d);
    return lp_norm(singular_profile(g, std::pow(2.0 * std::numbers::pi, -d)), q);
}

/// Norm of the solution at each time against the estimate
///   ||u(t)||_q <= C M_t (||u0||_p + t ||u1||_p)
/// (the u1 term only for the wave problem), and the log-log slope over the
/// last decade of the sweep. Points with ||u(t)||_q above half of
/// ||u(0)||_q are left out of the fit when at least three remain.
inline DecayReport decay_sweep(const EvolutionProblem& prob, const RepSpace* rep = nullptr, DecayOptions opt = {}) {
    prob.validate();
    if (!(prob.p > 1.0 && prob.p <= 2.0 && prob.q >= 2.0 && std::isfinite(prob.q)))
        throw DomainError("decay estimates need 1 < p <= 2 <= q < inf");
    if (!prob.theta.is_zero() && prob.theta.dim() != 2) throw DomainError("the representation path supports d = 2");
    std::vector<double> ts;
    for (double t : prob.times)
        if (t > 0.0) ts.push_back(t);
    if (ts.size() < 3) throw DomainError("decay sweep needs at least three positive times");
    std::sort(ts.begin(), ts.end());

    EvolutionProblem p2 = prob;
    p2.times = ts;
    const Trajectory tr = solve(p2);

    DecayReport rep_out;
    rep_out.kind = prob.kind;
    const int d = prob.u0.spec.d;
    rep_out.norm_p_u0 = element_norm(prob.u0, prob.p, prob.theta, rep);
    const bool has_u1 = prob.kind == EquationKind::Wave && prob.u1.has_value();
    if (has_u1) rep_out.norm_p_u1 = element_norm(*prob.u1, prob.p, prob.theta, rep);
    const double norm_q_u0 = element_norm(prob.u0, prob.q, prob.theta, rep);

    const auto growth = prob.sigma.growth();
    rep_out.mt_closed_form = prob.sigma.is_power();
    const double kappa = 1.0 / prob.p - 1.0 / prob.q;
    if (growth) rep_out.theoretical_exponent = -d * prob.alpha * kappa / *growth;
    const SymbolGrid sig = prob.sigma.sample_positive(prob.u0.spec);
    rep_out.assumption_violated = growth && mt_beta(d, prob.p, prob.q, *growth) > 1.0;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    rep_out.rows.resize(ts.size());
    detail::parallel_for(ts.size(), opt.threads, [&](std::size_t i) {
        NormRecord r;
        r.t = ts[i];
        r.norm_q = element_norm(tr.states[i], prob.q, prob.theta, rep);
        if (rep_out.assumption_violated) {
            r.m_t = nan;
        } else if (rep_out.mt_closed_form) {
            const double t_eff = r.t * std::pow(prob.sigma.power_scale(), 1.0 / prob.alpha);
            r.m_t = m_t_closed_form(d, prob.alpha, t_eff, prob.p, prob.q, *growth);
        } else {
            r.m_t = m_t(sig, prob.alpha, r.t, prob.p, prob.q).value;
        }
        const double rhs = r.m_t * (rep_out.norm_p_u0 + (has_u1 ? r.t * rep_out.norm_p_u1 : 0.0));
        r.bound_ratio = std::isnan(rhs) ? nan : rhs > 0.0 ? r.norm_q / rhs : std::numeric_limits<double>::infinity();
        rep_out.rows[i] = r;
    });

    // Fit window: last decade, preferring points that have decayed.
    const double t_max = ts.back();
    std::vector<std::size_t> window, decayed;
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (ts[i] >= t_max / 10.0 * (1.0 - 1e-12)) {
            window.push_back(i);
            if (rep_out.rows[i].norm_q <= 0.5 * norm_q_u0) decayed.push_back(i);
        }
    if (decayed.size() >= 3) window = decayed;
    if (window.size() < 2) throw DomainError("fit window holds fewer than two points");
    std::vector<double> lx, ly, lr;
    for (std::size_t i : window) {
        const auto& r = rep_out.rows[i];
        lx.push_back(std::log(r.t));
        ly.push_back(std::log(r.norm_q));
        lr.push_back(std::log(r.m_t * (rep_out.norm_p_u0 + (has_u1 ? r.t * rep_out.norm_p_u1 : 0.0))));
    }
    rep_out.fitted_slope = detail::least_squares_slope(lx, ly);
    rep_out.rhs_slope = rep_out.assumption_violated ? nan : detail::least_squares_slope(lx, lr);
    rep_out.fit_t_min = rep_out.rows[window.front()].t;
    rep_out.fit_t_max = rep_out.rows[window.back()].t;

    // Running sup of the ratio, compared at the geometric mid time and the end.
    const double t_mid = std::sqrt(ts.front() * ts.back());
    double running = 0.0, at_mid = 0.0;
    for (const auto& r : rep_out.rows) {
        running = std::max(running, r.bound_ratio);
        if (r.t <= t_mid * (1.0 + 1e-12)) at_mid = running;
    }
    rep_out.ratio_max = running;
    rep_out.ratio_stability = at_mid > 0.0 ? running / at_mid : std::numeric_limits<double>::infinity();
    if (rep_out.assumption_violated) rep_out.ratio_max = rep_out.ratio_stability = nan;
    return rep_out;
}

}  // namespace qeuclid
