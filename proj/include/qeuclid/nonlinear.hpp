#pragma once

#include <qeuclid/evolution.hpp>
#include <qeuclid/nc_lebesgue.hpp>

namespace qeuclid {

// ---------------------------------------------------------------------------
// Time weights h(t)
// ---------------------------------------------------------------------------

/// Positive scalar weight h(t) in front of the nonlinearity, with its
/// L^2(0, T) norm.
class TimeFunction {
public:
    static TimeFunction zero() { return make("zero", [](double) { return 0.0; }, [](double) { return 0.0; }); }

    static TimeFunction constant(double eta) {
        if (!(eta >= 0.0) || !std::isfinite(eta)) throw DomainError("constant weight must be finite and >= 0");
        return make("constant", [eta](double) { return eta; }, [eta](double T) { return eta * std::sqrt(T); });
    }

    /// (1 + t)^(-e).
    static TimeFunction power_decay(double e) {
        if (!std::isfinite(e)) throw DomainError("decay exponent must be finite");
        auto l2 = [e](double T) {
            const double k = 2.0 * e - 1.0;
            const double sq = std::abs(k) < 1e-12 ? std::log1p(T) : -std::expm1(-k * std::log1p(T)) / k;
            return std::sqrt(sq);
        };
        return make("power_decay", [e](double t) { return std::pow(1.0 + t, -e); }, l2);
    }

    /// Arbitrary weight; its L^2 norm is computed by composite Gauss-Legendre
    /// quadrature on 64 panels.
    static TimeFunction custom(std::string name, std::function<double(double)> fn) {
        auto l2 = [fn](double T) {
            static const double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                         0.8611363115940526};
            static const double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                         0.3478548451374538};
            const int panels = 64;
            const double dh = T / panels;
            double acc = 0.0;
            for (int k = 0; k < panels; ++k)
                for (int j = 0; j < 4; ++j) {
                    const double v = fn((k + 0.5 * (gx[j] + 1.0)) * dh);
                    acc += 0.5 * dh * gw[j] * v * v;
                }
            return std::sqrt(acc);
        };
        return make(std::move(name), std::move(fn), l2);
    }

    double operator()(double t) const { return fn_(t); }
    double l2_norm(double T) const {
        if (!(T >= 0.0)) throw DomainError("L2 window needs T >= 0");
        return l2_(T);
    }
    const std::string& name() const { return name_; }

private:
    static TimeFunction make(std::string name, std::function<double(double)> fn, std::function<double(double)> l2) {
        TimeFunction f;
        f.name_ = std::move(name);
        f.fn_ = std::move(fn);
        f.l2_ = std::move(l2);
        return f;
    }

    std::string name_;
    std::function<double(double)> fn_;
    std::function<double(double)> l2_;
};

// ---------------------------------------------------------------------------
// Problem description
// ---------------------------------------------------------------------------

enum class PicardKind { Heat, Wave };

inline const char* to_string(PicardKind k) { return k == PicardKind::Heat ? "heat" : "wave"; }

/// Free constants of the existence argument. The proofs only need
/// c, c1, c2 > 1 and delta >= 1.
struct PicardConstants {
    double c = std::numbers::sqrt2;
    double c1 = std::numbers::sqrt2;
    double c2 = std::numbers::sqrt2;
    double delta = 1.0;
};

/// heat:  u(t) = u0 + int_0^t h(s) |A u(s)|^p ds
/// wave:  u(t) = u0 + t u1 + int_0^t (t - s) h(s) |A u(s)|^p ds
/// All states are symbols on u0's grid; |.|^p is taken on the operator side.
struct PicardProblem {
    PicardKind kind = PicardKind::Heat;
    int p = 2;
    TimeFunction h = TimeFunction::constant(1.0);
    MultiplierSymbol A = MultiplierSymbol::identity();
    SymbolGrid u0;
    std::optional<SymbolGrid> u1;
    double T = 1.0;
    ThetaForm theta = ThetaForm::canonical(2, 1.0);
    int m = 0;  ///< representation points per block; 0 takes the grid size
    PicardConstants constants;
    int steps = 200;
    double tolerance = 1e-8;
    int max_iterations = 60;
    bool override_window = false;
    bool track_positivity = false;

    int rep_points() const { return m > 0 ? m : u0.spec.n; }

    void validate() const {
        if (p < 2) throw DomainError("nonlinearity exponent must be an integer >= 2");
        if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("horizon T must be positive");
        if (steps < 2) throw DomainError("Picard needs at least two time steps");
        if (!(tolerance > 0.0)) throw DomainError("Picard tolerance must be positive");
        if (max_iterations < 1) throw DomainError("Picard needs at least one iterate");
        if (theta.is_zero()) throw DomainError("nonlinear problems need an invertible deformation");
        if (theta.dim() != u0.spec.d) throw ShapeError("deformation dimension does not match initial data");
        if (kind == PicardKind::Heat && u1) throw DomainError("heat problem takes no initial velocity");
        if (u1) u0.check_same(*u1);
        const auto& k = constants;
        if (!(k.c > 1.0 && k.c1 > 1.0 && k.c2 > 1.0)) throw DomainError("constants c, c1, c2 must exceed 1");
        if (!(k.delta >= 1.0)) throw DomainError("constant delta must be >= 1");
    }

    double u0_norm() const { return u0.l2_norm(); }
    double u1_norm() const { return u1 ? u1->l2_norm() : 0.0; }
};

// ---------------------------------------------------------------------------
// Existence windows
// ---------------------------------------------------------------------------

/// sqrt(c^2 - 1) / (||h|| delta^p ||u0||^(p-1)).
inline double t_star_heat(double c, double delta, int p, double h_norm, double u0_norm) {
    if (!(c > 1.0) || !(delta >= 1.0)) throw DomainError("heat window needs c > 1 and delta >= 1");
    const double den = h_norm * std::pow(delta, p) * std::pow(u0_norm, p - 1);
    return den > 0.0 ? std::sqrt(c * c - 1.0) / den : std::numeric_limits<double>::infinity();
}

/// Minimum of ((c1 - 1) / (||h||^2 delta^(p-1) ||u_j||^(2p-2)))^(1/3) over
/// j = 0, 1. A vanishing datum imposes no restriction.
inline double t_star_wave(double c1, double delta, int p, double h_norm, double u0_norm, double u1_norm) {
    if (!(c1 > 1.0) || !(delta >= 1.0)) throw DomainError("wave window needs c1 > 1 and delta >= 1");
    double best = std::numeric_limits<double>::infinity();
    for (double un : {u0_norm, u1_norm}) {
        const double den = h_norm * h_norm * std::pow(delta, p - 1) * std::pow(un, 2 * p - 2);
        if (den > 0.0) best = std::min(best, std::cbrt((c1 - 1.0) / den));
    }
    return best;
}

/// Window formula evaluated at its own fixed point T = formula(T), since
/// ||h||_{L^2(0,T)} depends on T. The formula is non-increasing in T, so
/// the crossing is bracketed in log T and bisected. Returns infinity when
/// the formula stays above T on the whole bracket.
inline double t_star_estimate(const PicardProblem& prob) {
    prob.validate();
    const auto& k = prob.constants;
    const double n0 = prob.u0_norm(), n1 = prob.u1_norm();
    auto formula = [&](double T) {
        const double hn = prob.h.l2_norm(T);
        return prob.kind == PicardKind::Heat ? t_star_heat(k.c, k.delta, prob.p, hn, n0)
                                             : t_star_wave(k.c1, k.delta, prob.p, hn, n0, n1);
    };
    auto gap = [&](double lt) { return std::log(formula(std::exp(lt))) - lt; };
    double lo = std::log(1e-9), hi = std::log(1e9);
    if (!(gap(lo) > 0.0)) throw EmptyWindowError("window formula has no positive fixed point");
    if (gap(hi) > 0.0) return std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) > 0.0 ? lo : hi) = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

struct SmallDataVerdict {
    bool admissible = false;
    double margin = 0.0;       ///< c2 T^(gamma0 - gamma~) - c^p ||u0||^(2p-2)
    double gamma_tilde = 0.0;  ///< 3 - 2 gamma + gamma0 p
    double threshold = 0.0;    ///< largest admissible ||u0||
};

namespace detail {
inline double small_data_margin(const PicardConstants& k, int p, double gamma_tilde, double gamma0, double T,
                                double norm) {
    return k.c2 * std::pow(T, gamma0 - gamma_tilde) - std::pow(k.c, p) * std::pow(norm, 2 * p - 2);
}

inline void check_small_data(int p, double gamma, double gamma0) {
    if (!(gamma > 1.5)) throw HypothesisError("small-data criterion needs gamma > 3/2");
    const double top = (2.0 * gamma - 3.0) / p;
    if (!(gamma0 > 0.0 && gamma0 < top))
        throw HypothesisError("gamma0 must lie in (0, " + std::to_string(top) + ")");
}
}  // namespace detail

/// Global small-data condition for the wave problem with u1 = 0, where
/// ||h||_{L^2(0,T)} <= c T^(-gamma) is assumed.
inline SmallDataVerdict small_data_check(const PicardProblem& prob, double gamma, double gamma0) {
    prob.validate();
    if (prob.kind != PicardKind::Wave) throw HypothesisError("small-data criterion applies to the wave problem");
    if (prob.u1_norm() != 0.0) throw HypothesisError("small-data criterion needs u1 = 0");
    detail::check_small_data(prob.p, gamma, gamma0);
    const auto& k = prob.constants;
    SmallDataVerdict v;
    v.gamma_tilde = 3.0 - 2.0 * gamma + gamma0 * prob.p;
    v.margin = detail::small_data_margin(k, prob.p, v.gamma_tilde, gamma0, prob.T, prob.u0_norm());
    v.admissible = v.margin >= 0.0;
    v.threshold =
        std::pow(k.c2 * std::pow(prob.T, gamma0 - v.gamma_tilde) / std::pow(k.c, prob.p), 1.0 / (2 * prob.p - 2));
    return v;
}

/// Locates the norm at which the small-data margin changes sign by
/// bisection, independently of the closed-form threshold.
inline double small_data_threshold_bisect(const PicardConstants& k, int p, double gamma, double gamma0, double T) {
    detail::check_small_data(p, gamma, gamma0);
    const double gt = 3.0 - 2.0 * gamma + gamma0 * p;
    auto margin = [&](double r) { return detail::small_data_margin(k, p, gt, gamma0, T, r); };
    double lo = 0.0, hi = 1.0;
    while (margin(hi) >= 0.0) {
        hi *= 2.0;
        if (hi > 1e300) throw NumericError("small-data threshold bracket overflow");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (margin(mid) >= 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Picard iteration
// ---------------------------------------------------------------------------

struct PicardCertificateRow {
    int iterate = 0;
    double sup_diff = 0.0;           ///< sup_t ||u_{n+1}(t) - u_n(t)||_2
    double contraction_ratio = 0.0;  ///< sup_diff / previous sup_diff (NaN for the first iterate)
    double roundtrip_error = 0.0;    ///< worst relative symbol read-back error of this sweep
};

struct PicardResult {
    std::vector<double> times;
    std::vector<SymbolGrid> states;
    std::vector<PicardCertificateRow> certificate;
    bool converged = false;
    int iterations = 0;
    double contraction_factor = 0.0;  ///< largest ratio after the second iterate
    bool contraction_certified = false;
    double t_star = 0.0;
    bool window_override = false;
    double positivity_floor = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

struct PicardContext {
    const PicardProblem& prob;
    RepSpace rep;
    SymbolGrid a_symbol;
    bool a_zero = false;
    std::vector<double> times;
    std::vector<SymbolGrid> base;  ///< u0 + t u1

    explicit PicardContext(const PicardProblem& pr)
        : prob(pr), rep(RepSpace::matched(pr.u0.spec, pr.theta, pr.rep_points())), a_symbol(pr.A.sample(pr.u0.spec)) {
        a_zero = a_symbol.max_abs() == 0.0;
        times = uniform_times(pr.T, pr.steps);
        for (double t : times) {
            SymbolGrid b = pr.u0;
            if (pr.u1) b += cplx(t) * *pr.u1;
            base.push_back(std::move(b));
        }
    }
};

struct NonlinearTerm {
    SymbolGrid value;
    double roundtrip = 0.0;
    double min_eig = std::numeric_limits<double>::infinity();
};

/// |A u|^p as a symbol, plus the relative read-back error of A u itself.
inline NonlinearTerm nonlinear_term(const PicardContext& ctx, const SymbolGrid& u, bool positivity) {
    NonlinearTerm out{SymbolGrid(u.spec)};
    if (ctx.a_zero) return out;
    SymbolGrid v(u.spec);
    for (std::size_t i = 0; i < u.size(); ++i) v[i] = ctx.a_symbol[i] * u[i];
    for (const auto& z : v.values)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw NumericError("non-finite iterate");
    const NcOperator X = quantize(v, ctx.prob.theta, ctx.rep);
    const double vn = v.l2_norm();
    if (vn > 0.0) out.roundtrip = (dequantize(X, ctx.prob.theta, ctx.rep) - v).l2_norm() / vn;
    if (positivity) out.min_eig = min_eigenvalue(X);
    out.value = dequantize(abs_power(X, ctx.prob.p), ctx.prob.theta, ctx.rep);
    return out;
}

struct MildImage {
    std::vector<SymbolGrid> states;
    double roundtrip = 0.0;
    double min_eig = std::numeric_limits<double>::infinity();
};

/// One application of the mild map. The integrand g = h N(u) is taken
/// piecewise linear in time: plain trapezoid for the heat kernel and exact
/// (t - s) moments for the wave kernel.
inline MildImage mild_map(const PicardContext& ctx, const std::vector<SymbolGrid>& u, bool positivity) {
    const std::size_t K = ctx.times.size();
    const GridSpec& spec = ctx.prob.u0.spec;
    std::vector<SymbolGrid> g(K, SymbolGrid(spec));
    MildImage out;
    for (std::size_t k = 0; k < K; ++k) {
        const double hk = ctx.prob.h(ctx.times[k]);
        if (hk == 0.0 && !positivity) continue;
        NonlinearTerm nt = nonlinear_term(ctx, u[k], positivity);
        out.roundtrip = std::max(out.roundtrip, nt.roundtrip);
        out.min_eig = std::min(out.min_eig, nt.min_eig);
        g[k] = cplx(hk) * std::move(nt.value);
    }
    out.states = ctx.base;
    const std::size_t P = spec.size();
    if (ctx.prob.kind == PicardKind::Heat) {
        std::vector<cplx> acc(P, cplx(0.0));
        for (std::size_t k = 1; k < K; ++k) {
            const double dt = ctx.times[k] - ctx.times[k - 1];
            for (std::size_t i = 0; i < P; ++i) {
                acc[i] += 0.5 * dt * (g[k - 1][i] + g[k][i]);
                out.states[k][i] += acc[i];
            }
        }
    } else {
        // int (t_k - s) g ds = t_k G_k - S_k with G = int g and S = int s g.
        std::vector<cplx> G(P, cplx(0.0)), S(P, cplx(0.0));
        for (std::size_t k = 1; k < K; ++k) {
            const double t0 = ctx.times[k - 1], dt = ctx.times[k] - t0;
            for (std::size_t i = 0; i < P; ++i) {
                G[i] += 0.5 * dt * (g[k - 1][i] + g[k][i]);
                S[i] += 0.5 * dt * t0 * (g[k - 1][i] + g[k][i]) + dt * dt * (g[k - 1][i] / 6.0 + g[k][i] / 3.0);
                out.states[k][i] += ctx.times[k] * G[i] - S[i];
            }
        }
    }
    return out;
}

inline double sup_distance(const std::vector<SymbolGrid>& a, const std::vector<SymbolGrid>& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, (a[k] - b[k]).l2_norm());
    return d;
}

inline double window_of(const PicardProblem& prob) {
    try {
        return t_star_estimate(prob);
    } catch (const EmptyWindowError&) {
        return 0.0;
    }
}

inline PicardResult picard_run(const PicardContext& ctx, std::vector<SymbolGrid> u, double tol) {
    const PicardProblem& prob = ctx.prob;
    PicardResult res;
    res.times = ctx.times;
    res.t_star = window_of(prob);
    res.window_override = prob.T > res.t_star;
    if (res.window_override && !prob.override_window)
        throw DomainError("horizon T = " + std::to_string(prob.T) + " exceeds the existence window T* = " +
                          std::to_string(res.t_star) + "; set the window override to run anyway");

    std::vector<double> ratios;
    double prev = std::numeric_limits<double>::quiet_NaN();
    int streak = 0;
    double floor = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= prob.max_iterations; ++it) {
        MildImage next;
        try {
            next = mild_map(ctx, u, prob.track_positivity);
        } catch (const NumericError& e) {
            throw DivergenceError(std::string("iterate ") + std::to_string(it) + " left the representable range (" +
                                      e.what() + ")",
                                  ratios);
        }
        floor = std::min(floor, next.min_eig);
        const double diff = sup_distance(next.states, u);
        if (!std::isfinite(diff))
            throw DivergenceError("iterate " + std::to_string(it) + " produced a non-finite difference", ratios);
        const double ratio = it == 1 ? std::numeric_limits<double>::quiet_NaN() : diff / prev;
        res.certificate.push_back({it, diff, ratio, next.roundtrip});
        u = std::move(next.states);
        res.iterations = it;
        if (it > 1) {
            ratios.push_back(ratio);
            if (it > 2) res.contraction_factor = std::max(res.contraction_factor, ratio);
            streak = ratio >= 1.0 ? streak + 1 : 0;
            if (streak >= 3) throw DivergenceError("successive differences grew for three iterates", ratios);
        }
        prev = diff;
        if (diff <= tol) {
            res.converged = true;
            break;
        }
    }
    res.contraction_certified = res.converged;
    for (std::size_t j = 2; j < res.certificate.size(); ++j)
        if (!(res.certificate[j].contraction_ratio < 1.0)) res.contraction_certified = false;
    if (prob.track_positivity) {
        for (const auto& s : u) floor = std::min(floor, min_eigenvalue(quantize(s, prob.theta, ctx.rep)));
        res.positivity_floor = floor;
    }
    res.states = std::move(u);
    return res;
}

}  // namespace detail

/// Picard iteration from u_0(t) = u0 + t u1. Raises DivergenceError when
/// the successive differences fail to shrink for three iterates in a row.
inline PicardResult picard_solve(const PicardProblem& prob) {
    prob.validate();
    const detail::PicardContext ctx(prob);
    return detail::picard_run(ctx, ctx.base, prob.tolerance);
}

inline PicardResult picard_heat(const PicardProblem& prob) {
    if (prob.kind != PicardKind::Heat) throw DomainError("picard_heat needs a heat problem");
    return picard_solve(prob);
}

inline PicardResult picard_wave(const PicardProblem& prob) {
    if (prob.kind != PicardKind::Wave) throw DomainError("picard_wave needs a wave problem");
    return picard_solve(prob);
}

/// sup_t ||u(t) - K(u)(t)||_2 / sup_t ||u(t)||_2 for a stored solution.
inline double mild_residual(const PicardProblem& prob, const PicardResult& sol) {
    prob.validate();
    const detail::PicardContext ctx(prob);
    if (sol.states.size() != ctx.times.size()) throw ShapeError("solution does not match the problem's time grid");
    const auto img = detail::mild_map(ctx, sol.states, false);
    double scale = 0.0;
    for (const auto& s : sol.states) scale = std::max(scale, s.l2_norm());
    return scale > 0.0 ? detail::sup_distance(img.states, sol.states) / scale : 0.0;
}

struct ProbeResult {
    double gap = 0.0;
    bool skipped = false;
    std::string note;
};

/// Runs Picard twice, from u0 + t u1 and from that plus `scale` times a
/// unit-norm Gaussian of width 0.7, both to tolerance / 100, and reports
/// the sup-norm gap between the limits. Skipped when T lies outside the
/// existence window.
inline ProbeResult uniqueness_probe(const PicardProblem& prob, double scale) {
    prob.validate();
    ProbeResult out;
    const double ts = detail::window_of(prob);
    if (prob.T > ts) {
        out.skipped = true;
        out.note = "horizon " + std::to_string(prob.T) + " lies outside the existence window " + std::to_string(ts);
        return out;
    }
    const detail::PicardContext ctx(prob);
    SymbolSpec bump;
    bump.width = 0.7;
    SymbolGrid pert = sample_symbol(bump, prob.u0.spec);
    pert *= cplx(scale / pert.l2_norm());
    std::vector<SymbolGrid> start = ctx.base;
    for (auto& s : start) s += pert;
    const double tol = prob.tolerance / 100.0;
    const PicardResult a = detail::picard_run(ctx, ctx.base, tol);
    const PicardResult b = detail::picard_run(ctx, std::move(start), tol);
    out.gap = detail::sup_distance(a.states, b.states);
    return out;
}

}  // namespace qeuclid
