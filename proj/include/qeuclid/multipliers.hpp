#pragma once

#include <qeuclid/nc_lebesgue.hpp>

#include <optional>

namespace qeuclid {

/// Fourier multiplier symbol g(xi): either an analytic family or samples
/// on a fixed grid.
class MultiplierSymbol {
public:
    /// |xi|^lambda, scaled. Growth tag lambda.
    static MultiplierSymbol power(double lambda, double scale = 1.0) {
        MultiplierSymbol m;
        m.name_ = "power(" + std::to_string(lambda) + ")";
        m.growth_ = lambda;
        m.scale_ = scale;
        m.fn_ = [lambda, scale](std::span<const double> xi) {
            double r2 = 0.0;
            for (double v : xi) r2 += v * v;
            return cplx(scale * std::pow(r2, 0.5 * lambda));
        };
        return m;
    }

    static MultiplierSymbol laplacian() {
        MultiplierSymbol m = power(2.0);
        m.name_ = "laplacian";
        return m;
    }

    /// i xi_j, the symbol of the j-th partial derivative.
    static MultiplierSymbol coordinate(int j) {
        if (j < 0) throw DomainError("coordinate index must be non-negative");
        MultiplierSymbol m;
        m.name_ = "coordinate(" + std::to_string(j) + ")";
        m.fn_ = [j](std::span<const double> xi) {
            if (j >= static_cast<int>(xi.size())) throw ShapeError("coordinate index exceeds dimension");
            return cplx(0.0, xi[j]);
        };
        return m;
    }

    static MultiplierSymbol constant(cplx c) {
        MultiplierSymbol m;
        m.name_ = "constant";
        m.fn_ = [c](std::span<const double>) { return c; };
        return m;
    }

    static MultiplierSymbol identity() { return constant(1.0); }

    static MultiplierSymbol function(std::string name, SymbolFunction fn, std::optional<double> growth = {}) {
        MultiplierSymbol m;
        m.name_ = std::move(name);
        m.fn_ = std::move(fn);
        m.growth_ = growth;
        return m;
    }

    static MultiplierSymbol from_grid(SymbolGrid g) {
        MultiplierSymbol m;
        m.name_ = "grid";
        m.grid_ = std::make_shared<SymbolGrid>(std::move(g));
        return m;
    }

    const std::string& name() const { return name_; }
    std::optional<double> growth() const { return growth_; }
    /// Scale c of c |xi|^lambda when this is a power symbol.
    double power_scale() const { return scale_; }
    bool is_power() const { return growth_.has_value() && !grid_; }

    SymbolGrid sample(const GridSpec& spec) const {
        if (grid_) {
            if (!grid_->spec.same_as(spec)) throw ShapeError("grid-backed symbol sampled on a different grid");
            return *grid_;
        }
        return sample_symbol(fn_, spec);
    }

    /// Samples and checks the positivity required of propagator symbols:
    /// real, finite and non-negative everywhere, strictly positive away
    /// from isolated zeros.
    SymbolGrid sample_positive(const GridSpec& spec) const {
        SymbolGrid s = sample(spec);
        for (const auto& v : s.values)
            if (std::abs(v.imag()) > 1e-14 * std::max(1.0, std::abs(v.real())) || v.real() < 0.0)
                throw DomainError("symbol '" + name_ + "' is not real and non-negative on the grid");
        return s;
    }

private:
    std::string name_;
    SymbolFunction fn_;
    std::shared_ptr<const SymbolGrid> grid_;
    std::optional<double> growth_;
    double scale_ = 1.0;
};

/// Symbol-side action of g(D): f -> g f pointwise.
inline SymbolGrid apply_multiplier(const MultiplierSymbol& g, const SymbolGrid& f) {
    const SymbolGrid gs = g.sample(f.spec);
    SymbolGrid out(f.spec);
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = gs[i] * f[i];
    return out;
}

/// Operator-side action: quantize(g * dequantize(x)).
inline NcOperator apply_multiplier(const MultiplierSymbol& g, const NcOperator& x, const ThetaForm& theta,
                                   const RepSpace& rep) {
    return quantize(apply_multiplier(g, dequantize(x, theta, rep)), theta, rep);
}

// ---------------------------------------------------------------------------
// Weak-type symbol quasinorm
// ---------------------------------------------------------------------------

struct WeakQuasinorm {
    double value = 0.0;     ///< sup over resolved levels of t Vol{|g| >= t}^(1/r)
    bool unbounded = false;  ///< sup is carried by levels that reach the window edge
    double argsup = 0.0;    ///< level t at which the sup was found
};

struct WeakQuasinormOptions {
    long min_cells = 1;  ///< superlevel sets smaller than this are not resolved
};

/// sup_t t Vol{|g| >= t}^(r_inv). The function of t is a left-continuous
/// step function whose jumps sit at the sampled magnitudes, so the supremum
/// is taken exactly over those magnitudes.
///
/// A level is resolved when its superlevel set contains at least
/// `min_cells` cells and stays away from the window boundary. If the
/// unresolved boundary-touching levels exceed the resolved sup by more than
/// 1%, the quasinorm is reported as unbounded.
inline WeakQuasinorm weak_symbol_quasinorm(const SymbolGrid& g, double r_inv, WeakQuasinormOptions opt = {}) {
    if (!(r_inv >= 0.0 && r_inv <= 1.0)) throw DomainError("1/r must lie in [0, 1]");
    const GridSpec& s = g.spec;
    std::vector<double> a(g.size());
    double boundary = 0.0;
    std::vector<int> idx(s.d);
    for (std::size_t i = 0; i < g.size(); ++i) {
        a[i] = std::abs(g[i]);
        if (!std::isfinite(a[i])) throw NumericError("non-finite symbol value in quasinorm");
        s.unflatten(i, idx);
        for (int k : idx)
            if (k == 0 || k == s.n - 1) boundary = std::max(boundary, a[i]);
    }
    std::sort(a.begin(), a.end());
    WeakQuasinorm res;
    if (a.back() == 0.0) return res;
    if (r_inv == 0.0) {
        res.value = a.back();
        res.argsup = a.back();
        return res;
    }
    const double cell = s.cell_volume();
    double resolved = 0.0, unresolved = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < a.size();) {
        const double t = a[i];
        std::size_t j = i;
        while (j < a.size() && a[j] == t) ++j;
        if (t > 0.0) {
            const long count = static_cast<long>(a.size() - i);
            const double v = t * std::pow(count * cell, r_inv);
            if (t > boundary && count >= opt.min_cells) {
                any = true;
                if (v > resolved) {
                    resolved = v;
                    res.argsup = t;
                }
            } else if (t <= boundary) {
                unresolved = std::max(unresolved, v);
            }
        }
        i = j;
    }
    res.value = resolved;
    res.unbounded = !any || unresolved > 1.01 * resolved;
    return res;
}

/// (sum |g|^r cell)^(1/r), the strong L^r norm of the sampled symbol.
inline double symbol_lr_norm(const SymbolGrid& g, double r_inv) {
    if (r_inv == 0.0) return g.max_abs();
    const double r = 1.0 / r_inv;
    double acc = 0.0;
    for (const auto& v : g.values) acc += std::pow(std::abs(v), r);
    return std::pow(acc * g.spec.cell_volume(), r_inv);
}

struct HormanderBound {
    double bound = 0.0;     ///< weak-type quasinorm of g with 1/r = 1/p - 1/q
    bool unbounded = false;
    double r_inv = 0.0;
};

/// Bound of the multiplier theorem for g(D): L^p -> L^q.
inline HormanderBound hormander_bound(const SymbolGrid& g, double p, double q, WeakQuasinormOptions opt = {}) {
    if (!(p > 1.0 && p <= 2.0 && q >= 2.0 && std::isfinite(q)))
        throw DomainError("multiplier bound needs 1 < p <= 2 <= q < inf");
    HormanderBound hb;
    hb.r_inv = 1.0 / p - 1.0 / q;
    const auto w = weak_symbol_quasinorm(g, hb.r_inv, opt);
    hb.bound = w.unbounded ? std::numeric_limits<double>::infinity() : w.value;
    hb.unbounded = w.unbounded;
    return hb;
}

/// ||g(D) x||_q / ||x||_p for an operator x given by its symbol.
inline double multiplier_ratio(const MultiplierSymbol& g, const SymbolGrid& x_symbol, double p, double q,
                               const ThetaForm& theta, const RepSpace& rep) {
    const NcOperator x = quantize(x_symbol, theta, rep);
    const NcOperator gx = quantize(apply_multiplier(g, x_symbol), theta, rep);
    const double den = lp_norm(x, p);
    if (den == 0.0) throw DomainError("input has zero L^p norm");
    return lp_norm(gx, q) / den;
}

// ---------------------------------------------------------------------------
// Propagator constant M_t
// ---------------------------------------------------------------------------

inline double unit_ball_volume(int d) {
    return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

/// Exponent beta = d (1/p - 1/q) / lambda of the power-symbol closed form.
inline double mt_beta(int d, double p, double q, double lambda) { return d * (1.0 / p - 1.0 / q) / lambda; }

/// Closed form for sigma = |xi|^lambda:
///   M_t = omega_d^kappa t^(-d alpha kappa / lambda) (1 - beta)^(1 - beta) beta^beta.
inline double m_t_closed_form(int d, double alpha, double t, double p, double q, double lambda) {
    if (!(t > 0.0)) throw DomainError("M_t needs t > 0");
    if (!(lambda > 0.0)) throw DomainError("power symbol needs lambda > 0");
    const double kappa = 1.0 / p - 1.0 / q;
    const double beta = mt_beta(d, p, q, lambda);
    if (beta > 1.0) throw AssumptionError("d (1/p - 1/q) / lambda > 1 makes the supremum infinite");
    auto pw = [](double b, double e) { return e == 0.0 ? 1.0 : std::pow(b, e); };
    return std::pow(unit_ball_volume(d), kappa) * std::pow(t, -d * alpha * kappa / lambda) * pw(1.0 - beta, 1.0 - beta) *
           pw(beta, beta);
}

struct MtResult {
    double value = 0.0;
    double rho = 0.0;
    bool truncated = false;  ///< optimum sits next to levels that reach the grid edge
};

/// Grid evaluation of sup_rho rho Vol{sigma <= t^-alpha (1/rho - 1)}^kappa by
/// cell counting, on a logistic grid of rho followed by golden-section
/// refinement.
inline MtResult m_t(const SymbolGrid& sigma, double alpha, double t, double p, double q, int rho_samples = 512) {
    if (!(t > 0.0)) throw DomainError("M_t needs t > 0");
    if (!(p >= 1.0 && q >= p)) throw DomainError("M_t needs 1 <= p <= q");
    const double kappa = 1.0 / p - 1.0 / q;
    const GridSpec& s = sigma.spec;
    std::vector<double> v(sigma.size());
    double edge = std::numeric_limits<double>::infinity();
    std::vector<int> idx(s.d);
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        v[i] = sigma[i].real();
        if (!std::isfinite(v[i]) || v[i] < 0.0) throw DomainError("sigma must be finite and non-negative");
        s.unflatten(i, idx);
        for (int k : idx)
            if (k == 0 || k == s.n - 1) edge = std::min(edge, v[i]);
    }
    std::sort(v.begin(), v.end());
    MtResult res;
    if (kappa == 0.0) {
        res.value = 1.0;
        res.rho = 1.0;
        return res;
    }
    const double cell = s.cell_volume();
    const double ta = std::pow(t, -alpha);
    auto level = [&](double rho) { return ta * (1.0 / rho - 1.0); };
    auto f = [&](double rho) {
        const double lev = level(rho);
        const long count = static_cast<long>(std::upper_bound(v.begin(), v.end(), lev) - v.begin());
        return rho * std::pow(count * cell, kappa);
    };
    auto resolved = [&](double rho) { return level(rho) < edge; };

    double best = -1.0, best_u = 0.0;
    bool best_next_to_edge = false;
    const double u0 = -20.0, u1 = 20.0;
    bool prev_resolved = false;
    for (int k = 0; k < rho_samples; ++k) {
        const double u = u0 + (u1 - u0) * k / (rho_samples - 1);
        const double rho = 1.0 / (1.0 + std::exp(-u));
        const bool ok = resolved(rho);
        if (ok) {
            const double val = f(rho);
            if (val > best) {
                best = val;
                best_u = u;
                best_next_to_edge = !prev_resolved && k > 0;
            }
        }
        prev_resolved = ok;
    }
    if (best < 0.0) {
        res.truncated = true;
        return res;
    }
    const double du = (u1 - u0) / (rho_samples - 1);
    double lo = best_u - du, hi = best_u + du;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    auto fu = [&](double u) {
        const double rho = 1.0 / (1.0 + std::exp(-u));
        return resolved(rho) ? f(rho) : -1.0;
    };
    double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
    double fa = fu(a), fb = fu(b);
    for (int it = 0; it < 80; ++it) {
        if (fa > fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - gr * (hi - lo);
            fa = fu(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + gr * (hi - lo);
            fb = fu(b);
        }
    }
    if (fa > best) {
        best = fa;
        best_u = a;
    }
    if (fb > best) {
        best = fb;
        best_u = b;
    }
    res.value = best;
    res.rho = 1.0 / (1.0 + std::exp(-best_u));
    res.truncated = best_next_to_edge;
    return res;
}

}  // namespace qeuclid
