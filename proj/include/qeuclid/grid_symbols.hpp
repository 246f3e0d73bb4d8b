#pragma once

#include <qeuclid/errors.hpp>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace qeuclid {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Deformation form
// ---------------------------------------------------------------------------

/// Real skew-symmetric d x d matrix that fixes the commutation relations.
///
/// Only two shapes are representable: the zero form (any dimension) and the
/// canonical form made of d/2 identical blocks theta0 * [[0, 1], [-1, 0]].
class ThetaForm {
public:
    static ThetaForm zero(int d) {
        if (d < 1) throw DomainError("dimension must be positive, got " + std::to_string(d));
        return ThetaForm(d, 0.0);
    }

    static ThetaForm canonical(int d, double theta0) {
        if (d < 2 || d % 2 != 0)
            throw DomainError("a nondegenerate form needs even dimension, got " + std::to_string(d));
        if (!(theta0 > 0.0) || !std::isfinite(theta0))
            throw DomainError("theta0 must be positive and finite");
        return ThetaForm(d, theta0);
    }

    /// Accepts a matrix only if it is zero or of canonical block shape.
    static ThetaForm from_matrix(const Eigen::MatrixXd& m, double tol = 1e-12) {
        if (m.rows() != m.cols()) throw ShapeError("deformation matrix must be square");
        const int d = static_cast<int>(m.rows());
        if ((m + m.transpose()).cwiseAbs().maxCoeff() > tol)
            throw DomainError("deformation matrix is not skew-symmetric");
        if (m.cwiseAbs().maxCoeff() <= tol) return zero(d);
        const double t0 = m(0, 1);
        ThetaForm candidate = canonical(d, t0);
        if ((candidate.matrix() - m).cwiseAbs().maxCoeff() > tol)
            throw DomainError("only the zero form and equal canonical 2x2 blocks are supported");
        return candidate;
    }

    int dim() const { return d_; }
    double theta0() const { return theta0_; }
    bool is_zero() const { return theta0_ == 0.0; }
    int rank() const { return is_zero() ? 0 : d_; }
    int blocks() const { return is_zero() ? 0 : d_ / 2; }

    Eigen::MatrixXd matrix() const {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d_, d_);
        for (int b = 0; b < blocks(); ++b) {
            m(2 * b, 2 * b + 1) = theta0_;
            m(2 * b + 1, 2 * b) = -theta0_;
        }
        return m;
    }

    /// (s, theta r) evaluated without forming the matrix.
    double pairing(std::span<const double> s, std::span<const double> r) const {
        double acc = 0.0;
        for (int b = 0; b < blocks(); ++b)
            acc += s[2 * b] * r[2 * b + 1] - s[2 * b + 1] * r[2 * b];
        return theta0_ * acc;
    }

private:
    ThetaForm(int d, double t0) : d_(d), theta0_(t0) {}
    int d_;
    double theta0_;
};

// ---------------------------------------------------------------------------
// Uniform grids
// ---------------------------------------------------------------------------

/// Uniform tensor grid on [-L, L)^d with n points per axis, anchored at
/// the left edge: t_k = -L + k h with h = 2L/n. The origin is the node
/// k = n/2 on every axis.
struct GridSpec {
    int d = 2;
    double half_width = 8.0;
    int n = 64;

    GridSpec() = default;
    GridSpec(int dim, double L, int points) : d(dim), half_width(L), n(points) { validate(); }

    void validate() const {
        if (d < 1) throw DomainError("grid dimension must be positive");
        if (!(half_width > 0.0) || !std::isfinite(half_width)) throw DomainError("grid half-width must be positive");
        if (n < 4 || (n & (n - 1)) != 0)
            throw ShapeError("points per axis must be a power of two >= 4, got " + std::to_string(n));
    }

    double spacing() const { return 2.0 * half_width / n; }
    double cell_volume() const { return std::pow(spacing(), d); }
    double coordinate(int k) const { return -half_width + k * spacing(); }
    std::size_t size() const {
        std::size_t s = 1;
        for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(n);
        return s;
    }

    /// Axis indices of a flat (row-major) index.
    void unflatten(std::size_t flat, std::span<int> idx) const {
        for (int a = d - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(flat % n);
            flat /= n;
        }
    }
    std::size_t flatten(std::span<const int> idx) const {
        std::size_t f = 0;
        for (int a = 0; a < d; ++a) f = f * n + static_cast<std::size_t>(idx[a]);
        return f;
    }
    void point(std::size_t flat, std::span<double> x) const {
        for (int a = d - 1; a >= 0; --a) {
            x[a] = coordinate(static_cast<int>(flat % n));
            flat /= n;
        }
    }

    /// Frequency grid produced by the classical transform of this grid.
    GridSpec dual() const { return GridSpec(d, std::numbers::pi / spacing(), n); }

    bool same_as(const GridSpec& o) const {
        return d == o.d && n == o.n && std::abs(half_width - o.half_width) <= 1e-12 * half_width;
    }
};

/// Complex samples of a function on a GridSpec, row-major.
struct SymbolGrid {
    GridSpec spec;
    std::vector<cplx> values;

    SymbolGrid() = default;
    explicit SymbolGrid(const GridSpec& g) : spec(g), values(g.size(), cplx(0.0)) {}
    SymbolGrid(const GridSpec& g, std::vector<cplx> v) : spec(g), values(std::move(v)) {
        if (values.size() != spec.size()) throw ShapeError("sample count does not match grid");
    }

    std::size_t size() const { return values.size(); }
    cplx& operator[](std::size_t i) { return values[i]; }
    const cplx& operator[](std::size_t i) const { return values[i]; }

    /// Value at the origin node.
    cplx at_origin() const {
        std::vector<int> idx(spec.d, spec.n / 2);
        return values[spec.flatten(idx)];
    }

    /// Discrete L^2 norm with cell-volume weight.
    double l2_norm() const {
        double s = 0.0;
        for (const auto& v : values) s += std::norm(v);
        return std::sqrt(s * spec.cell_volume());
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : values) m = std::max(m, std::abs(v));
        return m;
    }

    SymbolGrid& operator+=(const SymbolGrid& o) {
        check_same(o);
        for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
        return *this;
    }
    SymbolGrid& operator-=(const SymbolGrid& o) {
        check_same(o);
        for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
        return *this;
    }
    SymbolGrid& operator*=(cplx s) {
        for (auto& v : values) v *= s;
        return *this;
    }
    friend SymbolGrid operator+(SymbolGrid a, const SymbolGrid& b) { return a += b; }
    friend SymbolGrid operator-(SymbolGrid a, const SymbolGrid& b) { return a -= b; }
    friend SymbolGrid operator*(cplx s, SymbolGrid a) { return a *= s; }

    void check_same(const SymbolGrid& o) const {
        if (!spec.same_as(o.spec)) throw ShapeError("symbol grids differ in shape");
    }
};

// ---------------------------------------------------------------------------
// Symbol families
// ---------------------------------------------------------------------------

using SymbolFunction = std::function<cplx(std::span<const double>)>;

/// Named analytic family plus its parameters. Fields that a family does not
/// use are ignored.
///
///  gaussian            amplitude * exp(-|t - center|^2 / (2 width^2))
///  modulated_gaussian  gaussian * exp(i <frequency, t>)
///  power               amplitude * |t|^exponent
///  bump                amplitude * exp(1 - 1 / (1 - |t - center|^2 / radius^2)) inside the ball
///  smooth_indicator    amplitude * erfc((|t - center| - radius) / softness) / 2
///  projector           (theta0 / 2 pi)^(d/2) * exp(-theta0 |t|^2 / 4)
///  constant            amplitude
struct SymbolSpec {
    std::string family = "gaussian";
    double amplitude = 1.0;
    double width = 1.0;
    double exponent = 0.0;
    double radius = 1.0;
    double softness = 0.1;
    double theta0 = 1.0;
    std::vector<double> center;
    std::vector<double> frequency;

    static const std::vector<std::string>& families() {
        static const std::vector<std::string> f{"gaussian", "modulated_gaussian", "power", "bump",
                                                "smooth_indicator", "projector", "constant"};
        return f;
    }

    SymbolFunction evaluator(int d) const {
        auto c = center;
        c.resize(d, 0.0);
        auto k = frequency;
        k.resize(d, 0.0);
        auto dist2 = [c](std::span<const double> t) {
            double s = 0.0;
            for (std::size_t i = 0; i < t.size(); ++i) s += (t[i] - c[i]) * (t[i] - c[i]);
            return s;
        };
        const double amp = amplitude;
        if (family == "gaussian" || family == "modulated_gaussian") {
            if (!(width > 0.0)) throw DomainError("gaussian width must be positive");
            const double w2 = 2.0 * width * width;
            const bool mod = family == "modulated_gaussian";
            return [=](std::span<const double> t) {
                cplx v = amp * std::exp(-dist2(t) / w2);
                if (mod) {
                    double ph = 0.0;
                    for (std::size_t i = 0; i < t.size(); ++i) ph += k[i] * t[i];
                    v *= std::polar(1.0, ph);
                }
                return v;
            };
        }
        if (family == "power") {
            const double lam = exponent;
            return [=](std::span<const double> t) {
                double r2 = 0.0;
                for (double x : t) r2 += x * x;
                return cplx(amp * std::pow(r2, 0.5 * lam));
            };
        }
        if (family == "bump") {
            if (!(radius > 0.0)) throw DomainError("bump radius must be positive");
            const double r2 = radius * radius;
            return [=](std::span<const double> t) {
                const double q = dist2(t) / r2;
                return q < 1.0 ? cplx(amp * std::exp(1.0 - 1.0 / (1.0 - q))) : cplx(0.0);
            };
        }
        if (family == "smooth_indicator") {
            if (!(radius > 0.0) || !(softness > 0.0)) throw DomainError("indicator radius and softness must be positive");
            const double rad = radius, soft = softness;
            return [=](std::span<const double> t) {
                return cplx(0.5 * amp * std::erfc((std::sqrt(dist2(t)) - rad) / soft));
            };
        }
        if (family == "projector") {
            if (!(theta0 > 0.0)) throw DomainError("projector needs theta0 > 0");
            const double th = theta0;
            const double pref = std::pow(th / (2.0 * std::numbers::pi), 0.5 * d);
            return [=](std::span<const double> t) {
                double r2 = 0.0;
                for (double x : t) r2 += x * x;
                return cplx(pref * std::exp(-0.25 * th * r2));
            };
        }
        if (family == "constant") {
            return [=](std::span<const double>) { return cplx(amp); };
        }
        std::string known;
        for (const auto& f : families()) known += (known.empty() ? "" : ", ") + f;
        throw ConfigError("unknown symbol family '" + family + "' (known: " + known + ")");
    }
};

/// Samples `fn` at every node. Any non-finite sample is rejected.
inline SymbolGrid sample_symbol(const SymbolFunction& fn, const GridSpec& grid) {
    grid.validate();
    SymbolGrid out(grid);
    std::vector<double> x(grid.d);
    for (std::size_t i = 0; i < out.size(); ++i) {
        grid.point(i, x);
        const cplx v = fn(x);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            std::string at;
            for (double c : x) at += (at.empty() ? "" : ", ") + std::to_string(c);
            throw NumericError("non-finite symbol sample at (" + at + ")");
        }
        out[i] = v;
    }
    return out;
}

inline SymbolGrid sample_symbol(const SymbolSpec& spec, const GridSpec& grid) {
    return sample_symbol(spec.evaluator(grid.d), grid);
}

// ---------------------------------------------------------------------------
// Classical Fourier transform
// ---------------------------------------------------------------------------

/// Quadrature approximation of  F(w) = c * sum_k f(t_k) exp(sign * i <w, t_k>) h^d
/// with c = 1 for sign = -1 and c = (2 pi)^-d for sign = +1. The output lives
/// on `grid.dual()`. With n a multiple of four, the two directions are exact
/// inverses of each other and Parseval holds with factor (2 pi)^d.
inline SymbolGrid classical_fourier(const SymbolGrid& f, int sign) {
    if (sign != 1 && sign != -1) throw DomainError("transform sign must be +1 or -1");
    const GridSpec& g = f.spec;
    const int n = g.n;
    const GridSpec out_spec = g.dual();
    std::vector<cplx> data = f.values;

    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    std::vector<cplx> line(n), res(n);

    // Stride walk over every 1-D line of the tensor grid along each axis.
    std::size_t stride = 1;
    for (int axis = g.d - 1; axis >= 0; --axis) {
        const std::size_t block = stride * n;
        for (std::size_t base = 0; base < data.size(); base += block) {
            for (std::size_t off = 0; off < stride; ++off) {
                for (int k = 0; k < n; ++k) {
                    const cplx v = data[base + off + k * stride];
                    line[k] = (k & 1) ? -v : v;
                }
                if (sign < 0)
                    fft.fwd(res, line);
                else
                    fft.inv(res, line);
                for (int j = 0; j < n; ++j) data[base + off + j * stride] = (j & 1) ? -res[j] : res[j];
            }
        }
        stride = block;
    }
    const double h = g.spacing();
    const double pref = sign < 0 ? std::pow(h, g.d) : std::pow(h / (2.0 * std::numbers::pi), g.d);
    for (auto& v : data) v *= pref;
    return SymbolGrid(out_spec, std::move(data));
}

// ---------------------------------------------------------------------------
// Convolutions
// ---------------------------------------------------------------------------

/// Quadrature approximation of the twisted convolution
///   (f * g)(r) = int f(t) g(r - t) exp(i/2 (t, theta r)) dt
/// on the common grid. Values of g outside the grid are treated as zero.
/// Cost is O(n^(2d)).
inline SymbolGrid twisted_convolution(const SymbolGrid& f, const SymbolGrid& g, const ThetaForm& theta) {
    f.check_same(g);
    const GridSpec& s = f.spec;
    if (theta.dim() != s.d) throw ShapeError("deformation dimension does not match grid");
    const int d = s.d, n = s.n, half = n / 2;
    const double vol = s.cell_volume();

    SymbolGrid out(s);
    std::vector<int> ri(d), ti(d);
    std::vector<double> r(d), w(d);
    // phase[a][k] = exp(i t_k w_a) where w = theta r / 2.
    std::vector<std::vector<cplx>> phase(d, std::vector<cplx>(n));
    Eigen::MatrixXd tm = theta.matrix();

    for (std::size_t ro = 0; ro < out.size(); ++ro) {
        s.unflatten(ro, ri);
        for (int a = 0; a < d; ++a) r[a] = s.coordinate(ri[a]);
        for (int a = 0; a < d; ++a) {
            double acc = 0.0;
            for (int b = 0; b < d; ++b) acc += tm(a, b) * r[b];
            w[a] = 0.5 * acc;
        }
        for (int a = 0; a < d; ++a)
            for (int k = 0; k < n; ++k) phase[a][k] = w[a] == 0.0 ? cplx(1.0) : std::polar(1.0, s.coordinate(k) * w[a]);

        // t index k, r - t index ri - k + half (node of -L shifted).
        cplx acc(0.0);
        const std::size_t total = s.size();
        for (std::size_t to = 0; to < total; ++to) {
            s.unflatten(to, ti);
            bool inside = true;
            std::size_t gi = 0;
            cplx ph(1.0);
            for (int a = 0; a < d; ++a) {
                const int j = ri[a] - ti[a] + half;
                if (j < 0 || j >= n) {
                    inside = false;
                    break;
                }
                gi = gi * n + static_cast<std::size_t>(j);
                ph *= phase[a][ti[a]];
            }
            if (inside) acc += f.values[to] * g.values[gi] * ph;
        }
        out[ro] = acc * vol;
    }
    return out;
}

/// Ordinary convolution; the same code path as the twisted one with
/// theta = 0, so the two agree bit for bit.
inline SymbolGrid convolution(const SymbolGrid& f, const SymbolGrid& g) {
    return twisted_convolution(f, g, ThetaForm::zero(f.spec.d));
}

}  // namespace qeuclid
