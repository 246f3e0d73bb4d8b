#pragma once

#include <qeuclid/grid_symbols.hpp>

#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>

namespace qeuclid {

/// Discretised Schrodinger-type representation space.
///
/// For a canonical form with d/2 blocks the Hilbert space is L^2(R^(d/2)),
/// truncated to a uniform grid x_i = -R + i h_r with m points per block.
/// With a = sqrt(theta0), U(t) acts block-wise as
///   (U(t) psi)(x) = exp(-i theta0 t1 t2 / 2) exp(i a t1 x) psi(x - a t2),
/// which satisfies U(t) U(s) = exp(i/2 (t, theta s)) U(t + s).
/// The spacing is tied to the symbol grid through h_r = a h, so that
/// shifts by grid steps of t2 are exact index shifts.
struct RepSpace {
    ThetaForm theta = ThetaForm::zero(2);
    GridSpec grid;
    int m = 0;
    double a = 0.0;           ///< sqrt(theta0)
    double spacing = 0.0;     ///< h_r
    double half_width = 0.0;  ///< R = m h_r / 2
    double trace_weight = 0.0;

    int blocks() const { return theta.blocks(); }
    double coordinate(int i) const { return -half_width + i * spacing; }
    std::size_t dim() const {
        std::size_t s = 1;
        for (int b = 0; b < blocks(); ++b) s *= static_cast<std::size_t>(m);
        return s;
    }

    /// Builds the space that matches `grid` and calibrates the trace weight.
    static RepSpace matched(const GridSpec& grid, const ThetaForm& theta, int m);
};

/// Grid on which theta0 m h^2 = 2 pi with n = m. On such a grid the
/// truncated Weyl system is closed under products up to tail effects.
inline GridSpec balanced_grid(const ThetaForm& theta, int m) {
    if (theta.is_zero()) throw DomainError("balanced grids need a nondegenerate form");
    const double h = std::sqrt(2.0 * std::numbers::pi / (theta.theta0() * m));
    return GridSpec(theta.dim(), 0.5 * m * h, m);
}

/// Closed-form trace weight (theta0 / 2 pi)^(d/2) of the representation
/// above. The calibrated value must agree with it.
inline double trace_weight_closed_form(const ThetaForm& theta) {
    return std::pow(theta.theta0() / (2.0 * std::numbers::pi), 0.5 * theta.dim());
}

/// Bounded operator on the representation space together with the trace
/// weight c so that tau(x) = c Tr(kernel).
struct NcOperator {
    Eigen::MatrixXcd kernel;
    double trace_weight = 1.0;
    std::shared_ptr<const SymbolGrid> origin;

    Eigen::Index dim() const { return kernel.rows(); }
    cplx trace() const { return trace_weight * kernel.trace(); }

    NcOperator adjoint() const { return NcOperator{kernel.adjoint(), trace_weight, nullptr}; }

    friend NcOperator operator*(const NcOperator& x, const NcOperator& y) {
        check_pair(x, y);
        return NcOperator{x.kernel * y.kernel, x.trace_weight, nullptr};
    }
    friend NcOperator operator+(const NcOperator& x, const NcOperator& y) {
        check_pair(x, y);
        return NcOperator{x.kernel + y.kernel, x.trace_weight, nullptr};
    }
    friend NcOperator operator-(const NcOperator& x, const NcOperator& y) {
        check_pair(x, y);
        return NcOperator{x.kernel - y.kernel, x.trace_weight, nullptr};
    }
    friend NcOperator operator*(cplx s, const NcOperator& x) {
        return NcOperator{s * x.kernel, x.trace_weight, nullptr};
    }

    static void check_pair(const NcOperator& x, const NcOperator& y) {
        if (x.kernel.rows() != y.kernel.rows() || x.kernel.cols() != y.kernel.cols())
            throw ShapeError("operator dimensions differ");
        if (std::abs(x.trace_weight - y.trace_weight) > 1e-12 * std::abs(x.trace_weight))
            throw ShapeError("operators carry different trace weights");
    }
};

namespace detail {

inline void check_rep(const GridSpec& grid, const ThetaForm& theta, int m) {
    grid.validate();
    if (theta.is_zero()) throw DomainError("quantization needs a nondegenerate form; use the theta = 0 grid path");
    if (theta.dim() != grid.d) throw ShapeError("deformation dimension does not match symbol grid");
    if (m < 2 || m % 2 != 0) throw ShapeError("representation size must be even and >= 2");
}

/// Transforms axis `axis` of a row-major array with extents `dims` by the
/// matrix `e` (rows = new extent, cols = old extent).
inline std::vector<cplx> transform_axis(const std::vector<cplx>& in, std::vector<int>& dims, int axis,
                                        const Eigen::MatrixXcd& e) {
    std::size_t pre = 1, post = 1;
    for (int a = 0; a < axis; ++a) pre *= dims[a];
    for (std::size_t a = axis + 1; a < dims.size(); ++a) post *= dims[a];
    const int old_n = dims[axis];
    const int new_n = static_cast<int>(e.rows());
    using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    std::vector<cplx> out(pre * new_n * post);
    for (std::size_t p = 0; p < pre; ++p) {
        Eigen::Map<const RowMat> src(in.data() + p * old_n * post, old_n, post);
        Eigen::Map<RowMat> dst(out.data() + p * new_n * post, new_n, post);
        dst.noalias() = e * src;
    }
    dims[axis] = new_n;
    return out;
}

/// Kernel of the quantized symbol before the trace weight is attached.
inline Eigen::MatrixXcd quantize_kernel(const SymbolGrid& f, const ThetaForm& theta, const RepSpace& rep) {
    const GridSpec& g = f.spec;
    if (!g.same_as(rep.grid)) throw ShapeError("symbol grid is not the grid the representation was built for");
    const int n = g.n, m = rep.m, B = theta.blocks(), S = 2 * m - 1;
    const double h = g.spacing();

    // E[s][k] = exp(i w_s t_k), w_s = a (x_i + x_j) / 2 with s = i + j.
    Eigen::MatrixXcd e(S, n);
    for (int s = 0; s < S; ++s) {
        const double w = rep.a * (-2.0 * rep.half_width + s * rep.spacing) / 2.0;
        for (int k = 0; k < n; ++k) e(s, k) = std::polar(1.0, w * g.coordinate(k));
    }

    std::vector<int> dims(g.d, n);
    std::vector<cplx> G = f.values;
    for (int b = 0; b < B; ++b) G = transform_axis(G, dims, 2 * b, e);

    const std::size_t D = rep.dim();
    const double pref = std::pow(rep.spacing * h / rep.a, B);
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(D, D);
    std::vector<int> ii(B), jj(B);
    for (std::size_t I = 0; I < D; ++I) {
        std::size_t t = I;
        for (int b = B - 1; b >= 0; --b) {
            ii[b] = static_cast<int>(t % m);
            t /= m;
        }
        for (std::size_t J = 0; J < D; ++J) {
            std::size_t u = J;
            for (int b = B - 1; b >= 0; --b) {
                jj[b] = static_cast<int>(u % m);
                u /= m;
            }
            std::size_t gi = 0;
            bool inside = true;
            for (int b = 0; b < B; ++b) {
                const int k2 = ii[b] - jj[b] + n / 2;
                if (k2 < 0 || k2 >= n) {
                    inside = false;
                    break;
                }
                gi = (gi * S + static_cast<std::size_t>(ii[b] + jj[b])) * n + static_cast<std::size_t>(k2);
            }
            if (inside) M(I, J) = pref * G[gi];
        }
    }
    return M;
}

}  // namespace detail

/// Trace weight c such that c Tr(quantize(g)) = g(0) for the unit Gaussian g.
inline double calibrate_trace_constant(const ThetaForm& theta, const RepSpace& rep, const GridSpec& grid) {
    SymbolSpec unit;
    unit.family = "gaussian";
    const SymbolGrid g = sample_symbol(unit, grid);
    const cplx tr = detail::quantize_kernel(g, theta, rep).trace();
    if (!std::isfinite(tr.real()) || std::abs(tr) < 1e-300)
        throw CalibrationError("trace of the calibration Gaussian is below the numeric floor");
    if (std::abs(tr.imag()) > 1e-8 * std::abs(tr.real()))
        throw CalibrationError("trace of the calibration Gaussian is not real");
    return 1.0 / tr.real();
}

inline RepSpace RepSpace::matched(const GridSpec& grid, const ThetaForm& theta, int m) {
    detail::check_rep(grid, theta, m);
    RepSpace r;
    r.theta = theta;
    r.grid = grid;
    r.m = m;
    r.a = std::sqrt(theta.theta0());
    r.spacing = r.a * grid.spacing();
    r.half_width = 0.5 * m * r.spacing;
    r.trace_weight = calibrate_trace_constant(theta, r, grid);
    return r;
}

/// Weyl quantization lambda(f) = int f(t) U(t) dt on the discrete space.
inline NcOperator quantize(const SymbolGrid& f, const ThetaForm& theta, const RepSpace& rep) {
    detail::check_rep(f.spec, theta, rep.m);
    NcOperator x{detail::quantize_kernel(f, theta, rep), rep.trace_weight, std::make_shared<SymbolGrid>(f)};
    if (!x.kernel.allFinite()) throw NumericError("quantized kernel contains non-finite entries");
    return x;
}

/// Kernel of U(s) on the discrete space. The shift part of s must lie on
/// the symbol grid lattice; it is rounded to the nearest step otherwise.
inline Eigen::MatrixXcd weyl_unitary(std::span<const double> s, const RepSpace& rep) {
    const int B = rep.blocks(), m = rep.m;
    const double h = rep.grid.spacing(), th = rep.theta.theta0();
    const std::size_t D = rep.dim();
    Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(D, D);
    std::vector<int> ii(B);
    for (std::size_t I = 0; I < D; ++I) {
        std::size_t t = I, J = 0;
        for (int b = B - 1; b >= 0; --b) {
            ii[b] = static_cast<int>(t % m);
            t /= m;
        }
        cplx ph(1.0);
        bool inside = true;
        for (int b = 0; b < B; ++b) {
            const int sig = static_cast<int>(std::lround(s[2 * b + 1] / h));
            const int j = ii[b] - sig;
            if (j < 0 || j >= m) {
                inside = false;
                break;
            }
            J = J * m + static_cast<std::size_t>(j);
            ph *= std::polar(1.0, -0.5 * th * s[2 * b] * s[2 * b + 1] + rep.a * s[2 * b] * rep.coordinate(ii[b]));
        }
        if (inside) U(I, J) = ph;
    }
    return U;
}

struct FourierCoefficient {
    cplx value;
    bool low_confidence = false;
};

/// Recovers f(s) = tau(x U(s)^*). Flagged as low confidence when the shift
/// part of s is off the grid lattice or when s lies outside the inner half
/// of the symbol window, where truncation of the representation dominates.
inline FourierCoefficient fourier_coefficient(const NcOperator& x, std::span<const double> s, const ThetaForm& theta,
                                              const RepSpace& rep) {
    if (static_cast<int>(s.size()) != theta.dim()) throw ShapeError("frequency has wrong dimension");
    if (static_cast<std::size_t>(x.dim()) != rep.dim()) throw ShapeError("operator does not live on this space");
    const double h = rep.grid.spacing(), L = rep.grid.half_width;
    bool low = false;
    for (int j = 0; j < theta.dim(); ++j)
        if (std::abs(s[j]) > 0.5 * L) low = true;
    for (int b = 0; b < theta.blocks(); ++b) {
        const double q = s[2 * b + 1] / h;
        if (std::abs(q - std::round(q)) > 1e-9) low = true;
    }
    // Same row walk as weyl_unitary, conjugated and contracted with x.
    const int B = rep.blocks(), m = rep.m;
    const double th = theta.theta0();
    std::vector<int> ii(B);
    cplx acc(0.0);
    for (std::size_t I = 0; I < rep.dim(); ++I) {
        std::size_t t = I, J = 0;
        for (int b = B - 1; b >= 0; --b) {
            ii[b] = static_cast<int>(t % m);
            t /= m;
        }
        double ph = 0.0;
        bool inside = true;
        for (int b = 0; b < B; ++b) {
            const int j = ii[b] - static_cast<int>(std::lround(s[2 * b + 1] / h));
            if (j < 0 || j >= m) {
                inside = false;
                break;
            }
            J = J * m + static_cast<std::size_t>(j);
            ph += -0.5 * th * s[2 * b] * s[2 * b + 1] + rep.a * s[2 * b] * rep.coordinate(ii[b]);
        }
        if (inside) acc += x.kernel(I, J) * std::polar(1.0, -ph);
    }
    return {rep.trace_weight * acc, low};
}

/// Reads back the symbol of x at every node of the representation grid.
inline SymbolGrid dequantize(const NcOperator& x, const ThetaForm& theta, const RepSpace& rep) {
    const GridSpec& g = rep.grid;
    const int n = g.n, m = rep.m;
    if (static_cast<std::size_t>(x.dim()) != rep.dim()) throw ShapeError("operator does not live on this space");
    SymbolGrid out(g);
    if (theta.blocks() == 1) {
        // Column k2 collects the shifted diagonal x(i, i - (k2 - n/2)).
        Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(m, n);
        for (int k2 = 0; k2 < n; ++k2) {
            const int sig = k2 - n / 2;
            for (int i = 0; i < m; ++i) {
                const int j = i - sig;
                if (j >= 0 && j < m) diag(i, k2) = x.kernel(i, j);
            }
        }
        Eigen::MatrixXcd P(n, m);
        for (int k1 = 0; k1 < n; ++k1)
            for (int i = 0; i < m; ++i) P(k1, i) = std::polar(1.0, -rep.a * g.coordinate(k1) * rep.coordinate(i));
        const Eigen::MatrixXcd V = P * diag;
        const double th = theta.theta0();
        for (int k1 = 0; k1 < n; ++k1)
            for (int k2 = 0; k2 < n; ++k2) {
                const double s1 = g.coordinate(k1), s2 = g.coordinate(k2);
                out[static_cast<std::size_t>(k1) * n + k2] =
                    rep.trace_weight * std::polar(1.0, 0.5 * th * s1 * s2) * V(k1, k2);
            }
        return out;
    }
    std::vector<double> s(g.d);
    for (std::size_t i = 0; i < out.size(); ++i) {
        g.point(i, s);
        out[i] = fourier_coefficient(x, s, theta, rep).value;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Binary dump
// ---------------------------------------------------------------------------

/// Layout: 8-byte magic "QEOPDUMP", uint64 rows, uint64 cols, double trace
/// weight, then rows*cols (re, im) double pairs in row-major order. Native
/// little-endian byte order.
inline void write_operator(const std::string& path, const NcOperator& x) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DomainError("cannot open " + path + " for writing");
    const char magic[8] = {'Q', 'E', 'O', 'P', 'D', 'U', 'M', 'P'};
    os.write(magic, 8);
    const std::uint64_t r = x.kernel.rows(), c = x.kernel.cols();
    os.write(reinterpret_cast<const char*>(&r), sizeof r);
    os.write(reinterpret_cast<const char*>(&c), sizeof c);
    os.write(reinterpret_cast<const char*>(&x.trace_weight), sizeof(double));
    for (std::uint64_t i = 0; i < r; ++i)
        for (std::uint64_t j = 0; j < c; ++j) {
            const double pair[2] = {x.kernel(i, j).real(), x.kernel(i, j).imag()};
            os.write(reinterpret_cast<const char*>(pair), sizeof pair);
        }
}

inline NcOperator read_operator(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DomainError("cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::string(magic, 8) != "QEOPDUMP") throw ShapeError(path + " is not an operator dump");
    std::uint64_t r = 0, c = 0;
    NcOperator x;
    is.read(reinterpret_cast<char*>(&r), sizeof r);
    is.read(reinterpret_cast<char*>(&c), sizeof c);
    is.read(reinterpret_cast<char*>(&x.trace_weight), sizeof(double));
    x.kernel.resize(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (std::uint64_t i = 0; i < r; ++i)
        for (std::uint64_t j = 0; j < c; ++j) {
            double pair[2];
            is.read(reinterpret_cast<char*>(pair), sizeof pair);
            x.kernel(i, j) = cplx(pair[0], pair[1]);
        }
    if (!is) throw ShapeError(path + " is truncated");
    return x;
}

}  // namespace qeuclid
