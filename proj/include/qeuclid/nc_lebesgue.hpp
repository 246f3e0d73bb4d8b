#pragma once

#include <qeuclid/weyl_rep.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <limits>

namespace qeuclid {

/// Singular values in non-increasing order together with the weight that
/// each one carries in the trace: tau(|x|^p) = weight * sum sigma_k^p.
struct SingularProfile {
    std::vector<double> sigma;
    double weight = 1.0;
};

namespace detail {
inline void finish_profile(std::vector<double>& s, double relative_floor = 1e-12) {
    std::sort(s.begin(), s.end(), std::greater<>());
    const double floor = s.empty() ? 0.0 : relative_floor * s.front();
    for (auto& v : s)
        if (v < floor) v = 0.0;
    while (!s.empty() && s.back() == 0.0) s.pop_back();
}

inline bool is_hermitian(const Eigen::MatrixXcd& k) {
    const double scale = k.norm();
    return (k - k.adjoint()).norm() <= 1e-13 * std::max(scale, 1e-300);
}
}  // namespace detail

/// Singular values of an operator. Hermitian kernels take the eigenvalue
/// route (|eigenvalues|); everything else goes through an SVD. Values below
/// 1e-12 of the largest are dropped.
inline SingularProfile singular_profile(const NcOperator& x) {
    if (!x.kernel.allFinite()) throw NumericError("operator has non-finite entries");
    std::vector<double> s;
    if (detail::is_hermitian(x.kernel)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(x.kernel, Eigen::EigenvaluesOnly);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) s.push_back(std::abs(es.eigenvalues()(i)));
    } else {
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(x.kernel);
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) s.push_back(svd.singularValues()(i));
    }
    detail::finish_profile(s);
    return {std::move(s), x.trace_weight};
}

/// Commutative path: the samples of f are the values of a function and the
/// trace is `measure_scale` times the Lebesgue integral.
inline SingularProfile singular_profile(const SymbolGrid& f, double measure_scale = 1.0) {
    std::vector<double> s;
    s.reserve(f.size());
    for (const auto& v : f.values) {
        const double a = std::abs(v);
        if (!std::isfinite(a)) throw NumericError("non-finite sample in commutative profile");
        s.push_back(a);
    }
    // Samples are exact function values, so no noise floor applies.
    detail::finish_profile(s, 0.0);
    return {std::move(s), measure_scale * f.spec.cell_volume()};
}

inline void check_exponent(double p) {
    if (!(p >= 1.0)) throw DomainError("exponent must lie in [1, inf], got " + std::to_string(p));
}

/// Generalised singular value mu(t) = sigma_{floor(t / weight) + 1}
/// (one-based), i.e. the right-continuous decreasing rearrangement.
inline double mu(double t, const SingularProfile& prof) {
    if (!(t >= 0.0)) throw DomainError("mu needs t >= 0");
    // Largest k with k * weight <= t, robust against t / weight rounding
    // just below an integer at a step corner.
    double k = std::floor(t / prof.weight);
    if ((k + 1.0) * prof.weight <= t) k += 1.0;
    if (k > 0.0 && k * prof.weight > t) k -= 1.0;
    if (k >= static_cast<double>(prof.sigma.size())) return 0.0;
    return prof.sigma[static_cast<std::size_t>(k)];
}

inline double lp_norm(const SingularProfile& prof, double p) {
    check_exponent(p);
    if (prof.sigma.empty()) return 0.0;
    if (std::isinf(p)) return prof.sigma.front();
    // Scale by the largest value to keep sigma^p representable.
    const double top = prof.sigma.front();
    double acc = 0.0;
    for (double s : prof.sigma) acc += std::pow(s / top, p);
    return top * std::pow(prof.weight * acc, 1.0 / p);
}

/// sup_t t^(1/p) mu(t). mu is constant on [k c, (k+1) c), so the supremum
/// is the maximum of ((k+1) c)^(1/p) sigma_k over the corners.
inline double weak_lp_norm(const SingularProfile& prof, double p) {
    check_exponent(p);
    if (prof.sigma.empty()) return 0.0;
    if (std::isinf(p)) return prof.sigma.front();
    double best = 0.0;
    for (std::size_t k = 0; k < prof.sigma.size(); ++k)
        best = std::max(best, std::pow((k + 1) * prof.weight, 1.0 / p) * prof.sigma[k]);
    return best;
}

inline double lp_norm(const NcOperator& x, double p) { return lp_norm(singular_profile(x), p); }

/// |x|^p = (x^* x)^(p/2). Even integer powers are plain products; all
/// other exponents go through the spectral decomposition of x^* x.
inline NcOperator abs_power(const NcOperator& x, double p) {
    if (!(p > 0.0)) throw DomainError("abs_power needs p > 0");
    const Eigen::MatrixXcd h = x.kernel.adjoint() * x.kernel;
    if (p == std::floor(p) && static_cast<long>(p) % 2 == 0 && p <= 16) {
        Eigen::MatrixXcd r = h;
        for (long k = 2; k < static_cast<long>(p); k += 2) r = r * h;
        return NcOperator{std::move(r), x.trace_weight, nullptr};
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed in abs_power");
    Eigen::VectorXd lam = es.eigenvalues();
    for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = std::pow(std::max(lam(i), 0.0), 0.5 * p);
    const Eigen::MatrixXcd& v = es.eigenvectors();
    return NcOperator{v * lam.asDiagonal() * v.adjoint(), x.trace_weight, nullptr};
}

/// Smallest eigenvalue of the Hermitian part, used as a positivity floor.
inline double min_eigenvalue(const NcOperator& x) {
    const Eigen::MatrixXcd h = 0.5 * (x.kernel + x.kernel.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace qeuclid
