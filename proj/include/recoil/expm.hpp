#pragma once

// Exponentials of anti-Hermitian generators through the eigendecomposition
// of the Hermitian matrix i*S. Real eigenvalues make the result unitary to
// rounding.

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "recoil/errors.hpp"

namespace recoil {

/// Tridiagonal anti-Hermitian S with S(k,k) = i*diagonal[k],
/// S(k+1,k) = lower[k] and S(k,k+1) = -conj(lower[k]).
struct TridiagonalGenerator {
    std::vector<double> diagonal;
    std::vector<std::complex<double>> lower;

    std::size_t size() const { return diagonal.size(); }

    Eigen::MatrixXcd dense() const {
        const auto n = static_cast<Eigen::Index>(diagonal.size());
        Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
        for (Eigen::Index k = 0; k < n; ++k) s(k, k) = {0.0, diagonal[static_cast<std::size_t>(k)]};
        for (Eigen::Index k = 0; k + 1 < n; ++k) {
            s(k + 1, k) = lower[static_cast<std::size_t>(k)];
            s(k, k + 1) = -std::conj(lower[static_cast<std::size_t>(k)]);
        }
        return s;
    }
};

struct Propagator {
    Eigen::MatrixXcd unitary;
    double scale = 1.0;

    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const { return unitary * v; }

    /// max |U^dagger U - I| entry.
    double unitarity_defect() const {
        const auto n = unitary.rows();
        return (unitary.adjoint() * unitary - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
    }
};

namespace detail {

// Eigendecomposition of K = -iS = D T D^dagger with T real symmetric
// tridiagonal. A diagonal phase gauge D makes the off-diagonal of T real and
// non-negative.
struct GaugedSpectrum {
    Eigen::VectorXcd gauge;
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
};

inline GaugedSpectrum gauged_spectrum(const TridiagonalGenerator& gen) {
    const auto n = static_cast<Eigen::Index>(gen.diagonal.size());
    if (n == 0) throw ShapeError("empty generator");
    if (gen.lower.size() + 1 != gen.diagonal.size())
        throw ShapeError("tridiagonal generator needs n-1 off-diagonal entries");

    GaugedSpectrum out;
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(std::max<Eigen::Index>(n - 1, 1));
    out.gauge.resize(n);
    out.gauge(0) = 1.0;
    for (Eigen::Index k = 0; k < n; ++k) diag(k) = gen.diagonal[static_cast<std::size_t>(k)];
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        const std::complex<double> kk = std::complex<double>(0.0, -1.0) * gen.lower[static_cast<std::size_t>(k)];
        const double mag = std::abs(kk);
        sub(k) = mag;
        out.gauge(k + 1) = mag > 0.0 ? out.gauge(k) * (kk / mag) : out.gauge(k);
    }
    if (n == 1) {
        out.eigenvalues = diag;
        out.eigenvectors = Eigen::MatrixXd::Identity(1, 1);
        return out;
    }
    // The QR iteration is run on the matrix scaled to unit max-norm, which the
    // tridiagonal entry point does not do by itself.
    const double norm = std::max(diag.cwiseAbs().maxCoeff(), sub.head(n - 1).maxCoeff());
    const double unit = norm > 0.0 ? norm : 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag / unit, sub.head(n - 1) / unit, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "tridiagonal eigensolver did not converge (n=" << n
            << ", max|diag|=" << diag.cwiseAbs().maxCoeff() << ", max|offdiag|=" << sub.head(n - 1).maxCoeff()
            << ")";
        throw NumericError(msg.str());
    }
    out.eigenvalues = solver.eigenvalues() * unit;
    out.eigenvectors = solver.eigenvectors();
    return out;
}

}  // namespace detail

/// exp(scale * S) for tridiagonal anti-Hermitian S.
inline Propagator expm_structured(const TridiagonalGenerator& gen, double scale) {
    const detail::GaugedSpectrum sp = detail::gauged_spectrum(gen);
    const auto n = sp.eigenvalues.size();
    Eigen::VectorXcd phases(n);
    for (Eigen::Index k = 0; k < n; ++k) phases(k) = std::polar(1.0, scale * sp.eigenvalues(k));
    const Eigen::MatrixXcd dv = sp.gauge.asDiagonal() * sp.eigenvectors.cast<std::complex<double>>();
    return {dv * phases.asDiagonal() * dv.adjoint(), scale};
}

/// exp(scale * S) v without forming the full propagator.
inline Eigen::VectorXcd expm_structured_apply(const TridiagonalGenerator& gen, double scale,
                                              const Eigen::VectorXcd& v) {
    const detail::GaugedSpectrum sp = detail::gauged_spectrum(gen);
    if (v.size() != sp.eigenvalues.size()) throw ShapeError("vector length does not match generator");
    const Eigen::VectorXcd w = sp.gauge.conjugate().cwiseProduct(v);
    // V^T w with real V, split to keep the products real.
    Eigen::VectorXd re = sp.eigenvectors.transpose() * w.real();
    Eigen::VectorXd im = sp.eigenvectors.transpose() * w.imag();
    Eigen::VectorXcd y(re.size());
    for (Eigen::Index k = 0; k < y.size(); ++k)
        y(k) = std::complex<double>(re(k), im(k)) * std::polar(1.0, scale * sp.eigenvalues(k));
    re = sp.eigenvectors * y.real();
    im = sp.eigenvectors * y.imag();
    Eigen::VectorXcd out(re.size());
    for (Eigen::Index k = 0; k < out.size(); ++k) out(k) = sp.gauge(k) * std::complex<double>(re(k), im(k));
    return out;
}

namespace detail {

// Eigen-decomposition of K = -i S for dense anti-Hermitian S.
inline Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hermitian_spectrum(const Eigen::MatrixXcd& s) {
    if (s.rows() != s.cols() || s.rows() == 0) throw ShapeError("generator must be square and non-empty");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(std::complex<double>(0.0, -1.0) * s);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "Hermitian eigensolver did not converge (n=" << s.rows()
            << ", max|entry|=" << s.cwiseAbs().maxCoeff() << ")";
        throw NumericError(msg.str());
    }
    return solver;
}

inline Eigen::VectorXcd phase_factors(const Eigen::VectorXd& eigenvalues, double scale) {
    Eigen::VectorXcd out(eigenvalues.size());
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = std::polar(1.0, scale * eigenvalues(i));
    return out;
}

}  // namespace detail

/// exp(scale * S) for a dense anti-Hermitian S.
inline Propagator expm_anti_hermitian(const Eigen::MatrixXcd& s, double scale) {
    const auto solver = detail::hermitian_spectrum(s);
    const Eigen::MatrixXcd& v = solver.eigenvectors();
    return {v * detail::phase_factors(solver.eigenvalues(), scale).asDiagonal() * v.adjoint(), scale};
}

/// exp(scale * S) v for a dense anti-Hermitian S.
inline Eigen::VectorXcd expm_anti_hermitian_apply(const Eigen::MatrixXcd& s, double scale,
                                                  const Eigen::VectorXcd& v) {
    if (v.size() != s.rows()) throw ShapeError("vector length does not match generator");
    const auto solver = detail::hermitian_spectrum(s);
    const Eigen::MatrixXcd& u = solver.eigenvectors();
    const Eigen::VectorXcd y = detail::phase_factors(solver.eigenvalues(), scale).cwiseProduct(u.adjoint() * v);
    return u * y;
}

}  // namespace recoil
