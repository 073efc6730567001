// linalg.hpp -- dense complex linear algebra: tensor products, spectra, projectors, fidelity

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace trinity {

using Complex    = std::complex<double>;
using Matrix     = Eigen::MatrixXcd;
using Vector     = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index      = Eigen::Index;

inline constexpr Complex iu{0.0, 1.0}; // imaginary unit

// ---- space bookkeeping ---------------------------------------------------

struct HilbertSpace {
    Index dim{0};
    std::vector<std::string> factor_labels;
};

inline HilbertSpace make_space(Index dim, std::string label) {
    if (dim <= 0) throw std::invalid_argument("make_space: dim must be > 0");
    return HilbertSpace{dim, {std::move(label)}};
}

inline HilbertSpace tensor(const HilbertSpace& a, const HilbertSpace& b) {
    for (const auto& la : a.factor_labels)
        for (const auto& lb : b.factor_labels)
            if (la == lb) throw std::invalid_argument("tensor: factor label collision: " + la);
    HilbertSpace out{a.dim * b.dim, a.factor_labels};
    out.factor_labels.insert(out.factor_labels.end(), b.factor_labels.begin(), b.factor_labels.end());
    return out;
}

// ---- constructors --------------------------------------------------------

inline Vector unit_vector(Index n, Index k) {
    if (k < 0 || k >= n) throw std::out_of_range("unit_vector: index out of range");
    Vector v = Vector::Zero(n);
    v(k) = 1.0;
    return v;
}

inline Matrix projector_onto(const Vector& v) { return v * v.adjoint(); }

// ---- tensor (Kronecker) products ------------------------------------------

template <typename DA, typename DB>
auto tensor(const Eigen::MatrixBase<DA>& a_expr, const Eigen::MatrixBase<DB>& b_expr) {
    if constexpr (DA::ColsAtCompileTime == 1 && DB::ColsAtCompileTime == 1) {
        const Vector a = a_expr, b = b_expr;
        Vector out(a.size() * b.size());
        for (Index i = 0; i < a.size(); ++i)
            out.segment(i * b.size(), b.size()) = a(i) * b;
        return out;
    } else {
        const Matrix a = a_expr, b = b_expr;
        Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
        for (Index i = 0; i < a.rows(); ++i)
            for (Index j = 0; j < a.cols(); ++j)
                out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        return out;
    }
}

// ---- norms and checks ------------------------------------------------------

inline double max_abs(const Matrix& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Matrix& a, double tol = 1e-12) {
    if (a.rows() != a.cols()) return false;
    return max_abs(a - a.adjoint()) <= tol;
}

inline double spectral_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    if (a.rows() == a.cols() && is_hermitian(a, 1e-13 * std::max(1.0, max_abs(a)))) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(a);
        if (es.info() != Eigen::Success) throw std::runtime_error("spectral_norm: eigensolve failed");
        return std::max(std::abs(es.eigenvalues().minCoeff()), std::abs(es.eigenvalues().maxCoeff()));
    }
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

inline Matrix comm(const Matrix& a, const Matrix& b) { return a * b - b * a; }

// ---- spectral decomposition ------------------------------------------------

struct SpectralDecomposition {
    RealVector eigenvalues;  // ascending
    Matrix eigenvectors;     // orthonormal columns, phase-fixed
    std::vector<std::pair<Index, Index>> degeneracy_blocks; // half-open [begin,end) index ranges
    double tol_eig{0.0};
};

inline SpectralDecomposition eig(const Matrix& h, double tol_eig_scale = 1e-9) {
    if (h.rows() != h.cols() || h.rows() == 0)
        throw std::invalid_argument("eig: operator must be square and nonempty");
    const double scale = std::max(1.0, max_abs(h));
    if (!is_hermitian(h, 1e-10 * scale))
        throw std::invalid_argument("eig: operator not Hermitian to tolerance");

    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eig: decomposition failed");

    SpectralDecomposition out;
    out.eigenvalues  = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors();
    out.tol_eig      = tol_eig_scale * scale;

    // deterministic global phase: first component of largest modulus made real-positive
    for (Index k = 0; k < out.eigenvectors.cols(); ++k) {
        Index imax = 0;
        double best = 0.0;
        for (Index i = 0; i < out.eigenvectors.rows(); ++i) {
            const double m = std::abs(out.eigenvectors(i, k));
            if (m > best + 1e-12) { best = m; imax = i; }
        }
        const Complex pivot = out.eigenvectors(imax, k);
        if (std::abs(pivot) > 0.0) out.eigenvectors.col(k) *= std::conj(pivot) / std::abs(pivot);
    }

    // group near-equal eigenvalues into degeneracy blocks
    Index begin = 0;
    for (Index k = 1; k <= out.eigenvalues.size(); ++k) {
        if (k == out.eigenvalues.size() || out.eigenvalues(k) - out.eigenvalues(k - 1) > out.tol_eig) {
            out.degeneracy_blocks.emplace_back(begin, k);
            begin = k;
        }
    }
    return out;
}

// ---- propagators ------------------------------------------------------------

inline Matrix evolve(const SpectralDecomposition& es, double t) {
    Vector phases(es.eigenvalues.size());
    for (Index k = 0; k < es.eigenvalues.size(); ++k)
        phases(k) = std::exp(-iu * es.eigenvalues(k) * t);
    return es.eigenvectors * phases.asDiagonal() * es.eigenvectors.adjoint();
}

// U(t) = exp(-i h t)
inline Matrix evolve(const Matrix& h, double t) { return evolve(eig(h), t); }

// ---- kernel projector ---------------------------------------------------------

// orthogonal projector onto span of eigenvectors with |eigenvalue| <= tol_zero
inline Matrix kernel_projector(const Matrix& h, double tol_zero = 1e-9) {
    const SpectralDecomposition es = eig(h);
    Matrix p = Matrix::Zero(h.rows(), h.cols());
    for (Index k = 0; k < es.eigenvalues.size(); ++k)
        if (std::abs(es.eigenvalues(k)) <= tol_zero)
            p += es.eigenvectors.col(k) * es.eigenvectors.col(k).adjoint();
    return p;
}

// ---- bipartite state helpers -----------------------------------------------

// reshape psi on H_left (x) H_right into the d_left x d_right coefficient matrix
inline Matrix coefficient_matrix(const Vector& psi, Index d_left, Index d_right) {
    if (psi.size() != d_left * d_right)
        throw std::invalid_argument("coefficient_matrix: size mismatch");
    Matrix m(d_left, d_right);
    for (Index l = 0; l < d_left; ++l)
        for (Index r = 0; r < d_right; ++r)
            m(l, r) = psi(l * d_right + r);
    return m;
}

// reduced density matrix on the right factor
inline Matrix reduced_density_right(const Vector& psi, Index d_left, Index d_right) {
    const Matrix m = coefficient_matrix(psi, d_left, d_right);
    return m.transpose() * m.conjugate();
}

inline RealVector schmidt_coefficients(const Vector& psi, Index d_left, Index d_right) {
    Eigen::JacobiSVD<Matrix> svd(coefficient_matrix(psi, d_left, d_right));
    return svd.singularValues();
}

// ---- fidelity ---------------------------------------------------------------

inline Matrix sqrt_psd(const Matrix& h, double tol = 1e-12) {
    const SpectralDecomposition es = eig(0.5 * (h + h.adjoint()));
    Vector d(es.eigenvalues.size());
    for (Index k = 0; k < es.eigenvalues.size(); ++k)
        d(k) = es.eigenvalues(k) > tol ? std::sqrt(es.eigenvalues(k)) : 0.0;
    return es.eigenvectors * d.asDiagonal() * es.eigenvectors.adjoint();
}

// Uhlmann fidelity F(rho,sigma) = (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2
inline double fidelity(const Matrix& rho, const Matrix& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
        throw std::invalid_argument("fidelity: dimension mismatch");
    const Matrix sr = sqrt_psd(rho);
    const double t = sqrt_psd(sr * sigma * sr).trace().real();
    return t * t;
}

// ---- deterministic randomness -------------------------------------------------
// hand-rolled transforms so streams are identical across standard libraries

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double gauss(std::mt19937_64& rng) {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline Matrix random_hermitian(Index n, std::mt19937_64& rng) {
    Matrix a(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            a(i, j) = Complex(gauss(rng), gauss(rng));
    return 0.5 * (a + a.adjoint());
}

inline Vector random_state(Index n, std::mt19937_64& rng) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    const double nrm = v.norm();
    return nrm > 0.0 ? Vector(v / nrm) : v;
}

} // namespace trinity
