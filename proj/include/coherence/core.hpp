// Core numerical types for coherence-kit: validated quantum states and the
// dense Hermitian linear algebra every other module is built on.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace coherence {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input does not satisfy the contract of the type or operation.
class ValidationError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A numerical routine produced a result that fails its own post-condition.
class NumericalError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Tolerances

/// All validation and comparison thresholds used by the library.
struct Tolerances {
    double construction = 1e-12;   ///< normalization, hermiticity and trace of states
    double spectral = 1e-10;       ///< hermiticity of generic inputs, eigen reconstruction
    double psd = 1e-10;            ///< most negative eigenvalue accepted for a state
    double certificate = 1e-10;    ///< optimality certificate margins
    double clip_warning = 1e-9;    ///< eigenvalue clipping reported as a warning above this
};

inline constexpr Tolerances default_tolerances{};

namespace detail {

inline std::string format_double(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

inline bool all_finite(const ComplexMatrix& m)
{
    return m.allFinite();
}

/// Neumaier compensated sum.
inline double compensated_sum(std::span<const double> values)
{
    double sum = 0.0;
    double c = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            c += (sum - t) + v;
        else
            c += (v - t) + sum;
        sum = t;
    }
    return sum + c;
}

inline void require_square(const ComplexMatrix& m, const char* what)
{
    if (m.rows() != m.cols())
        throw DimensionMismatch(std::string(what) + ": matrix is " + std::to_string(m.rows()) +
                                "x" + std::to_string(m.cols()) + ", expected square");
}

/// Throws naming the first entry pair that breaks hermiticity by more than tol.
inline void require_hermitian(const ComplexMatrix& m, double tol, const char* what)
{
    require_square(m, what);
    for (Index j = 0; j < m.cols(); ++j) {
        for (Index i = j; i < m.rows(); ++i) {
            const double gap = std::abs(m(i, j) - std::conj(m(j, i)));
            if (!(gap <= tol)) {
                throw ValidationError(std::string(what) + ": not Hermitian, entries (" +
                                      std::to_string(i) + "," + std::to_string(j) + ") and (" +
                                      std::to_string(j) + "," + std::to_string(i) +
                                      ") differ by " + format_double(gap));
            }
        }
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Spectral toolkit

/// Eigenvalues in descending order with matching orthonormal eigenvector columns.
struct SpectralDecomposition {
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;

    Index size() const { return eigenvalues.size(); }

    ComplexMatrix reconstruct() const
    {
        return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
    }
};

inline SpectralDecomposition hermitian_eig(const ComplexMatrix& m,
                                           const Tolerances& tol = default_tolerances)
{
    detail::require_hermitian(m, tol.spectral, "hermitian_eig");
    if (!detail::all_finite(m))
        throw ValidationError("hermitian_eig: matrix has non-finite entries");
    const Index n = m.rows();
    SpectralDecomposition out;
    if (n == 0)
        return out;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw NumericalError("hermitian_eig: eigensolver did not converge");
    // Eigen returns ascending order.
    out.eigenvalues = solver.eigenvalues().reverse();
    out.eigenvectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

/// Descending eigenvalues only; cheaper than hermitian_eig.
inline RealVector hermitian_eigenvalues(const ComplexMatrix& m,
                                        const Tolerances& tol = default_tolerances)
{
    detail::require_hermitian(m, tol.spectral, "hermitian_eigenvalues");
    if (!detail::all_finite(m))
        throw ValidationError("hermitian_eigenvalues: matrix has non-finite entries");
    if (m.rows() == 0)
        return RealVector();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericalError("hermitian_eigenvalues: eigensolver did not converge");
    return solver.eigenvalues().reverse();
}

/// Sum of absolute eigenvalues.
inline double trace_norm(const ComplexMatrix& m, const Tolerances& tol = default_tolerances)
{
    return hermitian_eigenvalues(m, tol).cwiseAbs().sum();
}

/// Largest absolute eigenvalue.
inline double operator_norm(const ComplexMatrix& m, const Tolerances& tol = default_tolerances)
{
    const RealVector ev = hermitian_eigenvalues(m, tol);
    return ev.size() == 0 ? 0.0 : ev.cwiseAbs().maxCoeff();
}

/// Transpose of the second tensor factor of an (dim_a*dim_b)-square matrix:
/// entry (ij,kl) of the output is entry (il,kj) of the input.
inline ComplexMatrix partial_transpose(const ComplexMatrix& m, Index dim_a, Index dim_b)
{
    if (dim_a <= 0 || dim_b <= 0 || m.rows() != dim_a * dim_b || m.cols() != dim_a * dim_b)
        throw DimensionMismatch("partial_transpose: matrix is " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + ", expected " +
                                std::to_string(dim_a * dim_b) + " square for " +
                                std::to_string(dim_a) + "x" + std::to_string(dim_b) + " system");
    ComplexMatrix out(m.rows(), m.cols());
    for (Index i = 0; i < dim_a; ++i)
        for (Index j = 0; j < dim_b; ++j)
            for (Index k = 0; k < dim_a; ++k)
                for (Index l = 0; l < dim_b; ++l)
                    out(i * dim_b + j, k * dim_b + l) = m(i * dim_b + l, k * dim_b + j);
    return out;
}

inline ComplexMatrix partial_transpose(const ComplexMatrix& m, Index n)
{
    return partial_transpose(m, n, n);
}

inline double min_partial_transpose_eigenvalue(const ComplexMatrix& m, Index n,
                                               const Tolerances& tol = default_tolerances)
{
    const RealVector ev = hermitian_eigenvalues(partial_transpose(m, n), tol);
    return ev(ev.size() - 1);
}

// ---------------------------------------------------------------------------
// States

/// Unit complex amplitude vector. Any nonzero finite vector is accepted and
/// renormalized.
class PureState {
public:
    explicit PureState(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes))
    {
        if (amplitudes_.size() == 0)
            throw ValidationError("PureState: empty amplitude vector");
        if (!amplitudes_.allFinite())
            throw ValidationError("PureState: non-finite amplitude");
        const double norm = amplitudes_.norm();
        if (!(norm > 0.0))
            throw ValidationError("PureState: zero vector cannot be normalized");
        amplitudes_ /= norm;
    }

    static PureState from_real(std::span<const double> values)
    {
        ComplexVector v(static_cast<Index>(values.size()));
        for (std::size_t i = 0; i < values.size(); ++i)
            v(static_cast<Index>(i)) = values[i];
        return PureState(std::move(v));
    }

    static PureState from_real(std::initializer_list<double> values)
    {
        return from_real(std::span<const double>(values.begin(), values.size()));
    }

    static PureState basis(Index n, Index i)
    {
        if (i < 0 || i >= n)
            throw ValidationError("PureState::basis: index out of range");
        ComplexVector v = ComplexVector::Zero(n);
        v(i) = 1.0;
        return PureState(std::move(v));
    }

    /// All moduli equal to 1/sqrt(n).
    static PureState maximally_coherent(Index n)
    {
        if (n <= 0)
            throw ValidationError("PureState::maximally_coherent: n must be positive");
        return PureState(ComplexVector::Constant(n, Complex(1.0, 0.0)));
    }

    Index dim() const { return amplitudes_.size(); }
    const ComplexVector& amplitudes() const { return amplitudes_; }
    Complex operator[](Index i) const { return amplitudes_(i); }

    RealVector moduli() const { return amplitudes_.cwiseAbs(); }
    RealVector populations() const { return amplitudes_.cwiseAbs2(); }

    ComplexMatrix projector() const { return amplitudes_ * amplitudes_.adjoint(); }

    /// True when |x><x| is diagonal, i.e. at most one amplitude is nonzero.
    bool is_incoherent() const
    {
        Index nonzero = 0;
        for (Index i = 0; i < dim(); ++i)
            if (amplitudes_(i) != Complex(0.0, 0.0))
                ++nonzero;
        return nonzero <= 1;
    }

private:
    ComplexVector amplitudes_;
};

/// Non-negative reals summing to one.
class ProbabilityVector {
public:
    explicit ProbabilityVector(RealVector p, const Tolerances& tol = default_tolerances)
        : p_(std::move(p))
    {
        if (p_.size() == 0)
            throw ValidationError("ProbabilityVector: empty vector");
        for (Index i = 0; i < p_.size(); ++i) {
            if (!std::isfinite(p_(i)) || p_(i) < 0.0)
                throw ValidationError("ProbabilityVector: entry " + std::to_string(i) + " = " +
                                      detail::format_double(p_(i)) + " is not a non-negative real");
        }
        const double sum = detail::compensated_sum(std::span<const double>(p_.data(), p_.size()));
        if (std::abs(sum - 1.0) > tol.construction)
            throw ValidationError("ProbabilityVector: entries sum to " +
                                  detail::format_double(sum) + ", expected 1");
    }

    static ProbabilityVector uniform(Index n)
    {
        return ProbabilityVector(RealVector::Constant(n, 1.0 / static_cast<double>(n)));
    }

    Index size() const { return p_.size(); }
    const RealVector& values() const { return p_; }
    double operator[](Index i) const { return p_(i); }

private:
    RealVector p_;
};

/// Diagonal density matrix, stored as its probability vector.
class IncoherentState {
public:
    explicit IncoherentState(RealVector diag, const Tolerances& tol = default_tolerances)
        : p_(std::move(diag), tol)
    {
    }
    explicit IncoherentState(ProbabilityVector p) : p_(std::move(p)) {}

    static IncoherentState maximally_mixed(Index n)
    {
        return IncoherentState(ProbabilityVector::uniform(n));
    }

    Index dim() const { return p_.size(); }
    const RealVector& diag() const { return p_.values(); }
    double operator[](Index i) const { return p_[i]; }
    const ProbabilityVector& probabilities() const { return p_; }

    ComplexMatrix matrix() const
    {
        return p_.values().cast<Complex>().asDiagonal();
    }

    Index rank() const { return (p_.values().array() > 0.0).count(); }

private:
    ProbabilityVector p_;
};

/// Hermitian, positive semidefinite, trace-one matrix.
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix m, const Tolerances& tol = default_tolerances)
        : m_(std::move(m))
    {
        if (m_.rows() == 0)
            throw ValidationError("DensityMatrix: empty matrix");
        if (!detail::all_finite(m_))
            throw ValidationError("DensityMatrix: non-finite entry");
        detail::require_hermitian(m_, tol.construction, "DensityMatrix");
        const double tr = m_.trace().real();
        if (std::abs(tr - 1.0) > tol.construction)
            throw ValidationError("DensityMatrix: trace is " + detail::format_double(tr) +
                                  ", expected 1");
        // Symmetrize so downstream eigensolvers see an exactly Hermitian matrix.
        m_ = (0.5 * (m_ + m_.adjoint())).eval();
        const RealVector ev = hermitian_eigenvalues(m_, tol);
        if (ev(ev.size() - 1) < -tol.psd)
            throw ValidationError("DensityMatrix: minimum eigenvalue " +
                                  detail::format_double(ev(ev.size() - 1)) + " is negative");
    }

    static DensityMatrix from_pure(const PureState& x) { return DensityMatrix(x.projector()); }

    static DensityMatrix from_incoherent(const IncoherentState& d)
    {
        return DensityMatrix(d.matrix());
    }

    static DensityMatrix maximally_mixed(Index n)
    {
        return DensityMatrix(ComplexMatrix::Identity(n, n) / static_cast<double>(n));
    }

    Index dim() const { return m_.rows(); }
    const ComplexMatrix& matrix() const { return m_; }
    Complex operator()(Index i, Index j) const { return m_(i, j); }

    RealVector diagonal() const { return m_.diagonal().real(); }

    /// The state with every off-diagonal entry deleted.
    IncoherentState dephased() const
    {
        RealVector d = diagonal().cwiseMax(0.0);
        d /= d.sum();
        return IncoherentState(std::move(d));
    }

private:
    ComplexMatrix m_;
};

/// Maximum absolute off-diagonal entry.
inline double max_offdiagonal(const ComplexMatrix& m)
{
    double best = 0.0;
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i)
            if (i != j)
                best = std::max(best, std::abs(m(i, j)));
    return best;
}

/// Sum of absolute off-diagonal entries.
inline double offdiagonal_mass(const ComplexMatrix& m)
{
    double total = 0.0;
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i)
            if (i != j)
                total += std::abs(m(i, j));
    return total;
}

inline ComplexMatrix partial_transpose(const DensityMatrix& rho, Index n)
{
    return partial_transpose(rho.matrix(), n);
}

/// True when the partial transpose of rho (as an n x n system) has no eigenvalue below -tol.
inline bool is_ppt(const DensityMatrix& rho, Index n, double tol = default_tolerances.psd)
{
    return min_partial_transpose_eigenvalue(rho.matrix(), n) >= -tol;
}

} // namespace coherence
