// Optimality certificates for nearest incoherent states.
//
// The feasible perturbations F of an incoherent D (D - F incoherent) form a
// polytope with n extreme points. D minimizes the trace distance to a state A
// iff some dual witness H (a Hermitian contraction aligned with A - D) has
// tr(F H) >= 0 at every extreme point. For pure states the witness is the top
// eigenprojection |v><v| of |x><x| - D; for mixed states with invertible A - D
// it is the sign matrix of A - D.

#pragma once

#include "core.hpp"

#include <limits>
#include <vector>

namespace coherence {

/// x is incoherent: the distance is zero and the certificate says nothing.
class IncoherentInputError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// The top eigenvalue is degenerate, so the dual witness is not determined.
class CertificateInconclusive : public Error {
public:
    using Error::Error;
};

/// A - D is singular; certifying it needs a semidefinite feasibility search.
class NonInvertibleCase : public Error {
public:
    using Error::Error;
};

/// Extreme perturbation for index i: f_j = d_j for j != i and f_i = d_i - 1.
struct ExtremePerturbation {
    Index index = 0;
    RealVector values;
};

inline std::vector<ExtremePerturbation> extreme_points(const IncoherentState& d)
{
    const Index n = d.dim();
    std::vector<ExtremePerturbation> out;
    out.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        RealVector f = d.diag();
        f(i) -= 1.0;
        out.push_back(ExtremePerturbation{i, std::move(f)});
    }
    return out;
}

/// <v|diag(f)|v>, contracted entry by entry.
inline double perturbation_expectation(const ComplexVector& v, const ExtremePerturbation& f)
{
    return (v.adjoint() * (f.values.cast<Complex>().asDiagonal() * v))(0, 0).real();
}

/// The same quantity through the closed form sum_j d_j |v_j|^2 - |v_i|^2.
inline double perturbation_expectation(const ComplexVector& v, const IncoherentState& d, Index i)
{
    const RealVector w = v.cwiseAbs2();
    return d.diag().dot(w) - w(i);
}

struct PureCertificate {
    bool optimal = false;
    double margin = 0.0;          ///< min over extreme points of <v|F_i|v>
    Index argmin = 0;             ///< index of the extreme point attaining the margin
    double top_eigenvalue = 0.0;  ///< equals the operator-norm distance
    double gap = 0.0;             ///< top eigenvalue minus the second one
    ComplexVector v;              ///< unit top eigenvector of |x><x| - D
    double tol = 0.0;
};

inline PureCertificate verify_pure_optimality(const PureState& x, const IncoherentState& d,
                                              double tol = default_tolerances.certificate)
{
    if (d.dim() != x.dim())
        throw DimensionMismatch("verify_pure_optimality: state has dimension " +
                                std::to_string(x.dim()) + ", candidate has " +
                                std::to_string(d.dim()));
    if (x.is_incoherent())
        throw IncoherentInputError(
            "verify_pure_optimality: state is incoherent, distance is zero and the certificate is vacuous");

    const ComplexMatrix diff = x.projector() - d.matrix();
    const SpectralDecomposition eig = hermitian_eig(diff);
    const Index n = eig.size();

    Index positive = 0;
    for (Index i = 0; i < n; ++i)
        if (eig.eigenvalues(i) > tol)
            ++positive;
    const double gap = n > 1 ? eig.eigenvalues(0) - eig.eigenvalues(1)
                             : std::numeric_limits<double>::infinity();
    if (positive != 1 || !(gap > tol))
        throw CertificateInconclusive(
            "verify_pure_optimality: top eigenvalue of |x><x| - D is not simple (" +
            std::to_string(positive) + " eigenvalues above tol, gap " +
            detail::format_double(gap) + ")");

    PureCertificate cert;
    cert.v = eig.eigenvectors.col(0);
    cert.top_eigenvalue = eig.eigenvalues(0);
    cert.gap = gap;
    cert.tol = tol;
    cert.margin = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
        const double e = perturbation_expectation(cert.v, d, i);
        if (e < cert.margin) {
            cert.margin = e;
            cert.argmin = i;
        }
    }
    cert.optimal = cert.margin >= -tol;
    return cert;
}

struct MixedCertificate {
    bool certified = false;
    double margin = 0.0;       ///< min over extreme points of tr(F_i H)
    double trace_norm = 0.0;   ///< ||A - D||_tr
    double alignment = 0.0;    ///< tr((A - D) H)
    Index positive = 0;        ///< p, the number of positive eigenvalues of A - D
    Index negative = 0;        ///< q
    ComplexMatrix witness;     ///< H = U (I_p (+) -I_q) U^dagger
    double tol = 0.0;
};

/// Certificate for mixed A when A - D is invertible. The witness is then
/// forced, so certified == false means D is not a minimizer.
inline MixedCertificate verify_mixed_invertible(const DensityMatrix& a, const IncoherentState& d,
                                                double tol = default_tolerances.certificate)
{
    if (d.dim() != a.dim())
        throw DimensionMismatch("verify_mixed_invertible: state has dimension " +
                                std::to_string(a.dim()) + ", candidate has " +
                                std::to_string(d.dim()));
    const ComplexMatrix diff = a.matrix() - d.matrix();
    const SpectralDecomposition eig = hermitian_eig(diff);
    const Index n = eig.size();
    const double smallest = eig.eigenvalues.cwiseAbs().minCoeff();
    if (!(smallest > tol))
        throw NonInvertibleCase("verify_mixed_invertible: A - D is singular (min |eigenvalue| " +
                                detail::format_double(smallest) +
                                "); the non-invertible case is out of scope");

    MixedCertificate cert;
    cert.tol = tol;
    RealVector signs(n);
    for (Index i = 0; i < n; ++i) {
        signs(i) = eig.eigenvalues(i) > 0.0 ? 1.0 : -1.0;
        (eig.eigenvalues(i) > 0.0 ? cert.positive : cert.negative) += 1;
    }
    cert.witness = eig.eigenvectors * signs.cast<Complex>().asDiagonal() * eig.eigenvectors.adjoint();
    cert.trace_norm = eig.eigenvalues.cwiseAbs().sum();
    cert.alignment = (diff * cert.witness).trace().real();
    if (std::abs(cert.alignment - cert.trace_norm) > default_tolerances.spectral)
        throw NumericalError("verify_mixed_invertible: tr((A-D)H) = " +
                             detail::format_double(cert.alignment) + " but ||A-D||_tr = " +
                             detail::format_double(cert.trace_norm));

    // tr(F_i H) = sum_j d_j H_jj - H_ii
    const RealVector h = cert.witness.diagonal().real();
    const double base = d.diag().dot(h);
    cert.margin = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i)
        cert.margin = std::min(cert.margin, base - h(i));
    cert.certified = cert.margin >= -tol;
    return cert;
}

} // namespace coherence
