// Entanglement of bipartite pure states through coherence of their Schmidt
// vector, and the channel construction that ties the two together.
//
// Bipartite index convention: basis vector |a>|b> of C^m (x) C^n sits at
// position a*n + b. The coefficient rho_{ij,kl} of |i><j| (x) |k><l| is the
// matrix entry at row i*n + k, column j*n + l.

#pragma once

#include "core.hpp"
#include "measures.hpp"
#include "trace_distance.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace coherence {

/// Amplitude matrix A with |v> = sum_ab A(a,b) |a>|b>, unit Frobenius norm.
class BipartitePureState {
public:
    explicit BipartitePureState(ComplexMatrix amplitudes) : a_(std::move(amplitudes))
    {
        if (a_.size() == 0)
            throw ValidationError("BipartitePureState: empty amplitude matrix");
        if (!a_.allFinite())
            throw ValidationError("BipartitePureState: non-finite amplitude");
        const double norm = a_.norm();
        if (!(norm > 0.0))
            throw ValidationError("BipartitePureState: zero state cannot be normalized");
        a_ /= norm;
    }

    static BipartitePureState from_vector(const ComplexVector& v, Index m, Index n)
    {
        if (m <= 0 || n <= 0 || v.size() != m * n)
            throw DimensionMismatch("BipartitePureState: vector of length " +
                                    std::to_string(v.size()) + " does not match dims " +
                                    std::to_string(m) + "x" + std::to_string(n));
        ComplexMatrix a(m, n);
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < n; ++j)
                a(i, j) = v(i * n + j);
        return BipartitePureState(std::move(a));
    }

    /// sum_j lambda_j |j>|j>
    static BipartitePureState maximally_correlated(const ComplexVector& lambda)
    {
        return BipartitePureState(ComplexMatrix(lambda.asDiagonal()));
    }

    static BipartitePureState maximally_correlated(const RealVector& lambda)
    {
        return maximally_correlated(ComplexVector(lambda.cast<Complex>()));
    }

    static BipartitePureState product(const PureState& a, const PureState& b)
    {
        return BipartitePureState(a.amplitudes() * b.amplitudes().transpose());
    }

    Index dim_a() const { return a_.rows(); }
    Index dim_b() const { return a_.cols(); }
    const ComplexMatrix& amplitudes() const { return a_; }

    ComplexVector vector() const
    {
        ComplexVector v(a_.size());
        for (Index i = 0; i < dim_a(); ++i)
            for (Index j = 0; j < dim_b(); ++j)
                v(i * dim_b() + j) = a_(i, j);
        return v;
    }

    ComplexMatrix projector() const
    {
        const ComplexVector v = vector();
        return v * v.adjoint();
    }

    /// True when A is diagonal (square) within tol.
    bool is_maximally_correlated(double tol = default_tolerances.construction) const
    {
        if (dim_a() != dim_b())
            return false;
        return max_offdiagonal(a_) <= tol;
    }

private:
    ComplexMatrix a_;
};

/// |v> = sum_k coefficients(k) |left_k> |right_k>, coefficients descending.
struct SchmidtData {
    RealVector coefficients;
    ComplexMatrix left;   ///< m x r orthonormal columns
    ComplexMatrix right;  ///< n x r orthonormal columns
    double reconstruction_error = 0.0;

    Index rank(double tol = 1e-14) const { return (coefficients.array() > tol).count(); }

    ComplexMatrix reconstruct() const
    {
        return left * coefficients.cast<Complex>().asDiagonal() * right.transpose();
    }
};

inline SchmidtData schmidt(const BipartitePureState& v)
{
    const ComplexMatrix& a = v.amplitudes();
    Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SchmidtData out;
    out.coefficients = svd.singularValues();
    out.left = svd.matrixU();
    // A = U S V^dagger, so the right Schmidt vectors are the conjugated columns of V.
    out.right = svd.matrixV().conjugate();
    out.reconstruction_error = (out.reconstruct() - a).cwiseAbs().maxCoeff();
    if (out.reconstruction_error > default_tolerances.spectral)
        throw NumericalError("schmidt: reconstruction error " +
                             detail::format_double(out.reconstruction_error));
    return out;
}

/// The Schmidt vector as a pure state in C^min(m,n).
inline PureState schmidt_vector(const BipartitePureState& v)
{
    return PureState(schmidt(v).coefficients.cast<Complex>());
}

/// Trace distance of entanglement: C_tr of the Schmidt vector.
inline double e_tr_pure(const BipartitePureState& v)
{
    return c_tr_pure(schmidt_vector(v));
}

/// Separable state at trace distance e_tr_pure(v) from |v><v|:
/// sum_i delta_i |left_i><left_i| (x) |right_i><right_i| with delta the nearest
/// incoherent state to the Schmidt vector.
inline DensityMatrix achieving_separable_state(const BipartitePureState& v)
{
    const SchmidtData sd = schmidt(v);
    const TraceDistanceResult best =
        nearest_incoherent(PureState(sd.coefficients.cast<Complex>()));
    const Index m = v.dim_a();
    const Index n = v.dim_b();
    ComplexMatrix sigma = ComplexMatrix::Zero(m * n, m * n);
    for (Index k = 0; k < sd.coefficients.size(); ++k) {
        const double w = best.D[k];
        if (w == 0.0)
            continue;
        ComplexVector prod(m * n);
        for (Index a = 0; a < m; ++a)
            for (Index b = 0; b < n; ++b)
                prod(a * n + b) = sd.left(a, k) * sd.right(b, k);
        sigma += w * prod * prod.adjoint();
    }
    return DensityMatrix(0.5 * (sigma + sigma.adjoint()));
}

/// N = ((sum_i lambda_i)^2 - 1) / 2.
inline double negativity_pure(const BipartitePureState& v)
{
    const RealVector lambda = schmidt(v).coefficients;
    const double s = lambda.sum();
    return std::max(0.0, 0.5 * (s * s - lambda.squaredNorm()));
}

/// E_r = -sum_i lambda_i^2 log2 lambda_i^2.
inline double e_r_pure(const BipartitePureState& v)
{
    return shannon_entropy(schmidt(v).coefficients.cwiseAbs2());
}

struct NegativityBoundCheck {
    double e_r = 0.0;
    double two_n = 0.0;
    double old_bound = 0.0; ///< log2(1 + 2N)
    bool holds = false;     ///< E_r <= 2N
    bool improves = false;  ///< 2N < log2(1 + 2N)
};

inline NegativityBoundCheck check_negativity_bound(const BipartitePureState& v)
{
    NegativityBoundCheck out;
    out.e_r = e_r_pure(v);
    out.two_n = 2.0 * negativity_pure(v);
    out.old_bound = std::log2(1.0 + out.two_n);
    out.holds = out.e_r <= out.two_n + inequality_slack;
    out.improves = out.two_n < out.old_bound;
    return out;
}

// ---------------------------------------------------------------------------
// Channels on C^n (x) C^n

inline void require_square_system(const ComplexMatrix& rho, Index n, const char* what)
{
    if (n <= 0 || rho.rows() != n * n || rho.cols() != n * n)
        throw DimensionMismatch(std::string(what) + ": matrix is " + std::to_string(rho.rows()) +
                                "x" + std::to_string(rho.cols()) + ", expected " +
                                std::to_string(n * n) + " square for an " + std::to_string(n) +
                                "x" + std::to_string(n) + " system");
}

/// Average of (U (x) conj U) rho (U (x) conj U)^dagger over diagonal unitaries U,
/// in closed form: keeps rho_{ii,jj} |i><i| (x) |j><j| and rho_{ij,ij} |i><j| (x) |i><j|.
inline ComplexMatrix diagonal_twirl(const ComplexMatrix& rho, Index n)
{
    require_square_system(rho, n, "diagonal_twirl");
    ComplexMatrix out = ComplexMatrix::Zero(n * n, n * n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            const Index ij = i * n + j;
            out(ij, ij) = rho(ij, ij);
            if (i != j) {
                const Index ii = i * n + i;
                const Index jj = j * n + j;
                out(ii, jj) = rho(ii, jj);
            }
        }
    }
    return out;
}

inline DensityMatrix diagonal_twirl(const DensityMatrix& rho, Index n)
{
    return DensityMatrix(diagonal_twirl(rho.matrix(), n));
}

/// Kraus channel C^n (x) C^n -> C^n built from a real PPT state sigma. It maps
/// the twirl of sigma to a diagonal state and sum_j l_j |jj> to sum_j l_j |j>.
class OmegaChannel {
public:
    static OmegaChannel build(const DensityMatrix& sigma, Index n,
                              double tol = default_tolerances.psd)
    {
        const ComplexMatrix& s = sigma.matrix();
        require_square_system(s, n, "omega_channel");
        const double imag = s.imag().cwiseAbs().maxCoeff();
        if (imag > tol)
            throw ValidationError("omega_channel: sigma is not real (max |Im| = " +
                                  detail::format_double(imag) + ")");
        const double min_pt = min_partial_transpose_eigenvalue(s, n);
        if (min_pt < -tol)
            throw ValidationError("omega_channel: sigma is not PPT (min partial-transpose eigenvalue " +
                                  detail::format_double(min_pt) + ")");

        OmegaChannel ch;
        ch.n_ = n;
        ch.c_ = RealMatrix::Zero(n, n);
        ch.s_ = RealMatrix::Ones(n, n);
        for (Index i = 0; i < n; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                const double off = s(i * n + i, j * n + j).real();   // <ii|sigma|jj>
                const double denom = s(i * n + j, i * n + j).real() + // <ij|sigma|ij>
                                     s(j * n + i, j * n + i).real();  // <ji|sigma|ji>
                double c = 0.0;
                double sign = 1.0;
                if (denom > 0.0) {
                    const double ratio = 2.0 * std::abs(off) / denom;
                    if (ratio > 1.0) {
                        if (2.0 * std::abs(off) - denom > 2.0 * tol)
                            throw ValidationError(
                                "omega_channel: c exceeds 1 for pair (" + std::to_string(i) + "," +
                                std::to_string(j) + "): 2|sigma_ij,ij| = " +
                                detail::format_double(2.0 * std::abs(off)) + " > " +
                                detail::format_double(denom));
                        c = 1.0;
                    } else {
                        c = std::sqrt(ratio);
                    }
                    if (off < 0.0)
                        sign = -1.0;
                } else if (std::abs(off) > tol) {
                    throw ValidationError("omega_channel: zero denominator with nonzero sigma_ij,ij for pair (" +
                                          std::to_string(i) + "," + std::to_string(j) + ")");
                }
                ch.c_(i, j) = ch.c_(j, i) = c;
                ch.s_(i, j) = ch.s_(j, i) = sign;
            }
        }
        ch.build_kraus();
        return ch;
    }

    Index n() const { return n_; }
    double c(Index i, Index j) const { return c_(i, j); }
    double s(Index i, Index j) const { return s_(i, j); }
    const std::vector<ComplexMatrix>& kraus() const { return kraus_; }

    /// max |sum_a K_a^dagger K_a - I|
    double completeness_error() const { return completeness_error_; }

    ComplexMatrix apply(const ComplexMatrix& rho) const
    {
        require_square_system(rho, n_, "OmegaChannel::apply");
        ComplexMatrix out = ComplexMatrix::Zero(n_, n_);
        for (const ComplexMatrix& k : kraus_)
            out.noalias() += k * rho * k.adjoint();
        return out;
    }

private:
    void build_kraus()
    {
        const Index n = n_;
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        kraus_.clear();
        kraus_.reserve(static_cast<std::size_t>(1 + 2 * n * (n - 1)));

        ComplexMatrix e_plus = ComplexMatrix::Zero(n, n * n);
        for (Index j = 0; j < n; ++j)
            e_plus(j, j * n + j) = 1.0;
        kraus_.push_back(std::move(e_plus));

        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < n; ++j) {
                if (i == j)
                    continue;
                ComplexMatrix e = ComplexMatrix::Zero(n, n * n);
                const double w = c_(i, j) * inv_sqrt2;
                e(i, i * n + j) = w;
                e(j, i * n + j) = -s_(i, j) * w;
                kraus_.push_back(std::move(e));
            }
        }
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < n; ++j) {
                if (i == j)
                    continue;
                ComplexMatrix f = ComplexMatrix::Zero(n, n * n);
                f(i, i * n + j) = std::sqrt(std::max(0.0, 1.0 - c_(i, j) * c_(i, j)));
                kraus_.push_back(std::move(f));
            }
        }

        ComplexMatrix sum = ComplexMatrix::Zero(n * n, n * n);
        for (const ComplexMatrix& k : kraus_)
            sum.noalias() += k.adjoint() * k;
        completeness_error_ =
            (sum - ComplexMatrix::Identity(n * n, n * n)).cwiseAbs().maxCoeff();
        if (completeness_error_ > default_tolerances.construction)
            throw NumericalError("omega_channel: Kraus completeness violated by " +
                                 detail::format_double(completeness_error_));
    }

    Index n_ = 0;
    RealMatrix c_;
    RealMatrix s_;
    std::vector<ComplexMatrix> kraus_;
    double completeness_error_ = 0.0;
};

inline OmegaChannel omega_channel(const DensityMatrix& sigma, Index n,
                                  double tol = default_tolerances.psd)
{
    return OmegaChannel::build(sigma, n, tol);
}

/// Phi = Omega_sigma o Psi.
inline ComplexMatrix compose_phi(const OmegaChannel& omega, const ComplexMatrix& rho)
{
    return omega.apply(diagonal_twirl(rho, omega.n()));
}

/// rho = sum_ij core_ij |i><j| (x) |i><j|, core a density matrix on C^n.
class MaxCorrelatedState {
public:
    explicit MaxCorrelatedState(DensityMatrix core) : core_(std::move(core)) {}

    Index n() const { return core_.dim(); }
    const DensityMatrix& core() const { return core_; }

    DensityMatrix embed() const
    {
        const Index n = core_.dim();
        ComplexMatrix m = ComplexMatrix::Zero(n * n, n * n);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                m(i * n + i, j * n + j) = core_(i, j);
        return DensityMatrix(std::move(m));
    }

private:
    DensityMatrix core_;
};

struct PipelineReport {
    bool incoherent_ok = false;
    bool fixed_point_ok = false;
    double offdiag_mass = 0.0;       ///< off-diagonal mass of Phi(sigma)
    double fixed_point_error = 0.0;  ///< ||Phi(target input) - expected output||_tr
    double completeness_error = 0.0;
    RealVector phi_sigma_diagonal;
};

inline constexpr double pipeline_tolerance = 1e-10;

namespace detail {

inline PipelineReport run_pipeline(const DensityMatrix& sigma, Index n, const ComplexMatrix& input,
                               const ComplexMatrix& expected)
{
    const OmegaChannel omega = omega_channel(sigma, n);
    PipelineReport r;
    r.completeness_error = omega.completeness_error();
    const ComplexMatrix phi_sigma = compose_phi(omega, sigma.matrix());
    r.offdiag_mass = offdiagonal_mass(phi_sigma);
    r.phi_sigma_diagonal = phi_sigma.diagonal().real();
    r.incoherent_ok = r.offdiag_mass < pipeline_tolerance;
    const ComplexMatrix diff = compose_phi(omega, input) - expected;
    r.fixed_point_error = trace_norm(0.5 * (diff + diff.adjoint()));
    r.fixed_point_ok = r.fixed_point_error < pipeline_tolerance;
    return r;
}

} // namespace detail

/// Runs Phi on sigma and on |v><v| for v = sum_j l_j |jj>: Phi(sigma) must be
/// diagonal and Phi(|v><v|) must equal |l><l|.
inline PipelineReport verify_channel_pipeline(const DensityMatrix& sigma, const BipartitePureState& v)
{
    if (v.dim_a() != v.dim_b())
        throw DimensionMismatch("verify_channel_pipeline: requires an n x n system, got " +
                                std::to_string(v.dim_a()) + "x" + std::to_string(v.dim_b()));
    if (!v.is_maximally_correlated())
        throw ValidationError("verify_channel_pipeline: state is not of the form sum_j l_j |jj>");
    const Index n = v.dim_a();
    const ComplexVector lambda = v.amplitudes().diagonal();
    return detail::run_pipeline(sigma, n, v.projector(), lambda * lambda.adjoint());
}

/// Maximally correlated variant: Phi(embed(rho)) must equal the core of rho.
inline PipelineReport verify_channel_pipeline(const DensityMatrix& sigma, const MaxCorrelatedState& rho)
{
    return detail::run_pipeline(sigma, rho.n(), rho.embed().matrix(), rho.core().matrix());
}

} // namespace coherence
