#include <coherence/certificates.hpp>
#include <coherence/oracle.hpp>
#include <coherence/random.hpp>
#include <coherence/trace_distance.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace coherence;

namespace {

IncoherentState diag_state(std::initializer_list<double> d)
{
    RealVector v(static_cast<Index>(d.size()));
    Index i = 0;
    for (double x : d)
        v(i++) = x;
    return IncoherentState(std::move(v));
}

/// Moves eps of mass between two random entries of the support.
IncoherentState nudge(const IncoherentState& d, double eps, Rng& rng)
{
    RealVector v = d.diag();
    const Index n = v.size();
    Index from = 0;
    for (Index i = 0; i < n; ++i)
        if (v(i) > v(from))
            from = i;
    Index to = static_cast<Index>(rng.uniform() * static_cast<double>(n - 1));
    if (to >= from)
        ++to;
    const double moved = std::min(eps, v(from));
    v(from) -= moved;
    v(to) += moved;
    return IncoherentState(std::move(v));
}

} // namespace

TEST(ExtremePoints, Shape)
{
    const auto pts = extreme_points(diag_state({0.5, 0.5, 0.0}));
    ASSERT_EQ(pts.size(), 3u);
    EXPECT_EQ(pts[0].values(0), -0.5);
    EXPECT_EQ(pts[0].values(1), 0.5);
    EXPECT_EQ(pts[2].values(2), -1.0);
    for (const auto& f : pts)
        EXPECT_NEAR(f.values.sum(), 0.0, 1e-15);
}

TEST(ExtremePoints, ClosedFormMatchesContraction)
{
    Rng rng(31);
    for (int t = 0; t < 200; ++t) {
        const Index n = 1 + t % 12;
        const ComplexVector v = random_pure(n, rng).amplitudes();
        const IncoherentState d(random_probability(n, rng).values());
        for (const auto& f : extreme_points(d))
            ASSERT_NEAR(perturbation_expectation(v, f), perturbation_expectation(v, d, f.index),
                        1e-14);
    }
}

TEST(PureCertificate, QutritExample)
{
    const auto x = PureState::from_real({2.0 / 3, 2.0 / 3, 1.0 / 3});
    const auto cert = verify_pure_optimality(x, diag_state({0.5, 0.5, 0.0}));
    EXPECT_TRUE(cert.optimal);
    EXPECT_GE(cert.margin, -1e-10);
    EXPECT_NEAR(cert.top_eigenvalue, (3.0 + std::sqrt(17.0)) / 12.0, 1e-12);
}

TEST(PureCertificate, RejectsDominantEntryCandidate)
{
    const auto x = PureState::from_real({2.0 / 3, 2.0 / 3, 1.0 / 3});
    const auto cert = verify_pure_optimality(x, diag_state({1.0, 0.0, 0.0}));
    EXPECT_FALSE(cert.optimal);
    EXPECT_LT(cert.margin, -1e-3);
}

TEST(PureCertificate, Errors)
{
    const auto x = PureState::from_real({0.8, 0.6});
    EXPECT_THROW(verify_pure_optimality(x, diag_state({1.0, 0.0, 0.0})), DimensionMismatch);
    EXPECT_THROW(verify_pure_optimality(PureState::basis(3, 1), diag_state({0.0, 1.0, 0.0})),
                 IncoherentInputError);
    // Incoherent input is a validation failure.
    EXPECT_THROW(verify_pure_optimality(PureState::basis(2, 0), diag_state({0.5, 0.5})),
                 ValidationError);
}

TEST(PureCertificate, ClosedFormOptimaAreCertified)
{
    Rng rng(32);
    for (int t = 0; t < 300; ++t) {
        const Index n = 2 + t % 31;
        const PureState x = random_pure(n, rng);
        const auto r = nearest_incoherent(x);
        const auto cert = verify_pure_optimality(x, r.D);
        ASSERT_TRUE(cert.optimal) << "margin " << cert.margin;
        ASSERT_NEAR(cert.top_eigenvalue, r.op_dist, 1e-10);
    }
}

TEST(PureCertificate, PerturbedCandidatesAreRejected)
{
    Rng rng(33);
    int rejected = 0;
    const int trials = 300;
    for (int t = 0; t < trials; ++t) {
        const Index n = 2 + t % 31;
        const PureState x = random_pure(n, rng);
        const auto r = nearest_incoherent(x);
        try {
            rejected += !verify_pure_optimality(x, nudge(r.D, 1e-3, rng)).optimal;
        } catch (const CertificateInconclusive&) {
        }
    }
    EXPECT_GE(rejected, static_cast<int>(0.99 * trials));
}

TEST(MixedCertificate, QubitDiagonalIsOptimal)
{
    ComplexMatrix a(2, 2);
    a << 0.7, Complex(0.1, 0.2), Complex(0.1, -0.2), 0.3;
    const DensityMatrix rho(a);
    const auto cert = verify_mixed_invertible(rho, IncoherentState(rho.diagonal()));
    EXPECT_TRUE(cert.certified);
    EXPECT_EQ(cert.positive, 1);
    EXPECT_EQ(cert.negative, 1);
    EXPECT_NEAR(cert.trace_norm, 2.0 * std::abs(Complex(0.1, 0.2)), 1e-14);
    EXPECT_NEAR(cert.alignment, cert.trace_norm, 1e-14);
}

TEST(MixedCertificate, FullRankPureOptimaAreCertified)
{
    Rng rng(34);
    int seen = 0;
    for (int t = 0; t < 300 && seen < 50; ++t) {
        const Index n = 2 + t % 5;
        const PureState x = random_pure(n, rng);
        const auto r = nearest_incoherent(x);
        if (r.k != n)
            continue;
        ++seen;
        const auto cert = verify_mixed_invertible(DensityMatrix::from_pure(x), r.D);
        ASSERT_TRUE(cert.certified) << "margin " << cert.margin;
        ASSERT_EQ(cert.positive, 1);
        ASSERT_EQ(cert.negative, n - 1);
        ASSERT_NEAR(cert.trace_norm, r.c_tr, 1e-10);
    }
    EXPECT_GT(seen, 10);
}

TEST(MixedCertificate, WitnessIsAUnitaryInvolution)
{
    Rng rng(35);
    for (int t = 0; t < 50; ++t) {
        const Index n = 2 + t % 5;
        const DensityMatrix rho = random_mixed(n, rng);
        try {
            const auto cert = verify_mixed_invertible(rho, IncoherentState::maximally_mixed(n));
            const ComplexMatrix h2 = cert.witness * cert.witness;
            ASSERT_LE((h2 - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
            ASSERT_EQ(cert.positive + cert.negative, n);
        } catch (const NonInvertibleCase&) {
        }
    }
}

TEST(MixedCertificate, CertifiedCandidatesBeatTheOracle)
{
    // Independent check: when the certificate holds, the subgradient oracle
    // finds nothing better.
    Rng rng(36);
    int certified = 0;
    for (int t = 0; t < 40; ++t) {
        const Index n = 2 + t % 3;
        const DensityMatrix rho = random_mixed(n, rng);
        const auto oracle = c_tr_subgradient(rho);
        try {
            const auto cert = verify_mixed_invertible(rho, oracle.argmin, 1e-4);
            if (cert.certified) {
                ++certified;
                ASSERT_NEAR(cert.trace_norm, oracle.value, 1e-12);
            }
        } catch (const NonInvertibleCase&) {
        }
        const auto cert_uniform = verify_mixed_invertible(rho, IncoherentState(rho.diagonal()));
        if (cert_uniform.certified) {
            ASSERT_LE(cert_uniform.trace_norm, oracle.value + 1e-6);
        }
    }
    EXPECT_GT(certified, 0);
}

TEST(MixedCertificate, SingularDifferenceIsOutOfScope)
{
    const DensityMatrix rho = DensityMatrix::maximally_mixed(3);
    EXPECT_THROW(verify_mixed_invertible(rho, IncoherentState::maximally_mixed(3)), NonInvertibleCase);
    EXPECT_THROW(verify_mixed_invertible(rho, IncoherentState::maximally_mixed(2)), DimensionMismatch);
}
