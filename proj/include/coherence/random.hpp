// Seeded random states. Streams are splittable so batch jobs can draw the
// i-th item independently of how the batch is partitioned across threads.

#pragma once

#include "core.hpp"

#include <cstdint>
#include <random>

namespace coherence {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

    /// Independent stream derived from this one's seed and an index.
    Rng split(std::uint64_t stream) const
    {
        return Rng(mix(seed_ ^ mix(stream + 0x632be59bd9b4e019ULL)));
    }

    std::uint64_t seed() const { return seed_; }
    std::mt19937_64& engine() { return engine_; }

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    Complex complex_normal() { return {normal(), normal()}; }

private:
    // splitmix64 finalizer
    static std::uint64_t mix(std::uint64_t z)
    {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Uniform on the unit sphere of C^n. For n = 1 the global phase is dropped.
inline PureState random_pure(Index n, Rng& rng)
{
    if (n == 1)
        return PureState::basis(1, 0);
    ComplexVector v(n);
    for (Index i = 0; i < n; ++i)
        v(i) = rng.complex_normal();
    return PureState(std::move(v));
}

/// Real amplitudes, uniform on the unit sphere of R^n.
inline PureState random_real_pure(Index n, Rng& rng)
{
    ComplexVector v(n);
    for (Index i = 0; i < n; ++i)
        v(i) = rng.normal();
    return PureState(std::move(v));
}

/// G G^dagger / tr(G G^dagger) with G a complex Gaussian matrix.
inline DensityMatrix random_mixed(Index n, Rng& rng)
{
    ComplexMatrix g(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            g(i, j) = rng.complex_normal();
    ComplexMatrix m = g * g.adjoint();
    m /= m.trace().real();
    return DensityMatrix(0.5 * (m + m.adjoint()));
}

/// Uniform on the probability simplex (flat Dirichlet).
inline ProbabilityVector random_probability(Index n, Rng& rng)
{
    RealVector p(n);
    for (Index i = 0; i < n; ++i)
        p(i) = -std::log1p(-rng.uniform());
    p /= p.sum();
    return ProbabilityVector(std::move(p));
}

/// Convex mixture of `terms` real product states on C^n (x) C^n. Separable,
/// hence PPT, and real.
inline DensityMatrix random_real_separable(Index n, Index terms, Rng& rng)
{
    const RealVector w = random_probability(terms, rng).values();
    ComplexMatrix m = ComplexMatrix::Zero(n * n, n * n);
    for (Index t = 0; t < terms; ++t) {
        const ComplexVector a = random_real_pure(n, rng).amplitudes();
        const ComplexVector b = random_real_pure(n, rng).amplitudes();
        ComplexVector ab(n * n);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                ab(i * n + j) = a(i) * b(j);
        m += w(t) * ab * ab.adjoint();
    }
    m /= m.trace().real();
    return DensityMatrix(0.5 * (m + m.adjoint()));
}

} // namespace coherence
