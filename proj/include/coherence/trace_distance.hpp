// Closed-form trace distance of coherence for pure states.
//
// A pure state is first brought to canonical form (non-negative moduli in
// descending order). Prefix sums s_l, suffix square sums m_l and the
// thresholds q_l then determine the breakpoint k = max{l : x_l > q_l}; the
// nearest incoherent state is supported on the first k canonical entries.

#pragma once

#include "core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

namespace coherence {

/// Moduli sorted descending together with the permutation and phases that
/// map them back onto the original amplitudes:
///   amplitude[permutation[j]] == phases[permutation[j]] * moduli[j].
struct CanonicalForm {
    RealVector moduli;
    std::vector<Index> permutation; ///< canonical position -> original index
    ComplexVector phases;           ///< unit phase per original index (1 for zero entries)

    Index dim() const { return moduli.size(); }

    /// Number of strictly positive moduli; they form a leading block.
    Index support() const
    {
        Index r = 0;
        while (r < moduli.size() && moduli(r) > 0.0)
            ++r;
        return r;
    }

    ComplexVector original_amplitudes() const
    {
        ComplexVector out(dim());
        for (Index j = 0; j < dim(); ++j) {
            const Index o = permutation[static_cast<std::size_t>(j)];
            out(o) = phases(o) * moduli(j);
        }
        return out;
    }

    /// Maps a real vector given in canonical order back to original order.
    RealVector to_original(const RealVector& canonical) const
    {
        RealVector out(dim());
        for (Index j = 0; j < dim(); ++j)
            out(permutation[static_cast<std::size_t>(j)]) = canonical(j);
        return out;
    }
};

inline CanonicalForm canonicalize(const PureState& x)
{
    const Index n = x.dim();
    CanonicalForm cf;
    cf.phases.resize(n);
    RealVector mod(n);
    for (Index i = 0; i < n; ++i) {
        const Complex a = x[i];
        mod(i) = std::abs(a);
        cf.phases(i) = mod(i) > 0.0 ? a / mod(i) : Complex(1.0, 0.0);
    }
    // Sorting (modulus, index) pairs keeps the comparisons cache-local; the
    // index tie-break gives the same order as a stable sort.
    std::vector<std::pair<double, Index>> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
        order[static_cast<std::size_t>(i)] = {mod(i), i};
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        return a.first > b.first || (a.first == b.first && a.second < b.second);
    });
    cf.permutation.resize(static_cast<std::size_t>(n));
    cf.moduli.resize(n);
    for (Index j = 0; j < n; ++j) {
        cf.moduli(j) = order[static_cast<std::size_t>(j)].first;
        cf.permutation[static_cast<std::size_t>(j)] = order[static_cast<std::size_t>(j)].second;
    }
    return cf;
}

/// Per-prefix statistics, stored 0-based: entry l-1 holds the value for prefix length l.
struct PrefixStats {
    RealVector s; ///< s_l = x_1 + ... + x_l
    RealVector m; ///< m_l = x_{l+1}^2 + ... + x_n^2
    RealVector p; ///< p_l = s_l^2 - 1 - l m_l
    RealVector q; ///< larger root of l s_l q^2 - p_l q - s_l m_l

    Index size() const { return s.size(); }
};

/// Larger root of l*s*q^2 - p*q - s*m = 0, evaluated without cancellation.
inline double threshold_root(Index l, double s, double m, double p)
{
    const double ld = static_cast<double>(l);
    const double disc = std::sqrt(p * p + 4.0 * ld * m * s * s);
    if (p >= 0.0)
        return (p + disc) / (2.0 * ld * s);
    const double denom = disc - p;
    return denom > 0.0 ? 2.0 * m * s / denom : 0.0;
}

/// moduli must be sorted descending with unit Euclidean norm.
inline PrefixStats prefix_stats(std::span<const double> moduli)
{
    const Index n = static_cast<Index>(moduli.size());
    if (n == 0)
        throw ValidationError("prefix_stats: empty vector");
    if (!(moduli[0] > 0.0))
        throw ValidationError("prefix_stats: leading modulus is zero (s_1 = 0)");
    PrefixStats st;
    st.s.resize(n);
    st.m.resize(n);
    st.p.resize(n);
    st.q.resize(n);

    double run = 0.0;
    for (Index l = 0; l < n; ++l) {
        run += moduli[static_cast<std::size_t>(l)];
        st.s(l) = run;
    }
    // Suffix sums accumulate from the small end.
    double tail = 0.0;
    for (Index l = n - 1; l >= 0; --l) {
        st.m(l) = tail;
        const double x = moduli[static_cast<std::size_t>(l)];
        tail += x * x;
    }
    for (Index l = 0; l < n; ++l) {
        const Index len = l + 1;
        st.p(l) = st.s(l) * st.s(l) - 1.0 - static_cast<double>(len) * st.m(l);
        st.q(l) = threshold_root(len, st.s(l), st.m(l), st.p(l));
    }
    return st;
}

inline PrefixStats prefix_stats(const RealVector& moduli)
{
    return prefix_stats(std::span<const double>(moduli.data(), static_cast<std::size_t>(moduli.size())));
}

enum class BreakpointSearch { binary, linear };

/// Largest k (1-based) with x_k > q_k. The admissible set is a prefix, so a
/// binary search needs O(log n) probes; the linear scan exists for
/// differential testing.
inline Index find_k(std::span<const double> moduli, const PrefixStats& stats,
                    BreakpointSearch search = BreakpointSearch::binary)
{
    const Index n = stats.size();
    if (static_cast<Index>(moduli.size()) != n)
        throw DimensionMismatch("find_k: moduli and stats lengths differ");
    auto admissible = [&](Index len) {
        return moduli[static_cast<std::size_t>(len - 1)] > stats.q(len - 1);
    };
    if (search == BreakpointSearch::linear) {
        Index k = 1;
        for (Index len = 1; len <= n; ++len)
            if (admissible(len))
                k = len;
        return k;
    }
    // Invariant: admissible(lo) holds (k = 1 always does), everything above hi fails.
    Index lo = 1;
    Index hi = n;
    while (lo < hi) {
        const Index mid = lo + (hi - lo + 1) / 2;
        if (admissible(mid))
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

inline Index find_k(const RealVector& moduli, const PrefixStats& stats,
                    BreakpointSearch search = BreakpointSearch::binary)
{
    return find_k(std::span<const double>(moduli.data(), static_cast<std::size_t>(moduli.size())),
                  stats, search);
}

struct TraceDistanceResult {
    Index k = 0;           ///< rank of the nearest incoherent state
    double q_k = 0.0;
    IncoherentState D;     ///< nearest incoherent state, original index order
    RealVector D_canonical;
    double mu = 0.0;       ///< largest eigenvalue of |x><x| - D
    RealVector v_canonical;   ///< (q_k,...,q_k, x_{k+1},...,x_n), canonical order
    ComplexVector v;          ///< the same eigenvector in the original basis
    double c_tr = 0.0;     ///< trace distance of coherence, 2 mu
    double op_dist = 0.0;  ///< operator-norm distance, mu
    CanonicalForm canonical;
};

struct NearestOptions {
    BreakpointSearch search = BreakpointSearch::binary;
};

/// Nearest incoherent state to |x><x| in trace norm (and operator norm).
///
/// Zero amplitudes are handled by running the construction on the support
/// (the leading positive block after sorting) and zero-padding D.
inline TraceDistanceResult nearest_incoherent(const PureState& x, NearestOptions opts = {})
{
    CanonicalForm cf = canonicalize(x);
    const Index n = cf.dim();
    const Index r = cf.support();
    const std::span<const double> support(cf.moduli.data(), static_cast<std::size_t>(r));

    const PrefixStats st = prefix_stats(support);
    const Index k = find_k(support, st, opts.search);
    const double qk = st.q(k - 1);
    const double sk = st.s(k - 1);
    const double mk = st.m(k - 1);

    RealVector dcan = RealVector::Zero(n);
    std::vector<double> numer(static_cast<std::size_t>(k));
    for (Index j = 0; j < k; ++j)
        numer[static_cast<std::size_t>(j)] = cf.moduli(j) - qk;
    // Normalizing by the compensated sum of numerators equals dividing by
    // s_k - k q_k and makes D sum to one to rounding.
    const double denom = detail::compensated_sum(numer);
    for (Index j = 0; j < k; ++j)
        dcan(j) = numer[static_cast<std::size_t>(j)] / denom;

    RealVector vcan(n);
    for (Index j = 0; j < n; ++j)
        vcan(j) = j < k ? qk : cf.moduli(j);

    ComplexVector v(n);
    for (Index j = 0; j < n; ++j) {
        const Index o = cf.permutation[static_cast<std::size_t>(j)];
        v(o) = cf.phases(o) * vcan(j);
    }

    const double mu = qk * sk + mk;
    RealVector dorig = cf.to_original(dcan);
    return TraceDistanceResult{
        .k = k,
        .q_k = qk,
        .D = IncoherentState(std::move(dorig)),
        .D_canonical = std::move(dcan),
        .mu = mu,
        .v_canonical = std::move(vcan),
        .v = std::move(v),
        .c_tr = 2.0 * mu,
        .op_dist = mu,
        .canonical = std::move(cf),
    };
}

inline double c_tr_pure(const PureState& x)
{
    return nearest_incoherent(x).c_tr;
}

/// ||(|x><x| - D) v - mu v||_2 computed in O(n) without forming the matrix.
inline double eigen_residual(const PureState& x, const TraceDistanceResult& r)
{
    const ComplexVector& a = x.amplitudes();
    const Complex overlap = a.dot(r.v); // <x|v>
    ComplexVector res = a * overlap - r.D.diag().cast<Complex>().cwiseProduct(r.v) - r.mu * r.v;
    return res.norm();
}

struct RankShortcuts {
    bool rank_one = false;  ///< nearest state is diag(1,0,...,0) in canonical order
    bool full_rank = false; ///< nearest state is invertible
};

/// Direct tests for the k = 1 and k = n cases: k = 1 iff x_1 m_2 >= 2 x_2 m_1,
/// and k = n iff 1 > s_n (s_n - n x_n). moduli sorted descending, unit norm, n >= 2.
inline RankShortcuts rank_shortcuts(std::span<const double> moduli)
{
    const std::size_t n = moduli.size();
    if (n < 2)
        throw ValidationError("rank_shortcuts: need n >= 2");
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::size_t j = n; j-- > 1;) {
        const double sq = moduli[j] * moduli[j];
        m1 += sq;
        if (j >= 2)
            m2 += sq;
    }
    double sn = 0.0;
    for (double xv : moduli)
        sn += xv;
    const double x1 = moduli[0];
    const double x2 = moduli[1];
    const double xn = moduli[n - 1];
    return RankShortcuts{
        .rank_one = x1 * m2 >= 2.0 * x2 * m1,
        .full_rank = 1.0 > sn * (sn - static_cast<double>(n) * xn),
    };
}

inline RankShortcuts rank_shortcuts(const RealVector& moduli)
{
    return rank_shortcuts(std::span<const double>(moduli.data(), static_cast<std::size_t>(moduli.size())));
}

/// Full-rank nearest state from the k = n shortcut: d_j = (1 - s_n (s_n - n x_j)) / n.
inline RealVector full_rank_weights(std::span<const double> moduli)
{
    const Index n = static_cast<Index>(moduli.size());
    double sn = 0.0;
    for (double xv : moduli)
        sn += xv;
    RealVector d(n);
    for (Index j = 0; j < n; ++j)
        d(j) = (1.0 - sn * (sn - static_cast<double>(n) * moduli[static_cast<std::size_t>(j)])) /
               static_cast<double>(n);
    return d;
}

/// Upper bound 2 - 2/n on the trace distance of coherence in dimension n.
inline double max_coherence_bound(Index n)
{
    if (n <= 0)
        throw ValidationError("max_coherence_bound: n must be positive");
    return 2.0 - 2.0 / static_cast<double>(n);
}

} // namespace coherence
