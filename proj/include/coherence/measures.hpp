// l1-norm, relative-entropy and (pure-state) robustness coherence measures,
// and the inequalities that relate them. Logarithms are base 2 throughout.

#pragma once

#include "core.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace coherence {

/// Warnings raised while computing a measure, e.g. eigenvalue clipping.
struct Diagnostics {
    std::vector<std::string> warnings;
    double max_clip = 0.0;
};

/// Sum of |rho_ij| over i != j.
inline double c_l1(const DensityMatrix& rho)
{
    return offdiagonal_mass(rho.matrix());
}

/// c_l1(|x><x|) = (sum_i |x_i|)^2 - sum_i |x_i|^2, in O(n).
inline double c_l1(const PureState& x)
{
    const RealVector mod = x.moduli();
    const double s = mod.sum();
    return std::max(0.0, s * s - mod.squaredNorm());
}

/// -sum p log2 p with 0 log 0 = 0.
inline double shannon_entropy(const RealVector& p)
{
    double h = 0.0;
    for (Index i = 0; i < p.size(); ++i)
        if (p(i) > 0.0)
            h -= p(i) * std::log2(p(i));
    return h;
}

inline double von_neumann_entropy(const DensityMatrix& rho, Diagnostics* diag = nullptr,
                                  const Tolerances& tol = default_tolerances)
{
    const RealVector ev = hermitian_eigenvalues(rho.matrix(), tol);
    RealVector clipped = ev.cwiseMax(0.0).cwiseMin(1.0);
    const double clip = (clipped - ev).cwiseAbs().maxCoeff();
    if (diag) {
        diag->max_clip = std::max(diag->max_clip, clip);
        if (clip > tol.clip_warning)
            diag->warnings.push_back("von_neumann_entropy: clipped eigenvalue drift of " +
                                     detail::format_double(clip));
    }
    return shannon_entropy(clipped);
}

/// S(rho_diag) - S(rho).
inline double c_rel_entropy(const DensityMatrix& rho, Diagnostics* diag = nullptr,
                            const Tolerances& tol = default_tolerances)
{
    if (offdiagonal_mass(rho.matrix()) == 0.0)
        return 0.0;
    const double value = shannon_entropy(rho.diagonal().cwiseMax(0.0)) -
                         von_neumann_entropy(rho, diag, tol);
    return std::max(0.0, value);
}

/// For pure states the von Neumann term vanishes: C_r = H(|x_1|^2, ..., |x_n|^2).
inline double c_rel_entropy(const PureState& x)
{
    return shannon_entropy(x.populations());
}

/// Robustness of coherence of a pure state; it coincides with c_l1.
inline double c_robustness_pure(const PureState& x)
{
    return c_l1(x);
}

/// f(lambda) = (sum_i sqrt(lambda_i))^2 - 1 + sum_i lambda_i log2 lambda_i, never negative.
inline double f_gap(const ProbabilityVector& lambda)
{
    const RealVector& p = lambda.values();
    const double root_sum = p.cwiseSqrt().sum();
    return root_sum * root_sum - 1.0 - shannon_entropy(p);
}

struct L1RelEntCheck {
    double c_l1 = 0.0;
    double c_r = 0.0;
    double lower = 0.0; ///< max(c_r, 2^c_r - 1)
    bool holds = false;
};

inline constexpr double inequality_slack = 1e-12;

/// C_l1 >= max(C_r, 2^C_r - 1) for a pure state.
inline L1RelEntCheck check_l1_vs_relent(const PureState& x)
{
    L1RelEntCheck out;
    out.c_l1 = c_l1(x);
    out.c_r = c_rel_entropy(x);
    out.lower = std::max(out.c_r, std::exp2(out.c_r) - 1.0);
    out.holds = out.c_l1 >= out.lower - inequality_slack;
    return out;
}

} // namespace coherence
