// Brute-force minimizers of g(delta) = ||rho - diag(delta)||_tr over the
// probability simplex. They share no code path with the closed form and are
// used to cross-check it.

#pragma once

#include "core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace coherence {

struct OracleResult {
    double value = 0.0;
    IncoherentState argmin;
    long iterations = 0;
    bool converged = false;
};

/// Euclidean projection onto {p : p >= 0, sum p = 1} by sorting and thresholding.
inline RealVector simplex_project(const RealVector& v)
{
    const Index n = v.size();
    if (n == 0)
        throw ValidationError("simplex_project: empty vector");
    if (!v.allFinite())
        throw ValidationError("simplex_project: non-finite entry");
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (Index j = 0; j < n; ++j) {
        cumsum += u[static_cast<std::size_t>(j)];
        const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
        if (u[static_cast<std::size_t>(j)] - t > 0.0)
            theta = t;
    }
    RealVector out = (v.array() - theta).cwiseMax(0.0);
    // Remove the last ulps of drift so the result validates as a probability vector.
    out /= out.sum();
    return out;
}

/// g(delta) = ||rho - diag(delta)||_tr.
inline double incoherent_distance(const ComplexMatrix& rho, const RealVector& delta)
{
    ComplexMatrix m = rho;
    m.diagonal() -= delta.cast<Complex>();
    return trace_norm(m);
}

struct SubgradientOptions {
    long max_iters = 100000;
    double step_scale = 0.05;  ///< step at iteration t is step_scale * g(delta_0) / sqrt(t)
    double tol = 1e-12;        ///< minimum best-value improvement per window
    long window = 1000;        ///< shorter windows stop while the iterate still oscillates
};

/// Projected subgradient descent from delta_0 = diag(rho), tracking the best iterate.
inline OracleResult c_tr_subgradient(const DensityMatrix& rho, SubgradientOptions opts = {})
{
    const Index n = rho.dim();
    const ComplexMatrix& a = rho.matrix();
    RealVector delta = simplex_project(rho.diagonal());

    double best = incoherent_distance(a, delta);
    RealVector best_delta = delta;
    const double scale = opts.step_scale * best;

    OracleResult out{.value = best, .argmin = IncoherentState(best_delta), .iterations = 0,
                     .converged = false};
    if (best == 0.0) {
        out.converged = true;
        return out;
    }

    double window_start_best = best;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(n);
    ComplexMatrix m(n, n);
    RealVector grad(n);
    long t = 1;
    for (; t <= opts.max_iters; ++t) {
        m = a;
        m.diagonal() -= delta.cast<Complex>();
        solver.compute(m, Eigen::ComputeEigenvectors);
        const RealVector& ev = solver.eigenvalues();
        const double value = ev.cwiseAbs().sum();
        if (value < best) {
            best = value;
            best_delta = delta;
        }
        // d/d delta_j of sum_i |lambda_i| is -sum_i sign(lambda_i) |u_i(j)|^2.
        grad.setZero();
        for (Index i = 0; i < n; ++i) {
            const double sgn = ev(i) > 0.0 ? 1.0 : (ev(i) < 0.0 ? -1.0 : 0.0);
            if (sgn != 0.0)
                grad -= sgn * solver.eigenvectors().col(i).cwiseAbs2();
        }
        // Only the component tangent to the simplex matters.
        grad.array() -= grad.mean();
        const double gnorm = grad.norm();
        if (gnorm == 0.0) {
            out.converged = true;
            break;
        }
        const double step = scale / std::sqrt(static_cast<double>(t));
        delta = simplex_project(delta - (step / gnorm) * grad);

        if (t % opts.window == 0) {
            if (window_start_best - best < opts.tol) {
                out.converged = true;
                break;
            }
            window_start_best = best;
        }
    }
    out.value = best;
    out.argmin = IncoherentState(best_delta);
    out.iterations = std::min(t, opts.max_iters);
    return out;
}

/// Worst-case l1 distance from a simplex point to the nearest point of the
/// lattice with the given resolution. g is 1-Lipschitz in that distance.
inline double lattice_error_bound(Index n, long resolution)
{
    const double lo = static_cast<double>(n / 2);
    const double hi = static_cast<double>(n - n / 2);
    return 2.0 * lo * hi / (static_cast<double>(n) * static_cast<double>(resolution));
}

inline constexpr Index grid_max_dim = 4;

/// Exhaustive search over {a / resolution : a in N^n, sum a = resolution}.
/// Ties keep the lexicographically first lattice point.
inline OracleResult c_tr_grid(const DensityMatrix& rho, long resolution)
{
    const Index n = rho.dim();
    if (n > grid_max_dim)
        throw ValidationError("c_tr_grid: dimension " + std::to_string(n) +
                              " exceeds the grid limit of " + std::to_string(grid_max_dim));
    if (resolution <= 0)
        throw ValidationError("c_tr_grid: resolution must be positive");

    const ComplexMatrix& a = rho.matrix();
    const double res = static_cast<double>(resolution);
    std::vector<long> counts(static_cast<std::size_t>(n), 0);
    RealVector delta(n);
    double best = std::numeric_limits<double>::infinity();
    std::vector<long> best_counts;
    long visited = 0;

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(n);
    ComplexMatrix m(n, n);
    // Ascending lexicographic order; the last entry takes the remainder.
    std::function<void(Index, long)> visit = [&](Index pos, long remaining) {
        if (pos == n - 1) {
            counts[static_cast<std::size_t>(pos)] = remaining;
            for (Index i = 0; i < n; ++i)
                delta(i) = static_cast<double>(counts[static_cast<std::size_t>(i)]) / res;
            m = a;
            m.diagonal() -= delta.cast<Complex>();
            solver.compute(m, Eigen::EigenvaluesOnly);
            const double value = solver.eigenvalues().cwiseAbs().sum();
            ++visited;
            if (value < best) {
                best = value;
                best_counts = counts;
            }
            return;
        }
        for (long c = 0; c <= remaining; ++c) {
            counts[static_cast<std::size_t>(pos)] = c;
            visit(pos + 1, remaining - c);
        }
    };
    visit(0, resolution);

    RealVector arg(n);
    for (Index i = 0; i < n; ++i)
        arg(i) = static_cast<double>(best_counts[static_cast<std::size_t>(i)]) / res;
    arg /= arg.sum();
    return OracleResult{.value = best, .argmin = IncoherentState(std::move(arg)),
                        .iterations = visited, .converged = true};
}

} // namespace coherence
