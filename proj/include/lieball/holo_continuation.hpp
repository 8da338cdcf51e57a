#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "complex_geometry.hpp"
#include "errors.hpp"
#include "lf_transform.hpp"
#include "parallel.hpp"
#include "special_functions.hpp"

namespace lieball {

struct ContinuationResult {
    cplx value;
    int terms_used = 0;
    std::optional<double> tail_bound; ///< empirical: built from the estimated (C_hat, rho_hat)
    std::vector<double> per_degree_norms;
    std::vector<std::string> warnings;
};

namespace detail {
/// a_k(n) in floating point, usable far beyond the range of harmonic_dim.
inline double harmonic_dim_real(int k, int n) {
    if (k == 0) return 1.0;
    if (n == 2) return 2.0;
    return (2.0 * k + n - 2.0) / (n - 2.0) * std::exp(std::lgamma(k + n - 2.0) - std::lgamma(k + 1.0) - std::lgamma(n - 2.0));
}
} // namespace detail

/// C_hat / sqrt(omega) * sum_{k > K} a_k (tau / rho_hat)^k, summed until the
/// terms have started to fall and drop below 1e-18 of the running total.
inline double tail_majorant(const DecayEstimate& decay, int n, int K) {
    if (n < 2) throw ValidationError("n", "dimension must be >= 2");
    if (K < 0) throw ValidationError("K", "must be >= 0");
    if (!(decay.tau < decay.rho_hat)) throw ValidationError("tau", "tail majorant requires tau < rho_hat");
    const double x = std::isinf(decay.rho_hat) ? 0.0 : decay.tau / decay.rho_hat;
    if (x == 0.0 || decay.C_hat == 0.0) return 0.0;
    double total = 0.0, last = std::numeric_limits<double>::infinity();
    const double log_x = std::log(x);
    for (long k = K + 1; k < K + 100'000'000L; ++k) {
        const double term = detail::harmonic_dim_real(static_cast<int>(k), n) * std::exp(k * log_x);
        total += term;
        if (term <= last && term < 1e-18 * total) break;
        last = term;
    }
    return decay.C_hat / std::sqrt(sphere_area(n)) * total;
}

/// Partial sum of the continuation series at z with no domain check. Only
/// meaningful inside the Lie ball; exposed for probing the boundary.
inline SeriesSum partial_sum_unchecked(const LFExpansion& exp, const ComplexPoint& z) { return sum_series(exp, z); }

/// f_K(z) = sum_{k<=K} sum_l p_{k,l}(q(z)) Y_{k,l}(z) for z in the Lie ball of radius R.
inline ContinuationResult evaluate(const LFExpansion& exp, const ComplexPoint& z,
                                   const std::optional<DecayEstimate>& decay = std::nullopt) {
    if (z.dim() != exp.n) throw ValidationError("z", "dimension mismatch with expansion");
    const double lie = lie_norm_sq(z);
    if (!(lie < exp.R * exp.R))
        throw DomainError("point outside the Lie ball: lie_norm_sq = " + std::to_string(lie) +
                          " >= R^2 = " + std::to_string(exp.R * exp.R));
    auto sum = sum_series(exp, z);
    ContinuationResult res;
    res.value = sum.value;
    res.terms_used = static_cast<int>(sum.per_degree_norms.size());
    res.per_degree_norms = std::move(sum.per_degree_norms);
    if (decay) {
        if (!(decay->tau < decay->rho_hat)) {
            res.warnings.push_back("tau / rho_hat >= 1: tail bound omitted");
        } else if (lie > decay->tau * decay->tau) {
            res.warnings.push_back("lie_norm_sq(z) > tau^2: no tail bound available");
        } else {
            res.tail_bound = tail_majorant(*decay, exp.n, exp.K);
        }
    }
    return res;
}

struct GridRow {
    ComplexPoint z;
    cplx value;
    std::optional<double> tail_bound;
};

/// Evaluates every point; rows follow the input order.
inline std::vector<GridRow> grid_extend(const LFExpansion& exp, const std::vector<ComplexPoint>& points,
                                       const std::optional<DecayEstimate>& decay = std::nullopt) {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].dim() != exp.n)
            throw ValidationError("points[" + std::to_string(i) + "]", "dimension mismatch with expansion");
        if (!in_lie_ball(points[i], exp.R))
            throw DomainError("point " + std::to_string(i) + " lies outside the Lie ball of radius " +
                              std::to_string(exp.R));
    }
    std::vector<GridRow> rows(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        auto r = evaluate(exp, points[i], decay);
        rows[i] = GridRow{points[i], r.value, r.tail_bound};
    });
    return rows;
}

} // namespace lieball
