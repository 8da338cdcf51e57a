#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <iterator>
#include <vector>

#include "errors.hpp"

namespace lieball {

namespace detail {
inline void require_dim(int n) {
    if (n < 2) throw ValidationError("n", "dimension must be >= 2");
}
} // namespace detail

// Dimension-n Legendre polynomials P_k^n, normalised by P_k^n(1) = 1. They
// satisfy
//   (k + n - 2) P_{k+1}(x) = (2k + n - 2) x P_k(x) - k P_{k-1}(x)
// with P_0 = 1, P_1 = x. For n = 2 this is the Chebyshev recurrence.

/// P_k^n(x). Valid for any real x, including |x| > 1.
inline double legendre_nd(int k, int n, double x) {
    detail::require_dim(n);
    if (k < 0) throw ValidationError("k", "degree must be >= 0");
    if (k == 0) return 1.0;
    double prev = 1.0, cur = x;
    for (int j = 1; j < k; ++j) {
        const double next = ((2.0 * j + n - 2) * x * cur - j * prev) / (j + n - 2.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

/// b^k P_k^n(a / b) without the division, so b = 0 is allowed and returns
/// d_k a^k. Uses the homogenised recurrence.
inline double legendre_homogeneous(int k, int n, double a, double b) {
    detail::require_dim(n);
    if (k == 0) return 1.0;
    double prev = 1.0, cur = a;
    for (int j = 1; j < k; ++j) {
        const double next = ((2.0 * j + n - 2) * a * cur - j * b * b * prev) / (j + n - 2.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Monomial coefficients c_0..c_k of P_k^n, built by running the recurrence
/// on coefficient vectors.
inline std::vector<double> legendre_coefficients(int k, int n) {
    detail::require_dim(n);
    std::vector<double> prev{1.0};
    if (k == 0) return prev;
    std::vector<double> cur{0.0, 1.0};
    for (int j = 1; j < k; ++j) {
        std::vector<double> next(static_cast<std::size_t>(j) + 2, 0.0);
        const double a = (2.0 * j + n - 2) / (j + n - 2.0);
        const double b = j / (j + n - 2.0);
        for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += a * cur[i];
        for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= b * prev[i];
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

/// Leading coefficient d_k of P_k^n.
inline double legendre_leading(int k, int n) {
    return legendre_coefficients(k, n).back();
}

/// (x + sqrt(x^2 - 1))^k, the upper bound for P_k^n on [1, inf) that follows
/// from the Laplace integral representation.
inline double legendre_upper(int k, double x) {
    if (!(x >= 1.0)) throw ValidationError("x", "bound requires x >= 1");
    if (k < 0) throw ValidationError("k", "degree must be >= 0");
    return std::pow(x + std::sqrt((x - 1.0) * (x + 1.0)), k);
}

inline std::uint64_t binomial(int top, int bottom) {
    if (bottom < 0 || top < bottom) return 0;
    bottom = std::min(bottom, top - bottom);
    std::uint64_t r = 1;
    for (int i = 1; i <= bottom; ++i) r = r * static_cast<std::uint64_t>(top - bottom + i) / static_cast<std::uint64_t>(i);
    return r;
}

/// a_k: dimension of the space of harmonic homogeneous polynomials of degree k
/// in n variables, C(k+n-1, n-1) - C(k+n-3, n-1). Equal to the Gamma-function
/// formula (2k+n-2) G(k+n-2) / (G(k+1) G(n-1)) wherever that is defined; for
/// n = 2 it gives 1, 2, 2, ... (the Gamma formula hits G(0) at k = 0).
inline std::uint64_t harmonic_dim(int k, int n) {
    detail::require_dim(n);
    if (k < 0) throw ValidationError("k", "degree must be >= 0");
    return binomial(k + n - 1, n - 1) - binomial(k + n - 3, n - 1);
}

/// Surface area omega_{n-1} = 2 pi^{n/2} / Gamma(n/2) of S^{n-1}.
inline double sphere_area(int n) {
    detail::require_dim(n);
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Integral of the monomial x^alpha over S^{n-1}.
template <typename Exponents>
double monomial_sphere_integral(const Exponents& alpha, int n) {
    detail::require_dim(n);
    if (static_cast<int>(std::size(alpha)) != n)
        throw ValidationError("alpha", "multi-index length must equal n");
    double log_num = 0.0;
    int total = 0;
    for (int a : alpha) {
        if (a < 0) throw ValidationError("alpha", "exponents must be >= 0");
        if (a % 2 != 0) return 0.0;
        log_num += std::lgamma(0.5 * (a + 1));
        total += a;
    }
    return 2.0 * std::exp(log_num - std::lgamma(0.5 * (total + n)));
}

} // namespace lieball
