#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "complex_geometry.hpp"
#include "errors.hpp"
#include "polynomial.hpp"
#include "special_functions.hpp"

namespace lieball {

/// Size caps for basis construction.
struct BasisLimits {
    static constexpr int max_degree = 40;
    static constexpr int max_dim = 8;
    /// a_k times the number of degree-k monomials; bounds memory and time.
    static constexpr double max_work = 2.5e7;
};

/// Labels one member of the Gelfand-Tsetlin chain basis: the nonincreasing
/// chain k = m_n >= m_{n-1} >= ... >= m_2 >= 0, and whether the planar factor
/// is Re (cosine) or Im (sine) of (x_1 + i x_2)^{m_2}.
struct ChainLabel {
    std::vector<int> orders; ///< orders[j - 2] = m_j for j = 2..n
    bool sine = false;

    friend bool operator==(const ChainLabel&, const ChainLabel&) = default;
};

namespace detail {

inline std::vector<ChainLabel> chain_labels(int n, int k) {
    std::vector<ChainLabel> labels;
    std::vector<int> orders(static_cast<std::size_t>(n - 1), 0);
    orders[n - 2] = k;
    // Enumerate m_{n-1}, ..., m_2 in ascending lexicographic order.
    auto rec = [&](auto&& self, int j) -> void {
        if (j < 2) {
            labels.push_back({orders, false});
            if (orders[0] > 0) labels.push_back({orders, true});
            return;
        }
        for (int m = 0; m <= orders[j - 1]; ++m) {
            orders[j - 2] = m;
            self(self, j - 1);
        }
    };
    if (n == 2) {
        labels.push_back({orders, false});
        if (k > 0) labels.push_back({orders, true});
    } else {
        rec(rec, n - 1);
    }
    return labels;
}

/// log of int_{-1}^{1} C_d^lambda(t)^2 (1 - t^2)^{lambda - 1/2} dt.
inline double log_gegenbauer_norm_sq(int d, double lambda) {
    return std::log(std::numbers::pi) + (1.0 - 2.0 * lambda) * std::log(2.0) + std::lgamma(d + 2.0 * lambda) -
           std::lgamma(d + 1.0) - std::log(d + lambda) - 2.0 * std::lgamma(lambda);
}

/// 1 / ||Y||_{L^2(S^{n-1})} for the unnormalised chain product.
inline double chain_normaliser(int n, const ChainLabel& label) {
    double log_norm_sq = std::log(label.orders[0] == 0 ? 2.0 * std::numbers::pi : std::numbers::pi);
    for (int j = 3; j <= n; ++j) {
        const int lower = label.orders[j - 3];
        const int d = label.orders[j - 2] - lower;
        log_norm_sq += log_gegenbauer_norm_sq(d, lower + 0.5 * (j - 2));
    }
    return std::exp(-0.5 * log_norm_sq);
}

/// Monomial coefficients of C_d^lambda(t) in powers (t^{d-2i}), i = 0..d/2.
inline std::vector<double> gegenbauer_coefficients(int d, double lambda) {
    std::vector<double> g(static_cast<std::size_t>(d / 2) + 1);
    // Leading term 2^d (lambda)_d / d!.
    double lead = 1.0;
    for (int i = 0; i < d; ++i) lead *= 2.0 * (lambda + i) / (i + 1.0);
    g[0] = lead;
    for (int i = 0; i + 1 < static_cast<int>(g.size()); ++i)
        g[i + 1] = -g[i] * (d - 2.0 * i) * (d - 2.0 * i - 1.0) / (4.0 * (i + 1.0) * (d - i - 1.0 + lambda));
    return g;
}

} // namespace detail

/// Evaluates chain-basis members at one point (real or complex coordinates)
/// through homogenised Gegenbauer recurrences. Tables cover every member of
/// degree <= max_degree, so one evaluator serves a whole expansion.
template <typename U>
class ChainEvaluator {
public:
    ChainEvaluator(int n, int max_degree, std::span<const U> x) : n_(n), K_(max_degree) {
        if (static_cast<int>(x.size()) != n) throw ValidationError("point", "dimension mismatch");
        const std::size_t width = static_cast<std::size_t>(K_) + 1;
        plus_.assign(width, U(1));
        minus_.assign(width, U(1));
        const Planar i1 = imag_unit();
        for (int m = 1; m <= K_; ++m) {
            plus_[m] = plus_[m - 1] * (x[0] + i1 * x[1]);
            minus_[m] = minus_[m - 1] * (x[0] - i1 * x[1]);
        }
        // gegen_[j - 3][lower][d] = s_j^{d/2} C_d^{lower + (j-2)/2}(x_j / sqrt(s_j)).
        gegen_.resize(static_cast<std::size_t>(std::max(0, n - 2)));
        U s = x[0] * x[0] + x[1] * x[1];
        for (int j = 3; j <= n; ++j) {
            const U xj = x[j - 1];
            s += xj * xj;
            auto& table = gegen_[j - 3];
            table.assign(width * width, U(0));
            for (int lower = 0; lower <= K_; ++lower) {
                const double lambda = lower + 0.5 * (j - 2);
                U* row = &table[static_cast<std::size_t>(lower) * width];
                row[0] = U(1);
                if (K_ - lower >= 1) row[1] = U(2.0 * lambda) * xj;
                for (int d = 1; d + 1 <= K_ - lower; ++d)
                    row[d + 1] = (U(2.0 * (d + lambda)) * xj * row[d] - U(d + 2.0 * lambda - 1.0) * s * row[d - 1]) /
                                 U(d + 1.0);
            }
        }
    }

    /// Unnormalised chain product for the label.
    U raw(const ChainLabel& label) const {
        const int m2 = label.orders[0];
        U value;
        if constexpr (std::is_same_v<U, double>) {
            // For real points the planar factor is Re/Im of (x_1 + i x_2)^m.
            const std::complex<double> w = plus_[m2];
            value = label.sine ? w.imag() : w.real();
        } else {
            value = label.sine ? (plus_[m2] - minus_[m2]) / (U(2) * imag_unit())
                               : (plus_[m2] + minus_[m2]) / U(2);
        }
        const std::size_t width = static_cast<std::size_t>(K_) + 1;
        for (int j = 3; j <= n_; ++j) {
            const int lower = label.orders[j - 3];
            const int d = label.orders[j - 2] - lower;
            value *= gegen_[j - 3][static_cast<std::size_t>(lower) * width + d];
        }
        return value;
    }

private:
    using Planar = std::conditional_t<std::is_same_v<U, double>, std::complex<double>, U>;

    static Planar imag_unit() { return Planar(0.0, 1.0); }

    int n_;
    int K_;
    std::vector<Planar> plus_;
    std::vector<Planar> minus_;
    std::vector<std::vector<U>> gegen_;
};

/// Orthonormal basis {Y_{k,l}} of the real harmonic homogeneous polynomials of
/// degree k in n variables, w.r.t. the L^2 inner product on S^{n-1}.
/// Members have real coefficients, so Y*_{k,l} = Y_{k,l}.
class HarmonicBasis {
public:
    HarmonicBasis(int n, int k) : n_(n), k_(k) {
        if (n < 2) throw ValidationError("n", "dimension must be >= 2");
        if (k < 0) throw ValidationError("k", "degree must be >= 0");
        if (n > BasisLimits::max_dim || k > BasisLimits::max_degree)
            throw ResourceError("basis cap exceeded: requires n <= " + std::to_string(BasisLimits::max_dim) +
                                " and k <= " + std::to_string(BasisLimits::max_degree));
        const double work = static_cast<double>(harmonic_dim(k, n)) * static_cast<double>(binomial(k + n - 1, n - 1));
        if (work > BasisLimits::max_work)
            throw ResourceError("basis cap exceeded: a_k * #monomials = " + std::to_string(work) + " > " +
                                std::to_string(BasisLimits::max_work));
        labels_ = detail::chain_labels(n, k);
        normalisers_.reserve(labels_.size());
        for (const auto& lab : labels_) normalisers_.push_back(detail::chain_normaliser(n, lab));
        members_.reserve(labels_.size());
        for (std::size_t l = 0; l < labels_.size(); ++l) members_.push_back(expand_member(l));
    }

    int dim() const noexcept { return n_; }
    int degree() const noexcept { return k_; }
    std::size_t size() const noexcept { return members_.size(); }
    const RealPolynomial& member(std::size_t l) const { return members_.at(l); }
    const std::vector<RealPolynomial>& members() const noexcept { return members_; }
    const ChainLabel& label(std::size_t l) const { return labels_.at(l); }
    double normaliser(std::size_t l) const { return normalisers_.at(l); }

    /// All Y_{k,l}(x) via the recurrence evaluator.
    template <typename U>
    std::vector<U> evaluate_all(std::span<const U> x) const {
        ChainEvaluator<U> ev(n_, k_, x);
        return evaluate_with(ev);
    }

    template <typename U>
    std::vector<U> evaluate_with(const ChainEvaluator<U>& ev) const {
        std::vector<U> out(labels_.size());
        for (std::size_t l = 0; l < labels_.size(); ++l) out[l] = ev.raw(labels_[l]) * normalisers_[l];
        return out;
    }

    std::vector<cplx> evaluate_all(const ComplexPoint& z) const {
        std::vector<cplx> w(static_cast<std::size_t>(z.dim()));
        for (int j = 0; j < z.dim(); ++j) w[j] = z[j];
        return evaluate_all<cplx>(std::span<const cplx>(w));
    }

private:
    RealPolynomial expand_member(std::size_t l) const {
        const auto& lab = labels_[l];
        const int m2 = lab.orders[0];
        RealPolynomial poly(n_);
        // Re / Im of (x_1 + i x_2)^{m2}.
        for (int j = 0; j <= m2; ++j) {
            if ((j % 2 == 1) != lab.sine) continue;
            const double sign = ((lab.sine ? (j - 1) / 2 : j / 2) % 2 == 0) ? 1.0 : -1.0;
            MultiIndex a(static_cast<std::size_t>(n_), 0);
            a[0] = m2 - j;
            a[1] = j;
            poly.add_term(std::move(a), sign * static_cast<double>(binomial(m2, j)));
        }
        for (int j = 3; j <= n_; ++j) {
            const int lower = lab.orders[j - 3];
            const int d = lab.orders[j - 2] - lower;
            const auto g = detail::gegenbauer_coefficients(d, lower + 0.5 * (j - 2));
            const auto s = RealPolynomial::partial_norm_sq(n_, j);
            RealPolynomial factor(n_);
            RealPolynomial s_pow = RealPolynomial::constant(n_, 1.0);
            for (std::size_t i = 0; i < g.size(); ++i) {
                MultiIndex a(static_cast<std::size_t>(n_), 0);
                a[j - 1] = d - 2 * static_cast<int>(i);
                RealPolynomial mono(n_);
                mono.add_term(std::move(a), g[i]);
                factor += mono * s_pow;
                s_pow = s_pow * s;
            }
            poly = poly * factor;
        }
        return poly * normalisers_[l];
    }

    int n_;
    int k_;
    std::vector<ChainLabel> labels_;
    std::vector<double> normalisers_;
    std::vector<RealPolynomial> members_;
};

/// Bases are pure functions of (n, k); built once and shared read-only.
inline std::shared_ptr<const HarmonicBasis> build_basis(int n, int k) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const HarmonicBasis>> cache;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find({n, k}); it != cache.end()) return it->second;
    }
    auto basis = std::make_shared<const HarmonicBasis>(n, k);
    std::lock_guard lock(mutex);
    return cache.try_emplace({n, k}, std::move(basis)).first->second;
}

/// Bases for every degree 0..K.
inline std::vector<std::shared_ptr<const HarmonicBasis>> build_bases(int n, int K) {
    std::vector<std::shared_ptr<const HarmonicBasis>> out;
    out.reserve(static_cast<std::size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) out.push_back(build_basis(n, k));
    return out;
}

/// Y(z) for a single basis polynomial at a complex point (monomial evaluation).
inline cplx eval_complex(const RealPolynomial& p, const ComplexPoint& z) {
    if (p.dim() != z.dim()) throw ValidationError("z", "dimension mismatch");
    return p.eval_complex(z);
}

/// Relative Laplacian residual |Lap p| / |p| in coefficient norm.
inline double harmonic_residual(const RealPolynomial& p) {
    const double norm = p.coefficient_norm();
    return norm == 0.0 ? 0.0 : p.laplacian().coefficient_norm() / norm;
}

namespace detail {
inline std::vector<double> unit(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    if (s == 0.0) throw ValidationError("x", "zero vector has no direction");
    const double inv = 1.0 / std::sqrt(s);
    std::vector<double> u(x.begin(), x.end());
    for (auto& v : u) v *= inv;
    return u;
}
} // namespace detail

/// |sum_l Y_{k,l}(x) Y_{k,l}(y) - |x|^k |y|^k (a_k / omega) P_k^n(<x/|x|, y/|y|>)|
/// for real nonzero x, y.
inline double addition_residual(int n, int k, std::span<const double> x, std::span<const double> y) {
    if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != n)
        throw ValidationError("x", "dimension mismatch");
    const auto ux = detail::unit(x);
    const auto uy = detail::unit(y);
    const auto basis = build_basis(n, k);
    double lhs = 0.0;
    for (const auto& Y : basis->members()) lhs += Y(x) * Y(y);
    double nx = 0.0, ny = 0.0, dot = 0.0;
    for (int j = 0; j < n; ++j) {
        nx += x[j] * x[j];
        ny += y[j] * y[j];
        dot += ux[j] * uy[j];
    }
    dot = std::clamp(dot, -1.0, 1.0);
    const double rhs = std::pow(std::sqrt(nx * ny), k) * static_cast<double>(harmonic_dim(k, n)) / sphere_area(n) *
                       legendre_nd(k, n, dot);
    return std::abs(lhs - rhs);
}

/// sum_l |Y_{k,l}(z)|^2 by direct (monomial) evaluation of every member.
inline double norm_sum_complex(int n, int k, const ComplexPoint& z) {
    const auto basis = build_basis(n, k);
    double s = 0.0;
    for (const auto& Y : basis->members()) s += std::norm(eval_complex(Y, z));
    return s;
}

/// |q(z)| below this fraction of |z|^2 is treated as q = 0.
inline constexpr double q_zero_threshold = 1e-8;

/// Closed form of sum_l |Y_{k,l}(z)|^2: (a_k/omega) |q|^k P_k^n(|z|^2/|q|) when
/// |q(z)| > 0, and (a_k/omega) d_k |z|^{2k} on the null cone q(z) = 0.
inline double norm_sum_formula(int n, int k, const ComplexPoint& z) {
    const double a = abs_sq(z);
    const double qa = std::abs(q_of(z));
    const double scale = static_cast<double>(harmonic_dim(k, n)) / sphere_area(n);
    if (qa <= q_zero_threshold * a) return scale * legendre_leading(k, n) * std::pow(a, k);
    return scale * std::pow(qa, k) * legendre_nd(k, n, a / qa);
}

} // namespace lieball
