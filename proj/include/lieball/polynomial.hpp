#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "complex_geometry.hpp"
#include "errors.hpp"

namespace lieball {

using MultiIndex = std::vector<int>;

inline int total_degree(const MultiIndex& alpha) {
    return std::accumulate(alpha.begin(), alpha.end(), 0);
}

/// All multi-indices of length n and total degree d, in lexicographic order.
inline std::vector<MultiIndex> multi_indices(int n, int d) {
    std::vector<MultiIndex> out;
    MultiIndex cur(static_cast<std::size_t>(n), 0);
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == n - 1) {
            cur[pos] = remaining;
            out.push_back(cur);
            return;
        }
        for (int a = 0; a <= remaining; ++a) {
            cur[pos] = a;
            self(self, pos + 1, remaining - a);
        }
    };
    if (n >= 1 && d >= 0) rec(rec, 0, d);
    return out;
}

/// Sparse polynomial in n variables: multi-index -> coefficient. Terms are
/// kept in lexicographic order so iteration and serialisation are stable.
template <typename T>
class SparsePolynomial {
public:
    using Terms = std::map<MultiIndex, T>;

    SparsePolynomial() = default;
    explicit SparsePolynomial(int n) : n_(n) {
        if (n < 1) throw ValidationError("n", "dimension must be >= 1");
    }

    static SparsePolynomial constant(int n, T c) {
        SparsePolynomial p(n);
        p.add_term(MultiIndex(static_cast<std::size_t>(n), 0), c);
        return p;
    }

    static SparsePolynomial variable(int n, int j) {
        SparsePolynomial p(n);
        MultiIndex a(static_cast<std::size_t>(n), 0);
        a[j] = 1;
        p.add_term(std::move(a), T(1));
        return p;
    }

    /// x_0^2 + ... + x_{m-1}^2 (the first m variables).
    static SparsePolynomial partial_norm_sq(int n, int m) {
        SparsePolynomial p(n);
        for (int j = 0; j < m; ++j) {
            MultiIndex a(static_cast<std::size_t>(n), 0);
            a[j] = 2;
            p.add_term(std::move(a), T(1));
        }
        return p;
    }

    int dim() const noexcept { return n_; }
    const Terms& terms() const noexcept { return terms_; }
    bool empty() const noexcept { return terms_.empty(); }
    std::size_t size() const noexcept { return terms_.size(); }

    void add_term(MultiIndex alpha, T c) {
        if (static_cast<int>(alpha.size()) != n_)
            throw ValidationError("alpha", "multi-index length must equal n");
        for (int a : alpha)
            if (a < 0) throw ValidationError("alpha", "exponents must be >= 0");
        if (c == T(0)) return;
        auto [it, inserted] = terms_.try_emplace(std::move(alpha), c);
        if (!inserted) {
            it->second += c;
            if (it->second == T(0)) terms_.erase(it);
        }
    }

    int degree() const {
        int d = -1;
        for (const auto& [a, c] : terms_) d = std::max(d, total_degree(a));
        return d;
    }

    /// True when every term has the same total degree (the zero polynomial counts).
    bool is_homogeneous() const {
        if (terms_.empty()) return true;
        const int d = total_degree(terms_.begin()->first);
        return std::all_of(terms_.begin(), terms_.end(),
                           [d](const auto& t) { return total_degree(t.first) == d; });
    }

    double coefficient_norm() const {
        double s = 0.0;
        for (const auto& [a, c] : terms_) s += std::norm(c);
        return std::sqrt(s);
    }

    SparsePolynomial& operator+=(const SparsePolynomial& o) {
        check_dim(o);
        for (const auto& [a, c] : o.terms_) add_term(a, c);
        return *this;
    }
    SparsePolynomial& operator-=(const SparsePolynomial& o) {
        check_dim(o);
        for (const auto& [a, c] : o.terms_) add_term(a, -c);
        return *this;
    }
    SparsePolynomial& operator*=(T s) {
        if (s == T(0)) {
            terms_.clear();
            return *this;
        }
        for (auto& [a, c] : terms_) c *= s;
        return *this;
    }

    friend SparsePolynomial operator+(SparsePolynomial a, const SparsePolynomial& b) { return a += b; }
    friend SparsePolynomial operator-(SparsePolynomial a, const SparsePolynomial& b) { return a -= b; }
    friend SparsePolynomial operator*(SparsePolynomial a, T s) { return a *= s; }
    friend SparsePolynomial operator*(T s, SparsePolynomial a) { return a *= s; }

    friend SparsePolynomial operator*(const SparsePolynomial& a, const SparsePolynomial& b) {
        a.check_dim(b);
        SparsePolynomial out(a.n_);
        MultiIndex g(static_cast<std::size_t>(a.n_));
        for (const auto& [ai, ac] : a.terms_) {
            for (const auto& [bi, bc] : b.terms_) {
                for (int j = 0; j < a.n_; ++j) g[j] = ai[j] + bi[j];
                out.add_term(g, ac * bc);
            }
        }
        return out;
    }

    SparsePolynomial pow(int e) const {
        SparsePolynomial r = constant(n_, T(1));
        for (int i = 0; i < e; ++i) r = r * *this;
        return r;
    }

    SparsePolynomial derivative(int j) const {
        SparsePolynomial out(n_);
        for (const auto& [a, c] : terms_) {
            if (a[j] == 0) continue;
            MultiIndex b = a;
            b[j] -= 1;
            out.add_term(std::move(b), c * static_cast<double>(a[j]));
        }
        return out;
    }

    /// Coefficient-wise Laplacian.
    SparsePolynomial laplacian() const {
        SparsePolynomial out(n_);
        for (const auto& [a, c] : terms_) {
            for (int j = 0; j < n_; ++j) {
                if (a[j] < 2) continue;
                MultiIndex b = a;
                b[j] -= 2;
                out.add_term(std::move(b), c * static_cast<double>(a[j] * (a[j] - 1)));
            }
        }
        return out;
    }

    /// Homogeneous components keyed by total degree (the homogeneous Taylor
    /// polynomials of a polynomial). Their sum is the input, term for term.
    std::map<int, SparsePolynomial> homogeneous_parts() const {
        std::map<int, SparsePolynomial> parts;
        for (const auto& [a, c] : terms_) {
            auto [it, ins] = parts.try_emplace(total_degree(a), n_);
            it->second.add_term(a, c);
        }
        return parts;
    }

    /// Evaluation at a point with coordinates of type U (double or complex).
    template <typename U>
    auto evaluate(std::span<const U> x) const {
        using R = decltype(T() * U());
        if (static_cast<int>(x.size()) != n_)
            throw ValidationError("point", "dimension mismatch in polynomial evaluation");
        const int d = std::max(degree(), 0);
        std::vector<U> powers(static_cast<std::size_t>(n_) * (d + 1));
        for (int j = 0; j < n_; ++j) {
            U p = U(1);
            for (int e = 0; e <= d; ++e) {
                powers[static_cast<std::size_t>(j) * (d + 1) + e] = p;
                p *= x[j];
            }
        }
        R sum = R(0);
        for (const auto& [a, c] : terms_) {
            R term = R(c);
            for (int j = 0; j < n_; ++j)
                if (a[j] != 0) term *= powers[static_cast<std::size_t>(j) * (d + 1) + a[j]];
            sum += term;
        }
        return sum;
    }

    auto operator()(std::span<const double> x) const { return evaluate<double>(x); }

    cplx eval_complex(const ComplexPoint& z) const {
        std::vector<cplx> w(static_cast<std::size_t>(z.dim()));
        for (int j = 0; j < z.dim(); ++j) w[j] = z[j];
        return cplx(evaluate<cplx>(std::span<const cplx>(w)));
    }

    friend bool operator==(const SparsePolynomial&, const SparsePolynomial&) = default;

private:
    void check_dim(const SparsePolynomial& o) const {
        if (o.n_ != n_) throw ValidationError("n", "polynomial dimension mismatch");
    }

    int n_ = 0;
    Terms terms_;
};

using RealPolynomial = SparsePolynomial<double>;
using ComplexPolynomial = SparsePolynomial<cplx>;

inline ComplexPolynomial to_complex(const RealPolynomial& p) {
    ComplexPolynomial out(p.dim());
    for (const auto& [a, c] : p.terms()) out.add_term(a, cplx(c, 0.0));
    return out;
}

/// Harmonic part of a homogeneous polynomial of degree m:
///   H[p] = sum_j c_j |x|^{2j} Laplacian^j p,
///   c_0 = 1, c_{j+1} = -c_j / (2 (j+1) (n + 2m - 2j - 4)).
/// The kernel of this projection is |x|^2 times polynomials of degree m - 2.
template <typename T>
SparsePolynomial<T> harmonic_projection(const SparsePolynomial<T>& p) {
    if (!p.is_homogeneous()) throw ValidationError("poly", "harmonic projection needs a homogeneous polynomial");
    const int n = p.dim();
    const int m = p.degree();
    SparsePolynomial<T> out(n);
    if (m < 0) return out;
    const auto r2 = SparsePolynomial<T>::partial_norm_sq(n, n);
    SparsePolynomial<T> lap = p;
    SparsePolynomial<T> r2j = SparsePolynomial<T>::constant(n, T(1));
    double c = 1.0;
    for (int j = 0; 2 * j <= m; ++j) {
        out += (r2j * lap) * T(c);
        if (2 * (j + 1) > m) break;
        c = -c / (2.0 * (j + 1) * (n + 2.0 * m - 2.0 * j - 4.0));
        lap = lap.laplacian();
        r2j = r2j * r2;
    }
    return out;
}

} // namespace lieball
