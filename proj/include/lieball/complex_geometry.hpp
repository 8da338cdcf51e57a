#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "errors.hpp"
#include "random.hpp"

namespace lieball {

using cplx = std::complex<double>;

/// A point z = xi + i*eta of C^n, stored as its real and imaginary parts.
class ComplexPoint {
public:
    ComplexPoint() = default;

    ComplexPoint(std::vector<double> re, std::vector<double> im)
        : re_(std::move(re)), im_(std::move(im)) {
        if (re_.empty() || re_.size() != im_.size())
            throw ValidationError("z", "real and imaginary parts must have equal length n >= 1");
        for (std::size_t j = 0; j < re_.size(); ++j) {
            if (!std::isfinite(re_[j]) || !std::isfinite(im_[j]))
                throw ValidationError("z", "entries must be finite");
        }
    }

    static ComplexPoint real(std::vector<double> x) {
        std::vector<double> zero(x.size(), 0.0);
        return ComplexPoint(std::move(x), std::move(zero));
    }

    static ComplexPoint from_components(std::span<const cplx> z) {
        std::vector<double> re(z.size()), im(z.size());
        for (std::size_t j = 0; j < z.size(); ++j) {
            re[j] = z[j].real();
            im[j] = z[j].imag();
        }
        return ComplexPoint(std::move(re), std::move(im));
    }

    int dim() const noexcept { return static_cast<int>(re_.size()); }
    std::span<const double> re() const noexcept { return re_; }
    std::span<const double> im() const noexcept { return im_; }
    cplx operator[](std::size_t j) const { return {re_[j], im_[j]}; }

    bool is_real() const noexcept {
        return std::all_of(im_.begin(), im_.end(), [](double v) { return v == 0.0; });
    }

    /// lambda * z for a complex scalar.
    ComplexPoint scaled(cplx lambda) const {
        std::vector<double> re(re_.size()), im(im_.size());
        for (std::size_t j = 0; j < re_.size(); ++j) {
            const cplx w = lambda * cplx(re_[j], im_[j]);
            re[j] = w.real();
            im[j] = w.imag();
        }
        return ComplexPoint(std::move(re), std::move(im));
    }

    friend bool operator==(const ComplexPoint&, const ComplexPoint&) = default;

private:
    std::vector<double> re_;
    std::vector<double> im_;
};

/// |z|^2 = |xi|^2 + |eta|^2.
inline double abs_sq(const ComplexPoint& z) {
    double s = 0.0;
    for (int j = 0; j < z.dim(); ++j) s += z.re()[j] * z.re()[j] + z.im()[j] * z.im()[j];
    return s;
}

/// q(z) = z_1^2 + ... + z_n^2, evaluated as |xi|^2 - |eta|^2 + 2i<xi, eta>.
inline cplx q_of(const ComplexPoint& z) {
    double xi2 = 0.0, eta2 = 0.0, dot = 0.0;
    for (int j = 0; j < z.dim(); ++j) {
        xi2 += z.re()[j] * z.re()[j];
        eta2 += z.im()[j] * z.im()[j];
        dot += z.re()[j] * z.im()[j];
    }
    return {xi2 - eta2, 2.0 * dot};
}

/// |z|^2 + sqrt(|z|^4 - |q(z)|^2); the Lie ball of radius R is where this is < R^2.
/// The radicand equals 4 |xi ^ eta|^2 (Lagrange identity), summed term by term
/// to avoid the cancellation near the Shilov boundary.
inline double lie_norm_sq(const ComplexPoint& z) {
    const auto& x = z.re();
    const auto& y = z.im();
    double wedge = 0.0;
    for (int i = 0; i < z.dim(); ++i)
        for (int j = i + 1; j < z.dim(); ++j) {
            const double m = x[i] * y[j] - x[j] * y[i];
            wedge += m * m;
        }
    return abs_sq(z) + 2.0 * std::sqrt(wedge);
}

struct LieGeometry {
    double abs_sq = 0.0;
    cplx q_value;
    double lie_norm_sq = 0.0;
};

inline LieGeometry lie_geometry(const ComplexPoint& z) {
    return {abs_sq(z), q_of(z), lie_norm_sq(z)};
}

/// Open Lie ball membership: boundary points are outside.
inline bool in_lie_ball(const ComplexPoint& z, double R) {
    if (!(R > 0.0)) throw ValidationError("R", "radius must be positive");
    return lie_norm_sq(z) < R * R;
}

/// Deterministic point e^{it} R theta with t uniform on [0, 2pi) and theta
/// uniform on S^{n-1}. Such points have Lie norm exactly R.
inline ComplexPoint shilov_sample(int n, double R, std::uint64_t seed) {
    if (n < 1) throw ValidationError("n", "dimension must be >= 1");
    if (!(R > 0.0)) throw ValidationError("R", "radius must be positive");
    Rng rng(seed);
    const double t = 2.0 * std::numbers::pi * rng.uniform();
    const auto theta = rng.unit_vector(n);
    std::vector<double> re(theta.size()), im(theta.size());
    for (std::size_t j = 0; j < theta.size(); ++j) {
        re[j] = R * std::cos(t) * theta[j];
        im[j] = R * std::sin(t) * theta[j];
    }
    return ComplexPoint(std::move(re), std::move(im));
}

/// Uniform sample from the closed complex ball |z| <= radius in C^n = R^{2n}.
inline ComplexPoint complex_ball_sample(int n, double radius, Rng& rng) {
    const auto dir = rng.unit_vector(2 * n);
    const double u = std::pow(rng.uniform(), 1.0 / (2.0 * n));
    std::vector<double> re(static_cast<std::size_t>(n)), im(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        re[j] = radius * u * dir[j];
        im[j] = radius * u * dir[n + j];
    }
    return ComplexPoint(std::move(re), std::move(im));
}

/// Rejection sample from the closed Lie ball lie_norm_sq(z) <= radius^2.
/// The Lie ball sits inside the complex ball of the same radius.
inline ComplexPoint lie_ball_sample(int n, double radius, Rng& rng) {
    for (;;) {
        auto z = complex_ball_sample(n, radius, rng);
        if (lie_norm_sq(z) <= radius * radius) return z;
    }
}

} // namespace lieball
