#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "complex_geometry.hpp"
#include "errors.hpp"
#include "function_spec.hpp"
#include "harmonic_basis.hpp"
#include "parallel.hpp"
#include "special_functions.hpp"
#include "sphere_integration.hpp"

namespace lieball {

enum class ProfileSource { exact, fitted };

inline std::string_view to_string(ProfileSource s) { return s == ProfileSource::exact ? "exact" : "fitted"; }

/// p_{k,l}(t) = sum_m coeffs[m] t^m, so that f_{k,l}(r) = r^k p_{k,l}(r^2).
///
/// Besides the profile, the power series of f_{k,l}(zeta) has orders below k
/// and orders of the wrong parity. Both vanish analytically; their computed
/// values are kept so that structural checks can measure the leakage.
struct ProfilePoly {
    int k = 0;
    std::size_t l = 0;
    std::vector<cplx> coeffs;
    double fit_residual = 0.0;
    ProfileSource source = ProfileSource::fitted;
    std::vector<cplx> low_terms; ///< Taylor orders 0..k-1
    std::vector<cplx> odd_terms; ///< Taylor orders k+1, k+3, ...

    cplx operator()(cplx t) const {
        cplx acc = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
        return acc;
    }

    bool is_zero() const {
        return std::all_of(coeffs.begin(), coeffs.end(), [](cplx c) { return c == cplx(0.0); });
    }

    /// Full reconstructed series of f_{k,l} at real radius r, leakage included.
    cplx radial_series(double r) const {
        cplx acc = 0.0;
        double rp = 1.0;
        for (const auto& c : low_terms) {
            acc += c * rp;
            rp *= r;
        }
        double rk = std::pow(r, k);
        acc += rk * (*this)(cplx(r * r));
        double ro = rk * r;
        for (const auto& c : odd_terms) {
            acc += c * ro;
            ro *= r * r;
        }
        return acc;
    }
};

/// Empirical fit of the decay criterion |p_{k,l}(zeta)| <= C / rho^k on |zeta| <= tau^2.
struct DecayEstimate {
    double rho_hat = std::numeric_limits<double>::infinity();
    double tau = 0.0;
    double C_hat = 0.0;
    int k_min = 0;
    int k_max = 0;
    double r_squared_fit = 1.0;
    bool band_limited = false;
    std::vector<double> max_profile; ///< m_k for k = 0..K

    /// The majorant needs 0 < tau < rho_hat.
    bool usable() const { return tau > 0.0 && tau < rho_hat && C_hat >= 0.0; }
};

struct ExpandOptions {
    int K = 30;
    int M = 24;
    int radial_nodes = 32;
    int quad_degree = 0;             ///< 0 selects the degree automatically
    double sample_fraction = 0.95;   ///< Cauchy circle and outer radial node, as a fraction of R
    double inner_fraction = 0.02;    ///< innermost radial node, as a fraction of R
    double noise_floor = 1e-13;      ///< coefficients below this (relative to scale) are set to zero
    double fit_tolerance = 1e-9;     ///< fit residual above this (relative to scale) is flagged
    double convergence_tolerance = 1e-11;
    std::size_t node_cap = default_node_cap;
};

/// Truncated Laplace-Fourier expansion sum_{k<=K} sum_l p_{k,l}(|x|^2) Y_{k,l}(x).
struct LFExpansion {
    int n = 0;
    double R = 1.0;
    int K = 0;
    int M = 0;
    int quad_degree = 0;
    double sample_radius = 0.0;
    double scale = 0.0; ///< sqrt(omega) * max |f| on the sampling sphere
    std::optional<FunctionSpec> spec;
    std::vector<std::shared_ptr<const HarmonicBasis>> bases;
    std::vector<std::vector<ProfilePoly>> profiles; ///< [k][l]
    std::vector<double> radial_nodes;
    std::vector<std::string> diagnostics;

    const ProfilePoly& profile(int k, std::size_t l) const { return profiles.at(k).at(l); }
    std::size_t profile_count() const {
        std::size_t c = 0;
        for (const auto& row : profiles) c += row.size();
        return c;
    }
};

namespace detail {

struct ColumnLayout {
    std::vector<std::size_t> offset; ///< offset[k] = first column of degree k
    std::size_t total = 0;
};

inline ColumnLayout column_layout(const std::vector<std::shared_ptr<const HarmonicBasis>>& bases) {
    ColumnLayout layout;
    for (const auto& b : bases) {
        layout.offset.push_back(layout.total);
        layout.total += b->size();
    }
    return layout;
}

/// W(i, col) = w_i Y_col(theta_i) for all basis members up to degree K.
inline Eigen::MatrixXd weighted_basis_table(const SphereRule& rule,
                                            const std::vector<std::shared_ptr<const HarmonicBasis>>& bases,
                                            const ColumnLayout& layout) {
    const int K = static_cast<int>(bases.size()) - 1;
    Eigen::MatrixXd W(static_cast<Eigen::Index>(rule.size()), static_cast<Eigen::Index>(layout.total));
    parallel_for(rule.size(), [&](std::size_t i) {
        ChainEvaluator<double> ev(rule.n, K, rule.node(i));
        for (int k = 0; k <= K; ++k) {
            const auto& b = *bases[k];
            for (std::size_t l = 0; l < b.size(); ++l)
                W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(layout.offset[k] + l)) =
                    rule.weights[i] * b.normaliser(l) * ev.raw(b.label(l));
        }
    });
    return W;
}

/// Product of complex samples (rows) with the real table W.
inline Eigen::MatrixXcd project(const Eigen::MatrixXcd& samples, const Eigen::MatrixXd& W) {
    const Eigen::MatrixXd re = samples.real() * W;
    const Eigen::MatrixXd im = samples.imag() * W;
    Eigen::MatrixXcd out(re.rows(), re.cols());
    out.real() = re;
    out.imag() = im;
    return out;
}

inline std::vector<double> chebyshev_nodes(double lo, double hi, int count) {
    std::vector<double> r(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j) {
        // Ascending order.
        const double c = -std::cos(std::numbers::pi * (j + 0.5) / count);
        r[j] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * c;
    }
    return r;
}

struct TaylorTable {
    Eigen::MatrixXcd coeffs; ///< [order j][column]
    double scale = 0.0;
};

/// Taylor coefficients in zeta of f_{k,l}(zeta) = int f(zeta theta) Y_{k,l}(theta),
/// from samples on the circle |zeta| = rho (trapezoidal Cauchy integrals).
inline TaylorTable taylor_from_circle(const HolomorphicFunction& f, const SphereRule& rule, const Eigen::MatrixXd& W,
                                      double rho, int orders) {
    const int circle = 2 * orders + 64;
    const int n = rule.n;
    Eigen::MatrixXcd F(circle, static_cast<Eigen::Index>(rule.size()));
    parallel_for(static_cast<std::size_t>(circle), [&](std::size_t s) {
        const double phi = 2.0 * std::numbers::pi * static_cast<double>(s) / circle;
        const double c = rho * std::cos(phi), d = rho * std::sin(phi);
        std::vector<double> re(static_cast<std::size_t>(n)), im(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < rule.size(); ++i) {
            const auto theta = rule.node(i);
            for (int j = 0; j < n; ++j) {
                re[j] = c * theta[j];
                im[j] = d * theta[j];
            }
            F(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(i)) = f(ComplexPoint(re, im));
        }
    });
    TaylorTable out;
    out.scale = std::sqrt(sphere_area(n)) * F.cwiseAbs().maxCoeff();
    const Eigen::MatrixXcd C = project(F, W);
    Eigen::MatrixXcd E(orders, circle);
    for (int j = 0; j < orders; ++j) {
        const double inv_rho_j = std::pow(rho, -j) / circle;
        for (int s = 0; s < circle; ++s) {
            const double phi = -2.0 * std::numbers::pi * static_cast<double>((static_cast<long>(j) * s) % circle) / circle;
            E(j, s) = inv_rho_j * cplx(std::cos(phi), std::sin(phi));
        }
    }
    out.coeffs = E * C;
    return out;
}

/// Exact Taylor coefficients for a polynomial: order j is the projection of
/// its homogeneous part of degree j.
inline TaylorTable taylor_from_polynomial(const ComplexPolynomial& poly, const SphereRule& rule,
                                          const Eigen::MatrixXd& W, double rho) {
    const int deg = std::max(poly.degree(), 0);
    const auto parts = poly.homogeneous_parts();
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(deg + 1, static_cast<Eigen::Index>(rule.size()));
    double fmax = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const auto theta = rule.node(i);
        cplx total = 0.0;
        for (const auto& [d, part] : parts) {
            const cplx v = part.template evaluate<double>(theta);
            P(d, static_cast<Eigen::Index>(i)) = v;
            total += v * std::pow(rho, d);
        }
        fmax = std::max(fmax, std::abs(total));
    }
    TaylorTable out;
    out.scale = std::sqrt(sphere_area(rule.n)) * fmax;
    out.coeffs = project(P, W);
    return out;
}

inline double scaled_difference(const TaylorTable& a, const TaylorTable& b, double rho) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < a.coeffs.rows(); ++j) {
        const double rj = std::pow(rho, static_cast<double>(j));
        for (Eigen::Index c = 0; c < a.coeffs.cols(); ++c)
            worst = std::max(worst, std::abs(a.coeffs(j, c) - b.coeffs(j, c)) * rj);
    }
    const double scale = std::max(a.scale, b.scale);
    return scale > 0.0 ? worst / scale : worst;
}

} // namespace detail

/// Builds the Laplace-Fourier expansion of f up to degree K.
///
/// Polynomials are projected exactly, one homogeneous part at a time, with a
/// cubature rule of sufficient degree (source = exact). Other functions are
/// sampled at complex radii zeta = rho e^{i phi}, rho = 0.95 R, and the power
/// series of each coefficient f_{k,l}(zeta) is recovered by the trapezoidal
/// Cauchy integral; p_{k,l} collects the orders k, k+2, ..., k+2M
/// (source = fitted). In both cases the profile is checked against f_{k,l}(r)
/// sampled at real Chebyshev radii in [0.02 R, 0.95 R].
inline LFExpansion expand(const HolomorphicFunction& f, int n, double R, const ExpandOptions& opt,
                          const ComplexPolynomial* poly = nullptr, bool real_valued = false) {
    if (n < 2) throw ValidationError("n", "dimension must be >= 2");
    if (!(R > 0.0)) throw ValidationError("R", "radius must be positive");
    if (opt.K < 0) throw ValidationError("K", "must be >= 0");
    if (opt.M < 0) throw ValidationError("M", "must be >= 0");
    if (opt.radial_nodes < opt.M + 1) throw ValidationError("radial_nodes", "must be >= M + 1");
    if (opt.quad_degree < 0) throw ValidationError("quad_degree", "must be >= 0");

    LFExpansion exp;
    exp.n = n;
    exp.R = R;
    exp.K = opt.K;
    exp.sample_radius = opt.sample_fraction * R;
    exp.bases = build_bases(n, opt.K);
    const auto layout = detail::column_layout(exp.bases);
    const double rho = exp.sample_radius;

    detail::TaylorTable table;
    Eigen::MatrixXd W;
    SphereRule rule;
    ProfileSource source = ProfileSource::fitted;
    int orders = 0;
    if (poly) {
        source = ProfileSource::exact;
        const int deg = std::max(poly->degree(), 0);
        if (deg > opt.K) exp.diagnostics.push_back("polynomial degree exceeds K; expansion is truncated");
        exp.M = deg / 2;
        exp.quad_degree = opt.quad_degree > 0 ? opt.quad_degree : deg + opt.K;
        rule = build_rule(n, exp.quad_degree, opt.node_cap);
        W = detail::weighted_basis_table(rule, exp.bases, layout);
        table = detail::taylor_from_polynomial(*poly, rule, W, rho);
        orders = deg + 1;
    } else {
        exp.M = opt.M;
        orders = opt.K + 2 * opt.M + 2;
        if (opt.quad_degree > 0) {
            exp.quad_degree = opt.quad_degree;
            rule = build_rule(n, exp.quad_degree, opt.node_cap);
            W = detail::weighted_basis_table(rule, exp.bases, layout);
            table = detail::taylor_from_circle(f, rule, W, rho, orders);
        } else {
            // Raise the cubature degree by half until the scaled Taylor
            // coefficients stop moving, and keep the finer result.
            int degree = 2 * opt.K + 4;
            rule = build_rule(n, degree, opt.node_cap);
            W = detail::weighted_basis_table(rule, exp.bases, layout);
            table = detail::taylor_from_circle(f, rule, W, rho, orders);
            bool converged = false;
            for (int round = 0; round < 4 && !converged; ++round) {
                const int next = degree + std::max(2, degree / 2);
                if (rule_size(n, next) > static_cast<double>(opt.node_cap)) break;
                auto next_rule = build_rule(n, next, opt.node_cap);
                auto next_W = detail::weighted_basis_table(next_rule, exp.bases, layout);
                auto next_table = detail::taylor_from_circle(f, next_rule, next_W, rho, orders);
                converged = detail::scaled_difference(table, next_table, rho) < opt.convergence_tolerance;
                degree = next;
                rule = std::move(next_rule);
                W = std::move(next_W);
                table = std::move(next_table);
            }
            if (!converged) exp.diagnostics.push_back("cubature convergence study did not reach tolerance");
            exp.quad_degree = degree;
        }
    }
    exp.scale = table.scale;

    // Drop coefficients at the rounding level of the computation.
    for (Eigen::Index j = 0; j < table.coeffs.rows(); ++j) {
        const double rj = std::pow(rho, static_cast<double>(j));
        for (Eigen::Index c = 0; c < table.coeffs.cols(); ++c) {
            cplx& v = table.coeffs(j, c);
            if (std::abs(v) * rj <= opt.noise_floor * table.scale) v = 0.0;
            if (real_valued) v.imag(0.0);
        }
    }

    // Real radial samples f_{k,l}(r_j) for the residual check.
    exp.radial_nodes = detail::chebyshev_nodes(opt.inner_fraction * R, opt.sample_fraction * R, opt.radial_nodes);
    Eigen::MatrixXcd radial(opt.radial_nodes, static_cast<Eigen::Index>(rule.size()));
    parallel_for(static_cast<std::size_t>(opt.radial_nodes), [&](std::size_t j) {
        std::vector<double> x(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < rule.size(); ++i) {
            const auto theta = rule.node(i);
            for (int c = 0; c < n; ++c) x[c] = exp.radial_nodes[j] * theta[c];
            radial(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = f(ComplexPoint::real(x));
        }
    });
    const Eigen::MatrixXcd radial_coeffs = detail::project(radial, W);

    exp.profiles.resize(static_cast<std::size_t>(opt.K) + 1);
    for (int k = 0; k <= opt.K; ++k) {
        const auto& b = *exp.bases[k];
        auto& row = exp.profiles[k];
        row.resize(b.size());
        for (std::size_t l = 0; l < b.size(); ++l) {
            const auto col = static_cast<Eigen::Index>(layout.offset[k] + l);
            ProfilePoly& p = row[l];
            p.k = k;
            p.l = l;
            p.source = source;
            for (int j = 0; j < std::min(k, orders); ++j) p.low_terms.push_back(table.coeffs(j, col));
            const int max_m = source == ProfileSource::exact ? std::max(-1, (orders - 1 - k) / 2) : opt.M;
            for (int m = 0; m <= max_m; ++m) {
                const int j = k + 2 * m;
                p.coeffs.push_back(j < orders ? table.coeffs(j, col) : cplx(0.0));
            }
            if (p.coeffs.empty()) p.coeffs.push_back(0.0);
            for (int j = k + 1; j < orders; j += 2) p.odd_terms.push_back(table.coeffs(j, col));
            double resid = 0.0;
            for (int j = 0; j < opt.radial_nodes; ++j) {
                const double r = exp.radial_nodes[j];
                const cplx model = std::pow(r, k) * p(cplx(r * r));
                resid = std::max(resid, std::abs(radial_coeffs(j, col) - model));
            }
            p.fit_residual = resid;
            if (resid > opt.fit_tolerance * std::max(exp.scale, 1e-300))
                exp.diagnostics.push_back("fit residual " + std::to_string(resid) + " above tolerance at (k=" +
                                          std::to_string(k) + ", l=" + std::to_string(l) + ")");
        }
    }
    return exp;
}

inline LFExpansion expand(const FunctionSpec& spec, const ExpandOptions& opt) {
    spec.validate();
    auto exp = spec.kind == FunctionKind::polynomial
                   ? expand(spec.as_function(), spec.n, spec.R, opt, &spec.poly, spec.real_valued())
                   : expand(spec.as_function(), spec.n, spec.R, opt, nullptr, spec.real_valued());
    exp.spec = spec;
    return exp;
}

// ---------------------------------------------------------------------------
// Series evaluation shared by the round trip and the continuation.

struct SeriesSum {
    cplx value;
    std::vector<double> per_degree_norms;
};

namespace detail {
/// Neumaier-compensated accumulator.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};
} // namespace detail

/// sum_{k<=K} sum_l p_{k,l}(q(z)) Y_{k,l}(z) in increasing k, then l.
inline SeriesSum sum_series(const LFExpansion& exp, const ComplexPoint& z) {
    if (z.dim() != exp.n) throw ValidationError("z", "dimension mismatch with expansion");
    std::vector<cplx> w(static_cast<std::size_t>(z.dim()));
    for (int j = 0; j < z.dim(); ++j) w[j] = z[j];
    ChainEvaluator<cplx> ev(exp.n, exp.K, std::span<const cplx>(w));
    const cplx q = q_of(z);
    detail::CompensatedSum re, im;
    SeriesSum out;
    out.per_degree_norms.reserve(static_cast<std::size_t>(exp.K) + 1);
    for (int k = 0; k <= exp.K; ++k) {
        const auto& b = *exp.bases[k];
        double norm = 0.0;
        for (std::size_t l = 0; l < b.size(); ++l) {
            const ProfilePoly& p = exp.profiles[k][l];
            if (p.is_zero()) continue;
            const cplx term = p(q) * (ev.raw(b.label(l)) * b.normaliser(l));
            re.add(term.real());
            im.add(term.imag());
            norm += std::abs(term);
        }
        out.per_degree_norms.push_back(norm);
    }
    out.value = {re.value(), im.value()};
    return out;
}

/// Reassembles f at a real point from its expansion.
inline cplx roundtrip(const LFExpansion& exp, std::span<const double> x) {
    return sum_series(exp, ComplexPoint::real(std::vector<double>(x.begin(), x.end()))).value;
}

// ---------------------------------------------------------------------------
// Structural checks.

struct StructuralViolation {
    int k = 0;
    std::size_t l = 0;
    std::string check;
    double value = 0.0;
    double threshold = 0.0;
};

struct StructuralReport {
    int profiles_checked = 0;
    int null_profiles = 0;
    double worst_low_leak = 0.0;
    double worst_odd_leak = 0.0;
    double worst_slope_margin = std::numeric_limits<double>::infinity(); ///< min over profiles of slope - k
    std::vector<StructuralViolation> violations;

    bool ok() const { return violations.empty(); }
};

/// Verifies the two structural facts about f_{k,l}: its power series starts
/// at order k (so f_{k,l}(r) ~ r^k near 0) and r^{-k} f_{k,l}(r) is even.
/// Leakage is measured on the sampling circle relative to expansion scale.
inline StructuralReport structural_check(const LFExpansion& exp, double leak_tol = 1e-8, double slope_slack = 0.1) {
    StructuralReport rep;
    const double rho = exp.sample_radius;
    const double scale = exp.scale > 0.0 ? exp.scale : 1.0;
    if (exp.radial_nodes.size() < 3) throw ValidationError("radial_nodes", "structural check needs >= 3 radial nodes");
    const double r0 = exp.radial_nodes[0], r1 = exp.radial_nodes[1], r2 = exp.radial_nodes[2];
    for (const auto& row : exp.profiles) {
        for (const auto& p : row) {
            double low = 0.0, odd = 0.0;
            for (std::size_t j = 0; j < p.low_terms.size(); ++j)
                low = std::max(low, std::abs(p.low_terms[j]) * std::pow(rho, static_cast<double>(j)) / scale);
            for (std::size_t m = 0; m < p.odd_terms.size(); ++m)
                odd = std::max(odd, std::abs(p.odd_terms[m]) * std::pow(rho, p.k + 1.0 + 2.0 * m) / scale);
            rep.worst_low_leak = std::max(rep.worst_low_leak, low);
            rep.worst_odd_leak = std::max(rep.worst_odd_leak, odd);
            if (low >= leak_tol) rep.violations.push_back({p.k, p.l, "low_order_leakage", low, leak_tol});
            if (odd >= leak_tol) rep.violations.push_back({p.k, p.l, "odd_power_leakage", odd, leak_tol});

            const double f0 = std::abs(p.radial_series(r0));
            const double f1 = std::abs(p.radial_series(r1));
            const double f2 = std::abs(p.radial_series(r2));
            if (f0 == 0.0 && f1 == 0.0 && f2 == 0.0) {
                ++rep.null_profiles;
                continue;
            }
            ++rep.profiles_checked;
            // Least-squares slope of log|f| against log r over the three innermost nodes.
            const double lx[3] = {std::log(r0), std::log(r1), std::log(r2)};
            const double ly[3] = {std::log(f0), std::log(f1), std::log(f2)};
            double slope = 0.0;
            if (std::isfinite(ly[0]) && std::isfinite(ly[1]) && std::isfinite(ly[2])) {
                const double mx = (lx[0] + lx[1] + lx[2]) / 3.0, my = (ly[0] + ly[1] + ly[2]) / 3.0;
                double sxy = 0.0, sxx = 0.0;
                for (int i = 0; i < 3; ++i) {
                    sxy += (lx[i] - mx) * (ly[i] - my);
                    sxx += (lx[i] - mx) * (lx[i] - mx);
                }
                slope = sxy / sxx;
            } else {
                slope = -std::numeric_limits<double>::infinity();
            }
            rep.worst_slope_margin = std::min(rep.worst_slope_margin, slope - p.k);
            if (slope < p.k - slope_slack)
                rep.violations.push_back({p.k, p.l, "near_zero_slope", slope, p.k - slope_slack});
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Decay of the profiles.

/// max_l max_{|zeta| = radius} |p_{k,l}(zeta)| over `samples` equispaced points.
inline double profile_circle_max(const std::vector<ProfilePoly>& row, double radius, int samples = 64) {
    double best = 0.0;
    for (const auto& p : row) {
        if (p.is_zero()) continue;
        for (int s = 0; s < samples; ++s) {
            const double phi = 2.0 * std::numbers::pi * s / samples;
            best = std::max(best, std::abs(p(std::polar(radius, phi))));
        }
    }
    return best;
}

/// Fits log m_k = log C - k log rho over k in [k_min, k_max] (default [ceil(K/2), K]).
/// The slope gives rho_hat; C_hat is the smallest constant with
/// m_k <= C_hat rho_hat^{-k} throughout the window. With fewer than two
/// nonzero m_k in the window the expansion is band-limited and rho_hat = +inf.
inline DecayEstimate decay_estimate(const LFExpansion& exp, double tau, std::optional<int> k_min = std::nullopt,
                                    std::optional<int> k_max = std::nullopt) {
    if (!(tau > 0.0) || !(tau < exp.R)) throw ValidationError("tau", "requires 0 < tau < R");
    if (exp.K < 8) throw ValidationError("K", "decay estimation needs K >= 8");
    DecayEstimate est;
    est.tau = tau;
    est.k_min = k_min.value_or((exp.K + 1) / 2);
    est.k_max = k_max.value_or(exp.K);
    if (est.k_min < 0 || est.k_max > exp.K || est.k_min > est.k_max)
        throw ValidationError("window", "decay window must satisfy 0 <= k_min <= k_max <= K");
    for (int k = 0; k <= exp.K; ++k) est.max_profile.push_back(profile_circle_max(exp.profiles[k], tau * tau));

    std::vector<double> ks, logs;
    for (int k = est.k_min; k <= est.k_max; ++k) {
        if (est.max_profile[k] > 1e-300) {
            ks.push_back(k);
            logs.push_back(std::log(est.max_profile[k]));
        }
    }
    if (ks.size() < 2) {
        est.band_limited = true;
        est.rho_hat = std::numeric_limits<double>::infinity();
        est.C_hat = *std::max_element(est.max_profile.begin(), est.max_profile.end());
        est.r_squared_fit = 1.0;
        return est;
    }
    const double nk = static_cast<double>(ks.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        mx += ks[i] / nk;
        my += logs[i] / nk;
    }
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        sxy += (ks[i] - mx) * (logs[i] - my);
        sxx += (ks[i] - mx) * (ks[i] - mx);
        syy += (logs[i] - my) * (logs[i] - my);
    }
    const double slope = sxy / sxx;
    est.rho_hat = std::exp(-slope);
    est.r_squared_fit = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    double log_c = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ks.size(); ++i) log_c = std::max(log_c, logs[i] - slope * ks[i]);
    est.C_hat = std::exp(log_c);
    return est;
}

/// Right side of the Cauchy estimate for derivatives of f_{k,l} at 0:
/// sqrt(omega) max|f(e^{it} rho theta)| (k+m)! / rho^{k+m}.
inline double cauchy_profile_bound(double max_circle, double rho, int k, int m, double omega) {
    if (!(rho > 0.0)) throw ValidationError("rho", "must be positive");
    const int s = k + m;
    return std::sqrt(omega) * max_circle * std::exp(std::lgamma(s + 1.0) - s * std::log(rho));
}

/// Bound on |p_{k,l}(zeta)|, |zeta| <= tau^2, implied by the Cauchy estimate:
/// C / rho^k * 1 / (1 - tau^2 / rho^2), with C = sqrt(omega) max|f| on the circle.
inline double cauchy_series_bound(double C, double rho, double tau, int k) {
    if (!(tau < rho)) throw ValidationError("tau", "requires tau < rho");
    return C / std::pow(rho, k) / (1.0 - (tau * tau) / (rho * rho));
}

} // namespace lieball
