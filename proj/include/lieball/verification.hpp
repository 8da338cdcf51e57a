#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "complex_geometry.hpp"
#include "errors.hpp"
#include "function_spec.hpp"
#include "harmonic_basis.hpp"
#include "holo_continuation.hpp"
#include "lf_transform.hpp"
#include "parallel.hpp"
#include "polynomial.hpp"
#include "random.hpp"
#include "special_functions.hpp"

namespace lieball {

struct CheckReport {
    std::string name;
    long trials = 0;
    long failures = 0;
    double worst_margin = 0.0;
    std::vector<std::string> details;                     ///< first failing inputs, at most 10
    std::vector<std::pair<std::string, double>> metrics;  ///< extra named quantities

    bool passed() const { return failures == 0; }
};

inline constexpr std::size_t max_report_details = 10;

namespace detail {

/// Per-trial outcome, reduced in trial order so reports do not depend on scheduling.
struct TrialOutcome {
    double margin = 0.0;
    bool failed = false;
    std::string detail;
};

inline void reduce_into(CheckReport& rep, const std::vector<TrialOutcome>& outcomes) {
    for (const auto& o : outcomes) {
        ++rep.trials;
        rep.worst_margin = std::max(rep.worst_margin, o.margin);
        if (o.failed) {
            ++rep.failures;
            if (rep.details.size() < max_report_details) rep.details.push_back(o.detail);
        }
    }
}

inline std::string format_point(const ComplexPoint& z) {
    std::ostringstream os;
    os.precision(17);
    os << "z=(";
    for (int j = 0; j < z.dim(); ++j) os << (j ? ", " : "") << z[j].real() << (z[j].imag() < 0 ? "" : "+") << z[j].imag() << "i";
    os << ")";
    return os.str();
}

inline std::string format_real(std::span<const double> x) {
    std::ostringstream os;
    os.precision(17);
    os << "(";
    for (std::size_t j = 0; j < x.size(); ++j) os << (j ? ", " : "") << x[j];
    os << ")";
    return os.str();
}

/// Point on the null cone q(z) = 0: xi orthogonal to eta with |xi| = |eta| = s.
inline ComplexPoint null_cone_point(int n, double s, Rng& rng) {
    auto xi = rng.unit_vector(n);
    auto eta = rng.unit_vector(n);
    double d = 0.0;
    for (int j = 0; j < n; ++j) d += xi[j] * eta[j];
    double norm = 0.0;
    for (int j = 0; j < n; ++j) {
        eta[j] -= d * xi[j];
        norm += eta[j] * eta[j];
    }
    norm = std::sqrt(norm);
    for (int j = 0; j < n; ++j) {
        xi[j] *= s;
        eta[j] *= s / norm;
    }
    return ComplexPoint(std::move(xi), std::move(eta));
}

inline std::vector<double> scaled(std::vector<double> v, double s) {
    for (auto& x : v) x *= s;
    return v;
}

} // namespace detail

/// Checks |q(z)|^k P_k^n(|z|^2 / |q(z)|) <= tau^{2k} for z with
/// sqrt(|z|^4 - |q|^2) <= tau^2 - |z|^2, i.e. z in the closed Lie ball of
/// radius tau. Every tenth trial is a real point and every tenth (offset by
/// five) a null-cone point, where the d_k |z|^{2k} branch applies.
inline CheckReport check_add3(int n, int k_max, double tau, long trials, std::uint64_t seed) {
    if (!(tau > 0.0)) throw ValidationError("tau", "must be positive");
    if (n < 2) throw ValidationError("n", "dimension must be >= 2");
    if (k_max < 0) throw ValidationError("k_max", "must be >= 0");
    CheckReport rep;
    rep.name = "add3[n=" + std::to_string(n) + "]";
    std::vector<double> leading(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k) leading[k] = legendre_leading(k, n);
    std::vector<detail::TrialOutcome> out(static_cast<std::size_t>(trials));
    parallel_for(out.size(), [&](std::size_t i) {
        Rng rng = Rng::stream(seed, i);
        ComplexPoint z;
        if (i % 10 == 0)
            z = ComplexPoint::real(detail::scaled(rng.unit_vector(n), tau * std::pow(rng.uniform(), 1.0 / n)));
        else if (i % 10 == 5)
            z = detail::null_cone_point(n, 0.5 * tau * rng.uniform(), rng); // lie_norm_sq = 4 s^2
        else
            z = lie_ball_sample(n, tau, rng);
        const double a = abs_sq(z);
        const double qa = std::abs(q_of(z));
        detail::TrialOutcome& o = out[i];
        for (int k = 0; k <= k_max; ++k) {
            const double lhs = qa <= q_zero_threshold * a ? leading[k] * std::pow(a, k)
                                                          : std::pow(qa, k) * legendre_nd(k, n, a / qa);
            const double margin = lhs / std::pow(tau, 2.0 * k);
            o.margin = std::max(o.margin, margin);
            if (!(margin <= 1.0 + 1e-10) && !o.failed) {
                o.failed = true;
                o.detail = detail::format_point(z) + " k=" + std::to_string(k) + " margin=" + std::to_string(margin);
            }
        }
    });
    detail::reduce_into(rep, out);
    return rep;
}

/// Homogeneous components of a polynomial, in increasing degree. Their sum
/// reproduces the input exactly.
inline std::vector<ComplexPolynomial> taylor_parts(const ComplexPolynomial& p) {
    std::vector<ComplexPolynomial> parts;
    ComplexPolynomial sum(p.dim());
    for (auto& [d, part] : p.homogeneous_parts()) {
        if (!part.is_homogeneous() || part.degree() != d) throw std::logic_error("taylor_parts: part is not homogeneous");
        sum += part;
        parts.push_back(part);
    }
    if (!(sum == p)) throw std::logic_error("taylor_parts: parts do not sum to the input");
    return parts;
}

inline std::vector<RealPolynomial> taylor_parts(const RealPolynomial& p) {
    std::vector<RealPolynomial> parts;
    for (auto& [d, part] : p.homogeneous_parts()) parts.push_back(part);
    return parts;
}

namespace detail {

/// Maximiser of |p| on S^{n-1}: best of `samples` random directions, then
/// projected gradient ascent with step control from the best few.
inline std::pair<double, std::vector<double>> sphere_max(const ComplexPolynomial& p, int samples, std::uint64_t seed) {
    const int n = p.dim();
    std::vector<ComplexPolynomial> grad;
    for (int j = 0; j < n; ++j) grad.push_back(p.derivative(j));
    std::vector<std::pair<double, std::vector<double>>> cand(static_cast<std::size_t>(samples));
    parallel_for(cand.size(), [&](std::size_t i) {
        Rng rng = Rng::stream(seed, i);
        auto th = rng.unit_vector(n);
        cand[i] = {std::abs(p.evaluate<double>(th)), std::move(th)};
    });
    const std::size_t keep = std::min<std::size_t>(cand.size(), 24);
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(keep), cand.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first; });
    cand.resize(keep);
    parallel_for(cand.size(), [&](std::size_t c) {
        auto th = cand[c].second;
        double val = cand[c].first;
        double h = 0.1;
        for (int it = 0; it < 2000 && h > 1e-15; ++it) {
            const cplx pv = p.evaluate<double>(th);
            std::vector<double> g(static_cast<std::size_t>(n));
            double radial = 0.0;
            for (int j = 0; j < n; ++j) {
                g[j] = 2.0 * std::real(std::conj(pv) * grad[j].evaluate<double>(th));
                radial += g[j] * th[j];
            }
            double gn = 0.0;
            for (int j = 0; j < n; ++j) {
                g[j] -= radial * th[j];
                gn += g[j] * g[j];
            }
            if (gn == 0.0) break;
            gn = std::sqrt(gn);
            std::vector<double> trial(static_cast<std::size_t>(n));
            double tn = 0.0;
            for (int j = 0; j < n; ++j) {
                trial[j] = th[j] + h * g[j] / gn;
                tn += trial[j] * trial[j];
            }
            tn = std::sqrt(tn);
            for (auto& v : trial) v /= tn;
            const double tv = std::abs(p.evaluate<double>(trial));
            if (tv > val) {
                th = std::move(trial);
                val = tv;
                h *= 1.5;
            } else {
                h *= 0.5;
            }
        }
        cand[c] = {val, std::move(th)};
    });
    auto best = std::max_element(cand.begin(), cand.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return *best;
}

} // namespace detail

/// Maximum modulus of a homogeneous polynomial on the closed Lie ball equals
/// its maximum on the real sphere of radius R. Interior samples must stay
/// below the sphere maximum S, and the Shilov points e^{it} R theta* must
/// reach it.
inline CheckReport check_hua(const ComplexPolynomial& p, double R, long trials, std::uint64_t seed,
                             int sphere_samples = 20000) {
    if (!(R > 0.0)) throw ValidationError("R", "radius must be positive");
    if (!p.is_homogeneous() || p.degree() < 0) throw ValidationError("poly", "check_hua needs a nonzero homogeneous polynomial");
    const int n = p.dim();
    const int m = p.degree();
    CheckReport rep;
    rep.name = "hua[n=" + std::to_string(n) + ",m=" + std::to_string(m) + "]";
    const auto [sphere_max, theta] = detail::sphere_max(p, sphere_samples, Rng::splitmix(seed ^ 0x5bd1e995ULL));
    const double S = std::pow(R, m) * sphere_max;

    std::vector<detail::TrialOutcome> out(static_cast<std::size_t>(trials));
    parallel_for(out.size(), [&](std::size_t i) {
        Rng rng = Rng::stream(seed, i);
        ComplexPoint z;
        if (i % 2 == 0) {
            z = lie_ball_sample(n, R, rng);
        } else {
            // Shilov point pulled slightly inside.
            z = shilov_sample(n, R, rng.uniform_int(0, 1 << 30)).scaled(std::pow(rng.uniform(), 0.01));
        }
        const double v = std::abs(p.eval_complex(z));
        auto& o = out[i];
        o.margin = S > 0.0 ? v / S : 0.0;
        if (!(v <= S * (1.0 + 1e-8))) {
            o.failed = true;
            o.detail = detail::format_point(z) + " |p(z)|/S=" + std::to_string(o.margin);
        }
    });
    detail::reduce_into(rep, out);

    // Equality on the Shilov family through the sphere maximiser.
    double shilov = 0.0;
    for (int s = 0; s < 16; ++s) {
        const double t = 2.0 * std::numbers::pi * s / 16.0;
        std::vector<double> re(static_cast<std::size_t>(n)), im(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            re[j] = R * std::cos(t) * theta[j];
            im[j] = R * std::sin(t) * theta[j];
        }
        shilov = std::max(shilov, std::abs(p.eval_complex(ComplexPoint(re, im))));
    }
    const double ratio = S > 0.0 ? shilov / S : 1.0;
    rep.metrics.emplace_back("sphere_max", S);
    rep.metrics.emplace_back("shilov_max", shilov);
    rep.metrics.emplace_back("shilov_ratio", ratio);
    if (!(std::abs(ratio - 1.0) <= 1e-6)) {
        ++rep.failures;
        if (rep.details.size() < max_report_details)
            rep.details.push_back("shilov maximum ratio " + std::to_string(ratio) + " at theta=" + detail::format_real(theta));
    }
    return rep;
}

inline CheckReport check_hua(const RealPolynomial& p, double R, long trials, std::uint64_t seed) {
    return check_hua(to_complex(p), R, trials, seed);
}

/// Runs expand -> evaluate on a harmonic polynomial and compares with direct
/// complex evaluation at random Lie-ball points. Errors are measured relative
/// to the largest |h(z)| over the sample set, so zeros of h do not dominate.
inline CheckReport check_harmonic_extension(const RealPolynomial& h, double R, long trials, std::uint64_t seed,
                                            double tol = 1e-9) {
    if (!(R > 0.0)) throw ValidationError("R", "radius must be positive");
    const double residual = harmonic_residual(h);
    if (residual > 1e-12)
        throw ValidationError("h", "polynomial is not harmonic: relative Laplacian residual " + std::to_string(residual));
    const int n = h.dim();
    const int deg = std::max(h.degree(), 0);
    CheckReport rep;
    rep.name = "extension[n=" + std::to_string(n) + ",deg=" + std::to_string(deg) + "]";
    ExpandOptions opt;
    opt.K = deg;
    const auto exp = expand(FunctionSpec::polynomial(h, R), opt);

    std::vector<ComplexPoint> pts(static_cast<std::size_t>(trials));
    std::vector<cplx> got(pts.size()), want(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
        Rng rng = Rng::stream(seed, i);
        ComplexPoint z;
        do {
            z = i % 4 == 3 ? shilov_sample(n, R, rng.uniform_int(0, 1 << 30)).scaled(0.999 * rng.uniform())
                           : lie_ball_sample(n, R, rng);
        } while (!in_lie_ball(z, R));
        pts[i] = z;
        got[i] = evaluate(exp, z).value;
        want[i] = h.eval_complex(z);
    });
    double sup = 0.0;
    for (const auto& w : want) sup = std::max(sup, std::abs(w));
    std::vector<detail::TrialOutcome> out(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double err = std::abs(got[i] - want[i]);
        const double rel = sup > 0.0 ? err / sup : err;
        out[i].margin = rel;
        if (!(rel <= tol)) {
            out[i].failed = true;
            out[i].detail = detail::format_point(pts[i]) + " relative error " + std::to_string(rel);
        }
    }
    detail::reduce_into(rep, out);
    rep.metrics.emplace_back("sample_sup", sup);
    rep.metrics.emplace_back("laplacian_residual", residual);
    return rep;
}

// ---------------------------------------------------------------------------
// Identity suites.

/// Addition theorem at random real pairs with radii in [0.5, 1].
inline CheckReport check_addition(int n, int k, long trials, std::uint64_t seed, double tol = 1e-9) {
    CheckReport rep;
    rep.name = "addition[n=" + std::to_string(n) + ",k=" + std::to_string(k) + "]";
    build_basis(n, k);
    std::vector<detail::TrialOutcome> out(static_cast<std::size_t>(trials));
    parallel_for(out.size(), [&](std::size_t i) {
        Rng rng = Rng::stream(seed, i);
        const auto x = detail::scaled(rng.unit_vector(n), rng.uniform(0.5, 1.0));
        const auto y = detail::scaled(rng.unit_vector(n), rng.uniform(0.5, 1.0));
        const double r = addition_residual(n, k, x, y);
        out[i].margin = r;
        if (!(r < tol)) {
            out[i].failed = true;
            out[i].detail = "x=" + detail::format_real(x) + " y=" + detail::format_real(y) + " residual=" + std::to_string(r);
        }
    });
    detail::reduce_into(rep, out);
    return rep;
}

/// sum_l |Y_{k,l}(z)|^2 against the closed form: generic points with |q| > 0.1
/// (first branch) and null-cone points (second branch). Relative errors.
inline CheckReport check_norm_sum(int n, int k, long trials, std::uint64_t seed, bool null_cone, double tol = 1e-9) {
    CheckReport rep;
    rep.name = std::string(null_cone ? "add2" : "add1") + "[n=" + std::to_string(n) + ",k=" + std::to_string(k) + "]";
    build_basis(n, k);
    std::vector<detail::TrialOutcome> out(static_cast<std::size_t>(trials));
    parallel_for(out.size(), [&](std::size_t i) {
        Rng rng = Rng::stream(seed, i);
        ComplexPoint z;
        if (null_cone) {
            z = detail::null_cone_point(n, rng.uniform(0.3, 0.7), rng);
        } else {
            do z = complex_ball_sample(n, 1.0, rng);
            while (!(std::abs(q_of(z)) > 0.1));
        }
        const double direct = norm_sum_complex(n, k, z);
        const double closed = norm_sum_formula(n, k, z);
        const double rel = std::abs(direct - closed) / std::max(std::abs(closed), 1e-300);
        out[i].margin = rel;
        if (!(rel < tol)) {
            out[i].failed = true;
            out[i].detail = detail::format_point(z) + " relative error " + std::to_string(rel);
        }
    });
    detail::reduce_into(rep, out);
    return rep;
}

namespace detail {
/// C_k^lambda(cos t) = sum_j (lambda)_j (lambda)_{k-j} / (j! (k-j)!) cos((k - 2j) t),
/// independent of the three-term recurrence. All weights are positive.
inline double gegenbauer_trig(int k, double lambda, double t) {
    double s = 0.0;
    for (int j = 0; j <= k; ++j) {
        const double lw = std::lgamma(lambda + j) + std::lgamma(lambda + k - j) - 2.0 * std::lgamma(lambda) -
                          std::lgamma(j + 1.0) - std::lgamma(k - j + 1.0);
        s += std::exp(lw) * std::cos((k - 2.0 * j) * t);
    }
    return s;
}
} // namespace detail

/// P_k^n on [-1, 1] against cos(k arccos x) (n = 2) or the normalised
/// cosine expansion of C_k^lambda (n >= 3); also checks the homogeneous form and
/// the leading coefficient d_k.
inline CheckReport check_legendre(int n, int k, long trials, std::uint64_t seed, double tol = 1e-9) {
    CheckReport rep;
    rep.name = "legendre[n=" + std::to_string(n) + ",k=" + std::to_string(k) + "]";
    const double lambda = 0.5 * (n - 2);
    const double at_one = n == 2 ? 1.0 : detail::gegenbauer_trig(k, lambda, 0.0);
    const auto coeffs = legendre_coefficients(k, n);
    std::vector<detail::TrialOutcome> out(static_cast<std::size_t>(trials));
    parallel_for(out.size(), [&](std::size_t i) {
        Rng rng = Rng::stream(seed, i);
        const double x = rng.uniform(-1.0, 1.0);
        const double b = rng.uniform(0.5, 1.5);
        const double want = n == 2 ? std::cos(k * std::acos(x)) : detail::gegenbauer_trig(k, lambda, std::acos(x)) / at_one;
        const double got = legendre_nd(k, n, x);
        const double hom = legendre_homogeneous(k, n, x * b, b) / std::pow(b, k);
        const double err = std::max(std::abs(got - want), std::abs(hom - got));
        out[i].margin = err;
        if (!(err < tol)) {
            out[i].failed = true;
            out[i].detail = "x=" + std::to_string(x) + " error=" + std::to_string(err);
        }
    });
    detail::reduce_into(rep, out);
    const double lead_err = std::abs(coeffs.back() - legendre_leading(k, n)) / std::abs(legendre_leading(k, n));
    rep.metrics.emplace_back("leading_relative_error", lead_err);
    if (!(lead_err < tol)) {
        ++rep.failures;
        rep.details.push_back("leading coefficient mismatch " + std::to_string(lead_err));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Fixtures and suite driver.

/// Harmonic fixtures in dimension n up to degree max_degree: constants,
/// x1 x2, Re((a . x)^d) with an isotropic complex vector a, harmonic
/// projections of random homogeneous polynomials and (n = 3) Y_{3,1}.
inline std::vector<std::pair<std::string, RealPolynomial>> harmonic_fixtures(int n, int max_degree, std::uint64_t seed) {
    std::vector<std::pair<std::string, RealPolynomial>> out;
    out.emplace_back("constant", RealPolynomial::constant(n, 1.5));
    {
        RealPolynomial p(n);
        MultiIndex a(static_cast<std::size_t>(n), 0);
        a[0] = a[1] = 1;
        p.add_term(a, 1.0);
        out.emplace_back("x1x2", p);
    }
    Rng rng(seed);
    for (int d = 1; d <= max_degree; ++d) {
        // a = u + i v with u, v orthonormal gives q(a) = 0.
        const ComplexPoint a = detail::null_cone_point(n, 1.0, rng);
        ComplexPolynomial lin(n);
        for (int j = 0; j < n; ++j) lin += ComplexPolynomial::variable(n, j) * a[j];
        const auto pw = lin.pow(d);
        RealPolynomial re(n);
        for (const auto& [alpha, c] : pw.terms()) re.add_term(alpha, c.real());
        out.emplace_back("isotropic_power_d" + std::to_string(d), re);

        RealPolynomial rnd(n);
        for (const auto& alpha : multi_indices(n, d)) rnd.add_term(alpha, rng.normal());
        out.emplace_back("projected_random_d" + std::to_string(d), harmonic_projection(rnd));
    }
    if (n == 3 && max_degree >= 3) out.emplace_back("Y_3_1", build_basis(3, 3)->member(1));
    return out;
}

/// Random homogeneous polynomial of degree m with up to 12 terms and complex coefficients.
inline ComplexPolynomial random_homogeneous(int n, int m, Rng& rng) {
    const auto idx = multi_indices(n, m);
    ComplexPolynomial p(n);
    const int terms = std::min<int>(12, static_cast<int>(idx.size()));
    for (int t = 0; t < terms; ++t) {
        const auto& alpha = idx[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(idx.size()) - 1))];
        p.add_term(alpha, cplx(rng.normal(), rng.normal()));
    }
    if (p.terms().empty()) p.add_term(idx.front(), 1.0);
    return p;
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"all", "add3", "hua", "addition", "legendre", "extension"};
    return names;
}

/// Runs a named suite. `trials` is the per-check sample count; 0 uses the
/// defaults of the acceptance configuration.
inline std::vector<CheckReport> run_suite(const std::string& suite, long trials, std::uint64_t seed) {
    if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
        throw ValidationError("suite", "unknown suite '" + suite + "'");
    if (trials < 0) throw ValidationError("trials", "must be >= 0");
    const bool all = suite == "all";
    auto pick = [&](long dflt) { return trials > 0 ? trials : dflt; };
    std::vector<CheckReport> reports;
    std::uint64_t sub = 0;
    auto next_seed = [&] { return Rng::splitmix(seed + 0x9e37 * ++sub); };

    if (all || suite == "addition") {
        for (int n = 2; n <= 5; ++n)
            for (int k = 0; k <= 10; ++k) reports.push_back(check_addition(n, k, pick(100), next_seed()));
        for (int n = 2; n <= 5; ++n)
            for (int k = 0; k <= 10; ++k) {
                reports.push_back(check_norm_sum(n, k, pick(100), next_seed(), false));
                reports.push_back(check_norm_sum(n, k, pick(100), next_seed(), true));
            }
    }
    if (all || suite == "legendre") {
        for (int n = 2; n <= 5; ++n)
            for (int k = 0; k <= 20; ++k) reports.push_back(check_legendre(n, k, pick(100), next_seed()));
    }
    if (all || suite == "add3") {
        for (int n = 2; n <= 4; ++n) reports.push_back(check_add3(n, 20, 0.7, pick(10000), next_seed()));
    }
    if (all || suite == "hua") {
        Rng rng(next_seed());
        for (int i = 0; i < 20; ++i) {
            const int n = rng.uniform_int(2, 4);
            const int m = rng.uniform_int(1, 12);
            const auto p = random_homogeneous(n, m, rng);
            reports.push_back(check_hua(p, 1.0, pick(10000), next_seed()));
        }
    }
    if (all || suite == "extension") {
        for (int n = 2; n <= 4; ++n)
            for (const auto& [name, h] : harmonic_fixtures(n, 8, next_seed())) {
                auto rep = check_harmonic_extension(h, 1.0, pick(1000), next_seed());
                rep.name += ":" + name;
                reports.push_back(std::move(rep));
            }
    }
    return reports;
}

} // namespace lieball
