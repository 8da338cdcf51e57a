#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "errors.hpp"
#include "harmonic_basis.hpp"
#include "special_functions.hpp"

namespace lieball {

/// Gauss rule for the weight (1 - t^2)^a on [-1, 1] (Golub-Welsch).
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussRule gauss_gegenbauer(int count, double a) {
    GaussRule rule;
    if (count <= 0) return rule;
    // Orthonormal recurrence: beta_i = i (i + 2a) / (4 (i + a)^2 - 1).
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(count);
    Eigen::VectorXd sub(std::max(0, count - 1));
    for (int i = 1; i < count; ++i) {
        const double num = i * (i + 2.0 * a);
        const double den = 4.0 * (i + a) * (i + a) - 1.0;
        sub[i - 1] = std::sqrt(num / den);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw std::runtime_error("Golub-Welsch eigen solve failed");
    const double mu0 = std::sqrt(std::numbers::pi) * std::tgamma(a + 1.0) / std::tgamma(a + 1.5);
    rule.nodes.resize(count);
    rule.weights.resize(count);
    for (int i = 0; i < count; ++i) {
        rule.nodes[i] = solver.eigenvalues()[i];
        const double v0 = solver.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v0 * v0;
    }
    // Symmetrise: the weight is even, so nodes come in +- pairs.
    for (int i = 0; i < count / 2; ++i) {
        const int j = count - 1 - i;
        const double t = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.nodes[i] = -t;
        rule.nodes[j] = t;
        rule.weights[i] = rule.weights[j] = w;
    }
    if (count % 2 == 1) rule.nodes[count / 2] = 0.0;
    return rule;
}

/// Cubature rule on S^{n-1}: nodes (row-major, n per node) with positive weights.
struct SphereRule {
    int n = 0;
    int exact_degree = 0;
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const noexcept { return weights.size(); }
    std::span<const double> node(std::size_t i) const {
        return {nodes.data() + i * static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
    }
};

inline constexpr std::size_t default_node_cap = 4'000'000;

/// Number of nodes build_rule(n, exact_degree) would produce.
inline double rule_size(int n, int exact_degree) {
    const double polar = exact_degree / 2 + 1;
    return (exact_degree + 1.0) * std::pow(polar, n - 2);
}

/// Product rule exact for every polynomial of total degree <= exact_degree:
/// uniform trapezoid in the azimuth (exact_degree + 1 points) and, for each
/// further coordinate x_j (j = 3..n), Gauss nodes for the weight
/// (1 - t^2)^{(j-3)/2} in t = cos(theta_j).
inline SphereRule build_rule(int n, int exact_degree, std::size_t node_cap = default_node_cap) {
    if (n < 2) throw ValidationError("n", "dimension must be >= 2");
    if (exact_degree < 0) throw ValidationError("exact_degree", "must be >= 0");
    if (rule_size(n, exact_degree) > static_cast<double>(node_cap))
        throw ResourceError("sphere rule of degree " + std::to_string(exact_degree) + " in dimension " +
                            std::to_string(n) + " exceeds node cap " + std::to_string(node_cap));
    const int azimuth = exact_degree + 1;
    const int polar = exact_degree / 2 + 1;

    // Start with the circle, then lift one coordinate at a time.
    std::vector<std::vector<double>> pts;
    std::vector<double> w;
    pts.reserve(static_cast<std::size_t>(azimuth));
    for (int i = 0; i < azimuth; ++i) {
        const double phi = 2.0 * std::numbers::pi * i / azimuth;
        pts.push_back({std::cos(phi), std::sin(phi)});
        w.push_back(2.0 * std::numbers::pi / azimuth);
    }
    for (int j = 3; j <= n; ++j) {
        const auto g = gauss_gegenbauer(polar, 0.5 * (j - 3));
        std::vector<std::vector<double>> lifted;
        std::vector<double> lw;
        lifted.reserve(pts.size() * g.nodes.size());
        for (std::size_t a = 0; a < g.nodes.size(); ++a) {
            const double t = g.nodes[a];
            const double sine = std::sqrt((1.0 - t) * (1.0 + t));
            for (std::size_t p = 0; p < pts.size(); ++p) {
                std::vector<double> x(pts[p].size() + 1);
                for (std::size_t c = 0; c < pts[p].size(); ++c) x[c] = sine * pts[p][c];
                x.back() = t;
                lifted.push_back(std::move(x));
                lw.push_back(w[p] * g.weights[a]);
            }
        }
        pts = std::move(lifted);
        w = std::move(lw);
    }
    SphereRule rule;
    rule.n = n;
    rule.exact_degree = exact_degree;
    rule.weights = std::move(w);
    rule.nodes.reserve(pts.size() * static_cast<std::size_t>(n));
    for (const auto& x : pts) rule.nodes.insert(rule.nodes.end(), x.begin(), x.end());
    return rule;
}

/// Sum of w_j g(theta_j).
template <typename Fn>
auto integrate(const SphereRule& rule, Fn&& g) {
    using R = decltype(g(rule.node(0)));
    R sum = R(0);
    for (std::size_t i = 0; i < rule.size(); ++i) sum += rule.weights[i] * g(rule.node(i));
    return sum;
}

using RealPointFunction = std::function<cplx(std::span<const double>)>;

/// Laplace-Fourier coefficient f_{k,l}(r) = int f(r theta) Y_{k,l}(theta) dtheta.
/// The integrand uses Y_{k,l} itself (no conjugate); the basis is real so
/// both conventions agree.
inline cplx lf_coefficient(const RealPointFunction& f, const HarmonicBasis& basis, std::size_t l, double r,
                           const SphereRule& rule) {
    if (rule.n != basis.dim()) throw ValidationError("rule", "dimension mismatch with basis");
    if (l >= basis.size()) throw ValidationError("l", "index out of range");
    if (!(r >= 0.0)) throw ValidationError("r", "radius must be >= 0");
    cplx sum = 0.0;
    std::vector<double> x(static_cast<std::size_t>(rule.n));
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const auto theta = rule.node(i);
        for (int c = 0; c < rule.n; ++c) x[c] = r * theta[c];
        cplx fx;
        try {
            fx = f(x);
        } catch (const std::exception& e) {
            throw std::runtime_error("function evaluation failed at quadrature node " + std::to_string(i) + ": " +
                                     e.what());
        }
        const auto y = basis.evaluate_all<double>(theta);
        sum += rule.weights[i] * fx * y[l];
    }
    return sum;
}

} // namespace lieball
