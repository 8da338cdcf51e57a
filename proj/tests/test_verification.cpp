#include <gtest/gtest.h>

#include <cstdlib>

#include "lieball/verification.hpp"

using namespace lieball;

namespace {
double metric(const CheckReport& r, const std::string& name) {
    for (const auto& [k, v] : r.metrics)
        if (k == name) return v;
    ADD_FAILURE() << "missing metric " << name;
    return 0.0;
}
} // namespace

TEST(Add3, HoldsOnTheClosedLieBall) {
    for (int n = 2; n <= 4; ++n) {
        const auto rep = check_add3(n, 20, 0.7, 2000, 11);
        EXPECT_TRUE(rep.passed()) << (rep.details.empty() ? "" : rep.details.front());
        EXPECT_EQ(rep.trials, 2000);
        EXPECT_LE(rep.worst_margin, 1.0 + 1e-10);
        // Real points on the sphere of radius tau and k = 0 reach the bound.
        EXPECT_GE(rep.worst_margin, 1.0 - 1e-12);
    }
    EXPECT_THROW(check_add3(3, 5, 0.0, 10, 1), ValidationError);
    EXPECT_THROW(check_add3(1, 5, 0.5, 10, 1), ValidationError);
}

TEST(Add3, NullConePointsUseTheLeadingCoefficient) {
    Rng rng(3);
    for (int n = 2; n <= 5; ++n) {
        const auto z = detail::null_cone_point(n, 0.35, rng);
        EXPECT_NEAR(std::abs(q_of(z)), 0.0, 1e-15);
        EXPECT_NEAR(lie_norm_sq(z), 4 * 0.35 * 0.35, 1e-14);
    }
}

TEST(Hua, MonomialsAndHarmonics) {
    for (int m = 1; m <= 6; ++m) {
        RealPolynomial p(3);
        p.add_term({m, 0, 0}, 1.0);
        const auto rep = check_hua(p, 1.0, 500, 5);
        EXPECT_TRUE(rep.passed()) << rep.name;
        EXPECT_NEAR(metric(rep, "sphere_max"), 1.0, 1e-9);
        EXPECT_NEAR(metric(rep, "shilov_ratio"), 1.0, 1e-6);
    }
    const auto Y = build_basis(3, 4)->member(2);
    const auto ry = check_hua(Y, 1.3, 500, 6);
    EXPECT_TRUE(ry.passed());
    // q(z) has sphere maximum R^2.
    const auto rq = check_hua(RealPolynomial::partial_norm_sq(4, 4), 0.8, 500, 7);
    EXPECT_TRUE(rq.passed());
    EXPECT_NEAR(metric(rq, "sphere_max"), 0.64, 1e-9);
}

TEST(Hua, RandomComplexPolynomials) {
    Rng rng(8);
    for (int i = 0; i < 4; ++i) {
        const auto p = random_homogeneous(2 + i % 3, 3 + i, rng);
        const auto rep = check_hua(p, 1.0, 1000, 9 + i);
        EXPECT_TRUE(rep.passed()) << rep.name << " " << (rep.details.empty() ? "" : rep.details.front());
        EXPECT_LE(rep.worst_margin, 1.0 + 1e-8);
    }
}

TEST(Hua, RejectsNonHomogeneousInput) {
    RealPolynomial p(2);
    p.add_term({1, 0}, 1.0);
    p.add_term({0, 2}, 1.0);
    EXPECT_THROW(check_hua(p, 1.0, 10, 1), ValidationError);
    EXPECT_THROW(check_hua(RealPolynomial(2), 1.0, 10, 1), ValidationError);
}

TEST(TaylorParts, SumToInput) {
    Rng rng(4);
    ComplexPolynomial p(3);
    for (int d : {0, 2, 3, 5})
        for (const auto& a : multi_indices(3, d)) p.add_term(a, cplx(rng.normal(), rng.normal()));
    const auto parts = taylor_parts(p);
    ASSERT_EQ(parts.size(), 4u);
    ComplexPolynomial s(3);
    for (const auto& q : parts) s += q;
    EXPECT_EQ(s, p);
    EXPECT_EQ(parts[2].degree(), 3);
}

TEST(Extension, FixturesAgreeWithDirectEvaluation) {
    for (int n = 2; n <= 4; ++n)
        for (const auto& [name, h] : harmonic_fixtures(n, 5, 17)) {
            EXPECT_LT(harmonic_residual(h), 1e-12) << name;
            const auto rep = check_harmonic_extension(h, 1.0, 100, 18);
            EXPECT_TRUE(rep.passed()) << n << " " << name << " " << rep.worst_margin;
        }
}

TEST(Extension, RejectsNonHarmonicInput) {
    EXPECT_THROW(check_harmonic_extension(RealPolynomial::partial_norm_sq(3, 3), 1.0, 10, 1), ValidationError);
}

TEST(Identities, AdditionNormSumLegendre) {
    for (int n = 2; n <= 4; ++n)
        for (int k : {0, 3, 8}) {
            EXPECT_TRUE(check_addition(n, k, 50, 1).passed());
            EXPECT_TRUE(check_norm_sum(n, k, 50, 2, false).passed());
            EXPECT_TRUE(check_norm_sum(n, k, 50, 3, true).passed());
            EXPECT_TRUE(check_legendre(n, k, 50, 4).passed());
        }
    EXPECT_EQ(check_norm_sum(3, 2, 5, 3, true).name, "add2[n=3,k=2]");
}

TEST(Suites, DeterministicAcrossThreadCounts) {
    ::setenv("LIEBALL_THREADS", "1", 1);
    const auto a = run_suite("legendre", 20, 42);
    ::setenv("LIEBALL_THREADS", "4", 1);
    const auto b = run_suite("legendre", 20, 42);
    ::unsetenv("LIEBALL_THREADS");
    ASSERT_EQ(a.size(), b.size());
    EXPECT_EQ(a.size(), 4u * 21u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].name, b[i].name);
        EXPECT_EQ(a[i].worst_margin, b[i].worst_margin);
        EXPECT_EQ(a[i].trials, 20);
    }
    const auto c = run_suite("legendre", 20, 43);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) differs |= a[i].worst_margin != c[i].worst_margin;
    EXPECT_TRUE(differs);
}

TEST(Suites, UnknownNameAndNegativeTrials) {
    EXPECT_THROW(run_suite("bogus", 1, 1), ValidationError);
    EXPECT_THROW(run_suite("add3", -1, 1), ValidationError);
    EXPECT_EQ(suite_names().front(), "all");
}
