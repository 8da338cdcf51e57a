// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "lieball/cli.hpp"
#include "lieball/io.hpp"
#include "lieball/lieball.hpp"

using namespace lieball;
namespace fs = std::filesystem;

namespace {

const fs::path data_dir = LIEBALL_DATA_DIR;
constexpr std::uint64_t seed = 20240611;

struct Verdict {
    bool ok = true;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

/// Folds a list of reports into one verdict with the worst margin.
Verdict summarise(const std::vector<CheckReport>& reps, const std::string& prefix) {
    Verdict v;
    long trials = 0, failures = 0;
    double worst = 0.0;
    std::string first;
    for (const auto& r : reps) {
        if (r.name.rfind(prefix, 0) != 0) continue;
        trials += r.trials;
        failures += r.failures;
        worst = std::max(worst, r.worst_margin);
        if (!r.passed() && first.empty()) first = r.name + (r.details.empty() ? "" : " " + r.details.front());
    }
    v.ok = failures == 0 && trials > 0;
    v.detail = std::to_string(trials) + " trials, " + std::to_string(failures) + " failures, worst " + fmt("%.3g", worst);
    if (!first.empty()) v.detail += "; first: " + first;
    return v;
}

ExpandOptions k30() {
    ExpandOptions o;
    o.K = 30;
    return o;
}

Verdict criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<CheckReport> reps;
    for (int n = 2; n <= 5; ++n)
        for (int k = 0; k <= 10; ++k) reps.push_back(check_addition(n, k, 100, Rng::splitmix(seed + 100 * n + k), 1e-9));
    const double t = seconds_since(t0);
    auto v = summarise(reps, "addition");
    v.ok = v.ok && t < 60.0;
    v.detail += ", " + fmt("%.2f s", t) + " (limit 60 s)";
    return v;
}

Verdict criterion2() {
    std::vector<CheckReport> reps;
    for (int n = 2; n <= 5; ++n)
        for (int k = 0; k <= 10; ++k) {
            reps.push_back(check_norm_sum(n, k, 100, Rng::splitmix(seed + 200 * n + k), false, 1e-9));
            reps.push_back(check_norm_sum(n, k, 100, Rng::splitmix(seed + 300 * n + k), true, 1e-9));
        }
    auto a = summarise(reps, "add1");
    auto b = summarise(reps, "add2");
    return {a.ok && b.ok, "add1: " + a.detail + "; add2: " + b.detail};
}

Verdict criterion3() {
    std::vector<CheckReport> reps;
    for (int n = 2; n <= 4; ++n) reps.push_back(check_add3(n, 20, 0.7, 10000, Rng::splitmix(seed + n)));
    return summarise(reps, "add3");
}

Verdict criterion4() {
    std::vector<CheckReport> reps;
    std::uint64_t s = seed;
    for (int n = 2; n <= 4; ++n)
        for (const auto& [name, h] : harmonic_fixtures(n, 8, ++s)) {
            auto rep = check_harmonic_extension(h, 1.0, 1000, ++s, 1e-9);
            rep.name += ":" + name;
            reps.push_back(std::move(rep));
        }
    auto v = summarise(reps, "extension");
    v.detail = std::to_string(reps.size()) + " polynomials, " + v.detail;
    return v;
}

Verdict criterion5() {
    const auto spec = FunctionSpec::inverse_quadratic(3, 1.0, 4.0);
    const auto e = expand(spec, k30());
    const auto d = decay_estimate(e, 0.5);
    Rng rng(seed + 5);
    double worst = -1.0, worst_err = 0.0;
    int bad = 0;
    for (int i = 0; i < 100; ++i) {
        const auto z = lie_ball_sample(3, 0.5, rng);
        const auto r = evaluate(e, z, d);
        if (!r.tail_bound) {
            ++bad;
            continue;
        }
        const double err = std::abs(r.value - spec(z));
        worst_err = std::max(worst_err, err);
        worst = std::max(worst, err - (*r.tail_bound + 1e-7));
        if (!(err <= *r.tail_bound + 1e-7)) ++bad;
    }
    return {bad == 0, "100 points, max error " + fmt("%.3g", worst_err) + ", " + std::to_string(bad) + " violations"};
}

Verdict criterion6() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto e2 = expand(FunctionSpec::newton_kernel(1.0, {0.0, 0.0, 2.0}), k30());
    const auto d2 = decay_estimate(e2, 0.5);
    const auto e3 = expand(FunctionSpec::newton_kernel(1.0, {0.0, 0.0, 3.0}), k30());
    const auto d3 = decay_estimate(e3, 0.5);
    const double t = seconds_since(t0);
    const bool within = std::abs(d2.rho_hat - 2.0) <= 0.05 * 2.0;
    const bool increases = d3.rho_hat > d2.rho_hat;
    return {within && increases && t < 300.0,
            "rho_hat(|y0|=2) = " + fmt("%.6g", d2.rho_hat) + ", rho_hat(|y0|=3) = " + fmt("%.6g", d3.rho_hat) + ", " +
                fmt("%.2f s", t) + " (limit 300 s)"};
}

Verdict criterion7() {
    Rng rng(seed + 7);
    std::vector<CheckReport> reps;
    double worst_ratio = 0.0;
    for (int i = 0; i < 20; ++i) {
        const int n = rng.uniform_int(2, 4);
        const int m = rng.uniform_int(1, 12);
        reps.push_back(check_hua(random_homogeneous(n, m, rng), 1.0, 10000, Rng::splitmix(seed + 700 + i)));
        for (const auto& [k, v] : reps.back().metrics)
            if (k == "shilov_ratio") worst_ratio = std::max(worst_ratio, std::abs(v - 1.0));
    }
    auto v = summarise(reps, "hua");
    v.detail += ", max |shilov/sphere - 1| = " + fmt("%.3g", worst_ratio);
    return v;
}

Verdict criterion8() {
    Verdict v;
    int profiles = 0;
    double odd = 0.0, low = 0.0, slope = std::numeric_limits<double>::infinity();
    for (const char* f : {"inverse_quadratic.json", "newton_kernel.json", "newton_kernel_far.json", "exp_linear.json",
                          "harmonic_cubic.json"}) {
        const auto e = expand(io::spec_from_json(io::load_json(data_dir / f)), k30());
        const auto rep = structural_check(e, 1e-8, 0.1);
        profiles += rep.profiles_checked;
        odd = std::max(odd, rep.worst_odd_leak);
        low = std::max(low, rep.worst_low_leak);
        slope = std::min(slope, rep.worst_slope_margin);
        if (!rep.ok()) {
            v.ok = false;
            v.detail += std::string(f) + ": " + std::to_string(rep.violations.size()) + " violations; ";
        }
    }
    v.detail += std::to_string(profiles) + " profiles, odd leak " + fmt("%.3g", odd) + ", low leak " + fmt("%.3g", low) +
                ", min slope margin " + fmt("%.3g", slope);
    return v;
}

Verdict criterion9() {
    Rng rng(seed + 9);
    const int D = 24;
    double worst = 0.0;
    for (int n = 2; n <= 4; ++n) {
        const auto rule = build_rule(n, D);
        for (int t = 0; t < 200; ++t) {
            const int d = rng.uniform_int(0, D);
            std::vector<int> alpha(n, 0);
            for (int u = 0; u < d; ++u) ++alpha[rng.uniform_int(0, n - 1)];
            const double got = integrate(rule, [&](std::span<const double> x) {
                double p = 1.0;
                for (int j = 0; j < n; ++j) p *= std::pow(x[j], alpha[j]);
                return p;
            });
            worst = std::max(worst, std::abs(got - monomial_sphere_integral(alpha, n)));
        }
    }
    return {worst < 1e-10, "600 monomials up to degree " + std::to_string(D) + ", max error " + fmt("%.3g", worst)};
}

Verdict criterion10() {
    const auto dir = fs::temp_directory_path() / "lieball_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ostringstream sink;
    auto twice = [&](cli::RunConfig c, const std::string& name) {
        c.out = (dir / name).string();
        const int a = cli::run(c, sink, sink);
        const auto first = io::read_file(c.out);
        const int b = cli::run(c, sink, sink);
        return a == 0 && b == 0 && io::read_file(c.out) == first;
    };
    cli::RunConfig v;
    v.command = cli::Command::verify;
    v.suite = "all";
    v.seed = seed;
    cli::RunConfig e;
    e.command = cli::Command::expand;
    e.spec = (data_dir / "newton_kernel.json").string();
    const bool ok_v = twice(v, "verify");
    const bool ok_e = twice(e, "expand");
    fs::remove_all(dir);
    return {ok_v && ok_e, std::string("verify --suite all ") + (ok_v ? "identical" : "DIFFERS") + ", expand " +
                              (ok_e ? "identical" : "DIFFERS")};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"addition theorem", criterion1},
        {"complexified norm sums", criterion2},
        {"Lie-ball Legendre inequality", criterion3},
        {"harmonic extension", criterion4},
        {"inverse quadratic oracle", criterion5},
        {"Newton kernel radius", criterion6},
        {"Hua maximum modulus", criterion7},
        {"structural checks", criterion8},
        {"quadrature exactness", criterion9},
        {"determinism", criterion10},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += v.ok ? 0 : 1;
        std::cout << (v.ok ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << "): " << v.detail
                  << std::endl;
    }
    std::cout << (failed ? "FAILED " : "ALL PASSED ") << criteria.size() - failed << "/" << criteria.size() << std::endl;
    return failed ? 1 : 0;
}
