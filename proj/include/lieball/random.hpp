#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace lieball {

/// Deterministic random source. The raw engine output of std::mt19937_64 is
/// fixed by the standard; the conversions below avoid the library-defined
/// distributions so that samples are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Counter-derived stream: trial i of a run seeded with s.
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        return Rng(splitmix(seed ^ splitmix(index + 0x632be59bd9b4e019ULL)));
    }

    /// Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        spare_ = mag * std::sin(2.0 * std::numbers::pi * u2);
        has_spare_ = true;
        return mag * std::cos(2.0 * std::numbers::pi * u2);
    }

    int uniform_int(int lo, int hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<int>(engine_() % span);
    }

    /// Uniform point on the unit sphere S^{n-1}.
    std::vector<double> unit_vector(int n) {
        std::vector<double> v(static_cast<std::size_t>(n));
        double s = 0.0;
        do {
            s = 0.0;
            for (auto& x : v) {
                x = normal();
                s += x * x;
            }
        } while (s < 1e-300);
        const double inv = 1.0 / std::sqrt(s);
        for (auto& x : v) x *= inv;
        return v;
    }

    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace lieball
