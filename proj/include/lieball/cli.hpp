#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "holo_continuation.hpp"
#include "io.hpp"
#include "lf_transform.hpp"
#include "verification.hpp"

namespace lieball::cli {

enum class Command { expand, extend, estimate_radius, verify, basis };

inline std::string_view to_string(Command c) {
    switch (c) {
    case Command::expand: return "expand";
    case Command::extend: return "extend";
    case Command::estimate_radius: return "estimate-radius";
    case Command::verify: return "verify";
    case Command::basis: return "basis";
    }
    return "unknown";
}

inline Command command_from_string(std::string_view s) {
    if (s == "expand") return Command::expand;
    if (s == "extend") return Command::extend;
    if (s == "estimate-radius") return Command::estimate_radius;
    if (s == "verify") return Command::verify;
    if (s == "basis") return Command::basis;
    throw ValidationError("command", "unknown command '" + std::string(s) + "'");
}

struct RunConfig {
    Command command = Command::expand;
    std::optional<int> n;
    std::optional<double> R;
    int K = 30;
    int M = 24;
    int radial_nodes = 32;
    int quad_degree = 0; ///< 0 = automatic
    std::optional<double> tau; ///< default 0.5 R
    std::uint64_t seed = 1;
    long trials = 0; ///< 0 = suite defaults
    int k = 0;       ///< basis degree
    std::string spec;
    std::string expansion;
    std::string points;
    std::string out;
    std::string format = "json";
    std::string suite = "all";
    bool decay = false;

    void validate() const {
        if (K < 0 || K > BasisLimits::max_degree)
            throw ValidationError("K", "must lie in [0, " + std::to_string(BasisLimits::max_degree) + "]");
        if (M < 0 || M > 200) throw ValidationError("M", "must lie in [0, 200]");
        if (radial_nodes < M + 1) throw ValidationError("radial_nodes", "must be >= M + 1");
        if (quad_degree < 0 || quad_degree > 400) throw ValidationError("quad_degree", "must lie in [0, 400]");
        if (tau && !(*tau > 0.0)) throw ValidationError("tau", "must be positive");
        if (trials < 0) throw ValidationError("trials", "must be >= 0");
        if (format != "json" && format != "csv") throw ValidationError("format", "expected json or csv");
        if (n && *n < 2) throw ValidationError("n", "dimension must be >= 2");
        if (R && !(*R > 0.0)) throw ValidationError("R", "radius must be positive");
        switch (command) {
        case Command::expand:
            if (spec.empty()) throw ValidationError("spec", "required for expand");
            if (out.empty()) throw ValidationError("out", "required for expand");
            break;
        case Command::extend:
            if (expansion.empty()) throw ValidationError("expansion", "required for extend");
            if (points.empty()) throw ValidationError("points", "required for extend");
            if (out.empty()) throw ValidationError("out", "required for extend");
            break;
        case Command::estimate_radius:
            if (spec.empty() == expansion.empty())
                throw ValidationError("expansion", "estimate-radius needs exactly one of --spec or --expansion");
            break;
        case Command::verify:
            if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
                throw ValidationError("suite", "unknown suite '" + suite + "'");
            break;
        case Command::basis:
            if (!n) throw ValidationError("n", "required for basis");
            if (k < 0) throw ValidationError("k", "must be >= 0");
            if (out.empty()) throw ValidationError("out", "required for basis");
            break;
        }
    }

    /// Everything that determines the artifact; thread count is excluded
    /// because results do not depend on it.
    io::json to_json() const {
        io::json j = {{"command", std::string(cli::to_string(command))},
                      {"K", K},
                      {"M", M},
                      {"radial_nodes", radial_nodes},
                      {"quad_degree", quad_degree},
                      {"seed", seed},
                      {"trials", trials},
                      {"k", k},
                      {"spec", spec},
                      {"expansion", expansion},
                      {"points", points},
                      {"out", out},
                      {"format", format},
                      {"suite", suite},
                      {"decay", decay}};
        j["n"] = n ? io::json(*n) : io::json(nullptr);
        j["R"] = R ? io::json(*R) : io::json(nullptr);
        j["tau"] = tau ? io::json(*tau) : io::json(nullptr);
        return j;
    }

    /// Inverse of to_json, for replaying the config embedded in an artifact.
    static RunConfig from_json(const io::json& j) {
        RunConfig c;
        c.command = command_from_string(io::get_field<std::string>(j, "command", "config"));
        c.K = io::get_field<int>(j, "K", "config");
        c.M = io::get_field<int>(j, "M", "config");
        c.radial_nodes = io::get_field<int>(j, "radial_nodes", "config");
        c.quad_degree = io::get_field<int>(j, "quad_degree", "config");
        c.seed = io::get_field<std::uint64_t>(j, "seed", "config");
        c.trials = io::get_field<long>(j, "trials", "config");
        c.k = io::get_field<int>(j, "k", "config");
        c.spec = io::get_field<std::string>(j, "spec", "config");
        c.expansion = io::get_field<std::string>(j, "expansion", "config");
        c.points = io::get_field<std::string>(j, "points", "config");
        c.out = io::get_field<std::string>(j, "out", "config");
        c.format = io::get_field<std::string>(j, "format", "config");
        c.suite = io::get_field<std::string>(j, "suite", "config");
        c.decay = io::get_field<bool>(j, "decay", "config");
        if (j.contains("n") && !j.at("n").is_null()) c.n = io::get_field<int>(j, "n", "config");
        if (j.contains("R") && !j.at("R").is_null()) c.R = io::get_number(j, "R", "config");
        if (j.contains("tau") && !j.at("tau").is_null()) c.tau = io::get_number(j, "tau", "config");
        return c;
    }
};

namespace detail {

inline io::json envelope(const RunConfig& cfg, const std::string& kind) {
    return {{"format", io::format_version}, {"artifact", kind}, {"config", cfg.to_json()}};
}

inline void emit(const RunConfig& cfg, const io::json& doc, const std::string& csv) {
    io::write_atomic(cfg.out, cfg.format == "csv" ? csv : io::dump(doc));
}

inline ExpandOptions expand_options(const RunConfig& cfg) {
    ExpandOptions o;
    o.K = cfg.K;
    o.M = cfg.M;
    o.radial_nodes = cfg.radial_nodes;
    o.quad_degree = cfg.quad_degree;
    return o;
}

/// Like io::load_json, but a missing file is reported against the flag.
inline io::json load_input(const std::string& path, const std::string& field) {
    std::ifstream probe(path);
    if (!probe) throw ValidationError(field, "cannot open file " + path);
    return io::load_json(path);
}

inline FunctionSpec load_spec(const RunConfig& cfg) {
    auto spec = io::spec_from_json(load_input(cfg.spec, "spec"));
    if (cfg.n && *cfg.n != spec.n) throw ValidationError("n", "--n disagrees with the spec file");
    if (cfg.R && *cfg.R != spec.R) throw ValidationError("R", "--R disagrees with the spec file");
    return spec;
}

inline LFExpansion load_expansion(const RunConfig& cfg) {
    return io::expansion_from_json(load_input(cfg.expansion, "expansion"));
}

inline double tau_for(const RunConfig& cfg, const LFExpansion& e) { return cfg.tau ? *cfg.tau : 0.5 * e.R; }

inline int run_expand(const RunConfig& cfg, std::ostream& os) {
    const auto spec = load_spec(cfg);
    const auto e = expand(spec, expand_options(cfg));
    auto doc = envelope(cfg, "expansion");
    doc.update(io::to_json(e));
    emit(cfg, doc, io::expansion_csv(e));
    std::size_t nonzero = 0;
    for (const auto& row : e.profiles)
        for (const auto& p : row) nonzero += p.is_zero() ? 0 : 1;
    os << "expansion: n=" << e.n << " K=" << e.K << " profiles=" << e.profile_count() << " nonzero=" << nonzero
       << " quad_degree=" << e.quad_degree << " -> " << cfg.out << "\n";
    for (const auto& d : e.diagnostics) os << "diagnostic: " << d << "\n";
    return 0;
}

inline int run_extend(const RunConfig& cfg, std::ostream& os) {
    const auto e = load_expansion(cfg);
    const auto pts = io::points_from_json(load_input(cfg.points, "points"));
    std::optional<DecayEstimate> decay;
    if (cfg.decay) decay = decay_estimate(e, tau_for(cfg, e));
    const auto rows = grid_extend(e, pts, decay);
    auto doc = envelope(cfg, "values");
    doc["rows"] = io::to_json(rows);
    doc["decay"] = decay ? io::to_json(*decay) : io::json(nullptr);
    doc["tail_bound_kind"] = "empirical"; // built from the fitted (C_hat, rho_hat), not proven constants
    emit(cfg, doc, io::values_csv(rows));
    os << "values: " << rows.size() << " points -> " << cfg.out << "\n";
    if (decay && !decay->usable()) os << "warning: tau >= rho_hat, tail bounds omitted\n";
    return 0;
}

inline int run_estimate(const RunConfig& cfg, std::ostream& os) {
    const auto e = cfg.expansion.empty() ? expand(load_spec(cfg), expand_options(cfg)) : load_expansion(cfg);
    const auto d = decay_estimate(e, tau_for(cfg, e));
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", d.rho_hat);
    os << "rho_hat = " << buf << (d.band_limited ? " (band-limited)" : "") << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", d.C_hat);
    os << "C_hat = " << buf << "\n";
    os << "r_squared_fit = " << d.r_squared_fit << " window = [" << d.k_min << ", " << d.k_max << "]\n";
    if (!cfg.out.empty()) {
        auto doc = envelope(cfg, "decay");
        doc["decay"] = io::to_json(d);
        std::string csv = "k,max_profile\n";
        for (std::size_t k = 0; k < d.max_profile.size(); ++k)
            csv += std::to_string(k) + "," + io::g17(d.max_profile[k]) + "\n";
        emit(cfg, doc, csv);
    }
    return 0;
}

inline int run_verify(const RunConfig& cfg, std::ostream& os) {
    const auto reports = run_suite(cfg.suite, cfg.trials, cfg.seed);
    long failures = 0;
    long failing_checks = 0;
    for (const auto& r : reports) {
        failures += r.failures;
        failing_checks += r.passed() ? 0 : 1;
    }
    if (!cfg.out.empty()) {
        auto doc = envelope(cfg, "verify");
        doc["suite"] = cfg.suite;
        doc["passed"] = failures == 0;
        io::json arr = io::json::array();
        for (const auto& r : reports) arr.push_back(io::to_json(r));
        doc["reports"] = arr;
        emit(cfg, doc, io::reports_csv(reports));
    }
    for (const auto& r : reports)
        if (!r.passed()) os << "FAIL " << r.name << ": " << r.failures << "/" << r.trials << "\n";
    os << "verify " << cfg.suite << ": " << reports.size() << " checks, " << failing_checks << " failing\n";
    if (failures > 0) {
        if (!cfg.out.empty()) os << "report: " << cfg.out << "\n";
        return 1;
    }
    return 0;
}

inline int run_basis(const RunConfig& cfg, std::ostream& os) {
    const auto b = build_basis(*cfg.n, cfg.k);
    auto doc = envelope(cfg, "basis");
    doc["basis"] = io::basis_json(*b);
    emit(cfg, doc, io::basis_csv(*b));
    os << "basis: n=" << b->dim() << " k=" << b->degree() << " size=" << b->size() << " -> " << cfg.out << "\n";
    return 0;
}

} // namespace detail

/// Exit status: 0 success, 1 check failures or runtime errors, 2 invalid
/// input (flags, files, out-of-domain points).
inline int run(const RunConfig& cfg, std::ostream& os = std::cout, std::ostream& err = std::cerr) {
    try {
        cfg.validate();
        switch (cfg.command) {
        case Command::expand: return detail::run_expand(cfg, os);
        case Command::extend: return detail::run_extend(cfg, os);
        case Command::estimate_radius: return detail::run_estimate(cfg, os);
        case Command::verify: return detail::run_verify(cfg, os);
        case Command::basis: return detail::run_basis(cfg, os);
        }
    } catch (const ValidationError& e) {
        std::string msg = e.what();
        if (msg.rfind(e.field() + ": ", 0) == 0) msg.erase(0, e.field().size() + 2);
        err << "error: invalid field '" << e.field() << "': " << msg << "\n";
        return 2;
    } catch (const io::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        err << "error: domain: " << e.what() << "\n";
        return 2;
    } catch (const ResourceError& e) {
        err << "error: resource: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace lieball::cli
