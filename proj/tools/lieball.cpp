// lieball: Laplace-Fourier expansions and their continuation to the Lie ball.

#include <CLI11.hpp>

#include "lieball/cli.hpp"

namespace {

struct Flags {
    int n = 0;
    double R = 0.0;
    double tau = 0.0;
};

} // namespace

int main(int argc, char** argv) {
    using lieball::cli::RunConfig;

    CLI::App app{"Laplace-Fourier expansions on balls and holomorphic continuation to the Lie ball"};
    app.require_subcommand(1);
    RunConfig cfg;
    Flags f;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--n", f.n, "dimension");
        sub->add_option("--R", f.R, "radius of the real ball");
        sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--out", cfg.out, "output file");
    };
    auto expansion_knobs = [&](CLI::App* sub) {
        sub->add_option("--K", cfg.K, "maximal harmonic degree");
        sub->add_option("--M", cfg.M, "profile degree in t = r^2");
        sub->add_option("--radial-nodes", cfg.radial_nodes, "radial check nodes");
        sub->add_option("--quad-degree", cfg.quad_degree, "sphere rule exactness degree (0 = automatic)");
    };

    auto* expand = app.add_subcommand("expand", "Laplace-Fourier expansion of a function spec");
    common(expand);
    expansion_knobs(expand);
    expand->add_option("--spec", cfg.spec, "function spec JSON")->required();

    auto* extend = app.add_subcommand("extend", "evaluate an expansion at complex points");
    common(extend);
    extend->add_option("--expansion", cfg.expansion, "expansion JSON")->required();
    extend->add_option("--points", cfg.points, "points JSON")->required();
    extend->add_flag("--decay", cfg.decay, "attach empirical tail bounds");
    auto* extend_tau = extend->add_option("--tau", f.tau, "decay radius (default R/2)");

    auto* estimate = app.add_subcommand("estimate-radius", "estimate the decay radius rho of the profiles");
    common(estimate);
    expansion_knobs(estimate);
    estimate->add_option("--spec", cfg.spec, "function spec JSON");
    estimate->add_option("--expansion", cfg.expansion, "expansion JSON");
    auto* estimate_tau = estimate->add_option("--tau", f.tau, "decay radius (default R/2)");

    auto* verify = app.add_subcommand("verify", "run property suites");
    common(verify);
    verify->add_option("--suite", cfg.suite, "all|add3|hua|addition|legendre|extension");
    verify->add_option("--seed", cfg.seed, "random seed");
    verify->add_option("--trials", cfg.trials, "samples per check (0 = defaults)");
    verify->add_option("--json", cfg.out, "report file");

    auto* basis = app.add_subcommand("basis", "export an orthonormal harmonic basis");
    common(basis);
    basis->add_option("--k", cfg.k, "degree")->required();

    std::vector<std::pair<CLI::App*, std::pair<CLI::Option*, CLI::Option*>>> dims;
    for (auto* sub : {expand, extend, estimate, verify, basis})
        dims.push_back({sub, {sub->get_option("--n"), sub->get_option("--R")}});

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    CLI::App* chosen = app.get_subcommands().front();
    cfg.command = lieball::cli::command_from_string(chosen->get_name());
    for (const auto& [sub, opts] : dims) {
        if (sub != chosen) continue;
        if (opts.first->count()) cfg.n = f.n;
        if (opts.second->count()) cfg.R = f.R;
    }
    if ((chosen == extend && extend_tau->count()) || (chosen == estimate && estimate_tau->count())) cfg.tau = f.tau;
    return lieball::cli::run(cfg);
}
