#include <iostream>

#include <CLI11.hpp>

#include "ctqw/experiment.hpp"

using ctqw::cli::Command;
using ctqw::cli::ExperimentConfig;

namespace {

void add_common(CLI::App* app, ExperimentConfig& c)
{
    app->add_option("--seed", c.seed, "Master seed for every random draw");
    app->add_option("--out", c.out, "Output file (stdout when omitted)");
    app->add_option("--threads", c.threads, "Worker threads, 0 for all cores");
    app->add_option("--json-manifest", c.json_manifest, "Write <out>.manifest.json (true/false)");
}

void add_model(CLI::App* app, ExperimentConfig& c)
{
    auto& m = c.model;
    app->add_option("--model", m.kind, "cycle|path|complete|star|torus|line|lattice|envelope");
    app->add_option("--n", m.n, "Vertex count for cycle, path, complete and star");
    app->add_option("--d", m.d, "Dimension for torus and lattice");
    app->add_option("--l", m.l, "Side length for torus");
    app->add_option("--gamma", m.gamma, "Hopping rate");
    app->add_option("--route", m.route, "spectral|closed-form");
    app->add_option("--alpha", m.alpha, "Envelope exponent");
    app->add_option("--modulation", m.modulation, "constant|cosine-squared");
    app->add_option("--scale", m.scale, "Envelope scale");
    app->add_option("--decay", m.decay, "power|exponential");
    app->add_option("--rate", m.rate, "Exponential decay rate");
}

void add_law(CLI::App* app, ExperimentConfig& c)
{
    auto& l = c.law;
    app->add_option("--law", l.kind, "poisson|periodic|jittered");
    app->add_option("--lambda", l.lambda, "Poisson rate");
    app->add_option("--period", l.period, "Periodic spacing T");
    app->add_option("--first", l.first, "First measurement time t1");
    app->add_option("--delta", l.delta, "Jitter half-width");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Measurement-induced recurrence of continuous-time quantum walks"};
    app.set_version_flag("--version", std::string(ctqw::cli::tool_version()));
    app.require_subcommand(1);

    ExperimentConfig config;
    std::string manifest;
    std::string replay_out;

    auto* trace = app.add_subcommand("p0-trace", "Tabulate the return probability p0(t)");
    add_common(trace, config);
    add_model(trace, config);
    trace->add_option("--t-max", config.t_max, "Largest time");
    trace->add_option("--points", config.points, "Number of samples including t = 0");

    auto* schedule = app.add_subcommand("schedule", "Draw one measurement schedule");
    add_common(schedule, config);
    add_law(schedule, config);
    schedule->add_option("--count", config.count, "Number of measurement times");

    auto* mc = app.add_subcommand("polya-mc", "Monte Carlo estimate of the expected partial Polya number");
    add_common(mc, config);
    add_model(mc, config);
    add_law(mc, config);
    mc->add_option("--n-points", config.n_points, "Measurements per trial");
    mc->add_option("--trials", config.trials, "Number of schedules");

    auto* quad = app.add_subcommand("polya-quad", "Gauss-Laguerre estimate for Poisson timing");
    add_common(quad, config);
    add_model(quad, config);
    add_law(quad, config);
    quad->add_option("--n-points", config.n_points, "Measurements (1 to 4)");
    quad->add_option("--nodes", config.nodes, "Nodes per dimension");

    auto* diagnose = app.add_subcommand("diagnose", "Partial sums of p0 along one schedule and growth fit");
    add_common(diagnose, config);
    add_model(diagnose, config);
    add_law(diagnose, config);
    diagnose->add_option("--max-points", config.max_points, "Number of measurements");

    auto* classify = app.add_subcommand("classify", "Decay exponent of the p0 envelope and recurrence verdict");
    add_common(classify, config);
    add_model(classify, config);
    classify->add_option("--t-min", config.t_min, "Start of the fit window");
    classify->add_option("--t-max", config.fit_t_max, "End of the fit window");
    classify->add_option("--grid", config.grid, "Uniform grid points over the window");
    classify->add_option("--bootstrap", config.bootstrap, "Bootstrap resamples");

    auto* table = app.add_subcommand("table1", "Lattice table: Monte Carlo against quadrature for d = 2, 3, 4");
    add_common(table, config);
    table->add_option("--trials", config.trials, "Monte Carlo trials per dimension");
    table->add_option("--nodes", config.nodes, "Nodes per dimension for E[P3]");
    table->add_option("--nodes-increment", config.nodes_increment, "Nodes per dimension for the 4-point increment");

    auto* replay = app.add_subcommand("replay", "Re-run the experiment recorded in a manifest");
    replay->add_option("--manifest", manifest, "Manifest written by an earlier run")->required();
    replay->add_option("--out", replay_out, "Redirect the output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ctqw::cli::kExitInvalidConfig;
    }

    if (replay->parsed()) {
        const auto override_out = replay_out.empty() ? std::nullopt : std::optional<std::string>(replay_out);
        return ctqw::cli::replay(manifest, override_out, std::cout, std::cerr);
    }
    for (auto* sub : app.get_subcommands()) {
        if (const auto command = ctqw::cli::parse_command(sub->get_name())) config.command = *command;
    }
    return ctqw::cli::run(config, std::cout, std::cerr);
}
