#include "ctqw/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "ctqw/errors.hpp"
#include "ctqw/graph.hpp"
#include "ctqw/polya.hpp"
#include "ctqw/spectral.hpp"

namespace ctqw::cli {

namespace {

constexpr std::pair<Command, std::string_view> kCommands[] = {
    {Command::P0Trace, "p0-trace"}, {Command::Schedule, "schedule"}, {Command::PolyaMC, "polya-mc"},
    {Command::PolyaQuad, "polya-quad"}, {Command::Diagnose, "diagnose"}, {Command::Classify, "classify"},
    {Command::Table1, "table1"},
};

bool ends_with(std::string_view s, std::string_view suffix)
{
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string dump(const nlohmann::json& j)
{
    return j.dump(2) + "\n";
}

void require(bool condition, const std::string& message)
{
    if (!condition) throw ValidationError(message);
}

bool is_graph(const std::string& kind)
{
    return kind == "cycle" || kind == "path" || kind == "complete" || kind == "star" || kind == "torus";
}

GraphSpec build_graph(const ModelSpec& spec)
{
    if (spec.kind == "cycle") return GraphSpec::cycle(spec.n);
    if (spec.kind == "path") return GraphSpec::path(spec.n);
    if (spec.kind == "complete") return GraphSpec::complete(spec.n);
    if (spec.kind == "star") return GraphSpec::star(spec.n);
    return GraphSpec::torus(spec.d, spec.l);
}

EnvelopeModel build_envelope(const ModelSpec& spec)
{
    EnvelopeModel envelope;
    envelope.alpha = spec.alpha;
    envelope.scale = spec.scale;
    envelope.rate = spec.rate;
    require(spec.modulation == "constant" || spec.modulation == "cosine-squared",
            fmt::format("unknown modulation '{}'", spec.modulation));
    envelope.modulation = spec.modulation == "constant" ? Modulation::Constant : Modulation::CosineSquared;
    require(spec.decay == "power" || spec.decay == "exponential", fmt::format("unknown decay '{}'", spec.decay));
    envelope.decay = spec.decay == "power" ? DecayLaw::Power : DecayLaw::Exponential;
    envelope.validate();
    return envelope;
}

void validate_model(const ModelSpec& spec)
{
    require(spec.gamma > 0.0 && std::isfinite(spec.gamma), "gamma must be positive");
    if (is_graph(spec.kind)) {
        build_graph(spec);
        require(spec.route == "spectral" || spec.route == "closed-form", fmt::format("unknown route '{}'", spec.route));
        if (spec.route == "closed-form") {
            require(spec.kind == "cycle", "the closed-form route exists only for cycles");
            CyclicClosedForm::for_cycle(spec.n, spec.gamma);
        }
        return;
    }
    require(spec.kind == "line" || spec.kind == "lattice" || spec.kind == "envelope",
            fmt::format("unknown model '{}'", spec.kind));
    require(spec.gamma == 1.0, fmt::format("model '{}' is defined for gamma = 1 only", spec.kind));
    if (spec.kind == "lattice") require(spec.d >= 1, "lattice needs d >= 1");
    if (spec.kind == "envelope") build_envelope(spec);
}

std::string timestamp_utc()
{
    const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", now);
}

class Sink {
public:
    Sink(const ExperimentConfig& config, std::ostream& fallback)
        : config_(config)
        , fallback_(fallback)
    {
    }

    void write(const std::string& path, const std::string& payload)
    {
        if (path.empty()) {
            fallback_ << payload;
            return;
        }
        std::ofstream file(path, std::ios::binary);
        if (!file) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
        file << payload;
        outputs_.push_back(path);
    }

    void write_manifest() const
    {
        if (!config_.json_manifest || config_.out.empty()) return;
        nlohmann::json manifest;
        manifest["tool"] = "ctqw";
        manifest["version"] = tool_version();
        manifest["command"] = command_name(config_.command);
        manifest["config"] = to_json(config_);
        manifest["seed"] = config_.seed;
        manifest["rng_id"] = kRngId;
        manifest["outputs"] = outputs_;
        manifest["created_utc"] = timestamp_utc();
        std::ofstream file(config_.out + ".manifest.json", std::ios::binary);
        if (!file) throw std::runtime_error("cannot write run manifest");
        file << dump(manifest);
    }

private:
    const ExperimentConfig& config_;
    std::ostream& fallback_;
    std::vector<std::string> outputs_;
};

nlohmann::json table1(const ExperimentConfig& config, std::ostream& err)
{
    const MonteCarloOptions options{config.threads};
    const PoissonLaw law{1.0};
    nlohmann::json rows = nlohmann::json::array();
    for (int d : {2, 3, 4}) {
        const ReturnModel model = LatticeBessel{d};
        const auto p0_fn = as_function(model);
        err << fmt::format("table1: d = {}: Monte Carlo ({} trials)\n", d, config.trials);
        const auto profile = monte_carlo_profile(p0_fn, law, 4, config.trials, config.seed, options);
        err << fmt::format("table1: d = {}: Gauss-Laguerre ({} / {} nodes)\n", d, config.nodes, config.nodes_increment);
        const auto quad3 = quadrature_expectation(p0_fn, 1.0, 3, config.nodes, options);
        const auto quad3_coarse = quadrature_expectation(p0_fn, 1.0, 3, config.nodes_increment, options);
        const auto quad4 = quadrature_expectation(p0_fn, 1.0, 4, config.nodes_increment, options);

        const double difference = profile.mean[2] - quad3.value;
        const double combined = profile.std_error[2] + quad3.error_estimate;
        rows.push_back({
            {"d", d},
            {"monte_carlo",
             {{"e_p3", profile.mean[2]},
              {"std_error", profile.std_error[2]},
              {"e_p4_minus_e_p3", profile.increment[2]},
              {"increment_std_error", profile.increment_std_error[2]}}},
            {"quadrature",
             {{"e_p3", quad3.value},
              {"error_estimate", quad3.error_estimate},
              {"nodes_per_dim", quad3.nodes_per_dim},
              {"e_p4_minus_e_p3", quad4.value - quad3_coarse.value},
              {"increment_error_estimate", quad4.error_estimate + quad3_coarse.error_estimate},
              {"increment_nodes_per_dim", quad4.nodes_per_dim}}},
            {"agreement",
             {{"difference", difference},
              {"combined_error", combined},
              {"within_3_sigma", std::abs(difference) <= 3.0 * combined}}},
        });
    }
    return {{"lambda", 1.0},
            {"n_points", 3},
            {"trials", config.trials},
            {"seed", config.seed},
            {"rng_id", kRngId},
            {"rows", rows}};
}

int execute(const ExperimentConfig& config, std::ostream& out, std::ostream& err)
{
    validate(config);
    Sink sink(config, out);
    const MonteCarloOptions options{config.threads};

    switch (config.command) {
    case Command::P0Trace: {
        const auto model = build_model(config.model);
        std::ostringstream payload;
        write_p0_trace(payload, model, config.t_max, config.points);
        sink.write(config.out, payload.str());
        break;
    }
    case Command::Schedule: {
        const auto schedule = generate(build_law(config.law), config.count, config.seed);
        if (ends_with(config.out, ".json")) {
            sink.write(config.out, dump(to_json(schedule)));
        } else {
            std::ostringstream payload;
            write_schedule_csv(payload, schedule);
            sink.write(config.out, payload.str());
        }
        break;
    }
    case Command::PolyaMC: {
        const auto model = build_model(config.model);
        const auto estimate =
            monte_carlo_expectation(model, build_law(config.law), config.n_points, config.trials, config.seed, options);
        sink.write(config.out, dump(to_json(estimate, describe(config.model))));
        break;
    }
    case Command::PolyaQuad: {
        const auto model = build_model(config.model);
        const auto estimate = quadrature_expectation(model, config.law.lambda, config.n_points, config.nodes, options);
        sink.write(config.out, dump(to_json(estimate, describe(config.model))));
        break;
    }
    case Command::Diagnose: {
        const auto model = build_model(config.model);
        const auto law = build_law(config.law);
        const auto diagnostic = divergence_diagnostic(model, law, config.max_points, config.seed);
        std::ostringstream csv;
        write_partial_sums_csv(csv, diagnostic);
        nlohmann::json summary{{"model", describe(config.model)},
                               {"law", to_json(law)},
                               {"max_points", config.max_points},
                               {"seed", config.seed},
                               {"rng_id", kRngId},
                               {"growth_fit", to_json(diagnostic.growth_fit)},
                               {"tail_bound", diagnostic.tail_bound}};
        for (const auto& candidate : diagnostic.candidates) summary["candidates"].push_back(to_json(candidate));
        if (config.out.empty()) {
            out << dump(summary);
        } else {
            sink.write(config.out, csv.str());
            sink.write(config.out + ".fit.json", dump(summary));
        }
        break;
    }
    case Command::Classify: {
        const auto model = build_model(config.model);
        DecayFitOptions fit_options;
        fit_options.bootstrap_resamples = config.bootstrap;
        const auto verdict = estimate_decay_exponent(model, config.t_min, config.fit_t_max, config.grid, fit_options);
        auto payload = to_json(verdict);
        payload["model"] = describe(config.model);
        payload["t_min"] = config.t_min;
        payload["t_max"] = config.fit_t_max;
        payload["grid_points"] = config.grid;
        sink.write(config.out, dump(payload));
        break;
    }
    case Command::Table1:
        sink.write(config.out, dump(table1(config, err)));
        break;
    }
    sink.write_manifest();
    return kExitOk;
}

} // namespace

std::string_view tool_version() noexcept
{
    return CTQW_VERSION;
}

std::string_view command_name(Command command) noexcept
{
    for (const auto& [c, name] : kCommands)
        if (c == command) return name;
    return "?";
}

std::optional<Command> parse_command(std::string_view name) noexcept
{
    for (const auto& [c, n] : kCommands)
        if (n == name) return c;
    return std::nullopt;
}

nlohmann::json to_json(const ExperimentConfig& c)
{
    const auto& m = c.model;
    const auto& l = c.law;
    return {
        {"command", command_name(c.command)},
        {"model",
         {{"kind", m.kind},
          {"n", m.n},
          {"d", m.d},
          {"l", m.l},
          {"gamma", m.gamma},
          {"route", m.route},
          {"alpha", m.alpha},
          {"modulation", m.modulation},
          {"scale", m.scale},
          {"decay", m.decay},
          {"rate", m.rate}}},
        {"law", {{"kind", l.kind}, {"lambda", l.lambda}, {"period", l.period}, {"first", l.first}, {"delta", l.delta}}},
        {"seed", c.seed},
        {"threads", c.threads},
        {"out", c.out},
        {"json_manifest", c.json_manifest},
        {"t_min", c.t_min},
        {"t_max", c.t_max},
        {"fit_t_max", c.fit_t_max},
        {"points", c.points},
        {"count", c.count},
        {"n_points", c.n_points},
        {"trials", c.trials},
        {"nodes", c.nodes},
        {"nodes_increment", c.nodes_increment},
        {"max_points", c.max_points},
        {"grid", c.grid},
        {"bootstrap", c.bootstrap},
    };
}

ExperimentConfig config_from_json(const nlohmann::json& j)
{
    try {
        ExperimentConfig c;
        const auto command = parse_command(j.at("command").get<std::string>());
        if (!command) throw ValidationError("unknown command in config");
        c.command = *command;
        const auto& m = j.at("model");
        c.model = {m.at("kind"), m.at("n"), m.at("d"), m.at("l"), m.at("gamma"), m.at("route"),
                   m.at("alpha"), m.at("modulation"), m.at("scale"), m.at("decay"), m.at("rate")};
        const auto& l = j.at("law");
        c.law = {l.at("kind"), l.at("lambda"), l.at("period"), l.at("first"), l.at("delta")};
        c.seed = j.at("seed");
        c.threads = j.at("threads");
        c.out = j.at("out");
        c.json_manifest = j.at("json_manifest");
        c.t_min = j.at("t_min");
        c.t_max = j.at("t_max");
        c.fit_t_max = j.at("fit_t_max");
        c.points = j.at("points");
        c.count = j.at("count");
        c.n_points = j.at("n_points");
        c.trials = j.at("trials");
        c.nodes = j.at("nodes");
        c.nodes_increment = j.at("nodes_increment");
        c.max_points = j.at("max_points");
        c.grid = j.at("grid");
        c.bootstrap = j.at("bootstrap");
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(fmt::format("malformed experiment config: {}", e.what()));
    }
}

ScheduleLaw build_law(const LawSpec& spec)
{
    ScheduleLaw law;
    if (spec.kind == "poisson") {
        law = PoissonLaw{spec.lambda};
    } else if (spec.kind == "periodic") {
        law = PeriodicLaw{spec.period, spec.first};
    } else if (spec.kind == "jittered") {
        law = JitteredLaw{spec.period, spec.first, spec.delta};
    } else {
        throw ValidationError(fmt::format("unknown law '{}'", spec.kind));
    }
    validate(law);
    return law;
}

ReturnModel build_model(const ModelSpec& spec)
{
    validate_model(spec);
    if (spec.kind == "line") return LineBessel{};
    if (spec.kind == "lattice") return LatticeBessel{spec.d};
    if (spec.kind == "envelope") return build_envelope(spec);
    if (spec.kind == "cycle" && spec.route == "closed-form") return CyclicClosedForm::for_cycle(spec.n, spec.gamma);
    return spectral_decompose(build_hamiltonian(build_graph(spec), spec.gamma));
}

nlohmann::json describe(const ModelSpec& spec)
{
    nlohmann::json j{{"kind", spec.kind}};
    if (is_graph(spec.kind)) {
        j["graph"] = to_json(build_graph(spec));
        j["gamma"] = spec.gamma;
        j["route"] = spec.route;
    } else if (spec.kind == "lattice") {
        j["d"] = spec.d;
    } else if (spec.kind == "envelope") {
        j.update(ctqw::describe(ReturnModel{build_envelope(spec)}));
    }
    return j;
}

void validate(const ExperimentConfig& c)
{
    const bool needs_model = c.command != Command::Schedule && c.command != Command::Table1;
    const bool needs_law = c.command == Command::Schedule || c.command == Command::PolyaMC ||
                           c.command == Command::PolyaQuad || c.command == Command::Diagnose;
    if (needs_model) validate_model(c.model);
    if (needs_law) build_law(c.law);

    switch (c.command) {
    case Command::P0Trace:
        require(c.t_max > 0.0, "--t-max must be positive");
        require(c.points >= 2, "--points must be at least 2");
        break;
    case Command::Schedule:
        require(c.count >= 1, "--count must be at least 1");
        break;
    case Command::PolyaMC:
        require(c.trials >= 100, "--trials must be at least 100");
        break;
    case Command::PolyaQuad:
        require(c.law.kind == "poisson", "polya-quad integrates over Poisson timing only");
        require(c.n_points >= 1 && c.n_points <= 4, "--n-points must be in [1, 4] for quadrature");
        require(c.nodes >= 32, "--nodes must be at least 32");
        break;
    case Command::Diagnose:
        require(c.max_points >= 1000, "--max-points must be at least 1000");
        break;
    case Command::Classify:
        require(c.t_min > 0.0 && c.fit_t_max >= 10.0 * c.t_min, "classify needs t_max >= 10 t_min > 0");
        require(c.grid >= 1000, "--grid must be at least 1000");
        require(c.bootstrap >= 1, "--bootstrap must be at least 1");
        break;
    case Command::Table1:
        require(c.trials >= 100, "--trials must be at least 100");
        require(c.nodes >= 32 && c.nodes_increment >= 32, "quadrature node counts must be at least 32");
        break;
    }
    if (c.command == Command::PolyaQuad || c.command == Command::Table1) {
        const int n_points = c.command == Command::Table1 ? 4 : static_cast<int>(c.n_points);
        const int nodes = c.command == Command::Table1 ? c.nodes_increment : c.nodes;
        if (std::pow(static_cast<double>(nodes), n_points) > kMaxQuadratureEvaluations) {
            throw ResourceError(fmt::format("{}^{} quadrature evaluations exceed the cap; use polya-mc", nodes, n_points));
        }
    }
}

int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err)
{
    try {
        return execute(config, out, err);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalidConfig;
    } catch (const ResourceError& e) {
        err << "resource limit: " << e.what() << "\n";
        return kExitResourceLimit;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

int replay(const std::string& manifest_path, const std::optional<std::string>& out_override, std::ostream& out,
           std::ostream& err)
{
    std::ifstream file(manifest_path);
    if (!file) {
        err << "error: cannot read manifest '" << manifest_path << "'\n";
        return kExitInvalidConfig;
    }
    try {
        const auto manifest = nlohmann::json::parse(file);
        auto config = config_from_json(manifest.at("config"));
        if (out_override) config.out = *out_override;
        return run(config, out, err);
    } catch (const std::exception& e) {
        err << "error: invalid manifest: " << e.what() << "\n";
        return kExitInvalidConfig;
    }
}

} // namespace ctqw::cli
