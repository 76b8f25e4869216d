#include "cqed/app.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cqed/config.hpp"
#include "cqed/csv.hpp"

#ifndef CQED_VERSION
#define CQED_VERSION "0.0.0"
#endif

namespace cqed {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Options {
    std::string config_path;
    std::string variant;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    int threads = 0;
    int figure = 0;
};

std::string short_number(double v) {
    if (std::isinf(v)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::vector<std::string> metadata(const std::string& command, const ExperimentConfig& cfg,
                                  const std::string& label = {}) {
    const auto& e = cfg.experiment;
    std::vector<std::string> lines = {
        std::string("cqed ") + CQED_VERSION,
        "command: " + command,
        "variant: " + std::string(to_string(e.params.variant)),
        "seed: " + std::to_string(e.seed),
        "alpha: " + format_double(e.params.alpha) + " (recoil parameter; not fixed by the model)",
        "integrator: " + std::string(to_string(e.integration.method)) +
            " step=" + format_double(e.integration.step),
    };
    if (!label.empty()) lines.push_back("label: " + label);
    lines.push_back("config: " + to_json(cfg).dump());
    return lines;
}

std::string path_in(const ExperimentConfig& cfg, const std::string& name) {
    return (fs::path(cfg.output_path) / name).string();
}

void write_config_echo(const ExperimentConfig& cfg, const std::string& name = "config.json") {
    std::ofstream out(path_in(cfg, name), std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write config echo to '" + path_in(cfg, name) + "'");
    out << to_json(cfg).dump(2) << '\n';
}

void warn_stiff(const ExperimentConfig& cfg, std::ostream& err) {
    bool stiff = false;
    if (const auto* inv = std::get_if<InverseTemperature>(&cfg.experiment.params.temperature)) {
        stiff = inv->beta < kStiffBetaThreshold;
    }
    for (const auto& axis : cfg.sweep.axes) {
        if (axis.kind != SweepAxisKind::Beta) continue;
        for (double b : axis.values) stiff = stiff || b < kStiffBetaThreshold;
    }
    if (stiff) {
        err << "warning: beta < " << kStiffBetaThreshold
            << " gives large Bogoliubov factors and stiff dynamics; consider a smaller step or "
               "the dp45 method\n";
    }
}

// ---------------------------------------------------------------------------
// Writers

void write_trajectory(const ExperimentConfig& cfg, const std::string& file,
                      const std::string& command, const std::string& label = {}) {
    const auto& e = cfg.experiment;
    const auto traj = simulate(e);
    const bool literal = e.params.variant == Variant::Literal;
    std::string header;
    if (!traj.thermal) {
        header = "tau,x,p,sx,sy,sz,ax,ay,E,N,snorm";
    } else if (literal) {
        header = "tau,x,p,p_tilde,sx,sy,sz,ax,ay,atx,aty,snorm";
    } else {
        header = "tau,x,p,p_tilde,sx,sy,sz,ax,ay,atx,aty,E,N,snorm";
    }
    CsvWriter csv(path_in(cfg, file), metadata(command, cfg, label), header);
    const ThermalFactors f = thermal_factors(e.params.temperature);
    std::vector<double> row;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto& s = traj.states[i];
        row.assign(1, traj.times[i]);
        row.insert(row.end(), s.begin(), s.end());
        if (!traj.thermal) {
            const auto z = ZeroTState::from_array({s[0], s[1], s[2], s[3], s[4], s[5], s[6]});
            row.push_back(energy_zero_t(z, e.params));
            row.push_back(excitation_zero_t(z));
            row.push_back(spin_norm(z));
        } else {
            const auto t = ThermalState::from_array(
                {s[0], s[1], s[2], s[3], s[4], s[5], s[6], s[7], s[8], s[9]});
            if (!literal) {
                row.push_back(energy_thermal(t, e.params, f));
                row.push_back(excitation_thermal(t, f));
            }
            row.push_back(spin_norm(t));
        }
        csv.row(row);
    }
    csv.close();
}

std::size_t write_section(const ExperimentConfig& cfg, const std::string& file,
                          const std::string& command, std::ostream& err,
                          const std::string& label = {}) {
    const auto sec = poincare(cfg.experiment);
    CsvWriter csv(path_in(cfg, file), metadata(command, cfg, label), "u,v,tau");
    for (std::size_t i = 0; i < sec.count; ++i) {
        const double row[3] = {sec.points[i].first, sec.points[i].second, sec.taus[i]};
        csv.row(row);
    }
    csv.close();
    if (sec.empty) err << "note: no section crossings found for " << file << '\n';
    return sec.count;
}

double write_lyapunov(const ExperimentConfig& cfg, const std::string& file,
                      const std::string& command) {
    const auto est = lyapunov_max(cfg.experiment);
    auto meta = metadata(command, cfg);
    meta.push_back("lambda_max: " + format_double(est.lambda_max));
    CsvWriter csv(path_in(cfg, file), meta, "n,tau,lambda_running");
    for (std::size_t i = 0; i < est.history.size(); ++i) {
        const double row[3] = {static_cast<double>(i + 1), est.times[i], est.history[i]};
        csv.row(row);
    }
    csv.close();
    return est.lambda_max;
}

std::size_t write_flights(const ExperimentConfig& cfg, const std::string& file,
                          const std::string& command, const std::string& label = {}) {
    const auto stats = levy_flights(cfg.experiment);
    auto meta = metadata(command, cfg, label);
    meta.push_back("flight_count: " + std::to_string(stats.count));
    CsvWriter csv(path_in(cfg, file), meta, "tau_start,tau_end,dx");
    for (const auto& f : stats.flights) {
        const double row[3] = {f.tau_start, f.tau_end, f.dx};
        csv.row(row);
    }
    csv.close();
    return stats.count;
}

/// Returns the number of failed cells.
std::size_t write_sweep(const ExperimentConfig& cfg, const std::string& file,
                        const std::string& command, int threads, std::ostream& err,
                        const std::string& label = {}) {
    if (cfg.sweep.axes.empty()) throw ConfigError("sweep.axes", "at least one axis is required");
    const auto result =
        sweep(cfg.sweep.axes, cfg.experiment, cfg.sweep.diagnostic, threads, cfg.sweep.max_cells);
    std::string header;
    for (const auto& axis : result.axes) header += std::string(to_string(axis.kind)) + ",";
    header += "value,status";
    auto meta = metadata(command, cfg, label);
    meta.push_back("diagnostic: " + std::string(to_string(result.diagnostic)));
    CsvWriter csv(path_in(cfg, file), meta, header);
    std::size_t failures = 0;
    for (const auto& cell : result.cells) {
        std::vector<std::string> fields;
        for (double c : cell.coords) fields.push_back(format_double(c));
        fields.push_back(format_double(cell.value));
        fields.push_back(csv_escape(cell.status));
        csv.row(fields);
        if (!cell.ok) {
            ++failures;
            err << "cell";
            for (std::size_t a = 0; a < result.axes.size(); ++a) {
                err << ' ' << to_string(result.axes[a].kind) << '='
                    << format_double(cell.coords[a]);
            }
            err << " failed: " << cell.status << '\n';
        }
    }
    csv.close();
    return failures;
}

// ---------------------------------------------------------------------------
// Figure recipes.  Each recipe is a JSON patch applied under the user's
// configuration, so any recipe value can be overridden with --config.

json figure_base(double p0, double sz) {
    return {{"initial", {{"p", p0}, {"sz", sz}}},
            {"integration", {{"method", "rk4"}, {"step", 1e-3}}}};
}

json beta_json(double beta) {
    if (std::isinf(beta)) return json{{"beta", "inf"}};
    return json{{"beta", beta}};
}

std::string beta_label(double beta) {
    return std::isinf(beta) ? "T0" : "beta" + short_number(beta);
}

/// Sections and flights start near the edge of the trapping region, where
/// both trapped and ballistic motion occur.
constexpr double kSectionMomentum = 25.0;
constexpr double kLyapunovMomentum = 2.0;

ExperimentConfig with_patch(const json& recipe, const json& user, const Options& opts) {
    json doc = recipe;
    doc.merge_patch(user);
    auto cfg = parse_config(doc);
    if (!opts.variant.empty()) {
        const auto v = parse_variant(opts.variant);
        if (!v) throw ConfigError("--variant", "expected literal or consistent");
        cfg.experiment.params.variant = *v;
    }
    if (opts.seed) cfg.experiment.seed = *opts.seed;
    if (!opts.out_dir.empty()) cfg.output_path = opts.out_dir;
    return cfg;
}

int run_figure(int number, const json& user, const Options& opts, std::ostream& out,
               std::ostream& err) {
    const std::string command = "figure " + std::to_string(number);
    auto prepare = [&](const json& recipe) {
        auto cfg = with_patch(recipe, user, opts);
        fs::create_directories(cfg.output_path);
        warn_stiff(cfg, err);
        return cfg;
    };

    switch (number) {
    case 1:
    case 2: {
        const double sz = number == 1 ? -0.863 : -0.8660254;
        const std::vector<double> betas =
            number == 1 ? std::vector<double>{2, 6, 10, 12} : std::vector<double>{kInf, 20};
        for (double beta : betas) {
            json recipe = figure_base(kSectionMomentum, sz);
            recipe["params"] = {{"delta", 1.92}, {"temperature", beta_json(beta)}};
            recipe["section"] = {{"n_points", 500}, {"t_max", 1e5}};
            const auto cfg = prepare(recipe);
            const std::string file =
                "fig" + std::to_string(number) + "_" + beta_label(beta) + "_section.csv";
            const auto n = write_section(cfg, file, command, err, beta_label(beta));
            out << file << ": " << n << " points\n";
        }
        return kExitOk;
    }
    case 3: {
        for (double beta : {kInf, 100.0, 50.0, 5.0}) {
            json recipe = figure_base(kSectionMomentum, -0.8660254);
            recipe["params"] = {{"delta", 1.2}, {"temperature", beta_json(beta)}};
            recipe["integration"]["t_end"] = 2000.0;
            recipe["integration"]["sample_every"] = 0.1;
            const auto cfg = prepare(recipe);
            const std::string stem = "fig3_" + beta_label(beta);
            write_trajectory(cfg, stem + "_trajectory.csv", command, beta_label(beta));
            const auto n = write_flights(cfg, stem + "_flights.csv", command, beta_label(beta));
            out << stem << ": " << n << " flights\n";
        }
        return kExitOk;
    }
    case 4:
    case 5:
    case 6: {
        std::vector<std::pair<std::string, json>> runs;
        json recipe = figure_base(kLyapunovMomentum, 0.0);
        recipe["lyapunov"] = {{"n_renorm", 1000}, {"renorm_interval", 1.0}};
        if (number == 4) {
            recipe["sweep"] = {{"diagnostic", "lyapunov"},
                               {"axes",
                                {{{"name", "beta"}, {"values", {25.0, 1.0, 0.1, 0.01}}},
                                 {{"name", "delta"},
                                  {"linspace", {{"start", -4.0}, {"stop", 4.0}, {"count", 17}}}}}}};
            runs.emplace_back("fig4_sweep.csv", recipe);
        } else if (number == 5) {
            for (double beta : {kInf, 0.5}) {
                json r = recipe;
                r["params"] = {{"temperature", beta_json(beta)}};
                r["sweep"] = {
                    {"diagnostic", "lyapunov"},
                    {"axes",
                     {{{"name", "delta"},
                       {"linspace", {{"start", -4.0}, {"stop", 4.0}, {"count", 10}}}},
                      {{"name", "p0"},
                       {"linspace", {{"start", 0.0}, {"stop", 45.0}, {"count", 10}}}}}}};
                runs.emplace_back("fig5_" + beta_label(beta) + "_sweep.csv", r);
            }
        } else {
            recipe["sweep"] = {
                {"diagnostic", "lyapunov"},
                {"axes",
                 {{{"name", "delta"},
                   {"linspace", {{"start", -4.0}, {"stop", 4.0}, {"count", 10}}}},
                  {{"name", "beta"},
                   {"logspace", {{"start", 0.01}, {"stop", 25.0}, {"count", 10}}}}}}};
            runs.emplace_back("fig6_sweep.csv", recipe);
        }
        std::size_t failures = 0;
        for (const auto& [file, r] : runs) {
            const auto cfg = prepare(r);
            failures += write_sweep(cfg, file, command, opts.threads, err);
            out << file << ": written\n";
        }
        return failures ? kExitNumericalFailure : kExitOk;
    }
    default:
        err << "figure must be one of 1..6\n";
        return kExitInvalidConfig;
    }
}

json read_user_config(const Options& opts) {
    if (opts.config_path.empty()) return json::object();
    std::ifstream in(opts.config_path);
    if (!in) throw ConfigError("--config", "cannot open '" + opts.config_path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("--config", std::string("JSON syntax error: ") + e.what());
    }
}

int dispatch(const std::string& command, const Options& opts, std::ostream& out,
             std::ostream& err) {
    const json user = read_user_config(opts);
    if (command == "figure") return run_figure(opts.figure, user, opts, out, err);

    auto cfg = with_patch(json::object(), user, opts);
    fs::create_directories(cfg.output_path);
    warn_stiff(cfg, err);
    write_config_echo(cfg);

    if (command == "simulate") {
        write_trajectory(cfg, "trajectory.csv", command);
        out << "trajectory.csv written\n";
    } else if (command == "poincare") {
        const auto n = write_section(cfg, "section.csv", command, err);
        out << "section points: " << n << '\n';
    } else if (command == "lyapunov") {
        const double lambda = write_lyapunov(cfg, "lyapunov.csv", command);
        out << "lambda_max: " << format_double(lambda) << '\n';
    } else if (command == "flights") {
        const auto n = write_flights(cfg, "flights.csv", command);
        out << "flights: " << n << '\n';
    } else if (command == "sweep") {
        const auto failures = write_sweep(cfg, "sweep.csv", command, opts.threads, err);
        out << "sweep.csv written\n";
        if (failures) return kExitNumericalFailure;
    }
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Semiclassical Jaynes-Cummings dynamics at finite temperature"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opts;
    opts.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    app.add_option("--config", opts.config_path, "Experiment configuration (JSON)");
    app.add_option("--variant", opts.variant, "Thermal flow variant")
        ->check(CLI::IsMember({"literal", "consistent"}));
    app.add_option("--seed", opts.seed, "Random seed for perturbations");
    app.add_option("--out", opts.out_dir, "Output directory");
    app.add_option("--threads", opts.threads, "Worker threads for sweeps")
        ->check(CLI::PositiveNumber);

    app.add_subcommand("simulate", "Integrate one trajectory");
    app.add_subcommand("poincare", "Poincare surface of section");
    app.add_subcommand("lyapunov", "Maximum Lyapunov exponent");
    app.add_subcommand("flights", "Levy-flight statistics");
    app.add_subcommand("sweep", "Diagnostic over a parameter grid");
    auto* figure = app.add_subcommand("figure", "Canned figure recipe");
    figure->add_option("number", opts.figure, "Figure number 1-6")
        ->required()
        ->check(CLI::Range(1, 6));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return dispatch(command, opts, out, err);
    } catch (const ConfigError& e) {
        err << "invalid configuration: " << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const InvalidArgument& e) {
        err << "invalid configuration: " << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const InvalidTemperature& e) {
        err << "invalid configuration: " << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const IntegrationDiverged& e) {
        err << "numerical failure: " << e.what() << " (last finite tau=" << e.last_tau() << ")\n";
        return kExitNumericalFailure;
    } catch (const StiffnessError& e) {
        err << "numerical failure: " << e.what() << " (tau=" << e.tau() << ")\n";
        return kExitNumericalFailure;
    } catch (const RenormalizationError& e) {
        err << "numerical failure: " << e.what() << " (tau=" << e.tau()
            << ", separation=" << e.separation() << ")\n";
        return kExitNumericalFailure;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumericalFailure;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidConfig;
    }
}

} // namespace cqed
