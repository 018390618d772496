// Command-line front end: experiment sweeps, Panjer validation, scenario dumps.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "clmc/experiment.hpp"
#include "clmc/format.hpp"
#include "clmc/rng.hpp"
#include "clmc/simulate.hpp"
#include "clmc/triangle.hpp"

namespace fs = std::filesystem;

namespace {

int run_command(const fs::path& config, const clmc::RunOptions& options)
{
    const clmc::ExperimentSpec spec = clmc::load_experiment(config);
    std::cerr << spec.name << ": " << spec.points.size() << " configuration(s)\n";
    const clmc::ExperimentResult result = clmc::run_experiment(spec, options);
    for (const auto& c : result.configs)
        std::cerr << "  [" << c.id << "] " << c.label << "  E(delta)=" << clmc::format_number(c.report.e_delta_mean)
                  << "  Delta=" << clmc::format_number(c.delta_metric) << "  resamples=" << c.resample_total
                  << '\n';
    return 0;
}

int panjer_command(const fs::path& config, std::optional<std::uint64_t> seed, const fs::path& out)
{
    clmc::PanjerCheckSpec spec = clmc::load_panjer_check(config);
    if (seed)
        spec.seed = *seed;
    const clmc::PanjerCheckReport report = clmc::run_panjer_check(spec);
    clmc::write_panjer_check(spec, report, out);
    std::cout << "max |Panjer CDF - mean ECDF| = " << clmc::format_number(report.max_deviation) << '\n'
              << "inside mean +- 3 sd band: " << report.inside_band << " / " << report.band_points << '\n'
              << "truncated mass: severity " << clmc::format_number(report.severity_truncation)
              << ", aggregate " << clmc::format_number(report.aggregate.truncation) << '\n';
    return 0;
}

int dump_command(const fs::path& config, std::optional<std::uint64_t> seed, std::size_t index,
                 std::size_t replication, std::size_t scenario, const fs::path& out)
{
    const clmc::ExperimentSpec spec = clmc::load_experiment(config);
    if (index >= spec.points.size())
        throw std::out_of_range("config index " + std::to_string(index) + " out of range");
    clmc::ScenarioConfig cfg = spec.points[index].config;
    cfg.seed = clmc::derive_seed(seed.value_or(spec.seed), index);
    clmc::Rng rng = clmc::scenario_stream(cfg, replication, scenario);
    const clmc::RunOffTable table = clmc::simulate_rectangle(cfg, rng);
    fs::create_directories(out);
    std::ofstream t(out / "table.csv");
    clmc::write_csv(t, table);
    std::ofstream c(out / "triangle.csv");
    clmc::write_csv(c, clmc::cumulate_upper(table));
    std::cout << "wrote " << (out / "table.csv").string() << " and " << (out / "triangle.csv").string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Monte Carlo backtesting of chain ladder reserves"};
    app.require_subcommand(1);

    std::string config;
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 1;
    std::string out;

    auto* run = app.add_subcommand("run", "Run an experiment sweep");
    run->add_option("config", config, "Experiment file (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Override the global seed");
    run->add_option("--jobs", jobs, "Worker threads (results do not depend on this)")->check(CLI::PositiveNumber);
    run->add_option("--out", out, "Output directory");

    auto* panjer = app.add_subcommand("panjer-check", "Compare Panjer recursion with Monte Carlo");
    panjer->add_option("config", config, "Panjer check file (JSON)")->required()->check(CLI::ExistingFile);
    panjer->add_option("--seed", seed, "Override the seed");
    panjer->add_option("--out", out, "Output directory");

    std::size_t index = 0;
    std::size_t replication = 0;
    std::size_t scenario = 0;
    auto* dump = app.add_subcommand("dump-scenario", "Write one simulated run-off table and its triangle as CSV");
    dump->add_option("config", config, "Experiment file (JSON)")->required()->check(CLI::ExistingFile);
    dump->add_option("--config-index", index, "Sweep point index");
    dump->add_option("--replication", replication, "Replication index");
    dump->add_option("--scenario", scenario, "Scenario index");
    dump->add_option("--seed", seed, "Override the global seed");
    dump->add_option("--out", out, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            clmc::RunOptions options;
            options.seed = seed;
            options.jobs = jobs;
            if (!out.empty())
                options.output_dir = out;
            return run_command(config, options);
        }
        if (panjer->parsed())
            return panjer_command(config, seed, out.empty() ? fs::path("out/panjer") : fs::path(out));
        if (dump->parsed())
            return dump_command(config, seed, index, replication, scenario,
                                out.empty() ? fs::path("out/scenario") : fs::path(out));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
