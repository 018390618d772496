#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "clmc/distributions.hpp"
#include "clmc/panjer.hpp"
#include "clmc/simulate.hpp"
#include "clmc/stats.hpp"

namespace clmc {

/// Malformed or inconsistent experiment file.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One point of a parameter sweep together with a readable label.
struct SweepPoint {
    ScenarioConfig config;
    std::string label;
    std::string pattern_text;
    std::string count_text;
    std::string severity_text;
};

/// Parsed experiment file. `points` is the expanded cross product of every sweep block.
struct ExperimentSpec {
    std::string name;
    std::uint64_t seed = 0;
    std::vector<double> levels = default_levels;
    std::vector<std::string> formats{"csv"};
    bool dump_deltas = false;
    std::optional<std::filesystem::path> output_dir;
    std::vector<SweepPoint> points;
};

struct RunOptions {
    std::optional<std::uint64_t> seed; ///< overrides the file's global seed
    std::size_t jobs = 1;
    std::optional<std::filesystem::path> output_dir;
    bool write_files = true;
};

struct ConfigOutcome {
    std::size_t id = 0;
    std::string label;
    std::uint64_t seed = 0;
    std::string config_hash;
    double delta_metric = 0.0;
    std::size_t resample_total = 0;
    std::vector<std::size_t> resamples_per_replication;
    double seconds = 0.0; ///< wall time of the simulation; never written to data files
    PercentileReport report;
    std::vector<std::vector<ScenarioResult>> results;
};

struct ExperimentResult {
    std::string name;
    std::uint64_t seed = 0;
    std::vector<ConfigOutcome> configs;
};

/// Unknown keys anywhere in the document are rejected.
ExperimentSpec parse_experiment(const nlohmann::json& doc);
ExperimentSpec load_experiment(const std::filesystem::path& file);

/// Runs every sweep point; per-config seeds are derived from the global seed and the
/// point index. With write_files, emits percentiles.csv, bias.csv (csv format),
/// results.json (json format) and manifest.json into the output directory.
ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

/// Parses a `{"type": ...}` object.
SeverityDistribution parse_severity(const nlohmann::json& node);
CountDistribution parse_count(const nlohmann::json& node);
RunOffPattern parse_pattern(const nlohmann::json& node, std::size_t years);

// ---------------------------------------------------------------------------
// Panjer validation
// ---------------------------------------------------------------------------

struct PanjerCheckSpec {
    double lambda = 12.0;
    SeverityDistribution severity = SeverityDistribution(Pareto{4.0, 1000.0});
    double step = 5.0;
    std::size_t points = 20000; ///< grid length for both the severity and the aggregate
    std::size_t n_batches = 10;
    std::size_t n_samples = 1000;
    std::uint64_t seed = 0;
    std::size_t csv_stride = 1;
};

struct PanjerCheckReport {
    DiscretePmf aggregate;
    double severity_truncation = 0.0;
    std::vector<double> analytic_cdf;
    std::vector<std::vector<double>> batch_ecdf; ///< [batch][grid point]
    std::vector<double> ecdf_mean;
    std::vector<double> ecdf_stdev;
    double max_deviation = 0.0;     ///< sup |analytic - mean ECDF|
    std::size_t band_points = 0;    ///< grid points with positive cross-batch stdev
    std::size_t inside_band = 0;    ///< of those, analytic within mean +- 3 stdev
    double band_fraction() const
    {
        return band_points ? static_cast<double>(inside_band) / static_cast<double>(band_points) : 1.0;
    }
};

PanjerCheckSpec parse_panjer_check(const nlohmann::json& doc);
PanjerCheckSpec load_panjer_check(const std::filesystem::path& file);

/// Aggregate samples S = X_1 + ... + X_N, N ~ Poisson(lambda), one stream per batch.
std::vector<double> sample_compound_poisson(double lambda, const SeverityDistribution& severity,
                                            std::size_t n, Rng& rng);

PanjerCheckReport run_panjer_check(const PanjerCheckSpec& spec);

/// Writes panjer_grid.csv and panjer_summary.json into `dir`.
void write_panjer_check(const PanjerCheckSpec& spec, const PanjerCheckReport& report,
                        const std::filesystem::path& dir);

} // namespace clmc
