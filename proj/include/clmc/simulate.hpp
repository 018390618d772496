#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "clmc/distributions.hpp"
#include "clmc/rng.hpp"
#include "clmc/triangle.hpp"

namespace clmc {

struct ScenarioConfig {
    std::size_t years;
    CountDistribution count;
    RunOffPattern pattern;
    SeverityDistribution severity;
    std::size_t n_scenarios = 1000;
    std::size_t n_replications = 10;
    std::uint64_t seed = 0;
    std::size_t max_resamples_per_scenario = 100;

    /// Throws std::invalid_argument when the fields are inconsistent.
    void validate() const;
};

/// Outcome of one backtested run-off scenario.
struct ScenarioResult {
    double r_cl = 0.0;   ///< chain ladder total reserve
    double r_real = 0.0; ///< simulated outstanding amount
    double mse = 0.0;    ///< Mack m.s.e. of the total reserve
    double delta = 0.0;  ///< (r_cl - r_real) / sqrt(mse)
    std::size_t resample_count = 0;
};

/// Too many consecutive degenerate triangles for one scenario.
class ScenarioExhausted : public std::runtime_error {
public:
    explicit ScenarioExhausted(const std::string& what,
                               std::optional<std::size_t> scenario = std::nullopt)
        : std::runtime_error(what), scenario_(scenario)
    {
    }

    std::optional<std::size_t> scenario() const noexcept { return scenario_; }

private:
    std::optional<std::size_t> scenario_;
};

/// Full rectangle: ultimate counts per year, multinomial split over development
/// years, aggregate severity per cell.
RunOffTable simulate_rectangle(const ScenarioConfig& cfg, Rng& rng);

/// Simulates until chain ladder yields a usable (non-degenerate, mse > 0) estimate.
ScenarioResult run_scenario(const ScenarioConfig& cfg, Rng& rng);

/// Stream of scenario `scenario` in replication `replication`.
Rng scenario_stream(const ScenarioConfig& cfg, std::size_t replication, std::size_t scenario);

/// n_scenarios results in scenario order. Each scenario draws from its own stream,
/// so the output does not depend on `jobs`.
std::vector<ScenarioResult> run_batch(const ScenarioConfig& cfg, std::size_t replication,
                                      std::size_t jobs = 1);

/// All replications, outer index = replication.
std::vector<std::vector<ScenarioResult>> run_replications(const ScenarioConfig& cfg,
                                                          std::size_t jobs = 1);

/// Expected number of claims in the known triangle: E(N) * sum_j (I+1-j) pi_j.
double expected_triangle_claims(const ScenarioConfig& cfg);

} // namespace clmc
