#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "clmc/simulate.hpp"

namespace clmc {

/// Union of the percentile levels plotted for the claim-number and aggregate models.
inline const std::vector<double> default_levels{0.05, 0.10, 0.20, 0.50, 0.80, 0.90, 0.95};

double mean(std::span<const double> xs);
/// Sample standard deviation (n-1 normalization); NaN for fewer than two values.
double sample_stdev(std::span<const double> xs);

/// Type-1 empirical quantile: the ceil(p*n)-th order statistic.
double empirical_quantile(std::span<const double> samples, double p);
/// Same, for input already sorted ascending.
double empirical_quantile_sorted(std::span<const double> sorted, double p);

/// Replicated delta quantiles and mean delta.
struct PercentileReport {
    std::vector<double> levels;
    std::vector<std::vector<double>> per_replication; ///< [replication][level]
    std::vector<double> q_mean;
    std::vector<double> q_stdev;
    std::vector<double> e_delta_per_replication;
    double e_delta_mean = 0.0;
    double e_delta_stdev = 0.0;

    std::size_t replications() const noexcept { return per_replication.size(); }
    /// Index of `level` in `levels` (matched to 1e-12), if present.
    std::optional<std::size_t> level_index(double level) const;
};

std::vector<double> deltas(std::span<const ScenarioResult> batch);

PercentileReport aggregate_replications(const std::vector<std::vector<double>>& batches,
                                        std::span<const double> levels = default_levels);

/// Multiple c of sqrt(m.s.e.) with P(delta < -c) = risk, i.e. -q_risk(delta).
/// Throws std::out_of_range if `risk` is not one of the report's levels.
double safety_loading(const PercentileReport& report, double risk);

struct PercentileDiff {
    std::vector<double> levels;
    std::vector<double> diff;    ///< q_a - q_b (cross-replication means)
    std::vector<double> stdev_a;
    std::vector<double> stdev_b;
};

/// Level-wise difference of two reports; by convention a = exponential, b = Pareto.
PercentileDiff percentile_diff(const PercentileReport& a, const PercentileReport& b);

/// mean(delta) against mean(D) * mean(W) + cov(D, W), D = r_cl - r_real, W = 1/sqrt(mse),
/// with 1/n covariance.
struct BiasDecomposition {
    double lhs = 0.0;
    double product_term = 0.0;
    double covariance_term = 0.0;

    double rhs() const noexcept { return product_term + covariance_term; }
};

BiasDecomposition relative_bias_decomposition(std::span<const ScenarioResult> batch);

} // namespace clmc
