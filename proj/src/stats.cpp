#include "clmc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "clmc/format.hpp"

namespace clmc {

double mean(std::span<const double> xs)
{
    if (xs.empty())
        throw std::invalid_argument("mean of an empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_stdev(std::span<const double> xs)
{
    if (xs.size() < 2)
        return std::numeric_limits<double>::quiet_NaN();
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs)
        ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double empirical_quantile_sorted(std::span<const double> sorted, double p)
{
    if (sorted.empty())
        throw std::invalid_argument("empirical_quantile: empty sample");
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("empirical_quantile: p must lie in (0, 1)");
    const double n = static_cast<double>(sorted.size());
    // Shave a relative 1e-12 so that p*n landing a rounding error above an integer still hits it.
    auto k = static_cast<std::size_t>(std::ceil(p * n * (1.0 - 1e-12)));
    k = std::clamp<std::size_t>(k, 1, sorted.size());
    return sorted[k - 1];
}

double empirical_quantile(std::span<const double> samples, double p)
{
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    return empirical_quantile_sorted(sorted, p);
}

std::optional<std::size_t> PercentileReport::level_index(double level) const
{
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (std::abs(levels[i] - level) <= 1e-12)
            return i;
    return std::nullopt;
}

std::vector<double> deltas(std::span<const ScenarioResult> batch)
{
    std::vector<double> out;
    out.reserve(batch.size());
    for (const auto& r : batch)
        out.push_back(r.delta);
    return out;
}

PercentileReport aggregate_replications(const std::vector<std::vector<double>>& batches,
                                        std::span<const double> levels)
{
    if (batches.empty())
        throw std::invalid_argument("aggregate_replications: need at least one replication");
    if (levels.empty())
        throw std::invalid_argument("aggregate_replications: need at least one level");
    if (!std::is_sorted(levels.begin(), levels.end()))
        throw std::invalid_argument("aggregate_replications: levels must be ascending");

    PercentileReport rep;
    rep.levels.assign(levels.begin(), levels.end());
    for (const auto& batch : batches) {
        std::vector<double> sorted(batch.begin(), batch.end());
        std::sort(sorted.begin(), sorted.end());
        std::vector<double> q;
        q.reserve(levels.size());
        for (double p : levels)
            q.push_back(empirical_quantile_sorted(sorted, p));
        rep.per_replication.push_back(std::move(q));
        rep.e_delta_per_replication.push_back(mean(batch));
    }

    std::vector<double> column(batches.size());
    for (std::size_t l = 0; l < levels.size(); ++l) {
        for (std::size_t r = 0; r < batches.size(); ++r)
            column[r] = rep.per_replication[r][l];
        rep.q_mean.push_back(mean(column));
        rep.q_stdev.push_back(sample_stdev(column));
    }
    rep.e_delta_mean = mean(rep.e_delta_per_replication);
    rep.e_delta_stdev = sample_stdev(rep.e_delta_per_replication);
    return rep;
}

double safety_loading(const PercentileReport& report, double risk)
{
    const auto idx = report.level_index(risk);
    if (!idx)
        throw std::out_of_range("safety_loading: level " + format_number(risk) + " not computed");
    return -report.q_mean[*idx];
}

PercentileDiff percentile_diff(const PercentileReport& a, const PercentileReport& b)
{
    if (a.levels.size() != b.levels.size())
        throw std::invalid_argument("percentile_diff: level sets differ");
    for (std::size_t i = 0; i < a.levels.size(); ++i)
        if (std::abs(a.levels[i] - b.levels[i]) > 1e-12)
            throw std::invalid_argument("percentile_diff: level sets differ");

    PercentileDiff d;
    d.levels = a.levels;
    for (std::size_t i = 0; i < a.levels.size(); ++i) {
        d.diff.push_back(a.q_mean[i] - b.q_mean[i]);
        d.stdev_a.push_back(a.q_stdev[i]);
        d.stdev_b.push_back(b.q_stdev[i]);
    }
    return d;
}

BiasDecomposition relative_bias_decomposition(std::span<const ScenarioResult> batch)
{
    if (batch.empty())
        throw std::invalid_argument("relative_bias_decomposition: empty batch");
    const double n = static_cast<double>(batch.size());
    double mean_d = 0.0;
    double mean_w = 0.0;
    double lhs = 0.0;
    for (const auto& r : batch) {
        if (!(r.mse > 0.0))
            throw std::invalid_argument("relative_bias_decomposition: mse must be positive");
        const double d = r.r_cl - r.r_real;
        const double w = 1.0 / std::sqrt(r.mse);
        mean_d += d;
        mean_w += w;
        lhs += r.delta;
    }
    mean_d /= n;
    mean_w /= n;
    double cov = 0.0;
    for (const auto& r : batch)
        cov += (r.r_cl - r.r_real - mean_d) * (1.0 / std::sqrt(r.mse) - mean_w);

    BiasDecomposition out;
    out.lhs = lhs / n;
    out.product_term = mean_d * mean_w;
    out.covariance_term = cov / n;
    return out;
}

} // namespace clmc
