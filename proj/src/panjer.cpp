#include "clmc/panjer.hpp"

#include <algorithm>
#include <cmath>

namespace clmc {

double DiscretePmf::total() const
{
    double s = 0.0;
    for (double m : masses)
        s += m;
    return s;
}

double DiscretePmf::mean() const
{
    double s = 0.0;
    for (std::size_t j = 0; j < masses.size(); ++j)
        s += static_cast<double>(j) * step * masses[j];
    return s;
}

std::vector<double> DiscretePmf::cdf() const
{
    std::vector<double> out(masses.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < masses.size(); ++j) {
        acc += masses[j];
        out[j] = std::min(acc, 1.0);
    }
    return out;
}

DiscretePmf discretize_severity(const SeverityDistribution& dist, double step, std::size_t last_index)
{
    if (!(step > 0.0) || !std::isfinite(step))
        throw std::invalid_argument("discretize_severity: step must be positive");
    DiscretePmf pmf;
    pmf.step = step;
    pmf.masses.resize(last_index + 1);
    // Differences of the survival function keep precision in the tail.
    double upper_survival = dist.survival(0.5 * step);
    pmf.masses[0] = 1.0 - upper_survival;
    for (std::size_t j = 1; j <= last_index; ++j) {
        const double s = dist.survival((static_cast<double>(j) + 0.5) * step);
        pmf.masses[j] = std::max(0.0, upper_survival - s);
        upper_survival = s;
    }
    pmf.truncation = upper_survival;
    return pmf;
}

DiscretePmf panjer_compound_poisson(double lambda, const DiscretePmf& severity,
                                    std::optional<std::size_t> points)
{
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("panjer_compound_poisson: lambda must be positive");
    if (severity.masses.empty())
        throw std::invalid_argument("panjer_compound_poisson: empty severity grid");
    const std::size_t n = points.value_or(severity.size());
    if (n == 0)
        throw std::invalid_argument("panjer_compound_poisson: need at least one output point");

    DiscretePmf out;
    out.step = severity.step;
    out.masses.assign(n, 0.0);
    out.masses[0] = std::exp(-lambda * (1.0 - severity.masses[0]));
    if (!(out.masses[0] > 0.0))
        throw PanjerUnderflow("panjer_compound_poisson: P(S = 0) underflows; use a coarser step, a "
                              "smaller lambda or extended precision");

    // weights[j] = lambda * j * f_j; the recursion only visits j >= first nonzero.
    const std::size_t sev_last = severity.size() - 1;
    std::vector<double> weights(severity.size(), 0.0);
    std::size_t first = 0;
    for (std::size_t j = 1; j <= sev_last; ++j) {
        weights[j] = lambda * static_cast<double>(j) * severity.masses[j];
        if (first == 0 && weights[j] > 0.0)
            first = j;
    }
    if (first == 0) {
        out.truncation = std::max(0.0, 1.0 - out.total());
        return out;
    }

    double* g = out.masses.data();
    for (std::size_t k = first; k < n; ++k) {
        const std::size_t hi = std::min(k, sev_last);
        double acc = 0.0;
        for (std::size_t j = first; j <= hi; ++j)
            acc += weights[j] * g[k - j];
        g[k] = acc / static_cast<double>(k);
    }
    out.truncation = std::max(0.0, 1.0 - out.total());
    return out;
}

std::vector<double> empirical_cdf_on_grid(double step, std::size_t points, std::span<const double> samples)
{
    if (samples.empty())
        throw std::invalid_argument("empirical_cdf_on_grid: no samples");
    std::vector<double> counts(points, 0.0);
    for (double x : samples) {
        const double idx = std::floor(x / step + 0.5);
        if (idx < 0.0)
            counts.front() += 1.0;
        else if (idx < static_cast<double>(points))
            counts[static_cast<std::size_t>(idx)] += 1.0;
    }
    const double n = static_cast<double>(samples.size());
    double acc = 0.0;
    for (double& c : counts) {
        acc += c;
        c = acc / n;
    }
    return counts;
}

double max_cdf_deviation(const DiscretePmf& analytic, std::span<const double> samples)
{
    const auto exact = analytic.cdf();
    const auto empirical = empirical_cdf_on_grid(analytic.step, exact.size(), samples);
    double worst = 0.0;
    for (std::size_t k = 0; k < exact.size(); ++k)
        worst = std::max(worst, std::abs(exact[k] - empirical[k]));
    return worst;
}

} // namespace clmc
