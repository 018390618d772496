#include "clmc/chainladder.hpp"

#include <algorithm>

namespace clmc {

namespace {

// Sum of C_jk over the rows that have development year k+1 observed (j <= I-2-k, 0-based).
double column_sum(const CumulativeTriangle& tri, std::size_t k)
{
    const std::size_t n = tri.years();
    double s = 0.0;
    for (std::size_t j = 0; j + k + 1 < n; ++j)
        s += tri.at(j, k);
    return s;
}

void check_sizes(const CumulativeTriangle& tri, std::span<const double> factors)
{
    if (factors.size() + 1 != tri.years())
        throw std::invalid_argument("expected I-1 development factors");
}

} // namespace

std::vector<double> dev_factors(const CumulativeTriangle& tri)
{
    const std::size_t n = tri.years();
    std::vector<double> f(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i + k + 1 < n; ++i) {
            num += tri.at(i, k + 1);
            den += tri.at(i, k);
        }
        if (!(den > 0.0))
            throw DegenerateTriangle(k + 1, "development year " + std::to_string(k + 1) +
                                                " has an empty column sum");
        f[k] = num / den;
    }
    return f;
}

Forecast forecast(const CumulativeTriangle& tri, std::span<const double> factors)
{
    check_sizes(tri, factors);
    const std::size_t n = tri.years();
    Forecast fc;
    fc.years = n;
    fc.projected.assign(n * n, 0.0);
    fc.reserves.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t known = n - i;
        for (std::size_t k = 0; k < known; ++k)
            fc.projected[i * n + k] = tri.at(i, k);
        for (std::size_t k = known; k < n; ++k)
            fc.projected[i * n + k] = fc.projected[i * n + k - 1] * factors[k - 1];
        fc.reserves[i] = fc.projected[i * n + n - 1] - tri.latest(i);
        fc.total_reserve += fc.reserves[i];
    }
    return fc;
}

double mack_tail_variance(double before_last, double last)
{
    if (!(before_last > 0.0) || !(last > 0.0))
        return 0.0;
    return std::min(last * last / before_last, std::min(before_last, last));
}

std::vector<double> sigma_sq(const CumulativeTriangle& tri, std::span<const double> factors)
{
    check_sizes(tri, factors);
    const std::size_t n = tri.years();
    std::vector<double> s(n - 1, 0.0);
    // Regular estimator for k = 0..n-3 (0-based): n-1-k ratios, n-2-k degrees of freedom.
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j + k + 1 < n; ++j) {
            const double c = tri.at(j, k);
            if (!(c > 0.0))
                throw DegenerateTriangle(k + 1, "zero cumulative amount in occurrence year " +
                                                    std::to_string(j + 1) + ", development year " +
                                                    std::to_string(k + 1));
            const double dev = tri.at(j, k + 1) / c - factors[k];
            acc += c * dev * dev;
        }
        s[k] = acc / static_cast<double>(n - k - 2);
    }
    if (n >= 4)
        s[n - 2] = mack_tail_variance(s[n - 4], s[n - 3]);
    return s;
}

std::vector<double> mse_per_year(const CumulativeTriangle& tri, std::span<const double> factors,
                                 std::span<const double> sig, const Forecast& fc)
{
    check_sizes(tri, factors);
    const std::size_t n = tri.years();
    if (sig.size() + 1 != n || fc.years != n)
        throw std::invalid_argument("mse_per_year: inconsistent input sizes");

    std::vector<double> colsum(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k)
        colsum[k] = column_sum(tri, k);

    std::vector<double> mse(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const double ult = fc.ultimate(i);
        // A row with nothing observed forecasts zero and has zero error (limit of the formula).
        if (!(ult > 0.0))
            continue;
        double acc = 0.0;
        for (std::size_t k = n - 1 - i; k + 1 < n; ++k) {
            if (!(colsum[k] > 0.0))
                throw DegenerateTriangle(k + 1, "development year " + std::to_string(k + 1) +
                                                    " has an empty column sum");
            acc += sig[k] / (factors[k] * factors[k]) * (1.0 / fc.at(i, k) + 1.0 / colsum[k]);
        }
        mse[i] = ult * ult * acc;
    }
    return mse;
}

double mse_total(const CumulativeTriangle& tri, std::span<const double> factors,
                 std::span<const double> sig, const Forecast& fc, std::span<const double> per_year)
{
    check_sizes(tri, factors);
    const std::size_t n = tri.years();
    if (sig.size() + 1 != n || fc.years != n || per_year.size() != n)
        throw std::invalid_argument("mse_total: inconsistent input sizes");

    double total = 0.0;
    for (double m : per_year)
        total += m;

    // Covariance between occurrence years i < j, i = 1..n-2 (0-based).
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double later = 0.0;
        for (std::size_t j = i + 1; j < n; ++j)
            later += fc.ultimate(j);
        double acc = 0.0;
        for (std::size_t k = n - 1 - i; k + 1 < n; ++k) {
            const double cs = column_sum(tri, k);
            if (!(cs > 0.0))
                throw DegenerateTriangle(k + 1, "development year " + std::to_string(k + 1) +
                                                    " has an empty column sum");
            acc += 2.0 * sig[k] / (factors[k] * factors[k]) / cs;
        }
        total += fc.ultimate(i) * later * acc;
    }
    return total;
}

ClEstimate estimate(const CumulativeTriangle& tri)
{
    ClEstimate est;
    est.factors = dev_factors(tri);
    est.forecast = forecast(tri, est.factors);
    est.sigma_sq = sigma_sq(tri, est.factors);
    est.mse_per_year = mse_per_year(tri, est.factors, est.sigma_sq, est.forecast);
    est.mse_total = mse_total(tri, est.factors, est.sigma_sq, est.forecast, est.mse_per_year);
    return est;
}

} // namespace clmc
