#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "clmc/triangle.hpp"

namespace clmc {

/// The triangle cannot be processed by chain ladder (empty column sum or a zero
/// cumulative amount where a development ratio is needed).
class DegenerateTriangle : public std::runtime_error {
public:
    DegenerateTriangle(std::size_t development_year, const std::string& what)
        : std::runtime_error(what), development_year_(development_year)
    {
    }

    /// 1-based development year k whose statistics could not be formed.
    std::size_t development_year() const noexcept { return development_year_; }

private:
    std::size_t development_year_;
};

/// Cumulative triangle completed with chain ladder forecasts.
struct Forecast {
    std::size_t years = 0;
    std::vector<double> projected; ///< row-major I x I; known cells copied, lower cells forecast
    std::vector<double> reserves;  ///< size I; entry 0 is always 0
    double total_reserve = 0.0;

    double at(std::size_t i, std::size_t k) const { return projected[i * years + k]; }
    double ultimate(std::size_t i) const { return at(i, years - 1); }
};

struct ClEstimate {
    std::vector<double> factors;      ///< f_k, k = 1..I-1 (stored 0-based)
    Forecast forecast;
    std::vector<double> sigma_sq;     ///< sigma_k^2, k = 1..I-1
    std::vector<double> mse_per_year; ///< size I; entry 0 is always 0
    double mse_total = 0.0;
};

/// Column-sum development factors. Throws DegenerateTriangle on an empty column.
std::vector<double> dev_factors(const CumulativeTriangle& tri);

Forecast forecast(const CumulativeTriangle& tri, std::span<const double> factors);

/// Mack's tail extrapolation for the last development year, where the variance
/// estimator has no degrees of freedom:
///   min(last^2 / before_last, min(before_last, last)),
/// and 0 if either input is not positive.
double mack_tail_variance(double before_last, double last);

/// Variance parameters sigma_k^2. The last entry comes from mack_tail_variance
/// (0 when fewer than two regular estimates exist).
std::vector<double> sigma_sq(const CumulativeTriangle& tri, std::span<const double> factors);

std::vector<double> mse_per_year(const CumulativeTriangle& tri, std::span<const double> factors,
                                 std::span<const double> sigma_sq, const Forecast& fc);

/// Per-year m.s.e. plus the covariance term between occurrence years.
double mse_total(const CumulativeTriangle& tri, std::span<const double> factors,
                 std::span<const double> sigma_sq, const Forecast& fc,
                 std::span<const double> mse_per_year);

/// Runs the whole estimator chain.
ClEstimate estimate(const CumulativeTriangle& tri);

} // namespace clmc
