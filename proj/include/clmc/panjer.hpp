#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "clmc/distributions.hpp"

namespace clmc {

/// Probability masses on the lattice {0, h, 2h, ...}.
struct DiscretePmf {
    double step = 1.0;
    std::vector<double> masses;
    double truncation = 0.0; ///< probability mass beyond the last lattice point

    std::size_t size() const noexcept { return masses.size(); }
    double total() const;
    double mean() const;
    std::vector<double> cdf() const;
};

/// The starting value exp(-lambda (1 - f_0)) is not representable in double precision.
class PanjerUnderflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rounding discretization: f_0 = F(h/2), f_j = F((j+1/2)h) - F((j-1/2)h) for j = 1..J.
DiscretePmf discretize_severity(const SeverityDistribution& dist, double step, std::size_t last_index);

/// Compound Poisson aggregate on the severity lattice:
///   g_0 = exp(-lambda (1 - f_0)),  g_k = lambda/k * sum_{j=1..k} j f_j g_{k-j}.
/// `points` is the length of the output grid (default: the severity grid length).
DiscretePmf panjer_compound_poisson(double lambda, const DiscretePmf& severity,
                                    std::optional<std::size_t> points = std::nullopt);

/// Fraction of samples at or below each lattice point, after rounding samples to the nearest point.
std::vector<double> empirical_cdf_on_grid(double step, std::size_t points, std::span<const double> samples);

/// sup_k |analytic CDF(k h) - empirical CDF(k h)|.
double max_cdf_deviation(const DiscretePmf& analytic, std::span<const double> samples);

} // namespace clmc
