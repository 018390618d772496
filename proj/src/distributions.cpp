#include "clmc/distributions.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "clmc/format.hpp"

namespace clmc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

bool is_probability(double p) { return std::isfinite(p) && p > 0.0 && p < 1.0; }

// Nudge a sample that rounded onto the cut-off back into the open support (x > r).
double above(double x, double r)
{
    return x > r ? x : std::nextafter(r, std::numeric_limits<double>::infinity());
}

} // namespace

// ---------------------------------------------------------------------------
// CountDistribution
// ---------------------------------------------------------------------------

CountDistribution::CountDistribution(Poisson params) : params_(params)
{
    if (!(std::isfinite(params.lambda) && params.lambda > 0.0))
        throw std::invalid_argument("Poisson: lambda must be positive");
}

CountDistribution::CountDistribution(Binomial params) : params_(params)
{
    if (params.trials < 1)
        throw std::invalid_argument("Binomial: trials must be >= 1");
    if (!is_probability(params.p))
        throw std::invalid_argument("Binomial: p must lie in (0, 1)");
}

CountDistribution::CountDistribution(NegativeBinomial params) : params_(params)
{
    if (!(std::isfinite(params.size) && params.size > 0.0))
        throw std::invalid_argument("NegativeBinomial: size must be positive");
    if (!is_probability(params.p))
        throw std::invalid_argument("NegativeBinomial: p must lie in (0, 1)");
}

double CountDistribution::mean() const
{
    return std::visit(overloaded{
                          [](const Poisson& d) { return d.lambda; },
                          [](const Binomial& d) { return static_cast<double>(d.trials) * d.p; },
                          [](const NegativeBinomial& d) { return d.size * (1.0 - d.p) / d.p; },
                      },
                      params_);
}

double CountDistribution::variance() const
{
    return std::visit(overloaded{
                          [](const Poisson& d) { return d.lambda; },
                          [](const Binomial& d) {
                              return static_cast<double>(d.trials) * d.p * (1.0 - d.p);
                          },
                          [](const NegativeBinomial& d) { return d.size * (1.0 - d.p) / (d.p * d.p); },
                      },
                      params_);
}

double CountDistribution::pmf(std::int64_t n) const
{
    if (n < 0)
        return 0.0;
    const double x = static_cast<double>(n);
    return std::visit(overloaded{
                          [x](const Poisson& d) {
                              return std::exp(-d.lambda + x * std::log(d.lambda) - std::lgamma(x + 1.0));
                          },
                          [x, n](const Binomial& d) {
                              if (n > d.trials)
                                  return 0.0;
                              const double m = static_cast<double>(d.trials);
                              return std::exp(std::lgamma(m + 1.0) - std::lgamma(x + 1.0) -
                                              std::lgamma(m - x + 1.0) + x * std::log(d.p) +
                                              (m - x) * std::log1p(-d.p));
                          },
                          [x](const NegativeBinomial& d) {
                              return std::exp(std::lgamma(d.size + x) - std::lgamma(x + 1.0) -
                                              std::lgamma(d.size) + d.size * std::log(d.p) +
                                              x * std::log1p(-d.p));
                          },
                      },
                      params_);
}

std::string CountDistribution::describe() const
{
    std::ostringstream out;
    std::visit(overloaded{
                   [&](const Poisson& d) { out << "poisson(lambda=" << format_shortest(d.lambda) << ")"; },
                   [&](const Binomial& d) { out << "binomial(m=" << d.trials << ",p=" << format_shortest(d.p) << ")"; },
                   [&](const NegativeBinomial& d) {
                       out << "negbinomial(rho=" << format_shortest(d.size) << ",p=" << format_shortest(d.p) << ")";
                   },
               },
               params_);
    return out.str();
}

std::int64_t sample_count(const CountDistribution& dist, Rng& rng)
{
    return std::visit(overloaded{
                          [&](const Poisson& d) {
                              return std::poisson_distribution<std::int64_t>(d.lambda)(rng);
                          },
                          [&](const Binomial& d) {
                              return std::binomial_distribution<std::int64_t>(d.trials, d.p)(rng);
                          },
                          [&](const NegativeBinomial& d) -> std::int64_t {
                              // Gamma-Poisson mixture.
                              const double rate =
                                  std::gamma_distribution<double>(d.size, (1.0 - d.p) / d.p)(rng);
                              if (rate <= 0.0)
                                  return 0;
                              return std::poisson_distribution<std::int64_t>(rate)(rng);
                          },
                      },
                      dist.params());
}

// ---------------------------------------------------------------------------
// SeverityDistribution
// ---------------------------------------------------------------------------

SeverityDistribution::SeverityDistribution(Pareto params) : params_(params)
{
    if (!(std::isfinite(params.alpha) && params.alpha > 2.0))
        throw std::invalid_argument("Pareto: alpha must exceed 2 (finite mean)");
    if (!(std::isfinite(params.r) && params.r > 0.0))
        throw std::invalid_argument("Pareto: r must be positive");
}

SeverityDistribution::SeverityDistribution(ShiftedExponential params) : params_(params)
{
    if (!(std::isfinite(params.mu) && params.mu > 0.0))
        throw std::invalid_argument("ShiftedExponential: mu must be positive");
    if (!(std::isfinite(params.r) && params.r > 0.0))
        throw std::invalid_argument("ShiftedExponential: r must be positive");
}

SeverityDistribution::SeverityDistribution(UnitClaim params) : params_(params) {}

double SeverityDistribution::survival(double x) const
{
    return std::visit(overloaded{
                          [x](const Pareto& d) {
                              return x <= d.r ? 1.0 : std::pow(d.r / x, d.alpha - 1.0);
                          },
                          [x](const ShiftedExponential& d) {
                              return x <= d.r ? 1.0 : std::exp(-d.mu * (x - d.r));
                          },
                          [x](const UnitClaim&) { return x < 1.0 ? 1.0 : 0.0; },
                      },
                      params_);
}

double SeverityDistribution::cdf(double x) const
{
    return std::visit(overloaded{
                          [x](const Pareto& d) {
                              return x <= d.r ? 0.0 : -std::expm1((d.alpha - 1.0) * std::log(d.r / x));
                          },
                          [x](const ShiftedExponential& d) {
                              return x <= d.r ? 0.0 : -std::expm1(-d.mu * (x - d.r));
                          },
                          [x](const UnitClaim&) { return x < 1.0 ? 0.0 : 1.0; },
                      },
                      params_);
}

double SeverityDistribution::quantile(double u) const
{
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error("quantile: u must lie in (0, 1)");
    return std::visit(overloaded{
                          [u](const Pareto& d) {
                              return d.r * std::exp(-std::log1p(-u) / (d.alpha - 1.0));
                          },
                          [u](const ShiftedExponential& d) { return d.r - std::log1p(-u) / d.mu; },
                          [](const UnitClaim&) { return 1.0; },
                      },
                      params_);
}

std::string SeverityDistribution::describe() const
{
    std::ostringstream out;
    std::visit(overloaded{
                   [&](const Pareto& d) { out << "pareto(alpha=" << format_shortest(d.alpha) << ",r=" << format_shortest(d.r) << ")"; },
                   [&](const ShiftedExponential& d) {
                       out << "exponential(mu=" << format_shortest(d.mu) << ",r=" << format_shortest(d.r) << ")";
                   },
                   [&](const UnitClaim&) { out << "unit"; },
               },
               params_);
    return out.str();
}

double sample_severity(const SeverityDistribution& dist, Rng& rng)
{
    return std::visit(overloaded{
                          [&](const Pareto& d) {
                              // Inversion with V = 1 - U, V uniform on (0, 1).
                              const double v = open_unit(rng);
                              return above(d.r * std::pow(v, -1.0 / (d.alpha - 1.0)), d.r);
                          },
                          [&](const ShiftedExponential& d) {
                              const double e = -std::log(open_unit(rng));
                              return above(d.r + e / d.mu, d.r);
                          },
                          [](const UnitClaim&) { return 1.0; },
                      },
                      dist.params());
}

double sample_aggregate(const SeverityDistribution& dist, std::int64_t n, Rng& rng)
{
    if (dist.is_unit())
        return static_cast<double>(n);
    double total = 0.0;
    for (std::int64_t l = 0; l < n; ++l)
        total += sample_severity(dist, rng);
    return total;
}

SeverityMoments severity_moments(const SeverityDistribution& dist)
{
    return std::visit(overloaded{
                          [](const Pareto& d) {
                              SeverityMoments m{d.r * (d.alpha - 1.0) / (d.alpha - 2.0), std::nullopt};
                              if (d.alpha > 3.0)
                                  m.second = d.r * d.r * (d.alpha - 1.0) / (d.alpha - 3.0);
                              return m;
                          },
                          [](const ShiftedExponential& d) {
                              return SeverityMoments{d.r + 1.0 / d.mu,
                                                     d.r * d.r + 2.0 * d.r / d.mu + 2.0 / (d.mu * d.mu)};
                          },
                          [](const UnitClaim&) { return SeverityMoments{1.0, 1.0}; },
                      },
                      dist.params());
}

ShiftedExponential fit_exponential_to_pareto(const Pareto& pareto)
{
    if (!(pareto.alpha > 2.0))
        throw std::invalid_argument("fit_exponential_to_pareto: alpha must exceed 2");
    if (!(pareto.r > 0.0))
        throw std::invalid_argument("fit_exponential_to_pareto: r must be positive");
    return ShiftedExponential{(pareto.alpha - 2.0) / pareto.r, pareto.r};
}

// ---------------------------------------------------------------------------
// RunOffPattern
// ---------------------------------------------------------------------------

RunOffPattern::RunOffPattern(std::vector<double> weights) : pi_(std::move(weights))
{
    if (pi_.size() < 2)
        throw std::invalid_argument("run-off pattern needs at least two development years");
    for (double w : pi_) {
        if (!std::isfinite(w) || w < 0.0)
            throw std::invalid_argument("run-off pattern weights must be finite and nonnegative");
    }
    const double total = std::accumulate(pi_.begin(), pi_.end(), 0.0);
    if (!(total > 0.0))
        throw std::invalid_argument("run-off pattern weights must not all be zero");
    for (double& w : pi_)
        w /= total;

    conditional_.resize(pi_.size());
    double tail = 0.0;
    for (std::size_t k = pi_.size(); k-- > 0;) {
        tail += pi_[k];
        conditional_[k] = tail > 0.0 ? std::min(1.0, pi_[k] / tail) : 0.0;
    }
    conditional_.back() = 1.0;
}

RunOffPattern make_pattern(PatternKind kind, std::size_t years, std::optional<double> decay,
                           std::span<const double> values)
{
    if (years < 2)
        throw std::invalid_argument("make_pattern: need at least two development years");
    std::vector<double> w(years);
    switch (kind) {
    case PatternKind::linear:
        for (std::size_t j = 0; j < years; ++j)
            w[j] = static_cast<double>(years - j);
        break;
    case PatternKind::exponential: {
        const double q = decay.value_or(default_exponential_decay);
        if (!(q > 0.0 && q < 1.0))
            throw std::invalid_argument("make_pattern: exponential decay must lie in (0, 1)");
        double x = 1.0;
        for (std::size_t j = 0; j < years; ++j, x *= q)
            w[j] = x;
        break;
    }
    case PatternKind::explicit_values:
        if (values.size() != years)
            throw std::invalid_argument("make_pattern: explicit values must have one entry per year");
        w.assign(values.begin(), values.end());
        break;
    }
    return RunOffPattern(std::move(w));
}

std::vector<std::int64_t> sample_multinomial(std::int64_t n, const RunOffPattern& pattern, Rng& rng)
{
    if (n < 0)
        throw std::invalid_argument("sample_multinomial: n must be nonnegative");
    const std::size_t years = pattern.years();
    std::vector<std::int64_t> out(years, 0);
    std::int64_t left = n;
    for (std::size_t k = 0; k + 1 < years && left > 0; ++k) {
        const double p = pattern.conditional(k);
        std::int64_t x = 0;
        if (p >= 1.0)
            x = left;
        else if (p > 0.0)
            x = std::binomial_distribution<std::int64_t>(left, p)(rng);
        out[k] = x;
        left -= x;
    }
    out[years - 1] += left;
    return out;
}

} // namespace clmc
