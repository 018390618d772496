#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "clmc/rng.hpp"

namespace clmc {

// ---------------------------------------------------------------------------
// Claim counts
// ---------------------------------------------------------------------------

struct Poisson {
    double lambda;
};

struct Binomial {
    std::int64_t trials;
    double p;
};

/// pmf C(size+n-1, n) p^size (1-p)^n; `size` may be non-integer.
struct NegativeBinomial {
    double size;
    double p;
};

/// Ultimate claim number distribution of one occurrence year.
/// Parameters are validated on construction; the object is immutable.
class CountDistribution {
public:
    using Params = std::variant<Poisson, Binomial, NegativeBinomial>;

    CountDistribution(Poisson params);
    CountDistribution(Binomial params);
    CountDistribution(NegativeBinomial params);

    const Params& params() const noexcept { return params_; }

    double mean() const;
    double variance() const;
    double pmf(std::int64_t n) const;
    std::string describe() const;

private:
    Params params_;
};

std::int64_t sample_count(const CountDistribution& dist, Rng& rng);

// ---------------------------------------------------------------------------
// Claim severities
// ---------------------------------------------------------------------------

/// Density (alpha-1) r^(alpha-1) x^(-alpha) on x > r. Tail index is alpha-1.
struct Pareto {
    double alpha;
    double r;
};

/// r plus an exponential with rate mu.
struct ShiftedExponential {
    double mu;
    double r;
};

/// Every claim costs exactly one currency unit (pure claim-number model).
struct UnitClaim {};

struct SeverityMoments {
    double first;
    std::optional<double> second; ///< absent when infinite
};

class SeverityDistribution {
public:
    using Params = std::variant<Pareto, ShiftedExponential, UnitClaim>;

    SeverityDistribution(Pareto params);
    SeverityDistribution(ShiftedExponential params);
    SeverityDistribution(UnitClaim params);

    const Params& params() const noexcept { return params_; }
    bool is_unit() const noexcept { return std::holds_alternative<UnitClaim>(params_); }

    double cdf(double x) const;
    /// 1 - cdf(x), evaluated without cancellation in the tail.
    double survival(double x) const;
    /// Inverse cdf for u in (0, 1).
    double quantile(double u) const;
    std::string describe() const;

private:
    Params params_;
};

double sample_severity(const SeverityDistribution& dist, Rng& rng);

/// Sum of `n` independent severities.
double sample_aggregate(const SeverityDistribution& dist, std::int64_t n, Rng& rng);

SeverityMoments severity_moments(const SeverityDistribution& dist);

/// Exponential with the same cut-off r and the same first moment as `pareto`.
ShiftedExponential fit_exponential_to_pareto(const Pareto& pareto);

// ---------------------------------------------------------------------------
// Run-off pattern
// ---------------------------------------------------------------------------

enum class PatternKind { linear, exponential, explicit_values };

/// Probabilities of a claim falling into development years 1..I.
class RunOffPattern {
public:
    /// Normalizes `weights`; rejects negative or all-zero input and fewer than two years.
    explicit RunOffPattern(std::vector<double> weights);

    std::size_t years() const noexcept { return pi_.size(); }
    double operator[](std::size_t k) const { return pi_[k]; }
    std::span<const double> probabilities() const noexcept { return pi_; }

    /// pi_k / (pi_k + ... + pi_I): success probability of the k-th sequential binomial.
    double conditional(std::size_t k) const { return conditional_[k]; }

private:
    std::vector<double> pi_;
    std::vector<double> conditional_;
};

inline constexpr double default_exponential_decay = 0.8;

/// linear: pi_j ~ I+1-j. exponential: pi_j ~ decay^(j-1). explicit: normalized `values`.
RunOffPattern make_pattern(PatternKind kind, std::size_t years,
                           std::optional<double> decay = std::nullopt,
                           std::span<const double> values = {});

/// Multinomial split of `n` claims over the pattern, as sequential conditional binomials.
std::vector<std::int64_t> sample_multinomial(std::int64_t n, const RunOffPattern& pattern, Rng& rng);

} // namespace clmc
