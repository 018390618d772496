#include "clmc/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "clmc/chainladder.hpp"

namespace clmc {

void ScenarioConfig::validate() const
{
    if (years < 2)
        throw std::invalid_argument("ScenarioConfig: years must be >= 2");
    if (pattern.years() != years)
        throw std::invalid_argument("ScenarioConfig: pattern length must equal years");
    if (n_scenarios < 1)
        throw std::invalid_argument("ScenarioConfig: n_scenarios must be >= 1");
    if (n_replications < 1)
        throw std::invalid_argument("ScenarioConfig: n_replications must be >= 1");
}

RunOffTable simulate_rectangle(const ScenarioConfig& cfg, Rng& rng)
{
    const std::size_t n = cfg.years;
    std::vector<double> cells(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t ultimate = sample_count(cfg.count, rng);
        const auto split = sample_multinomial(ultimate, cfg.pattern, rng);
        for (std::size_t k = 0; k < n; ++k)
            cells[i * n + k] = sample_aggregate(cfg.severity, split[k], rng);
    }
    return RunOffTable(n, std::move(cells));
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, Rng& rng)
{
    for (std::size_t degenerate = 0;;) {
        const RunOffTable table = simulate_rectangle(cfg, rng);
        const double r_real = actual_reserves(table).total;
        try {
            const ClEstimate est = estimate(cumulate_upper(table));
            if (est.mse_total > 0.0 && std::isfinite(est.mse_total)) {
                ScenarioResult res;
                res.r_cl = est.forecast.total_reserve;
                res.r_real = r_real;
                res.mse = est.mse_total;
                res.delta = (res.r_cl - res.r_real) / std::sqrt(res.mse);
                res.resample_count = degenerate;
                return res;
            }
        } catch (const DegenerateTriangle&) {
        }
        if (++degenerate >= cfg.max_resamples_per_scenario)
            throw ScenarioExhausted("no usable triangle after " + std::to_string(degenerate) +
                                    " consecutive degenerate draws");
    }
}

Rng scenario_stream(const ScenarioConfig& cfg, std::size_t replication, std::size_t scenario)
{
    return make_stream(cfg.seed, replication, scenario);
}

std::vector<ScenarioResult> run_batch(const ScenarioConfig& cfg, std::size_t replication,
                                      std::size_t jobs)
{
    cfg.validate();
    const std::size_t n = cfg.n_scenarios;
    std::vector<ScenarioResult> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t s = next++; s < n; s = next++) {
            try {
                Rng rng = scenario_stream(cfg, replication, s);
                results[s] = run_scenario(cfg, rng);
            } catch (...) {
                errors[s] = std::current_exception();
            }
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(jobs, 1, n);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }

    // Report the lowest failing index so the error does not depend on scheduling.
    for (std::size_t s = 0; s < n; ++s) {
        if (!errors[s])
            continue;
        try {
            std::rethrow_exception(errors[s]);
        } catch (const ScenarioExhausted& e) {
            throw ScenarioExhausted("replication " + std::to_string(replication) + ", scenario " +
                                        std::to_string(s) + ": " + e.what(),
                                    s);
        }
    }
    return results;
}

std::vector<std::vector<ScenarioResult>> run_replications(const ScenarioConfig& cfg, std::size_t jobs)
{
    std::vector<std::vector<ScenarioResult>> out;
    out.reserve(cfg.n_replications);
    for (std::size_t r = 0; r < cfg.n_replications; ++r)
        out.push_back(run_batch(cfg, r, jobs));
    return out;
}

double expected_triangle_claims(const ScenarioConfig& cfg)
{
    cfg.validate();
    const std::size_t n = cfg.years;
    double weight = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        weight += static_cast<double>(n - j) * cfg.pattern[j];
    return cfg.count.mean() * weight;
}

} // namespace clmc
