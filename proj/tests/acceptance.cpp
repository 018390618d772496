// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Thresholds are fixed here and never tuned.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "clmc/chainladder.hpp"
#include "clmc/experiment.hpp"
#include "oracles.hpp"

using namespace clmc;
namespace fs = std::filesystem;

namespace {

const fs::path config_dir = CLMC_CONFIG_DIR;
const std::vector<std::string> experiment_files{"fig2", "fig3", "fig5", "fig6", "fig7", "table2"};

struct Run {
    ExperimentSpec spec;
    ExperimentResult result;
    fs::path dir;
};

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " [fail: " << what << "]";
        }
    }
};

int failures = 0;

void report(int id, const std::string& title, Verdict& v)
{
    if (!v.pass) ++failures;
    std::printf("%s criterion %d: %s;%s\n", v.pass ? "PASS" : "FAIL", id, title.c_str(), v.detail.str().c_str());
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x, int digits = 4)
{
    std::ostringstream s;
    s.precision(digits);
    s << x;
    return s.str();
}

std::string slurp(const fs::path& file)
{
    std::ifstream in(file, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::optional<double> pareto_alpha(const SweepPoint& p)
{
    if (const auto* par = std::get_if<Pareto>(&p.config.severity.params())) return par->alpha;
    return std::nullopt;
}

bool is_exponential_severity(const SweepPoint& p)
{
    return std::holds_alternative<ShiftedExponential>(p.config.severity.params());
}

bool is_poisson(const SweepPoint& p, double lambda = -1.0)
{
    const auto* po = std::get_if<Poisson>(&p.config.count.params());
    return po && (lambda < 0.0 || po->lambda == lambda);
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

const ConfigOutcome* find(const Run& run, std::size_t years, const std::string& pattern_prefix,
                          std::optional<double> alpha, bool exponential_fit = false)
{
    for (const auto& c : run.result.configs) {
        const SweepPoint& p = run.spec.points[c.id];
        if (p.config.years != years || !starts_with(p.pattern_text, pattern_prefix)) continue;
        if (exponential_fit) {
            if (!is_exponential_severity(p)) continue;
            const auto& e = std::get<ShiftedExponential>(p.config.severity.params());
            if (std::abs(e.mu - fit_exponential_to_pareto({*alpha, e.r}).mu) > 1e-15) continue;
            return &c;
        }
        if (alpha) {
            if (pareto_alpha(p) != alpha) continue;
        } else if (!p.config.severity.is_unit()) {
            continue;
        }
        return &c;
    }
    return nullptr;
}

double combined(double a, double b) { return std::sqrt(a * a + b * b); }

// ---------------------------------------------------------------------------

void criterion_panjer()
{
    Verdict v;
    for (const char* name : {"panjer_fig1a", "panjer_fig1b"}) {
        const auto spec = load_panjer_check(config_dir / (std::string(name) + ".json"));
        const auto t0 = std::chrono::steady_clock::now();
        const auto rep = run_panjer_check(spec);
        const double secs = seconds_since(t0);
        v.detail << ' ' << name << ": inside band " << rep.inside_band << "/" << rep.band_points << " ("
                 << fmt(100.0 * rep.band_fraction()) << "%), max dev " << fmt(rep.max_deviation) << ", truncation "
                 << fmt(rep.aggregate.truncation, 3) << ", " << fmt(secs, 3) << " s;";
        v.require(rep.band_points > 0 && rep.band_fraction() >= 0.99, std::string(name) + " band fraction >= 99%");
        v.require(secs < 10.0, std::string(name) + " runtime < 10 s");
    }
    report(1, "Panjer CDF inside MC mean +- 3 sd band (>= 99% of points, < 10 s)", v);
}

void criterion_median(const Run& fig2)
{
    Verdict v;
    for (const auto& c : fig2.result.configs) {
        const auto l = *c.report.level_index(0.5);
        const double q = c.report.q_mean[l], s = c.report.q_stdev[l];
        v.detail << " #" << c.id << " q50=" << fmt(q, 3) << "+-" << fmt(s, 2);
        v.require(std::abs(q) <= 2.0 * s && std::abs(q) <= 0.1, "config " + std::to_string(c.id));
    }
    report(2, "fig2 median of delta within 2 sd of 0 and |q50| <= 0.1", v);
}

void criterion_negative_bias(const std::map<std::string, Run>& runs)
{
    Verdict v;
    std::size_t total = 0, negative = 0;
    double worst = -INFINITY;
    for (const auto& [name, run] : runs)
        for (const auto& c : run.result.configs) {
            ++total;
            worst = std::max(worst, c.report.e_delta_mean);
            if (c.report.e_delta_mean < 0.0)
                ++negative;
            else
                v.require(false, name + " config " + std::to_string(c.id) + " E(delta)=" + fmt(c.report.e_delta_mean));
        }
    v.detail << ' ' << negative << "/" << total << " configs with E(delta) < 0, largest " << fmt(worst, 3);
    report(3, "E(delta) < 0 for every shipped config", v);
}

void criterion_period(const Run& fig2)
{
    Verdict v;
    auto e = [&](std::size_t years, const char* pattern) -> const ConfigOutcome* {
        const ConfigOutcome* c = find(fig2, years, pattern, std::nullopt);
        v.require(c != nullptr, std::string("missing I=") + std::to_string(years) + " " + pattern);
        return c;
    };
    if (const auto* c = e(5, "linear")) {
        v.detail << " I=5 linear E=" << fmt(c->report.e_delta_mean, 3) << "+-" << fmt(c->report.e_delta_stdev, 2)
                 << " (<= -0.08)";
        v.require(c->report.e_delta_mean <= -0.08, "I=5 linear");
    }
    if (const auto* c = e(5, "exponential")) {
        v.detail << "; I=5 exponential E=" << fmt(c->report.e_delta_mean, 3) << "+-" << fmt(c->report.e_delta_stdev, 2)
                 << " (<= -0.05)";
        v.require(c->report.e_delta_mean <= -0.05, "I=5 exponential");
    }
    for (const char* pattern : {"linear", "exponential"})
        if (const auto* c = e(20, pattern)) {
            v.detail << "; I=20 " << pattern << " |E|=" << fmt(std::abs(c->report.e_delta_mean), 3) << " (<= 0.06)";
            v.require(std::abs(c->report.e_delta_mean) <= 0.06, std::string("I=20 ") + pattern);
        }
    double slowest = 0.0;
    for (const auto& c : fig2.result.configs) slowest = std::max(slowest, c.seconds);
    v.detail << "; slowest config " << fmt(slowest, 3) << " s";
    v.require(slowest < 60.0, "runtime per config < 60 s");
    report(4, "E(delta) magnitudes against I (Poisson 100, unit claims)", v);
}

void criterion_convergence(const std::map<std::string, Run>& runs)
{
    Verdict v;
    std::size_t checked = 0;
    for (const auto& [name, run] : runs)
        for (const auto& c : run.result.configs) {
            const SweepPoint& p = run.spec.points[c.id];
            if (!p.config.severity.is_unit() || !is_poisson(p) || c.delta_metric < 5000.0) continue;
            ++checked;
            const double bound = 0.03 + 2.0 * c.report.e_delta_stdev / std::sqrt(10.0);
            v.detail << ' ' << name << "#" << c.id << " Delta=" << fmt(c.delta_metric) << " E="
                     << fmt(c.report.e_delta_mean, 3) << " (<= " << fmt(bound, 3) << ")";
            v.require(std::abs(c.report.e_delta_mean) <= bound, name + " config " + std::to_string(c.id));
        }
    v.require(checked > 0, "no claim-number config with Delta >= 5000");
    report(5, "claim-number E(delta) near 0 for Delta >= 5000", v);
}

void criterion_loadings(const Run& fig5)
{
    Verdict v;
    struct Case {
        double alpha, risk, lo, hi;
    };
    for (Case k : {Case{2.1, 0.05, 3.0, 6.5}, Case{2.1, 0.10, 1.8, 3.6}, Case{3.5, 0.05, 1.4, 2.5}}) {
        const auto* c = find(fig5, 20, "exponential", k.alpha);
        if (!c) {
            v.require(false, "missing alpha=" + fmt(k.alpha));
            continue;
        }
        const double load = safety_loading(c->report, k.risk);
        v.detail << " alpha=" << fmt(k.alpha) << " risk=" << fmt(k.risk) << ": " << fmt(load, 3) << " in ["
                 << fmt(k.lo) << ", " << fmt(k.hi) << "];";
        v.require(load >= k.lo && load <= k.hi, "alpha=" + fmt(k.alpha) + " risk=" + fmt(k.risk));
    }
    report(6, "safety loadings, I=20 exponential pattern, lambda=100, r=1000", v);
}

void criterion_alpha_independence(const Run& fig5)
{
    Verdict v;
    for (std::size_t years : {20u, 5u}) {
        const auto* a = find(fig5, years, "exponential", 3.5);
        const auto* b = find(fig5, years, "exponential", 4.0);
        if (!a || !b) {
            v.require(false, "missing alpha 3.5/4.0 at I=" + std::to_string(years));
            continue;
        }
        double worst = 0.0;
        for (std::size_t l = 0; l < a->report.levels.size(); ++l) {
            const double z = std::abs(a->report.q_mean[l] - b->report.q_mean[l]) /
                             combined(a->report.q_stdev[l], b->report.q_stdev[l]);
            worst = std::max(worst, z);
        }
        v.detail << " I=" << years << ": max |q(3.5)-q(4.0)| = " << fmt(worst, 3) << " combined sd;";
        v.require(worst <= 2.0, "I=" + std::to_string(years));
    }
    report(7, "quantiles at alpha 3.5 and 4.0 agree within 2 combined sd", v);
}

void criterion_saturation(const std::map<std::string, Run>& runs)
{
    Verdict v;
    std::size_t n4 = 0, n21 = 0;
    for (const auto& [name, run] : runs)
        for (const auto& c : run.result.configs) {
            const SweepPoint& p = run.spec.points[c.id];
            const auto alpha = pareto_alpha(p);
            if (!alpha || !is_poisson(p) || c.delta_metric < 5000.0) continue;
            const double e = c.report.e_delta_mean;
            if (*alpha == 4.0) {
                ++n4;
                v.detail << ' ' << name << "#" << c.id << " a=4 E=" << fmt(e, 3);
                v.require(e >= -0.10 && e <= -0.01, name + " config " + std::to_string(c.id));
            } else if (*alpha == 2.1) {
                ++n21;
                v.detail << ' ' << name << "#" << c.id << " a=2.1 E=" << fmt(e, 3);
                v.require(e >= -2.0 && e <= -0.7, name + " config " + std::to_string(c.id));
            }
        }
    v.require(n4 > 0 && n21 > 0, "need alpha 4.0 and 2.1 configs with Delta >= 5000");
    report(8, "aggregate E(delta) for Delta >= 5000: alpha=4 in [-0.10,-0.01], alpha=2.1 in [-2.0,-0.7]", v);
}

void criterion_diff(const Run& fig7)
{
    Verdict v;
    const auto* p31 = find(fig7, 5, "exponential", 3.1);
    const auto* e31 = find(fig7, 5, "exponential", 3.1, true);
    const auto* p40 = find(fig7, 5, "exponential", 4.0);
    const auto* e40 = find(fig7, 5, "exponential", 4.0, true);
    if (!p31 || !e31 || !p40 || !e40) {
        v.require(false, "fig7 lacks the I=5 Pareto/exponential pairs");
        report(9, "Pareto against exponential Diff", v);
        return;
    }
    const auto d31 = percentile_diff(e31->report, p31->report);
    for (double level : {0.05, 0.10}) {
        const auto l = *p31->report.level_index(level);
        const double sd = std::max(d31.stdev_a[l], d31.stdev_b[l]);
        v.detail << " alpha=3.1 Diff(" << fmt(level) << ")=" << fmt(d31.diff[l], 3) << " vs sd " << fmt(sd, 3) << ";";
        v.require(d31.diff[l] > 0.0 && d31.diff[l] > sd, "alpha=3.1 level " + fmt(level));
    }
    const auto d40 = percentile_diff(e40->report, p40->report);
    double worst = 0.0;
    for (std::size_t l = 0; l < d40.levels.size(); ++l)
        worst = std::max(worst, std::abs(d40.diff[l]) / combined(d40.stdev_a[l], d40.stdev_b[l]));
    v.detail << " alpha=4.0 max |Diff| = " << fmt(worst, 3) << " combined sd";
    v.require(worst <= 2.0, "alpha=4.0 Diff within 2 sd");
    report(9, "Pareto against exponential Diff, I=5, exponential pattern, lambda=100", v);
}

void criterion_replay(const std::map<std::string, Run>& runs)
{
    Verdict v;
    for (const auto& [name, run] : runs) {
        RunOptions opt;
        opt.jobs = 3;
        opt.output_dir = run.dir.parent_path() / (name + "_replay");
        run_experiment(run.spec, opt);
        bool same = true;
        for (const char* f : {"percentiles.csv", "bias.csv"}) {
            const auto a = slurp(run.dir / f), b = slurp(*opt.output_dir / f);
            same = same && !a.empty() && a == b;
        }
        v.detail << ' ' << name << (same ? " identical" : " DIFFERS");
        v.require(same, name);
    }
    report(10, "replay with --jobs 3 reproduces percentiles.csv and bias.csv byte for byte", v);
}

void criterion_estimator()
{
    Verdict v;
    auto close = [](double a, double b, double tol) { return oracle::rel_diff(a, b) <= tol; };

    {
        CumulativeTriangle tri({{100, 200}, {50}});
        const auto est = estimate(tri);
        v.require(est.factors[0] == 2.0 && est.forecast.total_reserve == 50.0, "I=2 factor and reserve");
    }
    {
        const auto f = dev_factors(CumulativeTriangle({{100, 150, 180}, {100, 150}, {100}}));
        v.require(close(f[0], 1.5, 1e-15) && close(f[1], 1.2, 1e-15), "identical rows");
    }
    {
        CumulativeTriangle tri({{100, 200, 240}, {100, 220}, {100}});
        const auto f = dev_factors(tri);
        v.require(close(f[0], 2.1, 1e-14) && close(sigma_sq(tri, f)[0], 2.0, 1e-12), "sigma^2 hand case");
    }
    v.require(mack_tail_variance(4.0, 2.0) == 1.0, "tail rule");
    {
        const std::vector<std::vector<double>> rows{
            {1000, 1800, 2100, 2250, 2300}, {1100, 2000, 2400, 2520}, {950, 1750, 2050}, {1200, 2300}, {1050}};
        const auto est = estimate(CumulativeTriangle(rows));
        const auto ref = oracle::mack(rows);
        bool ok = close(est.mse_total, ref.mse_total, 1e-9) && close(est.forecast.total_reserve, ref.total_reserve, 1e-9);
        for (std::size_t i = 2; i <= 5; ++i) ok = ok && close(est.mse_per_year[i - 1], ref.mse[i], 1e-9);
        v.require(ok, "5x5 fixture against reference evaluation");
    }

    std::mt19937_64 eng(11);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    std::size_t scale_ok = 0, decomposition_ok = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t I = 3 + rep % 10;
        auto rows = oracle::random_triangle(I, eng);
        const double c = scale(eng);
        auto scaled = rows;
        for (auto& r : scaled)
            for (auto& x : r) x *= c;
        const auto a = estimate(CumulativeTriangle(rows));
        const auto b = estimate(CumulativeTriangle(scaled));
        bool ok = close(b.forecast.total_reserve, c * a.forecast.total_reserve, 1e-10) &&
                  close(b.mse_total, c * c * a.mse_total, 1e-9);
        for (std::size_t k = 0; k + 1 < I; ++k) ok = ok && close(a.factors[k], b.factors[k], 1e-12);
        scale_ok += ok;

        // Total m.s.e. = per-year sum + nonnegative cross term, matching the reference.
        const auto ref = oracle::mack(rows);
        const double sum = std::accumulate(a.mse_per_year.begin(), a.mse_per_year.end(), 0.0);
        decomposition_ok += close(a.mse_total, ref.mse_total, 1e-9) && a.mse_total >= sum * (1.0 - 1e-12);
    }
    v.detail << " scale equivariance " << scale_ok << "/1000, m.s.e. decomposition " << decomposition_ok << "/1000";
    v.require(scale_ok == 1000, "scale equivariance");
    v.require(decomposition_ok == 1000, "m.s.e. decomposition");

    std::normal_distribution<double> z(0.0, 50.0);
    std::uniform_real_distribution<double> m(1.0, 1e4);
    std::size_t bias_ok = 0;
    for (int t = 0; t < 1000; ++t) {
        std::vector<ScenarioResult> batch(1 + t % 50);
        for (auto& r : batch) {
            r.r_cl = z(eng);
            r.mse = m(eng);
            r.delta = r.r_cl / std::sqrt(r.mse);
        }
        const auto d = relative_bias_decomposition(batch);
        bias_ok += std::abs(d.lhs - d.rhs()) <= 1e-10 * (std::abs(d.lhs) + 1.0);
    }
    v.detail << ", relative-bias identity " << bias_ok << "/1000";
    v.require(bias_ok == 1000, "relative-bias identity");
    report(11, "estimator hand cases, scale equivariance and decomposition identities", v);
}

} // namespace

int main()
{
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path work = fs::temp_directory_path() / "clmc_acceptance";
    fs::remove_all(work);

    std::map<std::string, Run> runs;
    for (const auto& name : experiment_files) {
        Run run;
        run.spec = load_experiment(config_dir / (name + ".json"));
        run.dir = work / name;
        RunOptions opt;
        opt.output_dir = run.dir;
        const auto ts = std::chrono::steady_clock::now();
        run.result = run_experiment(run.spec, opt);
        std::printf("ran %s: %zu configs in %.1f s\n", name.c_str(), run.result.configs.size(), seconds_since(ts));
        std::fflush(stdout);
        runs.emplace(name, std::move(run));
    }

    criterion_panjer();
    criterion_median(runs.at("fig2"));
    criterion_negative_bias(runs);
    criterion_period(runs.at("fig2"));
    criterion_convergence(runs);
    criterion_loadings(runs.at("fig5"));
    criterion_alpha_independence(runs.at("fig5"));
    criterion_saturation(runs);
    criterion_diff(runs.at("fig7"));
    criterion_replay(runs);
    criterion_estimator();

    fs::remove_all(work);
    std::printf("%d criterion(s) failed; total %.1f s\n", failures, seconds_since(t0));
    return failures == 0 ? 0 : 1;
}
