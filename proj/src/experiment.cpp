#include "clmc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "clmc/format.hpp"

#ifndef CLMC_VERSION
#define CLMC_VERSION "unknown"
#endif

namespace clmc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void require_keys(const json& node, const std::set<std::string>& allowed, const std::string& where)
{
    if (!node.is_object())
        throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : node.items()) {
        (void)value;
        if (!allowed.count(key))
            throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

const json& field(const json& node, const char* key, const std::string& where)
{
    const auto it = node.find(key);
    if (it == node.end())
        throw ConfigError(where + ": missing key '" + key + "'");
    return *it;
}

double number(const json& node, const char* key, const std::string& where)
{
    const json& v = field(node, key, where);
    if (!v.is_number())
        throw ConfigError(where + ": '" + key + "' must be a number");
    return v.get<double>();
}

std::uint64_t unsigned_integer(const json& v, const std::string& what)
{
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        throw ConfigError(what + " must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

std::vector<json> as_list(const json& v)
{
    if (v.is_array())
        return std::vector<json>(v.begin(), v.end());
    return {v};
}

std::string fnv1a_hex(const std::string& text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

// Written next to the target and renamed into place, so readers never see a partial file.
void write_atomically(const fs::path& target, const std::string& content)
{
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out)
            throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

json number_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

std::string pattern_text(const json& node)
{
    const std::string kind = node.at("kind").get<std::string>();
    if (kind == "exponential") {
        const double decay = node.contains("decay") ? node.at("decay").get<double>()
                                                    : default_exponential_decay;
        return "exponential(decay=" + format_shortest(decay) + ")";
    }
    if (kind == "explicit") {
        std::string s = "explicit(";
        bool first = true;
        for (const auto& v : node.at("values")) {
            s += (first ? "" : ";") + format_shortest(v.get<double>());
            first = false;
        }
        return s + ")";
    }
    return kind;
}

} // namespace

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

SeverityDistribution parse_severity(const json& node)
{
    const std::string where = "severity";
    if (!node.is_object())
        throw ConfigError(where + ": expected an object");
    const std::string type = field(node, "type", where).get<std::string>();
    try {
        if (type == "unit") {
            require_keys(node, {"type"}, where);
            return SeverityDistribution(UnitClaim{});
        }
        if (type == "pareto") {
            require_keys(node, {"type", "alpha", "r"}, where);
            return SeverityDistribution(Pareto{number(node, "alpha", where), number(node, "r", where)});
        }
        if (type == "exponential") {
            require_keys(node, {"type", "mu", "r"}, where);
            return SeverityDistribution(
                ShiftedExponential{number(node, "mu", where), number(node, "r", where)});
        }
        if (type == "exponential_fit") {
            require_keys(node, {"type", "alpha", "r"}, where);
            return SeverityDistribution(fit_exponential_to_pareto(
                Pareto{number(node, "alpha", where), number(node, "r", where)}));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    throw ConfigError(where + ": unknown type '" + type + "'");
}

CountDistribution parse_count(const json& node)
{
    const std::string where = "count";
    if (!node.is_object())
        throw ConfigError(where + ": expected an object");
    const std::string type = field(node, "type", where).get<std::string>();
    try {
        if (type == "poisson") {
            require_keys(node, {"type", "lambda"}, where);
            return CountDistribution(Poisson{number(node, "lambda", where)});
        }
        if (type == "binomial") {
            require_keys(node, {"type", "m", "p"}, where);
            return CountDistribution(Binomial{
                static_cast<std::int64_t>(unsigned_integer(field(node, "m", where), "count.m")),
                number(node, "p", where)});
        }
        if (type == "negbinomial") {
            require_keys(node, {"type", "rho", "p"}, where);
            return CountDistribution(NegativeBinomial{number(node, "rho", where), number(node, "p", where)});
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    throw ConfigError(where + ": unknown type '" + type + "'");
}

RunOffPattern parse_pattern(const json& node, std::size_t years)
{
    const std::string where = "pattern";
    if (!node.is_object())
        throw ConfigError(where + ": expected an object");
    const std::string kind = field(node, "kind", where).get<std::string>();
    try {
        if (kind == "linear") {
            require_keys(node, {"kind"}, where);
            return make_pattern(PatternKind::linear, years);
        }
        if (kind == "exponential") {
            require_keys(node, {"kind", "decay"}, where);
            std::optional<double> decay;
            if (node.contains("decay"))
                decay = number(node, "decay", where);
            return make_pattern(PatternKind::exponential, years, decay);
        }
        if (kind == "explicit") {
            require_keys(node, {"kind", "values"}, where);
            const auto values = field(node, "values", where).get<std::vector<double>>();
            return make_pattern(PatternKind::explicit_values, years, std::nullopt, values);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    } catch (const json::exception& e) {
        throw ConfigError(where + ": " + e.what());
    }
    throw ConfigError(where + ": unknown kind '" + kind + "'");
}

ExperimentSpec parse_experiment(const json& doc)
{
    require_keys(doc,
                 {"name", "description", "seed", "n_scenarios", "n_replications",
                  "max_resamples_per_scenario", "levels", "formats", "dump_deltas", "output_dir", "sweep"},
                 "experiment");
    ExperimentSpec spec;
    try {
        spec.name = doc.value("name", std::string("experiment"));
        if (doc.contains("seed"))
            spec.seed = unsigned_integer(doc.at("seed"), "seed");
        const std::size_t n_scenarios =
            doc.contains("n_scenarios") ? unsigned_integer(doc.at("n_scenarios"), "n_scenarios") : 1000;
        const std::size_t n_replications =
            doc.contains("n_replications") ? unsigned_integer(doc.at("n_replications"), "n_replications") : 10;
        const std::size_t max_resamples =
            doc.contains("max_resamples_per_scenario")
                ? unsigned_integer(doc.at("max_resamples_per_scenario"), "max_resamples_per_scenario")
                : 100;
        if (doc.contains("levels"))
            spec.levels = doc.at("levels").get<std::vector<double>>();
        if (spec.levels.empty() || !std::is_sorted(spec.levels.begin(), spec.levels.end()) ||
            std::any_of(spec.levels.begin(), spec.levels.end(), [](double p) { return !(p > 0.0 && p < 1.0); }))
            throw ConfigError("levels must be ascending probabilities in (0, 1)");
        if (doc.contains("formats")) {
            spec.formats = doc.at("formats").get<std::vector<std::string>>();
            for (const auto& f : spec.formats)
                if (f != "csv" && f != "json")
                    throw ConfigError("formats: unknown format '" + f + "'");
        }
        spec.dump_deltas = doc.value("dump_deltas", false);
        if (doc.contains("output_dir"))
            spec.output_dir = doc.at("output_dir").get<std::string>();

        if (!doc.contains("sweep"))
            return spec;
        std::size_t block_index = 0;
        for (const json& block : as_list(doc.at("sweep"))) {
            const std::string where = "sweep[" + std::to_string(block_index++) + "]";
            require_keys(block, {"years", "pattern", "count", "severity"}, where);
            for (const json& years_node : as_list(field(block, "years", where))) {
                const std::size_t years = unsigned_integer(years_node, where + ".years");
                for (const json& pattern_node : as_list(field(block, "pattern", where))) {
                    const RunOffPattern pattern = parse_pattern(pattern_node, years);
                    for (const json& count_node : as_list(field(block, "count", where))) {
                        const CountDistribution count = parse_count(count_node);
                        for (const json& severity_node : as_list(field(block, "severity", where))) {
                            const SeverityDistribution severity = parse_severity(severity_node);
                            SweepPoint point{ScenarioConfig{years, count, pattern, severity, n_scenarios,
                                                            n_replications, 0, max_resamples},
                                             "", pattern_text(pattern_node), count.describe(),
                                             severity.describe()};
                            try {
                                point.config.validate();
                            } catch (const std::invalid_argument& e) {
                                throw ConfigError(where + ": " + e.what());
                            }
                            point.label = "I=" + std::to_string(years) + " pattern=" + point.pattern_text +
                                          " count=" + point.count_text + " severity=" + point.severity_text;
                            spec.points.push_back(std::move(point));
                        }
                    }
                }
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("experiment: ") + e.what());
    }
    return spec;
}

ExperimentSpec load_experiment(const fs::path& file)
{
    std::ifstream in(file);
    if (!in)
        throw ConfigError("cannot open " + file.string());
    try {
        return parse_experiment(json::parse(in));
    } catch (const json::parse_error& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& options)
{
    ExperimentResult result;
    result.name = spec.name;
    result.seed = options.seed.value_or(spec.seed);

    for (std::size_t id = 0; id < spec.points.size(); ++id) {
        const SweepPoint& point = spec.points[id];
        ScenarioConfig cfg = point.config;
        cfg.seed = derive_seed(result.seed, id);

        ConfigOutcome outcome;
        outcome.id = id;
        outcome.label = point.label;
        outcome.seed = cfg.seed;
        outcome.config_hash = fnv1a_hex(point.label + "|n_scenarios=" + std::to_string(cfg.n_scenarios) +
                                        "|n_replications=" + std::to_string(cfg.n_replications) +
                                        "|max_resamples=" + std::to_string(cfg.max_resamples_per_scenario) +
                                        "|seed=" + std::to_string(cfg.seed));
        outcome.delta_metric = expected_triangle_claims(cfg);
        const auto start = std::chrono::steady_clock::now();
        try {
            outcome.results = run_replications(cfg, options.jobs);
        } catch (const ScenarioExhausted& e) {
            throw ScenarioExhausted("config " + std::to_string(id) + " (" + point.label + "): " + e.what(),
                                    e.scenario());
        }
        outcome.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::vector<std::vector<double>> batches;
        for (const auto& batch : outcome.results) {
            batches.push_back(deltas(batch));
            std::size_t rs = 0;
            for (const auto& r : batch)
                rs += r.resample_count;
            outcome.resamples_per_replication.push_back(rs);
            outcome.resample_total += rs;
        }
        outcome.report = aggregate_replications(batches, spec.levels);
        result.configs.push_back(std::move(outcome));
    }

    if (!options.write_files)
        return result;

    const fs::path dir = options.output_dir.value_or(spec.output_dir.value_or(fs::path("out") / spec.name));
    fs::create_directories(dir);
    const bool csv = std::find(spec.formats.begin(), spec.formats.end(), "csv") != spec.formats.end();
    const bool as_json = std::find(spec.formats.begin(), spec.formats.end(), "json") != spec.formats.end();

    if (csv) {
        std::ostringstream pct;
        pct << "config_id,level,q_mean,q_stdev\n";
        std::ostringstream bias;
        bias << "config_id,delta_mean,delta_stdev,Delta_metric,resample_total\n";
        std::ostringstream configs;
        configs << "config_id,years,pattern,count,severity\n";
        for (const auto& c : result.configs) {
            for (std::size_t l = 0; l < c.report.levels.size(); ++l)
                pct << c.id << ',' << format_number(c.report.levels[l]) << ','
                    << format_number(c.report.q_mean[l]) << ',' << format_number(c.report.q_stdev[l]) << '\n';
            bias << c.id << ',' << format_number(c.report.e_delta_mean) << ','
                 << format_number(c.report.e_delta_stdev) << ',' << format_number(c.delta_metric) << ','
                 << c.resample_total << '\n';
            const SweepPoint& p = spec.points[c.id];
            configs << c.id << ',' << p.config.years << ',' << p.pattern_text << ',' << p.count_text << ','
                    << p.severity_text << '\n';
        }
        write_atomically(dir / "percentiles.csv", pct.str());
        write_atomically(dir / "bias.csv", bias.str());
        write_atomically(dir / "configs.csv", configs.str());
    }

    if (as_json) {
        json doc = json::object();
        doc["name"] = result.name;
        doc["configs"] = json::array();
        for (const auto& c : result.configs) {
            json q_rep = json::array();
            for (const auto& row : c.report.per_replication)
                q_rep.push_back(row);
            json stdevs = json::array();
            for (double s : c.report.q_stdev)
                stdevs.push_back(number_or_null(s));
            doc["configs"].push_back({{"config_id", c.id},
                                      {"label", c.label},
                                      {"levels", c.report.levels},
                                      {"q_mean", c.report.q_mean},
                                      {"q_stdev", stdevs},
                                      {"q_per_replication", q_rep},
                                      {"delta_mean", c.report.e_delta_mean},
                                      {"delta_stdev", number_or_null(c.report.e_delta_stdev)},
                                      {"delta_mean_per_replication", c.report.e_delta_per_replication},
                                      {"Delta_metric", c.delta_metric},
                                      {"resample_total", c.resample_total}});
        }
        write_atomically(dir / "results.json", doc.dump(2) + "\n");
    }

    if (spec.dump_deltas) {
        std::ostringstream out;
        out << "config_id,replication,scenario,r_cl,r_real,mse,delta,resample_count\n";
        for (const auto& c : result.configs)
            for (std::size_t r = 0; r < c.results.size(); ++r)
                for (std::size_t s = 0; s < c.results[r].size(); ++s) {
                    const auto& x = c.results[r][s];
                    out << c.id << ',' << r << ',' << s << ',' << format_number(x.r_cl) << ','
                        << format_number(x.r_real) << ',' << format_number(x.mse) << ','
                        << format_number(x.delta) << ',' << x.resample_count << '\n';
                }
        write_atomically(dir / "deltas.csv", out.str());
    }

    json manifest = json::object();
    manifest["name"] = result.name;
    manifest["seed"] = result.seed;
    manifest["code_version"] = CLMC_VERSION;
    manifest["timestamp"] = utc_timestamp();
    manifest["levels"] = spec.levels;
    manifest["configs"] = json::array();
    for (const auto& c : result.configs) {
        const ScenarioConfig& cfg = spec.points[c.id].config;
        manifest["configs"].push_back({{"config_id", c.id},
                                       {"label", c.label},
                                       {"seed", c.seed},
                                       {"config_hash", c.config_hash},
                                       {"years", cfg.years},
                                       {"n_scenarios", cfg.n_scenarios},
                                       {"n_replications", cfg.n_replications},
                                       {"Delta_metric", c.delta_metric},
                                       {"resample_total", c.resample_total},
                                       {"resamples_per_replication", c.resamples_per_replication}});
    }
    write_atomically(dir / "manifest.json", manifest.dump(2) + "\n");
    return result;
}

// ---------------------------------------------------------------------------
// Panjer validation
// ---------------------------------------------------------------------------

PanjerCheckSpec parse_panjer_check(const json& doc)
{
    require_keys(doc, {"description", "lambda", "severity", "step", "points", "n_batches", "n_samples", "seed",
                       "csv_stride"},
                 "panjer-check");
    PanjerCheckSpec spec;
    try {
        spec.lambda = number(doc, "lambda", "panjer-check");
        spec.severity = parse_severity(field(doc, "severity", "panjer-check"));
        spec.step = number(doc, "step", "panjer-check");
        spec.points = unsigned_integer(field(doc, "points", "panjer-check"), "points");
        if (doc.contains("n_batches"))
            spec.n_batches = unsigned_integer(doc.at("n_batches"), "n_batches");
        if (doc.contains("n_samples"))
            spec.n_samples = unsigned_integer(doc.at("n_samples"), "n_samples");
        if (doc.contains("seed"))
            spec.seed = unsigned_integer(doc.at("seed"), "seed");
        if (doc.contains("csv_stride"))
            spec.csv_stride = unsigned_integer(doc.at("csv_stride"), "csv_stride");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("panjer-check: ") + e.what());
    }
    if (!(spec.lambda > 0.0))
        throw ConfigError("panjer-check: lambda must be positive");
    if (!(spec.step > 0.0))
        throw ConfigError("panjer-check: step must be positive");
    if (spec.points < 2 || spec.n_batches < 1 || spec.n_samples < 1 || spec.csv_stride < 1)
        throw ConfigError("panjer-check: points >= 2, n_batches >= 1, n_samples >= 1, csv_stride >= 1");
    return spec;
}

PanjerCheckSpec load_panjer_check(const fs::path& file)
{
    std::ifstream in(file);
    if (!in)
        throw ConfigError("cannot open " + file.string());
    try {
        return parse_panjer_check(json::parse(in));
    } catch (const json::parse_error& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }
}

std::vector<double> sample_compound_poisson(double lambda, const SeverityDistribution& severity,
                                            std::size_t n, Rng& rng)
{
    const CountDistribution count(Poisson{lambda});
    std::vector<double> out(n);
    for (double& s : out)
        s = sample_aggregate(severity, sample_count(count, rng), rng);
    return out;
}

PanjerCheckReport run_panjer_check(const PanjerCheckSpec& spec)
{
    PanjerCheckReport rep;
    const DiscretePmf sev = discretize_severity(spec.severity, spec.step, spec.points - 1);
    rep.severity_truncation = sev.truncation;
    rep.aggregate = panjer_compound_poisson(spec.lambda, sev, spec.points);
    rep.analytic_cdf = rep.aggregate.cdf();

    for (std::size_t b = 0; b < spec.n_batches; ++b) {
        Rng rng = make_stream(spec.seed, b, 0);
        const auto samples = sample_compound_poisson(spec.lambda, spec.severity, spec.n_samples, rng);
        rep.batch_ecdf.push_back(empirical_cdf_on_grid(spec.step, spec.points, samples));
    }

    rep.ecdf_mean.assign(spec.points, 0.0);
    rep.ecdf_stdev.assign(spec.points, 0.0);
    std::vector<double> column(spec.n_batches);
    for (std::size_t k = 0; k < spec.points; ++k) {
        for (std::size_t b = 0; b < spec.n_batches; ++b)
            column[b] = rep.batch_ecdf[b][k];
        rep.ecdf_mean[k] = mean(column);
        rep.ecdf_stdev[k] = spec.n_batches > 1 ? sample_stdev(column) : 0.0;
        rep.max_deviation = std::max(rep.max_deviation, std::abs(rep.analytic_cdf[k] - rep.ecdf_mean[k]));
        if (rep.ecdf_stdev[k] > 0.0) {
            ++rep.band_points;
            if (std::abs(rep.analytic_cdf[k] - rep.ecdf_mean[k]) <= 3.0 * rep.ecdf_stdev[k])
                ++rep.inside_band;
        }
    }
    return rep;
}

void write_panjer_check(const PanjerCheckSpec& spec, const PanjerCheckReport& rep, const fs::path& dir)
{
    fs::create_directories(dir);
    std::ostringstream grid;
    grid << "k,x,g,cdf";
    for (std::size_t b = 0; b < rep.batch_ecdf.size(); ++b)
        grid << ",ecdf_" << b;
    grid << ",ecdf_mean,ecdf_minus_stdev,ecdf_plus_stdev\n";
    for (std::size_t k = 0; k < rep.analytic_cdf.size(); k += spec.csv_stride) {
        grid << k << ',' << format_number(static_cast<double>(k) * spec.step) << ','
             << format_number(rep.aggregate.masses[k]) << ',' << format_number(rep.analytic_cdf[k]);
        for (const auto& e : rep.batch_ecdf)
            grid << ',' << format_number(e[k]);
        grid << ',' << format_number(rep.ecdf_mean[k]) << ','
             << format_number(rep.ecdf_mean[k] - rep.ecdf_stdev[k]) << ','
             << format_number(rep.ecdf_mean[k] + rep.ecdf_stdev[k]) << '\n';
    }
    write_atomically(dir / "panjer_grid.csv", grid.str());

    json summary = {{"lambda", spec.lambda},
                    {"severity", spec.severity.describe()},
                    {"step", spec.step},
                    {"points", spec.points},
                    {"n_batches", spec.n_batches},
                    {"n_samples", spec.n_samples},
                    {"seed", spec.seed},
                    {"severity_truncation", rep.severity_truncation},
                    {"aggregate_truncation", rep.aggregate.truncation},
                    {"max_deviation", rep.max_deviation},
                    {"band_points", rep.band_points},
                    {"inside_3sd_band", rep.inside_band},
                    {"band_fraction", rep.band_fraction()},
                    {"code_version", CLMC_VERSION}};
    write_atomically(dir / "panjer_summary.json", summary.dump(2) + "\n");
}

} // namespace clmc
