// Command-line front end: one-shot estimates on data files, seeded
// Monte-Carlo experiments against the distribution oracles, and direct
// oracle queries. Output is JSON (estimates, oracle values, experiment
// aggregates) or CSV (per-trial experiment rows).

#include "CLI11.hpp"
#include "json.hpp"

#include "updp/distributions.hpp"
#include "updp/empirical.hpp"
#include "updp/mechanisms.hpp"
#include "updp/noise.hpp"
#include "updp/privacy.hpp"
#include "updp/statistical.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitInsufficientSample = 3;
constexpr int kExitBudgetExhausted = 4;
constexpr int kExitInvalidArgument = 5;

struct CliError {
    int code;
    std::string kind;
    std::string message;
};

std::string format_double(double v) {
    char buf[40];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::vector<double> read_values(std::istream& in, const std::string& source) {
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        std::size_t e = line.find_last_not_of(" \t\r") + 1;
        double v = 0.0;
        const char* first = line.data() + b;
        const char* last = line.data() + e;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last || !std::isfinite(v))
            throw CliError{kExitParse, "parse",
                           source + ":" + std::to_string(lineno) + ": not a finite real: '" +
                               line.substr(b, e - b) + "'"};
        values.push_back(v);
    }
    return values;
}

std::vector<double> load_input(const std::string& path) {
    if (path == "-") return read_values(std::cin, "<stdin>");
    std::ifstream in(path);
    if (!in) throw CliError{kExitParse, "parse", "cannot open input file: " + path};
    return read_values(in, path);
}

json ledger_json(const updp::BudgetLedger& ledger) {
    json entries = json::array();
    for (const auto& e : ledger.entries())
        entries.push_back({{"label", e.label}, {"share", e.share.str()}, {"epsilon", e.epsilon}});
    return {{"parent_epsilon", ledger.parent_epsilon()},
            {"total_epsilon", ledger.total_epsilon()},
            {"total_share", ledger.total_share().str()},
            {"entries", entries}};
}

json range_json(const updp::IntervalRange& r) {
    return {{"lo", r.lo}, {"hi", r.hi}};
}

// Order statistic at 1-based rank ceil(q * n), the rule the aggregate
// contract documents so it can be recomputed from the CSV rows.
double quantile_of(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const double rank = std::ceil(q * static_cast<double>(values.size()));
    auto idx = static_cast<std::size_t>(std::max(1.0, rank)) - 1;
    return values[std::min(idx, values.size() - 1)];
}

double sample_mean(const updp::Dataset& data) {
    double sum = 0.0;
    for (double v : data.values()) sum += v;
    return sum / static_cast<double>(data.size());
}

double sample_variance(const updp::Dataset& data) {
    const double m = sample_mean(data);
    double sum = 0.0;
    for (double v : data.values()) sum += (v - m) * (v - m);
    return sum / static_cast<double>(data.size() - 1);
}

double sample_iqr(const updp::Dataset& data) {
    const auto n = data.size();
    const auto lo = std::max<std::size_t>(1, n / 4);
    const auto hi = std::max<std::size_t>(1, 3 * n / 4);
    return data[hi - 1] - data[lo - 1];
}

int map_exception() {
    try {
        throw;
    } catch (const CliError&) {
        throw;
    } catch (const updp::InsufficientSampleError& e) {
        throw CliError{kExitInsufficientSample, "insufficient_sample", e.what()};
    } catch (const updp::BudgetExhaustedError& e) {
        throw CliError{kExitBudgetExhausted, "budget_exhausted", e.what()};
    } catch (const std::exception& e) {
        throw CliError{kExitInvalidArgument, "invalid_argument", e.what()};
    }
}

struct CommonOptions {
    double epsilon = 1.0;
    double beta = 0.1;
    std::uint64_t seed = 1;
    bool noiseless = false;
    double bucket = 0.001;
    std::string alg7_variant = "paper-code";
    std::string variance_budget = "paper";
    double const_c1 = 40.0;
    double const_c = 40.0;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--epsilon", opt.epsilon, "Privacy budget epsilon")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--beta", opt.beta, "Failure probability beta, in (0,1)")
        ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)))
        ->capture_default_str();
    cmd->add_option("--seed", opt.seed, "Root seed for all randomness")->capture_default_str();
    cmd->add_flag("--noiseless", opt.noiseless,
                  "Debug mode: privacy noise off, sampling randomness stays live");
    cmd->add_option("--bucket", opt.bucket, "Discretization bucket for radius/range/quantile")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--alg7-variant", opt.alg7_variant,
                    "IQR lower bound return convention on the fine ladder")
        ->check(CLI::IsMember({"paper-code", "paper-proof"}))
        ->capture_default_str();
    cmd->add_option("--variance-budget", opt.variance_budget,
                    "Variance release accounting: paper (9eps/8 total) or conservative (eps)")
        ->check(CLI::IsMember({"paper", "conservative"}))
        ->capture_default_str();
    cmd->add_option("--const-c1", opt.const_c1,
                    "Universal constant in the sample-size precondition (warning only)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--const-c", opt.const_c, "Constant in the guarantee predicates")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

updp::EstimatorOptions estimator_options(const CommonOptions& opt) {
    updp::EstimatorOptions options;
    options.alg7 = opt.alg7_variant == "paper-proof" ? updp::Alg7Variant::kProof
                                                     : updp::Alg7Variant::kPseudocode;
    options.variance_budget = opt.variance_budget == "conservative"
                                  ? updp::VarianceBudget::kConservative
                                  : updp::VarianceBudget::kPaper;
    return options;
}

const std::vector<std::string> kEstimators = {"mean",   "variance", "quantile",
                                              "radius", "range",    "iqr",
                                              "iqr_lower_bound"};

bool needs_bucket(const std::string& estimator) {
    return estimator == "radius" || estimator == "range" || estimator == "quantile";
}

void warn_precondition(const std::string& estimator, std::size_t n, double rad,
                       const CommonOptions& opt) {
    if (!needs_bucket(estimator)) return;
    const double bound =
        opt.const_c1 / opt.epsilon * updp::capped_log(rad / (opt.bucket * opt.beta));
    if (static_cast<double>(n) <= bound)
        std::cerr << "warning: n = " << n << " <= (c1/epsilon)*log(rad/(b*beta)) = "
                  << format_double(bound) << "; the utility guarantee may not hold\n";
}

// ---------------------------------------------------------------------------
// estimate: one private estimate from a file of newline-separated reals.

int run_estimate(const std::string& input, const std::string& estimator, std::int64_t tau,
                 const CommonOptions& opt) {
    const std::vector<double> raw = load_input(input);
    if (raw.empty())
        throw CliError{kExitInsufficientSample, "insufficient_sample", "no input values"};

    try {
        const updp::Dataset data(raw);
        const updp::PrivacyParams params(opt.epsilon, opt.beta);
        updp::NoiseSource noise(opt.seed, opt.noiseless);
        const updp::EstimatorOptions options = estimator_options(opt);
        warn_precondition(estimator, data.size(), data.radius(), opt);

        json doc;
        json diagnostics = {{"estimator", estimator},
                            {"n", data.size()},
                            {"noiseless", opt.noiseless}};

        const auto fill_outcome = [&](const updp::EstimateOutcome& outcome) {
            doc["estimate"] = outcome.estimate;
            doc["ledger"] = ledger_json(outcome.ledger);
            if (outcome.chosen_range) diagnostics["range"] = range_json(*outcome.chosen_range);
            if (outcome.bucket) diagnostics["bucket"] = *outcome.bucket;
            diagnostics["clipped_count"] = outcome.clipped_count;
            diagnostics["negative_raw"] = outcome.negative;
        };

        if (estimator == "mean") {
            fill_outcome(updp::estimate_mean(data, params, noise, options));
        } else if (estimator == "variance") {
            fill_outcome(updp::clamp_nonnegative(
                updp::estimate_variance(data, params, noise, options)));
        } else if (estimator == "iqr") {
            fill_outcome(updp::estimate_iqr(data, params, noise, options));
        } else if (estimator == "iqr_lower_bound") {
            doc["estimate"] = updp::estimate_iqr_lower_bound(data, params, options.alg7, noise);
            updp::BudgetLedger ledger(opt.epsilon);
            ledger.charge("iqr_lower_bound", updp::Fraction{1, 1});
            doc["ledger"] = ledger_json(ledger);
        } else if (estimator == "radius") {
            doc["estimate"] = updp::radius_real(data, opt.bucket, params, noise);
            updp::BudgetLedger ledger(opt.epsilon);
            ledger.charge("radius", updp::Fraction{1, 1});
            doc["ledger"] = ledger_json(ledger);
            diagnostics["bucket"] = opt.bucket;
        } else if (estimator == "range") {
            const auto result = updp::range_real(data, opt.bucket, params, noise);
            doc["estimate"] = result.range.width();
            doc["ledger"] = ledger_json(result.ledger);
            diagnostics["range"] = range_json(result.range);
            diagnostics["center"] = result.center;
            diagnostics["radius"] = result.radius;
            diagnostics["bucket"] = opt.bucket;
        } else if (estimator == "quantile") {
            const std::int64_t rank =
                tau > 0 ? tau : std::max<std::int64_t>(1, static_cast<std::int64_t>(data.size()) / 2);
            const auto result = updp::quantile_real(data, rank, opt.bucket, params, noise);
            doc["estimate"] = result.value;
            doc["ledger"] = ledger_json(result.ledger);
            diagnostics["range"] = range_json(result.range);
            diagnostics["clipped_count"] = result.clipped_count;
            diagnostics["rank_at_most"] = result.rank_at_most;
            diagnostics["rank_at_least"] = result.rank_at_least;
            diagnostics["tau"] = rank;
            diagnostics["bucket"] = opt.bucket;
        }

        doc["epsilon"] = opt.epsilon;
        doc["beta"] = opt.beta;
        doc["seed"] = opt.seed;
        doc["diagnostics"] = diagnostics;
        std::cout << doc.dump(2) << "\n";
        return kExitOk;
    } catch (...) {
        return map_exception();
    }
}

// ---------------------------------------------------------------------------
// experiment: seeded Monte-Carlo trials against the distribution oracles.

struct TrialRow {
    std::uint64_t seed = 0;
    double estimate = 0.0;
    double truth = 0.0;
    double abs_error = 0.0;
    double baseline_error = 0.0;
    bool guarantee_ok = false;
    double ledger_total = 0.0;
};

struct TruthContext {
    std::optional<double> mean;
    std::optional<double> variance;
    double iqr = 0.0;
    double phi_16 = 0.0;
};

TrialRow run_trial(const updp::DistributionSpec& spec, const std::string& estimator,
                   std::size_t n, std::int64_t tau, const TruthContext& truth,
                   const CommonOptions& opt, const updp::EstimatorOptions& options,
                   double tolerance, std::size_t trial) {
    TrialRow row;
    row.seed = updp::NoiseSource::mix(opt.seed, trial);
    updp::NoiseSource noise(row.seed, opt.noiseless);
    const updp::Dataset data = updp::sample(spec, n, noise);
    const updp::PrivacyParams params(opt.epsilon, opt.beta);
    const double width = data.width();
    bool extra_ok = true;

    if (estimator == "mean") {
        const auto outcome = updp::estimate_mean(data, params, noise, options);
        row.estimate = outcome.estimate;
        row.truth = *truth.mean;
        row.baseline_error = std::fabs(sample_mean(data) - row.truth);
        row.ledger_total = outcome.ledger.total_epsilon();
    } else if (estimator == "variance") {
        const auto outcome =
            updp::clamp_nonnegative(updp::estimate_variance(data, params, noise, options));
        row.estimate = outcome.estimate;
        row.truth = *truth.variance;
        row.baseline_error = std::fabs(sample_variance(data) - row.truth);
        row.ledger_total = outcome.ledger.total_epsilon();
    } else if (estimator == "iqr") {
        const auto outcome = updp::estimate_iqr(data, params, noise, options);
        row.estimate = outcome.estimate;
        row.truth = truth.iqr;
        row.baseline_error = std::fabs(sample_iqr(data) - row.truth);
        row.ledger_total = outcome.ledger.total_epsilon();
    } else if (estimator == "iqr_lower_bound") {
        row.estimate = updp::estimate_iqr_lower_bound(data, params, options.alg7, noise);
        row.truth = truth.iqr;
        row.baseline_error = std::fabs(sample_iqr(data) - row.truth);
        row.ledger_total = opt.epsilon;
        extra_ok = 0.25 * truth.phi_16 <= row.estimate && row.estimate <= truth.iqr;
    } else if (estimator == "radius") {
        row.estimate = updp::radius_real(data, opt.bucket, params, noise);
        row.truth = data.radius();
        row.baseline_error = 0.0;
        row.ledger_total = opt.epsilon;
        extra_ok = row.estimate <= 2.0 * row.truth + 3.0 * opt.bucket;
    } else if (estimator == "range") {
        const auto result = updp::range_real(data, opt.bucket, params, noise);
        row.estimate = result.range.width();
        row.truth = width;
        row.baseline_error = 0.0;
        row.ledger_total = result.ledger.total_epsilon();
        std::size_t outliers = 0;
        for (double v : data.values())
            if (v < result.range.lo || v > result.range.hi) ++outliers;
        const double outlier_bound =
            opt.const_c / opt.epsilon *
            updp::capped_log(updp::capped_log(width / opt.bucket) / opt.beta);
        extra_ok = row.estimate <= 4.0 * width + 6.0 * opt.bucket &&
                   static_cast<double>(outliers) <= outlier_bound;
    } else if (estimator == "quantile") {
        const std::int64_t rank =
            tau > 0 ? tau : std::max<std::int64_t>(1, static_cast<std::int64_t>(n) / 2);
        const auto result = updp::quantile_real(data, rank, opt.bucket, params, noise);
        row.estimate = result.value;
        row.truth = updp::quantile(spec, static_cast<double>(rank) / static_cast<double>(n));
        row.baseline_error = std::fabs(data[static_cast<std::size_t>(rank) - 1] - row.truth);
        row.ledger_total = result.ledger.total_epsilon();
        std::int64_t rank_error = 0;
        if (rank < result.rank_at_least) rank_error = result.rank_at_least - rank;
        else if (rank > result.rank_at_most) rank_error = rank - result.rank_at_most;
        const double rank_bound =
            opt.const_c / opt.epsilon * updp::capped_log(width / (opt.bucket * opt.beta));
        extra_ok = static_cast<double>(rank_error) <= rank_bound;
    }

    row.abs_error = std::fabs(row.estimate - row.truth);
    row.guarantee_ok = extra_ok && row.abs_error <= tolerance;
    return row;
}

int run_experiment(const std::string& dist, const std::string& estimator, std::size_t n,
                   std::size_t trials, std::int64_t tau, double tolerance, std::size_t jobs,
                   const std::string& format, const CommonOptions& opt) {
    try {
        const updp::DistributionSpec spec = updp::parse_distribution(dist);
        const updp::EstimatorOptions options = estimator_options(opt);

        TruthContext truth;
        truth.iqr = updp::population_iqr(spec);
        if (estimator == "mean") {
            truth.mean = updp::population_mean(spec);
            if (!truth.mean)
                throw CliError{kExitInvalidArgument, "invalid_argument",
                               "population mean undefined for " + dist};
        } else if (estimator == "variance") {
            truth.variance = updp::population_variance(spec);
            if (!truth.variance)
                throw CliError{kExitInvalidArgument, "invalid_argument",
                               "population variance undefined for " + dist};
        } else if (estimator == "iqr_lower_bound") {
            truth.phi_16 = updp::phi(spec, 1.0 / 16.0);
        }

        if (needs_bucket(estimator)) {
            updp::NoiseSource probe_noise(updp::NoiseSource::mix(opt.seed, 0x70726f6265), false);
            const updp::Dataset probe = updp::sample(spec, n, probe_noise);
            warn_precondition(estimator, n, probe.radius(), opt);
        }

        std::vector<TrialRow> rows(trials);
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::atomic<std::size_t> next{0};
        const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, trials));
        const auto worker = [&] {
            for (;;) {
                const std::size_t trial = next.fetch_add(1);
                if (trial >= trials) return;
                try {
                    rows[trial] =
                        run_trial(spec, estimator, n, tau, truth, opt, options, tolerance, trial);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        };
        if (workers == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(workers);
            for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }
        if (failure) std::rethrow_exception(failure);

        if (format == "csv") {
            std::ostringstream out;
            out << "trial,seed,estimate,truth,abs_error,baseline_error,guarantee_ok,ledger_total\n";
            for (std::size_t i = 0; i < trials; ++i) {
                const TrialRow& r = rows[i];
                out << i << ',' << r.seed << ',' << format_double(r.estimate) << ','
                    << format_double(r.truth) << ',' << format_double(r.abs_error) << ','
                    << format_double(r.baseline_error) << ',' << (r.guarantee_ok ? 1 : 0) << ','
                    << format_double(r.ledger_total) << '\n';
            }
            std::cout << out.str();
            return kExitOk;
        }

        std::vector<double> abs_errors;
        std::vector<double> baseline_errors;
        std::size_t ok_count = 0;
        for (const TrialRow& r : rows) {
            abs_errors.push_back(r.abs_error);
            baseline_errors.push_back(r.baseline_error);
            ok_count += r.guarantee_ok ? 1 : 0;
        }
        const json doc = {{"dist", updp::format_distribution(spec)},
                          {"estimator", estimator},
                          {"n", n},
                          {"trials", trials},
                          {"epsilon", opt.epsilon},
                          {"beta", opt.beta},
                          {"seed", opt.seed},
                          {"noiseless", opt.noiseless},
                          {"median_abs_error", quantile_of(abs_errors, 0.5)},
                          {"q25_abs_error", quantile_of(abs_errors, 0.25)},
                          {"q75_abs_error", quantile_of(abs_errors, 0.75)},
                          {"median_baseline_error", quantile_of(baseline_errors, 0.5)},
                          {"guarantee_frequency",
                           static_cast<double>(ok_count) / static_cast<double>(trials)}};
        std::cout << doc.dump(2) << "\n";
        return kExitOk;
    } catch (...) {
        return map_exception();
    }
}

// ---------------------------------------------------------------------------
// oracle: population quantities for a distribution spec.

json oracle_value(const updp::DistributionSpec& spec, const std::string& token,
                  std::uint64_t seed) {
    const auto at = token.find('@');
    const std::string name = token.substr(0, at);
    const std::string arg = at == std::string::npos ? "" : token.substr(at + 1);
    const auto parse_num = [&](const std::string& text) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size())
            throw std::invalid_argument("oracle: bad number in quantity '" + token + "'");
        return v;
    };
    const auto opt_json = [](const std::optional<double>& v) {
        return v ? json(*v) : json(nullptr);
    };

    if (name == "mean" && at == std::string::npos) return opt_json(updp::population_mean(spec));
    if (name == "variance" && at == std::string::npos)
        return opt_json(updp::population_variance(spec));
    if (name == "iqr" && at == std::string::npos) return json(updp::population_iqr(spec));
    if (name == "phi" && at != std::string::npos) return json(updp::phi(spec, parse_num(arg)));
    if (name == "theta" && at != std::string::npos) return json(updp::theta(spec, parse_num(arg)));
    if (name == "moment" && at != std::string::npos) {
        const double k = parse_num(arg);
        if (k < 1.0 || k != std::floor(k))
            throw std::invalid_argument("oracle: moment order must be a positive integer");
        return opt_json(updp::central_moment(spec, static_cast<int>(k)));
    }
    if (name == "tail" && at != std::string::npos) {
        const auto tails = updp::tail_expectation(spec, parse_num(arg));
        if (!tails) return json(nullptr);
        return json{{"lower", tails->lower}, {"upper", tails->upper}};
    }
    if (name == "width" && at != std::string::npos) {
        std::vector<std::string> parts;
        std::size_t pos = 0;
        while (pos <= arg.size()) {
            auto colon = arg.find(':', pos);
            if (colon == std::string::npos) colon = arg.size();
            parts.push_back(arg.substr(pos, colon - pos));
            pos = colon + 1;
        }
        if (parts.size() < 2 || parts.size() > 3)
            throw std::invalid_argument("oracle: width takes m:beta or m:beta:trials");
        const double m = parse_num(parts[0]);
        const double beta = parse_num(parts[1]);
        const double trials = parts.size() == 3 ? parse_num(parts[2]) : 2000.0;
        if (m < 2.0 || m != std::floor(m))
            throw std::invalid_argument("oracle: width m must be an integer >= 2");
        if (trials < 1.0 || trials != std::floor(trials))
            throw std::invalid_argument("oracle: width trials must be a positive integer");
        updp::NoiseSource noise(seed, false);
        return json(updp::statistical_width(spec, static_cast<std::size_t>(m), beta,
                                            static_cast<std::size_t>(trials), noise));
    }
    throw std::invalid_argument("oracle: unknown quantity '" + token + "'");
}

int run_oracle(const std::string& dist, const std::string& quantities, std::uint64_t seed) {
    try {
        const updp::DistributionSpec spec = updp::parse_distribution(dist);
        json values = json::object();
        std::size_t pos = 0;
        while (pos <= quantities.size()) {
            auto comma = quantities.find(',', pos);
            if (comma == std::string::npos) comma = quantities.size();
            const std::string token = quantities.substr(pos, comma - pos);
            if (!token.empty()) values[token] = oracle_value(spec, token, seed);
            pos = comma + 1;
        }
        const json doc = {{"dist", updp::format_distribution(spec)}, {"quantities", values}};
        std::cout << doc.dump(2) << "\n";
        return kExitOk;
    } catch (...) {
        return map_exception();
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Universal differentially private estimators for mean, variance, and IQR"};
    app.require_subcommand(1);

    CommonOptions est_opt;
    std::string est_input = "-";
    std::string est_estimator = "mean";
    std::int64_t est_tau = 0;
    CLI::App* estimate = app.add_subcommand(
        "estimate", "One private estimate from newline-separated reals (file or stdin)");
    estimate->add_option("--input", est_input, "Input file path, or - for stdin")
        ->capture_default_str();
    estimate->add_option("--estimator", est_estimator, "Which estimator to run")
        ->check(CLI::IsMember(kEstimators))
        ->capture_default_str();
    estimate->add_option("--tau-rank", est_tau, "Target rank for quantile (default n/2)")
        ->check(CLI::NonNegativeNumber);
    add_common_flags(estimate, est_opt);

    CommonOptions exp_opt;
    std::string exp_dist = "gaussian:mu=0,sigma=1";
    std::string exp_estimator = "mean";
    std::size_t exp_n = 1000;
    std::size_t exp_trials = 100;
    std::int64_t exp_tau = 0;
    double exp_tolerance = std::numeric_limits<double>::infinity();
    std::size_t exp_jobs = 1;
    std::string exp_format = "csv";
    CLI::App* experiment =
        app.add_subcommand("experiment", "Seeded Monte-Carlo trials against the oracles");
    experiment->add_option("--dist", exp_dist, "Distribution spec, e.g. gaussian:mu=0,sigma=1")
        ->capture_default_str();
    experiment->add_option("--estimator", exp_estimator, "Which estimator to run")
        ->check(CLI::IsMember(kEstimators))
        ->capture_default_str();
    experiment->add_option("--n", exp_n, "Sample size per trial")
        ->check(CLI::Range(static_cast<std::size_t>(2), std::numeric_limits<std::size_t>::max()))
        ->capture_default_str();
    experiment->add_option("--trials", exp_trials, "Number of independent trials")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    experiment->add_option("--tau-rank", exp_tau, "Target rank for quantile (default n/2)")
        ->check(CLI::NonNegativeNumber);
    experiment->add_option("--tolerance", exp_tolerance,
                           "guarantee_ok also requires abs_error <= tolerance");
    experiment->add_option("--jobs", exp_jobs, "Worker threads (rows stay ordered by trial)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    experiment->add_option("--format", exp_format, "csv: per-trial rows; json: aggregate")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    add_common_flags(experiment, exp_opt);

    std::string ora_dist;
    std::string ora_quantities = "mean,variance,iqr";
    std::uint64_t ora_seed = 1;
    CLI::App* oracle = app.add_subcommand("oracle", "Population quantities for a distribution");
    oracle->add_option("--dist", ora_dist, "Distribution spec")->required();
    oracle
        ->add_option("--quantities", ora_quantities,
                     "Comma list: mean,variance,iqr,phi@L,theta@K,moment@K,tail@XI,width@M:B[:T]")
        ->capture_default_str();
    oracle->add_option("--seed", ora_seed, "Seed for Monte-Carlo quantities")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (estimate->parsed()) return run_estimate(est_input, est_estimator, est_tau, est_opt);
        if (experiment->parsed())
            return run_experiment(exp_dist, exp_estimator, exp_n, exp_trials, exp_tau,
                                  exp_tolerance, exp_jobs, exp_format, exp_opt);
        return run_oracle(ora_dist, ora_quantities, ora_seed);
    } catch (const CliError& e) {
        const json doc = {{"error", e.kind}, {"message", e.message}};
        std::cout << doc.dump() << "\n";
        return e.code;
    }
}
