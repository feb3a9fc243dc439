// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances and trial counts are pinned here on purpose so a
// regression shows up as a flipped line, not a silently moved goalpost.

#include "oracles.hpp"
#include "updp/distributions.hpp"
#include "updp/empirical.hpp"
#include "updp/mechanisms.hpp"
#include "updp/noise.hpp"
#include "updp/privacy.hpp"
#include "updp/statistical.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

using updp::Dataset;
using updp::IntDataset;
using updp::IntInterval;
using updp::NoiseSource;
using updp::PrivacyParams;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool report(int idx, bool ok, const std::string& detail, double elapsed, double budget) {
    const bool pass = ok && elapsed <= budget;
    std::printf("[%s] criterion %d: %s (%.1fs)\n", pass ? "PASS" : "FAIL", idx, detail.c_str(),
                elapsed);
    return pass;
}

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof buf, pattern, args);
    va_end(args);
    return std::string(buf);
}

// --------------------------------------------------------------------------
// 1. path_length equals the brute-force edit oracle on every dataset with
//    n <= 6 over domain [0,10]; sampling within TV 0.02 of the enumerated
//    distribution on small domains with 1e5 draws.

bool criterion_mechanism_correctness() {
    const auto t0 = Clock::now();
    const IntInterval domain{0, 10};
    std::size_t datasets = 0;
    std::size_t mismatches = 0;

    std::vector<std::int64_t> values;
    const std::function<void(std::int64_t)> enumerate = [&](std::int64_t lo) {
        if (!values.empty()) {
            ++datasets;
            const IntDataset data(values);
            const auto n = static_cast<std::int64_t>(values.size());
            for (std::int64_t tau = 1; tau <= n; ++tau)
                for (std::int64_t y = domain.lo; y <= domain.hi; ++y)
                    if (updp::path_length(data, tau, y) !=
                        testutil::brute_force_path_length(data, tau, domain, y))
                        ++mismatches;
        }
        if (values.size() == 6) return;
        for (std::int64_t v = lo; v <= domain.hi; ++v) {
            values.push_back(v);
            enumerate(v);
            values.pop_back();
        }
    };
    enumerate(domain.lo);

    struct SamplingConfig {
        std::vector<std::int64_t> data;
        std::int64_t tau;
        IntInterval domain;
        double epsilon;
    };
    const std::vector<SamplingConfig> configs = {
        {{1, 2, 3}, 2, {0, 4}, 2.0},
        {{0, 5, 5, 9}, 3, {0, 19}, 0.7},
        {{2, 2, 2, 2}, 1, {0, 10}, 1.0},
        {{4, 7}, 1, {0, 15}, 0.4},
    };
    double max_tv = 0.0;
    for (std::size_t c = 0; c < configs.size(); ++c) {
        const auto& cfg = configs[c];
        const IntDataset data(cfg.data);
        const auto expected = testutil::enumerate_inv_distribution(data, cfg.tau, cfg.domain,
                                                                   cfg.epsilon);
        std::vector<double> observed(expected.size(), 0.0);
        NoiseSource noise(NoiseSource::mix(1001, c));
        const std::size_t draws = 100000;
        for (std::size_t i = 0; i < draws; ++i) {
            const auto y = updp::inv_quantile_sample(data, cfg.tau, cfg.domain, cfg.epsilon,
                                                     noise);
            observed[static_cast<std::size_t>(y - cfg.domain.lo)] += 1.0 / draws;
        }
        max_tv = std::max(max_tv, testutil::total_variation(expected, observed));
    }

    const bool ok = mismatches == 0 && max_tv <= 0.02;
    return report(1, ok,
                  fmt("path_length exact on %zu datasets (%zu mismatches), max sampling TV %.4f",
                      datasets, mismatches, max_tv),
                  seconds_since(t0), 60.0);
}

// --------------------------------------------------------------------------
// 2. SVT: noiseless determinism on 100 random streams; with noise, a stream
//    whose k2-th query clears the threshold by (6/eps)log(2/beta) stops by
//    k2 in at least 1 - beta - 0.05 of 1e4 trials.

bool criterion_svt_contract() {
    const auto t0 = Clock::now();

    std::size_t deterministic = 0;
    NoiseSource rng(NoiseSource::mix(2002, 777));
    for (int s = 0; s < 100; ++s) {
        const std::size_t len = 1 + rng.next_u64() % 30;
        std::vector<double> stream(len);
        for (auto& v : stream)
            v = static_cast<double>(rng.uniform_int(-10, 10));
        const double threshold = static_cast<double>(rng.uniform_int(-10, 10));
        std::size_t expected = 0;
        for (std::size_t i = 0; i < len; ++i)
            if (stream[i] > threshold) {
                expected = i + 1;
                break;
            }
        NoiseSource silent(NoiseSource::mix(2002, static_cast<std::uint64_t>(s)), true);
        try {
            const auto got = updp::svt(threshold, 1.0,
                                       [&](std::size_t i) { return stream[i - 1]; }, len, silent);
            if (expected != 0 && got == expected) ++deterministic;
        } catch (const updp::BudgetExhaustedError&) {
            if (expected == 0) ++deterministic;
        }
    }

    const double epsilon = 1.0;
    const double beta = 0.1;
    const double threshold = 10.0;
    const std::size_t k2 = 5;
    const double loud = threshold + 6.0 / epsilon * updp::capped_log(2.0 / beta);
    std::size_t early = 0;
    const std::size_t trials = 10000;
    for (std::size_t t = 0; t < trials; ++t) {
        NoiseSource noise(NoiseSource::mix(2003, t));
        try {
            const auto idx = updp::svt(threshold, epsilon,
                                       [&](std::size_t i) { return i < k2 ? 0.0 : loud; }, 10,
                                       noise);
            if (idx <= k2) ++early;
        } catch (const updp::BudgetExhaustedError&) {
        }
    }
    const double freq = static_cast<double>(early) / static_cast<double>(trials);

    const bool ok = deterministic == 100 && freq >= 1.0 - beta - 0.05;
    return report(2, ok,
                  fmt("noiseless determinism %zu/100, stop<=k2 frequency %.4f (need >= %.2f)",
                      deterministic, freq, 1.0 - beta - 0.05),
                  seconds_since(t0), 60.0);
}

// --------------------------------------------------------------------------
// 3. Radius guarantee: 500 trials, 1000 uniform integers in [-100,100],
//    eps=0.5, beta=0.1: estimate <= 2*rad(D) + 3b in >= 85% of trials.

bool criterion_radius_guarantee() {
    const auto t0 = Clock::now();
    const double bucket = 1.0;
    const PrivacyParams params(0.5, 0.1);
    const std::size_t trials = 500;
    std::size_t ok_count = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        NoiseSource noise(NoiseSource::mix(3003, t));
        std::vector<double> values(1000);
        for (auto& v : values) v = static_cast<double>(noise.uniform_int(-100, 100));
        const Dataset data(values);
        const double estimate = updp::radius_real(data, bucket, params, noise);
        if (estimate <= 2.0 * data.radius() + 3.0 * bucket) ++ok_count;
    }
    const double freq = static_cast<double>(ok_count) / static_cast<double>(trials);
    return report(3, freq >= 0.85,
                  fmt("rad <= 2*rad(D)+3b in %.1f%% of %zu trials (need >= 85%%)", 100.0 * freq,
                      trials),
                  seconds_since(t0), 60.0);
}

// --------------------------------------------------------------------------
// 4. Range guarantee on discretized Gaussians: width <= 4*gamma + 6b and
//    outliers <= (40/eps)*clog(clog(gamma/b)/beta) in >= 85% of 300 trials.

bool criterion_range_guarantee() {
    const auto t0 = Clock::now();
    const double bucket = 0.01;
    const double epsilon = 0.5;
    const double beta = 0.1;
    const PrivacyParams params(epsilon, beta);
    const std::size_t trials = 300;
    std::size_t ok_count = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        NoiseSource noise(NoiseSource::mix(4004, t));
        const Dataset data = updp::sample(updp::Gaussian{0.0, 1.0}, 1000, noise);
        const auto result = updp::range_real(data, bucket, params, noise);
        const double gamma = data.width();
        std::size_t outliers = 0;
        for (double v : data.values())
            if (v < result.range.lo || v > result.range.hi) ++outliers;
        const double outlier_bound =
            40.0 / epsilon * updp::capped_log(updp::capped_log(gamma / bucket) / beta);
        if (result.range.width() <= 4.0 * gamma + 6.0 * bucket &&
            static_cast<double>(outliers) <= outlier_bound)
            ++ok_count;
    }
    const double freq = static_cast<double>(ok_count) / static_cast<double>(trials);
    return report(4, freq >= 0.85,
                  fmt("width and outlier bounds hold in %.1f%% of %zu trials (need >= 85%%)",
                      100.0 * freq, trials),
                  seconds_since(t0), 120.0);
}

// --------------------------------------------------------------------------
// 5. Quantile rank error: <= (40/eps)*clog(gamma/(b*beta)) in >= 85% of 300
//    trials.

bool criterion_quantile_guarantee() {
    const auto t0 = Clock::now();
    const double bucket = 0.01;
    const double epsilon = 0.5;
    const double beta = 0.1;
    const PrivacyParams params(epsilon, beta);
    const std::size_t trials = 300;
    const std::int64_t tau = 500;
    std::size_t ok_count = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        NoiseSource noise(NoiseSource::mix(5005, t));
        const Dataset data = updp::sample(updp::Gaussian{0.0, 1.0}, 1000, noise);
        const auto result = updp::quantile_real(data, tau, bucket, params, noise);
        std::int64_t rank_error = 0;
        if (tau < result.rank_at_least) rank_error = result.rank_at_least - tau;
        else if (tau > result.rank_at_most) rank_error = tau - result.rank_at_most;
        const double bound =
            40.0 / epsilon * updp::capped_log(data.width() / (bucket * beta));
        if (static_cast<double>(rank_error) <= bound) ++ok_count;
    }
    const double freq = static_cast<double>(ok_count) / static_cast<double>(trials);
    return report(5, freq >= 0.85,
                  fmt("rank error bound holds in %.1f%% of %zu trials (need >= 85%%)",
                      100.0 * freq, trials),
                  seconds_since(t0), 120.0);
}

// --------------------------------------------------------------------------
// 6. IQR lower bound sandwich on N(0,1), n=4000, eps=1, beta=0.1:
//    0.25*phi(1/16) <= bound <= IQR with frequency >= 0.85 over 300 trials.

bool criterion_lower_bound_sandwich() {
    const auto t0 = Clock::now();
    const double phi_16 = 0.1566;
    const double iqr = 1.3490;
    const std::size_t trials = 300;
    std::size_t ok_count = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        NoiseSource noise(NoiseSource::mix(6006, t));
        const Dataset data = updp::sample(updp::Gaussian{0.0, 1.0}, 4000, noise);
        const double bound = updp::estimate_iqr_lower_bound(data, PrivacyParams(1.0, 0.1),
                                                            updp::Alg7Variant::kPseudocode,
                                                            noise);
        if (0.25 * phi_16 <= bound && bound <= iqr) ++ok_count;
    }
    const double freq = static_cast<double>(ok_count) / static_cast<double>(trials);
    return report(6, freq >= 0.85,
                  fmt("sandwich holds in %.1f%% of %zu trials (need >= 85%%)", 100.0 * freq,
                      trials),
                  seconds_since(t0), 60.0);
}

// --------------------------------------------------------------------------
// 7. Universal mean, n=1e5, eps=0.5, 200 trials: median private error at
//    most 5x the nonprivate sample-mean error on N(0,1), and at most 10x on
//    Student-t(3) with the identical estimator.

struct MeanRatio {
    double ratio;
    double median_private;
    double median_baseline;
};

MeanRatio mean_error_ratio(const updp::DistributionSpec& spec, double truth,
                           std::uint64_t seed_tag) {
    const std::size_t trials = 200;
    std::vector<double> private_errors;
    std::vector<double> baseline_errors;
    for (std::size_t t = 0; t < trials; ++t) {
        NoiseSource noise(NoiseSource::mix(seed_tag, t));
        const Dataset data = updp::sample(spec, 100000, noise);
        const auto outcome = updp::estimate_mean(data, PrivacyParams(0.5, 0.1), noise);
        private_errors.push_back(std::fabs(outcome.estimate - truth));
        double sum = 0.0;
        for (double v : data.values()) sum += v;
        baseline_errors.push_back(std::fabs(sum / static_cast<double>(data.size()) - truth));
    }
    const double mp = testutil::median(private_errors);
    const double mb = testutil::median(baseline_errors);
    return {mp / mb, mp, mb};
}

bool criterion_universal_mean() {
    const auto t0 = Clock::now();
    const auto gauss = mean_error_ratio(updp::Gaussian{0.0, 1.0}, 0.0, 7007);
    const auto heavy = mean_error_ratio(updp::StudentT{3.0, 0.0, 1.0}, 0.0, 7008);
    const bool ok = gauss.ratio <= 5.0 && heavy.ratio <= 10.0;
    return report(7, ok,
                  fmt("median error ratio %.2fx on N(0,1) (need <= 5x), %.2fx on t(3) "
                      "(need <= 10x)",
                      gauss.ratio, heavy.ratio),
                  seconds_since(t0), 600.0);
}

// --------------------------------------------------------------------------
// 8. Universal variance on N(5,1), n=1e5, eps=1, 200 trials: median
//    |estimate - 1| <= 0.1.

bool criterion_universal_variance() {
    const auto t0 = Clock::now();
    const std::size_t trials = 200;
    std::vector<double> errors;
    for (std::size_t t = 0; t < trials; ++t) {
        NoiseSource noise(NoiseSource::mix(8008, t));
        const Dataset data = updp::sample(updp::Gaussian{5.0, 1.0}, 100000, noise);
        const auto outcome = updp::estimate_variance(data, PrivacyParams(1.0, 0.1), noise);
        errors.push_back(std::fabs(outcome.estimate - 1.0));
    }
    const double med = testutil::median(errors);
    return report(8, med <= 0.1,
                  fmt("median |variance error| %.4f over %zu trials (need <= 0.1)", med, trials),
                  seconds_since(t0), 600.0);
}

// --------------------------------------------------------------------------
// 9. IQR estimator on N(0,1), eps=1: |estimate - 1.3490| <= 0.1 in >= 80%
//    of 200 trials at n=1e5, and median error strictly decreases from
//    n=1e4 to n=1e5.

std::vector<double> iqr_errors(std::size_t n, std::uint64_t seed_tag) {
    const std::size_t trials = 200;
    std::vector<double> errors;
    for (std::size_t t = 0; t < trials; ++t) {
        NoiseSource noise(NoiseSource::mix(seed_tag, t));
        const Dataset data = updp::sample(updp::Gaussian{0.0, 1.0}, n, noise);
        const auto outcome = updp::estimate_iqr(data, PrivacyParams(1.0, 0.1), noise);
        errors.push_back(std::fabs(outcome.estimate - 1.3490));
    }
    return errors;
}

bool criterion_iqr_estimator() {
    const auto t0 = Clock::now();
    const auto coarse = iqr_errors(10000, 9010);
    const auto fine = iqr_errors(100000, 9009);
    std::size_t within = 0;
    for (double e : fine)
        if (e <= 0.1) ++within;
    const double freq = static_cast<double>(within) / static_cast<double>(fine.size());
    const double med_fine = testutil::median(fine);
    const double med_coarse = testutil::median(coarse);
    const bool ok = freq >= 0.80 && med_fine < med_coarse;
    return report(9, ok,
                  fmt("within 0.1 in %.1f%% at n=1e5 (need >= 80%%), median error %.4f at n=1e5 "
                      "vs %.4f at n=1e4",
                      100.0 * freq, med_fine, med_coarse),
                  seconds_since(t0), 600.0);
}

// --------------------------------------------------------------------------
// 10. Budget ledgers: mean and iqr ledgers sum to exactly eps on every run;
//     variance equals 9eps/8 in paper mode and exactly eps in conservative
//     mode. 100 runs each.

bool criterion_budget_ledgers() {
    const auto t0 = Clock::now();
    const double epsilons[4] = {0.25, 0.5, 1.0, 2.0};
    updp::EstimatorOptions paper;
    paper.variance_budget = updp::VarianceBudget::kPaper;
    updp::EstimatorOptions conservative;
    conservative.variance_budget = updp::VarianceBudget::kConservative;
    std::size_t violations = 0;
    for (std::size_t t = 0; t < 100; ++t) {
        const double eps = epsilons[t % 4];
        const PrivacyParams params(eps, 0.1);
        NoiseSource noise(NoiseSource::mix(1010, t));
        const Dataset data = updp::sample(updp::Gaussian{0.0, 1.0}, 20000, noise);

        const auto mean = updp::estimate_mean(data, params, noise);
        if (mean.ledger.total_epsilon() != eps ||
            !(mean.ledger.total_share() == updp::Fraction{1, 1}))
            ++violations;

        const auto iqr = updp::estimate_iqr(data, params, noise);
        if (iqr.ledger.total_epsilon() != eps ||
            !(iqr.ledger.total_share() == updp::Fraction{1, 1}))
            ++violations;

        const auto naive = updp::estimate_variance(data, params, noise, paper);
        if (!(naive.ledger.total_share() == updp::Fraction{9, 8}) ||
            std::fabs(naive.ledger.total_epsilon() - 9.0 * eps / 8.0) > 1e-12)
            ++violations;

        const auto capped = updp::estimate_variance(data, params, noise, conservative);
        if (capped.ledger.total_epsilon() != eps ||
            !(capped.ledger.total_share() == updp::Fraction{1, 1}))
            ++violations;
    }
    return report(10, violations == 0,
                  fmt("%zu ledger violations across 100 runs of each estimator", violations),
                  seconds_since(t0), 60.0);
}

// --------------------------------------------------------------------------
// 11. Oracle consistency: phi(1/2) <= IQR <= 4*sigma and gamma(2,3/4) <= IQR
//     for the shipped finite-variance specs; the width and central-moment
//     connection inequalities hold by Monte-Carlo within 5% slack.

bool criterion_oracle_consistency() {
    const auto t0 = Clock::now();
    const std::vector<std::string> specs = {
        "gaussian:mu=0,sigma=1",  "gaussian:mu=5,sigma=2",
        "uniform:a=-1,b=3",       "student_t:nu=5",
        "pareto:shape=3,scale=1", "lognormal:mu=0,sigma=0.5",
        "point_mass:c=2",
    };
    std::size_t chain_violations = 0;
    NoiseSource noise(NoiseSource::mix(1111, 0));
    for (const auto& text : specs) {
        const auto spec = updp::parse_distribution(text);
        const double iqr = updp::population_iqr(spec);
        const double sigma = std::sqrt(updp::population_variance(spec).value());
        if (updp::phi(spec, 0.5) > iqr + 1e-9) ++chain_violations;
        if (iqr > 4.0 * sigma + 1e-9) ++chain_violations;
        const double gamma2 = updp::statistical_width(spec, 2, 0.75, 20000, noise);
        if (gamma2 > 1.02 * iqr + 1e-9) ++chain_violations;
    }

    const updp::DistributionSpec gauss = updp::Gaussian{0.0, 1.0};
    const std::size_t m = 20;
    const double beta = 0.25;
    const double gamma_pairs = updp::statistical_width(gauss, 2 * m, beta, 20000, noise);
    std::vector<double> widths;
    widths.reserve(20000);
    for (std::size_t t = 0; t < 20000; ++t) {
        double lo = 0.0;
        double hi = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double x = updp::quantile(gauss, noise.uniform_open());
            const double y = updp::quantile(gauss, noise.uniform_open());
            const double z = (x - y) * (x - y);
            if (k == 0) {
                lo = z;
                hi = z;
            } else {
                lo = std::min(lo, z);
                hi = std::max(hi, z);
            }
        }
        widths.push_back(hi - lo);
    }
    std::sort(widths.begin(), widths.end());
    const auto idx = static_cast<std::size_t>(
                         std::max(1.0, std::ceil((1.0 - beta) * widths.size()))) -
                     1;
    const double gamma_t = widths[std::min(idx, widths.size() - 1)];
    const bool width_lemma = gamma_t <= 1.05 * gamma_pairs * gamma_pairs;

    bool moment_lemma = true;
    double moment_ratio = 0.0;
    for (const int k : {4, 6}) {
        const double mu_k = updp::central_moment(gauss, k).value();
        double sum = 0.0;
        const std::size_t draws = 400000;
        for (std::size_t i = 0; i < draws; ++i) {
            const double x = updp::quantile(gauss, noise.uniform_open());
            const double y = updp::quantile(gauss, noise.uniform_open());
            const double z = (x - y) * (x - y);
            sum += std::pow(std::fabs(z - 2.0), 0.5 * k);
        }
        const double mu_t = sum / static_cast<double>(draws);
        const double bound = 1.05 * std::pow(2.0, k) * mu_k;
        moment_ratio = std::max(moment_ratio, mu_t / bound);
        if (mu_t > bound) moment_lemma = false;
    }

    const bool ok = chain_violations == 0 && width_lemma && moment_lemma;
    return report(11, ok,
                  fmt("%zu chain violations, width lemma ratio %.3f, moment lemma ratio %.3f "
                      "(both need <= 1)",
                      chain_violations, gamma_t / (gamma_pairs * gamma_pairs), moment_ratio),
                  seconds_since(t0), 120.0);
}

bool guarded(int idx, bool (*criterion)()) {
    try {
        return criterion();
    } catch (const std::exception& e) {
        std::printf("[FAIL] criterion %d: unhandled exception: %s\n", idx, e.what());
        return false;
    }
}

}  // namespace

int main() {
    bool all = true;
    all &= guarded(1, criterion_mechanism_correctness);
    all &= guarded(2, criterion_svt_contract);
    all &= guarded(3, criterion_radius_guarantee);
    all &= guarded(4, criterion_range_guarantee);
    all &= guarded(5, criterion_quantile_guarantee);
    all &= guarded(6, criterion_lower_bound_sandwich);
    all &= guarded(7, criterion_universal_mean);
    all &= guarded(8, criterion_universal_variance);
    all &= guarded(9, criterion_iqr_estimator);
    all &= guarded(10, criterion_budget_ledgers);
    all &= guarded(11, criterion_oracle_consistency);
    std::printf("%s\n", all ? "acceptance: all criteria passed"
                            : "acceptance: at least one criterion failed");
    return all ? 0 : 1;
}
