#include "updp/statistical.hpp"

#include <cmath>

#include "updp/mechanisms.hpp"

namespace updp {

PairedDifferences pair_differences(const Dataset& data, PairMode mode, NoiseSource& noise) {
    const std::size_t n = data.size();
    if (n < 2) throw std::invalid_argument("pair_differences: need at least 2 elements");
    std::vector<double> shuffled = data.values();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto j = static_cast<std::size_t>(
            noise.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(n - 1)));
        std::swap(shuffled[i], shuffled[j]);
    }
    std::vector<double> diffs;
    diffs.reserve(n / 2);
    for (std::size_t i = 0; i + 1 < n; i += 2) {
        const double d = shuffled[i] - shuffled[i + 1];
        diffs.push_back(mode == PairMode::kAbsolute ? std::fabs(d) : d * d);
    }
    return PairedDifferences{Dataset(std::move(diffs))};
}

EstimateOutcome clamp_nonnegative(EstimateOutcome outcome) {
    if (outcome.estimate < 0.0) outcome.estimate = 0.0;
    return outcome;
}

double iqr_lower_bound_from_differences(const Dataset& differences, PrivacyParams params,
                                        Alg7Variant variant, NoiseSource& noise) {
    if (differences.empty())
        throw std::invalid_argument("iqr_lower_bound_from_differences: empty differences");
    const double pairs = static_cast<double>(differences.size());
    const double threshold = 3.0 * pairs / 16.0;
    const double half_eps = params.epsilon / 2.0;

    const std::size_t up = svt(
        threshold, half_eps,
        [&differences](std::size_t i) {
            return static_cast<double>(count_within(differences, std::exp2(static_cast<double>(i) - 1.0)));
        },
        kLadderMaxQueries, noise);
    if (up > 1) return std::exp2(static_cast<double>(up) - 2.0);

    // Count(G, 1) already cleared the threshold: walk the scale downward
    // until the count falls under it.
    const std::size_t down = svt_below(
        threshold, half_eps,
        [&differences](std::size_t j) {
            return static_cast<double>(count_within(differences, std::exp2(1.0 - static_cast<double>(j))));
        },
        kLadderMaxQueries, noise);
    const double exponent =
        variant == Alg7Variant::kPseudocode ? -static_cast<double>(down) : 1.0 - static_cast<double>(down);
    return std::exp2(exponent);
}

double estimate_iqr_lower_bound(const Dataset& data, PrivacyParams params,
                                Alg7Variant variant, NoiseSource& noise) {
    if (data.size() < 2) throw InsufficientSampleError("estimate_iqr_lower_bound: need n >= 2");
    const PairedDifferences diffs = pair_differences(data, PairMode::kAbsolute, noise);
    return iqr_lower_bound_from_differences(diffs.values, params, variant, noise);
}

EstimateOutcome estimate_mean(const Dataset& data, PrivacyParams params,
                              NoiseSource& noise, const EstimatorOptions& options) {
    const std::size_t n = data.size();
    if (n < 2) throw InsufficientSampleError("estimate_mean: need n >= 2");
    const auto sample_size = static_cast<std::size_t>(
        std::min(static_cast<double>(n), std::floor(params.epsilon * static_cast<double>(n))));
    if (sample_size < 2)
        throw InsufficientSampleError("estimate_mean: need floor(eps * n) >= 2");

    const double bound =
        estimate_iqr_lower_bound(data, params.scaled({1, 8}, {1, 9}), options.alg7, noise);

    const Dataset sampled = subsample(data, sample_size, noise);
    const double eps_sub = deamplify(params.epsilon, std::min(params.epsilon, 1.0));
    const RealRangeResult located =
        range_real(sampled, bound, PrivacyParams(0.75 * eps_sub, params.beta / 9.0), noise);

    const double prenoise = clipped_mean(data, located.range);
    const double width = located.range.width();
    double released = prenoise;
    if (width > 0.0)
        released += sample_laplace(8.0 * width / (params.epsilon * static_cast<double>(n)), noise);

    std::int64_t outside = 0;
    for (const double v : data.values())
        if (!located.range.contains(v)) ++outside;

    EstimateOutcome outcome;
    outcome.estimate = released;
    outcome.prenoise = prenoise;
    outcome.chosen_range = located.range;
    outcome.clipped_count = outside;
    outcome.bucket = bound;
    outcome.ledger = BudgetLedger(params.epsilon);
    outcome.ledger.charge("iqr_lower_bound", {1, 8});
    // Charged at the subsampling-amplification upper bound; the realized
    // amplified value is strictly smaller.
    outcome.ledger.charge("range_on_subsample", {3, 4});
    outcome.ledger.charge("mean_release", {1, 8});
    return outcome;
}

EstimateOutcome estimate_variance(const Dataset& data, PrivacyParams params,
                                  NoiseSource& noise, const EstimatorOptions& options) {
    const std::size_t n = data.size();
    if (n < 4) throw InsufficientSampleError("estimate_variance: need n >= 4");

    const double bound =
        estimate_iqr_lower_bound(data, params.scaled({1, 8}, {1, 7}), options.alg7, noise);

    const PairedDifferences squares = pair_differences(data, PairMode::kSquared, noise);
    const std::size_t pairs = squares.pair_count();
    const auto sample_size = static_cast<std::size_t>(std::min(
        static_cast<double>(pairs), std::floor(params.epsilon * static_cast<double>(pairs))));
    if (sample_size < 2)
        throw InsufficientSampleError("estimate_variance: need floor(eps * n/2) >= 2");
    const Dataset sampled = subsample(squares.values, sample_size, noise);

    const double eps_sub = deamplify(params.epsilon, std::min(params.epsilon, 1.0));
    const double rad = radius_real(sampled, bound * bound,
                                   PrivacyParams(0.75 * eps_sub, params.beta / 7.0), noise);

    const double prenoise_mean = clipped_mean(squares.values, 0.0, rad);
    const bool conservative = options.variance_budget == VarianceBudget::kConservative;
    double released = prenoise_mean;
    if (rad > 0.0) {
        const double scale =
            (conservative ? 16.0 : 8.0) * rad / (params.epsilon * static_cast<double>(n));
        released += sample_laplace(scale, noise);
    }
    released *= 0.5;

    std::int64_t outside = 0;
    for (const double v : squares.values.values())
        if (v > rad) ++outside;

    EstimateOutcome outcome;
    outcome.estimate = released;
    outcome.prenoise = 0.5 * prenoise_mean;
    outcome.chosen_range = IntervalRange{0.0, rad};
    outcome.clipped_count = outside;
    outcome.bucket = bound * bound;
    outcome.negative = released < 0.0;
    outcome.ledger = BudgetLedger(params.epsilon);
    outcome.ledger.charge("iqr_lower_bound", {1, 8});
    outcome.ledger.charge("radius_on_subsample", {3, 4});
    // The release perturbs a mean over n/2 pairs, so the published scale
    // 8 rad / (eps n) covers sensitivity 2 rad / n: an eps/4 spend. The
    // conservative mode doubles the scale to bring the spend back to eps/8.
    outcome.ledger.charge("variance_release", conservative ? Fraction{1, 8} : Fraction{1, 4});
    return outcome;
}

EstimateOutcome estimate_iqr(const Dataset& data, PrivacyParams params,
                             NoiseSource& noise, const EstimatorOptions& options) {
    const std::size_t n = data.size();
    if (n < 4) throw InsufficientSampleError("estimate_iqr: need n >= 4");

    const auto parts = params.split({{{1, 3}, {1, 6}}, {{1, 3}, {1, 6}}, {{1, 3}, {1, 6}}});
    const double bound = estimate_iqr_lower_bound(data, parts[0], options.alg7, noise);
    const double grid = bound / static_cast<double>(n);

    const auto lower_rank = static_cast<std::int64_t>(n / 4);
    const auto upper_rank = static_cast<std::int64_t>(3 * n / 4);
    const RealQuantileResult lo = quantile_real(data, lower_rank, grid, parts[1], noise);
    const RealQuantileResult hi = quantile_real(data, upper_rank, grid, parts[2], noise);

    EstimateOutcome outcome;
    outcome.estimate = hi.value - lo.value;
    outcome.prenoise = outcome.estimate;
    outcome.clipped_count = lo.clipped_count + hi.clipped_count;
    outcome.bucket = grid;
    outcome.ledger = BudgetLedger(params.epsilon);
    outcome.ledger.charge("iqr_lower_bound", {1, 3});
    outcome.ledger.charge("lower_quartile", {1, 3});
    outcome.ledger.charge("upper_quartile", {1, 3});
    return outcome;
}

}  // namespace updp
