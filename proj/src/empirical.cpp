#include "updp/empirical.hpp"

#include <cmath>
#include <stdexcept>

namespace updp {

namespace {

// Keeps every intermediate (center +- radius, shifted values) inside int64.
constexpr std::int64_t kRadiusSaturation = std::int64_t{1} << 61;
constexpr double kQuantizeLimit = 0x1.0p62;

// Query 1 probes scale 0; query i >= 2 probes 2^(i-2). Past the largest
// double exponent the probe is +inf, which counts everything, so the ladder
// stays monotone instead of overflowing.
double ladder_scale(std::size_t i) {
    if (i == 1) return 0.0;
    return std::exp2(static_cast<double>(i) - 2.0);
}

std::int64_t radius_from_index(std::size_t i) {
    if (i == 1) return 0;
    const std::size_t exponent = i - 2;
    if (exponent >= 61) return kRadiusSaturation;
    return std::int64_t{1} << exponent;
}

std::int64_t shifted(std::int64_t v, std::int64_t center) { return v - center; }

}  // namespace

std::int64_t Discretization::quantize(double x) const {
    if (!std::isfinite(x)) throw std::invalid_argument("quantize: value must be finite");
    const double scaled = x / bucket;
    if (!(std::fabs(scaled) < kQuantizeLimit))
        throw std::out_of_range("quantize: |x/bucket| exceeds the representable grid");
    return static_cast<std::int64_t>(std::floor(scaled + 0.5));
}

IntDataset quantize(const Dataset& data, const Discretization& grid) {
    std::vector<std::int64_t> out;
    out.reserve(data.size());
    for (const double v : data.values()) out.push_back(grid.quantize(v));
    return IntDataset(std::move(out));
}

std::int64_t infinite_domain_radius(const IntDataset& data, PrivacyParams params,
                                    NoiseSource& noise) {
    if (data.empty()) throw std::invalid_argument("infinite_domain_radius: empty dataset");
    const double n = static_cast<double>(data.size());
    const double threshold = n - (6.0 / params.epsilon) * capped_log(2.0 / params.beta);
    double prev_count = -1.0;
    auto ladder = [&](std::size_t i) {
        const auto c = static_cast<double>(count_within(data, ladder_scale(i)));
        if (c < prev_count)
            throw std::logic_error("infinite_domain_radius: count ladder must be nondecreasing");
        prev_count = c;
        return c;
    };
    const std::size_t stop = svt(threshold, params.epsilon, ladder, kLadderMaxQueries, noise);
    return radius_from_index(stop);
}

IntRangeResult infinite_domain_range(const IntDataset& data, PrivacyParams params,
                                     NoiseSource& noise) {
    if (data.empty()) throw std::invalid_argument("infinite_domain_range: empty dataset");
    const auto parts = params.split({{{1, 8}, {1, 3}}, {{1, 8}, {1, 3}}, {{3, 4}, {1, 3}}});

    const std::int64_t rad = infinite_domain_radius(data, parts[0], noise);
    const IntInterval bound{-rad, rad};
    const IntDataset clipped = clip(data, bound);
    const auto n = static_cast<std::int64_t>(data.size());
    const std::int64_t median_rank = std::max<std::int64_t>(1, n / 2);
    const std::int64_t center = finite_domain_quantile(clipped, median_rank, bound, parts[1], noise);

    std::vector<std::int64_t> recentered;
    recentered.reserve(data.size());
    for (const std::int64_t v : data.values()) recentered.push_back(shifted(v, center));
    const std::int64_t rad2 = infinite_domain_radius(IntDataset(std::move(recentered)), parts[2], noise);

    IntRangeResult result{IntInterval{center - rad2, center + rad2}, center, rad2,
                          BudgetLedger(params.epsilon)};
    result.ledger.charge("radius_bound", {1, 8});
    result.ledger.charge("recenter_median", {1, 8});
    result.ledger.charge("radius_recentered", {3, 4});
    return result;
}

IntMeanResult infinite_domain_mean(const IntDataset& data, PrivacyParams params,
                                   NoiseSource& noise) {
    if (data.empty()) throw std::invalid_argument("infinite_domain_mean: empty dataset");
    const auto parts = params.split({{{4, 5}, {1, 2}}, {{1, 5}, {1, 2}}});

    const IntRangeResult located = infinite_domain_range(data, parts[0], noise);
    const double prenoise = clipped_mean(data, located.range.lo, located.range.hi);
    const double width = located.range.size() - 1.0;  // hi - lo
    const double n = static_cast<double>(data.size());
    double released = prenoise;
    if (width > 0.0)
        released += sample_laplace(5.0 * width / (params.epsilon * n), noise);

    std::int64_t outside = 0;
    for (const std::int64_t v : data.values())
        if (!located.range.contains(v)) ++outside;

    IntMeanResult result{released, located.range, outside, prenoise, BudgetLedger(params.epsilon)};
    result.ledger.charge("range_locate", {4, 5});
    result.ledger.charge("mean_release", {1, 5});
    return result;
}

IntQuantileResult infinite_domain_quantile(const IntDataset& data, std::int64_t tau,
                                           PrivacyParams params, NoiseSource& noise) {
    if (data.empty()) throw std::invalid_argument("infinite_domain_quantile: empty dataset");
    const auto n = static_cast<std::int64_t>(data.size());
    if (tau < 1 || tau > n)
        throw std::invalid_argument("infinite_domain_quantile: rank out of [1, n]");
    const auto parts = params.split({{{4, 5}, {1, 2}}, {{1, 5}, {1, 2}}});

    const IntRangeResult located = infinite_domain_range(data, parts[0], noise);
    const IntDataset clipped = clip(data, located.range);
    const std::int64_t value = finite_domain_quantile(clipped, tau, located.range, parts[1], noise);

    std::int64_t outside = 0;
    for (const std::int64_t v : data.values())
        if (!located.range.contains(v)) ++outside;

    IntQuantileResult result{value,
                             located.range,
                             outside,
                             static_cast<std::int64_t>(data.count_at_most(value)),
                             static_cast<std::int64_t>(data.count_less(value)) + 1,
                             BudgetLedger(params.epsilon)};
    result.ledger.charge("range_locate", {4, 5});
    result.ledger.charge("quantile_release", {1, 5});
    return result;
}

double radius_real(const Dataset& data, double bucket, PrivacyParams params,
                   NoiseSource& noise) {
    const Discretization grid(bucket);
    const std::int64_t rad = infinite_domain_radius(quantize(data, grid), params, noise);
    return grid.dequantize(rad);
}

RealRangeResult range_real(const Dataset& data, double bucket, PrivacyParams params,
                           NoiseSource& noise) {
    const Discretization grid(bucket);
    const IntRangeResult r = infinite_domain_range(quantize(data, grid), params, noise);
    return RealRangeResult{IntervalRange{grid.dequantize(r.range.lo), grid.dequantize(r.range.hi)},
                           grid.dequantize(r.center), grid.dequantize(r.radius), bucket, r.ledger};
}

RealMeanResult mean_real(const Dataset& data, double bucket, PrivacyParams params,
                         NoiseSource& noise) {
    const Discretization grid(bucket);
    const IntMeanResult r = infinite_domain_mean(quantize(data, grid), params, noise);
    return RealMeanResult{r.mean * bucket,
                          IntervalRange{grid.dequantize(r.range.lo), grid.dequantize(r.range.hi)},
                          r.clipped_count, r.prenoise * bucket, bucket, r.ledger};
}

RealQuantileResult quantile_real(const Dataset& data, std::int64_t tau, double bucket,
                                 PrivacyParams params, NoiseSource& noise) {
    const Discretization grid(bucket);
    const IntQuantileResult r = infinite_domain_quantile(quantize(data, grid), tau, params, noise);
    return RealQuantileResult{grid.dequantize(r.value),
                              IntervalRange{grid.dequantize(r.range.lo), grid.dequantize(r.range.hi)},
                              r.clipped_count, r.rank_at_most, r.rank_at_least, bucket, r.ledger};
}

}  // namespace updp
