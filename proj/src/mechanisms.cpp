#include "updp/mechanisms.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace updp {

std::size_t svt(double threshold, double epsilon,
                const std::function<double(std::size_t)>& query,
                std::size_t max_queries, NoiseSource& noise) {
    if (!(std::isfinite(epsilon) && epsilon > 0.0))
        throw std::invalid_argument("svt: epsilon must be positive and finite");
    if (max_queries == 0) throw std::invalid_argument("svt: max_queries must be positive");
    const double noisy_threshold = threshold + sample_laplace(2.0 / epsilon, noise);
    for (std::size_t i = 1; i <= max_queries; ++i) {
        const double noisy_query = query(i) + sample_laplace(4.0 / epsilon, noise);
        if (noisy_query > noisy_threshold) return i;
    }
    throw BudgetExhaustedError("svt: no query exceeded the threshold within the query budget");
}

std::size_t svt_below(double threshold, double epsilon,
                      const std::function<double(std::size_t)>& query,
                      std::size_t max_queries, NoiseSource& noise) {
    return svt(-threshold, epsilon, [&query](std::size_t i) { return -query(i); },
               max_queries, noise);
}

std::int64_t path_length(const IntDataset& data, std::int64_t tau, std::int64_t y) {
    const auto n = static_cast<std::int64_t>(data.size());
    if (n == 0) throw std::invalid_argument("path_length: empty dataset");
    if (tau < 1 || tau > n) throw std::invalid_argument("path_length: rank out of [1, n]");
    const std::int64_t at_rank = data[static_cast<std::size_t>(tau - 1)];
    if (y == at_rank) return 0;
    if (y > at_rank) {
        const auto below = static_cast<std::int64_t>(data.count_less(y));
        return std::max<std::int64_t>(0, below - (tau - 1));
    }
    const auto at_most = static_cast<std::int64_t>(data.count_at_most(y));
    return std::max<std::int64_t>(0, tau - at_most);
}

namespace {

// Maximal run of consecutive integers sharing one path length.
struct ScoreSegment {
    std::int64_t lo;
    std::int64_t hi;
    std::int64_t length;  // path length of every y in [lo, hi]
};

std::vector<ScoreSegment> build_segments(const IntDataset& data, std::int64_t tau,
                                         IntInterval domain) {
    std::vector<ScoreSegment> segments;
    segments.reserve(2 * data.size() + 1);
    auto push = [&](std::int64_t lo, std::int64_t hi) {
        if (lo > hi) return;
        // Path length is constant across the run; probe any point of it.
        const std::int64_t len = path_length(data, tau, lo);
        if (!segments.empty() && segments.back().length == len && segments.back().hi + 1 == lo) {
            segments.back().hi = hi;
            return;
        }
        segments.push_back(ScoreSegment{lo, hi, len});
    };
    std::int64_t cursor = domain.lo;
    std::int64_t prev = 0;
    bool have_prev = false;
    for (const std::int64_t v : data.values()) {
        if (have_prev && v == prev) continue;  // distinct values only
        prev = v;
        have_prev = true;
        if (v < domain.lo || v > domain.hi) continue;
        push(cursor, v - 1);
        push(v, v);
        cursor = v + 1;
    }
    push(cursor, domain.hi);
    return segments;
}

}  // namespace

std::int64_t inv_quantile_sample(const IntDataset& data, std::int64_t tau,
                                 IntInterval domain, double epsilon, NoiseSource& noise) {
    if (!domain.valid()) throw std::invalid_argument("inv_quantile_sample: invalid domain");
    if (data.empty()) throw std::invalid_argument("inv_quantile_sample: empty dataset");
    if (data.min_value() < domain.lo || data.max_value() > domain.hi)
        throw std::invalid_argument("inv_quantile_sample: data outside domain");
    if (!(std::isfinite(epsilon) && epsilon > 0.0))
        throw std::invalid_argument("inv_quantile_sample: epsilon must be positive and finite");

    const std::vector<ScoreSegment> segments = build_segments(data, tau, domain);

    if (noise.noiseless()) {
        // Deterministic trace: max score, smallest value on ties. The unique
        // zero-length outcome is the rank-tau data value itself.
        const ScoreSegment* best = &segments.front();
        for (const auto& s : segments)
            if (s.length < best->length) best = &s;
        return best->lo;
    }

    // Inverse-transform sample over segment weights, shifted by the running
    // maximum so the exponentials stay in range.
    double max_log_weight = -std::numeric_limits<double>::infinity();
    std::vector<double> log_weights;
    log_weights.reserve(segments.size());
    for (const auto& s : segments) {
        const double span = static_cast<double>(s.hi) - static_cast<double>(s.lo) + 1.0;
        const double lw = std::log(span) - 0.5 * epsilon * static_cast<double>(s.length);
        log_weights.push_back(lw);
        if (lw > max_log_weight) max_log_weight = lw;
    }
    double total = 0.0;
    for (const double lw : log_weights) total += std::exp(lw - max_log_weight);
    const double target = noise.uniform_open() * total;
    double cumulative = 0.0;
    std::size_t pick = segments.size() - 1;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        cumulative += std::exp(log_weights[i] - max_log_weight);
        if (cumulative >= target) { pick = i; break; }
    }
    const ScoreSegment& s = segments[pick];
    return noise.uniform_int(s.lo, s.hi);
}

std::int64_t finite_domain_quantile(const IntDataset& data, std::int64_t tau,
                                    IntInterval domain, PrivacyParams params,
                                    NoiseSource& noise) {
    if (!domain.valid()) throw std::invalid_argument("finite_domain_quantile: invalid domain");
    if (domain.lo == domain.hi) return domain.lo;  // nothing to privatize
    if (data.empty()) throw std::invalid_argument("finite_domain_quantile: empty dataset");
    if (data.min_value() < domain.lo || data.max_value() > domain.hi)
        throw std::invalid_argument("finite_domain_quantile: data outside domain");
    const auto n = static_cast<std::int64_t>(data.size());
    if (tau < 1 || tau > n) throw std::invalid_argument("finite_domain_quantile: rank out of [1, n]");

    const double margin = (2.0 / params.epsilon) * capped_log(domain.size() / params.beta);
    if (!(static_cast<double>(n) > 2.0 * margin))
        throw InsufficientSampleError(
            "finite_domain_quantile: need n > (4/eps) * capped_log(|domain|/beta)");

    // Clamp the rank away from both extremes, rounding inward so the
    // effective rank stays a valid integer strictly inside the safe band.
    std::int64_t effective = tau;
    if (static_cast<double>(tau) <= margin) {
        effective = static_cast<std::int64_t>(std::ceil(margin));
    } else if (static_cast<double>(tau) >= static_cast<double>(n) - margin) {
        effective = static_cast<std::int64_t>(std::floor(static_cast<double>(n) - margin));
    }
    effective = std::max<std::int64_t>(1, std::min(n, effective));

    return inv_quantile_sample(data, effective, domain, params.epsilon, noise);
}

double deamplify(double eps_target, double eta) {
    if (!(std::isfinite(eps_target) && eps_target > 0.0))
        throw std::invalid_argument("deamplify: eps_target must be positive and finite");
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::invalid_argument("deamplify: eta must lie in (0, 1]");
    return std::log1p(std::expm1(eps_target) / eta);
}

double amplify(double eps_sub, double eta) {
    if (!(std::isfinite(eps_sub) && eps_sub > 0.0))
        throw std::invalid_argument("amplify: eps_sub must be positive and finite");
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::invalid_argument("amplify: eta must lie in (0, 1]");
    return std::log1p(eta * std::expm1(eps_sub));
}

}  // namespace updp
