#pragma once

#include <cstdint>
#include <functional>

#include "updp/dataset.hpp"
#include "updp/noise.hpp"
#include "updp/privacy.hpp"

namespace updp {

// Query budget for the power-of-two threshold ladders. 1100 covers every
// double exponent (2^-1074 subnormal through 2^1023), so a ladder that walks
// off the end signals degenerate data, not an undersized constant.
inline constexpr std::size_t kLadderMaxQueries = 1100;

// One Lap(scale) draw. Thin wrapper so call sites read like the algorithm
// statements; validation and the noiseless short-circuit live in NoiseSource.
inline double sample_laplace(double scale, NoiseSource& noise) { return noise.laplace(scale); }

// Sparse vector technique, single-halting form. Perturbs the threshold with
// Lap(2/eps) once and each query with Lap(4/eps), and returns the 1-based
// index of the first query whose noisy value strictly exceeds the noisy
// threshold. Queries are pulled lazily: `query(i)` for i = 1..max_queries.
// Throws BudgetExhaustedError if no query stops the scan.
std::size_t svt(double threshold, double epsilon,
                const std::function<double(std::size_t)>& query,
                std::size_t max_queries, NoiseSource& noise);

// Mirrored scan: index of the first query whose noisy value drops strictly
// below the noisy threshold. Used by the decreasing ladders, where the
// interesting event is the count falling under the threshold.
std::size_t svt_below(double threshold, double epsilon,
                      const std::function<double(std::size_t)>& query,
                      std::size_t max_queries, NoiseSource& noise);

// Inverse-sensitivity path length for rank statistics: the minimum number of
// element replacements taking the tau-th smallest of `data` to exactly y.
std::int64_t path_length(const IntDataset& data, std::int64_t tau, std::int64_t y);

// Inverse-sensitivity exponential mechanism for the tau-th smallest element:
// one draw from Pr(y) proportional to exp(-epsilon * path_length / 2) over
// the integers of `domain`. Sampling decomposes the domain into the at most
// 2n+1 maximal runs of constant path length between consecutive distinct data
// values, accumulates their weights in log space, inverse-transform samples a
// run, then picks uniformly inside it. In noiseless mode returns the smallest
// maximum-score outcome, which is exactly the data value at rank tau.
std::int64_t inv_quantile_sample(const IntDataset& data, std::int64_t tau,
                                 IntInterval domain, double epsilon, NoiseSource& noise);

// Private quantile over a bounded integer domain: clamps the requested rank
// away from the extremes by (2/eps) * capped_log(|domain|/beta) and samples
// with the inverse-sensitivity mechanism at the clamped rank. Singleton
// domains short-circuit to their only value. Requires every data value to lie
// inside `domain` and n > (4/eps) * capped_log(|domain|/beta).
std::int64_t finite_domain_quantile(const IntDataset& data, std::int64_t tau,
                                    IntInterval domain, PrivacyParams params,
                                    NoiseSource& noise);

// Maps values below lo to lo and above hi to hi.
template <typename T>
BasicDataset<T> clip(const BasicDataset<T>& data, T lo, T hi) {
    if (lo > hi) throw std::invalid_argument("clip: lo > hi");
    std::vector<T> out;
    out.reserve(data.size());
    for (const T v : data.values()) out.push_back(v < lo ? lo : (v > hi ? hi : v));
    return BasicDataset<T>(std::move(out));
}

inline Dataset clip(const Dataset& data, IntervalRange range) {
    if (!range.valid()) throw std::invalid_argument("clip: invalid range");
    return clip(data, range.lo, range.hi);
}

inline IntDataset clip(const IntDataset& data, IntInterval range) {
    if (!range.valid()) throw std::invalid_argument("clip: invalid range");
    return clip(data, range.lo, range.hi);
}

// Mean after clipping into [lo, hi]. Replacing one element moves this by at
// most (hi - lo)/n, which is the sensitivity the release noise is scaled to.
template <typename T>
double clipped_mean(const BasicDataset<T>& data, T lo, T hi) {
    if (lo > hi) throw std::invalid_argument("clipped_mean: lo > hi");
    if (data.empty()) throw std::invalid_argument("clipped_mean: empty dataset");
    double sum = 0.0;
    for (const T v : data.values()) {
        const T c = v < lo ? lo : (v > hi ? hi : v);
        sum += static_cast<double>(c);
    }
    return sum / static_cast<double>(data.size());
}

inline double clipped_mean(const Dataset& data, IntervalRange range) {
    if (!range.valid()) throw std::invalid_argument("clipped_mean: invalid range");
    return clipped_mean(data, range.lo, range.hi);
}

// Budget a sub-mechanism may spend so that running it on an eta-fraction
// subsample amplifies back to eps_target: log((e^eps_target - 1)/eta + 1).
double deamplify(double eps_target, double eta);

// Privacy of an eps_sub mechanism run on an eta-fraction subsample:
// log(1 + eta * (e^eps_sub - 1)). Inverse of deamplify.
double amplify(double eps_sub, double eta);

// Uniform m-subset without replacement (partial Fisher-Yates), returned as a
// sorted dataset.
template <typename T>
BasicDataset<T> subsample(const BasicDataset<T>& data, std::size_t m, NoiseSource& noise) {
    const std::size_t n = data.size();
    if (m == 0 || m > n) throw std::invalid_argument("subsample: need 1 <= m <= n");
    std::vector<T> pool = data.values();
    for (std::size_t i = 0; i < m; ++i) {
        const auto j = static_cast<std::size_t>(
            noise.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(n - 1)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
    return BasicDataset<T>(std::move(pool));
}

}  // namespace updp
