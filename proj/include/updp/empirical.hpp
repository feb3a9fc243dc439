#pragma once

#include <cstdint>
#include <optional>

#include "updp/dataset.hpp"
#include "updp/mechanisms.hpp"
#include "updp/noise.hpp"
#include "updp/privacy.hpp"

namespace updp {

// Uniform grid of width `bucket` used to move real data onto the integers and
// back. Rounding is to the nearest grid point, ties toward +infinity.
struct Discretization {
    double bucket = 1.0;

    explicit Discretization(double b) : bucket(b) {
        if (!(std::isfinite(b) && b > 0.0))
            throw std::invalid_argument("Discretization: bucket must be positive and finite");
    }

    std::int64_t quantize(double x) const;
    double dequantize(std::int64_t k) const { return static_cast<double>(k) * bucket; }
};

IntDataset quantize(const Dataset& data, const Discretization& grid);

// --- Estimators over integer data ---------------------------------------

struct IntRangeResult {
    IntInterval range;      // [center - radius, center + radius]
    std::int64_t center;    // privatized median of the recentering pass
    std::int64_t radius;    // radius of the recentered data
    BudgetLedger ledger;
};

struct IntMeanResult {
    double mean;
    IntInterval range;            // clipping range the mean was computed over
    std::int64_t clipped_count;   // elements outside that range
    double prenoise;              // clipped mean before the Laplace release
    BudgetLedger ledger;
};

struct IntQuantileResult {
    std::int64_t value;
    IntInterval range;            // privatized range the data was clipped to
    std::int64_t clipped_count;
    // Bracketing ranks of the output among the (clipped) data: largest rank
    // with X_r <= value and smallest rank with X_r >= value, clamped to
    // [0, n+1] at the extremes. The harness derives realized rank error from
    // these.
    std::int64_t rank_at_most;
    std::int64_t rank_at_least;
    BudgetLedger ledger;
};

// Private radius: smallest power-of-two scale 2^(i-2) at which the count of
// elements inside [-2^(i-2), 2^(i-2)] noisily clears n - (6/eps) *
// capped_log(2/beta), found by one SVT pass over the doubling ladder
// Count(D,0), Count(D,1), Count(D,2), Count(D,4), ... Returns 0 when the
// very first query stops the scan.
std::int64_t infinite_domain_radius(const IntDataset& data, PrivacyParams params,
                                    NoiseSource& noise);

// Private range: a coarse radius pass (eps/8) bounds the data, a private
// median (eps/8) recenters it, and a final radius pass on the recentered
// data (3eps/4) sets the output half-width.
IntRangeResult infinite_domain_range(const IntDataset& data, PrivacyParams params,
                                     NoiseSource& noise);

// Private mean: clipped mean over a privately located range (4eps/5) plus a
// Laplace release calibrated to the clipped sensitivity (eps/5).
IntMeanResult infinite_domain_mean(const IntDataset& data, PrivacyParams params,
                                   NoiseSource& noise);

// Private quantile: clips to a privately located range (4eps/5), then runs
// the finite-domain quantile mechanism on it (eps/5).
IntQuantileResult infinite_domain_quantile(const IntDataset& data, std::int64_t tau,
                                           PrivacyParams params, NoiseSource& noise);

// --- Real-data wrappers ---------------------------------------------------
// Quantize onto a bucket-b grid, run the integer estimator, scale back. Each
// result carries the bucket so callers can account for the +-b slack the
// discretization adds on top of the integer-domain guarantees.

struct RealRangeResult {
    IntervalRange range;
    double center;
    double radius;
    double bucket;
    BudgetLedger ledger;
};

struct RealMeanResult {
    double mean;
    IntervalRange range;
    std::int64_t clipped_count;
    double prenoise;
    double bucket;
    BudgetLedger ledger;
};

struct RealQuantileResult {
    double value;
    IntervalRange range;
    std::int64_t clipped_count;
    std::int64_t rank_at_most;
    std::int64_t rank_at_least;
    double bucket;
    BudgetLedger ledger;
};

double radius_real(const Dataset& data, double bucket, PrivacyParams params,
                   NoiseSource& noise);
RealRangeResult range_real(const Dataset& data, double bucket, PrivacyParams params,
                           NoiseSource& noise);
RealMeanResult mean_real(const Dataset& data, double bucket, PrivacyParams params,
                         NoiseSource& noise);
RealQuantileResult quantile_real(const Dataset& data, std::int64_t tau, double bucket,
                                 PrivacyParams params, NoiseSource& noise);

}  // namespace updp
