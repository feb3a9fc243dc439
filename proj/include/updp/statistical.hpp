#pragma once

#include <cstdint>
#include <optional>

#include "updp/dataset.hpp"
#include "updp/empirical.hpp"
#include "updp/noise.hpp"
#include "updp/privacy.hpp"

namespace updp {

// The IQR lower-bound pseudocode returns 2^(-j) when the decreasing ladder
// decides, while the accompanying analysis argues with 2^(-j+1). kPseudocode
// is the default; kProof doubles that branch's return value.
enum class Alg7Variant { kPseudocode, kProof };

// Budget accounting for the variance estimator. kPaper keeps the published
// noise scale, whose ledger totals 9eps/8 because the release is calibrated
// against n rather than the n/2 pair count. kConservative widens the noise to
// 16 * rad / (eps n) so the total stays at eps.
enum class VarianceBudget { kPaper, kConservative };

struct EstimatorOptions {
    Alg7Variant alg7 = Alg7Variant::kPseudocode;
    VarianceBudget variance_budget = VarianceBudget::kPaper;
};

// Differences of a uniformly random perfect matching of the data (one element
// dropped at random when n is odd), either |X - X'| or (X - X')^2.
enum class PairMode { kAbsolute, kSquared };

struct PairedDifferences {
    Dataset values;  // sorted, nonnegative
    std::size_t pair_count() const { return values.size(); }
};

PairedDifferences pair_differences(const Dataset& data, PairMode mode, NoiseSource& noise);

// Result of one top-level statistical estimator run.
struct EstimateOutcome {
    double estimate = 0.0;
    BudgetLedger ledger;
    std::optional<IntervalRange> chosen_range;  // clipping range, when one was used
    std::int64_t clipped_count = 0;             // elements outside that range
    std::optional<double> bucket;               // grid width derived from the IQR bound
    double prenoise = 0.0;                      // estimate before the final Laplace draw
    bool negative = false;                      // variance only: raw release went negative
};

// Returns max(0, estimate); clamping is plain post-processing, kept separate
// so the raw (possibly negative) variance release stays observable.
EstimateOutcome clamp_nonnegative(EstimateOutcome outcome);

// Ladder core of the IQR lower bound, exposed for deterministic traces: given
// the sorted pair differences G, runs the increasing SVT ladder Count(G,1),
// Count(G,2), Count(G,4), ... against 3n'/16 at eps/2, and if that stops on
// the very first rung, the decreasing ladder Count(G,1), Count(G,1/2), ...
// at eps/2, which stops when the count drops below the threshold.
double iqr_lower_bound_from_differences(const Dataset& differences, PrivacyParams params,
                                        Alg7Variant variant, NoiseSource& noise);

// Private lower bound on the interquartile range: a positive scale that with
// high probability lands in [phi(1/16)/4, IQR]. Degenerate data whose pair
// differences pile up at 0 exhausts the decreasing ladder and throws
// BudgetExhaustedError.
double estimate_iqr_lower_bound(const Dataset& data, PrivacyParams params,
                                Alg7Variant variant, NoiseSource& noise);

// Universal private mean (needs only a finite second moment to be useful):
// IQR lower bound (eps/8) sets the grid, a range located on an eps n
// subsample at the deamplified budget (charged 3eps/4) sets the clipping
// interval, and a Laplace release (eps/8) publishes the clipped mean.
EstimateOutcome estimate_mean(const Dataset& data, PrivacyParams params,
                              NoiseSource& noise, const EstimatorOptions& options = {});

// Universal private variance: half the released mean of the squared pair
// differences, clipped to a privately bounded radius.
EstimateOutcome estimate_variance(const Dataset& data, PrivacyParams params,
                                  NoiseSource& noise, const EstimatorOptions& options = {});

// Universal private IQR: IQR lower bound (eps/3) sets a grid of width
// IQR_bound/n, then two private quantiles at ranks floor(n/4) and
// floor(3n/4) (eps/3 each) are differenced.
EstimateOutcome estimate_iqr(const Dataset& data, PrivacyParams params,
                             NoiseSource& noise, const EstimatorOptions& options = {});

}  // namespace updp
