#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace updp {

// Natural log clamped to 1 for arguments <= e. Every log that appears in a
// threshold, clamping margin, or guarantee bound uses this convention so the
// nested log terms stay positive and finite all the way down to x = 0.
inline double capped_log(double x) {
    constexpr double kE = 2.718281828459045235;
    if (!(x > kE)) return 1.0;
    return std::log(x);
}

// Raised when an SVT ladder runs out of queries without stopping. Signals
// pathological input (e.g. zero-spread data), not a usage error.
class BudgetExhaustedError : public std::runtime_error {
public:
    explicit BudgetExhaustedError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a mechanism's sample-size precondition fails.
class InsufficientSampleError : public std::runtime_error {
public:
    explicit InsufficientSampleError(const std::string& what) : std::runtime_error(what) {}
};

// Exact rational, used for budget bookkeeping. Denominators stay tiny
// (products of 3, 5, 8, ...), so int64 arithmetic never overflows here.
struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;

    constexpr Fraction() = default;
    Fraction(std::int64_t n, std::int64_t d) : num(n), den(d) {
        if (den == 0) throw std::invalid_argument("Fraction: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    Fraction operator+(const Fraction& o) const { return Fraction(num * o.den + o.num * den, den * o.den); }
    bool operator==(const Fraction& o) const { return num == o.num && den == o.den; }
    bool operator<=(const Fraction& o) const { return num * o.den <= o.num * den; }

    double as_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

struct PrivacyParams;

// One slice of a budget split: which fraction of epsilon and which fraction
// of beta a sub-mechanism receives.
struct BudgetShare {
    Fraction epsilon_share;
    Fraction beta_share;
};

// Privacy budget epsilon plus failure probability beta.
struct PrivacyParams {
    double epsilon;
    double beta;

    PrivacyParams(double eps, double b) : epsilon(eps), beta(b) {
        if (!(std::isfinite(eps) && eps > 0.0))
            throw std::invalid_argument("PrivacyParams: epsilon must be positive and finite");
        if (!(b > 0.0 && b < 1.0))
            throw std::invalid_argument("PrivacyParams: beta must lie in (0,1)");
    }

    // One part of a composition split.
    PrivacyParams scaled(Fraction eps_share, Fraction beta_share) const {
        return PrivacyParams(epsilon * static_cast<double>(eps_share.num) / static_cast<double>(eps_share.den),
                             beta * static_cast<double>(beta_share.num) / static_cast<double>(beta_share.den));
    }

    // Splits the budget into parts. The epsilon shares must sum to 1 exactly
    // (rationally), so the parts recompose to the parent within an ulp.
    std::vector<PrivacyParams> split(const std::vector<BudgetShare>& shares) const {
        Fraction total(0, 1);
        for (const auto& s : shares) total = total + s.epsilon_share;
        if (!(total == Fraction(1, 1)))
            throw std::invalid_argument("PrivacyParams::split: epsilon shares must sum to 1, got " + total.str());
        std::vector<PrivacyParams> parts;
        parts.reserve(shares.size());
        for (const auto& s : shares) parts.push_back(scaled(s.epsilon_share, s.beta_share));
        return parts;
    }
};

// One composition step of a top-level mechanism. `epsilon` is the realized
// budget of the step, `share` the exact fraction of the parent epsilon that
// was charged for it.
struct BudgetEntry {
    std::string label;
    Fraction share;
    double epsilon = 0.0;
};

// Composition ledger of a top-level call. Shares are exact rationals, so the
// recorded total is bit-exact (epsilon * 1 for a clean split) rather than a
// float sum of the parts.
class BudgetLedger {
public:
    BudgetLedger() = default;
    explicit BudgetLedger(double parent_epsilon) : parent_(parent_epsilon) {}

    void charge(std::string label, Fraction share) {
        const double eps = parent_ * static_cast<double>(share.num) / static_cast<double>(share.den);
        entries_.push_back(BudgetEntry{std::move(label), share, eps});
    }

    Fraction total_share() const {
        Fraction total(0, 1);
        for (const auto& e : entries_) total = total + e.share;
        return total;
    }

    // parent * total_share, evaluated rationally: a mechanism whose shares
    // sum to 1/1 reports exactly the parent epsilon.
    double total_epsilon() const {
        const Fraction t = total_share();
        if (t.num == t.den) return parent_;
        return parent_ * static_cast<double>(t.num) / static_cast<double>(t.den);
    }

    double parent_epsilon() const { return parent_; }
    const std::vector<BudgetEntry>& entries() const { return entries_; }

private:
    double parent_ = 0.0;
    std::vector<BudgetEntry> entries_;
};

}  // namespace updp
