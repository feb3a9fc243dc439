#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace updp {

// Closed real interval [lo, hi].
struct IntervalRange {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool valid() const { return std::isfinite(lo) && std::isfinite(hi) && lo <= hi; }
};

// Closed integer interval [lo, hi].
struct IntInterval {
    std::int64_t lo = 0;
    std::int64_t hi = 0;

    // Number of integers in the interval, as a double so astronomically wide
    // domains (which only ever feed log terms) cannot overflow.
    double size() const { return static_cast<double>(hi) - static_cast<double>(lo) + 1.0; }
    bool contains(std::int64_t x) const { return lo <= x && x <= hi; }
    bool valid() const { return lo <= hi; }
};

// Immutable sorted multiset of values. Instantiated for double (real data)
// and int64_t (the discretized flavor the finite-domain mechanisms run on).
template <typename T>
class BasicDataset {
    static_assert(std::is_same_v<T, double> || std::is_same_v<T, std::int64_t>);

public:
    BasicDataset() = default;

    explicit BasicDataset(std::vector<T> values) : values_(std::move(values)) {
        if constexpr (std::is_same_v<T, double>) {
            for (const double v : values_)
                if (!std::isfinite(v)) throw std::invalid_argument("Dataset: values must be finite");
        }
        std::sort(values_.begin(), values_.end());
    }

    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    const std::vector<T>& values() const { return values_; }
    T operator[](std::size_t i) const { return values_[i]; }

    T min_value() const { require_nonempty(); return values_.front(); }
    T max_value() const { require_nonempty(); return values_.back(); }

    // X_n - X_1; 0 for fewer than two elements.
    double width() const {
        if (values_.size() < 2) return 0.0;
        return static_cast<double>(values_.back()) - static_cast<double>(values_.front());
    }

    // max_i |X_i|; 0 when empty.
    double radius() const {
        if (values_.empty()) return 0.0;
        return std::max(std::fabs(static_cast<double>(values_.front())),
                        std::fabs(static_cast<double>(values_.back())));
    }

    std::size_t count_at_most(T x) const {
        return static_cast<std::size_t>(std::upper_bound(values_.begin(), values_.end(), x) - values_.begin());
    }

    std::size_t count_less(T x) const {
        return static_cast<std::size_t>(std::lower_bound(values_.begin(), values_.end(), x) - values_.begin());
    }

private:
    void require_nonempty() const {
        if (values_.empty()) throw std::invalid_argument("Dataset: empty");
    }

    std::vector<T> values_;
};

using Dataset = BasicDataset<double>;
using IntDataset = BasicDataset<std::int64_t>;

// |D intersect [-x, x]|. Exact for the integer flavor even when x exceeds the
// int64 range (every element counts then).
inline std::size_t count_within(const Dataset& data, double x) {
    if (std::isnan(x) || x < 0.0) throw std::invalid_argument("count_within: x must be nonnegative");
    return data.count_at_most(x) - data.count_less(-x);
}

inline std::size_t count_within(const IntDataset& data, double x) {
    if (std::isnan(x) || x < 0.0) throw std::invalid_argument("count_within: x must be nonnegative");
    constexpr double kInt64Edge = 9.2e18;
    if (x >= kInt64Edge) return data.size();
    const auto hi = static_cast<std::int64_t>(std::floor(x));
    return data.count_at_most(hi) - data.count_less(-hi);
}

}  // namespace updp
