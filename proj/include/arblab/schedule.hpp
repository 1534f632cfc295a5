#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "arblab/errors.hpp"

namespace arblab {

// Piecewise-constant, right-open schedule: values[i] holds on
// [breakpoints[i], breakpoints[i+1]). breakpoints[0] must be 0 and the list
// strictly increasing. Coefficients of this form make every time integral on
// a grid-aligned partition an exact finite sum.
template <typename ValueT>
class PiecewiseConstant {
public:
    PiecewiseConstant() = default;

    explicit PiecewiseConstant(ValueT constant_value)
        : breakpoints_{0.0}, values_{std::move(constant_value)} {}

    PiecewiseConstant(std::vector<double> breakpoints, std::vector<ValueT> values)
        : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
        if (breakpoints_.empty() || breakpoints_.size() != values_.size())
            throw ValidationError("schedule: breakpoints and values must be non-empty and equal-length");
        if (breakpoints_.front() != 0.0)
            throw ValidationError("schedule: first breakpoint must be 0");
        for (std::size_t i = 1; i < breakpoints_.size(); ++i)
            if (!(breakpoints_[i] > breakpoints_[i - 1]))
                throw ValidationError("schedule: breakpoints must be strictly increasing");
    }

    bool is_constant() const { return values_.size() == 1; }
    std::size_t segments() const { return values_.size(); }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<ValueT>& values() const { return values_; }

    // Index of the segment active at time t (last breakpoint <= t).
    std::size_t segment_at(double t) const {
        auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
        if (it == breakpoints_.begin()) return 0;  // t < 0: clamp to first segment
        return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    }

    const ValueT& at(double t) const { return values_[segment_at(t)]; }

private:
    std::vector<double> breakpoints_;
    std::vector<ValueT> values_;
};

}  // namespace arblab
