// Simulation time: integer microseconds internally, real seconds at the API
// surface. Integer ticks keep event ordering free of floating-point ties.
#pragma once

#include <cmath>
#include <compare>
#include <cstdint>

#include "manetsim/errors.hpp"

namespace manet {

class SimTime {
public:
    constexpr SimTime() = default;

    static constexpr SimTime from_us(int64_t us) { return SimTime(us); }

    static SimTime seconds(double s) {
        if (!(s >= 0.0) || std::isnan(s))
            throw SimError("SimTime: negative or NaN seconds");
        return SimTime(static_cast<int64_t>(std::llround(s * 1e6)));
    }

    constexpr int64_t us() const { return us_; }
    constexpr double to_seconds() const { return static_cast<double>(us_) * 1e-6; }

    friend constexpr auto operator<=>(SimTime, SimTime) = default;

    constexpr SimTime operator+(SimTime o) const { return SimTime(us_ + o.us_); }
    constexpr SimTime operator-(SimTime o) const { return SimTime(us_ - o.us_); }

private:
    explicit constexpr SimTime(int64_t us) : us_(us) {}
    int64_t us_ = 0;
};

} // namespace manet
