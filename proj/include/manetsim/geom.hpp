// 2-D points and the rectangular simulation area.
#pragma once

#include <cmath>

#include "manetsim/errors.hpp"

namespace manet {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double k) const { return {x * k, y * k}; }

    double norm() const { return std::hypot(x, y); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

struct Area {
    double width = 1000.0;
    double height = 700.0;

    bool contains(Vec2 p, double tol = 0.0) const {
        return p.x >= -tol && p.x <= width + tol && p.y >= -tol && p.y <= height + tol;
    }

    Vec2 clamp(Vec2 p) const {
        return {std::fmin(std::fmax(p.x, 0.0), width), std::fmin(std::fmax(p.y, 0.0), height)};
    }

    void validate() const {
        if (!(width > 0.0)) throw InvalidParams("area width must be > 0");
        if (!(height > 0.0)) throw InvalidParams("area height must be > 0");
    }
};

} // namespace manet
