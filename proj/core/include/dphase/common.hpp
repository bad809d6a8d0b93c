#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace dphase {

/// Error carrying a stable machine-readable kind alongside the message.
/// Kinds in use: "invalid-parameter", "dimension-mismatch", "parse",
/// "geometry", "io", "compatibility", "hypothesis-violation", "numeric",
/// "oracle-scale", "weight-degenerate", "regularization-required",
/// "unsupported-dimension", "config", "non-convergence".
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

[[noreturn]] inline void fail(const std::string& kind, const std::string& message) {
    throw Error(kind, message);
}

/// Plane vector. 1D data lives in the x component with y = 0, so element
/// gradients, fluxes and normals share one representation across dimensions.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(Vec2 o) {
        x += o.x;
        y += o.y;
        return *this;
    }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

/// 90-degree counterclockwise rotation; maps an edge vector to a normal.
inline Vec2 rot90(Vec2 v) { return {-v.y, v.x}; }

}  // namespace dphase
