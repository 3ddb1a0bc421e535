#pragma once

#include <algorithm>
#include <cmath>

namespace pfg {

// Minimal 3-vector for inertial positions/velocities. Components in SI units.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }

    friend bool operator==(const Vec3&, const Vec3&) = default;

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// Wrap an angle to (-pi, pi].
inline double wrap_pi(double a) {
    double w = std::fmod(a + kPi, 2.0 * kPi);
    if (w <= 0.0) {
        w += 2.0 * kPi;
    }
    return w - kPi;
}

// sign with sign(0) = 0; keeps commands continuous at error-variable origins.
inline double sgn(double w) { return (w > 0.0) ? 1.0 : (w < 0.0 ? -1.0 : 0.0); }

// Signed fractional power sign(w)*|w|^a, the fixed-time-control reading of w^a
// for possibly negative w and non-integer a.
inline double signed_pow(double w, double a) {
    if (w == 0.0) {
        return 0.0;
    }
    return std::copysign(std::pow(std::fabs(w), a), w);
}

// x^n for small non-negative integer n (saturation exponent gamma is a small
// even integer; avoids std::pow in the integration hot path).
inline double int_pow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) {
        r *= x;
    }
    return r;
}

}  // namespace pfg
