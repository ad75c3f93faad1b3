// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEUMAT_VEC_H
#define NEUMAT_VEC_H

#include <cmath>
#include <stdexcept>
#include <string>

namespace neumat {

using Float = double;

struct Vec2 {
    Float x = 0, y = 0;

    Vec2() = default;
    Vec2(Float x, Float y) : x(x), y(y) {}

    Vec2 operator+(const Vec2 &o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2 &o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(Float s) const { return {x * s, y * s}; }
    Vec2 &operator+=(const Vec2 &o) { x += o.x; y += o.y; return *this; }
    Float length() const { return std::sqrt(x * x + y * y); }
};

inline Vec2 operator*(Float s, const Vec2 &v) { return v * s; }
inline Float dot(const Vec2 &a, const Vec2 &b) { return a.x * b.x + a.y * b.y; }

struct Vec3 {
    Float x = 0, y = 0, z = 0;

    Vec3() = default;
    Vec3(Float x, Float y, Float z) : x(x), y(y), z(z) {}
    explicit Vec3(Float v) : x(v), y(v), z(v) {}

    Float operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    Float &operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(Float s) const { return {x * s, y * s, z * s}; }
    Vec3 operator*(const Vec3 &o) const { return {x * o.x, y * o.y, z * o.z}; }
    Vec3 operator/(Float s) const { return {x / s, y / s, z / s}; }
    Vec3 &operator+=(const Vec3 &o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3 &operator*=(Float s) { x *= s; y *= s; z *= s; return *this; }
    Float length() const { return std::sqrt(x * x + y * y + z * z); }
};

inline Vec3 operator*(Float s, const Vec3 &v) { return v * s; }
inline Float dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3 &a, const Vec3 &b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline Vec3 normalize(const Vec3 &v) { return v / v.length(); }

// Linear RGB reflectance / radiance triple.
using Rgb = Vec3;

inline bool is_finite(Float v) { return std::isfinite(v); }
inline bool is_finite(const Vec2 &v) { return std::isfinite(v.x) && std::isfinite(v.y); }
inline bool is_finite(const Vec3 &v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// Contract failure: the caller violated a documented precondition.
[[noreturn]] inline void contract_violation(const std::string &what) {
    throw std::invalid_argument(what);
}

inline void check_contract(bool ok, const char *what) {
    if (!ok)
        contract_violation(what);
}

}  // namespace neumat

#endif  // NEUMAT_VEC_H
