// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEUMAT_DIRECTION_H
#define NEUMAT_DIRECTION_H

#include <cmath>
#include <numbers>

#include "neumat/rng.h"
#include "neumat/vec.h"

namespace neumat {

/// Unit upper-hemisphere direction stored as its tangent-plane projection.
/// The z component is implied: z = sqrt(max(0, 1 - x^2 - y^2)).
struct Direction {
    Float x = 0, y = 0;

    Direction() = default;
    Direction(Float x, Float y) : x(x), y(y) {}

    Float z() const { return std::sqrt(std::max(Float{0}, 1 - x * x - y * y)); }
    Vec3 to_vec3() const { return {x, y, z()}; }
    bool valid() const {
        // Allow a whisker of slack for normalized vectors rounded onto the rim.
        return std::isfinite(x) && std::isfinite(y) && x * x + y * y <= 1 + 1e-9;
    }
};

inline constexpr Float kInvPi = std::numbers::inv_pi_v<double>;

/// Cosine-weighted hemisphere sample. A uniform point on the unit disk IS
/// the projected-hemisphere encoding of the sampled direction; pdf is
/// cos(theta) / pi with respect to solid angle.
struct DirectionSample {
    Direction dir;
    Float pdf;
};

inline DirectionSample sample_cosine_hemisphere(Pcg32 &rng) {
    Float r = std::sqrt(rng.next_double());
    Float phi = 2.0 * std::numbers::pi * rng.next_double();
    Direction d{r * std::cos(phi), r * std::sin(phi)};
    return {d, d.z() * kInvPi};
}

inline Float cosine_hemisphere_pdf(const Direction &d) { return d.z() * kInvPi; }

}  // namespace neumat

#endif  // NEUMAT_DIRECTION_H
