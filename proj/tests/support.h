// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEUMAT_TESTS_SUPPORT_H
#define NEUMAT_TESTS_SUPPORT_H

#include <cmath>
#include <cstdio>
#include <string>

#include "neumat/vec.h"

namespace neumat::test {

// Relative gap with a dead zone: components where both values are
// essentially zero compare equal.
inline Float rel_gap(Float a, Float b) {
    Float m = std::max(std::fabs(a), std::fabs(b));
    if (m < 1e-6) return 0;
    return std::fabs(a - b) / m;
}

// Central difference of f with respect to *x.
template <class F>
Float central_diff(F &&f, Float *x, Float h) {
    Float x0 = *x;
    *x = x0 + h;
    Float fp = f();
    *x = x0 - h;
    Float fm = f();
    *x = x0;
    return (fp - fm) / (2 * h);
}

inline Float fd_step(Float x) { return 1e-5 * std::max<Float>(1, std::fabs(x)); }

// Scratch file path inside the build tree working directory.
inline std::string tmp_path(const std::string &name) { return "tmp_" + name; }

}  // namespace neumat::test

#endif  // NEUMAT_TESTS_SUPPORT_H
