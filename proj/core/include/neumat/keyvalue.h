// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEUMAT_KEYVALUE_H
#define NEUMAT_KEYVALUE_H

#include <cstdint>
#include <map>
#include <string>

#include "neumat/vec.h"

namespace neumat {

/// Flat `key = value` text, one pair per line; '#' starts a comment and
/// blank lines are skipped. Values keep internal whitespace (vectors are
/// space-separated floats). Lookups mark keys consumed so finish() can
/// reject typos and unknown keys wholesale.
class KeyValues {
public:
    static KeyValues from_file(const std::string &path);
    static KeyValues from_string(const std::string &text, const std::string &origin);

    bool has(const std::string &key) const { return pairs_.count(key) != 0; }

    const std::map<std::string, std::string> &pairs() const { return pairs_; }

    std::string get_string(const std::string &key, const std::string &fallback);
    Float get_real(const std::string &key, Float fallback);
    int64_t get_int(const std::string &key, int64_t fallback);
    Vec3 get_vec3(const std::string &key, const Vec3 &fallback);

    /// Rejects any key never consumed by a getter.
    void finish() const;

private:
    std::string origin_;
    std::map<std::string, std::string> pairs_;
    std::map<std::string, bool> consumed_;

    const std::string *lookup(const std::string &key);
};

}  // namespace neumat

#endif  // NEUMAT_KEYVALUE_H
