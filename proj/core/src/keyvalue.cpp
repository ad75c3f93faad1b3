// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "neumat/keyvalue.h"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "neumat/binaryio.h"

namespace neumat {

namespace {

std::string trim(const std::string &s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

KeyValues KeyValues::from_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw FileFormatError(FormatErrorKind::Io,
                              path + ": " + std::strerror(errno));
    std::stringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str(), path);
}

KeyValues KeyValues::from_string(const std::string &text, const std::string &origin) {
    KeyValues kv;
    kv.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw FileFormatError(FormatErrorKind::InvalidValue,
                                  origin + ":" + std::to_string(lineno) +
                                      ": expected `key = value`");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw FileFormatError(FormatErrorKind::InvalidValue,
                                  origin + ":" + std::to_string(lineno) +
                                      ": empty key");
        if (!kv.pairs_.emplace(key, value).second)
            throw FileFormatError(FormatErrorKind::InvalidValue,
                                  origin + ":" + std::to_string(lineno) +
                                      ": duplicate key \"" + key + "\"");
        kv.consumed_[key] = false;
    }
    return kv;
}

const std::string *KeyValues::lookup(const std::string &key) {
    auto it = pairs_.find(key);
    if (it == pairs_.end()) return nullptr;
    consumed_[key] = true;
    return &it->second;
}

std::string KeyValues::get_string(const std::string &key, const std::string &fallback) {
    const std::string *v = lookup(key);
    return v ? *v : fallback;
}

Float KeyValues::get_real(const std::string &key, Float fallback) {
    const std::string *v = lookup(key);
    if (!v) return fallback;
    std::istringstream in(*v);
    Float x;
    std::string rest;
    if (!(in >> x) || (in >> rest))
        throw FileFormatError(FormatErrorKind::InvalidValue,
                              origin_ + ": key \"" + key +
                                  "\": expected a number, got \"" + *v + "\"");
    return x;
}

int64_t KeyValues::get_int(const std::string &key, int64_t fallback) {
    const std::string *v = lookup(key);
    if (!v) return fallback;
    std::istringstream in(*v);
    int64_t x;
    std::string rest;
    if (!(in >> x) || (in >> rest))
        throw FileFormatError(FormatErrorKind::InvalidValue,
                              origin_ + ": key \"" + key +
                                  "\": expected an integer, got \"" + *v + "\"");
    return x;
}

Vec3 KeyValues::get_vec3(const std::string &key, const Vec3 &fallback) {
    const std::string *v = lookup(key);
    if (!v) return fallback;
    std::istringstream in(*v);
    Vec3 x;
    std::string rest;
    if (!(in >> x.x >> x.y >> x.z) || (in >> rest))
        throw FileFormatError(FormatErrorKind::InvalidValue,
                              origin_ + ": key \"" + key +
                                  "\": expected three numbers, got \"" + *v + "\"");
    return x;
}

void KeyValues::finish() const {
    std::string unknown;
    for (const auto &[key, used] : consumed_) {
        if (used) continue;
        if (!unknown.empty()) unknown += ", ";
        unknown += "\"" + key + "\"";
    }
    if (!unknown.empty())
        throw FileFormatError(FormatErrorKind::InvalidValue,
                              origin_ + ": unknown key(s) " + unknown);
}

}  // namespace neumat
