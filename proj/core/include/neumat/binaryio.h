// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEUMAT_BINARYIO_H
#define NEUMAT_BINARYIO_H

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace neumat {

// All on-disk formats are little-endian with fixed-width fields; readers must
// distinguish these failure classes so callers can report them precisely.
enum class FormatErrorKind {
    Io,            // open/read/write failure
    BadMagic,      // leading magic bytes do not match
    BadVersion,    // unsupported format version
    Truncated,     // file ended before the declared payload
    NonFinite,     // payload holds NaN/Inf where finite values are required
    InvalidValue,  // payload value violates a documented range
};

class FileFormatError : public std::runtime_error {
public:
    FileFormatError(FormatErrorKind kind, const std::string &what)
        : std::runtime_error(what), kind_(kind) {}
    FormatErrorKind kind() const { return kind_; }

private:
    FormatErrorKind kind_;
};

inline const char *format_error_name(FormatErrorKind k) {
    switch (k) {
    case FormatErrorKind::Io: return "io";
    case FormatErrorKind::BadMagic: return "bad magic";
    case FormatErrorKind::BadVersion: return "bad version";
    case FormatErrorKind::Truncated: return "truncated";
    case FormatErrorKind::NonFinite: return "non-finite";
    case FormatErrorKind::InvalidValue: return "invalid value";
    }
    return "unknown";
}

// Host is assumed little-endian (x86/ARM targets); fields are memcpy'd.
static_assert(sizeof(float) == 4 && sizeof(uint32_t) == 4 && sizeof(uint64_t) == 8);

class BinaryWriter {
public:
    explicit BinaryWriter(const std::string &path)
        : path_(path), out_(path, std::ios::binary) {
        if (!out_)
            throw FileFormatError(FormatErrorKind::Io, "cannot open for writing: " + path);
    }

    void bytes(const void *data, size_t n) {
        out_.write(static_cast<const char *>(data), static_cast<std::streamsize>(n));
        if (!out_)
            throw FileFormatError(FormatErrorKind::Io, "write failed: " + path_);
    }
    void magic(const char tag[4]) { bytes(tag, 4); }
    void u32(uint32_t v) { bytes(&v, 4); }
    void u64(uint64_t v) { bytes(&v, 8); }
    void f32(float v) { bytes(&v, 4); }
    void f64(double v) { bytes(&v, 8); }
    void f32_array(const double *v, size_t n) {
        buf_.resize(n);
        for (size_t i = 0; i < n; ++i)
            buf_[i] = static_cast<float>(v[i]);
        bytes(buf_.data(), n * 4);
    }

    void close() {
        out_.close();
        if (!out_)
            throw FileFormatError(FormatErrorKind::Io, "close failed: " + path_);
    }

private:
    std::string path_;
    std::ofstream out_;
    std::vector<float> buf_;
};

class BinaryReader {
public:
    explicit BinaryReader(const std::string &path)
        : path_(path), in_(path, std::ios::binary) {
        if (!in_)
            throw FileFormatError(FormatErrorKind::Io, "cannot open for reading: " + path);
    }

    void bytes(void *data, size_t n) {
        in_.read(static_cast<char *>(data), static_cast<std::streamsize>(n));
        if (static_cast<size_t>(in_.gcount()) != n)
            throw FileFormatError(FormatErrorKind::Truncated, "truncated file: " + path_);
    }
    void expect_magic(const char tag[4]) {
        char got[4];
        bytes(got, 4);
        if (std::memcmp(got, tag, 4) != 0)
            throw FileFormatError(FormatErrorKind::BadMagic,
                                  "bad magic in " + path_ + " (expected " +
                                      std::string(tag, 4) + ")");
    }
    uint32_t u32() { uint32_t v; bytes(&v, 4); return v; }
    uint64_t u64() { uint64_t v; bytes(&v, 8); return v; }
    float f32() { float v; bytes(&v, 4); return v; }
    double f64() { double v; bytes(&v, 8); return v; }
    void f32_array(double *v, size_t n) {
        buf_.resize(n);
        bytes(buf_.data(), n * 4);
        for (size_t i = 0; i < n; ++i)
            v[i] = static_cast<double>(buf_[i]);
    }

    bool at_eof() { return in_.peek() == std::char_traits<char>::eof(); }
    const std::string &path() const { return path_; }

private:
    std::string path_;
    std::ifstream in_;
    std::vector<float> buf_;
};

// FNV-1a, used for dataset content hashes recorded in material provenance.
class Fnv1a64 {
public:
    void update(const void *data, size_t n) {
        const auto *p = static_cast<const unsigned char *>(data);
        for (size_t i = 0; i < n; ++i) {
            hash_ ^= p[i];
            hash_ *= 0x100000001b3ULL;
        }
    }
    uint64_t digest() const { return hash_; }

private:
    uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace neumat

#endif  // NEUMAT_BINARYIO_H
