// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEUMAT_IMAGE_H
#define NEUMAT_IMAGE_H

#include <string>
#include <vector>

#include "neumat/vec.h"

namespace neumat {

/// Linear RGB raster, row-major with row 0 at the top.
struct Image {
    int width = 0, height = 0;
    std::vector<Rgb> pixels;

    Image() = default;
    Image(int width, int height)
        : width(width), height(height),
          pixels(static_cast<size_t>(width) * height) {}

    Rgb &at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
    const Rgb &at(int x, int y) const {
        return pixels[static_cast<size_t>(y) * width + x];
    }
};

/// sRGB transfer function and its inverse, on [0, 1].
Float linear_to_srgb(Float v);
Float srgb_to_linear(Float v);

/// 8-bit sRGB encoding of one linear value: clamp to [0, 1], transfer,
/// round to the nearest byte.
uint8_t encode_srgb_byte(Float linear);

/// PFM (portable float map), color variant, negative scale = little-endian,
/// rows stored bottom to top. Values pass through as f32 so a write/read
/// cycle reproduces the file byte for byte.
void write_pfm(const Image &img, const std::string &path);
Image read_pfm(const std::string &path);

/// Tone-mapped 8-bit sRGB PNG export.
void write_png_srgb(const Image &img, const std::string &path);

/// 8-bit PNG ingestion: palette/gray/alpha variants are normalized to RGB,
/// values linearized from sRGB.
Image read_png_srgb(const std::string &path);

/// 16-bit grayscale PNG ingestion (8-bit files are widened); returns
/// height-major samples scaled to [0, 1].
std::vector<Float> read_png_gray16(const std::string &path, int *width, int *height);

/// Mean over pixels and channels of the squared difference of linear
/// values. Dimension mismatch is a contract violation.
Float image_mse(const Image &a, const Image &b);

}  // namespace neumat

#endif  // NEUMAT_IMAGE_H
