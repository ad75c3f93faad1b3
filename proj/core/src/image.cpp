// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "neumat/image.h"

#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>

#include "neumat/binaryio.h"

namespace neumat {

Float linear_to_srgb(Float v) {
    if (v <= 0.0031308)
        return 12.92 * v;
    return 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

Float srgb_to_linear(Float v) {
    if (v <= 0.04045)
        return v / 12.92;
    return std::pow((v + 0.055) / 1.055, 2.4);
}

uint8_t encode_srgb_byte(Float linear) {
    Float c = std::fmin(std::fmax(linear, 0.0), 1.0);
    return static_cast<uint8_t>(std::lround(linear_to_srgb(c) * 255.0));
}

// PFM

void write_pfm(const Image &img, const std::string &path) {
    check_contract(img.width > 0 && img.height > 0, "write_pfm: empty image");
    BinaryWriter w(path);
    char header[64];
    int n = std::snprintf(header, sizeof(header), "PF\n%d %d\n-1.0\n",
                          img.width, img.height);
    w.bytes(header, static_cast<size_t>(n));
    // Rows bottom to top.
    std::vector<float> row(static_cast<size_t>(img.width) * 3);
    for (int y = img.height - 1; y >= 0; --y) {
        for (int x = 0; x < img.width; ++x) {
            const Rgb &p = img.at(x, y);
            row[3 * x + 0] = static_cast<float>(p.x);
            row[3 * x + 1] = static_cast<float>(p.y);
            row[3 * x + 2] = static_cast<float>(p.z);
        }
        w.bytes(row.data(), row.size() * sizeof(float));
    }
    w.close();
}

namespace {

// Whitespace-delimited header token; PFM headers end each token with a
// single whitespace byte, which is consumed.
std::string pfm_token(BinaryReader &r) {
    std::string tok;
    char ch;
    for (;;) {
        r.bytes(&ch, 1);
        if (std::isspace(static_cast<unsigned char>(ch))) {
            if (tok.empty())
                continue;  // skip leading runs of whitespace
            return tok;
        }
        tok.push_back(ch);
        if (tok.size() > 32)
            throw FileFormatError(FormatErrorKind::InvalidValue,
                                  "oversized header token in " + r.path());
    }
}

int parse_dim(const std::string &tok, BinaryReader &r) {
    size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(tok, &pos);
    } catch (const std::exception &) {
        pos = 0;
    }
    if (pos != tok.size() || v <= 0 || v > 1 << 20)
        throw FileFormatError(FormatErrorKind::InvalidValue,
                              "bad image dimension in " + r.path());
    return v;
}

}  // namespace

Image read_pfm(const std::string &path) {
    BinaryReader r(path);
    std::string magic = pfm_token(r);
    if (magic == "Pf")
        throw FileFormatError(FormatErrorKind::InvalidValue,
                              "grayscale PFM unsupported: " + path);
    if (magic != "PF")
        throw FileFormatError(FormatErrorKind::BadMagic, "not a PFM file: " + path);
    int width = parse_dim(pfm_token(r), r);
    int height = parse_dim(pfm_token(r), r);
    std::string scale_tok = pfm_token(r);
    double scale = 0;
    try {
        scale = std::stod(scale_tok);
    } catch (const std::exception &) {
        throw FileFormatError(FormatErrorKind::InvalidValue,
                              "bad scale in " + path);
    }
    if (scale == 0 || !std::isfinite(scale))
        throw FileFormatError(FormatErrorKind::InvalidValue, "bad scale in " + path);
    bool byteswap = scale > 0;  // positive scale marks big-endian data

    Image img(width, height);
    std::vector<unsigned char> row(static_cast<size_t>(width) * 3 * 4);
    for (int y = height - 1; y >= 0; --y) {
        r.bytes(row.data(), row.size());
        for (int x = 0; x < width; ++x) {
            Rgb &p = img.at(x, y);
            for (int c = 0; c < 3; ++c) {
                unsigned char b[4];
                std::memcpy(b, &row[(3 * x + c) * 4], 4);
                if (byteswap)
                    std::swap(b[0], b[3]), std::swap(b[1], b[2]);
                float v;
                std::memcpy(&v, b, 4);
                p[c] = v;
            }
        }
    }
    return img;
}

// PNG (libpng)

namespace {

struct PngFile {
    FILE *fp = nullptr;
    png_structp png = nullptr;
    png_infop info = nullptr;
    bool writing = false;

    ~PngFile() {
        if (png) {
            if (writing)
                png_destroy_write_struct(&png, &info);
            else
                png_destroy_read_struct(&png, &info, nullptr);
        }
        if (fp)
            std::fclose(fp);
    }
};

[[noreturn]] void png_throw(png_structp png, png_const_charp msg) {
    (void)png;
    throw FileFormatError(FormatErrorKind::InvalidValue, msg ? msg : "libpng error");
}

void png_warn(png_structp, png_const_charp) {}

}  // namespace

void write_png_srgb(const Image &img, const std::string &path) {
    check_contract(img.width > 0 && img.height > 0, "write_png_srgb: empty image");
    PngFile f;
    f.writing = true;
    f.fp = std::fopen(path.c_str(), "wb");
    if (!f.fp)
        throw FileFormatError(FormatErrorKind::Io, "cannot open for writing: " + path);
    f.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_throw, png_warn);
    if (!f.png)
        throw FileFormatError(FormatErrorKind::Io, "libpng init failed");
    f.info = png_create_info_struct(f.png);
    if (!f.info)
        throw FileFormatError(FormatErrorKind::Io, "libpng init failed");

    png_init_io(f.png, f.fp);
    png_set_IHDR(f.png, f.info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_set_sRGB_gAMA_and_cHRM(f.png, f.info, PNG_sRGB_INTENT_PERCEPTUAL);
    png_write_info(f.png, f.info);

    std::vector<unsigned char> row(static_cast<size_t>(img.width) * 3);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const Rgb &p = img.at(x, y);
            row[3 * x + 0] = encode_srgb_byte(p.x);
            row[3 * x + 1] = encode_srgb_byte(p.y);
            row[3 * x + 2] = encode_srgb_byte(p.z);
        }
        png_write_row(f.png, row.data());
    }
    png_write_end(f.png, f.info);
    if (std::fclose(f.fp) != 0) {
        f.fp = nullptr;
        throw FileFormatError(FormatErrorKind::Io, "close failed: " + path);
    }
    f.fp = nullptr;
}

namespace {

// Shared open + header-read for the two PNG ingestion paths.
void png_open_read(PngFile &f, const std::string &path) {
    f.fp = std::fopen(path.c_str(), "rb");
    if (!f.fp)
        throw FileFormatError(FormatErrorKind::Io, "cannot open for reading: " + path);
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, f.fp) != 8)
        throw FileFormatError(FormatErrorKind::Truncated, "truncated file: " + path);
    if (png_sig_cmp(sig, 0, 8) != 0)
        throw FileFormatError(FormatErrorKind::BadMagic, "not a PNG file: " + path);
    f.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_throw, png_warn);
    if (!f.png)
        throw FileFormatError(FormatErrorKind::Io, "libpng init failed");
    f.info = png_create_info_struct(f.png);
    if (!f.info)
        throw FileFormatError(FormatErrorKind::Io, "libpng init failed");
    png_init_io(f.png, f.fp);
    png_set_sig_bytes(f.png, 8);
    png_read_info(f.png, f.info);
}

}  // namespace

Image read_png_srgb(const std::string &path) {
    PngFile f;
    png_open_read(f, path);

    int color = png_get_color_type(f.png, f.info);
    int depth = png_get_bit_depth(f.png, f.info);
    if (color == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(f.png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
        png_set_expand_gray_1_2_4_to_8(f.png);
    if (depth == 16)
        png_set_strip_16(f.png);
    if (color & PNG_COLOR_MASK_ALPHA)
        png_set_strip_alpha(f.png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(f.png);
    png_read_update_info(f.png, f.info);

    int width = static_cast<int>(png_get_image_width(f.png, f.info));
    int height = static_cast<int>(png_get_image_height(f.png, f.info));
    if (png_get_channels(f.png, f.info) != 3 || png_get_bit_depth(f.png, f.info) != 8)
        throw FileFormatError(FormatErrorKind::InvalidValue,
                              "unsupported PNG layout: " + path);

    Image img(width, height);
    std::vector<unsigned char> row(static_cast<size_t>(width) * 3);
    for (int y = 0; y < height; ++y) {
        png_read_row(f.png, row.data(), nullptr);
        for (int x = 0; x < width; ++x)
            img.at(x, y) = {srgb_to_linear(row[3 * x + 0] / 255.0),
                            srgb_to_linear(row[3 * x + 1] / 255.0),
                            srgb_to_linear(row[3 * x + 2] / 255.0)};
    }
    png_read_end(f.png, nullptr);
    return img;
}

std::vector<Float> read_png_gray16(const std::string &path, int *width, int *height) {
    PngFile f;
    png_open_read(f, path);

    int color = png_get_color_type(f.png, f.info);
    int depth = png_get_bit_depth(f.png, f.info);
    if (color == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(f.png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
        png_set_expand_gray_1_2_4_to_8(f.png);
    if (color & PNG_COLOR_MASK_ALPHA)
        png_set_strip_alpha(f.png);
    if (color != PNG_COLOR_TYPE_GRAY && color != PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_rgb_to_gray(f.png, 1 /* silent */, -1, -1);
    png_set_expand_16(f.png);
    png_set_swap(f.png);  // PNG stores 16-bit samples big-endian
    png_read_update_info(f.png, f.info);

    int w = static_cast<int>(png_get_image_width(f.png, f.info));
    int h = static_cast<int>(png_get_image_height(f.png, f.info));
    if (png_get_channels(f.png, f.info) != 1 || png_get_bit_depth(f.png, f.info) != 16)
        throw FileFormatError(FormatErrorKind::InvalidValue,
                              "unsupported PNG layout: " + path);

    std::vector<Float> out(static_cast<size_t>(w) * h);
    std::vector<uint16_t> row(static_cast<size_t>(w));
    for (int y = 0; y < h; ++y) {
        png_read_row(f.png, reinterpret_cast<png_bytep>(row.data()), nullptr);
        for (int x = 0; x < w; ++x)
            out[static_cast<size_t>(y) * w + x] = row[x] / 65535.0;
    }
    png_read_end(f.png, nullptr);
    *width = w;
    *height = h;
    return out;
}

Float image_mse(const Image &a, const Image &b) {
    check_contract(a.width == b.width && a.height == b.height,
                   "image_mse: dimension mismatch");
    check_contract(!a.pixels.empty(), "image_mse: empty image");
    double sum = 0;
    for (size_t i = 0; i < a.pixels.size(); ++i) {
        Rgb d = a.pixels[i] - b.pixels[i];
        sum += d.x * d.x + d.y * d.y + d.z * d.z;
    }
    return sum / (static_cast<double>(a.pixels.size()) * 3.0);
}

}  // namespace neumat
