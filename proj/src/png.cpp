// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

#include "motionrep/io.hpp"

#include <png.h>

#include <cmath>
#include <cstring>

namespace motionrep {

namespace {

std::vector<std::uint8_t> encode(png_uint_32 width, png_uint_32 height, png_uint_32 format,
                                 const void *pixels) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = width;
    image.height = height;
    image.format = format;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels, 0, nullptr)) {
        fail(ErrorCode::IoError, std::string("png encode: ") + image.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels, 0, nullptr)) {
        fail(ErrorCode::IoError, std::string("png encode: ") + image.message);
    }
    out.resize(size);
    return out;
}

struct Decoded {
    png_image header;
    std::vector<std::uint8_t> pixels;
};

/// Opens the PNG, lets the caller pick an output format from the header, and
/// decodes into it.
template <typename PickFormat>
Decoded decode(std::span<const std::uint8_t> bytes, PickFormat pick) {
    Decoded d;
    std::memset(&d.header, 0, sizeof d.header);
    d.header.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&d.header, bytes.data(), bytes.size())) {
        fail(ErrorCode::ParseError, std::string("png decode: ") + d.header.message);
    }
    d.header.format = pick(d.header.format);
    d.pixels.resize(PNG_IMAGE_SIZE(d.header));
    if (!png_image_finish_read(&d.header, nullptr, d.pixels.data(), 0, nullptr)) {
        const std::string message = d.header.message;
        png_image_free(&d.header);
        fail(ErrorCode::ParseError, "png decode: " + message);
    }
    return d;
}

} // namespace

std::vector<std::uint8_t> encode_png(const RgbImage &image) {
    return encode(static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height),
                  PNG_FORMAT_RGB, image.data.data());
}

RgbImage decode_png_rgb(std::span<const std::uint8_t> bytes) {
    auto d = decode(bytes, [](png_uint_32) { return png_uint_32{PNG_FORMAT_RGB}; });
    RgbImage out;
    out.width = static_cast<int>(d.header.width);
    out.height = static_cast<int>(d.header.height);
    out.data = std::move(d.pixels);
    return out;
}

std::vector<std::uint8_t> encode_png_gray8(const Grid<std::uint8_t> &image) {
    return encode(static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height),
                  PNG_FORMAT_GRAY, image.values.data());
}

std::vector<std::uint8_t> encode_png_gray16(const Grid<std::uint16_t> &image) {
    return encode(static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height),
                  PNG_FORMAT_LINEAR_Y, image.values.data());
}

Mask decode_mask(std::span<const std::uint8_t> png_bytes) {
    bool grayscale = true;
    auto d = decode(png_bytes, [&](png_uint_32 format) {
        grayscale = (format & PNG_FORMAT_FLAG_COLOR) == 0 && (format & PNG_FORMAT_FLAG_LINEAR) == 0;
        return png_uint_32{PNG_FORMAT_GRAY};
    });
    if (!grayscale) {
        fail(ErrorCode::ParseError, "mask: expected an 8-bit grayscale PNG");
    }
    Mask mask(static_cast<int>(d.header.width), static_cast<int>(d.header.height));
    for (std::size_t i = 0; i < mask.values.size(); ++i) {
        mask.values[i] = d.pixels[i] > 127 ? 1 : 0;
    }
    return mask;
}

DepthMap decode_depth_png(std::span<const std::uint8_t> png_bytes, double millimeters_per_unit) {
    if (!(millimeters_per_unit > 0.0) || !std::isfinite(millimeters_per_unit)) {
        fail(ErrorCode::InvalidArgument, "depth: millimeters_per_unit must be positive");
    }
    bool grayscale = true;
    auto d = decode(png_bytes, [&](png_uint_32 format) {
        // LINEAR marks 16-bit samples in the file; 8-bit input would be
        // gamma-expanded by libpng, so it is rejected.
        grayscale = (format & PNG_FORMAT_FLAG_COLOR) == 0 && (format & PNG_FORMAT_FLAG_LINEAR) != 0;
        return png_uint_32{PNG_FORMAT_LINEAR_Y};
    });
    if (!grayscale) {
        fail(ErrorCode::ParseError, "depth: expected a 16-bit grayscale PNG");
    }
    DepthMap depth(static_cast<int>(d.header.width), static_cast<int>(d.header.height));
    for (std::size_t i = 0; i < depth.values.size(); ++i) {
        std::uint16_t raw = 0;
        std::memcpy(&raw, d.pixels.data() + 2 * i, 2);
        depth.values[i] = raw * millimeters_per_unit / 1000.0;
    }
    return depth;
}

} // namespace motionrep
