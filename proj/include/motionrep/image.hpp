// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "motionrep/scene.hpp"

#include <cstdint>
#include <vector>

namespace motionrep {

/// Interleaved 8-bit RGB, row-major, no padding.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    RgbImage() = default;
    RgbImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::size_t offset(int x, int y) const {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(x)) *
               3;
    }

    Rgb at(int x, int y) const {
        const std::size_t o = offset(x, y);
        return {data[o], data[o + 1], data[o + 2]};
    }

    void set(int x, int y, Rgb c) {
        const std::size_t o = offset(x, y);
        data[o] = c.r;
        data[o + 1] = c.g;
        data[o + 2] = c.b;
    }

    bool operator==(const RgbImage &) const = default;
};

/// Row-major scalar grid (masks, depth maps).
template <typename T>
struct Grid {
    int width = 0;
    int height = 0;
    std::vector<T> values;

    Grid() = default;
    Grid(int w, int h, T fill = T{})
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }

    T &operator()(int x, int y) {
        return values[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(x)];
    }
    const T &operator()(int x, int y) const {
        return values[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(x)];
    }

    bool operator==(const Grid &) const = default;
};

using Mask = Grid<std::uint8_t>;
using DepthMap = Grid<double>;

} // namespace motionrep
