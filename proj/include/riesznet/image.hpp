#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "riesznet/common.hpp"

namespace riesznet {

/// Real-valued H x W x C raster, channels-last. Carrier of all image and
/// feature-map data outside the autodiff graph.
struct ImageField {
    int h = 0;
    int w = 0;
    int c = 1;
    std::vector<double> v;

    ImageField() = default;
    ImageField(int height, int width, int channels = 1, double fill = 0.0)
        : h(height), w(width), c(channels),
          v(static_cast<std::size_t>(height) * width * channels, fill) {
        if (height <= 0 || width <= 0 || channels <= 0)
            throw ShapeError("ImageField dimensions must be positive");
    }

    std::size_t size() const { return v.size(); }
    std::size_t npx() const { return static_cast<std::size_t>(h) * w; }

    double& at(int y, int x, int ch = 0) {
        return v[(static_cast<std::size_t>(y) * w + x) * c + ch];
    }
    double at(int y, int x, int ch = 0) const {
        return v[(static_cast<std::size_t>(y) * w + x) * c + ch];
    }

    bool same_size(const ImageField& o) const { return h == o.h && w == o.w; }

    bool all_finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

/// Binary mask as 0/1 bytes, H x W.
struct Mask {
    int h = 0;
    int w = 0;
    std::vector<unsigned char> v;

    Mask() = default;
    Mask(int height, int width, unsigned char fill = 0)
        : h(height), w(width), v(static_cast<std::size_t>(height) * width, fill) {}

    unsigned char& at(int y, int x) { return v[static_cast<std::size_t>(y) * w + x]; }
    unsigned char at(int y, int x) const { return v[static_cast<std::size_t>(y) * w + x]; }
    std::size_t count() const {
        std::size_t n = 0;
        for (auto b : v) n += b != 0;
        return n;
    }
};

/// Cyclic shift by (dy, dx); used by the translation-equivariance checks.
inline ImageField circshift(const ImageField& img, int dy, int dx) {
    ImageField out(img.h, img.w, img.c);
    const int h = img.h, w = img.w;
    auto wrap = [](int a, int n) { return ((a % n) + n) % n; };
    for (int y = 0; y < h; ++y) {
        const int sy = wrap(y - dy, h);
        for (int x = 0; x < w; ++x) {
            const int sx = wrap(x - dx, w);
            for (int ch = 0; ch < img.c; ++ch) out.at(y, x, ch) = img.at(sy, sx, ch);
        }
    }
    return out;
}

} // namespace riesznet
