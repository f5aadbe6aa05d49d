#include "riesznet/resample.hpp"

#include <algorithm>
#include <cmath>

#include "riesznet/common.hpp"

namespace riesznet::img {

ImageField downscale(const ImageField& in, int factor) {
    if (factor < 1) throw ConfigError("downscale factor must be >= 1");
    if (factor == 1) return in;
    if (in.h % factor != 0 || in.w % factor != 0)
        throw ShapeError("downscale: " + std::to_string(in.h) + "x" + std::to_string(in.w) +
                         " not divisible by factor " + std::to_string(factor));
    ImageField out(in.h / factor, in.w / factor, in.c);
    const double inv = 1.0 / (static_cast<double>(factor) * factor);
    for (int y = 0; y < out.h; ++y)
        for (int x = 0; x < out.w; ++x)
            for (int ch = 0; ch < in.c; ++ch) {
                double acc = 0.0;
                for (int dy = 0; dy < factor; ++dy)
                    for (int dx = 0; dx < factor; ++dx)
                        acc += in.at(y * factor + dy, x * factor + dx, ch);
                out.at(y, x, ch) = acc * inv;
            }
    return out;
}

namespace {

// separable box prefilter with an integer half-width
ImageField box_filter(const ImageField& in, int ry, int rx) {
    if (ry == 0 && rx == 0) return in;
    ImageField tmp(in.h, in.w, in.c);
    const double wx = 1.0 / (2 * rx + 1);
    for (int y = 0; y < in.h; ++y)
        for (int x = 0; x < in.w; ++x)
            for (int ch = 0; ch < in.c; ++ch) {
                double acc = 0.0;
                for (int d = -rx; d <= rx; ++d)
                    acc += in.at(y, std::clamp(x + d, 0, in.w - 1), ch);
                tmp.at(y, x, ch) = acc * wx;
            }
    ImageField out(in.h, in.w, in.c);
    const double wy = 1.0 / (2 * ry + 1);
    for (int y = 0; y < in.h; ++y)
        for (int x = 0; x < in.w; ++x)
            for (int ch = 0; ch < in.c; ++ch) {
                double acc = 0.0;
                for (int d = -ry; d <= ry; ++d)
                    acc += tmp.at(std::clamp(y + d, 0, in.h - 1), x, ch);
                out.at(y, x, ch) = acc * wy;
            }
    return out;
}

} // namespace

ImageField resample_bilinear(const ImageField& in, int oh, int ow) {
    if (oh <= 0 || ow <= 0) throw ShapeError("resample target size must be positive");
    const double ry = static_cast<double>(in.h) / oh;
    const double rx = static_cast<double>(in.w) / ow;
    const ImageField* src = &in;
    ImageField filtered;
    if (ry > 1.0 || rx > 1.0) {
        const int hy = std::max(0, static_cast<int>(std::floor((ry - 1.0) / 2.0 + 0.5)));
        const int hx = std::max(0, static_cast<int>(std::floor((rx - 1.0) / 2.0 + 0.5)));
        if (hy > 0 || hx > 0) {
            filtered = box_filter(in, hy, hx);
            src = &filtered;
        }
    }
    ImageField out(oh, ow, in.c);
    for (int y = 0; y < oh; ++y) {
        const double sy = (y + 0.5) * ry - 0.5;
        const int y0 = std::clamp(static_cast<int>(std::floor(sy)), 0, in.h - 1);
        const int y1 = std::min(y0 + 1, in.h - 1);
        const double fy = std::clamp(sy - y0, 0.0, 1.0);
        for (int x = 0; x < ow; ++x) {
            const double sx = (x + 0.5) * rx - 0.5;
            const int x0 = std::clamp(static_cast<int>(std::floor(sx)), 0, in.w - 1);
            const int x1 = std::min(x0 + 1, in.w - 1);
            const double fx = std::clamp(sx - x0, 0.0, 1.0);
            for (int ch = 0; ch < in.c; ++ch) {
                const double a = src->at(y0, x0, ch) * (1 - fx) + src->at(y0, x1, ch) * fx;
                const double b = src->at(y1, x0, ch) * (1 - fx) + src->at(y1, x1, ch) * fx;
                out.at(y, x, ch) = a * (1 - fy) + b * fy;
            }
        }
    }
    return out;
}

ImageField mirror_pad(const ImageField& in, int m) {
    if (m < 0) throw ConfigError("mirror_pad margin must be >= 0");
    if (m == 0) return in;
    if (m >= in.h || m >= in.w) throw ShapeError("mirror_pad margin exceeds image size");
    ImageField out(in.h + 2 * m, in.w + 2 * m, in.c);
    auto reflect = [](int i, int n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * n - 2 - i;
        return i;
    };
    for (int y = 0; y < out.h; ++y) {
        const int sy = reflect(y - m, in.h);
        for (int x = 0; x < out.w; ++x) {
            const int sx = reflect(x - m, in.w);
            for (int ch = 0; ch < in.c; ++ch) out.at(y, x, ch) = in.at(sy, sx, ch);
        }
    }
    return out;
}

ImageField crop(const ImageField& in, int y0, int x0, int h, int w) {
    if (y0 < 0 || x0 < 0 || y0 + h > in.h || x0 + w > in.w)
        throw ShapeError("crop window out of bounds");
    ImageField out(h, w, in.c);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int ch = 0; ch < in.c; ++ch) out.at(y, x, ch) = in.at(y0 + y, x0 + x, ch);
    return out;
}

} // namespace riesznet::img
