#include "riesznet/data.hpp"

#include <algorithm>
#include <cmath>

#include "riesznet/resample.hpp"

namespace riesznet::data {

void SimulatorConfig::validate() const {
    if (size < 16) throw ConfigError("simulator: image size must be >= 16");
    const double wmax = vary_width ? width_max : width;
    const double wmin = vary_width ? width_min : width;
    if (wmin < 1.0) throw ConfigError("simulator: crack width must be >= 1");
    if (wmax >= size / 4.0)
        throw ConfigError("simulator: crack width " + std::to_string(wmax) +
                          " too large for image size " + std::to_string(size));
    if (vary_width && width_min > width_max)
        throw ConfigError("simulator: width_min must not exceed width_max");
    if (pore_count_min > pore_count_max || pore_r_min > pore_r_max)
        throw ConfigError("simulator: empty pore range");
}

std::vector<double> fbm_path(int n, double hurst, Rng& rng) {
    // random-phase spectral synthesis: amplitude ~ k^-(H + 1/2)
    std::vector<double> path(n, 0.0);
    const int kmax = n / 2;
    for (int k = 1; k <= kmax; ++k) {
        const double amp = std::pow(static_cast<double>(k), -(hurst + 0.5));
        const double phase = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        const double omega = 2.0 * 3.14159265358979323846 * k / n;
        for (int i = 0; i < n; ++i) path[i] += amp * std::cos(omega * i + phase);
    }
    double mean = 0.0;
    for (double v : path) mean += v;
    mean /= n;
    double var = 0.0;
    for (double& v : path) {
        v -= mean;
        var += v * v;
    }
    var /= n;
    const double inv_std = var > 0.0 ? 1.0 / std::sqrt(var) : 0.0;
    for (double& v : path) v *= inv_std;
    return path;
}

void gaussian_blur(ImageField& img, double sigma) {
    if (sigma <= 0.0) return;
    const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> k(2 * r + 1);
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        k[i + r] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += k[i + r];
    }
    for (double& v : k) v /= sum;

    auto reflect = [](int i, int n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * n - 2 - i;
        return i;
    };
    ImageField tmp(img.h, img.w, img.c);
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x)
            for (int ch = 0; ch < img.c; ++ch) {
                double acc = 0.0;
                for (int d = -r; d <= r; ++d) acc += k[d + r] * img.at(y, reflect(x + d, img.w), ch);
                tmp.at(y, x, ch) = acc;
            }
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x)
            for (int ch = 0; ch < img.c; ++ch) {
                double acc = 0.0;
                for (int d = -r; d <= r; ++d) acc += k[d + r] * tmp.at(reflect(y + d, img.h), x, ch);
                img.at(y, x, ch) = acc;
            }
}

namespace {

void stamp_disc(Mask& m, double cy, double cx, double r) {
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - r)));
    const int y1 = std::min(m.h - 1, static_cast<int>(std::ceil(cy + r)));
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - r)));
    const int x1 = std::min(m.w - 1, static_cast<int>(std::ceil(cx + r)));
    const double r2 = r * r;
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            const double dy = y - cy, dx = x - cx;
            if (dy * dy + dx * dx <= r2) m.at(y, x) = 1;
        }
}

// 1d squared distance transform (Felzenszwalb/Huttenlocher lower envelope)
void dt1d(const std::vector<double>& f, std::vector<double>& d, int n) {
    static thread_local std::vector<int> v;
    static thread_local std::vector<double> z;
    v.assign(n, 0);
    z.assign(n + 1, 0.0);
    int k = 0;
    v[0] = 0;
    z[0] = -1e30;
    z[1] = 1e30;
    for (int q = 1; q < n; ++q) {
        double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = 1e30;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        d[q] = (q - v[k]) * (q - v[k]) + f[v[k]];
    }
}

} // namespace

std::vector<double> distance_to_background(const Mask& fg) {
    const int h = fg.h, w = fg.w;
    constexpr double kInf = 1e30;
    std::vector<double> d(static_cast<std::size_t>(h) * w);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = fg.v[i] ? kInf : 0.0;

    std::vector<double> col(h), out(h);
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) col[y] = d[static_cast<std::size_t>(y) * w + x];
        dt1d(col, out, h);
        for (int y = 0; y < h; ++y) d[static_cast<std::size_t>(y) * w + x] = out[y];
    }
    std::vector<double> row(w), rout(w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) row[x] = d[static_cast<std::size_t>(y) * w + x];
        dt1d(row, rout, w);
        for (int x = 0; x < w; ++x) d[static_cast<std::size_t>(y) * w + x] = std::sqrt(rout[x]);
    }
    return d;
}

CrackSample simulate_crack(const SimulatorConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    const int n = cfg.size;

    CrackSample s;
    s.seed = cfg.seed;
    s.width = cfg.width;
    s.gray = ImageField(n, n, 1);
    s.crack_mask = Mask(n, n);
    s.pore_mask = Mask(n, n);

    // background
    for (double& v : s.gray.v) v = std::clamp(rng.normal(cfg.bg_mean, cfg.bg_sigma), 0.0, 255.0);

    // pores
    const int pores = static_cast<int>(rng.uniform_int(cfg.pore_count_min, cfg.pore_count_max));
    for (int i = 0; i < pores; ++i) {
        const double cy = rng.uniform(0.0, n - 1.0);
        const double cx = rng.uniform(0.0, n - 1.0);
        const double r = rng.uniform(cfg.pore_r_min, cfg.pore_r_max);
        stamp_disc(s.pore_mask, cy, cx, r);
    }

    // fBm centerline, one point per column, clamped inside a safety margin
    const double wmax = cfg.vary_width ? cfg.width_max : cfg.width;
    const double margin = wmax / 2.0 + 2.0;
    std::vector<double> path = fbm_path(n, cfg.hurst, rng);
    const double base = rng.uniform(0.3, 0.7) * n;
    const double amp = n / 6.0;
    std::vector<double> centerline(n);
    for (int x = 0; x < n; ++x)
        centerline[x] = std::clamp(base + amp * path[x], margin, n - 1.0 - margin);

    // per-column radius; in multiscale mode the width wanders smoothly
    std::vector<double> radius(n, (cfg.width - 1.0) / 2.0);
    if (cfg.vary_width) {
        std::vector<double> wpath = fbm_path(n, 0.9, rng);
        double lo = 1e30, hi = -1e30;
        for (double v : wpath) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double span = hi > lo ? hi - lo : 1.0;
        for (int x = 0; x < n; ++x) {
            const double t = (wpath[x] - lo) / span;
            const double wx = cfg.width_min + t * (cfg.width_max - cfg.width_min);
            radius[x] = (wx - 1.0) / 2.0;
        }
    }

    // dilate the centerline: stamp a disc at every point of the connecting
    // polyline so steep segments stay 8-connected
    for (int x = 0; x < n; ++x) {
        stamp_disc(s.crack_mask, centerline[x], x, radius[x]);
        if (x + 1 < n) {
            const double dy = centerline[x + 1] - centerline[x];
            const int steps = static_cast<int>(std::ceil(std::fabs(dy)));
            for (int st = 1; st < steps; ++st) {
                const double t = static_cast<double>(st) / steps;
                stamp_disc(s.crack_mask, centerline[x] + t * dy, x + t, radius[x]);
            }
        }
    }

    // crack and pore pixels are air: redraw them dark
    for (std::size_t i = 0; i < s.gray.v.size(); ++i)
        if (s.crack_mask.v[i] || s.pore_mask.v[i])
            s.gray.v[i] = std::clamp(rng.normal(cfg.crack_mean, cfg.crack_sigma), 0.0, 255.0);

    gaussian_blur(s.gray, cfg.blur_sigma);
    for (double& v : s.gray.v) v = std::clamp(v, 0.0, 255.0);
    return s;
}

std::vector<Tile> tile_crops(const CrackSample& s, int tile) {
    if (tile <= 0 || s.gray.h % tile != 0 || s.gray.w % tile != 0)
        throw ShapeError("tile_crops: image size " + std::to_string(s.gray.h) + "x" +
                         std::to_string(s.gray.w) + " not divisible by tile " + std::to_string(tile));
    std::vector<Tile> tiles;
    for (int ty = 0; ty < s.gray.h / tile; ++ty)
        for (int tx = 0; tx < s.gray.w / tile; ++tx) {
            Tile t;
            t.gray = img::crop(s.gray, ty * tile, tx * tile, tile, tile);
            t.crack_mask = Mask(tile, tile);
            t.pore_mask = Mask(tile, tile);
            for (int y = 0; y < tile; ++y)
                for (int x = 0; x < tile; ++x) {
                    t.crack_mask.at(y, x) = s.crack_mask.at(ty * tile + y, tx * tile + x);
                    t.pore_mask.at(y, x) = s.pore_mask.at(ty * tile + y, tx * tile + x);
                }
            tiles.push_back(std::move(t));
        }
    return tiles;
}

void MnistScaleConfig::validate() const {
    if (canvas < 8) throw ConfigError("digit canvas must be >= 8");
    if (scale < 0.5 || scale > 8.0)
        throw ConfigError("digit scale must lie in [0.5, 8], got " + std::to_string(scale));
    if (pad < 0) throw ConfigError("digit padding must be >= 0");
}

std::vector<train::ClassSample> build_mnist_scale(const DigitSet& raw, const MnistScaleConfig& cfg,
                                                  std::size_t first, std::size_t count) {
    cfg.validate();
    if (first + count > raw.count())
        throw ConfigError("build_mnist_scale: requested range exceeds digit set size");

    // canvas background uses the data set's minimal gray value
    double min_gray = 255.0;
    for (std::uint8_t b : raw.images) min_gray = std::min(min_gray, static_cast<double>(b));

    const int total = cfg.canvas_total();
    const int ext = std::max(1, static_cast<int>(std::lround(raw.rows * cfg.scale)));

    std::vector<train::ClassSample> out;
    out.reserve(count);
    const std::size_t px_per = static_cast<std::size_t>(raw.rows) * raw.cols;
    for (std::size_t i = first; i < first + count; ++i) {
        ImageField digit(raw.rows, raw.cols, 1);
        for (std::size_t p = 0; p < px_per; ++p)
            digit.v[p] = static_cast<double>(raw.images[i * px_per + p]);
        ImageField scaled = (ext == raw.rows) ? digit : img::resample_bilinear(digit, ext, ext);

        train::ClassSample cs;
        cs.label = raw.labels[i];
        cs.image = ImageField(total, total, 1, min_gray / 255.0);
        const int off = (total - ext) / 2; // may be negative: digit clipped at the canvas
        for (int y = 0; y < total; ++y) {
            const int sy = y - off;
            if (sy < 0 || sy >= ext) continue;
            for (int x = 0; x < total; ++x) {
                const int sx = x - off;
                if (sx < 0 || sx >= ext) continue;
                cs.image.at(y, x) = std::clamp(scaled.at(sy, sx), 0.0, 255.0) / 255.0;
            }
        }
        out.push_back(std::move(cs));
    }
    return out;
}

} // namespace riesznet::data
