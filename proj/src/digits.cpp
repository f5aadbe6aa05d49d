#include <array>
#include <cmath>

#include "riesznet/data.hpp"

// Procedural digit renderer: each glyph is a set of strokes (polylines and
// elliptic arcs sampled into polylines) in a unit box, rasterized by distance
// to the stroke set with a one-pixel soft edge, then jittered by a small
// random affine map. White-on-black like the classic handwritten digit sets,
// so the minimal gray value is 0.

namespace riesznet::data {
namespace {

struct Pt {
    double x, y;
};

using Poly = std::vector<Pt>;

Poly arc(double cx, double cy, double rx, double ry, double a0, double a1, int segs = 36) {
    Poly p;
    for (int i = 0; i <= segs; ++i) {
        const double t = a0 + (a1 - a0) * i / segs;
        p.push_back({cx + rx * std::cos(t), cy + ry * std::sin(t)});
    }
    return p;
}

Poly line(double x0, double y0, double x1, double y1) { return {{x0, y0}, {x1, y1}}; }

// y grows downward; angles follow (cos, sin) with that convention
std::vector<Poly> glyph(int digit) {
    constexpr double pi = 3.14159265358979323846;
    switch (digit) {
        case 0: return {arc(0.5, 0.5, 0.30, 0.42, 0, 2 * pi)};
        case 1: return {line(0.52, 0.08, 0.52, 0.92), line(0.34, 0.26, 0.52, 0.08)};
        case 2:
            return {arc(0.5, 0.30, 0.27, 0.24, -pi, 0.25 * pi),
                    line(0.69, 0.47, 0.24, 0.90), line(0.24, 0.90, 0.78, 0.90)};
        case 3:
            return {arc(0.47, 0.29, 0.25, 0.21, -0.8 * pi, 0.5 * pi),
                    arc(0.47, 0.71, 0.27, 0.23, -0.5 * pi, 0.8 * pi)};
        case 4:
            return {line(0.64, 0.08, 0.22, 0.62), line(0.22, 0.62, 0.82, 0.62),
                    line(0.64, 0.08, 0.64, 0.92)};
        case 5:
            return {line(0.74, 0.10, 0.32, 0.10), line(0.32, 0.10, 0.29, 0.45),
                    arc(0.47, 0.66, 0.26, 0.25, -0.45 * pi, 0.85 * pi)};
        case 6:
            return {line(0.62, 0.08, 0.34, 0.50), arc(0.5, 0.66, 0.24, 0.24, 0, 2 * pi)};
        case 7: return {line(0.22, 0.10, 0.80, 0.10), line(0.80, 0.10, 0.42, 0.92)};
        case 8:
            return {arc(0.5, 0.30, 0.21, 0.20, 0, 2 * pi), arc(0.5, 0.71, 0.25, 0.23, 0, 2 * pi)};
        default:
            return {arc(0.52, 0.33, 0.24, 0.24, 0, 2 * pi), line(0.76, 0.36, 0.58, 0.92)};
    }
}

double dist_to_segment(const Pt& p, const Pt& a, const Pt& b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = p.x - (a.x + t * vx), dy = p.y - (a.y + t * vy);
    return std::sqrt(dx * dx + dy * dy);
}

double dist_to_strokes(const Pt& p, const std::vector<Poly>& strokes) {
    double d = 1e30;
    for (const auto& poly : strokes)
        for (std::size_t i = 0; i + 1 < poly.size(); ++i)
            d = std::min(d, dist_to_segment(p, poly[i], poly[i + 1]));
    return d;
}

} // namespace

DigitSet synth_digits(std::size_t count, std::uint64_t seed) {
    DigitSet set;
    set.rows = 28;
    set.cols = 28;
    set.images.resize(count * 28 * 28);
    set.labels.resize(count);

    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(derive_seed(seed, i));
        const int digit = static_cast<int>(rng.uniform_int(0, 9));
        set.labels[i] = static_cast<std::uint8_t>(digit);
        const auto strokes = glyph(digit);

        // affine jitter (applied as the inverse map while sampling)
        const double angle = rng.uniform(-0.18, 0.18);
        const double sx = rng.uniform(0.88, 1.10);
        const double sy = rng.uniform(0.88, 1.10);
        const double shear = rng.uniform(-0.10, 0.10);
        const double tx = rng.uniform(-1.5, 1.5);
        const double ty = rng.uniform(-1.5, 1.5);
        const double half_thick = rng.uniform(0.85, 1.45); // stroke half width in pixels

        const double ca = std::cos(angle), sa = std::sin(angle);
        const double box = 20.0; // glyph box in pixels, centered on the canvas
        for (int y = 0; y < 28; ++y) {
            for (int x = 0; x < 28; ++x) {
                // canvas px -> centered -> un-translate -> un-rotate/shear/scale -> unit box
                double px = x + 0.5 - 14.0 - tx;
                double py = y + 0.5 - 14.0 - ty;
                const double rx = (ca * px + sa * py);
                const double ry = (-sa * px + ca * py);
                px = rx / sx;
                py = (ry - shear * rx) / sy;
                const Pt p{px / box + 0.5, py / box + 0.5};
                const double d_px = dist_to_strokes(p, strokes) * box * std::min(sx, sy);
                const double v = std::clamp(half_thick + 0.5 - d_px, 0.0, 1.0);
                set.images[(i * 28 + y) * 28 + x] = static_cast<std::uint8_t>(std::lround(v * 255.0));
            }
        }
    }
    return set;
}

} // namespace riesznet::data
