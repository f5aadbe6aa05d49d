#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riesznet/image.hpp"
#include "riesznet/rng.hpp"
#include "riesznet/training.hpp"

namespace riesznet::data {

/// Synthetic crack/pore image parameters. Gray values live in [0,255].
struct SimulatorConfig {
    int size = 256;
    double width = 3.0;
    bool vary_width = false;   // multiscale mode: thickness wanders in [width_min, width_max]
    double width_min = 1.0;
    double width_max = 11.0;
    double hurst = 0.7;
    double bg_mean = 160.0;
    double bg_sigma = 20.0;
    double crack_mean = 60.0;
    double crack_sigma = 15.0;
    int pore_count_min = 5;
    int pore_count_max = 15;
    double pore_r_min = 2.0;
    double pore_r_max = 8.0;
    double blur_sigma = 0.8;
    std::uint64_t seed = 0;

    void validate() const;
};

struct CrackSample {
    ImageField gray; // blurred, [0,255]
    Mask crack_mask; // pre-blur
    Mask pore_mask;  // pre-blur
    double width = 0.0;
    std::uint64_t seed = 0;
};

/// One fractional-Brownian-motion centerline crossing the image left to
/// right, dilated to the nominal width, plus random air pores; crack and
/// pore pixels are redrawn from the dark distribution and the gray image is
/// blurred to mimic the partial-volume effect. Masks are returned pre-blur.
CrackSample simulate_crack(const SimulatorConfig& cfg);

/// Zero-mean 1d fractional Brownian motion by spectral synthesis, unit std.
std::vector<double> fbm_path(int n, double hurst, Rng& rng);

/// Truncated separable Gaussian blur, reflective borders.
void gaussian_blur(ImageField& img, double sigma);

/// Exact Euclidean distance (in pixels) from each foreground pixel to the
/// nearest background pixel; 0 on background.
std::vector<double> distance_to_background(const Mask& fg);

struct Tile {
    ImageField gray;
    Mask crack_mask;
    Mask pore_mask;
};

/// Non-overlapping grid of tile x tile crops (16 for 256 -> 64).
std::vector<Tile> tile_crops(const CrackSample& s, int tile);

// ---- digit classification data ------------------------------------------

/// Raw digit set in memory (row-major uint8 images, one label byte each).
struct DigitSet {
    int rows = 28;
    int cols = 28;
    std::vector<std::uint8_t> images; // count*rows*cols
    std::vector<std::uint8_t> labels;
    std::size_t count() const { return labels.size(); }
};

/// IDX byte format (big-endian magic + dims, raw payload).
DigitSet read_idx(const std::string& images_path, const std::string& labels_path);
void write_idx(const DigitSet& set, const std::string& images_path, const std::string& labels_path);

struct MnistScaleConfig {
    int canvas = 112;
    double scale = 1.0; // in [0.5, 8]
    int pad = 0;        // 0 | 20 | 40; enlarges the canvas by 2*pad

    void validate() const;
    int canvas_total() const { return canvas + 2 * pad; }
};

/// Rescales each digit (anti-aliased bilinear), centers it on the canvas
/// filled with the data set's minimal gray value, clips whatever exceeds the
/// canvas, and returns images in [0,1] with labels preserved.
std::vector<train::ClassSample> build_mnist_scale(const DigitSet& raw, const MnistScaleConfig& cfg,
                                                  std::size_t first, std::size_t count);

/// Deterministic procedurally rendered 28x28 digit set (stroke glyphs with
/// random affine jitter). Fills the role of an external digit corpus where
/// none ships with the repository; written and re-read through the IDX path.
DigitSet synth_digits(std::size_t count, std::uint64_t seed);

} // namespace riesznet::data
