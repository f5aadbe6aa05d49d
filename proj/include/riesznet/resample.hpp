#pragma once

#include "riesznet/image.hpp"

namespace riesznet::img {

/// Anti-aliased downscale by an integer factor: box prefilter over a x a
/// blocks followed by sampling at the block centers (for aligned integer
/// grids the two steps collapse to the block mean). Spatial size must be
/// divisible by the factor.
ImageField downscale(const ImageField& in, int factor);

/// Bilinear resampling to (oh, ow), pixel-center convention, edge clamped.
/// When shrinking, a box prefilter matched to the shrink ratio runs first.
ImageField resample_bilinear(const ImageField& in, int oh, int ow);

/// Mirror (reflect) padding by m pixels on every side.
ImageField mirror_pad(const ImageField& in, int m);

ImageField crop(const ImageField& in, int y0, int x0, int h, int w);

} // namespace riesznet::img
