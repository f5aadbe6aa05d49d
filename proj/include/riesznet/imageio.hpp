#pragma once

#include <string>

#include "riesznet/image.hpp"

namespace riesznet::io {

/// 8-bit grayscale readers/writers. PGM (binary P5) and PNG are supported;
/// the format is picked from the file content on read and from the extension
/// on write. Values map 0..255 <-> [0,255] losslessly; 16-bit files are
/// rejected with an explicit unsupported-depth error.
ImageField read_image(const std::string& path);
void write_image(const std::string& path, const ImageField& img);

/// Binary mask as a 0/255 grayscale PNG.
void write_mask(const std::string& path, const Mask& mask);
Mask read_mask(const std::string& path);

/// Prediction overlay: pixels above the threshold are painted red over the
/// grayscale base. RGB PNG.
void write_overlay_png(const std::string& path, const ImageField& gray, const ImageField& pred,
                       double threshold);

} // namespace riesznet::io
