#include <cstdint>
#include <fstream>

#include "riesznet/data.hpp"

// IDX byte format: big-endian magic (0x0000..dtype..rank), big-endian
// dimension sizes, then the raw payload. Digit images are rank-3 uint8,
// labels rank-1 uint8.

namespace riesznet::data {
namespace {

std::uint32_t get_be32(std::istream& is, const std::string& path) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw IoError("malformed IDX header in " + path);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) |
           std::uint32_t(b[3]);
}

void put_be32(std::ostream& os, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

} // namespace

DigitSet read_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream imgs(images_path, std::ios::binary);
    if (!imgs) throw IoError("cannot open IDX image file: " + images_path);
    if (get_be32(imgs, images_path) != 0x00000803u)
        throw IoError("malformed IDX header: bad image magic in " + images_path);
    const std::uint32_t count = get_be32(imgs, images_path);
    const std::uint32_t rows = get_be32(imgs, images_path);
    const std::uint32_t cols = get_be32(imgs, images_path);
    if (rows == 0 || cols == 0 || rows > 4096 || cols > 4096)
        throw IoError("malformed IDX header: implausible dimensions in " + images_path);

    DigitSet set;
    set.rows = static_cast<int>(rows);
    set.cols = static_cast<int>(cols);
    set.images.resize(static_cast<std::size_t>(count) * rows * cols);
    imgs.read(reinterpret_cast<char*>(set.images.data()),
              static_cast<std::streamsize>(set.images.size()));
    if (!imgs) throw IoError("truncated IDX image payload in " + images_path);

    std::ifstream labs(labels_path, std::ios::binary);
    if (!labs) throw IoError("cannot open IDX label file: " + labels_path);
    if (get_be32(labs, labels_path) != 0x00000801u)
        throw IoError("malformed IDX header: bad label magic in " + labels_path);
    const std::uint32_t lcount = get_be32(labs, labels_path);
    if (lcount != count)
        throw IoError("IDX label count " + std::to_string(lcount) + " does not match image count " +
                      std::to_string(count));
    set.labels.resize(count);
    labs.read(reinterpret_cast<char*>(set.labels.data()), count);
    if (!labs) throw IoError("truncated IDX label payload in " + labels_path);
    return set;
}

void write_idx(const DigitSet& set, const std::string& images_path, const std::string& labels_path) {
    std::ofstream imgs(images_path, std::ios::binary | std::ios::trunc);
    if (!imgs) throw IoError("cannot open IDX image file for writing: " + images_path);
    put_be32(imgs, 0x00000803u);
    put_be32(imgs, static_cast<std::uint32_t>(set.count()));
    put_be32(imgs, static_cast<std::uint32_t>(set.rows));
    put_be32(imgs, static_cast<std::uint32_t>(set.cols));
    imgs.write(reinterpret_cast<const char*>(set.images.data()),
               static_cast<std::streamsize>(set.images.size()));
    if (!imgs) throw IoError("write failure on " + images_path);

    std::ofstream labs(labels_path, std::ios::binary | std::ios::trunc);
    if (!labs) throw IoError("cannot open IDX label file for writing: " + labels_path);
    put_be32(labs, 0x00000801u);
    put_be32(labs, static_cast<std::uint32_t>(set.count()));
    labs.write(reinterpret_cast<const char*>(set.labels.data()),
               static_cast<std::streamsize>(set.labels.size()));
    if (!labs) throw IoError("write failure on " + labels_path);
}

} // namespace riesznet::data
