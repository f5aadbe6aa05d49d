#include "riesznet/imageio.hpp"

#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

namespace riesznet::io {
namespace {

std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0l, 255l));
}

// ---- PGM (binary P5) -----------------------------------------------------

ImageField read_pgm(std::ifstream& is, const std::string& path) {
    std::string magic;
    is >> magic;
    if (magic != "P5") throw IoError("unsupported PGM variant in " + path + " (only binary P5)");
    auto next_token = [&]() -> long {
        // skip whitespace and '#' comment lines
        while (true) {
            const int c = is.peek();
            if (c == '#') {
                std::string line;
                std::getline(is, line);
            } else if (std::isspace(c)) {
                is.get();
            } else {
                break;
            }
        }
        long v;
        if (!(is >> v)) throw IoError("corrupt PGM header in " + path);
        return v;
    };
    const long w = next_token();
    const long h = next_token();
    const long maxval = next_token();
    if (w <= 0 || h <= 0) throw IoError("corrupt PGM header in " + path);
    if (maxval > 255)
        throw IoError("unsupported bit depth in " + path + ": maxval " + std::to_string(maxval) +
                      " (only 8-bit supported)");
    is.get(); // single whitespace after maxval
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h);
    is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!is) throw IoError("truncated PGM payload in " + path);
    ImageField img(static_cast<int>(h), static_cast<int>(w), 1);
    for (std::size_t i = 0; i < bytes.size(); ++i) img.v[i] = bytes[i];
    return img;
}

void write_pgm(const std::string& path, const ImageField& img) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << "P5\n" << img.w << " " << img.h << "\n255\n";
    std::vector<std::uint8_t> bytes(img.npx());
    for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = to_byte(img.v[i]);
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw IoError("write failure on " + path);
}

// ---- PNG -------------------------------------------------------------------

struct PngReadCtx {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngReadCtx() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

std::vector<std::uint8_t> read_png_bytes(const std::string& path, int& h, int& w, int& channels) {
    PngReadCtx ctx;
    ctx.fp = std::fopen(path.c_str(), "rb");
    if (!ctx.fp) throw IoError("cannot open: " + path);
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, ctx.fp) != 8 || png_sig_cmp(sig, 0, 8))
        throw IoError("corrupt PNG header in " + path);
    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.png || !ctx.info) throw IoError("png reader init failed");
    if (setjmp(png_jmpbuf(ctx.png))) throw IoError("corrupt PNG data in " + path);
    png_init_io(ctx.png, ctx.fp);
    png_set_sig_bytes(ctx.png, 8);
    png_read_info(ctx.png, ctx.info);

    const int depth = png_get_bit_depth(ctx.png, ctx.info);
    if (depth == 16)
        throw IoError("unsupported bit depth in " + path + ": 16-bit (only 8-bit supported)");
    const int color = png_get_color_type(ctx.png, ctx.info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(ctx.png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(ctx.png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(ctx.png);
    png_read_update_info(ctx.png, ctx.info);

    h = static_cast<int>(png_get_image_height(ctx.png, ctx.info));
    w = static_cast<int>(png_get_image_width(ctx.png, ctx.info));
    channels = png_get_channels(ctx.png, ctx.info);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(h) * w * channels);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y) rows[y] = bytes.data() + static_cast<std::size_t>(y) * w * channels;
    png_read_image(ctx.png, rows.data());
    png_read_end(ctx.png, nullptr);
    return bytes;
}

struct PngWriteCtx {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngWriteCtx() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }
};

void write_png_bytes(const std::string& path, const std::uint8_t* bytes, int h, int w, int channels) {
    PngWriteCtx ctx;
    ctx.fp = std::fopen(path.c_str(), "wb");
    if (!ctx.fp) throw IoError("cannot open for writing: " + path);
    ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.png || !ctx.info) throw IoError("png writer init failed");
    if (setjmp(png_jmpbuf(ctx.png))) throw IoError("png write failure on " + path);
    png_init_io(ctx.png, ctx.fp);
    png_set_IHDR(ctx.png, ctx.info, w, h, 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(ctx.png, ctx.info);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y)
        rows[y] = const_cast<png_bytep>(bytes + static_cast<std::size_t>(y) * w * channels);
    png_write_image(ctx.png, rows.data());
    png_write_end(ctx.png, nullptr);
}

bool has_suffix(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

} // namespace

ImageField read_image(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IoError("cannot open: " + path);
    char head[2] = {0, 0};
    probe.read(head, 2);
    probe.seekg(0);
    if (head[0] == 'P' && head[1] == '5') return read_pgm(probe, path);
    probe.close();

    int h, w, channels;
    auto bytes = read_png_bytes(path, h, w, channels);
    ImageField img(h, w, 1);
    for (std::size_t p = 0; p < img.npx(); ++p) {
        if (channels == 1) {
            img.v[p] = bytes[p];
        } else {
            // luma conversion for color inputs
            const std::uint8_t* px = bytes.data() + p * channels;
            img.v[p] = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
        }
    }
    return img;
}

void write_image(const std::string& path, const ImageField& img) {
    if (img.c != 1) throw ShapeError("write_image expects a single-channel image");
    if (has_suffix(path, ".pgm")) {
        write_pgm(path, img);
        return;
    }
    std::vector<std::uint8_t> bytes(img.npx());
    for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = to_byte(img.v[i]);
    write_png_bytes(path, bytes.data(), img.h, img.w, 1);
}

void write_mask(const std::string& path, const Mask& mask) {
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(mask.h) * mask.w);
    for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask.v[i] ? 255 : 0;
    write_png_bytes(path, bytes.data(), mask.h, mask.w, 1);
}

Mask read_mask(const std::string& path) {
    ImageField img = read_image(path);
    Mask m(img.h, img.w);
    for (std::size_t i = 0; i < m.v.size(); ++i) m.v[i] = img.v[i] >= 128.0 ? 1 : 0;
    return m;
}

void write_overlay_png(const std::string& path, const ImageField& gray, const ImageField& pred,
                       double threshold) {
    if (!gray.same_size(pred)) throw ShapeError("overlay: image and prediction sizes differ");
    std::vector<std::uint8_t> bytes(gray.npx() * 3);
    for (std::size_t p = 0; p < gray.npx(); ++p) {
        const std::uint8_t g = to_byte(gray.v[p * gray.c]);
        if (pred.v[p * pred.c] >= threshold) {
            bytes[3 * p] = 255;
            bytes[3 * p + 1] = static_cast<std::uint8_t>(g * 2 / 5);
            bytes[3 * p + 2] = static_cast<std::uint8_t>(g * 2 / 5);
        } else {
            bytes[3 * p] = bytes[3 * p + 1] = bytes[3 * p + 2] = g;
        }
    }
    write_png_bytes(path, bytes.data(), gray.h, gray.w, 3);
}

} // namespace riesznet::io
