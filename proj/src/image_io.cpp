#include "agetrace/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <vector>

namespace agetrace {
namespace {

std::string lower_ext(const std::string& path) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return {};
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::string& what, const std::string& path) {
    throw std::runtime_error(what + ": " + path);
}

// ---------------------------------------------------------------- PNG --

RasterImage read_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail("cannot open", path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail("png alloc failed", path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail("png alloc failed", path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail("png decode error", path);
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    int depth = png_get_bit_depth(png, info);
    int color = png_get_color_type(png, info);

    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    if (depth == 16) png_set_swap(png); // libpng hands back big-endian; we want host LE
    png_read_update_info(png, info);

    depth = png_get_bit_depth(png, info);
    color = png_get_color_type(png, info);
    int channels;
    switch (color) {
    case PNG_COLOR_TYPE_GRAY: channels = 1; break;
    case PNG_COLOR_TYPE_RGB: channels = 3; break;
    default:
        png_destroy_read_struct(&png, &info, nullptr);
        fail("unsupported png color type", path);
    }

    RasterImage img(static_cast<int>(w), static_cast<int>(h), channels, depth);
    const std::size_t stride = png_get_rowbytes(png, info);
    std::vector<unsigned char> rowbuf(stride);
    for (png_uint_32 y = 0; y < h; ++y) {
        png_read_row(png, rowbuf.data(), nullptr);
        if (depth == 8) {
            for (std::size_t i = 0; i < static_cast<std::size_t>(w) * channels; ++i)
                img.data[static_cast<std::size_t>(y) * w * channels + i] = rowbuf[i];
        } else {
            const auto* src = reinterpret_cast<const std::uint16_t*>(rowbuf.data());
            for (std::size_t i = 0; i < static_cast<std::size_t>(w) * channels; ++i)
                img.data[static_cast<std::size_t>(y) * w * channels + i] = src[i];
        }
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void write_png(const std::string& path, const RasterImage& img) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) fail("cannot open for write", path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail("png alloc failed", path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail("png alloc failed", path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail("png encode error", path);
    }

    png_init_io(png, fp.get());
    const int color = img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(png, info, img.width, img.height, img.bit_depth, color,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (img.bit_depth == 16) png_set_swap(png);

    const std::size_t samples = static_cast<std::size_t>(img.width) * img.channels;
    if (img.bit_depth == 8) {
        std::vector<unsigned char> rowbuf(samples);
        for (int y = 0; y < img.height; ++y) {
            for (std::size_t i = 0; i < samples; ++i)
                rowbuf[i] = static_cast<unsigned char>(img.data[static_cast<std::size_t>(y) * samples + i]);
            png_write_row(png, rowbuf.data());
        }
    } else {
        std::vector<std::uint16_t> rowbuf(samples);
        for (int y = 0; y < img.height; ++y) {
            std::memcpy(rowbuf.data(), img.data.data() + static_cast<std::size_t>(y) * samples,
                        samples * sizeof(std::uint16_t));
            png_write_row(png, reinterpret_cast<png_bytep>(rowbuf.data()));
        }
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// ------------------------------------------------------------ netpbm --

int pnm_token(std::FILE* f) {
    // Returns next integer token, skipping whitespace and '#' comments.
    int c = std::fgetc(f);
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = std::fgetc(f);
        } else if (std::isspace(c)) {
            c = std::fgetc(f);
        } else {
            break;
        }
    }
    if (c == EOF || !std::isdigit(c)) return -1;
    int value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        c = std::fgetc(f);
    }
    return value;
}

RasterImage read_pnm(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail("cannot open", path);

    char magic[2];
    if (std::fread(magic, 1, 2, fp.get()) != 2 || magic[0] != 'P')
        fail("not a pnm file", path);
    int channels;
    if (magic[1] == '5')
        channels = 1;
    else if (magic[1] == '6')
        channels = 3;
    else
        fail("unsupported pnm variant", path);

    const int w = pnm_token(fp.get());
    const int h = pnm_token(fp.get());
    const int maxval = pnm_token(fp.get());
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
        fail("bad pnm header", path);
    const int depth = maxval > 255 ? 16 : 8;

    RasterImage img(w, h, channels, depth);
    const std::size_t n = img.data.size();
    if (depth == 8) {
        std::vector<unsigned char> buf(n);
        if (std::fread(buf.data(), 1, n, fp.get()) != n) fail("truncated pnm", path);
        for (std::size_t i = 0; i < n; ++i) img.data[i] = buf[i];
    } else {
        std::vector<unsigned char> buf(n * 2);
        if (std::fread(buf.data(), 1, n * 2, fp.get()) != n * 2) fail("truncated pnm", path);
        for (std::size_t i = 0; i < n; ++i)
            img.data[i] = static_cast<std::uint16_t>((buf[2 * i] << 8) | buf[2 * i + 1]);
    }
    return img;
}

void write_pnm(const std::string& path, const RasterImage& img) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) fail("cannot open for write", path);

    const char* magic = img.channels == 1 ? "P5" : "P6";
    std::fprintf(fp.get(), "%s\n%d %d\n%d\n", magic, img.width, img.height,
                 static_cast<int>(img.max_value()));

    const std::size_t n = img.data.size();
    if (img.bit_depth == 8) {
        std::vector<unsigned char> buf(n);
        for (std::size_t i = 0; i < n; ++i) buf[i] = static_cast<unsigned char>(img.data[i]);
        if (std::fwrite(buf.data(), 1, n, fp.get()) != n) fail("short write", path);
    } else {
        std::vector<unsigned char> buf(n * 2);
        for (std::size_t i = 0; i < n; ++i) {
            buf[2 * i] = static_cast<unsigned char>(img.data[i] >> 8);
            buf[2 * i + 1] = static_cast<unsigned char>(img.data[i] & 0xff);
        }
        if (std::fwrite(buf.data(), 1, n * 2, fp.get()) != n * 2) fail("short write", path);
    }
}

} // namespace

RasterImage read_image(const std::string& path) {
    const std::string ext = lower_ext(path);
    RasterImage img;
    if (ext == "png")
        img = read_png(path);
    else if (ext == "pgm" || ext == "ppm")
        img = read_pnm(path);
    else
        fail("unsupported image extension", path);
    img.validate();
    return img;
}

void write_image(const std::string& path, const RasterImage& img) {
    img.validate();
    const std::string ext = lower_ext(path);
    if (ext == "png") {
        write_png(path, img);
    } else if (ext == "pgm") {
        if (img.channels != 1) fail("pgm requires a single channel", path);
        write_pnm(path, img);
    } else if (ext == "ppm") {
        if (img.channels != 3) fail("ppm requires three channels", path);
        write_pnm(path, img);
    } else {
        fail("unsupported image extension", path);
    }
}

} // namespace agetrace
