#pragma once

// Grayscale image reading (PGM P2/P5 and PNG, 8 or 16 bit) and 8-bit PNG/PGM
// writing. Band images are stored one file per band.

#include <png.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssfn {

struct GrayImage {
    int width = 0;
    int height = 0;
    int max_value = 0;  // 255 or 65535
    std::vector<std::uint16_t> pixels;  // row-major
};

namespace detail {

inline int pgm_next_token(std::istream& in) {
    // skips whitespace and '#' comments
    int ch = in.get();
    while (ch != EOF) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n') ch = in.get();
        } else if (!std::isspace(ch)) {
            in.unget();
            int v = -1;
            in >> v;
            return v;
        }
        ch = in.get();
    }
    return -1;
}

}  // namespace detail

inline GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char p = 0, t = 0;
    in >> p >> t;
    if (p != 'P' || (t != '2' && t != '5'))
        throw std::runtime_error(path + ": not a PGM file");
    GrayImage img;
    img.width = detail::pgm_next_token(in);
    img.height = detail::pgm_next_token(in);
    img.max_value = detail::pgm_next_token(in);
    if (img.width < 1 || img.height < 1 || (img.max_value != 255 && img.max_value != 65535))
        throw std::runtime_error(path + ": unsupported PGM header");
    const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
    img.pixels.resize(count);
    if (t == '2') {
        for (std::size_t i = 0; i < count; ++i) {
            int v = detail::pgm_next_token(in);
            if (v < 0) throw std::runtime_error(path + ": truncated PGM");
            img.pixels[i] = static_cast<std::uint16_t>(v);
        }
    } else {
        in.get();  // single whitespace after maxval
        if (img.max_value == 255) {
            std::vector<std::uint8_t> raw(count);
            in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count));
            if (!in) throw std::runtime_error(path + ": truncated PGM");
            for (std::size_t i = 0; i < count; ++i) img.pixels[i] = raw[i];
        } else {
            std::vector<std::uint8_t> raw(count * 2);
            in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count * 2));
            if (!in) throw std::runtime_error(path + ": truncated PGM");
            for (std::size_t i = 0; i < count; ++i)
                img.pixels[i] = static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
        }
    }
    return img;
}

inline void write_pgm8(const std::string& path, int width, int height,
                       const std::vector<std::uint8_t>& pixels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
}

inline GrayImage read_png_gray(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw std::runtime_error("cannot open " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw std::runtime_error("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw std::runtime_error(path + ": PNG read error");
    }
    png_init_io(png, fp);
    png_read_info(png, info);
    const int color = png_get_color_type(png, info);
    int depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_strip_alpha(png);
    else if (color != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw std::runtime_error(path + ": not a grayscale PNG");
    }
    if (depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
        depth = 8;
    }
    if (depth == 16) png_set_swap(png);  // PNG is big-endian on disk
    png_read_update_info(png, info);

    GrayImage img;
    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    img.max_value = depth == 16 ? 65535 : 255;
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
    std::vector<std::uint8_t> row(png_get_rowbytes(png, info));
    for (int y = 0; y < img.height; ++y) {
        png_read_row(png, row.data(), nullptr);
        if (depth == 16) {
            const auto* src = reinterpret_cast<const std::uint16_t*>(row.data());
            for (int x = 0; x < img.width; ++x)
                img.pixels[static_cast<std::size_t>(y) * img.width + x] = src[x];
        } else {
            for (int x = 0; x < img.width; ++x)
                img.pixels[static_cast<std::size_t>(y) * img.width + x] = row[x];
        }
    }
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    return img;
}

inline void write_png_gray8(const std::string& path, int width, int height,
                            const std::vector<std::uint8_t>& pixels) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw std::runtime_error("cannot write " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw std::runtime_error("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw std::runtime_error(path + ": PNG write error");
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < height; ++y)
        png_write_row(png, const_cast<png_bytep>(pixels.data() + static_cast<std::size_t>(y) * width));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

/// Dispatch on extension. Supported: .pgm, .png
inline GrayImage read_gray_image(const std::string& path) {
    const std::string ext = std::filesystem::path(path).extension().string();
    if (ext == ".pgm" || ext == ".PGM") return read_pgm(path);
    if (ext == ".png" || ext == ".PNG") return read_png_gray(path);
    throw std::runtime_error(path + ": unsupported image extension");
}

}  // namespace ssfn
