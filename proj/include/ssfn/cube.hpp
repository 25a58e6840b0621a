#pragma once

// Hyperspectral cube storage and file formats.
//
// Planar binary format: <path> holds the raw payload, band-sequential
// (band 0 row-major, then band 1, ...), 32-bit little-endian floats.
// <path>.hdr is a plain-text sidecar:
//     width <W>
//     height <H>
//     bands <L>
//     dtype f32le
//     byteorder little-endian
//
// Band-image directory format: one 8- or 16-bit grayscale image per band
// (.png or .pgm), bands ordered by lexicographic filename.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssfn/image_io.hpp"

namespace ssfn {

/// 3-D hyperspectral image (bands x rows x cols), reflectance in [0,1].
struct HsiCube {
    int bands = 0, height = 0, width = 0;
    std::vector<float> data;  // band-sequential, each band row-major
    std::string name;

    HsiCube() = default;
    HsiCube(int l, int h, int w, std::string nm = {})
        : bands(l), height(h), width(w),
          data(static_cast<std::size_t>(l) * h * w, 0.0f), name(std::move(nm)) {
        if (l < 1 || h < 1 || w < 1)
            throw std::invalid_argument("HsiCube: all dimensions must be >= 1");
    }

    std::size_t size() const { return data.size(); }

    float& at(int l, int y, int x) {
        return data[(static_cast<std::size_t>(l) * height + y) * width + x];
    }
    float at(int l, int y, int x) const {
        return data[(static_cast<std::size_t>(l) * height + y) * width + x];
    }

    float* band(int l) { return data.data() + static_cast<std::size_t>(l) * height * width; }
    const float* band(int l) const {
        return data.data() + static_cast<std::size_t>(l) * height * width;
    }
};

enum class CubeLayout { BandDir, Planar };

inline void save_cube(const HsiCube& cube, const std::string& path) {
    {
        std::ofstream hdr(path + ".hdr");
        if (!hdr) throw std::runtime_error("cannot write " + path + ".hdr");
        hdr << "width " << cube.width << "\n"
            << "height " << cube.height << "\n"
            << "bands " << cube.bands << "\n"
            << "dtype f32le\n"
            << "byteorder little-endian\n";
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    static_assert(sizeof(float) == 4);
    out.write(reinterpret_cast<const char*>(cube.data.data()),
              static_cast<std::streamsize>(cube.data.size() * 4));
    if (!out) throw std::runtime_error("I/O failure writing " + path);
}

inline HsiCube load_cube_planar(const std::string& path) {
    std::ifstream hdr(path + ".hdr");
    if (!hdr) throw std::runtime_error("missing header " + path + ".hdr");
    std::map<std::string, std::string> kv;
    std::string key, value;
    while (hdr >> key >> value) kv[key] = value;
    for (const char* req : {"width", "height", "bands", "dtype"})
        if (!kv.count(req)) throw std::runtime_error(path + ".hdr: missing key " + req);
    if (kv["dtype"] != "f32le") throw std::runtime_error(path + ": unsupported dtype " + kv["dtype"]);
    HsiCube cube(std::stoi(kv["bands"]), std::stoi(kv["height"]), std::stoi(kv["width"]),
                 std::filesystem::path(path).stem().string());
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    in.read(reinterpret_cast<char*>(cube.data.data()),
            static_cast<std::streamsize>(cube.data.size() * 4));
    if (static_cast<std::size_t>(in.gcount()) != cube.data.size() * 4)
        throw std::runtime_error(path + ": payload size mismatch");
    return cube;
}

inline HsiCube load_cube_banddir(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw std::runtime_error(dir + ": not a directory");
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const std::string ext = e.path().extension().string();
        if (ext == ".png" || ext == ".PNG" || ext == ".pgm" || ext == ".PGM")
            files.push_back(e.path().string());
    }
    if (files.empty()) throw std::runtime_error(dir + ": no bands found");
    std::sort(files.begin(), files.end());

    HsiCube cube;
    for (std::size_t l = 0; l < files.size(); ++l) {
        GrayImage img = read_gray_image(files[l]);
        if (l == 0) {
            cube = HsiCube(static_cast<int>(files.size()), img.height, img.width,
                           fs::path(dir).filename().string());
        } else if (img.width != cube.width || img.height != cube.height) {
            throw std::runtime_error(files[l] + ": inconsistent band dimensions");
        }
        // normalize by the dtype maximum so cubes from one camera share scale
        const float scale = 1.0f / static_cast<float>(img.max_value);
        float* dst = cube.band(static_cast<int>(l));
        for (std::size_t i = 0; i < img.pixels.size(); ++i)
            dst[i] = static_cast<float>(img.pixels[i]) * scale;
    }
    return cube;
}

inline HsiCube load_cube(const std::string& path, CubeLayout layout) {
    HsiCube cube = layout == CubeLayout::Planar ? load_cube_planar(path) : load_cube_banddir(path);
    for (float v : cube.data)
        if (!std::isfinite(v) || v < 0.0f || v > 1.0f)
            throw std::runtime_error(path + ": values outside [0,1]");
    return cube;
}

/// Guesses the layout from the filesystem: directories are band dirs.
inline CubeLayout detect_layout(const std::string& path) {
    return std::filesystem::is_directory(path) ? CubeLayout::BandDir : CubeLayout::Planar;
}

inline HsiCube crop_topleft(const HsiCube& cube, int side) {
    if (side < 1 || side > cube.height || side > cube.width)
        throw std::invalid_argument("crop_topleft: side exceeds dimensions");
    HsiCube out(cube.bands, side, side, cube.name);
    for (int l = 0; l < cube.bands; ++l)
        for (int y = 0; y < side; ++y)
            for (int x = 0; x < side; ++x)
                out.at(l, y, x) = cube.at(l, y, x);
    return out;
}

inline HsiCube crop(const HsiCube& cube, int y0, int x0, int h, int w) {
    if (y0 < 0 || x0 < 0 || y0 + h > cube.height || x0 + w > cube.width)
        throw std::invalid_argument("crop: window out of bounds");
    HsiCube out(cube.bands, h, w, cube.name);
    for (int l = 0; l < cube.bands; ++l)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                out.at(l, y, x) = cube.at(l, y0 + y, x0 + x);
    return out;
}

}  // namespace ssfn
