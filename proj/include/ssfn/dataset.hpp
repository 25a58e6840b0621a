#pragma once

// Dataset manifest, deterministic train/test split, and seeded LR/HR patch
// sampling. Manifest file: one "path role" pair per line, '#' comments.

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ssfn/cube.hpp"
#include "ssfn/resample.hpp"
#include "ssfn/rng.hpp"

namespace ssfn {

enum class Role { Train, Test };

struct ManifestEntry {
    std::string path;
    Role role = Role::Train;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    std::uint64_t split_seed = 0;
    double split_ratio = 0.8;

    std::vector<std::string> paths_with_role(Role r) const {
        std::vector<std::string> out;
        for (const auto& e : entries)
            if (e.role == r) out.push_back(e.path);
        return out;
    }
};

/// Shuffles entries by split_seed; the first ceil(ratio*N) become train.
inline DatasetManifest split_dataset(const DatasetManifest& manifest) {
    if (manifest.entries.size() < 2)
        throw std::invalid_argument("split_dataset: need at least 2 entries");
    if (!(manifest.split_ratio > 0.0 && manifest.split_ratio < 1.0))
        throw std::invalid_argument("split_dataset: ratio must be in (0,1)");
    DatasetManifest out = manifest;
    Rng rng(manifest.split_seed);
    shuffle_deterministic(out.entries, rng);
    const std::size_t n_train = static_cast<std::size_t>(
        std::ceil(manifest.split_ratio * static_cast<double>(out.entries.size())));
    for (std::size_t i = 0; i < out.entries.size(); ++i)
        out.entries[i].role = i < n_train ? Role::Train : Role::Test;
    return out;
}

inline void save_manifest(const DatasetManifest& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "# split_seed " << m.split_seed << "\n";
    out << "# split_ratio " << m.split_ratio << "\n";
    for (const auto& e : m.entries)
        out << e.path << " " << (e.role == Role::Train ? "train" : "test") << "\n";
}

inline DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    DatasetManifest m;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "#") {
            std::string key;
            if (ls >> key) {
                if (key == "split_seed") ls >> m.split_seed;
                else if (key == "split_ratio") ls >> m.split_ratio;
            }
            continue;
        }
        std::string role;
        if (!(ls >> role)) throw std::runtime_error(path + ": missing role on line: " + line);
        if (role != "train" && role != "test")
            throw std::runtime_error(path + ": unknown role '" + role + "'");
        m.entries.push_back({first, role == "train" ? Role::Train : Role::Test});
    }
    return m;
}

struct PatchPair {
    HsiCube lr;
    HsiCube hr;
    int y0 = 0, x0 = 0;  // HR crop origin, multiples of scale
};

/// Samples one HR crop of side lr_size*s aligned to the LR grid and pairs it
/// with its degraded LR patch.
inline PatchPair sample_patch_pair(const HsiCube& cube, int lr_size, const DegradationSpec& spec,
                                   Rng& rng) {
    const int s = spec.scale;
    const int hr_side = lr_size * s;
    if (cube.height < hr_side || cube.width < hr_side)
        throw std::invalid_argument("sample_patch_pair: cube too small for one patch");
    const int ymax = (cube.height - hr_side) / s;
    const int xmax = (cube.width - hr_side) / s;
    PatchPair p;
    p.y0 = s * static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(ymax) + 1));
    p.x0 = s * static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(xmax) + 1));
    p.hr = crop(cube, p.y0, p.x0, hr_side, hr_side);
    p.lr = degrade(p.hr, spec);
    return p;
}

inline std::vector<PatchPair> extract_patch_pairs(const HsiCube& cube, int lr_size,
                                                  const DegradationSpec& spec, int count,
                                                  std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    std::vector<PatchPair> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out.push_back(sample_patch_pair(cube, lr_size, spec, rng));
    return out;
}

/// Cube -> (1, L, H, W) tensor and back.
template <typename T = float>
Tensor4<T> cube_to_tensor(const HsiCube& cube) {
    Tensor4<T> t(1, cube.bands, cube.height, cube.width);
    for (std::size_t i = 0; i < cube.data.size(); ++i)
        t.data[i] = static_cast<T>(cube.data[i]);
    return t;
}

template <typename T>
HsiCube tensor_to_cube(const Tensor4<T>& t, std::string name = {}) {
    if (t.n != 1) throw std::invalid_argument("tensor_to_cube: batch must be 1");
    HsiCube cube(t.c, t.h, t.w, std::move(name));
    for (std::size_t i = 0; i < cube.data.size(); ++i)
        cube.data[i] = static_cast<float>(t.data[i]);
    return cube;
}

}  // namespace ssfn
