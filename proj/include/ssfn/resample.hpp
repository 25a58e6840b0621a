#pragma once

// Separable bicubic resampling, Catmull-Rom family kernel (a = -0.5).
// Downscaling with antialias widens the kernel support by the scale ratio.
// Borders use edge replication (clamped source indices); tap weights are
// renormalized to sum to 1 so constants are preserved exactly.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ssfn/cube.hpp"
#include "ssfn/tensor.hpp"

namespace ssfn {

inline double bicubic_kernel(double x, double a = -0.5) {
    x = std::abs(x);
    if (x < 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
    return 0.0;
}

namespace detail {

struct Contrib {
    int start = 0;
    std::vector<double> weights;
};

inline std::vector<Contrib> bicubic_contribs(int in_size, int out_size, bool antialias) {
    const double ratio = static_cast<double>(in_size) / out_size;
    const double kscale = (antialias && ratio > 1.0) ? ratio : 1.0;
    const double support = 2.0 * kscale;
    std::vector<Contrib> out(out_size);
    for (int i = 0; i < out_size; ++i) {
        const double center = (i + 0.5) * ratio - 0.5;
        int lo = static_cast<int>(std::ceil(center - support));
        int hi = static_cast<int>(std::floor(center + support));
        Contrib c;
        c.start = lo;
        double sum = 0.0;
        for (int j = lo; j <= hi; ++j) {
            const double w = bicubic_kernel((j - center) / kscale) / kscale;
            c.weights.push_back(w);
            sum += w;
        }
        if (sum != 0.0)
            for (double& w : c.weights) w /= sum;
        out[i] = std::move(c);
    }
    return out;
}

template <typename T>
void resize_plane(const T* src, int in_h, int in_w, T* dst, int out_h, int out_w,
                  const std::vector<Contrib>& cy, const std::vector<Contrib>& cx) {
    // horizontal pass, then vertical
    std::vector<double> tmp(static_cast<std::size_t>(in_h) * out_w);
    for (int y = 0; y < in_h; ++y) {
        const T* row = src + static_cast<std::size_t>(y) * in_w;
        for (int x = 0; x < out_w; ++x) {
            const Contrib& c = cx[x];
            double acc = 0.0;
            for (std::size_t t = 0; t < c.weights.size(); ++t) {
                int sx = c.start + static_cast<int>(t);
                sx = sx < 0 ? 0 : (sx >= in_w ? in_w - 1 : sx);
                acc += c.weights[t] * static_cast<double>(row[sx]);
            }
            tmp[static_cast<std::size_t>(y) * out_w + x] = acc;
        }
    }
    for (int x = 0; x < out_w; ++x) {
        for (int y = 0; y < out_h; ++y) {
            const Contrib& c = cy[y];
            double acc = 0.0;
            for (std::size_t t = 0; t < c.weights.size(); ++t) {
                int sy = c.start + static_cast<int>(t);
                sy = sy < 0 ? 0 : (sy >= in_h ? in_h - 1 : sy);
                acc += c.weights[t] * tmp[static_cast<std::size_t>(sy) * out_w + x];
            }
            dst[static_cast<std::size_t>(y) * out_w + x] = static_cast<T>(acc);
        }
    }
}

}  // namespace detail

/// Integer downscale factor, bicubic kernel a = -0.5, optional antialias.
struct DegradationSpec {
    int scale = 4;        // in {2,4,8} for model use; 1 allowed as identity
    bool antialias = true;
};

/// Band-wise bicubic resample of a cube; output clamped to [0,1].
inline HsiCube bicubic_resize(const HsiCube& cube, int out_h, int out_w,
                              bool antialias = true) {
    if (out_h < 1 || out_w < 1) throw std::invalid_argument("bicubic_resize: non-positive size");
    HsiCube out(cube.bands, out_h, out_w, cube.name);
    const auto cy = detail::bicubic_contribs(cube.height, out_h, antialias);
    const auto cx = detail::bicubic_contribs(cube.width, out_w, antialias);
    for (int l = 0; l < cube.bands; ++l)
        detail::resize_plane(cube.band(l), cube.height, cube.width, out.band(l), out_h, out_w, cy, cx);
    for (float& v : out.data) v = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
    return out;
}

inline HsiCube degrade(const HsiCube& hr, const DegradationSpec& spec) {
    if (spec.scale < 1) throw std::invalid_argument("degrade: scale must be >= 1");
    if (hr.height % spec.scale != 0 || hr.width % spec.scale != 0)
        throw std::invalid_argument("degrade: dimensions not divisible by scale");
    if (spec.scale == 1) return hr;
    return bicubic_resize(hr, hr.height / spec.scale, hr.width / spec.scale, spec.antialias);
}

/// Channel-wise bicubic upsample of an activation tensor (the f_UP path).
/// No antialias on upscale; output clamped to [0,1] like the cube variant.
template <typename T>
Tensor4<T> bicubic_upsample(const Tensor4<T>& x, int s) {
    if (s < 1) throw std::invalid_argument("bicubic_upsample: scale must be >= 1");
    if (s == 1) return x;
    Tensor4<T> y(x.n, x.c, x.h * s, x.w * s);
    const auto cy = detail::bicubic_contribs(x.h, y.h, false);
    const auto cx = detail::bicubic_contribs(x.w, y.w, false);
    for (int n = 0; n < x.n; ++n)
        for (int c = 0; c < x.c; ++c) {
            const T* src = x.data.data() + (static_cast<std::size_t>(n) * x.c + c) * x.h * x.w;
            T* dst = y.data.data() + (static_cast<std::size_t>(n) * y.c + c) * y.h * y.w;
            detail::resize_plane(src, x.h, x.w, dst, y.h, y.w, cy, cx);
        }
    for (T& v : y.data) v = v < T(0) ? T(0) : (v > T(1) ? T(1) : v);
    return y;
}

}  // namespace ssfn
