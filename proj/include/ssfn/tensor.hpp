#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ssfn {

/// Dense 4-D activation tensor, NCHW layout, row-major contiguous.
template <typename T>
struct Tensor4 {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<T> data;

    Tensor4() = default;
    Tensor4(int n_, int c_, int h_, int w_)
        : n(n_), c(c_), h(h_), w(w_),
          data(static_cast<std::size_t>(n_) * c_ * h_ * w_, T(0)) {
        if (n_ < 1 || c_ < 1 || h_ < 1 || w_ < 1)
            throw std::invalid_argument("Tensor4: all dimensions must be >= 1");
    }

    std::size_t size() const { return data.size(); }

    T& at(int in, int ic, int iy, int ix) {
        return data[((static_cast<std::size_t>(in) * c + ic) * h + iy) * w + ix];
    }
    T at(int in, int ic, int iy, int ix) const {
        return data[((static_cast<std::size_t>(in) * c + ic) * h + iy) * w + ix];
    }

    bool same_shape(const Tensor4& o) const {
        return n == o.n && c == o.c && h == o.h && w == o.w;
    }

    void fill(T v) { std::fill(data.begin(), data.end(), v); }

    bool all_finite() const {
        for (T v : data)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }

    template <typename U>
    Tensor4<U> cast() const {
        Tensor4<U> out(n, c, h, w);
        for (std::size_t i = 0; i < data.size(); ++i)
            out.data[i] = static_cast<U>(data[i]);
        return out;
    }
};

template <typename T>
void check_same_shape(const Tensor4<T>& a, const Tensor4<T>& b, const char* what) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

/// Flat learnable parameter with its gradient accumulator.
template <typename T>
struct Param {
    std::vector<T> v;           // values
    std::vector<T> g;           // gradient, same length
    std::vector<int> shape;     // logical shape, outermost first

    Param() = default;
    explicit Param(std::vector<int> shp) : shape(std::move(shp)) {
        std::size_t total = 1;
        for (int d : shape) total *= static_cast<std::size_t>(d);
        v.assign(total, T(0));
        g.assign(total, T(0));
    }

    std::size_t size() const { return v.size(); }
    void zero_grad() { std::fill(g.begin(), g.end(), T(0)); }
};

}  // namespace ssfn
