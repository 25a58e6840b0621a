#pragma once

// Differentiable tensor ops: conv2d (same padding), 2x2/stride-2 transposed
// conv, 2x2 average pooling, pixel shuffle, ReLU, L1 loss. Forward passes
// fill a context object with whatever the matching backward needs; backward
// passes accumulate into Param::g and return the input gradient.

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <stdexcept>

#include "ssfn/tensor.hpp"

namespace ssfn {

template <typename T>
using MatX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using MatXR = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// ---------------------------------------------------------------------------
// conv2d, kernel k in {1,3}, zero padding k/2, spatial size preserved
// ---------------------------------------------------------------------------

template <typename T>
struct Conv2d {
    int cin = 0, cout = 0, k = 1, pad = 0;
    Param<T> w;  // {cout, cin, k, k}
    Param<T> b;  // {cout}

    Conv2d() = default;
    Conv2d(int cin_, int cout_, int k_)
        : cin(cin_), cout(cout_), k(k_), pad(k_ / 2),
          w({cout_, cin_, k_, k_}), b({cout_}) {
        if (k_ != 1 && k_ != 3) throw std::invalid_argument("conv2d: kernel must be 1 or 3");
    }
};

template <typename T>
struct ConvCtx {
    Tensor4<T> x;  // cached input
};

namespace detail {

// Row-major patch matrices: row (ci,ky,kx) holds the shifted image plane, so
// each image row is one contiguous copy and the GEMM reads cache-friendly.

template <typename T>
void im2col(const Tensor4<T>& x, int n, int k, int pad, MatXR<T>& m) {
    const int C = x.c, H = x.h, W = x.w;
    m.resize(C * k * k, H * W);
    const T* base = x.data.data() + static_cast<std::size_t>(n) * C * H * W;
    for (int ci = 0; ci < C; ++ci) {
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                const int row = (ci * k + ky) * k + kx;
                T* out = m.data() + static_cast<std::size_t>(row) * H * W;
                // valid output columns for this shift: sx = xo + kx - pad in [0, W)
                const int x0 = std::max(0, pad - kx);
                const int x1 = std::min(W, W + pad - kx);
                for (int y = 0; y < H; ++y, out += W) {
                    const int sy = y + ky - pad;
                    if (sy < 0 || sy >= H) {
                        std::fill(out, out + W, T(0));
                        continue;
                    }
                    const T* src = base + (static_cast<std::size_t>(ci) * H + sy) * W + kx - pad;
                    std::fill(out, out + x0, T(0));
                    std::copy(src + x0, src + x1, out + x0);
                    std::fill(out + x1, out + W, T(0));
                }
            }
        }
    }
}

template <typename T>
void col2im_add(const MatXR<T>& m, int n, int k, int pad, Tensor4<T>& x) {
    const int C = x.c, H = x.h, W = x.w;
    T* base = x.data.data() + static_cast<std::size_t>(n) * C * H * W;
    for (int ci = 0; ci < C; ++ci) {
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                const int row = (ci * k + ky) * k + kx;
                const T* in = m.data() + static_cast<std::size_t>(row) * H * W;
                const int x0 = std::max(0, pad - kx);
                const int x1 = std::min(W, W + pad - kx);
                for (int y = 0; y < H; ++y, in += W) {
                    const int sy = y + ky - pad;
                    if (sy < 0 || sy >= H) continue;
                    T* dst = base + (static_cast<std::size_t>(ci) * H + sy) * W + kx - pad;
                    for (int xo = x0; xo < x1; ++xo) dst[xo] += in[xo];
                }
            }
        }
    }
}

}  // namespace detail

template <typename T>
Tensor4<T> conv2d_forward(const Conv2d<T>& conv, const Tensor4<T>& x, ConvCtx<T>* ctx = nullptr) {
    if (x.c != conv.cin) throw std::invalid_argument("conv2d: channel mismatch");
    Tensor4<T> y(x.n, conv.cout, x.h, x.w);
    const int hw = x.h * x.w;
    Eigen::Map<const MatXR<T>> wmap(conv.w.v.data(), conv.cout, conv.cin * conv.k * conv.k);
    MatXR<T> cols;
    for (int n = 0; n < x.n; ++n) {
        detail::im2col(x, n, conv.k, conv.pad, cols);
        Eigen::Map<MatXR<T>> ymap(y.data.data() + static_cast<std::size_t>(n) * conv.cout * hw,
                                  conv.cout, hw);
        ymap.noalias() = wmap * cols;
        for (int co = 0; co < conv.cout; ++co) ymap.row(co).array() += conv.b.v[co];
    }
    if (ctx) ctx->x = x;
    return y;
}

template <typename T>
Tensor4<T> conv2d_backward(Conv2d<T>& conv, const ConvCtx<T>& ctx, const Tensor4<T>& dy) {
    const Tensor4<T>& x = ctx.x;
    Tensor4<T> dx(x.n, x.c, x.h, x.w);
    const int hw = x.h * x.w;
    Eigen::Map<const MatXR<T>> wmap(conv.w.v.data(), conv.cout, conv.cin * conv.k * conv.k);
    Eigen::Map<MatXR<T>> dwmap(conv.w.g.data(), conv.cout, conv.cin * conv.k * conv.k);
    MatXR<T> cols, dcols;
    for (int n = 0; n < x.n; ++n) {
        detail::im2col(x, n, conv.k, conv.pad, cols);
        Eigen::Map<const MatXR<T>> dymap(dy.data.data() + static_cast<std::size_t>(n) * conv.cout * hw,
                                         conv.cout, hw);
        dwmap.noalias() += dymap * cols.transpose();
        for (int co = 0; co < conv.cout; ++co) conv.b.g[co] += dymap.row(co).sum();
        dcols.noalias() = wmap.transpose() * dymap;
        detail::col2im_add(dcols, n, conv.k, conv.pad, dx);
    }
    return dx;
}

// ---------------------------------------------------------------------------
// transposed conv, kernel 2, stride 2: (N,C,H,W) -> (N,C',2H,2W), no overlap
// ---------------------------------------------------------------------------

template <typename T>
struct Deconv2x2 {
    int cin = 0, cout = 0;
    Param<T> w;  // {cin, cout, 2, 2}
    Param<T> b;  // {cout}

    Deconv2x2() = default;
    Deconv2x2(int cin_, int cout_)
        : cin(cin_), cout(cout_), w({cin_, cout_, 2, 2}), b({cout_}) {}
};

template <typename T>
Tensor4<T> deconv2x2_forward(const Deconv2x2<T>& dc, const Tensor4<T>& x, ConvCtx<T>* ctx = nullptr) {
    if (x.c != dc.cin) throw std::invalid_argument("deconv2x2: channel mismatch");
    Tensor4<T> y(x.n, dc.cout, 2 * x.h, 2 * x.w);
    const int hw = x.h * x.w;
    // w viewed as (cin) x (cout*4), row-major
    Eigen::Map<const MatXR<T>> wmap(dc.w.v.data(), dc.cin, dc.cout * 4);
    MatX<T> ymat;
    for (int n = 0; n < x.n; ++n) {
        Eigen::Map<const MatXR<T>> xmat(x.data.data() + static_cast<std::size_t>(n) * dc.cin * hw,
                                        dc.cin, hw);
        ymat.noalias() = wmap.transpose() * xmat;  // (cout*4) x hw
        for (int co = 0; co < dc.cout; ++co) {
            for (int a = 0; a < 2; ++a) {
                for (int bq = 0; bq < 2; ++bq) {
                    const int row = (co * 2 + a) * 2 + bq;
                    for (int i = 0; i < x.h; ++i)
                        for (int j = 0; j < x.w; ++j)
                            y.at(n, co, 2 * i + a, 2 * j + bq) = ymat(row, i * x.w + j) + dc.b.v[co];
                }
            }
        }
    }
    if (ctx) ctx->x = x;
    return y;
}

template <typename T>
Tensor4<T> deconv2x2_backward(Deconv2x2<T>& dc, const ConvCtx<T>& ctx, const Tensor4<T>& dy) {
    const Tensor4<T>& x = ctx.x;
    Tensor4<T> dx(x.n, x.c, x.h, x.w);
    const int hw = x.h * x.w;
    Eigen::Map<const MatXR<T>> wmap(dc.w.v.data(), dc.cin, dc.cout * 4);
    Eigen::Map<MatXR<T>> dwmap(dc.w.g.data(), dc.cin, dc.cout * 4);
    MatX<T> dymat(dc.cout * 4, hw);
    for (int n = 0; n < x.n; ++n) {
        for (int co = 0; co < dc.cout; ++co) {
            T bsum = T(0);
            for (int a = 0; a < 2; ++a) {
                for (int bq = 0; bq < 2; ++bq) {
                    const int row = (co * 2 + a) * 2 + bq;
                    for (int i = 0; i < x.h; ++i)
                        for (int j = 0; j < x.w; ++j) {
                            const T v = dy.at(n, co, 2 * i + a, 2 * j + bq);
                            dymat(row, i * x.w + j) = v;
                            bsum += v;
                        }
                }
            }
            dc.b.g[co] += bsum;
        }
        Eigen::Map<const MatXR<T>> xmat(x.data.data() + static_cast<std::size_t>(n) * dc.cin * hw,
                                        dc.cin, hw);
        dwmap.noalias() += xmat * dymat.transpose();
        Eigen::Map<MatXR<T>> dxmat(dx.data.data() + static_cast<std::size_t>(n) * dc.cin * hw,
                                   dc.cin, hw);
        dxmat.noalias() = wmap * dymat;
    }
    return dx;
}

// ---------------------------------------------------------------------------
// 2x2 / stride-2 average pooling
// ---------------------------------------------------------------------------

template <typename T>
Tensor4<T> avg_pool_k2s2(const Tensor4<T>& x) {
    if (x.h % 2 != 0 || x.w % 2 != 0)
        throw std::invalid_argument("avg_pool_k2s2: odd spatial dimension");
    Tensor4<T> y(x.n, x.c, x.h / 2, x.w / 2);
    for (int n = 0; n < x.n; ++n)
        for (int c = 0; c < x.c; ++c)
            for (int i = 0; i < y.h; ++i)
                for (int j = 0; j < y.w; ++j)
                    y.at(n, c, i, j) = (x.at(n, c, 2 * i, 2 * j) + x.at(n, c, 2 * i, 2 * j + 1) +
                                        x.at(n, c, 2 * i + 1, 2 * j) + x.at(n, c, 2 * i + 1, 2 * j + 1)) /
                                       T(4);
    return y;
}

template <typename T>
Tensor4<T> avg_pool_k2s2_backward(const Tensor4<T>& dy, int in_h, int in_w) {
    Tensor4<T> dx(dy.n, dy.c, in_h, in_w);
    for (int n = 0; n < dy.n; ++n)
        for (int c = 0; c < dy.c; ++c)
            for (int i = 0; i < dy.h; ++i)
                for (int j = 0; j < dy.w; ++j) {
                    const T v = dy.at(n, c, i, j) / T(4);
                    dx.at(n, c, 2 * i, 2 * j) = v;
                    dx.at(n, c, 2 * i, 2 * j + 1) = v;
                    dx.at(n, c, 2 * i + 1, 2 * j) = v;
                    dx.at(n, c, 2 * i + 1, 2 * j + 1) = v;
                }
    return dx;
}

// ---------------------------------------------------------------------------
// pixel shuffle: (N, C, H, W) -> (N, C/r^2, rH, rW)
// out[n, c, r*i+a, r*j+b] = in[n, c*r^2 + a*r + b, i, j]
// ---------------------------------------------------------------------------

template <typename T>
Tensor4<T> pixel_shuffle(const Tensor4<T>& x, int r) {
    if (r < 1 || x.c % (r * r) != 0)
        throw std::invalid_argument("pixel_shuffle: C not divisible by r^2");
    if (r == 1) return x;
    Tensor4<T> y(x.n, x.c / (r * r), r * x.h, r * x.w);
    for (int n = 0; n < x.n; ++n)
        for (int c = 0; c < y.c; ++c)
            for (int a = 0; a < r; ++a)
                for (int b = 0; b < r; ++b)
                    for (int i = 0; i < x.h; ++i)
                        for (int j = 0; j < x.w; ++j)
                            y.at(n, c, r * i + a, r * j + b) = x.at(n, c * r * r + a * r + b, i, j);
    return y;
}

/// Inverse permutation of pixel_shuffle; also its gradient.
template <typename T>
Tensor4<T> pixel_unshuffle(const Tensor4<T>& y, int r) {
    if (r < 1 || y.h % r != 0 || y.w % r != 0)
        throw std::invalid_argument("pixel_unshuffle: spatial size not divisible by r");
    if (r == 1) return y;
    Tensor4<T> x(y.n, y.c * r * r, y.h / r, y.w / r);
    for (int n = 0; n < y.n; ++n)
        for (int c = 0; c < y.c; ++c)
            for (int a = 0; a < r; ++a)
                for (int b = 0; b < r; ++b)
                    for (int i = 0; i < x.h; ++i)
                        for (int j = 0; j < x.w; ++j)
                            x.at(n, c * r * r + a * r + b, i, j) = y.at(n, c, r * i + a, r * j + b);
    return x;
}

// ---------------------------------------------------------------------------
// ReLU
// ---------------------------------------------------------------------------

template <typename T>
struct ReluCtx {
    std::vector<std::uint8_t> mask;
};

template <typename T>
Tensor4<T> relu(const Tensor4<T>& x, ReluCtx<T>* ctx = nullptr) {
    Tensor4<T> y = x;
    if (ctx) ctx->mask.resize(x.size());
    for (std::size_t i = 0; i < y.data.size(); ++i) {
        const bool pos = y.data[i] > T(0);
        if (!pos) y.data[i] = T(0);
        if (ctx) ctx->mask[i] = pos ? 1 : 0;
    }
    return y;
}

template <typename T>
Tensor4<T> relu_backward(const ReluCtx<T>& ctx, const Tensor4<T>& dy) {
    Tensor4<T> dx = dy;
    for (std::size_t i = 0; i < dx.data.size(); ++i)
        if (!ctx.mask[i]) dx.data[i] = T(0);
    return dx;
}

// ---------------------------------------------------------------------------
// L1 loss (mean absolute difference); subgradient at 0 is 0
// ---------------------------------------------------------------------------

template <typename T>
T l1_loss(const Tensor4<T>& pred, const Tensor4<T>& target) {
    check_same_shape(pred, target, "l1_loss");
    T acc = T(0);
    for (std::size_t i = 0; i < pred.data.size(); ++i)
        acc += std::abs(pred.data[i] - target.data[i]);
    return acc / static_cast<T>(pred.size());
}

/// d(l1_loss)/d(pred)
template <typename T>
Tensor4<T> l1_loss_backward(const Tensor4<T>& pred, const Tensor4<T>& target, T upstream = T(1)) {
    check_same_shape(pred, target, "l1_loss");
    Tensor4<T> g(pred.n, pred.c, pred.h, pred.w);
    const T scale = upstream / static_cast<T>(pred.size());
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const T d = pred.data[i] - target.data[i];
        g.data[i] = d > T(0) ? scale : (d < T(0) ? -scale : T(0));
    }
    return g;
}

}  // namespace ssfn
