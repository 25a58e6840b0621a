#pragma once

// The feedback super-resolution network: per-group embedding convs, a
// feedback block unrolled over T iterations with one shared weight set, and a
// pixel-shuffle reconstruction head. Every iteration predicts a residual on
// top of the bicubic upsample of the input; the final output averages them.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ssfn/nn.hpp"
#include "ssfn/resample.hpp"
#include "ssfn/rng.hpp"
#include "ssfn/tensor.hpp"

namespace ssfn {

enum class LossMode { AveragedOutput, PerIteration };

struct ModelConfig {
    int band_count = 31;    // L
    int groups = 8;         // G
    int iterations = 6;     // T
    int scale = 4;          // s in {2,4,8}
    int base_filters = 256; // C
    LossMode loss_mode = LossMode::AveragedOutput;

    int group_filters() const { return base_filters / groups; }
    // the feedback block already upsamples 2x, the shuffle covers the rest
    int shuffle_factor() const { return scale / 2 >= 1 ? scale / 2 : 1; }

    void validate() const {
        if (band_count < 1) throw std::invalid_argument("config: band_count must be >= 1");
        if (groups < 1 || groups > band_count)
            throw std::invalid_argument("config: groups must satisfy 1 <= G <= L");
        if (iterations < 1) throw std::invalid_argument("config: iterations must be >= 1");
        if (scale != 2 && scale != 4 && scale != 8)
            throw std::invalid_argument("config: scale must be 2, 4 or 8");
        if (base_filters % groups != 0)
            throw std::invalid_argument("config: base_filters must be divisible by groups");
        const int r = shuffle_factor();
        if (base_filters % (r * r) != 0)
            throw std::invalid_argument("config: base_filters must be divisible by (s/2)^2");
    }

    bool same_architecture(const ModelConfig& o) const {
        return band_count == o.band_count && groups == o.groups && iterations == o.iterations &&
               scale == o.scale && base_filters == o.base_filters;
    }
};

/// Contiguous band ranges (start, count) covering [0, L) exactly once.
/// The first L % G groups get one extra band.
inline std::vector<std::pair<int, int>> group_bands(int band_count, int groups) {
    if (groups < 1 || groups > band_count)
        throw std::invalid_argument("group_bands: need 1 <= G <= L");
    const int base = band_count / groups;
    const int rem = band_count - groups * base;
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<std::size_t>(groups));
    int start = 0;
    for (int g = 0; g < groups; ++g) {
        const int len = base + (g < rem ? 1 : 0);
        out.emplace_back(start, len);
        start += len;
    }
    return out;
}

template <typename T>
struct ResBlock {
    Conv2d<T> c1, c2;
    ResBlock() = default;
    explicit ResBlock(int width) : c1(width, width, 3), c2(width, width, 3) {}
};

template <typename T>
struct ResCtx {
    ConvCtx<T> c1;
    ReluCtx<T> act;
    ConvCtx<T> c2;
};

template <typename T>
Tensor4<T> res_forward(const ResBlock<T>& rb, const Tensor4<T>& x, ResCtx<T>* ctx = nullptr) {
    Tensor4<T> h = conv2d_forward(rb.c1, x, ctx ? &ctx->c1 : nullptr);
    h = relu(h, ctx ? &ctx->act : nullptr);
    Tensor4<T> y = conv2d_forward(rb.c2, h, ctx ? &ctx->c2 : nullptr);
    for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += x.data[i];
    return y;
}

template <typename T>
Tensor4<T> res_backward(ResBlock<T>& rb, const ResCtx<T>& ctx, const Tensor4<T>& dy) {
    Tensor4<T> dh = conv2d_backward(rb.c2, ctx.c2, dy);
    dh = relu_backward(ctx.act, dh);
    Tensor4<T> dx = conv2d_backward(rb.c1, ctx.c1, dh);
    for (std::size_t i = 0; i < dx.data.size(); ++i) dx.data[i] += dy.data[i];
    return dx;
}

/// One shared weight set, reused at every iteration.
template <typename T>
struct ModelParams {
    ModelConfig cfg;
    std::vector<std::pair<int, int>> grouping;
    std::vector<Conv2d<T>> eb;        // per group: |g| -> C_g, 3x3
    std::vector<Conv2d<T>> compress;  // per group: C + C_g -> C_g, 1x1
    std::vector<std::array<ResBlock<T>, 2>> local;  // per group, width C_g
    Deconv2x2<T> global_up;           // C -> C
    std::array<ResBlock<T>, 2> global_rb;           // width C
    Conv2d<T> rb_pre;                 // C -> C, 3x3
    Conv2d<T> rb_post;                // C/r^2 -> L, 3x3

    ModelParams() = default;
    explicit ModelParams(const ModelConfig& c) : cfg(c) {
        cfg.validate();
        grouping = group_bands(cfg.band_count, cfg.groups);
        const int cg = cfg.group_filters();
        const int cc = cfg.base_filters;
        for (const auto& [start, len] : grouping) {
            (void)start;
            eb.emplace_back(len, cg, 3);
            compress.emplace_back(cc + cg, cg, 1);
            local.push_back({ResBlock<T>(cg), ResBlock<T>(cg)});
        }
        global_up = Deconv2x2<T>(cc, cc);
        global_rb = {ResBlock<T>(cc), ResBlock<T>(cc)};
        const int r = cfg.shuffle_factor();
        rb_pre = Conv2d<T>(cc, cc, 3);
        rb_post = Conv2d<T>(cc / (r * r), cfg.band_count, 3);
    }

    /// Named parameter tensors in a fixed, checkpoint-stable order.
    std::vector<std::pair<std::string, Param<T>*>> named_params() {
        std::vector<std::pair<std::string, Param<T>*>> out;
        auto add_conv = [&out](const std::string& name, Conv2d<T>& c) {
            out.emplace_back(name + ".w", &c.w);
            out.emplace_back(name + ".b", &c.b);
        };
        auto add_res = [&](const std::string& name, ResBlock<T>& rb) {
            add_conv(name + ".c1", rb.c1);
            add_conv(name + ".c2", rb.c2);
        };
        for (std::size_t g = 0; g < eb.size(); ++g) {
            const std::string gs = std::to_string(g);
            add_conv("eb." + gs, eb[g]);
            add_conv("compress." + gs, compress[g]);
            add_res("local." + gs + ".0", local[g][0]);
            add_res("local." + gs + ".1", local[g][1]);
        }
        out.emplace_back("global_up.w", &global_up.w);
        out.emplace_back("global_up.b", &global_up.b);
        add_res("global_rb.0", global_rb[0]);
        add_res("global_rb.1", global_rb[1]);
        add_conv("rb_pre", rb_pre);
        add_conv("rb_post", rb_post);
        return out;
    }

    std::vector<Param<T>*> param_list() {
        std::vector<Param<T>*> out;
        for (auto& [name, p] : named_params()) {
            (void)name;
            out.push_back(p);
        }
        return out;
    }

    void zero_grad() {
        for (Param<T>* p : param_list()) p->zero_grad();
    }

    /// Kaiming fan-in normal for conv kernels, zero biases. The output head
    /// is scaled down so the initial residual is near zero and training
    /// starts from the bicubic baseline rather than a large random offset.
    void init_weights(Rng& rng) {
        for (auto& [name, p] : named_params()) {
            if (p->shape.size() < 2) {  // bias
                std::fill(p->v.begin(), p->v.end(), T(0));
                continue;
            }
            // conv: {cout,cin,k,k}; deconv: {cin,cout,2,2} with fan-in = cin*k*k
            std::size_t fan_in = 1;
            if (name.rfind("global_up", 0) == 0)
                fan_in = static_cast<std::size_t>(p->shape[0]) * p->shape[2] * p->shape[3];
            else
                for (std::size_t d = 1; d < p->shape.size(); ++d)
                    fan_in *= static_cast<std::size_t>(p->shape[d]);
            double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
            if (name.rfind("rb_post", 0) == 0) stddev *= 0.01;
            for (T& v : p->v) v = static_cast<T>(stddev * rand_normal(rng));
        }
    }
};

/// Total learnable scalar count; independent of T by weight sharing.
inline long long param_count(const ModelConfig& cfg) {
    ModelParams<float> p(cfg);
    long long total = 0;
    for (const Param<float>* q : p.param_list()) total += static_cast<long long>(q->size());
    return total;
}

// ---------------------------------------------------------------------------
// channel slicing / concatenation
// ---------------------------------------------------------------------------

template <typename T>
Tensor4<T> slice_channels(const Tensor4<T>& x, int c0, int len) {
    Tensor4<T> y(x.n, len, x.h, x.w);
    const std::size_t plane = static_cast<std::size_t>(x.h) * x.w;
    for (int n = 0; n < x.n; ++n)
        for (int c = 0; c < len; ++c)
            std::copy_n(x.data.data() + ((static_cast<std::size_t>(n) * x.c + c0 + c) * plane),
                        plane,
                        y.data.data() + ((static_cast<std::size_t>(n) * len + c) * plane));
    return y;
}

template <typename T>
Tensor4<T> concat_channels(const std::vector<const Tensor4<T>*>& parts) {
    int ctot = 0;
    for (const Tensor4<T>* p : parts) ctot += p->c;
    Tensor4<T> y(parts[0]->n, ctot, parts[0]->h, parts[0]->w);
    const std::size_t plane = static_cast<std::size_t>(y.h) * y.w;
    for (int n = 0; n < y.n; ++n) {
        int c0 = 0;
        for (const Tensor4<T>* p : parts) {
            for (int c = 0; c < p->c; ++c)
                std::copy_n(p->data.data() + ((static_cast<std::size_t>(n) * p->c + c) * plane),
                            plane,
                            y.data.data() + ((static_cast<std::size_t>(n) * ctot + c0 + c) * plane));
            c0 += p->c;
        }
    }
    return y;
}

// ---------------------------------------------------------------------------
// forward pass with optional backprop caches
// ---------------------------------------------------------------------------

template <typename T>
struct EmbedCtx {
    std::vector<ConvCtx<T>> conv;
    std::vector<ReluCtx<T>> act;
};

template <typename T>
struct SsfbCtx {
    int in_h = 0, in_w = 0;                 // spatial size of the pooled feedback
    std::vector<ConvCtx<T>> compress;
    std::vector<std::array<ResCtx<T>, 2>> local;
    ConvCtx<T> up;
    std::array<ResCtx<T>, 2> global_rb;
};

template <typename T>
struct ReconstructCtx {
    ConvCtx<T> pre;
    ConvCtx<T> post;
};

/// Per-group shallow features from the band groups of the LR input.
template <typename T>
std::vector<Tensor4<T>> embed(const Tensor4<T>& lr, ModelParams<T>& params,
                              EmbedCtx<T>* ctx = nullptr) {
    if (lr.c != params.cfg.band_count) throw std::invalid_argument("embed: band count mismatch");
    std::vector<Tensor4<T>> feb;
    if (ctx) {
        ctx->conv.resize(params.grouping.size());
        ctx->act.resize(params.grouping.size());
    }
    for (std::size_t g = 0; g < params.grouping.size(); ++g) {
        const auto [start, len] = params.grouping[g];
        Tensor4<T> part = slice_channels(lr, start, len);
        Tensor4<T> f = conv2d_forward(params.eb[g], part, ctx ? &ctx->conv[g] : nullptr);
        feb.push_back(relu(f, ctx ? &ctx->act[g] : nullptr));
    }
    return feb;
}

/// Zero feedback for the first iteration: (N, C, 2h, 2w).
template <typename T>
Tensor4<T> init_hidden(int batch, const ModelConfig& cfg, int lr_h, int lr_w) {
    return Tensor4<T>(batch, cfg.base_filters, 2 * lr_h, 2 * lr_w);
}

/// One feedback-block application: pool the previous hidden state, refine
/// each band group, then fuse and upsample 2x through the global layer.
template <typename T>
Tensor4<T> ssfb_step(const std::vector<Tensor4<T>>& feb, const Tensor4<T>& hidden_prev,
                     ModelParams<T>& params, SsfbCtx<T>* ctx = nullptr) {
    const std::size_t ngroups = params.grouping.size();
    Tensor4<T> pooled = avg_pool_k2s2(hidden_prev);
    if (ctx) {
        ctx->in_h = pooled.h;
        ctx->in_w = pooled.w;
        ctx->compress.resize(ngroups);
        ctx->local.resize(ngroups);
    }
    std::vector<Tensor4<T>> locals;
    locals.reserve(ngroups);
    for (std::size_t g = 0; g < ngroups; ++g) {
        Tensor4<T> cat = concat_channels<T>({&pooled, &feb[g]});
        Tensor4<T> f = conv2d_forward(params.compress[g], cat, ctx ? &ctx->compress[g] : nullptr);
        f = res_forward(params.local[g][0], f, ctx ? &ctx->local[g][0] : nullptr);
        f = res_forward(params.local[g][1], f, ctx ? &ctx->local[g][1] : nullptr);
        locals.push_back(std::move(f));
    }
    std::vector<const Tensor4<T>*> parts;
    for (const Tensor4<T>& l : locals) parts.push_back(&l);
    Tensor4<T> fused = concat_channels(parts);
    Tensor4<T> up = deconv2x2_forward(params.global_up, fused, ctx ? &ctx->up : nullptr);
    up = res_forward(params.global_rb[0], up, ctx ? &ctx->global_rb[0] : nullptr);
    up = res_forward(params.global_rb[1], up, ctx ? &ctx->global_rb[1] : nullptr);
    return up;
}

/// Residual image from the hidden state: conv, pixel shuffle, conv.
template <typename T>
Tensor4<T> reconstruct(const Tensor4<T>& hidden, ModelParams<T>& params,
                       ReconstructCtx<T>* ctx = nullptr) {
    const int r = params.cfg.shuffle_factor();
    Tensor4<T> p = conv2d_forward(params.rb_pre, hidden, ctx ? &ctx->pre : nullptr);
    p = pixel_shuffle(p, r);
    return conv2d_forward(params.rb_post, p, ctx ? &ctx->post : nullptr);
}

template <typename T>
struct IterationOutputs {
    std::vector<Tensor4<T>> residuals;  // I_Res^t, t = 1..T
    Tensor4<T> upsampled;               // f_UP(I_LR)
    Tensor4<T> sr;                      // mean residual + upsampled

    Tensor4<T> sr_at(std::size_t t) const {
        Tensor4<T> out = residuals.at(t);
        for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += upsampled.data[i];
        return out;
    }
};

template <typename T>
struct ForwardCtx {
    int lr_h = 0, lr_w = 0;
    EmbedCtx<T> embed;
    std::vector<SsfbCtx<T>> ssfb;               // one per iteration
    std::vector<ReconstructCtx<T>> reconstruct; // one per iteration
};

template <typename T>
IterationOutputs<T> forward(const Tensor4<T>& lr, ModelParams<T>& params,
                            ForwardCtx<T>* ctx = nullptr) {
    const ModelConfig& cfg = params.cfg;
    if (lr.c != cfg.band_count) throw std::invalid_argument("forward: band count mismatch");
    if (lr.h % 2 != 0 || lr.w % 2 != 0)
        throw std::invalid_argument("forward: LR spatial size must be even");
    if (ctx) {
        ctx->lr_h = lr.h;
        ctx->lr_w = lr.w;
        ctx->ssfb.resize(static_cast<std::size_t>(cfg.iterations));
        ctx->reconstruct.resize(static_cast<std::size_t>(cfg.iterations));
    }

    IterationOutputs<T> out;
    out.upsampled = bicubic_upsample(lr, cfg.scale);

    std::vector<Tensor4<T>> feb = embed(lr, params, ctx ? &ctx->embed : nullptr);
    Tensor4<T> hidden = init_hidden<T>(lr.n, cfg, lr.h, lr.w);
    for (int t = 0; t < cfg.iterations; ++t) {
        hidden = ssfb_step(feb, hidden, params, ctx ? &ctx->ssfb[t] : nullptr);
        out.residuals.push_back(
            reconstruct(hidden, params, ctx ? &ctx->reconstruct[t] : nullptr));
    }

    out.sr = out.upsampled;
    const T inv_t = T(1) / static_cast<T>(cfg.iterations);
    for (const Tensor4<T>& res : out.residuals)
        for (std::size_t i = 0; i < out.sr.data.size(); ++i)
            out.sr.data[i] += inv_t * res.data[i];
    return out;
}

/// Training loss per the configured mode.
template <typename T>
T loss(const IterationOutputs<T>& out, const Tensor4<T>& hr, LossMode mode = LossMode::AveragedOutput) {
    if (mode == LossMode::AveragedOutput) return l1_loss(out.sr, hr);
    T acc = T(0);
    for (std::size_t t = 0; t < out.residuals.size(); ++t) acc += l1_loss(out.sr_at(t), hr);
    return acc / static_cast<T>(out.residuals.size());
}

/// Gradients of the loss w.r.t. each iteration's residual image.
template <typename T>
std::vector<Tensor4<T>> loss_backward(const IterationOutputs<T>& out, const Tensor4<T>& hr,
                                      LossMode mode = LossMode::AveragedOutput) {
    const std::size_t tcount = out.residuals.size();
    std::vector<Tensor4<T>> grads;
    grads.reserve(tcount);
    const T inv_t = T(1) / static_cast<T>(tcount);
    if (mode == LossMode::AveragedOutput) {
        Tensor4<T> g = l1_loss_backward(out.sr, hr);
        for (T& v : g.data) v *= inv_t;
        for (std::size_t t = 0; t < tcount; ++t) grads.push_back(g);
    } else {
        for (std::size_t t = 0; t < tcount; ++t) {
            Tensor4<T> g = l1_loss_backward(out.sr_at(t), hr, inv_t);
            grads.push_back(std::move(g));
        }
    }
    return grads;
}

/// Full backward pass; accumulates parameter gradients in `params`.
template <typename T>
void backward(ModelParams<T>& params, const ForwardCtx<T>& ctx,
              const std::vector<Tensor4<T>>& dres) {
    const ModelConfig& cfg = params.cfg;
    const int tcount = cfg.iterations;
    const int r = cfg.shuffle_factor();
    const std::size_t ngroups = params.grouping.size();
    const int cc = cfg.base_filters;

    std::vector<Tensor4<T>> dfeb;  // accumulated across iterations
    Tensor4<T> dhidden;            // grad flowing back through the feedback edge
    bool have_dhidden = false;

    for (int t = tcount - 1; t >= 0; --t) {
        // reconstruction head
        Tensor4<T> dsh = conv2d_backward(params.rb_post, ctx.reconstruct[t].post, dres[t]);
        Tensor4<T> dp = pixel_unshuffle(dsh, r);
        Tensor4<T> dhid = conv2d_backward(params.rb_pre, ctx.reconstruct[t].pre, dp);
        if (have_dhidden)
            for (std::size_t i = 0; i < dhid.data.size(); ++i) dhid.data[i] += dhidden.data[i];

        // global layer
        Tensor4<T> du = res_backward(params.global_rb[1], ctx.ssfb[t].global_rb[1], dhid);
        du = res_backward(params.global_rb[0], ctx.ssfb[t].global_rb[0], du);
        Tensor4<T> dfused = deconv2x2_backward(params.global_up, ctx.ssfb[t].up, du);

        // per-group local paths; feedback grads from all groups sum up
        Tensor4<T> dpool(dfused.n, cc, ctx.ssfb[t].in_h, ctx.ssfb[t].in_w);
        const int cg = cfg.group_filters();
        if (dfeb.empty()) dfeb.resize(ngroups);
        for (std::size_t g = 0; g < ngroups; ++g) {
            Tensor4<T> dl = slice_channels(dfused, static_cast<int>(g) * cg, cg);
            dl = res_backward(params.local[g][1], ctx.ssfb[t].local[g][1], dl);
            dl = res_backward(params.local[g][0], ctx.ssfb[t].local[g][0], dl);
            Tensor4<T> dcat = conv2d_backward(params.compress[g], ctx.ssfb[t].compress[g], dl);
            for (std::size_t i = 0; i < dpool.data.size(); ++i) dpool.data[i] += dcat.data[i];
            Tensor4<T> dfg = slice_channels(dcat, cc, cg);
            if (dfeb[g].data.empty()) {
                dfeb[g] = std::move(dfg);
            } else {
                for (std::size_t i = 0; i < dfg.data.size(); ++i) dfeb[g].data[i] += dfg.data[i];
            }
        }
        dhidden = avg_pool_k2s2_backward(dpool, 2 * ctx.ssfb[t].in_h, 2 * ctx.ssfb[t].in_w);
        have_dhidden = true;
        // the t = 0 feedback input is the fixed zero state: its grad is dropped
    }

    // embedding block
    for (std::size_t g = 0; g < ngroups; ++g) {
        Tensor4<T> dpre = relu_backward(ctx.embed.act[g], dfeb[g]);
        conv2d_backward(params.eb[g], ctx.embed.conv[g], dpre);  // input grad not needed
    }
}

}  // namespace ssfn
