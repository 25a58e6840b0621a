#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "ssfn/tensor.hpp"

namespace ssfn {

/// ADAM with bias correction. Moment buffers are kept per parameter tensor,
/// aligned with the parameter list the optimizer was built from.
template <typename T>
struct AdamState {
    T beta1 = T(0.9);
    T beta2 = T(0.999);
    T eps = T(1e-8);
    T lr = T(2e-4);
    long long t = 0;
    std::vector<std::vector<T>> m;
    std::vector<std::vector<T>> v;

    AdamState() = default;
    explicit AdamState(std::span<Param<T>* const> params, T lr_ = T(2e-4)) : lr(lr_) {
        for (const Param<T>* p : params) {
            m.emplace_back(p->size(), T(0));
            v.emplace_back(p->size(), T(0));
        }
    }
};

/// One ADAM update over `params` from their accumulated gradients.
/// Throws on a non-finite gradient before touching any parameter.
template <typename T>
void adam_step(std::span<Param<T>* const> params, AdamState<T>& st) {
    if (params.size() != st.m.size())
        throw std::invalid_argument("adam_step: state/parameter count mismatch");
    for (const Param<T>* p : params)
        for (T g : p->g)
            if (!std::isfinite(static_cast<double>(g)))
                throw std::runtime_error("adam_step: non-finite gradient");

    st.t += 1;
    const T bc1 = T(1) - std::pow(st.beta1, static_cast<T>(st.t));
    const T bc2 = T(1) - std::pow(st.beta2, static_cast<T>(st.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Param<T>& p = *params[i];
        std::vector<T>& m = st.m[i];
        std::vector<T>& v = st.v[i];
        for (std::size_t j = 0; j < p.size(); ++j) {
            const T g = p.g[j];
            m[j] = st.beta1 * m[j] + (T(1) - st.beta1) * g;
            v[j] = st.beta2 * v[j] + (T(1) - st.beta2) * g * g;
            const T mhat = m[j] / bc1;
            const T vhat = v[j] / bc2;
            p.v[j] -= st.lr * mhat / (std::sqrt(vhat) + st.eps);
        }
    }
}

}  // namespace ssfn
