#pragma once

// Checkpoint file: version tag, embedded model + training config, named
// parameter tensors (name, shape, f32 little-endian payload), ADAM moments,
// step counter, and the sampler RNG state. Everything needed to continue a
// run step-for-step.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssfn/adam.hpp"
#include "ssfn/config.hpp"
#include "ssfn/model.hpp"
#include "ssfn/rng.hpp"

namespace ssfn {

inline constexpr char kCheckpointMagic[8] = {'S', 'S', 'F', 'N', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

template <typename T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("checkpoint: truncated file");
    return v;
}

inline void write_string(std::ostream& os, const std::string& s) {
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& is) {
    const auto len = read_pod<std::uint32_t>(is);
    std::string s(len, '\0');
    is.read(s.data(), len);
    if (!is) throw std::runtime_error("checkpoint: truncated string");
    return s;
}

inline void write_floats(std::ostream& os, const std::vector<float>& v) {
    write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(v.size()));
    os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * 4));
}

inline std::vector<float> read_floats(std::istream& is) {
    const auto len = read_pod<std::uint64_t>(is);
    std::vector<float> v(len);
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(len * 4));
    if (!is) throw std::runtime_error("checkpoint: truncated payload");
    return v;
}

}  // namespace detail

struct Checkpoint {
    ModelConfig model_cfg;
    TrainConfig train_cfg;
    long long step = 0;
    std::vector<std::pair<std::string, std::vector<float>>> tensors;  // name -> values
    // optimizer moments aligned with `tensors`
    AdamState<float> adam;
    std::string rng_state;
};

inline Checkpoint make_checkpoint(ModelParams<float>& params, const TrainConfig& tcfg,
                                  const AdamState<float>& adam, long long step, const Rng& rng) {
    Checkpoint ck;
    ck.model_cfg = params.cfg;
    ck.train_cfg = tcfg;
    ck.step = step;
    for (auto& [name, p] : params.named_params()) ck.tensors.emplace_back(name, p->v);
    ck.adam = adam;
    ck.rng_state = rng_save(rng);
    return ck;
}

inline void save_checkpoint(const Checkpoint& ck, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write checkpoint " + path);
    os.write(kCheckpointMagic, 8);
    detail::write_pod(os, kCheckpointVersion);

    const ModelConfig& mc = ck.model_cfg;
    detail::write_pod<std::int32_t>(os, mc.band_count);
    detail::write_pod<std::int32_t>(os, mc.groups);
    detail::write_pod<std::int32_t>(os, mc.iterations);
    detail::write_pod<std::int32_t>(os, mc.scale);
    detail::write_pod<std::int32_t>(os, mc.base_filters);
    detail::write_pod<std::uint8_t>(os, mc.loss_mode == LossMode::AveragedOutput ? 0 : 1);

    const TrainConfig& tc = ck.train_cfg;
    detail::write_pod<std::int32_t>(os, tc.batch_size);
    detail::write_pod<double>(os, tc.lr);
    detail::write_pod<std::int64_t>(os, tc.total_steps);
    detail::write_pod<std::int64_t>(os, tc.checkpoint_every);
    detail::write_pod<std::uint64_t>(os, tc.seed);
    detail::write_pod<std::uint8_t>(os, tc.lr_schedule == LrSchedule::Constant ? 0 : 1);
    detail::write_pod<std::int64_t>(os, tc.halve_every);
    detail::write_pod<std::uint8_t>(os, tc.augment ? 1 : 0);
    detail::write_pod<std::int32_t>(os, tc.patch_size);
    detail::write_pod<std::uint8_t>(os, tc.antialias ? 1 : 0);
    detail::write_pod<std::int32_t>(os, tc.eval_crop);

    detail::write_pod<std::int64_t>(os, ck.step);
    detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(ck.tensors.size()));
    for (const auto& [name, values] : ck.tensors) {
        detail::write_string(os, name);
        detail::write_floats(os, values);
    }

    detail::write_pod<double>(os, static_cast<double>(ck.adam.beta1));
    detail::write_pod<double>(os, static_cast<double>(ck.adam.beta2));
    detail::write_pod<double>(os, static_cast<double>(ck.adam.eps));
    detail::write_pod<double>(os, static_cast<double>(ck.adam.lr));
    detail::write_pod<std::int64_t>(os, ck.adam.t);
    detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(ck.adam.m.size()));
    for (std::size_t i = 0; i < ck.adam.m.size(); ++i) {
        detail::write_floats(os, ck.adam.m[i]);
        detail::write_floats(os, ck.adam.v[i]);
    }
    detail::write_string(os, ck.rng_state);
    if (!os) throw std::runtime_error("I/O failure writing checkpoint " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kCheckpointMagic, 8) != 0)
        throw std::runtime_error(path + ": not a checkpoint file");
    const auto version = detail::read_pod<std::uint32_t>(is);
    if (version != kCheckpointVersion)
        throw std::runtime_error(path + ": unsupported checkpoint version " + std::to_string(version));

    Checkpoint ck;
    ModelConfig& mc = ck.model_cfg;
    mc.band_count = detail::read_pod<std::int32_t>(is);
    mc.groups = detail::read_pod<std::int32_t>(is);
    mc.iterations = detail::read_pod<std::int32_t>(is);
    mc.scale = detail::read_pod<std::int32_t>(is);
    mc.base_filters = detail::read_pod<std::int32_t>(is);
    mc.loss_mode = detail::read_pod<std::uint8_t>(is) == 0 ? LossMode::AveragedOutput
                                                           : LossMode::PerIteration;

    TrainConfig& tc = ck.train_cfg;
    tc.batch_size = detail::read_pod<std::int32_t>(is);
    tc.lr = detail::read_pod<double>(is);
    tc.total_steps = detail::read_pod<std::int64_t>(is);
    tc.checkpoint_every = detail::read_pod<std::int64_t>(is);
    tc.seed = detail::read_pod<std::uint64_t>(is);
    tc.lr_schedule = detail::read_pod<std::uint8_t>(is) == 0 ? LrSchedule::Constant : LrSchedule::Halve;
    tc.halve_every = detail::read_pod<std::int64_t>(is);
    tc.augment = detail::read_pod<std::uint8_t>(is) != 0;
    tc.patch_size = detail::read_pod<std::int32_t>(is);
    tc.antialias = detail::read_pod<std::uint8_t>(is) != 0;
    tc.eval_crop = detail::read_pod<std::int32_t>(is);

    ck.step = detail::read_pod<std::int64_t>(is);
    const auto ntensors = detail::read_pod<std::uint32_t>(is);
    for (std::uint32_t i = 0; i < ntensors; ++i) {
        std::string name = detail::read_string(is);
        ck.tensors.emplace_back(std::move(name), detail::read_floats(is));
    }

    ck.adam.beta1 = static_cast<float>(detail::read_pod<double>(is));
    ck.adam.beta2 = static_cast<float>(detail::read_pod<double>(is));
    ck.adam.eps = static_cast<float>(detail::read_pod<double>(is));
    ck.adam.lr = static_cast<float>(detail::read_pod<double>(is));
    ck.adam.t = detail::read_pod<std::int64_t>(is);
    const auto nmoments = detail::read_pod<std::uint32_t>(is);
    for (std::uint32_t i = 0; i < nmoments; ++i) {
        ck.adam.m.push_back(detail::read_floats(is));
        ck.adam.v.push_back(detail::read_floats(is));
    }
    ck.rng_state = detail::read_string(is);
    return ck;
}

/// Copies checkpoint tensors into a freshly built parameter set.
inline ModelParams<float> params_from_checkpoint(const Checkpoint& ck) {
    ModelParams<float> params(ck.model_cfg);
    auto named = params.named_params();
    if (named.size() != ck.tensors.size())
        throw std::runtime_error("checkpoint: parameter tensor count mismatch");
    for (std::size_t i = 0; i < named.size(); ++i) {
        if (named[i].first != ck.tensors[i].first)
            throw std::runtime_error("checkpoint: unexpected tensor '" + ck.tensors[i].first + "'");
        if (named[i].second->size() != ck.tensors[i].second.size())
            throw std::runtime_error("checkpoint: size mismatch for '" + ck.tensors[i].first + "'");
        named[i].second->v = ck.tensors[i].second;
    }
    return params;
}

}  // namespace ssfn
