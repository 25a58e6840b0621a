#pragma once

// Plain-text key = value config files mirroring the model and training
// settings. '#' starts a comment. Unknown keys are rejected.

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ssfn/model.hpp"

namespace ssfn {

enum class LrSchedule { Constant, Halve };

struct TrainConfig {
    int batch_size = 12;
    double lr = 2e-4;
    long long total_steps = 1;
    long long checkpoint_every = 0;  // 0: only the final checkpoint
    std::uint64_t seed = 0;
    LrSchedule lr_schedule = LrSchedule::Constant;
    long long halve_every = 10000;  // used when lr_schedule == Halve
    bool augment = false;
    int patch_size = 32;    // LR patch side
    bool antialias = true;  // degradation antialias
    int eval_crop = 512;    // top-left evaluation crop side

    void validate() const {
        if (batch_size < 1) throw std::invalid_argument("train config: batch_size must be >= 1");
        if (total_steps < 1) throw std::invalid_argument("train config: total_steps must be >= 1");
        if (patch_size < 2 || patch_size % 2 != 0)
            throw std::invalid_argument("train config: patch_size must be even and >= 2");
        if (lr_schedule == LrSchedule::Halve && halve_every < 1)
            throw std::invalid_argument("train config: halve_every must be >= 1");
    }

    double lr_at(long long step) const {
        if (lr_schedule == LrSchedule::Constant) return lr;
        return lr * std::pow(0.5, static_cast<double>(step / halve_every));
    }
};

namespace detail {

inline std::map<std::string, std::string> parse_kv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key, eq, value;
        if (!(ls >> key)) continue;
        if (!(ls >> eq >> value) || eq != "=")
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        kv[key] = value;
    }
    return kv;
}

}  // namespace detail

inline void apply_config_kv(const std::map<std::string, std::string>& kv, ModelConfig& mc,
                            TrainConfig& tc) {
    for (const auto& [key, value] : kv) {
        if (key == "band_count") mc.band_count = std::stoi(value);
        else if (key == "groups") mc.groups = std::stoi(value);
        else if (key == "iterations") mc.iterations = std::stoi(value);
        else if (key == "scale") mc.scale = std::stoi(value);
        else if (key == "base_filters") mc.base_filters = std::stoi(value);
        else if (key == "loss_mode") {
            if (value == "averaged") mc.loss_mode = LossMode::AveragedOutput;
            else if (value == "per_iteration") mc.loss_mode = LossMode::PerIteration;
            else throw std::runtime_error("config: unknown loss_mode '" + value + "'");
        } else if (key == "batch_size") tc.batch_size = std::stoi(value);
        else if (key == "lr") tc.lr = std::stod(value);
        else if (key == "total_steps") tc.total_steps = std::stoll(value);
        else if (key == "checkpoint_every") tc.checkpoint_every = std::stoll(value);
        else if (key == "seed") tc.seed = std::stoull(value);
        else if (key == "lr_schedule") {
            if (value == "constant") tc.lr_schedule = LrSchedule::Constant;
            else if (value == "halve") tc.lr_schedule = LrSchedule::Halve;
            else throw std::runtime_error("config: unknown lr_schedule '" + value + "'");
        } else if (key == "halve_every") tc.halve_every = std::stoll(value);
        else if (key == "augment") tc.augment = value == "true" || value == "1";
        else if (key == "patch_size") tc.patch_size = std::stoi(value);
        else if (key == "antialias") tc.antialias = value == "true" || value == "1";
        else if (key == "eval_crop") tc.eval_crop = std::stoi(value);
        else throw std::runtime_error("config: unknown key '" + key + "'");
    }
}

inline void load_config(const std::string& path, ModelConfig& mc, TrainConfig& tc) {
    apply_config_kv(detail::parse_kv(path), mc, tc);
}

inline void save_config(const std::string& path, const ModelConfig& mc, const TrainConfig& tc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "band_count = " << mc.band_count << "\n"
        << "groups = " << mc.groups << "\n"
        << "iterations = " << mc.iterations << "\n"
        << "scale = " << mc.scale << "\n"
        << "base_filters = " << mc.base_filters << "\n"
        << "loss_mode = " << (mc.loss_mode == LossMode::AveragedOutput ? "averaged" : "per_iteration")
        << "\n"
        << "batch_size = " << tc.batch_size << "\n"
        << "lr = " << tc.lr << "\n"
        << "total_steps = " << tc.total_steps << "\n"
        << "checkpoint_every = " << tc.checkpoint_every << "\n"
        << "seed = " << tc.seed << "\n"
        << "lr_schedule = " << (tc.lr_schedule == LrSchedule::Constant ? "constant" : "halve") << "\n"
        << "halve_every = " << tc.halve_every << "\n"
        << "augment = " << (tc.augment ? "true" : "false") << "\n"
        << "patch_size = " << tc.patch_size << "\n"
        << "antialias = " << (tc.antialias ? "true" : "false") << "\n"
        << "eval_crop = " << tc.eval_crop << "\n";
}

}  // namespace ssfn
