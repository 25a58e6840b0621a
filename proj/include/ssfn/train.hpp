#pragma once

// Seeded training loop with checkpointing and resume. One engine instance
// owns the parameters; the parameter trajectory is a pure function of
// (seed, configs, data).

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssfn/checkpoint.hpp"
#include "ssfn/config.hpp"
#include "ssfn/dataset.hpp"
#include "ssfn/metrics.hpp"
#include "ssfn/model.hpp"

namespace ssfn {

struct TrainLogEntry {
    long long step = 0;
    double loss = 0.0;
    double lr = 0.0;
    double seconds = 0.0;
};

inline void write_train_log_csv(const std::vector<TrainLogEntry>& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "step,loss,lr,seconds\n";
    for (const TrainLogEntry& e : log)
        out << e.step << "," << e.loss << "," << e.lr << "," << e.seconds << "\n";
}

namespace detail {

/// One of the 8 axis-aligned symmetries, applied identically to LR and HR.
inline HsiCube dihedral(const HsiCube& in, unsigned k) {
    const bool transpose = k & 4;
    const bool flip_y = k & 2;
    const bool flip_x = k & 1;
    const int oh = transpose ? in.width : in.height;
    const int ow = transpose ? in.height : in.width;
    HsiCube out(in.bands, oh, ow, in.name);
    for (int l = 0; l < in.bands; ++l)
        for (int y = 0; y < oh; ++y)
            for (int x = 0; x < ow; ++x) {
                int sy = transpose ? x : y;
                int sx = transpose ? y : x;
                if (flip_y) sy = in.height - 1 - sy;
                if (flip_x) sx = in.width - 1 - sx;
                out.at(l, y, x) = in.at(l, sy, sx);
            }
    return out;
}

}  // namespace detail

class Trainer {
public:
    /// Fresh run: weights initialized from the seed.
    Trainer(const ModelConfig& mcfg, const TrainConfig& tcfg, std::vector<HsiCube> train_cubes)
        : tcfg_(tcfg), params_(mcfg), rng_(tcfg.seed), train_cubes_(std::move(train_cubes)) {
        tcfg_.validate();
        check_cubes();
        params_.init_weights(rng_);
        auto list = params_.param_list();
        adam_ = AdamState<float>(std::span<Param<float>* const>(list),
                                 static_cast<float>(tcfg_.lr));
    }

    /// Resume: everything restored from the checkpoint; `tcfg` may extend
    /// total_steps but must not change the data pipeline.
    Trainer(const Checkpoint& ck, const TrainConfig& tcfg, std::vector<HsiCube> train_cubes)
        : tcfg_(tcfg), params_(params_from_checkpoint(ck)), rng_(0),
          train_cubes_(std::move(train_cubes)) {
        tcfg_.validate();
        if (ck.train_cfg.seed != tcfg.seed || ck.train_cfg.batch_size != tcfg.batch_size ||
            ck.train_cfg.patch_size != tcfg.patch_size)
            throw std::invalid_argument("resume: training config incompatible with checkpoint");
        check_cubes();
        adam_ = ck.adam;
        step_ = ck.step;
        rng_restore(rng_, ck.rng_state);
    }

    const ModelConfig& model_config() const { return params_.cfg; }
    const TrainConfig& train_config() const { return tcfg_; }
    ModelParams<float>& params() { return params_; }
    long long step() const { return step_; }
    const std::vector<TrainLogEntry>& log() const { return log_; }

    /// One optimization step; returns the batch loss.
    double step_once() {
        const auto t0 = std::chrono::steady_clock::now();
        const ModelConfig& mcfg = params_.cfg;
        const int p = tcfg_.patch_size;
        const int s = mcfg.scale;
        DegradationSpec spec{s, tcfg_.antialias};

        Tensor4<float> lr_batch(tcfg_.batch_size, mcfg.band_count, p, p);
        Tensor4<float> hr_batch(tcfg_.batch_size, mcfg.band_count, p * s, p * s);
        for (int b = 0; b < tcfg_.batch_size; ++b) {
            const std::size_t ci = static_cast<std::size_t>(rand_below(rng_, train_cubes_.size()));
            PatchPair pair = sample_patch_pair(train_cubes_[ci], p, spec, rng_);
            if (tcfg_.augment) {
                const unsigned k = static_cast<unsigned>(rand_below(rng_, 8));
                pair.hr = detail::dihedral(pair.hr, k);
                pair.lr = detail::dihedral(pair.lr, k);
            }
            std::copy(pair.lr.data.begin(), pair.lr.data.end(),
                      lr_batch.data.begin() + static_cast<std::size_t>(b) * pair.lr.size());
            std::copy(pair.hr.data.begin(), pair.hr.data.end(),
                      hr_batch.data.begin() + static_cast<std::size_t>(b) * pair.hr.size());
        }

        ForwardCtx<float> ctx;
        IterationOutputs<float> out = forward(lr_batch, params_, &ctx);
        const double loss_value = static_cast<double>(loss(out, hr_batch, params_.cfg.loss_mode));
        if (!std::isfinite(loss_value))
            throw std::runtime_error("train: non-finite loss at step " + std::to_string(step_ + 1));

        params_.zero_grad();
        backward(params_, ctx, loss_backward(out, hr_batch, params_.cfg.loss_mode));

        adam_.lr = static_cast<float>(tcfg_.lr_at(step_));
        auto list = params_.param_list();
        adam_step(std::span<Param<float>* const>(list), adam_);
        step_ += 1;

        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        log_.push_back({step_, loss_value, static_cast<double>(adam_.lr), secs});
        return loss_value;
    }

    /// Runs to total_steps. If `out_dir` is given, writes checkpoints on
    /// schedule, the final checkpoint, and a diagnostic checkpoint on a
    /// non-finite loss before rethrowing.
    void run(const std::optional<std::string>& out_dir = std::nullopt,
             const std::function<void(const TrainLogEntry&)>& on_step = {}) {
        namespace fs = std::filesystem;
        while (step_ < tcfg_.total_steps) {
            try {
                step_once();
            } catch (const std::exception&) {
                if (out_dir) save((fs::path(*out_dir) / "diagnostic.ckpt").string());
                throw;
            }
            if (on_step) on_step(log_.back());
            if (out_dir && tcfg_.checkpoint_every > 0 && step_ % tcfg_.checkpoint_every == 0 &&
                step_ != tcfg_.total_steps)
                save((fs::path(*out_dir) / ("step_" + std::to_string(step_) + ".ckpt")).string());
        }
        if (out_dir) save((fs::path(*out_dir) / "final.ckpt").string());
    }

    void save(const std::string& path) {
        save_checkpoint(make_checkpoint(params_, tcfg_, adam_, step_, rng_), path);
    }

private:
    void check_cubes() {
        if (train_cubes_.empty()) throw std::invalid_argument("train: no training cubes");
        const int need = tcfg_.patch_size * params_.cfg.scale;
        for (const HsiCube& c : train_cubes_) {
            if (c.bands != params_.cfg.band_count)
                throw std::invalid_argument("train: cube '" + c.name + "' band count mismatch");
            if (c.height < need || c.width < need)
                throw std::invalid_argument("train: cube '" + c.name + "' too small for one patch");
        }
    }

    TrainConfig tcfg_;
    ModelParams<float> params_;
    AdamState<float> adam_;
    Rng rng_;
    long long step_ = 0;
    std::vector<HsiCube> train_cubes_;
    std::vector<TrainLogEntry> log_;
};

/// Super-resolve one cube with the given parameters.
inline HsiCube super_resolve(const HsiCube& lr, ModelParams<float>& params,
                             std::vector<HsiCube>* per_iteration = nullptr) {
    Tensor4<float> in = cube_to_tensor(lr);
    IterationOutputs<float> out = forward(in, params);
    if (per_iteration) {
        per_iteration->clear();
        for (std::size_t t = 0; t < out.residuals.size(); ++t)
            per_iteration->push_back(
                tensor_to_cube(out.sr_at(t), lr.name + "_iter" + std::to_string(t + 1)));
    }
    return tensor_to_cube(out.sr, lr.name);
}

struct EvalImage {
    MetricReport report;
    HsiCube sr;
    HsiCube hr;
};

/// Crop the top-left evaluation window, degrade, super-resolve, score.
inline EvalImage evaluate_cube(const HsiCube& cube, ModelParams<float>& params, int eval_crop,
                               bool antialias) {
    const int s = params.cfg.scale;
    // the LR side must stay even for the network, so crop to a 2s multiple
    int side = std::min({eval_crop, cube.height, cube.width});
    side -= side % (2 * s);
    if (side < 2 * s) throw std::invalid_argument("evaluate: cube too small");
    EvalImage out;
    out.hr = crop_topleft(cube, side);
    HsiCube lr = degrade(out.hr, DegradationSpec{s, antialias});
    out.sr = super_resolve(lr, params);
    out.report = evaluate_pair(out.sr, out.hr, s);
    return out;
}

/// Per-image reports over the manifest's test entries; aggregate appended by
/// the CSV writer.
inline std::vector<MetricReport> evaluate_checkpoint_reports(ModelParams<float>& params,
                                                             const DatasetManifest& manifest,
                                                             int eval_crop, bool antialias) {
    std::vector<MetricReport> reports;
    for (const std::string& path : manifest.paths_with_role(Role::Test)) {
        HsiCube cube = load_cube(path, detect_layout(path));
        reports.push_back(evaluate_cube(cube, params, eval_crop, antialias).report);
    }
    if (reports.empty()) throw std::runtime_error("evaluate: manifest has no test entries");
    return reports;
}

}  // namespace ssfn
