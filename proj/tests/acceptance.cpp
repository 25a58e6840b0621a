// Acceptance gate: ten deterministic end-to-end checks, one line of output
// each. Exit status is nonzero if any gated check fails. The bicubic CAVE
// baseline (check 2) needs the CAVE dataset on disk and reports SKIP with
// instructions when it is absent.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ssfn/checkpoint.hpp"
#include "ssfn/gradcheck.hpp"
#include "ssfn/metrics.hpp"
#include "ssfn/model.hpp"
#include "ssfn/train.hpp"

using namespace ssfn;
namespace fs = std::filesystem;

namespace {

enum class Status { Pass, Fail, Skip };

struct Result {
    Status status = Status::Fail;
    std::string detail;
};

HsiCube smooth_cube(int l, int h, int w, std::uint64_t seed, double freq = 0.25,
                    const std::string& name = "c") {
    HsiCube c(l, h, w, name);
    Rng rng(seed);
    for (int b = 0; b < l; ++b) {
        const double p1 = rand_unit(rng) * 6.28, p2 = rand_unit(rng) * 6.28;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                c.at(b, y, x) = static_cast<float>(
                    0.5 + 0.25 * std::sin(p1 + freq * y + 0.8 * freq * x) +
                    0.2 * std::cos(p2 + 0.6 * freq * y - freq * x) * std::cos(0.2 * b));
    }
    for (float& v : c.data) v = std::clamp(v, 0.0f, 1.0f);
    return c;
}

template <typename T>
void randomize_params(ModelParams<T>& params, Rng& rng, T scale) {
    for (Param<T>* p : params.param_list())
        for (T& v : p->v) v = static_cast<T>((rand_unit(rng) * 2.0 - 1.0)) * scale;
}

// --- independent metric oracles (duplicated on purpose: the production code
// --- in metrics.hpp must agree with a second, separately written reading of
// --- each definition) --------------------------------------------------------

double oracle_cc(const HsiCube& a, const HsiCube& b) {
    double total = 0.0;
    for (int l = 0; l < a.bands; ++l) {
        const int n = a.height * a.width;
        double ma = 0, mb = 0;
        for (int i = 0; i < n; ++i) {
            ma += a.band(l)[i];
            mb += b.band(l)[i];
        }
        ma /= n;
        mb /= n;
        double num = 0, va = 0, vb = 0;
        for (int i = 0; i < n; ++i) {
            num += (a.band(l)[i] - ma) * (b.band(l)[i] - mb);
            va += (a.band(l)[i] - ma) * (a.band(l)[i] - ma);
            vb += (b.band(l)[i] - mb) * (b.band(l)[i] - mb);
        }
        total += num / std::sqrt(va * vb);
    }
    return total / a.bands;
}

double oracle_sam(const HsiCube& a, const HsiCube& b) {
    const int plane = a.height * a.width;
    double total = 0.0;
    for (int p = 0; p < plane; ++p) {
        double dot = 0, na = 0, nb = 0;
        for (int l = 0; l < a.bands; ++l) {
            dot += static_cast<double>(a.band(l)[p]) * b.band(l)[p];
            na += static_cast<double>(a.band(l)[p]) * a.band(l)[p];
            nb += static_cast<double>(b.band(l)[p]) * b.band(l)[p];
        }
        total += std::acos(std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0));
    }
    return total / plane * 180.0 / 3.14159265358979323846;
}

double oracle_rmse(const HsiCube& a, const HsiCube& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        acc += (static_cast<double>(a.data[i]) - b.data[i]) *
               (static_cast<double>(a.data[i]) - b.data[i]);
    return std::sqrt(acc / a.data.size());
}

double oracle_band_rmse(const HsiCube& a, const HsiCube& b, int l) {
    const int n = a.height * a.width;
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        acc += (static_cast<double>(a.band(l)[i]) - b.band(l)[i]) *
               (static_cast<double>(a.band(l)[i]) - b.band(l)[i]);
    return std::sqrt(acc / n);
}

double oracle_ergas(const HsiCube& a, const HsiCube& b, int s) {
    double acc = 0.0;
    for (int l = 0; l < a.bands; ++l) {
        const int n = a.height * a.width;
        double mu = 0;
        for (int i = 0; i < n; ++i) mu += b.band(l)[i];
        mu /= n;
        const double r = oracle_band_rmse(a, b, l);
        acc += (r / mu) * (r / mu);
    }
    return 100.0 * s * std::sqrt(acc / a.bands);
}

double oracle_psnr(const HsiCube& a, const HsiCube& b) {
    double total = 0.0;
    for (int l = 0; l < a.bands; ++l) {
        const double r = oracle_band_rmse(a, b, l);
        total += r == 0.0 ? 100.0 : std::min(100.0, -20.0 * std::log10(r));
    }
    return total / a.bands;
}

double oracle_ssim(const HsiCube& a, const HsiCube& b) {
    double win[11][11], wsum = 0.0;
    for (int y = 0; y < 11; ++y)
        for (int x = 0; x < 11; ++x) {
            win[y][x] = std::exp(-((y - 5.0) * (y - 5.0) + (x - 5.0) * (x - 5.0)) / 4.5);
            wsum += win[y][x];
        }
    const double c1 = 1e-4, c2 = 9e-4;
    double band_total = 0.0;
    for (int l = 0; l < a.bands; ++l) {
        double total = 0.0;
        int count = 0;
        for (int y0 = 0; y0 + 11 <= a.height; ++y0)
            for (int x0 = 0; x0 + 11 <= a.width; ++x0) {
                double mua = 0, mub = 0;
                for (int y = 0; y < 11; ++y)
                    for (int x = 0; x < 11; ++x) {
                        mua += win[y][x] / wsum * a.band(l)[(y0 + y) * a.width + x0 + x];
                        mub += win[y][x] / wsum * b.band(l)[(y0 + y) * b.width + x0 + x];
                    }
                double va = 0, vb = 0, cov = 0;
                for (int y = 0; y < 11; ++y)
                    for (int x = 0; x < 11; ++x) {
                        const double da = a.band(l)[(y0 + y) * a.width + x0 + x] - mua;
                        const double db = b.band(l)[(y0 + y) * b.width + x0 + x] - mub;
                        va += win[y][x] / wsum * da * da;
                        vb += win[y][x] / wsum * db * db;
                        cov += win[y][x] / wsum * da * db;
                    }
                total += ((2 * mua * mub + c1) * (2 * cov + c2)) /
                         ((mua * mua + mub * mub + c1) * (va + vb + c2));
                ++count;
            }
        band_total += total / count;
    }
    return band_total / a.bands;
}

// --- criteria ---------------------------------------------------------------

Result check_metric_oracles() {
    Rng rng(2024);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const int l = 1 + static_cast<int>(rand_below(rng, 6));
        const int h = 11 + static_cast<int>(rand_below(rng, 6));
        const int w = 11 + static_cast<int>(rand_below(rng, 6));
        HsiCube a(l, h, w), b(l, h, w);
        for (float& v : a.data) v = static_cast<float>(0.05 + 0.9 * rand_unit(rng));
        for (float& v : b.data) v = static_cast<float>(0.05 + 0.9 * rand_unit(rng));
        const int s = 4;
        worst = std::max(worst, std::abs(cc(a, b) - oracle_cc(a, b)));
        worst = std::max(worst, std::abs(sam(a, b) - oracle_sam(a, b)));
        worst = std::max(worst, std::abs(rmse(a, b) - oracle_rmse(a, b)));
        worst = std::max(worst, std::abs(ergas(a, b, s) - oracle_ergas(a, b, s)));
        worst = std::max(worst, std::abs(psnr(a, b) - oracle_psnr(a, b)));
        worst = std::max(worst, std::abs(ssim(a, b) - oracle_ssim(a, b)));
    }
    std::ostringstream os;
    os << "200 pairs, max |impl - oracle| = " << worst;
    return {worst < 1e-6 ? Status::Pass : Status::Fail, os.str()};
}

Result check_cave_baseline() {
    std::vector<std::string> roots;
    if (const char* env = std::getenv("SSFN_CAVE_DIR")) roots.push_back(env);
    roots.push_back("data/cave");
    roots.push_back("/root/data/cave");
    std::string root;
    for (const std::string& r : roots)
        if (fs::is_directory(r)) {
            root = r;
            break;
        }
    if (root.empty())
        return {Status::Skip,
                "CAVE dataset not found; set SSFN_CAVE_DIR to a directory of per-scene band-image "
                "folders (or planar cubes with .hdr sidecars) to run this check"};

    // fixed documented split: sorted scene list, seed 0, 80% train
    DatasetManifest manifest;
    manifest.split_seed = 0;
    manifest.split_ratio = 0.8;
    std::vector<std::string> scenes;
    for (const auto& e : fs::directory_iterator(root)) {
        const std::string p = e.path().string();
        if (e.is_directory() || (e.is_regular_file() && fs::exists(p + ".hdr")))
            scenes.push_back(p);
    }
    std::sort(scenes.begin(), scenes.end());
    for (const std::string& s : scenes) manifest.entries.push_back({s, Role::Train});
    if (manifest.entries.size() < 2)
        return {Status::Skip, "found fewer than two scenes under " + root};
    manifest = split_dataset(manifest);

    std::vector<MetricReport> reports;
    for (const std::string& path : manifest.paths_with_role(Role::Test)) {
        HsiCube cube = load_cube(path, detect_layout(path));
        int side = std::min({512, cube.height, cube.width});
        side -= side % 4;
        HsiCube hr = crop_topleft(cube, side);
        HsiCube lr = degrade(hr, DegradationSpec{4, true});
        HsiCube sr = bicubic_resize(lr, side, side);
        sr.name = fs::path(path).stem().string();
        reports.push_back(evaluate_pair(sr, hr, 4));
    }
    MetricReport avg = aggregate(reports);
    std::ostringstream os;
    os << reports.size() << " test scenes: PSNR " << avg.psnr << " (target 34.5069 +/- 1.5), SAM "
       << avg.sam << " (target 5.1832 +/- 1.0), SSIM " << avg.ssim << " (target 0.9472 +/- 0.03)";
    const bool ok = std::abs(avg.psnr - 34.5069) <= 1.5 && std::abs(avg.sam - 5.1832) <= 1.0 &&
                    std::abs(avg.ssim - 0.9472) <= 0.03;
    return {ok ? Status::Pass : Status::Fail, os.str()};
}

Result check_gradients() {
    ModelConfig cfg;
    cfg.band_count = 4;
    cfg.groups = 2;
    cfg.iterations = 2;
    cfg.scale = 4;
    cfg.base_filters = 8;
    ModelParams<double> params(cfg);
    Rng rng(7);
    randomize_params(params, rng, 0.4);
    Tensor4<double> lr(1, 4, 8, 8);
    for (double& v : lr.data) v = rand_unit(rng);
    Tensor4<double> hr(1, 4, 32, 32);
    for (double& v : hr.data) v = 2.0 + rand_unit(rng);  // away from the L1 kink

    auto loss_fn = [&] {
        IterationOutputs<double> out = forward(lr, params);
        return static_cast<double>(loss(out, hr));
    };
    ForwardCtx<double> ctx;
    IterationOutputs<double> out = forward(lr, params, &ctx);
    params.zero_grad();
    backward(params, ctx, loss_backward(out, hr));

    Rng pick(13);
    std::vector<std::pair<double*, double>> coords;
    for (Param<double>* p : params.param_list())
        for (std::size_t j = 0; j < p->size(); ++j)
            if (rand_unit(pick) < 0.12) coords.emplace_back(&p->v[j], p->g[j]);
    GradCheckReport rep = grad_check(loss_fn, coords, 1e-5);
    std::ostringstream os;
    os << rep.checked << " parameters, max relative error " << rep.max_rel_err;
    return {rep.checked >= 200 && rep.max_rel_err < 1e-3 ? Status::Pass : Status::Fail, os.str()};
}

Result check_averaging_identity() {
    double worst = 0.0;
    for (int t_iters : {1, 2, 4}) {
        ModelConfig cfg;
        cfg.band_count = 4;
        cfg.groups = 2;
        cfg.iterations = t_iters;
        cfg.scale = 2;
        cfg.base_filters = 8;
        ModelParams<float> params(cfg);
        Rng rng(100 + static_cast<std::uint64_t>(t_iters));
        randomize_params(params, rng, 0.2f);
        Tensor4<float> lr(1, 4, 8, 8);
        for (float& v : lr.data) v = static_cast<float>(rand_unit(rng));
        IterationOutputs<float> out = forward(lr, params);
        for (std::size_t i = 0; i < out.sr.data.size(); ++i) {
            double mean = 0.0;
            for (const auto& r : out.residuals) mean += r.data[i];
            mean /= t_iters;
            worst = std::max(worst,
                             std::abs(out.sr.data[i] - out.upsampled.data[i] - mean));
        }
        if (t_iters == 1) {
            Tensor4<float> sr1 = out.sr_at(0);
            for (std::size_t i = 0; i < sr1.data.size(); ++i)
                if (out.sr.data[i] != sr1.data[i])
                    return {Status::Fail, "T=1: I_SR differs from I_SR^1"};
        }
    }
    std::ostringstream os;
    os << "T in {1,2,4}, max |(I_SR - up) - mean residual| = " << worst
       << "; T=1 equality exact";
    return {worst < 1e-6 ? Status::Pass : Status::Fail, os.str()};
}

Result check_zero_parameter_equivalence() {
    ModelConfig cfg;
    cfg.band_count = 4;
    cfg.groups = 2;
    cfg.iterations = 3;
    cfg.scale = 4;
    cfg.base_filters = 8;
    ModelParams<float> zero(cfg);
    Rng rng(11);
    Tensor4<float> lr(1, 4, 8, 8);
    for (float& v : lr.data) v = static_cast<float>(rand_unit(rng));
    IterationOutputs<float> out = forward(lr, zero);
    Tensor4<float> up = bicubic_upsample(lr, 4);
    double worst = 0.0;
    for (std::size_t i = 0; i < up.data.size(); ++i)
        worst = std::max(worst, std::abs(static_cast<double>(out.sr.data[i]) - up.data[i]));
    if (worst > 1e-7) {
        std::ostringstream os;
        os << "forward deviates from bicubic by " << worst;
        return {Status::Fail, os.str()};
    }

    // checkpoint-style evaluation against the directly computed baseline CSV
    const fs::path dir = fs::temp_directory_path() / "ssfn_accept_zero";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::vector<MetricReport> model_reports;
    std::vector<MetricReport> baseline_reports;
    DatasetManifest manifest;
    for (int i = 0; i < 2; ++i) {
        HsiCube cube = smooth_cube(4, 48, 48, 20 + static_cast<std::uint64_t>(i), 0.25,
                                   "scene_" + std::to_string(i));
        const std::string p = (dir / (cube.name + ".raw")).string();
        save_cube(cube, p);
        manifest.entries.push_back({p, Role::Test});
        HsiCube hr = crop_topleft(cube, 48);
        HsiCube lrc = degrade(hr, DegradationSpec{4, true});
        HsiCube sr = bicubic_resize(lrc, 48, 48);
        baseline_reports.push_back(evaluate_pair(sr, hr, 4));
    }
    model_reports = evaluate_checkpoint_reports(zero, manifest, 48, true);
    const std::string got = metrics_csv(model_reports);
    const std::string want = metrics_csv(baseline_reports);
    if (got != want) return {Status::Fail, "evaluation CSV differs from the bicubic baseline CSV"};
    std::ostringstream os;
    os << "forward == bicubic (max diff " << worst << "); baseline CSVs identical";
    return {Status::Pass, os.str()};
}

Result check_shape_sweep() {
    int combos = 0;
    for (int l : {31, 33})
        for (int g : {1, 4, 8})
            for (int s : {2, 4, 8})
                for (int t : {1, 6}) {
                    ModelConfig cfg;
                    cfg.band_count = l;
                    cfg.groups = g;
                    cfg.iterations = t;
                    cfg.scale = s;
                    cfg.base_filters = 16;  // divisible by every G and (s/2)^2 here
                    ModelParams<float> params(cfg);
                    Tensor4<float> lr(1, l, 16, 16);
                    IterationOutputs<float> out = forward(lr, params);
                    if (out.sr.c != l || out.sr.h != 16 * s || out.sr.w != 16 * s) {
                        std::ostringstream os;
                        os << "wrong shape for L=" << l << " G=" << g << " s=" << s << " T=" << t;
                        return {Status::Fail, os.str()};
                    }
                    auto groups = group_bands(l, g);
                    int covered = 0;
                    for (auto [start, len] : groups) {
                        if (start != covered) return {Status::Fail, "group_bands gap"};
                        covered += len;
                    }
                    if (covered != l || static_cast<int>(groups.size()) != g)
                        return {Status::Fail, "group_bands is not a partition"};
                    ++combos;
                }
    std::ostringstream os;
    os << combos << " (L,G,s,T) combinations, all output shapes (L, 16s, 16s)";
    return {Status::Pass, os.str()};
}

Result check_weight_sharing() {
    ModelConfig a;
    a.band_count = 8;
    a.groups = 4;
    a.iterations = 1;
    a.scale = 4;
    a.base_filters = 16;
    ModelConfig b = a;
    b.iterations = 6;
    if (param_count(a) != param_count(b))
        return {Status::Fail, "param_count changed with T"};

    const fs::path dir = fs::temp_directory_path() / "ssfn_accept_share";
    fs::remove_all(dir);
    fs::create_directories(dir);
    TrainConfig tc;
    tc.total_steps = 1;
    auto payload_size = [&](const ModelConfig& cfg, const std::string& name) {
        ModelParams<float> params(cfg);
        auto list = params.param_list();
        AdamState<float> adam(std::span<Param<float>* const>(list), 1e-4f);
        Rng rng(0);
        const std::string path = (dir / name).string();
        save_checkpoint(make_checkpoint(params, tc, adam, 0, rng), path);
        return fs::file_size(path);
    };
    const auto sa = payload_size(a, "t1.ckpt");
    const auto sb = payload_size(b, "t6.ckpt");
    std::ostringstream os;
    os << "param_count " << param_count(a) << " and checkpoint size " << sa
       << " B identical for T=1 and T=6";
    return {sa == sb ? Status::Pass : Status::Fail, os.str()};
}

Result check_overfit() {
    ModelConfig cfg;
    cfg.band_count = 8;
    cfg.groups = 4;
    cfg.iterations = 3;
    cfg.scale = 4;
    cfg.base_filters = 64;
    TrainConfig tc;
    tc.batch_size = 1;
    tc.lr = 2e-4;
    tc.total_steps = 2000;
    tc.seed = 42;
    tc.patch_size = 32;
    // a single 128x128 HR cube: with a 32x32 LR patch the sampler has exactly
    // one legal crop, so every step trains on the same patch
    HsiCube hr = smooth_cube(8, 128, 128, 77, 0.35, "patch");
    Trainer trainer(cfg, tc, {hr});
    const double initial = trainer.step_once();
    trainer.run();

    HsiCube lr = degrade(hr, DegradationSpec{4, true});
    HsiCube sr = super_resolve(lr, trainer.params());
    const double train_psnr = psnr(sr, hr);
    HsiCube baseline = bicubic_resize(lr, 128, 128);
    std::ostringstream os;
    os << "2000 steps, loss " << initial << " -> " << trainer.log().back().loss
       << ", training-patch PSNR " << train_psnr << " dB (bicubic " << psnr(baseline, hr)
       << " dB, gate > 40)";
    return {train_psnr > 40.0 ? Status::Pass : Status::Fail, os.str()};
}

Result check_determinism() {
    ModelConfig cfg;
    cfg.band_count = 4;
    cfg.groups = 2;
    cfg.iterations = 2;
    cfg.scale = 2;
    cfg.base_filters = 8;
    TrainConfig tc;
    tc.batch_size = 2;
    tc.total_steps = 50;
    tc.seed = 9;
    tc.patch_size = 8;
    std::vector<HsiCube> data{smooth_cube(4, 40, 40, 1, 0.25, "a"),
                              smooth_cube(4, 40, 40, 2, 0.25, "b")};
    Trainer r1(cfg, tc, data), r2(cfg, tc, data);
    r1.run();
    r2.run();
    double worst_loss = 0.0;
    for (std::size_t i = 0; i < 50; ++i)
        worst_loss = std::max(worst_loss, std::abs(r1.log()[i].loss - r2.log()[i].loss));
    if (worst_loss > 1e-6) {
        std::ostringstream os;
        os << "loss traces diverge by " << worst_loss;
        return {Status::Fail, os.str()};
    }

    const fs::path dir = fs::temp_directory_path() / "ssfn_accept_det";
    fs::remove_all(dir);
    fs::create_directories(dir);
    TrainConfig tc20 = tc;
    tc20.total_steps = 20;
    Trainer straight(cfg, tc20, data);
    straight.run();
    TrainConfig tc10 = tc;
    tc10.total_steps = 10;
    Trainer half(cfg, tc10, data);
    half.run(dir.string());
    Checkpoint ck = load_checkpoint((dir / "final.ckpt").string());
    Trainer resumed(ck, tc20, data);
    resumed.run();
    double worst_param = 0.0;
    auto la = straight.params().param_list();
    auto lb = resumed.params().param_list();
    for (std::size_t i = 0; i < la.size(); ++i)
        for (std::size_t j = 0; j < la[i]->size(); ++j)
            worst_param = std::max(worst_param,
                                   std::abs(static_cast<double>(la[i]->v[j]) - lb[i]->v[j]));
    std::ostringstream os;
    os << "50-step replay max loss diff " << worst_loss << "; split-run max parameter diff "
       << worst_param;
    return {worst_param <= 1e-6 ? Status::Pass : Status::Fail, os.str()};
}

Result check_ablation_trend() {
    ModelConfig base;
    base.band_count = 4;
    base.groups = 2;
    base.scale = 2;
    base.base_filters = 16;
    TrainConfig tc;
    tc.batch_size = 2;
    tc.total_steps = 150;
    tc.seed = 3;
    tc.patch_size = 8;
    std::vector<HsiCube> train{smooth_cube(4, 64, 64, 5, 0.3, "t0"),
                               smooth_cube(4, 64, 64, 6, 0.3, "t1")};
    HsiCube val = smooth_cube(4, 64, 64, 7, 0.3, "val");

    double psnr_by_t[2] = {0, 0};
    long long counts[2] = {0, 0};
    int idx = 0;
    for (int t : {1, 3}) {
        ModelConfig cfg = base;
        cfg.iterations = t;
        Trainer trainer(cfg, tc, train);
        trainer.run();
        EvalImage ev = evaluate_cube(val, trainer.params(), 64, true);
        psnr_by_t[idx] = ev.report.psnr;
        counts[idx] = param_count(cfg);
        ++idx;
    }
    std::ostringstream os;
    os << "validation PSNR: T=1 " << psnr_by_t[0] << " dB, T=3 " << psnr_by_t[1]
       << " dB (advisory trend " << (psnr_by_t[1] >= psnr_by_t[0] ? "holds" : "DOES NOT hold")
       << "); param_count T-invariant: " << (counts[0] == counts[1] ? "yes" : "no");
    // the hard gate: the sweep completed and the count is T-invariant
    return {counts[0] == counts[1] ? Status::Pass : Status::Fail, os.str()};
}

}  // namespace

int main() {
    struct Criterion {
        const char* title;
        Result (*fn)();
    };
    const Criterion criteria[] = {
        {"metric oracle equivalence", check_metric_oracles},
        {"bicubic CAVE baseline plausibility", check_cave_baseline},
        {"end-to-end gradient check", check_gradients},
        {"output averaging identity", check_averaging_identity},
        {"zero-parameter bicubic equivalence", check_zero_parameter_equivalence},
        {"shape contract sweep", check_shape_sweep},
        {"weight-sharing invariant", check_weight_sharing},
        {"single-patch overfit", check_overfit},
        {"seeded determinism and resume", check_determinism},
        {"T ablation sweep", check_ablation_trend},
    };

    bool failed = false;
    int index = 0;
    for (const Criterion& c : criteria) {
        ++index;
        const auto t0 = std::chrono::steady_clock::now();
        Result r;
        try {
            r = c.fn();
        } catch (const std::exception& e) {
            r = {Status::Fail, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const char* tag = r.status == Status::Pass ? "PASS"
                          : r.status == Status::Skip ? "SKIP"
                                                     : "FAIL";
        std::cout << tag << " " << index << ". " << c.title << ": " << r.detail << " ["
                  << std::fixed << std::setprecision(1) << secs << "s]\n"
                  << std::defaultfloat << std::setprecision(6);
        if (r.status == Status::Fail) failed = true;
    }
    return failed ? 1 : 0;
}
