// ssfn: hyperspectral single-image super-resolution toolkit.
//
// Subcommands:
//   prepare  index a dataset directory and write a train/test manifest
//   train    run (or resume) a training job
//   eval     score a checkpoint on the manifest's test set, emit error maps
//   sr       super-resolve one cube with a checkpoint
//   ablate   sweep iteration/group counts under one reduced budget
//   spectra  dump spectral curves at chosen pixels for an SR/HR pair

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ssfn/checkpoint.hpp"
#include "ssfn/config.hpp"
#include "ssfn/cube.hpp"
#include "ssfn/dataset.hpp"
#include "ssfn/image_io.hpp"
#include "ssfn/metrics.hpp"
#include "ssfn/model.hpp"
#include "ssfn/train.hpp"

namespace fs = std::filesystem;
using namespace ssfn;

namespace {

CubeLayout parse_layout(const std::string& s, const std::string& path) {
    if (s == "planar") return CubeLayout::Planar;
    if (s == "banddir") return CubeLayout::BandDir;
    return detect_layout(path);  // "auto"
}

std::vector<HsiCube> load_role_cubes(const DatasetManifest& manifest, Role role) {
    std::vector<HsiCube> cubes;
    for (const std::string& path : manifest.paths_with_role(role)) {
        HsiCube c = load_cube(path, detect_layout(path));
        if (c.name.empty()) c.name = fs::path(path).stem().string();
        cubes.push_back(std::move(c));
    }
    return cubes;
}

std::string sanitize(const std::string& name) {
    std::string out = name.empty() ? "image" : name;
    for (char& ch : out)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_') ch = '_';
    return out;
}

// --- prepare ---------------------------------------------------------------

int cmd_prepare(const std::string& dataset_dir, const std::string& layout,
                const std::string& out_path, std::uint64_t seed, double ratio) {
    if (!fs::is_directory(dataset_dir))
        throw std::runtime_error("prepare: '" + dataset_dir + "' is not a directory");

    std::vector<std::string> candidates;
    for (const auto& entry : fs::directory_iterator(dataset_dir)) {
        const std::string p = entry.path().string();
        if (entry.is_directory()) {
            candidates.push_back(p);
        } else if (entry.is_regular_file()) {
            if (entry.path().extension() == ".hdr") continue;  // sidecar of a planar cube
            if (fs::exists(p + ".hdr")) candidates.push_back(p);
        }
    }
    std::sort(candidates.begin(), candidates.end());
    if (candidates.empty()) throw std::runtime_error("prepare: no cubes found in " + dataset_dir);

    DatasetManifest manifest;
    manifest.split_seed = seed;
    manifest.split_ratio = ratio;
    std::vector<std::string> bad;
    for (const std::string& p : candidates) {
        try {
            HsiCube cube = load_cube(p, parse_layout(layout, p));
            std::cout << "indexed " << p << " (" << cube.bands << "x" << cube.height << "x"
                      << cube.width << ")\n";
            manifest.entries.push_back({p, Role::Train});
        } catch (const std::exception& e) {
            bad.push_back(p + ": " + e.what());
        }
    }
    if (!bad.empty()) {
        for (const std::string& b : bad) std::cerr << "invalid cube: " << b << "\n";
        throw std::runtime_error("prepare: " + std::to_string(bad.size()) + " invalid cube(s)");
    }
    save_manifest(split_dataset(manifest), out_path);
    std::cout << "wrote " << out_path << " (" << manifest.entries.size() << " cubes)\n";
    return 0;
}

// --- train -----------------------------------------------------------------

int cmd_train(const std::string& config_path, const std::string& manifest_path,
              const std::string& out_dir, const std::string& resume_ckpt) {
    ModelConfig mcfg;
    TrainConfig tcfg;
    load_config(config_path, mcfg, tcfg);
    mcfg.validate();
    tcfg.validate();

    DatasetManifest manifest = load_manifest(manifest_path);
    std::vector<HsiCube> cubes = load_role_cubes(manifest, Role::Train);

    fs::create_directories(out_dir);
    save_config((fs::path(out_dir) / "config.cfg").string(), mcfg, tcfg);
    fs::copy_file(manifest_path, fs::path(out_dir) / "manifest.txt",
                  fs::copy_options::overwrite_existing);

    std::optional<Trainer> trainer;
    if (resume_ckpt.empty()) {
        trainer.emplace(mcfg, tcfg, std::move(cubes));
    } else {
        Checkpoint ck = load_checkpoint(resume_ckpt);
        if (!ck.model_cfg.same_architecture(mcfg))
            throw std::runtime_error("train: checkpoint architecture differs from " + config_path);
        trainer.emplace(ck, tcfg, std::move(cubes));
    }

    trainer->run(out_dir, [](const TrainLogEntry& e) {
        std::cout << "step " << e.step << " loss " << e.loss << " lr " << e.lr << "\n";
    });
    write_train_log_csv(trainer->log(), (fs::path(out_dir) / "train_log.csv").string());
    std::cout << "final checkpoint: " << (fs::path(out_dir) / "final.ckpt").string() << "\n";
    return 0;
}

// --- eval ------------------------------------------------------------------

void write_error_map(const HsiCube& sr, const HsiCube& hr, int band0, const std::string& path) {
    const int n = sr.height * sr.width;
    std::vector<double> err(static_cast<std::size_t>(n));
    double max_err = 0.0;
    for (int i = 0; i < n; ++i) {
        err[i] = std::abs(static_cast<double>(sr.band(band0)[i]) - hr.band(band0)[i]);
        max_err = std::max(max_err, err[i]);
    }
    // linear map, full range anchored at the per-image maximum error
    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        pixels[i] = max_err == 0.0
                        ? 0
                        : static_cast<std::uint8_t>(std::lround(err[i] / max_err * 255.0));
    write_png_gray8(path, sr.width, sr.height, pixels);
}

int cmd_eval(const std::string& ckpt_path, const std::string& manifest_path,
             const std::string& out_dir, int band1) {
    Checkpoint ck = load_checkpoint(ckpt_path);
    if (band1 < 1 || band1 > ck.model_cfg.band_count)
        throw std::runtime_error("eval: band " + std::to_string(band1) + " out of range 1.." +
                                 std::to_string(ck.model_cfg.band_count));
    const int band0 = band1 - 1;

    ModelParams<float> params = params_from_checkpoint(ck);
    DatasetManifest manifest = load_manifest(manifest_path);
    fs::create_directories(out_dir);
    save_config((fs::path(out_dir) / "config.cfg").string(), ck.model_cfg, ck.train_cfg);

    std::vector<MetricReport> reports;
    for (const std::string& path : manifest.paths_with_role(Role::Test)) {
        HsiCube cube = load_cube(path, detect_layout(path));
        if (cube.name.empty()) cube.name = fs::path(path).stem().string();
        EvalImage ev =
            evaluate_cube(cube, params, ck.train_cfg.eval_crop, ck.train_cfg.antialias);
        ev.report.name = cube.name;
        reports.push_back(ev.report);
        const std::string map = (fs::path(out_dir) / (sanitize(cube.name) + "_band" +
                                                      std::to_string(band1) + "_error.png"))
                                    .string();
        write_error_map(ev.sr, ev.hr, band0, map);
        std::cout << cube.name << ": PSNR " << ev.report.psnr << " SAM " << ev.report.sam << "\n";
    }
    if (reports.empty()) throw std::runtime_error("eval: manifest has no test entries");
    write_metrics_csv(reports, (fs::path(out_dir) / "metrics.csv").string());
    std::cout << "wrote " << (fs::path(out_dir) / "metrics.csv").string() << "\n";
    return 0;
}

// --- sr --------------------------------------------------------------------

int cmd_sr(const std::string& ckpt_path, const std::string& in_path, const std::string& layout,
           const std::string& out_path, bool per_iteration, int scale_check) {
    Checkpoint ck = load_checkpoint(ckpt_path);
    if (scale_check != 0 && scale_check != ck.model_cfg.scale)
        throw std::runtime_error("sr: requested scale " + std::to_string(scale_check) +
                                 " but checkpoint was trained for x" +
                                 std::to_string(ck.model_cfg.scale));
    ModelParams<float> params = params_from_checkpoint(ck);
    HsiCube lr = load_cube(in_path, parse_layout(layout, in_path));
    if (lr.bands != ck.model_cfg.band_count)
        throw std::runtime_error("sr: input has " + std::to_string(lr.bands) +
                                 " bands, checkpoint expects " +
                                 std::to_string(ck.model_cfg.band_count));

    std::vector<HsiCube> iters;
    HsiCube sr = super_resolve(lr, params, per_iteration ? &iters : nullptr);
    save_cube(sr, out_path);
    std::cout << "wrote " << out_path << " (" << sr.bands << "x" << sr.height << "x" << sr.width
              << ")\n";
    if (per_iteration) {
        const fs::path base(out_path);
        for (std::size_t t = 0; t < iters.size(); ++t) {
            fs::path p = base.parent_path() /
                         (base.stem().string() + "_iter" + std::to_string(t + 1) +
                          base.extension().string());
            save_cube(iters[t], p.string());
            std::cout << "wrote " << p.string() << "\n";
        }
    }
    return 0;
}

// --- ablate ----------------------------------------------------------------

int cmd_ablate(const std::string& config_path, const std::string& manifest_path,
               const std::string& out_dir, const std::vector<int>& t_list,
               const std::vector<int>& g_list) {
    ModelConfig base;
    TrainConfig tcfg;
    load_config(config_path, base, tcfg);
    tcfg.validate();

    // reject any invalid combination before spending compute on the first one
    for (int t : t_list)
        for (int g : g_list) {
            ModelConfig m = base;
            m.iterations = t;
            m.groups = g;
            m.validate();
        }

    DatasetManifest manifest = load_manifest(manifest_path);
    std::vector<HsiCube> train_cubes = load_role_cubes(manifest, Role::Train);

    fs::create_directories(out_dir);
    save_config((fs::path(out_dir) / "config.cfg").string(), base, tcfg);

    std::ostringstream csv;
    csv << "T,G,param_count,PSNR,SAM\n";
    for (int t : t_list)
        for (int g : g_list) {
            ModelConfig m = base;
            m.iterations = t;
            m.groups = g;
            Trainer trainer(m, tcfg, train_cubes);  // same budget and seed per combination
            trainer.run();
            std::vector<MetricReport> reports = evaluate_checkpoint_reports(
                trainer.params(), manifest, tcfg.eval_crop, tcfg.antialias);
            MetricReport avg = aggregate(reports);
            csv << t << "," << g << "," << param_count(m) << "," << std::fixed
                << std::setprecision(6) << avg.psnr << "," << avg.sam << "\n";
            std::cout << "T=" << t << " G=" << g << " PSNR " << avg.psnr << " SAM " << avg.sam
                      << "\n";
        }
    const std::string out_csv = (fs::path(out_dir) / "ablate.csv").string();
    std::ofstream(out_csv) << csv.str();
    std::cout << "wrote " << out_csv << "\n";
    return 0;
}

// --- spectra ---------------------------------------------------------------

std::vector<std::pair<int, int>> parse_pixels(const std::string& spec) {
    // "y,x;y,x;..." with 1-based never implied: these are 0-based positions
    std::vector<std::pair<int, int>> pixels;
    std::istringstream is(spec);
    std::string item;
    while (std::getline(is, item, ';')) {
        int y = 0, x = 0;
        char comma = 0;
        std::istringstream ps(item);
        if (!(ps >> y >> comma >> x) || comma != ',')
            throw std::runtime_error("spectra: bad pixel '" + item + "', expected y,x");
        pixels.emplace_back(y, x);
    }
    if (pixels.empty()) throw std::runtime_error("spectra: empty pixel list");
    return pixels;
}

int cmd_spectra(const std::string& sr_path, const std::string& hr_path, const std::string& layout,
                const std::string& pixel_spec, const std::string& out_csv) {
    HsiCube sr = load_cube(sr_path, parse_layout(layout, sr_path));
    HsiCube hr = load_cube(hr_path, parse_layout(layout, hr_path));
    if (sr.bands != hr.bands || sr.height != hr.height || sr.width != hr.width)
        throw std::runtime_error("spectra: SR and HR shapes differ");

    std::vector<std::pair<int, int>> pixels = parse_pixels(pixel_spec);
    for (auto [y, x] : pixels)
        if (y < 0 || y >= sr.height || x < 0 || x >= sr.width)
            throw std::runtime_error("spectra: pixel (" + std::to_string(y) + "," +
                                     std::to_string(x) + ") out of bounds");

    std::ofstream out(out_csv);
    if (!out) throw std::runtime_error("cannot write " + out_csv);
    out << "band,sr_avg,hr_avg";
    for (auto [y, x] : pixels)
        out << ",sr_" << y << "_" << x << ",hr_" << y << "_" << x;
    out << "\n";
    out << std::setprecision(9);
    for (int l = 0; l < sr.bands; ++l) {
        double sr_avg = 0, hr_avg = 0;
        for (auto [y, x] : pixels) {
            sr_avg += sr.at(l, y, x);
            hr_avg += hr.at(l, y, x);
        }
        out << l + 1 << "," << sr_avg / pixels.size() << "," << hr_avg / pixels.size();
        for (auto [y, x] : pixels) out << "," << sr.at(l, y, x) << "," << hr.at(l, y, x);
        out << "\n";
    }
    std::cout << "wrote " << out_csv << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ssfn: hyperspectral single-image super-resolution toolkit"};
    app.require_subcommand(1);

    // prepare
    std::string dataset_dir, layout = "auto", manifest_out = "manifest.txt";
    std::uint64_t seed = 0;
    double ratio = 0.8;
    CLI::App* prepare = app.add_subcommand("prepare", "index a dataset and write a split manifest");
    prepare->add_option("dataset", dataset_dir, "dataset directory")->required();
    prepare->add_option("--layout", layout, "cube layout: auto|planar|banddir");
    prepare->add_option("--out", manifest_out, "manifest output path");
    prepare->add_option("--seed", seed, "split seed");
    prepare->add_option("--ratio", ratio, "train fraction (default 0.8)");

    // train
    std::string config_path, manifest_path, out_dir = "run", resume_ckpt;
    CLI::App* train = app.add_subcommand("train", "train a model (optionally resuming)");
    train->add_option("--config", config_path, "key = value config file")->required();
    train->add_option("--manifest", manifest_path, "dataset manifest")->required();
    train->add_option("--out", out_dir, "output directory");
    train->add_option("--checkpoint", resume_ckpt, "checkpoint to resume from");

    // eval
    std::string eval_ckpt, eval_manifest, eval_out = "eval";
    int band = 27;
    CLI::App* eval = app.add_subcommand("eval", "score a checkpoint on the test set");
    eval->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required();
    eval->add_option("--manifest", eval_manifest, "dataset manifest")->required();
    eval->add_option("--out", eval_out, "output directory");
    eval->add_option("--band", band, "1-based band index for error maps (default 27)");

    // sr
    std::string sr_ckpt, sr_in, sr_out = "sr.raw", sr_layout = "auto";
    bool per_iteration = false;
    int sr_scale = 0;
    CLI::App* sr = app.add_subcommand("sr", "super-resolve one cube");
    sr->add_option("--checkpoint", sr_ckpt, "checkpoint file")->required();
    sr->add_option("input", sr_in, "input LR cube")->required();
    sr->add_option("--out", sr_out, "output cube path");
    sr->add_option("--layout", sr_layout, "input layout: auto|planar|banddir");
    sr->add_option("--scale", sr_scale, "expected scale; fails if the checkpoint disagrees");
    sr->add_flag("--per-iteration", per_iteration, "also write each iteration's output");

    // ablate
    std::string ab_config, ab_manifest, ab_out = "ablate";
    std::vector<int> t_list{1}, g_list{1};
    CLI::App* ablate = app.add_subcommand("ablate", "sweep T and G under one fixed budget");
    ablate->add_option("--config", ab_config, "base config file")->required();
    ablate->add_option("--manifest", ab_manifest, "dataset manifest")->required();
    ablate->add_option("--out", ab_out, "output directory");
    ablate->add_option("--iterations", t_list, "T values to sweep")->required();
    ablate->add_option("--groups", g_list, "G values to sweep")->required();

    // spectra
    std::string sp_sr, sp_hr, sp_layout = "auto", sp_out = "spectra.csv";
    std::string sp_pixels = "20,20;100,100;340,340";
    CLI::App* spectra = app.add_subcommand("spectra", "dump spectral curves at chosen pixels");
    spectra->add_option("sr", sp_sr, "super-resolved cube")->required();
    spectra->add_option("hr", sp_hr, "ground-truth cube")->required();
    spectra->add_option("--layout", sp_layout, "cube layout: auto|planar|banddir");
    spectra->add_option("--pixels", sp_pixels, "semicolon-separated y,x list");
    spectra->add_option("--out", sp_out, "output CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (prepare->parsed())
            return cmd_prepare(dataset_dir, layout, manifest_out, seed, ratio);
        if (train->parsed()) return cmd_train(config_path, manifest_path, out_dir, resume_ckpt);
        if (eval->parsed()) return cmd_eval(eval_ckpt, eval_manifest, eval_out, band);
        if (sr->parsed())
            return cmd_sr(sr_ckpt, sr_in, sr_layout, sr_out, per_iteration, sr_scale);
        if (ablate->parsed()) return cmd_ablate(ab_config, ab_manifest, ab_out, t_list, g_list);
        if (spectra->parsed()) return cmd_spectra(sp_sr, sp_hr, sp_layout, sp_pixels, sp_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
