#pragma once

// The six image-quality measures used to score reconstructions, with pinned
// conventions: per-band Pearson CC averaged over bands; SAM in degrees with
// clamped arccos; global RMSE; ERGAS with the 100*s prefactor; per-band PSNR
// (data range 1, zero-MSE band capped at 100 dB) averaged over bands;
// per-band single-scale SSIM (11x11 Gaussian window, sigma 1.5) averaged
// over bands.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssfn/cube.hpp"

namespace ssfn {

struct MetricReport {
    std::string name;
    int scale = 0;
    double cc = 0, sam = 0, rmse = 0, ergas = 0, psnr = 0, ssim = 0;
};

inline constexpr double kPsnrCapDb = 100.0;

inline double cc(const HsiCube& sr, const HsiCube& hr) {
    if (sr.bands != hr.bands || sr.height != hr.height || sr.width != hr.width)
        throw std::invalid_argument("cc: shape mismatch");
    const std::size_t n = static_cast<std::size_t>(sr.height) * sr.width;
    double total = 0.0;
    int used = 0;
    for (int l = 0; l < sr.bands; ++l) {
        const float* a = sr.band(l);
        const float* b = hr.band(l);
        double ma = 0, mb = 0;
        for (std::size_t i = 0; i < n; ++i) {
            ma += a[i];
            mb += b[i];
        }
        ma /= static_cast<double>(n);
        mb /= static_cast<double>(n);
        double saa = 0, sbb = 0, sab = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double da = a[i] - ma, db = b[i] - mb;
            saa += da * da;
            sbb += db * db;
            sab += da * db;
        }
        if (saa == 0.0 || sbb == 0.0) {
            // a flat band correlates only with an identical flat band
            bool equal = true;
            for (std::size_t i = 0; i < n && equal; ++i) equal = a[i] == b[i];
            if (equal) {
                total += 1.0;
                ++used;
            }
            continue;
        }
        total += sab / std::sqrt(saa * sbb);
        ++used;
    }
    if (used == 0) throw std::runtime_error("cc: all bands degenerate and unequal");
    return total / used;
}

inline double sam(const HsiCube& sr, const HsiCube& hr) {
    if (sr.bands != hr.bands || sr.height != hr.height || sr.width != hr.width)
        throw std::invalid_argument("sam: shape mismatch");
    const std::size_t plane = static_cast<std::size_t>(sr.height) * sr.width;
    double total = 0.0;
    std::size_t used = 0;
    for (std::size_t p = 0; p < plane; ++p) {
        double dot = 0, na = 0, nb = 0;
        for (int l = 0; l < sr.bands; ++l) {
            const double a = sr.data[static_cast<std::size_t>(l) * plane + p];
            const double b = hr.data[static_cast<std::size_t>(l) * plane + p];
            dot += a * b;
            na += a * a;
            nb += b * b;
        }
        if (na == 0.0 || nb == 0.0) continue;  // zero spectra carry no angle
        double arg = dot / std::sqrt(na * nb);
        arg = arg > 1.0 ? 1.0 : (arg < -1.0 ? -1.0 : arg);
        total += std::acos(arg);
        ++used;
    }
    if (used == 0) return 0.0;
    return total / static_cast<double>(used) * 180.0 / std::numbers::pi;
}

inline double rmse(const HsiCube& sr, const HsiCube& hr) {
    if (sr.data.size() != hr.data.size()) throw std::invalid_argument("rmse: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < sr.data.size(); ++i) {
        const double d = static_cast<double>(sr.data[i]) - hr.data[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(sr.data.size()));
}

inline double ergas(const HsiCube& sr, const HsiCube& hr, int s) {
    if (sr.bands != hr.bands || sr.height != hr.height || sr.width != hr.width)
        throw std::invalid_argument("ergas: shape mismatch");
    const std::size_t n = static_cast<std::size_t>(sr.height) * sr.width;
    double acc = 0.0;
    for (int l = 0; l < sr.bands; ++l) {
        const float* a = sr.band(l);
        const float* b = hr.band(l);
        double mu = 0, sq = 0;
        for (std::size_t i = 0; i < n; ++i) {
            mu += b[i];
            const double d = static_cast<double>(a[i]) - b[i];
            sq += d * d;
        }
        mu /= static_cast<double>(n);
        if (mu == 0.0)
            throw std::runtime_error("ergas: band " + std::to_string(l) + " of reference has zero mean");
        const double rmse_l = std::sqrt(sq / static_cast<double>(n));
        acc += (rmse_l / mu) * (rmse_l / mu);
    }
    return 100.0 * s * std::sqrt(acc / sr.bands);
}

inline double psnr(const HsiCube& sr, const HsiCube& hr) {
    if (sr.bands != hr.bands || sr.height != hr.height || sr.width != hr.width)
        throw std::invalid_argument("psnr: shape mismatch");
    const std::size_t n = static_cast<std::size_t>(sr.height) * sr.width;
    double total = 0.0;
    for (int l = 0; l < sr.bands; ++l) {
        const float* a = sr.band(l);
        const float* b = hr.band(l);
        double mse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = static_cast<double>(a[i]) - b[i];
            mse += d * d;
        }
        mse /= static_cast<double>(n);
        total += mse == 0.0 ? kPsnrCapDb : std::min(kPsnrCapDb, 10.0 * std::log10(1.0 / mse));
    }
    return total / sr.bands;
}

namespace detail {

inline const std::vector<double>& ssim_window() {
    static const std::vector<double> win = [] {
        std::vector<double> w(11 * 11);
        const double sigma = 1.5;
        double sum = 0.0;
        for (int y = 0; y < 11; ++y)
            for (int x = 0; x < 11; ++x) {
                const double dy = y - 5, dx = x - 5;
                const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
                w[static_cast<std::size_t>(y) * 11 + x] = v;
                sum += v;
            }
        for (double& v : w) v /= sum;
        return w;
    }();
    return win;
}

inline double ssim_band(const float* a, const float* b, int h, int w) {
    constexpr double c1 = 0.01 * 0.01;  // (K1*range)^2, range = 1
    constexpr double c2 = 0.03 * 0.03;
    const std::vector<double>& win = ssim_window();
    double total = 0.0;
    std::size_t count = 0;
    for (int y0 = 0; y0 + 11 <= h; ++y0) {
        for (int x0 = 0; x0 + 11 <= w; ++x0) {
            double mua = 0, mub = 0, sa = 0, sb = 0, sab = 0;
            for (int y = 0; y < 11; ++y)
                for (int x = 0; x < 11; ++x) {
                    const double wgt = win[static_cast<std::size_t>(y) * 11 + x];
                    const double va = a[static_cast<std::size_t>(y0 + y) * w + (x0 + x)];
                    const double vb = b[static_cast<std::size_t>(y0 + y) * w + (x0 + x)];
                    mua += wgt * va;
                    mub += wgt * vb;
                    sa += wgt * va * va;
                    sb += wgt * vb * vb;
                    sab += wgt * va * vb;
                }
            sa -= mua * mua;
            sb -= mub * mub;
            sab -= mua * mub;
            const double num = (2.0 * mua * mub + c1) * (2.0 * sab + c2);
            const double den = (mua * mua + mub * mub + c1) * (sa + sb + c2);
            total += num / den;
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

}  // namespace detail

inline double ssim(const HsiCube& sr, const HsiCube& hr) {
    if (sr.bands != hr.bands || sr.height != hr.height || sr.width != hr.width)
        throw std::invalid_argument("ssim: shape mismatch");
    if (sr.height < 11 || sr.width < 11)
        throw std::invalid_argument("ssim: image smaller than the 11x11 window");
    double total = 0.0;
    for (int l = 0; l < sr.bands; ++l)
        total += detail::ssim_band(sr.band(l), hr.band(l), sr.height, sr.width);
    return total / sr.bands;
}

inline MetricReport evaluate_pair(const HsiCube& sr, const HsiCube& hr, int s) {
    MetricReport r;
    r.name = hr.name.empty() ? sr.name : hr.name;
    r.scale = s;
    r.cc = cc(sr, hr);
    r.sam = sam(sr, hr);
    r.rmse = rmse(sr, hr);
    r.ergas = ergas(sr, hr, s);
    r.psnr = psnr(sr, hr);
    r.ssim = ssim(sr, hr);
    return r;
}

inline MetricReport aggregate(const std::vector<MetricReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("aggregate: empty report list");
    MetricReport avg;
    avg.name = "average";
    avg.scale = reports.front().scale;
    for (const MetricReport& r : reports) {
        avg.cc += r.cc;
        avg.sam += r.sam;
        avg.rmse += r.rmse;
        avg.ergas += r.ergas;
        avg.psnr += r.psnr;
        avg.ssim += r.ssim;
    }
    const double n = static_cast<double>(reports.size());
    avg.cc /= n;
    avg.sam /= n;
    avg.rmse /= n;
    avg.ergas /= n;
    avg.psnr /= n;
    avg.ssim /= n;
    return avg;
}

inline std::string metrics_csv(const std::vector<MetricReport>& reports, bool with_average = true) {
    std::ostringstream os;
    os << "name,s,CC,SAM,RMSE,ERGAS,PSNR,SSIM\n";
    auto row = [&os](const MetricReport& r) {
        os << r.name << "," << r.scale << "," << std::fixed << std::setprecision(6) << r.cc << ","
           << r.sam << "," << r.rmse << "," << r.ergas << "," << r.psnr << "," << r.ssim << "\n";
    };
    for (const MetricReport& r : reports) row(r);
    if (with_average && !reports.empty()) row(aggregate(reports));
    return os.str();
}

inline void write_metrics_csv(const std::vector<MetricReport>& reports, const std::string& path,
                              bool with_average = true) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << metrics_csv(reports, with_average);
}

}  // namespace ssfn
