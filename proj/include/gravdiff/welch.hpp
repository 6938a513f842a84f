#pragma once

// Welch periodogram, two-sided normalization. For a real series sampled at
// dt, each Hann-windowed segment contributes
//
//   P(w_k) = dt / sum(w_n^2) * |sum_n w_n x_n e^{-i w_k n dt}|^2
//
// so white samples with variance s2/dt (a continuous white process of
// intensity s2) give a flat estimate at s2. Only w >= 0 is returned; the
// estimate is even in w.

#include "gravdiff/constants.hpp"
#include "gravdiff/errors.hpp"
#include "gravdiff/spectra.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace gravdiff {

struct WelchOptions {
    std::size_t segment_len = 1024;
    double overlap = 0.5;        // fraction in [0, 1)
    bool remove_mean = false;    // subtract each segment's mean before windowing
};

struct WelchEstimate {
    NoiseSpectrum spectrum;      // only omega and total are filled
    std::size_t segments = 0;    // periodograms averaged, over all series
};

inline std::vector<double> hann_window(std::size_t n) {
    std::vector<double> w(n);
    if (n == 1) {
        w[0] = 1.0;
        return w;
    }
    // periodic Hann
    for (std::size_t i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * pi * static_cast<double>(i) / static_cast<double>(n));
    return w;
}

inline std::size_t welch_hop(std::size_t segment_len, double overlap) {
    const auto hop = static_cast<std::size_t>(std::llround(static_cast<double>(segment_len) * (1.0 - overlap)));
    return std::max<std::size_t>(hop, 1);
}

inline std::size_t welch_segment_count(std::size_t series_len, std::size_t segment_len, double overlap) {
    if (segment_len == 0 || segment_len > series_len) return 0;
    return (series_len - segment_len) / welch_hop(segment_len, overlap) + 1;
}

namespace detail {
// The FFTW planner is not reentrant.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace detail

/// Ensemble-averaged Welch estimate over several equally sampled series.
inline WelchEstimate welch_spectrum(std::span<const std::vector<double>> series, double dt, const WelchOptions& opt) {
    const std::size_t n = opt.segment_len;
    if (!(dt > 0.0)) throw ConfigError("welch: sample spacing must be positive");
    if (n < 2) throw ConfigError("welch: segment_len must be at least 2");
    if (!(opt.overlap >= 0.0 && opt.overlap < 1.0)) throw ConfigError("welch: overlap must lie in [0, 1)");
    if (series.empty()) throw ConfigError("welch: no series given");
    for (const auto& s : series)
        if (s.size() < n)
            throw ConfigError("welch: segment_len " + std::to_string(n) + " exceeds series length " + std::to_string(s.size()));

    const std::vector<double> w = hann_window(n);
    double w2 = 0.0;
    for (double v : w) w2 += v * v;
    const std::size_t nbins = n / 2 + 1;

    std::unique_ptr<double, decltype(&fftw_free)> in(fftw_alloc_real(n), &fftw_free);
    std::unique_ptr<fftw_complex, decltype(&fftw_free)> out(fftw_alloc_complex(nbins), &fftw_free);
    fftw_plan plan;
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
    }
    if (plan == nullptr) throw ConfigError("welch: FFT plan creation failed");

    std::vector<double> acc(nbins, 0.0);
    std::size_t count = 0;
    const std::size_t hop = welch_hop(n, opt.overlap);
    for (const auto& s : series) {
        for (std::size_t start = 0; start + n <= s.size(); start += hop) {
            double mean = 0.0;
            if (opt.remove_mean) {
                for (std::size_t i = 0; i < n; ++i) mean += s[start + i];
                mean /= static_cast<double>(n);
            }
            for (std::size_t i = 0; i < n; ++i) in.get()[i] = w[i] * (s[start + i] - mean);
            fftw_execute(plan);
            for (std::size_t k = 0; k < nbins; ++k) {
                const double re = out.get()[k][0];
                const double im = out.get()[k][1];
                acc[k] += re * re + im * im;
            }
            ++count;
        }
    }
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }

    WelchEstimate est;
    est.segments = count;
    est.spectrum.resize(nbins, false);
    const double norm = dt / (w2 * static_cast<double>(count));
    const double dw = 2.0 * pi / (static_cast<double>(n) * dt);
    for (std::size_t k = 0; k < nbins; ++k) {
        est.spectrum.omega[k] = dw * static_cast<double>(k);
        est.spectrum.total[k] = acc[k] * norm;
    }
    return est;
}

/// Linear interpolation of an estimate at w (inside its grid).
inline double interpolate_spectrum(const NoiseSpectrum& s, double w) {
    if (s.size() < 2 || w < s.omega.front() || w > s.omega.back()) throw DomainError("frequency outside the estimate grid");
    const double dw = s.omega[1] - s.omega[0];
    const auto k = std::min(static_cast<std::size_t>((w - s.omega[0]) / dw), s.size() - 2);
    const double f = (w - s.omega[k]) / dw;
    return (1.0 - f) * s.total[k] + f * s.total[k + 1];
}

} // namespace gravdiff
