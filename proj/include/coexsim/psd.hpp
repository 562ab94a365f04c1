#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coexsim/interference.hpp"
#include "coexsim/waveform.hpp"

namespace coexsim {

// Discrete spectral density on a uniform frequency grid in units of the
// subcarrier spacing.  Values are power per unit spacing, so the integral
// over the whole grid equals the signal power.
struct PsdEstimate {
    std::vector<double> freqs;  // ascending, centered on 0
    std::vector<double> values; // >= 0

    struct Meta {
        std::size_t segment_len = 0;
        double overlap_frac = 0.5;
        std::string window = "hann";
        std::size_t n_segments = 0;
        std::size_t n_trials = 1;
        std::size_t n_subcarriers = 0;
        double subcarrier_scale = 1.0; // M when normalized per subcarrier
        std::uint64_t seed = 0;
        std::string source;
    } meta;

    double integral() const;
    double value_at(double nu) const; // linear interpolation
};

// Averaged periodogram with a Hann taper.  The grid resolution is at most
// 1/16 of the subcarrier spacing (finer when segment_len demands it).
// max_segments = 0 uses every available segment.
PsdEstimate estimate_psd(const SampleBuffer& buf, std::size_t segment_len, double overlap_frac,
                         std::size_t max_segments = 0);

// Boxcar smoothing over the given bandwidth (in subcarrier spacings).
PsdEstimate smooth_psd(const PsdEstimate& psd, double width);

struct PsdOptions {
    std::size_t segment_len = 0;   // 0 -> max(16 M, 4 K M)
    double overlap_frac = 0.5;
    std::size_t n_windows = 0;     // victim windows per trial (truncated_psd); 0 -> default
    bool aligned = false;          // truncated_psd: windows aligned to the aggressor grid
};

// PSD of one active subcarrier, averaged over n_trials independent symbol
// realizations, scaled by M so its total power equals the symbol power
// (sigma_d2 = 1).  This is the quantity the PSD-based interference model
// integrates.
PsdEstimate subcarrier_psd(const WaveformSpec& spec, std::size_t n_trials, std::uint64_t seed,
                           const PsdOptions& opts = {});

// PSD of the aggressor signal after the victim's receive truncation: the CP
// is discarded and only the M-sample DFT windows are kept; the surviving
// windows are concatenated and fed to the same estimator.  Per-subcarrier
// normalization as in subcarrier_psd.
PsdEstimate truncated_psd(const WaveformSpec& aggressor, const WaveformSpec& victim,
                          std::size_t n_trials, std::uint64_t seed, const PsdOptions& opts = {});

// I_PSD(l) = integral of the density over [(l-1/2), (l+1/2)] subcarrier
// spacings; the input must be the PSD of a single aggressor subcarrier
// centered at 0.
InterferenceTable psd_interference_table(const PsdEstimate& psd, int l_max);

} // namespace coexsim
