#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "coexsim/fft.hpp"

namespace coexsim {

enum class WaveformKind { CpOfdm, OqamPhydyas };

std::string to_string(WaveformKind kind);

// Physical-layer parameters of one user.  All frequencies are expressed in
// units of the subcarrier spacing; the symbol period T equals n_subcarriers
// samples, so delta_f * T = 1 by construction.
struct WaveformSpec {
    WaveformKind kind = WaveformKind::CpOfdm;
    std::size_t n_subcarriers = 0; // M, power of two
    std::size_t cp_len = 0;        // cyclic prefix, CP-OFDM only
    std::size_t overlap = 4;       // K, OQAM only

    static WaveformSpec cp_ofdm(std::size_t m);                     // cp = m/8
    static WaveformSpec cp_ofdm(std::size_t m, std::size_t cp);
    static WaveformSpec oqam(std::size_t m, std::size_t k = 4);

    std::size_t symbol_period() const { return n_subcarriers; }     // T in samples
    // Distance between consecutive transmit frames: M + cp for CP-OFDM,
    // M/2 (one half-symbol) for OQAM.
    std::size_t stride() const;
    std::size_t prototype_len() const { return overlap * n_subcarriers; }
    std::string label() const;

    void validate() const; // throws config_error
};

// PHYDYAS prototype, real, linear phase, length K*M, unit energy.
struct PrototypeFilter {
    std::vector<double> taps;
    double energy_norm = 1.0; // scale that was applied to reach unit energy
};

// h[k] = 1 + 2 sum_{p=1}^{K-1} (-1)^p P_p cos(2 pi p (k + 1/2) / (K M)),
// sampled symmetrically about the filter midpoint and scaled to unit energy.
PrototypeFilter phydyas_prototype(std::size_t n_subcarriers, std::size_t overlap);

// 2-D array of symbols, indexed (symbol time n, subcarrier m).  CP-OFDM
// grids carry complex QAM symbols; OQAM grids carry real PAM half-symbols
// at half-symbol spacing (imaginary parts must be zero).
struct SymbolGrid {
    std::size_t n_subcarriers = 0;
    std::size_t n_symbols = 0;
    std::vector<std::complex<double>> data; // symbol-major, n_symbols * n_subcarriers
    std::vector<std::size_t> active_set;
    double sigma_d2 = 1.0; // symbol variance of a full (complex) symbol

    SymbolGrid() = default;
    SymbolGrid(std::size_t m, std::size_t n)
        : n_subcarriers(m), n_symbols(n), data(m * n, {0.0, 0.0}) {}

    std::complex<double>& at(std::size_t sym, std::size_t sub) {
        return data[sym * n_subcarriers + sub];
    }
    const std::complex<double>& at(std::size_t sym, std::size_t sub) const {
        return data[sym * n_subcarriers + sub];
    }
};

// Complex baseband time series.  samples[i] sits at absolute time
// origin + i; reads outside the stored range return zero (a burst partially
// overlapping a receive window is physical).  samples_per_symbol carries the
// sample-rate normalization (1/delta_f in samples) for PSD estimation.
struct SampleBuffer {
    std::vector<std::complex<double>> samples;
    std::int64_t origin = 0;
    std::size_t samples_per_symbol = 0;

    std::complex<double> at_time(std::int64_t t) const {
        const std::int64_t i = t - origin;
        if (i < 0 || i >= static_cast<std::int64_t>(samples.size())) return {0.0, 0.0};
        return samples[static_cast<std::size_t>(i)];
    }
    double energy() const;
};

SampleBuffer cp_ofdm_modulate(const SymbolGrid& grid, const WaveformSpec& spec);

// CP-OFDM receive processing: from window_start, discard cp_len samples and
// apply a size-M unitary DFT to the next M samples, once per symbol.  This
// is the only processing applied -- out-of-window content is simply cut.
SymbolGrid cp_ofdm_demodulate(const SampleBuffer& buf, const WaveformSpec& spec,
                              std::int64_t window_start, std::size_t n_symbols);

SampleBuffer oqam_modulate(const SymbolGrid& grid, const WaveformSpec& spec,
                           const PrototypeFilter& proto);

// Matched-filter analysis bank: correlate with the prototype at half-symbol
// offsets, compensate the j^(m+n) phase pattern, keep the real part.
// `alignment` is the absolute time of half-symbol 0's pulse start.
SymbolGrid oqam_demodulate(const SampleBuffer& buf, const WaveformSpec& spec,
                           const PrototypeFilter& proto, std::int64_t alignment,
                           std::size_t n_half_symbols);

// Unit-variance QPSK grid on the given active subcarriers (scaled so that
// E{|d|^2} = sigma_d2).
SymbolGrid random_qpsk_grid(std::size_t n_subcarriers, std::size_t n_symbols,
                            const std::vector<std::size_t>& active, double sigma_d2,
                            std::mt19937_64& rng);

// Real PAM half-symbol grid for OQAM; each entry has variance sigma_d2 / 2
// so that one full symbol period carries sigma_d2, matching CP-OFDM.
SymbolGrid random_pam_grid(std::size_t n_subcarriers, std::size_t n_half_symbols,
                           const std::vector<std::size_t>& active, double sigma_d2,
                           std::mt19937_64& rng);

std::vector<std::size_t> all_subcarriers(std::size_t n_subcarriers);

} // namespace coexsim
