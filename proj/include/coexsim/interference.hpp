#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "coexsim/waveform.hpp"

namespace coexsim {

enum class InterferenceModel { Psd, Evm };
enum class SyncModel { Aligned, UniformOffset };

std::string to_string(InterferenceModel model);
std::string to_string(SyncModel sync);

// Mean interference power I(l) injected by one aggressor subcarrier onto a
// victim subcarrier at spectral distance l, normalized so that the victim's
// own per-subcarrier demodulated signal power is 1 (sigma_d2 = 1).
struct InterferenceTable {
    InterferenceModel model = InterferenceModel::Evm;
    SyncModel sync = SyncModel::UniformOffset;
    std::string victim_label;
    std::string aggressor_label;
    int l_max = 0;
    std::vector<double> power;       // linear, index l + l_max
    std::vector<double> std_error;   // per-entry standard error (0 for PSD)
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::size_t victim_m = 0;        // victim DFT size
    bool victim_rect_window = true;  // victim uses a rectangular receive window
    std::string warning;             // e.g. low trial budget

    // Tail model for distances beyond l_max: I(l) ~ tail_coeff / |l|^tail_exponent.
    double tail_coeff = 0.0;
    double tail_exponent = 2.0;
    bool tail_valid = false;

    double at(int l) const;              // throws range_error outside [-l_max, l_max]
    double std_error_at(int l) const;
    double at_extrapolated(int l) const; // uses the tail model beyond l_max
    bool covers(int l) const { return l >= -l_max && l <= l_max; }

    // Fit the tail on the table's last decade of distances.  Tables with a
    // rectangular-window victim deconvolve the DFT leakage envelope
    // (M sin(pi l / M) / pi)^2 before averaging, which removes the finite-M
    // bias of a plain l^2 fit; PSD tables fit both coefficient and exponent.
    void fit_tail();
};

struct SpectrumAllocation {
    std::size_t n_total = 0;
    std::vector<std::size_t> incumbent;
    std::vector<std::size_t> secondary;
    void validate() const; // disjoint, indices within [0, n_total)
};

enum class Direction { SecondaryToIncumbent, IncumbentToSecondary };

struct EvmOptions {
    std::size_t n_symbols = 32;        // victim symbols measured per trial
    std::size_t aggressor_subcarrier = 0; // 0 -> M/2
};

// Monte Carlo EVM table: the aggressor transmits i.i.d. unit-variance
// symbols on one subcarrier, the victim demodulator runs over aggressor-only
// signal, and mean |eta|^2 per victim subcarrier is recorded at l = q - m.
InterferenceTable evm_interference_table(const WaveformSpec& victim,
                                         const WaveformSpec& aggressor, int l_max,
                                         std::size_t n_trials, SyncModel sync,
                                         std::uint64_t seed, const EvmOptions& opts = {});

// I_tot = sum over victim and aggressor subcarrier pairs of I(q - m).
double total_interference(const InterferenceTable& table, const SpectrumAllocation& alloc,
                          Direction direction, bool allow_extrapolation = true);

// Variance of the interference seen on one victim subcarrier:
// sum over aggressor subcarriers q of I(q - m).  This is the variance to
// feed white-Gaussian performance formulas.
double per_subcarrier_variance(const InterferenceTable& table, const SpectrumAllocation& alloc,
                               std::size_t victim_subcarrier, Direction direction,
                               bool allow_extrapolation = true);

// Per-unit-power interference a secondary subcarrier injects into the whole
// incumbent set; used as the weight vector of the power allocator.
std::vector<double> injection_weights(const InterferenceTable& table,
                                      const SpectrumAllocation& alloc,
                                      bool allow_extrapolation = true);

struct InterferenceAutocorr {
    std::size_t n_subcarriers = 0;
    std::size_t n_lags = 0;
    std::size_t aggressor_subcarrier = 0;
    std::vector<std::complex<double>> rho; // (subcarrier, lag); rho(m,0) = 1
    std::vector<double> mean_power;        // per subcarrier
    std::vector<std::size_t> n_samples;    // per lag, for confidence bands

    std::complex<double> rho_at(std::size_t m, std::size_t lag) const {
        return rho[m * n_lags + lag];
    }
    // Victim subcarrier at spectral distance l from the aggressor.
    std::complex<double> rho_at_distance(int l, std::size_t lag) const;
};

// Normalized autocorrelation of eta_m[n] across victim symbol index, per
// victim subcarrier.  Lag is one victim symbol for a CP-OFDM victim and one
// half-symbol for an OQAM victim.
InterferenceAutocorr interference_autocorrelation(const WaveformSpec& victim,
                                                  const WaveformSpec& aggressor,
                                                  std::size_t n_symbols, std::size_t n_trials,
                                                  SyncModel sync, std::uint64_t seed);

} // namespace coexsim
