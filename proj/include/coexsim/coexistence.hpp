#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coexsim/interference.hpp"

namespace coexsim {

struct GuardBandResult {
    double constraint_db = 0.0;
    std::size_t guard = 0;
    InterferenceModel model = InterferenceModel::Evm;
    std::size_t incumbent_width = 0;
    std::size_t secondary_width = 0;
    bool satisfiable = true;
    std::size_t ceiling = 0;
    double achieved_db = 0.0;       // interference metric at `guard`
    double violated_db = 0.0;       // metric at `guard - 1` (guard > 0 only)
};

// Mean interference per incumbent subcarrier, in dB relative to the
// per-subcarrier signal power, for a block layout
// [incumbent | g empty | secondary].
double guard_band_metric_db(const InterferenceTable& table, std::size_t incumbent_width,
                            std::size_t secondary_width, std::size_t guard);

// Smallest guard width whose metric satisfies constraint_db.  Exponential
// bracketing followed by bisection; the result is verified minimal.  An
// unreachable constraint returns satisfiable = false instead of throwing.
GuardBandResult required_guard_band(const InterferenceTable& table, std::size_t incumbent_width,
                                    std::size_t secondary_width, double constraint_db,
                                    std::size_t ceiling = 10000);

struct PowerAllocationResult {
    enum class Binding { None, Power, Interference, Both };

    std::vector<double> powers;   // watts per secondary subcarrier
    double capacity = 0.0;        // bits/s/Hz
    Binding binding = Binding::None;
    double lambda = 0.0;          // dual multiplier of the power budget
    double mu = 0.0;              // dual multiplier of the interference budget
    double kkt_residual = 0.0;
    double total_power = 0.0;
    double total_interference = 0.0;
};

std::string to_string(PowerAllocationResult::Binding binding);

// maximize sum_k log2(1 + p_k g_k / n_k)
//   s.t.  sum_k p_k <= p_total,  sum_k w_k p_k <= i_threshold,  p_k >= 0.
// Two-constraint water-filling solved by bisection on the dual multipliers.
PowerAllocationResult allocate_power(std::span<const double> gains, std::span<const double> noise,
                                     std::span<const double> weights, double p_total,
                                     double i_threshold);

// Weak-duality upper bound on the capacity at multipliers (lambda, mu).
double lagrangian_dual_bound(std::span<const double> gains, std::span<const double> noise,
                             std::span<const double> weights, double p_total, double i_threshold,
                             double lambda, double mu);

// The fixed 60-subcarrier coexistence layout: incumbent on 20..39, secondary
// on 0..19 and 40..59, unit gains, noise set from the equal-split SNR.
struct CoexScenario {
    SpectrumAllocation alloc;
    double p_total = 1.0;
    double snr_db = 55.0;

    static CoexScenario standard_60();
    double noise_per_subcarrier() const;
};

struct CapacityCurve {
    std::vector<double> i_th;
    std::vector<PowerAllocationResult> psd; // one per sweep point
    std::vector<PowerAllocationResult> evm;
};

// Capacity of the secondary under both interference models over an I_th
// sweep; table_psd and table_evm describe the same secondary waveform.
CapacityCurve secondary_capacity_curve(const CoexScenario& scenario,
                                       const InterferenceTable& table_psd,
                                       const InterferenceTable& table_evm,
                                       std::span<const double> i_th_sweep);

std::vector<double> log_spaced(double lo, double hi, std::size_t n);

} // namespace coexsim
