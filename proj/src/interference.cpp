#include "coexsim/interference.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "coexsim/errors.hpp"
#include "coexsim/rng.hpp"

namespace coexsim {

std::string to_string(InterferenceModel model) {
    return model == InterferenceModel::Psd ? "psd" : "evm";
}

std::string to_string(SyncModel sync) {
    return sync == SyncModel::Aligned ? "aligned" : "uniform-offset";
}

double InterferenceTable::at(int l) const {
    if (!covers(l))
        throw range_error("spectral distance " + std::to_string(l) + " outside table range +-" +
                          std::to_string(l_max));
    return power[static_cast<std::size_t>(l + l_max)];
}

double InterferenceTable::std_error_at(int l) const {
    if (!covers(l)) return 0.0;
    return std_error[static_cast<std::size_t>(l + l_max)];
}

double InterferenceTable::at_extrapolated(int l) const {
    if (covers(l)) return at(l);
    if (!tail_valid)
        throw range_error("distance " + std::to_string(l) +
                          " beyond l_max and no valid tail fit is available");
    return tail_coeff / std::pow(std::abs(static_cast<double>(l)), tail_exponent);
}

void InterferenceTable::fit_tail() {
    tail_valid = false;
    const int lo = std::max(2, static_cast<int>(std::ceil(static_cast<double>(l_max) / 10.0)));
    if (l_max < lo + 1) return;

    if (model == InterferenceModel::Evm && victim_rect_window && victim_m > 0) {
        // Deconvolve the receive-window leakage envelope, then average.
        double acc = 0.0;
        std::size_t count = 0;
        const double m = static_cast<double>(victim_m);
        for (int l = lo; l <= l_max; ++l) {
            for (int sl : {l, -l}) {
                const double v = at(sl);
                if (v <= 0.0) continue;
                const double envelope = m * std::sin(M_PI * std::abs(sl) / m) / M_PI;
                acc += v * envelope * envelope;
                ++count;
            }
        }
        if (count < 3) return;
        tail_coeff = acc / static_cast<double>(count);
        tail_exponent = 2.0;
        tail_valid = tail_coeff > 0.0;
        return;
    }

    // Log-log least squares for coefficient and exponent.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t count = 0;
    for (int l = lo; l <= l_max; ++l) {
        for (int sl : {l, -l}) {
            const double v = at(sl);
            if (v <= 0.0) continue;
            const double x = std::log(static_cast<double>(std::abs(sl)));
            const double y = std::log(v);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++count;
        }
    }
    if (count < 3) return;
    const double n = static_cast<double>(count);
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-12) return;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    tail_exponent = -slope;
    tail_coeff = std::exp(intercept);
    tail_valid = tail_coeff > 0.0 && std::isfinite(tail_exponent);
}

void SpectrumAllocation::validate() const {
    std::set<std::size_t> seen;
    for (std::size_t i : incumbent) {
        if (i >= n_total) throw config_error("incumbent subcarrier index out of band");
        if (!seen.insert(i).second) throw config_error("duplicate incumbent subcarrier index");
    }
    for (std::size_t s : secondary) {
        if (s >= n_total) throw config_error("secondary subcarrier index out of band");
        if (!seen.insert(s).second)
            throw config_error("incumbent and secondary sets must be disjoint");
    }
}

namespace {

struct SetsView {
    const std::vector<std::size_t>* victim;
    const std::vector<std::size_t>* aggressor;
};

SetsView pick_sets(const SpectrumAllocation& alloc, Direction direction) {
    if (direction == Direction::SecondaryToIncumbent) return {&alloc.incumbent, &alloc.secondary};
    return {&alloc.secondary, &alloc.incumbent};
}

double lookup(const InterferenceTable& table, int l, bool allow_extrapolation) {
    return allow_extrapolation ? table.at_extrapolated(l) : table.at(l);
}

// One Monte Carlo trial: synthesize an aggressor-only burst long enough that
// every measured victim symbol is in steady state, then run the victim
// demodulator.  Returns the demodulated grid (eta values).
SymbolGrid demod_aggressor_burst(const WaveformSpec& victim, const WaveformSpec& aggressor,
                                 std::size_t aggressor_subcarrier, std::int64_t tau,
                                 std::size_t n_victim_symbols, std::mt19937_64& rng) {
    const std::int64_t span_lo = tau;
    // Last receive window: symbol n_victim_symbols-1 for CP-OFDM, half-symbol
    // 2*n_victim_symbols-1 (prototype-length analysis span) for OQAM.
    const std::int64_t span_hi =
        victim.kind == WaveformKind::OqamPhydyas
            ? tau + static_cast<std::int64_t>(2 * n_victim_symbols * victim.stride() +
                                              victim.prototype_len())
            : tau + static_cast<std::int64_t>(n_victim_symbols * victim.stride() +
                                              victim.n_subcarriers);

    SampleBuffer buf;
    if (aggressor.kind == WaveformKind::CpOfdm) {
        const std::int64_t frame = static_cast<std::int64_t>(aggressor.stride());
        const std::int64_t j0 = (span_lo - 2 * frame) / frame - 2;
        const std::int64_t j1 = (span_hi + 2 * frame) / frame + 2;
        const std::size_t count = static_cast<std::size_t>(j1 - j0 + 1);
        auto grid = random_qpsk_grid(aggressor.n_subcarriers, count, {aggressor_subcarrier}, 1.0, rng);
        buf = cp_ofdm_modulate(grid, aggressor);
        buf.origin = j0 * frame;
    } else {
        const std::int64_t stride = static_cast<std::int64_t>(aggressor.stride());
        const std::int64_t pulse = static_cast<std::int64_t>(aggressor.prototype_len());
        const std::int64_t n0 = (span_lo - pulse - 2 * stride) / stride - 2;
        const std::int64_t n1 = (span_hi + 2 * stride) / stride + 2;
        const std::size_t count = static_cast<std::size_t>(n1 - n0 + 1);
        auto proto = phydyas_prototype(aggressor.n_subcarriers, aggressor.overlap);
        auto grid = random_pam_grid(aggressor.n_subcarriers, count, {aggressor_subcarrier}, 1.0, rng);
        buf = oqam_modulate(grid, aggressor, proto);
        buf.origin = n0 * stride;
    }

    if (victim.kind == WaveformKind::CpOfdm)
        return cp_ofdm_demodulate(buf, victim, tau, n_victim_symbols);
    auto vproto = phydyas_prototype(victim.n_subcarriers, victim.overlap);
    return oqam_demodulate(buf, victim, vproto, tau, 2 * n_victim_symbols);
}

void check_pair(const WaveformSpec& victim, const WaveformSpec& aggressor) {
    victim.validate();
    aggressor.validate();
    if (victim.n_subcarriers != aggressor.n_subcarriers)
        throw config_error("victim and aggressor must share the subcarrier grid (same M)");
}

} // namespace

InterferenceTable evm_interference_table(const WaveformSpec& victim,
                                         const WaveformSpec& aggressor, int l_max,
                                         std::size_t n_trials, SyncModel sync,
                                         std::uint64_t seed, const EvmOptions& opts) {
    check_pair(victim, aggressor);
    const std::size_t m = victim.n_subcarriers;
    if (l_max < 1) throw config_error("l_max must be >= 1");
    if (l_max > static_cast<int>(m / 2 - 1))
        throw config_error("l_max must be < M/2 to stay within the simulated band");
    if (n_trials == 0) throw config_error("n_trials must be positive");

    const std::size_t q =
        opts.aggressor_subcarrier ? opts.aggressor_subcarrier : m / 2;
    if (q >= m) throw config_error("aggressor subcarrier outside the grid");
    const std::size_t n_sym = std::max<std::size_t>(4, opts.n_symbols);
    // Offsets are drawn over one full victim symbol period.
    const std::size_t period =
        victim.kind == WaveformKind::CpOfdm ? victim.stride() : victim.symbol_period();

    const std::size_t n_entries = static_cast<std::size_t>(2 * l_max + 1);
    std::vector<double> mean(n_entries, 0.0), m2(n_entries, 0.0);

    for (std::size_t trial = 0; trial < n_trials; ++trial) {
        auto rng = make_stream(seed, trial);
        const std::int64_t tau =
            sync == SyncModel::UniformOffset ? static_cast<std::int64_t>(draw_below(rng, period)) : 0;
        const SymbolGrid eta = demod_aggressor_burst(victim, aggressor, q, tau, n_sym, rng);

        // Per-trial average injected power at each spectral distance.  OQAM
        // victims output two real half-symbols per symbol period; their
        // squared errors are summed so the normalization matches one full
        // symbol of power sigma_d2.
        for (int l = -l_max; l <= l_max; ++l) {
            const std::int64_t sub = static_cast<std::int64_t>(q) - l;
            if (sub < 0 || sub >= static_cast<std::int64_t>(m)) continue;
            const std::size_t ms = static_cast<std::size_t>(sub);
            double acc = 0.0;
            for (std::size_t n = 0; n < eta.n_symbols; ++n) acc += std::norm(eta.at(n, ms));
            double sample = acc / static_cast<double>(eta.n_symbols);
            if (victim.kind == WaveformKind::OqamPhydyas) sample *= 2.0;

            // Welford over trials.
            const std::size_t idx = static_cast<std::size_t>(l + l_max);
            const double delta = sample - mean[idx];
            mean[idx] += delta / static_cast<double>(trial + 1);
            m2[idx] += delta * (sample - mean[idx]);
        }
    }

    InterferenceTable table;
    table.model = InterferenceModel::Evm;
    table.sync = sync;
    table.victim_label = victim.label();
    table.aggressor_label = aggressor.label();
    table.l_max = l_max;
    table.trials = n_trials;
    table.seed = seed;
    table.victim_m = m;
    table.victim_rect_window = victim.kind == WaveformKind::CpOfdm;
    table.power = mean;
    table.std_error.resize(n_entries, 0.0);
    if (n_trials > 1)
        for (std::size_t i = 0; i < n_entries; ++i)
            table.std_error[i] =
                std::sqrt(m2[i] / static_cast<double>(n_trials - 1) / static_cast<double>(n_trials));
    if (n_trials < 1000)
        table.warning = "trial budget below 1000; per-entry standard errors may be large";
    table.fit_tail();
    return table;
}

double total_interference(const InterferenceTable& table, const SpectrumAllocation& alloc,
                          Direction direction, bool allow_extrapolation) {
    alloc.validate();
    const auto sets = pick_sets(alloc, direction);
    double total = 0.0;
    for (std::size_t mv : *sets.victim)
        for (std::size_t qa : *sets.aggressor)
            total += lookup(table, static_cast<int>(qa) - static_cast<int>(mv), allow_extrapolation);
    return total;
}

double per_subcarrier_variance(const InterferenceTable& table, const SpectrumAllocation& alloc,
                               std::size_t victim_subcarrier, Direction direction,
                               bool allow_extrapolation) {
    alloc.validate();
    const auto sets = pick_sets(alloc, direction);
    double total = 0.0;
    for (std::size_t qa : *sets.aggressor)
        total += lookup(table, static_cast<int>(qa) - static_cast<int>(victim_subcarrier),
                        allow_extrapolation);
    return total;
}

std::vector<double> injection_weights(const InterferenceTable& table,
                                      const SpectrumAllocation& alloc,
                                      bool allow_extrapolation) {
    alloc.validate();
    std::vector<double> weights;
    weights.reserve(alloc.secondary.size());
    for (std::size_t k : alloc.secondary) {
        double w = 0.0;
        for (std::size_t mv : alloc.incumbent)
            w += lookup(table, static_cast<int>(k) - static_cast<int>(mv), allow_extrapolation);
        weights.push_back(w);
    }
    return weights;
}

std::complex<double> InterferenceAutocorr::rho_at_distance(int l, std::size_t lag) const {
    const std::int64_t m = static_cast<std::int64_t>(aggressor_subcarrier) - l;
    if (m < 0 || m >= static_cast<std::int64_t>(n_subcarriers))
        throw range_error("distance maps outside the subcarrier grid");
    return rho_at(static_cast<std::size_t>(m), lag);
}

InterferenceAutocorr interference_autocorrelation(const WaveformSpec& victim,
                                                  const WaveformSpec& aggressor,
                                                  std::size_t n_symbols, std::size_t n_trials,
                                                  SyncModel sync, std::uint64_t seed) {
    check_pair(victim, aggressor);
    const std::size_t k_ref = std::max<std::size_t>(
        {victim.kind == WaveformKind::OqamPhydyas ? victim.overlap : 1,
         aggressor.kind == WaveformKind::OqamPhydyas ? aggressor.overlap : 1, std::size_t{2}});
    if (n_symbols < 2 * k_ref)
        throw config_error("n_symbols must be at least 2K = " + std::to_string(2 * k_ref));
    if (n_trials == 0) throw config_error("n_trials must be positive");

    const std::size_t m = victim.n_subcarriers;
    const std::size_t q = m / 2;
    const std::size_t period =
        victim.kind == WaveformKind::CpOfdm ? victim.stride() : victim.symbol_period();
    const std::size_t n_lags = std::min(n_symbols / 2, 2 * k_ref + 1);

    std::vector<std::complex<double>> corr(m * n_lags, {0.0, 0.0});
    std::size_t n_out = 0;

    for (std::size_t trial = 0; trial < n_trials; ++trial) {
        auto rng = make_stream(seed, trial);
        const std::int64_t tau =
            sync == SyncModel::UniformOffset ? static_cast<std::int64_t>(draw_below(rng, period)) : 0;
        const SymbolGrid eta = demod_aggressor_burst(victim, aggressor, q, tau, n_symbols, rng);
        n_out = eta.n_symbols;
        for (std::size_t sub = 0; sub < m; ++sub)
            for (std::size_t lag = 0; lag < n_lags; ++lag)
                for (std::size_t n = 0; n + lag < eta.n_symbols; ++n)
                    corr[sub * n_lags + lag] += eta.at(n + lag, sub) * std::conj(eta.at(n, sub));
    }

    InterferenceAutocorr out;
    out.n_subcarriers = m;
    out.n_lags = n_lags;
    out.aggressor_subcarrier = q;
    out.rho.assign(m * n_lags, {0.0, 0.0});
    out.mean_power.assign(m, 0.0);
    out.n_samples.resize(n_lags);
    for (std::size_t lag = 0; lag < n_lags; ++lag)
        out.n_samples[lag] = n_trials * (n_out - lag);
    for (std::size_t sub = 0; sub < m; ++sub) {
        const double p0 = corr[sub * n_lags].real() / static_cast<double>(out.n_samples[0]);
        out.mean_power[sub] = p0;
        out.rho[sub * n_lags] = {1.0, 0.0};
        if (p0 <= 1e-24) continue; // silent bin: whiteness is vacuous, report zero
        for (std::size_t lag = 1; lag < n_lags; ++lag)
            out.rho[sub * n_lags + lag] =
                corr[sub * n_lags + lag] / static_cast<double>(out.n_samples[lag]) / p0;
    }
    return out;
}

} // namespace coexsim
