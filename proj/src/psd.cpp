#include "coexsim/psd.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "coexsim/errors.hpp"
#include "coexsim/fft.hpp"
#include "coexsim/rng.hpp"

namespace coexsim {

double PsdEstimate::integral() const {
    if (freqs.size() < 2) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < freqs.size(); ++i)
        acc += 0.5 * (values[i] + values[i + 1]) * (freqs[i + 1] - freqs[i]);
    return acc;
}

double PsdEstimate::value_at(double nu) const {
    if (freqs.empty()) throw range_error("empty PSD estimate");
    if (nu <= freqs.front()) return values.front();
    if (nu >= freqs.back()) return values.back();
    const double step = freqs[1] - freqs[0];
    const std::size_t i =
        std::min(freqs.size() - 2, static_cast<std::size_t>((nu - freqs.front()) / step));
    const double t = (nu - freqs[i]) / step;
    return values[i] * (1.0 - t) + values[i + 1] * t;
}

PsdEstimate estimate_psd(const SampleBuffer& buf, std::size_t segment_len, double overlap_frac,
                         std::size_t max_segments) {
    if (buf.samples_per_symbol == 0)
        throw config_error("sample buffer lacks sample-rate metadata (samples_per_symbol)");
    if (segment_len < 8) throw config_error("segment length must be at least 8 samples");
    if (segment_len > buf.samples.size())
        throw config_error("buffer shorter than one estimation segment");
    if (overlap_frac < 0.0 || overlap_frac >= 1.0)
        throw config_error("overlap fraction must lie in [0, 1)");

    const std::size_t m = buf.samples_per_symbol;
    const std::size_t fft_len = next_pow2(std::max(segment_len, 16 * m));
    Fft fft(fft_len);

    std::vector<double> window(segment_len);
    double window_energy = 0.0;
    for (std::size_t k = 0; k < segment_len; ++k) {
        window[k] = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(k) /
                                         static_cast<double>(segment_len));
        window_energy += window[k] * window[k];
    }

    const std::size_t step = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(static_cast<double>(segment_len) *
                                                (1.0 - overlap_frac))));

    std::vector<double> acc(fft_len, 0.0);
    std::vector<cd> work(fft_len);
    std::size_t n_segments = 0;
    for (std::size_t start = 0; start + segment_len <= buf.samples.size(); start += step) {
        std::fill(work.begin(), work.end(), cd{0.0, 0.0});
        for (std::size_t k = 0; k < segment_len; ++k) work[k] = window[k] * buf.samples[start + k];
        fft.forward(work.data());
        for (std::size_t b = 0; b < fft_len; ++b) acc[b] += std::norm(work[b]);
        ++n_segments;
        if (max_segments && n_segments >= max_segments) break;
    }

    PsdEstimate out;
    out.freqs.resize(fft_len);
    out.values.resize(fft_len);
    const double bins_per_spacing = static_cast<double>(fft_len) / static_cast<double>(m);
    const double norm = 1.0 / (static_cast<double>(n_segments) * window_energy *
                               static_cast<double>(m));
    // fftshift to a centered grid in units of the subcarrier spacing.
    for (std::size_t i = 0; i < fft_len; ++i) {
        const std::size_t b = (i + fft_len / 2) % fft_len;
        out.freqs[i] = (static_cast<double>(i) - static_cast<double>(fft_len / 2)) /
                       bins_per_spacing;
        out.values[i] = acc[b] * norm;
    }
    out.meta.segment_len = segment_len;
    out.meta.overlap_frac = overlap_frac;
    out.meta.n_segments = n_segments;
    out.meta.n_subcarriers = m;
    return out;
}

PsdEstimate smooth_psd(const PsdEstimate& psd, double width) {
    if (psd.freqs.size() < 2) return psd;
    const double step = psd.freqs[1] - psd.freqs[0];
    const std::size_t half =
        static_cast<std::size_t>(std::max(0.0, std::floor(width / 2.0 / step)));
    PsdEstimate out = psd;
    const std::size_t n = psd.values.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(n - 1, i + half);
        double acc = 0.0;
        for (std::size_t k = lo; k <= hi; ++k) acc += psd.values[k];
        out.values[i] = acc / static_cast<double>(hi - lo + 1);
    }
    return out;
}

namespace {

std::size_t default_segment_len(const WaveformSpec& spec) {
    const std::size_t m = spec.n_subcarriers;
    const std::size_t proto = spec.kind == WaveformKind::OqamPhydyas ? 4 * spec.prototype_len() : 0;
    return std::max(16 * m, proto);
}

SampleBuffer single_subcarrier_burst(const WaveformSpec& spec, std::size_t n_samples_min,
                                     std::mt19937_64& rng) {
    const std::size_t stride = spec.stride();
    const std::size_t n_frames = n_samples_min / stride + 2;
    if (spec.kind == WaveformKind::CpOfdm) {
        auto grid = random_qpsk_grid(spec.n_subcarriers, n_frames, {0}, 1.0, rng);
        return cp_ofdm_modulate(grid, spec);
    }
    auto proto = phydyas_prototype(spec.n_subcarriers, spec.overlap);
    auto grid = random_pam_grid(spec.n_subcarriers, n_frames, {0}, 1.0, rng);
    return oqam_modulate(grid, spec, proto);
}

PsdEstimate average_trials(std::size_t n_trials, std::uint64_t seed,
                           const std::function<PsdEstimate(std::mt19937_64&)>& one_trial) {
    if (n_trials == 0) throw config_error("n_trials must be positive");
    PsdEstimate acc;
    std::size_t segments = 0;
    for (std::size_t trial = 0; trial < n_trials; ++trial) {
        auto rng = make_stream(seed, trial);
        PsdEstimate est = one_trial(rng);
        segments += est.meta.n_segments;
        if (trial == 0) {
            acc = est;
        } else {
            for (std::size_t i = 0; i < acc.values.size(); ++i) acc.values[i] += est.values[i];
        }
    }
    for (double& v : acc.values) v /= static_cast<double>(n_trials);
    acc.meta.n_segments = segments;
    acc.meta.n_trials = n_trials;
    acc.meta.seed = seed;
    return acc;
}

} // namespace

PsdEstimate subcarrier_psd(const WaveformSpec& spec, std::size_t n_trials, std::uint64_t seed,
                           const PsdOptions& opts) {
    spec.validate();
    const std::size_t seg = opts.segment_len ? opts.segment_len : default_segment_len(spec);
    // Enough signal for ~8 Welch segments per trial.
    const std::size_t need = seg + 7 * std::max<std::size_t>(1, static_cast<std::size_t>(
                                           seg * (1.0 - opts.overlap_frac)));

    PsdEstimate out = average_trials(n_trials, seed, [&](std::mt19937_64& rng) {
        SampleBuffer buf = single_subcarrier_burst(spec, need, rng);
        return estimate_psd(buf, seg, opts.overlap_frac);
    });
    const double scale = static_cast<double>(spec.n_subcarriers);
    for (double& v : out.values) v *= scale;
    out.meta.subcarrier_scale = scale;
    out.meta.source = spec.label();
    return out;
}

PsdEstimate truncated_psd(const WaveformSpec& aggressor, const WaveformSpec& victim,
                          std::size_t n_trials, std::uint64_t seed, const PsdOptions& opts) {
    aggressor.validate();
    victim.validate();
    if (victim.kind != WaveformKind::CpOfdm)
        throw config_error("truncated_psd models a CP-OFDM receive window; victim must be CP-OFDM");
    if (victim.n_subcarriers != aggressor.n_subcarriers)
        throw config_error("victim and aggressor must share the subcarrier grid (same M)");

    const std::size_t m = victim.n_subcarriers;
    const std::size_t frame = victim.stride();
    const std::size_t seg = opts.segment_len ? opts.segment_len : default_segment_len(aggressor);
    const std::size_t n_win =
        opts.n_windows ? opts.n_windows : (seg / m) * 9 / 2 + 1; // ~4.5 segments of windows

    PsdEstimate out = average_trials(n_trials, seed, [&](std::mt19937_64& rng) {
        const std::int64_t tau =
            opts.aligned ? 0 : static_cast<std::int64_t>(draw_below(rng, frame));
        const std::size_t span = n_win * frame + 4 * aggressor.prototype_len();
        SampleBuffer raw = single_subcarrier_burst(aggressor, span + frame, rng);
        raw.origin = -static_cast<std::int64_t>(2 * aggressor.prototype_len());

        SampleBuffer kept;
        kept.samples.reserve(n_win * m);
        kept.samples_per_symbol = m;
        for (std::size_t s = 0; s < n_win; ++s) {
            const std::int64_t t0 =
                tau + static_cast<std::int64_t>(s * frame + victim.cp_len);
            for (std::size_t k = 0; k < m; ++k)
                kept.samples.push_back(raw.at_time(t0 + static_cast<std::int64_t>(k)));
        }
        return estimate_psd(kept, std::min(seg, kept.samples.size()), opts.overlap_frac);
    });
    const double scale = static_cast<double>(m);
    for (double& v : out.values) v *= scale;
    out.meta.subcarrier_scale = scale;
    out.meta.source = aggressor.label() + " truncated by " + victim.label();
    return out;
}

InterferenceTable psd_interference_table(const PsdEstimate& psd, int l_max) {
    if (l_max < 1) throw config_error("l_max must be >= 1");
    if (psd.freqs.size() < 2) throw config_error("PSD estimate is empty");
    const double step = psd.freqs[1] - psd.freqs[0];
    const double lo_needed = -(static_cast<double>(l_max) + 0.5);
    const double hi_needed = static_cast<double>(l_max) + 0.5;
    if (psd.freqs.front() > lo_needed + 1e-12 || psd.freqs.back() < hi_needed - 1e-12)
        throw range_error("PSD estimate does not cover +-(l_max + 1/2) subcarrier spacings");

    // Trapezoid over [l-1/2, l+1/2].  Negative distances integrate in
    // mirrored index order so a symmetric input yields exactly symmetric
    // entries.
    auto band_integral = [&](int l) {
        const double lo = static_cast<double>(l) - 0.5;
        const double hi = static_cast<double>(l) + 0.5;
        const double a_real = (lo - psd.freqs.front()) / step;
        const double b_real = (hi - psd.freqs.front()) / step;
        const auto a = static_cast<std::ptrdiff_t>(std::lround(a_real));
        const auto b = static_cast<std::ptrdiff_t>(std::lround(b_real));
        const bool on_grid = std::abs(a_real - static_cast<double>(a)) < 1e-6 &&
                             std::abs(b_real - static_cast<double>(b)) < 1e-6;
        if (!on_grid) {
            // General fallback: fine sub-sampling with interpolation.
            const int n_sub = 64;
            double acc = 0.0;
            for (int i = 0; i < n_sub; ++i) {
                const double x0 = lo + (hi - lo) * i / n_sub;
                const double x1 = lo + (hi - lo) * (i + 1) / n_sub;
                acc += 0.5 * (psd.value_at(x0) + psd.value_at(x1)) * (x1 - x0);
            }
            return acc;
        }
        double acc = 0.0;
        if (l >= 0)
            for (std::ptrdiff_t i = a; i < b; ++i)
                acc += 0.5 * (psd.values[i] + psd.values[i + 1]);
        else
            for (std::ptrdiff_t i = b; i > a; --i)
                acc += 0.5 * (psd.values[i] + psd.values[i - 1]);
        return acc * step;
    };

    InterferenceTable table;
    table.model = InterferenceModel::Psd;
    table.sync = SyncModel::UniformOffset;
    table.victim_label = "psd-band-integration";
    table.aggressor_label = psd.meta.source;
    table.l_max = l_max;
    table.trials = psd.meta.n_trials;
    table.seed = psd.meta.seed;
    table.victim_m = psd.meta.n_subcarriers;
    table.victim_rect_window = false;
    table.power.resize(static_cast<std::size_t>(2 * l_max + 1));
    table.std_error.assign(table.power.size(), 0.0);
    for (int l = -l_max; l <= l_max; ++l)
        table.power[static_cast<std::size_t>(l + l_max)] = band_integral(l);
    table.fit_tail();
    return table;
}

} // namespace coexsim
