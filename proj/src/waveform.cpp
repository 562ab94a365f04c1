#include "coexsim/waveform.hpp"

#include <cmath>
#include <numeric>

#include "coexsim/errors.hpp"
#include "coexsim/rng.hpp"

namespace coexsim {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// j^(r mod 4)
cd j_pow(std::size_t r) {
    switch (r & 3) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

void check_grid_shape(const SymbolGrid& grid, const WaveformSpec& spec) {
    if (grid.n_subcarriers != spec.n_subcarriers)
        throw shape_error("grid has " + std::to_string(grid.n_subcarriers) +
                          " subcarriers, spec expects " + std::to_string(spec.n_subcarriers));
    if (grid.n_symbols == 0) throw shape_error("grid holds no symbols");
}

} // namespace

std::string to_string(WaveformKind kind) {
    return kind == WaveformKind::CpOfdm ? "cp-ofdm" : "oqam-phydyas";
}

WaveformSpec WaveformSpec::cp_ofdm(std::size_t m) { return cp_ofdm(m, m / 8); }

WaveformSpec WaveformSpec::cp_ofdm(std::size_t m, std::size_t cp) {
    WaveformSpec s;
    s.kind = WaveformKind::CpOfdm;
    s.n_subcarriers = m;
    s.cp_len = cp;
    s.validate();
    return s;
}

WaveformSpec WaveformSpec::oqam(std::size_t m, std::size_t k) {
    WaveformSpec s;
    s.kind = WaveformKind::OqamPhydyas;
    s.n_subcarriers = m;
    s.overlap = k;
    s.cp_len = 0;
    s.validate();
    return s;
}

std::size_t WaveformSpec::stride() const {
    return kind == WaveformKind::CpOfdm ? n_subcarriers + cp_len : n_subcarriers / 2;
}

std::string WaveformSpec::label() const {
    if (kind == WaveformKind::CpOfdm)
        return "cp-ofdm(M=" + std::to_string(n_subcarriers) + ",cp=" + std::to_string(cp_len) + ")";
    return "oqam-phydyas(M=" + std::to_string(n_subcarriers) + ",K=" + std::to_string(overlap) + ")";
}

void WaveformSpec::validate() const {
    if (n_subcarriers < 8 || !is_pow2(n_subcarriers))
        throw config_error("subcarrier count must be a power of two >= 8, got " +
                           std::to_string(n_subcarriers));
    if (kind == WaveformKind::CpOfdm) {
        if (cp_len >= n_subcarriers)
            throw config_error("cp_len must satisfy 0 <= cp_len < M, got " + std::to_string(cp_len));
    } else {
        if (overlap < 2 || overlap > 4)
            throw config_error("OQAM overlap factor K must be one of {2,3,4}, got " +
                               std::to_string(overlap));
    }
}

PrototypeFilter phydyas_prototype(std::size_t n_subcarriers, std::size_t overlap) {
    if (overlap < 2 || overlap > 4)
        throw config_error("PHYDYAS prototype supports K in {2,3,4}, got " +
                           std::to_string(overlap));
    if (!is_pow2(n_subcarriers) || n_subcarriers < 8)
        throw config_error("PHYDYAS prototype needs a power-of-two subcarrier count >= 8");

    // Frequency coefficients P_1..P_{K-1}.  K=4 values are the standard set
    // (P1 = 0.971960, P2 = 1/sqrt(2), P3 = sqrt(1 - P1^2)).
    std::vector<double> p;
    switch (overlap) {
        case 2: p = {kInvSqrt2}; break;
        case 3: p = {0.911438, 0.411438}; break;
        default: p = {0.971960, kInvSqrt2, 0.235147}; break;
    }

    const std::size_t len = overlap * n_subcarriers;
    PrototypeFilter f;
    f.taps.resize(len);
    for (std::size_t k = 0; k < len; ++k) {
        // Sample midway between grid points so the even length stays exactly
        // linear phase: taps[k] == taps[len-1-k].
        const double x = (static_cast<double>(k) + 0.5) / static_cast<double>(len);
        double v = 1.0;
        double sign = -1.0;
        for (std::size_t q = 0; q < p.size(); ++q) {
            v += 2.0 * sign * p[q] * std::cos(2.0 * M_PI * static_cast<double>(q + 1) * x);
            sign = -sign;
        }
        f.taps[k] = v;
    }
    double energy = 0.0;
    for (double t : f.taps) energy += t * t;
    f.energy_norm = 1.0 / std::sqrt(energy);
    for (double& t : f.taps) t *= f.energy_norm;
    return f;
}

double SampleBuffer::energy() const {
    double e = 0.0;
    for (const auto& s : samples) e += std::norm(s);
    return e;
}

SampleBuffer cp_ofdm_modulate(const SymbolGrid& grid, const WaveformSpec& spec) {
    if (spec.kind != WaveformKind::CpOfdm) throw config_error("spec is not CP-OFDM");
    check_grid_shape(grid, spec);

    const std::size_t m = spec.n_subcarriers;
    const std::size_t cp = spec.cp_len;
    const std::size_t frame = m + cp;
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    Fft fft(m);

    SampleBuffer out;
    out.samples.assign(grid.n_symbols * frame, {0.0, 0.0});
    out.samples_per_symbol = m;
    std::vector<cd> body(m);
    for (std::size_t n = 0; n < grid.n_symbols; ++n) {
        for (std::size_t q = 0; q < m; ++q) body[q] = grid.at(n, q);
        fft.inverse(body.data());
        cd* frame_out = &out.samples[n * frame];
        for (std::size_t k = 0; k < cp; ++k) frame_out[k] = scale * body[m - cp + k];
        for (std::size_t k = 0; k < m; ++k) frame_out[cp + k] = scale * body[k];
    }
    return out;
}

SymbolGrid cp_ofdm_demodulate(const SampleBuffer& buf, const WaveformSpec& spec,
                              std::int64_t window_start, std::size_t n_symbols) {
    if (spec.kind != WaveformKind::CpOfdm) throw config_error("spec is not CP-OFDM");
    if (buf.samples.empty()) throw shape_error("empty sample buffer");
    if (n_symbols == 0) throw shape_error("n_symbols must be positive");

    const std::size_t m = spec.n_subcarriers;
    const std::size_t frame = m + spec.cp_len;
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    Fft fft(m);

    SymbolGrid grid(m, n_symbols);
    std::vector<cd> window(m);
    for (std::size_t n = 0; n < n_symbols; ++n) {
        const std::int64_t t0 = window_start + static_cast<std::int64_t>(n * frame + spec.cp_len);
        for (std::size_t k = 0; k < m; ++k) window[k] = buf.at_time(t0 + static_cast<std::int64_t>(k));
        fft.forward(window.data());
        for (std::size_t q = 0; q < m; ++q) grid.at(n, q) = scale * window[q];
    }
    return grid;
}

SampleBuffer oqam_modulate(const SymbolGrid& grid, const WaveformSpec& spec,
                           const PrototypeFilter& proto) {
    if (spec.kind != WaveformKind::OqamPhydyas) throw config_error("spec is not OQAM");
    check_grid_shape(grid, spec);
    const std::size_t m = spec.n_subcarriers;
    const std::size_t len = spec.prototype_len();
    if (proto.taps.size() != len)
        throw shape_error("prototype length " + std::to_string(proto.taps.size()) +
                          " does not match K*M = " + std::to_string(len));
    for (const auto& v : grid.data)
        if (v.imag() != 0.0)
            throw config_error("OQAM grids carry real half-symbols; found a complex entry");

    const std::size_t stride = m / 2;
    const double center = (static_cast<double>(len) - 1.0) / 2.0;
    Fft fft(m);

    // Per-subcarrier phase referenced to the pulse center.
    std::vector<cd> center_phase(m);
    for (std::size_t q = 0; q < m; ++q) {
        const double phi = -2.0 * M_PI * static_cast<double>(q) * center / static_cast<double>(m);
        center_phase[q] = cd(std::cos(phi), std::sin(phi));
    }

    SampleBuffer out;
    out.samples.assign((grid.n_symbols - 1) * stride + len, {0.0, 0.0});
    out.samples_per_symbol = m;
    std::vector<cd> spectrum(m), wave(m);
    for (std::size_t n = 0; n < grid.n_symbols; ++n) {
        for (std::size_t q = 0; q < m; ++q)
            spectrum[q] = grid.at(n, q).real() * j_pow(q + n) * center_phase[q];
        wave = spectrum;
        fft.inverse(wave.data());
        cd* dst = &out.samples[n * stride];
        for (std::size_t k = 0; k < len; ++k) dst[k] += proto.taps[k] * wave[k % m];
    }
    return out;
}

SymbolGrid oqam_demodulate(const SampleBuffer& buf, const WaveformSpec& spec,
                           const PrototypeFilter& proto, std::int64_t alignment,
                           std::size_t n_half_symbols) {
    if (spec.kind != WaveformKind::OqamPhydyas) throw config_error("spec is not OQAM");
    if (buf.samples.empty()) throw shape_error("empty sample buffer");
    const std::size_t m = spec.n_subcarriers;
    const std::size_t len = spec.prototype_len();
    if (proto.taps.size() != len)
        throw shape_error("prototype length " + std::to_string(proto.taps.size()) +
                          " does not match K*M = " + std::to_string(len));
    const std::size_t stride = m / 2;
    if (n_half_symbols == 0) {
        if (buf.samples.size() >= len)
            n_half_symbols = (buf.samples.size() - len) / stride + 1;
        else
            n_half_symbols = 1;
    }

    const double center = (static_cast<double>(len) - 1.0) / 2.0;
    Fft fft(m);
    std::vector<cd> center_phase(m);
    for (std::size_t q = 0; q < m; ++q) {
        const double phi = 2.0 * M_PI * static_cast<double>(q) * center / static_cast<double>(m);
        center_phase[q] = cd(std::cos(phi), std::sin(phi));
    }

    SymbolGrid grid(m, n_half_symbols);
    std::vector<cd> folded(m);
    for (std::size_t n = 0; n < n_half_symbols; ++n) {
        const std::int64_t t0 = alignment + static_cast<std::int64_t>(n * stride);
        std::fill(folded.begin(), folded.end(), cd{0.0, 0.0});
        for (std::size_t k = 0; k < len; ++k)
            folded[k % m] += proto.taps[k] * buf.at_time(t0 + static_cast<std::int64_t>(k));
        fft.forward(folded.data());
        for (std::size_t q = 0; q < m; ++q) {
            const cd v = std::conj(j_pow(q + n)) * center_phase[q] * folded[q];
            grid.at(n, q) = cd(v.real(), 0.0);
        }
    }
    return grid;
}

std::vector<std::size_t> all_subcarriers(std::size_t n_subcarriers) {
    std::vector<std::size_t> v(n_subcarriers);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

SymbolGrid random_qpsk_grid(std::size_t n_subcarriers, std::size_t n_symbols,
                            const std::vector<std::size_t>& active, double sigma_d2,
                            std::mt19937_64& rng) {
    SymbolGrid grid(n_subcarriers, n_symbols);
    grid.active_set = active;
    grid.sigma_d2 = sigma_d2;
    const double a = std::sqrt(sigma_d2 / 2.0);
    for (std::size_t n = 0; n < n_symbols; ++n) {
        for (std::size_t q : active) {
            const std::uint64_t bits = rng();
            grid.at(n, q) = cd((bits & 1) ? a : -a, (bits & 2) ? a : -a);
        }
    }
    return grid;
}

SymbolGrid random_pam_grid(std::size_t n_subcarriers, std::size_t n_half_symbols,
                           const std::vector<std::size_t>& active, double sigma_d2,
                           std::mt19937_64& rng) {
    SymbolGrid grid(n_subcarriers, n_half_symbols);
    grid.active_set = active;
    grid.sigma_d2 = sigma_d2;
    const double a = std::sqrt(sigma_d2 / 2.0);
    for (std::size_t n = 0; n < n_half_symbols; ++n)
        for (std::size_t q : active) grid.at(n, q) = cd((rng() & 1) ? a : -a, 0.0);
    return grid;
}

} // namespace coexsim
