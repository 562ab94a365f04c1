#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "coexsim/errors.hpp"
#include "coexsim/rng.hpp"
#include "coexsim/waveform.hpp"

using namespace coexsim;

namespace {

double rel_error(const SymbolGrid& a, const SymbolGrid& b, std::size_t skip = 0) {
    double err = 0.0, sig = 0.0;
    for (std::size_t n = skip; n + skip < a.n_symbols; ++n) {
        for (std::size_t m = 0; m < a.n_subcarriers; ++m) {
            err += std::norm(a.at(n, m) - b.at(n, m));
            sig += std::norm(b.at(n, m));
        }
    }
    return std::sqrt(err / sig);
}

} // namespace

TEST_CASE("waveform spec validation") {
    CHECK_NOTHROW(WaveformSpec::cp_ofdm(64, 0));
    CHECK_NOTHROW(WaveformSpec::oqam(8, 2));
    CHECK_THROWS_AS(WaveformSpec::cp_ofdm(100, 8), config_error);  // not a power of two
    CHECK_THROWS_AS(WaveformSpec::cp_ofdm(4, 0), config_error);    // too small
    CHECK_THROWS_AS(WaveformSpec::cp_ofdm(64, 64), config_error);  // cp >= M
    CHECK_THROWS_AS(WaveformSpec::oqam(64, 5), config_error);
    CHECK_THROWS_AS(WaveformSpec::oqam(64, 1), config_error);
    CHECK(WaveformSpec::cp_ofdm(64).cp_len == 8); // default M/8
    CHECK(WaveformSpec::oqam(64).stride() == 32);
    CHECK(WaveformSpec::cp_ofdm(64, 16).stride() == 80);
}

TEST_CASE("phydyas prototype") {
    const auto proto = phydyas_prototype(64, 4);
    CHECK(proto.taps.size() == 256);

    // Linear phase to machine precision.
    double asym = 0.0;
    for (std::size_t k = 0; k < proto.taps.size(); ++k)
        asym = std::max(asym, std::abs(proto.taps[k] - proto.taps[proto.taps.size() - 1 - k]));
    CHECK(asym < 1e-12);

    // Unit energy.
    double energy = 0.0;
    for (double t : proto.taps) energy += t * t;
    CHECK(energy == doctest::Approx(1.0).epsilon(1e-12));

    // Construction uses the frequency coefficients P1 = 0.971960,
    // P2 = 1/sqrt(2), P3 = 0.235147.
    const double p[] = {0.971960, 1.0 / std::sqrt(2.0), 0.235147};
    double worst = 0.0;
    for (std::size_t k = 0; k < 256; ++k) {
        double v = 1.0;
        double sign = -1.0;
        for (int q = 0; q < 3; ++q) {
            v += 2.0 * sign * p[q] * std::cos(2.0 * M_PI * (q + 1) * (k + 0.5) / 256.0);
            sign = -sign;
        }
        worst = std::max(worst, std::abs(proto.taps[k] - proto.energy_norm * v));
    }
    CHECK(worst < 1e-12);

    CHECK_THROWS_AS(phydyas_prototype(64, 5), config_error);
    CHECK_THROWS_AS(phydyas_prototype(64, 1), config_error);
    CHECK(phydyas_prototype(64, 2).taps.size() == 128);
    CHECK(phydyas_prototype(64, 3).taps.size() == 192);
}

TEST_CASE("cp-ofdm modulation basics") {
    const std::size_t m = 64;

    SUBCASE("DC subcarrier gives a constant 1/sqrt(M)") {
        auto spec = WaveformSpec::cp_ofdm(m, 0);
        SymbolGrid grid(m, 1);
        grid.at(0, 0) = 1.0;
        auto buf = cp_ofdm_modulate(grid, spec);
        REQUIRE(buf.samples.size() == m);
        for (const auto& s : buf.samples) {
            CHECK(s.real() == doctest::Approx(1.0 / std::sqrt(64.0)).epsilon(1e-12));
            CHECK(std::abs(s.imag()) < 1e-15);
        }
    }

    SUBCASE("cyclic prefix is a copy of the symbol tail") {
        auto spec = WaveformSpec::cp_ofdm(m, 16);
        auto rng = make_stream(7, 0);
        auto grid = random_qpsk_grid(m, 1, all_subcarriers(m), 1.0, rng);
        auto buf = cp_ofdm_modulate(grid, spec);
        REQUIRE(buf.samples.size() == 80);
        for (std::size_t k = 0; k < 16; ++k)
            CHECK(std::abs(buf.samples[k] - buf.samples[k + m]) < 1e-15);
    }

    SUBCASE("round trip recovers the grid") {
        auto spec = WaveformSpec::cp_ofdm(m, 16);
        auto rng = make_stream(9, 0);
        auto grid = random_qpsk_grid(m, 12, all_subcarriers(m), 1.0, rng);
        auto buf = cp_ofdm_modulate(grid, spec);
        auto rec = cp_ofdm_demodulate(buf, spec, 0, 12);
        CHECK(rel_error(rec, grid) < 1e-10);
    }

    SUBCASE("dimension mismatch is a shape error") {
        auto spec = WaveformSpec::cp_ofdm(m, 8);
        SymbolGrid grid(32, 1);
        CHECK_THROWS_AS(cp_ofdm_modulate(grid, spec), shape_error);
    }
}

TEST_CASE("cp-ofdm demodulation edge cases") {
    const std::size_t m = 64;
    auto spec = WaveformSpec::cp_ofdm(m, 8);

    SUBCASE("all-zero buffer demodulates to an all-zero grid") {
        SampleBuffer buf;
        buf.samples.assign(400, {0.0, 0.0});
        buf.samples_per_symbol = m;
        auto grid = cp_ofdm_demodulate(buf, spec, 0, 4);
        for (const auto& v : grid.data) CHECK(std::abs(v) == 0.0);
    }

    SUBCASE("single OQAM pulse leaks onto every output bin") {
        auto ospec = WaveformSpec::oqam(m, 4);
        auto proto = phydyas_prototype(m, 4);
        SymbolGrid pulse(m, 1);
        pulse.at(0, 20) = 1.0;
        auto buf = oqam_modulate(pulse, ospec, proto);
        // Window fully inside the pulse.
        auto grid = cp_ofdm_demodulate(buf, spec, 64 - static_cast<std::int64_t>(spec.cp_len), 1);
        for (std::size_t q = 0; q < m; ++q) CHECK(std::norm(grid.at(0, q)) > 0.0);
    }

    SUBCASE("windows beyond the buffer read zeros") {
        SampleBuffer buf;
        buf.samples.assign(10, {1.0, 0.0});
        buf.samples_per_symbol = m;
        auto grid = cp_ofdm_demodulate(buf, spec, 500, 1);
        for (const auto& v : grid.data) CHECK(std::abs(v) == 0.0);
    }
}

TEST_CASE("oqam modulation") {
    const std::size_t m = 64;
    auto spec = WaveformSpec::oqam(m, 4);
    auto proto = phydyas_prototype(m, 4);

    SUBCASE("single half-symbol synthesizes one modulated prototype pulse") {
        SymbolGrid pulse(m, 1);
        pulse.at(0, 11) = 1.0;
        auto buf = oqam_modulate(pulse, spec, proto);
        REQUIRE(buf.samples.size() == 256);
        for (std::size_t k = 0; k < 256; ++k)
            CHECK(std::abs(std::abs(buf.samples[k]) - std::abs(proto.taps[k])) < 1e-12);
    }

    SUBCASE("complex grid entries are rejected") {
        SymbolGrid bad(m, 1);
        bad.at(0, 3) = {0.5, 0.5};
        CHECK_THROWS_AS(oqam_modulate(bad, spec, proto), config_error);
    }

    SUBCASE("near-perfect reconstruction: residual below -50 dB") {
        auto rng = make_stream(11, 0);
        const std::size_t nh = 64;
        auto grid = random_pam_grid(m, nh, all_subcarriers(m), 1.0, rng);
        auto buf = oqam_modulate(grid, spec, proto);
        auto rec = oqam_demodulate(buf, spec, proto, 0, nh);
        double err = 0.0, sig = 0.0;
        for (std::size_t n = 8; n < nh - 8; ++n) {
            for (std::size_t q = 0; q < m; ++q) {
                err += std::norm(rec.at(n, q) - grid.at(n, q));
                sig += std::norm(grid.at(n, q));
            }
        }
        CHECK(10.0 * std::log10(err / sig) < -50.0);
    }

    SUBCASE("mean output power is 1 per sample with all subcarriers active") {
        auto rng = make_stream(13, 0);
        const std::size_t nh = 400; // >= 1e4 symbols worth of half-symbol draws
        auto grid = random_pam_grid(m, nh, all_subcarriers(m), 1.0, rng);
        auto buf = oqam_modulate(grid, spec, proto);
        double power = 0.0;
        std::size_t count = 0;
        for (std::size_t k = 256; k + 256 < buf.samples.size(); ++k) {
            power += std::norm(buf.samples[k]);
            ++count;
        }
        CHECK(power / static_cast<double>(count) == doctest::Approx(1.0).epsilon(0.02));
    }
}

TEST_CASE("oqam demodulation edge cases") {
    const std::size_t m = 64;
    auto spec = WaveformSpec::oqam(m, 4);
    auto proto = phydyas_prototype(m, 4);

    SUBCASE("zero input gives zero output") {
        SampleBuffer buf;
        buf.samples.assign(1000, {0.0, 0.0});
        buf.samples_per_symbol = m;
        auto grid = oqam_demodulate(buf, spec, proto, 0, 8);
        for (const auto& v : grid.data) CHECK(std::abs(v) == 0.0);
    }

    SUBCASE("CP-OFDM aggressor leaks onto every analysis bin") {
        auto cspec = WaveformSpec::cp_ofdm(m, 8);
        auto rng = make_stream(17, 0);
        auto grid = random_qpsk_grid(m, 16, {31}, 1.0, rng);
        auto buf = cp_ofdm_modulate(grid, cspec);
        auto eta = oqam_demodulate(buf, spec, proto, 0, 4);
        for (std::size_t n = 0; n < eta.n_symbols; ++n)
            for (std::size_t q = 0; q < m; ++q) CHECK(std::norm(eta.at(n, q)) > 0.0);
    }
}

TEST_CASE("parseval: demodulated energy equals windowed input energy") {
    const std::size_t m = 64;
    auto spec = WaveformSpec::cp_ofdm(m, 0);
    auto rng = make_stream(23, 0);
    auto grid = random_qpsk_grid(m, 10, all_subcarriers(m), 1.0, rng);
    auto buf = cp_ofdm_modulate(grid, spec);
    auto rec = cp_ofdm_demodulate(buf, spec, 0, 10);
    double e_grid = 0.0;
    for (const auto& v : rec.data) e_grid += std::norm(v);
    const double e_buf = buf.energy();
    CHECK(std::abs(e_grid - e_buf) / e_buf < 1e-9);
}

TEST_CASE("synchronized users on disjoint subcarrier sets are orthogonal") {
    const std::size_t m = 64;
    auto spec = WaveformSpec::cp_ofdm(m, 8);
    auto rng = make_stream(29, 0);
    auto aggressor = random_qpsk_grid(m, 8, {0, 1, 2, 3, 4}, 1.0, rng);
    auto buf = cp_ofdm_modulate(aggressor, spec);
    auto eta = cp_ofdm_demodulate(buf, spec, 0, 8);
    for (std::size_t n = 0; n < 8; ++n)
        for (std::size_t q : {8, 20, 40, 63})
            CHECK(std::norm(eta.at(n, q)) < 1e-24);
}

TEST_CASE("modulators and demodulators are linear") {
    const std::size_t m = 64;
    auto spec = WaveformSpec::cp_ofdm(m, 8);
    auto rng = make_stream(31, 0);
    auto grid = random_qpsk_grid(m, 6, all_subcarriers(m), 1.0, rng);
    const double a = 2.5;

    auto scaled = grid;
    for (auto& v : scaled.data) v *= a;
    auto buf1 = cp_ofdm_modulate(grid, spec);
    auto buf2 = cp_ofdm_modulate(scaled, spec);
    for (std::size_t k = 0; k < buf1.samples.size(); ++k)
        CHECK(std::abs(buf2.samples[k] - a * buf1.samples[k]) < 1e-12);

    // Demodulation is additive in the buffer.
    auto rng2 = make_stream(31, 1);
    auto other = cp_ofdm_modulate(random_qpsk_grid(m, 6, all_subcarriers(m), 1.0, rng2), spec);
    SampleBuffer sum;
    sum.samples.resize(buf1.samples.size());
    sum.samples_per_symbol = m;
    for (std::size_t k = 0; k < sum.samples.size(); ++k)
        sum.samples[k] = buf1.samples[k] + other.samples[k];
    auto d_sum = cp_ofdm_demodulate(sum, spec, 0, 6);
    auto d1 = cp_ofdm_demodulate(buf1, spec, 0, 6);
    auto d2 = cp_ofdm_demodulate(other, spec, 0, 6);
    for (std::size_t i = 0; i < d_sum.data.size(); ++i)
        CHECK(std::abs(d_sum.data[i] - d1.data[i] - d2.data[i]) < 1e-12);
}

TEST_CASE("truncated prototype is never rectangular: leakage at every offset") {
    // A single OQAM pulse demodulated through an M-sample window leaks at
    // l = 5 for every relative offset; the worst offset exceeds -40 dB.
    const std::size_t m = 64;
    auto ospec = WaveformSpec::oqam(m, 4);
    auto vspec = WaveformSpec::cp_ofdm(m, 8);
    auto proto = phydyas_prototype(m, 4);
    const std::size_t q = 32;
    SymbolGrid pulse(m, 1);
    pulse.at(0, q) = 1.0;
    auto buf = oqam_modulate(pulse, ospec, proto);

    double worst = 0.0;
    for (std::size_t tau = 0; tau < 256; ++tau) {
        auto eta = cp_ofdm_demodulate(buf, vspec,
                                      static_cast<std::int64_t>(tau) -
                                          static_cast<std::int64_t>(vspec.cp_len),
                                      1);
        const double leak = std::norm(eta.at(0, q - 5));
        CHECK(leak > 0.0);
        worst = std::max(worst, leak);
    }
    CHECK(10.0 * std::log10(worst) > -40.0);
}
