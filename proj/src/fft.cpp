#include "coexsim/fft.hpp"

#include <cmath>

#include "coexsim/errors.hpp"

namespace coexsim {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

Fft::Fft(std::size_t n) : n_(n) {
    if (!is_pow2(n)) throw config_error("FFT size must be a power of two, got " + std::to_string(n));
    bitrev_.resize(n);
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < bits; ++b)
            if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
        bitrev_[i] = r;
    }
    twiddle_.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double phi = -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
        twiddle_[k] = cd(std::cos(phi), std::sin(phi));
    }
}

void Fft::transform(cd* x, bool inverse) const {
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j = bitrev_[i];
        if (j > i) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
        const std::size_t step = n_ / len;
        for (std::size_t base = 0; base < n_; base += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                cd w = twiddle_[k * step];
                if (inverse) w = std::conj(w);
                const cd u = x[base + k];
                const cd t = w * x[base + k + len / 2];
                x[base + k] = u + t;
                x[base + k + len / 2] = u - t;
            }
        }
    }
}

void Fft::forward(cd* data) const { transform(data, false); }
void Fft::inverse(cd* data) const { transform(data, true); }

} // namespace coexsim
