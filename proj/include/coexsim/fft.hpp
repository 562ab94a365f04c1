#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace coexsim {

using cd = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n);

// Iterative radix-2 FFT for power-of-two sizes.  Both directions are
// unnormalized (like FFTW); callers apply their own scaling.  Forward uses
// exp(-j 2 pi k n / N).
class Fft {
  public:
    explicit Fft(std::size_t n);

    std::size_t size() const { return n_; }
    void forward(cd* data) const;
    void inverse(cd* data) const;

  private:
    void transform(cd* data, bool inverse) const;

    std::size_t n_;
    std::vector<std::size_t> bitrev_;
    std::vector<cd> twiddle_; // exp(-j 2 pi k / n), k < n/2
};

} // namespace coexsim
